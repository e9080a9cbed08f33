use crate::error::{Error, Result};
use crate::mollify::{delta_derivative_net, delta_power_net, Mollifier};
use crate::nets::jet::{powf_series, Jet};
use crate::nets::{MultiIndex, Net, Structure};

/// Orders of `(x, t)` derivatives carried by the closed-form solutions.
pub const SEMILINEAR_ORDER: usize = 2;

/// Initial value `u₀` of the transport problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    /// `δ^m`.
    DeltaPower(u32),
    /// `∂^k δ`.
    DeltaDerivative(usize),
}

impl InitialData {
    pub fn net(self, moll: &Mollifier) -> Result<Net> {
        match self {
            InitialData::DeltaPower(m) => delta_power_net(m, moll),
            InitialData::DeltaDerivative(k) => delta_derivative_net(k, moll),
        }
    }
}

/// Nonlinearity `F` in `∂_t u = F(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemilinearTag {
    /// `F(u) = −u³`.
    DissipativeCubic,
    /// `F(u) = √(1+u²)`.
    SqrtGrowth,
    /// `F(u) = (1+u) ln(1+u)`.
    LogGrowth,
}

impl SemilinearTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SemilinearTag::DissipativeCubic => "dissipative",
            SemilinearTag::SqrtGrowth => "sqrt",
            SemilinearTag::LogGrowth => "log",
        }
    }

    /// `F(u)`.
    pub fn rhs(self, u: f64) -> f64 {
        match self {
            SemilinearTag::DissipativeCubic => -u * u * u,
            SemilinearTag::SqrtGrowth => (1.0 + u * u).sqrt(),
            SemilinearTag::LogGrowth => (1.0 + u) * (1.0 + u).ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SemilinearKind {
    pub tag: SemilinearTag,
    pub initial: InitialData,
}

/// Taylor coefficients of `ln` at `z₀ > 0`.
fn ln_series(z0: f64, order: usize) -> Vec<f64> {
    let mut out = vec![z0.ln()];
    for k in 1..=order {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign / (k as f64 * z0.powi(k as i32)));
    }
    out
}

/// Taylor coefficients of `exp` at `w₀`.
fn exp_taylor(w0: f64, order: usize) -> Vec<f64> {
    let mut out = vec![w0.exp()];
    for k in 1..=order {
        let prev = out[k - 1];
        out.push(prev / k as f64);
    }
    out
}

/// Jet in `t` alone of a function whose `t`-derivatives cycle through `cycle`.
fn time_jet(order: usize, t: f64, cycle: impl Fn(usize, f64) -> f64) -> Jet {
    Jet::from_derivatives(2, order, |a| {
        if a.components()[0] > 0 {
            0.0
        } else {
            cycle(a.components()[1], t)
        }
    })
}

fn solution_jet(tag: SemilinearTag, u0: &Jet, t: f64, x: f64, eps: f64) -> Result<Jet> {
    let order = u0.order();
    let tj = Jet::variable(2, order, 1, t);
    Ok(match tag {
        // u₀ / √(2t u₀² + 1)
        SemilinearTag::DissipativeCubic => {
            let w = tj.mul(&u0.mul(u0)).scale(2.0).add_constant(1.0);
            if w.value() <= 0.0 {
                return Err(Error::DomainViolation {
                    x: vec![x, t],
                    eps,
                    reason: format!("2t·u0² + 1 = {} is not positive", w.value()),
                });
            }
            u0.mul(&w.compose(&powf_series(w.value(), -0.5, order)))
        }
        // u₀ cosh t + √(1+u₀²) sinh t
        SemilinearTag::SqrtGrowth => {
            let cosh = time_jet(order, t, |k, t| if k % 2 == 0 { t.cosh() } else { t.sinh() });
            let sinh = time_jet(order, t, |k, t| if k % 2 == 0 { t.sinh() } else { t.cosh() });
            let s = u0.mul(u0).add_constant(1.0);
            let root = s.compose(&powf_series(s.value(), 0.5, order));
            u0.mul(&cosh).add(&root.mul(&sinh))
        }
        // (u₀ + 1)^{e^t} − 1
        SemilinearTag::LogGrowth => {
            let base = u0.clone().add_constant(1.0);
            if base.value() <= 0.0 {
                return Err(Error::DomainViolation {
                    x: vec![x, t],
                    eps,
                    reason: format!("u0 = {} ≤ −1 leaves the domain of the logarithm", u0.value()),
                });
            }
            let expt = time_jet(order, t, |_, t| t.exp());
            let w = expt.mul(&base.compose(&ln_series(base.value(), order)));
            w.compose(&exp_taylor(w.value(), order)).add_constant(-1.0)
        }
    })
}

/// Closed-form solution of `∂_t u = F(u)`, `u(x, 0) = u₀`, as a net in `(x, t)`.
///
/// The log-growth solution is shifted to `(u₀+1)^{e^t} − 1` so that it solves
/// `∂_t u = (1+u) ln(1+u)` with data exactly `u₀`; the shift by a constant
/// changes no spectrum.
pub fn semilinear_solution(kind: SemilinearKind, moll: &Mollifier) -> Result<Net> {
    let u0 = kind.initial.net(moll)?;
    if u0.max_deriv_order() < SEMILINEAR_ORDER {
        return Err(Error::OrderExceeded {
            requested: SEMILINEAR_ORDER,
            budget: u0.max_deriv_order(),
        });
    }
    let kappa = moll.kappa();
    let tag = kind.tag;
    let label = format!("semilinear:{}({})", tag.as_str(), u0.label());
    let base = u0.clone();
    Ok(Net::new(2, SEMILINEAR_ORDER, label, move |alpha, p, eps| {
        let (x, t) = (p[0], p[1]);
        let order = alpha.order();
        let u0j = Jet::from_derivatives(2, order, |a| {
            if a.components()[1] > 0 {
                0.0
            } else {
                base.evaluate(&MultiIndex::new(vec![a.components()[0]]), &[x], eps)
                    .unwrap_or(f64::NAN)
            }
        });
        if !u0j.value().is_finite() {
            return Err(Error::NonFiniteSample { eps, value: u0j.value() });
        }
        Ok(solution_jet(tag, &u0j, t, x, eps)?.derivative(alpha))
    })
    .with_structure(move |axis, _, eps| {
        if axis == 0 {
            vec![Structure::Band {
                lo: -kappa * eps,
                hi: kappa * eps,
            }]
        } else {
            Vec::new()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollify::standard_bump;

    fn solve(tag: SemilinearTag, initial: InitialData) -> Net {
        semilinear_solution(SemilinearKind { tag, initial }, &standard_bump()).unwrap()
    }

    #[test]
    fn initial_trace_and_ode_residual() {
        let dt = MultiIndex::new(vec![0, 1]);
        for tag in [SemilinearTag::DissipativeCubic, SemilinearTag::SqrtGrowth, SemilinearTag::LogGrowth] {
            let u = solve(tag, InitialData::DeltaPower(1));
            let u0 = delta_power_net(1, &standard_bump()).unwrap();
            for &x in &[-0.013, 0.0, 0.004, 0.3] {
                let e = 0.02;
                assert!((u.value(&[x, 0.0], e).unwrap() - u0.value(&[x], e).unwrap()).abs() < 1e-12);
                for &t in &[0.1, 0.7] {
                    let v = u.value(&[x, t], e).unwrap();
                    let r = u.evaluate(&dt, &[x, t], e).unwrap() - tag.rhs(v);
                    assert!(r.abs() <= 1e-10 * tag.rhs(v).abs().max(1.0), "{tag:?} {x} {t}: {r}");
                }
            }
        }
    }

    #[test]
    fn dissipative_solution_is_bounded() {
        let u = solve(SemilinearTag::DissipativeCubic, InitialData::DeltaPower(3));
        for &e in &[1e-1, 1e-3, 1e-5] {
            for &t in &[0.5, 2.0] {
                assert!(u.value(&[0.0, t], e).unwrap() <= 1.0 / (2.0 * t).sqrt());
            }
        }
    }

    #[test]
    fn log_growth_peak_and_domain() {
        let moll = standard_bump();
        let u = solve(SemilinearTag::LogGrowth, InitialData::DeltaPower(1));
        let (e, t) = (1e-3, 0.5_f64);
        let expected = (moll.value(&[0.0]) / e + 1.0).powf(t.exp()) - 1.0;
        assert!((u.value(&[0.0, t], e).unwrap() / expected - 1.0).abs() < 1e-12);
        let bad = solve(SemilinearTag::LogGrowth, InitialData::DeltaDerivative(1));
        assert!(matches!(bad.value(&[0.002, 0.3], 1e-2), Err(Error::DomainViolation { .. })));
    }
}
