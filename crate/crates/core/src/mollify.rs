//! Mollifiers and the embeddings built from them: δ, its powers and
//! derivatives, and piecewise-smooth functions of one variable.
//!
//! All derivatives are analytic. Profile derivatives come from Taylor jets of
//! `exp(−1/(1−q))` composed with `q = |y/κ|²`, so no finite differences are
//! ever taken at the ε scale.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::nets::jet::{exp_series, Jet};
use crate::nets::{MultiIndex, Net, SmoothFn, Structure, SupportHint, DEFAULT_MAX_DERIV_ORDER};
use crate::quadrature::{self, Adaptive};

/// Derivative budget of the standard bump (jets work to any order; this caps cost).
const BUMP_MAX_ORDER: usize = 12;

type ProfileRule = dyn Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync;

/// A user-supplied profile with its own derivative rules.
#[derive(Clone)]
pub struct CustomProfile {
    pub max_order: usize,
    pub nonnegative: bool,
    pub rule: Arc<ProfileRule>,
}

impl CustomProfile {
    pub fn new(
        max_order: usize,
        nonnegative: bool,
        rule: impl Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        CustomProfile {
            max_order,
            nonnegative,
            rule: Arc::new(rule),
        }
    }
}

#[derive(Clone)]
pub enum ProfileKind {
    StandardBump,
    Custom(CustomProfile),
}

enum Profile {
    Bump,
    Custom(CustomProfile),
}

struct Inner {
    dim: usize,
    kappa: f64,
    normalizer: f64,
    nonnegative: bool,
    max_order: usize,
    profile: Profile,
    masses: Mutex<HashMap<u32, f64>>,
}

/// A compactly supported unit-mass bump `φ`, with `φ_ε(x) = ε^{-d} φ(x/ε)`.
#[derive(Clone)]
pub struct Mollifier {
    inner: Arc<Inner>,
}

impl fmt::Debug for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.inner.profile {
            Profile::Bump => "standard_bump",
            Profile::Custom(_) => "custom",
        };
        write!(
            f,
            "Mollifier({kind}, d={}, κ={}, C={})",
            self.inner.dim, self.inner.kappa, self.inner.normalizer
        )
    }
}

/// `Γ(d/2)` for a positive integer `d`.
fn gamma_half(d: usize) -> f64 {
    let (mut g, mut a) = if d % 2 == 0 { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    while a + 1e-9 < d as f64 / 2.0 {
        g *= a;
        a += 1.0;
    }
    g
}

/// Composite fixed-order Gauss–Legendre on `n` equal panels.
fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| quadrature::fixed(a + i as f64 * h, a + (i + 1) as f64 * h, 32, &mut f))
        .sum()
}

/// The unnormalised radial profile `exp(−1/(1−q))`.
fn bump_raw(q: f64) -> f64 {
    if q >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - q)).exp()
    }
}

pub fn make_mollifier(kind: ProfileKind, kappa: f64, dim: usize) -> Result<Mollifier> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("support radius κ = {kappa} must be > 0")));
    }
    if dim == 0 {
        return Err(Error::InvalidParameter("mollifier dimension must be ≥ 1".into()));
    }
    let (profile, normalizer, nonnegative, max_order) = match kind {
        ProfileKind::StandardBump => {
            let d = dim as f64;
            let sphere = 2.0 * std::f64::consts::PI.powf(d / 2.0) / gamma_half(dim);
            let radial = composite(0.0, 1.0, 32, |r| bump_raw(r * r) * r.powi(dim as i32 - 1));
            let mass = sphere * kappa.powi(dim as i32) * radial;
            (Profile::Bump, 1.0 / mass, true, BUMP_MAX_ORDER)
        }
        ProfileKind::Custom(c) => {
            if c.max_order == 0 {
                return Err(Error::InvalidParameter(
                    "custom profile must supply derivative rules (max_order ≥ 1)".into(),
                ));
            }
            let zero = MultiIndex::zero(dim);
            let q = Adaptive {
                rel_tol: 1e-12,
                ..Adaptive::default()
            };
            let mass = match dim {
                1 => q.integrate_scalar(-kappa, kappa, &[0.0], |y| Ok((c.rule)(&zero, &[y])))?,
                2 => q.integrate_scalar(-kappa, kappa, &[0.0], |y1| {
                    q.integrate_scalar(-kappa, kappa, &[0.0], |y2| Ok((c.rule)(&zero, &[y1, y2])))
                })?,
                _ => {
                    return Err(Error::InvalidParameter(
                        "custom profiles are normalised numerically only for d ≤ 2".into(),
                    ))
                }
            };
            if !(mass.abs() > 0.0) {
                return Err(Error::InvalidParameter("custom profile has zero mass".into()));
            }
            let (nn, mo) = (c.nonnegative, c.max_order);
            (Profile::Custom(c), 1.0 / mass, nn, mo)
        }
    };
    Ok(Mollifier {
        inner: Arc::new(Inner {
            dim,
            kappa,
            normalizer,
            nonnegative,
            max_order,
            profile,
            masses: Mutex::new(HashMap::new()),
        }),
    })
}

/// The standard bump on `[-1, 1]` in one dimension.
pub fn standard_bump() -> Mollifier {
    make_mollifier(ProfileKind::StandardBump, 1.0, 1).expect("valid parameters")
}

impl Mollifier {
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    pub fn normalizer(&self) -> f64 {
        self.inner.normalizer
    }

    pub fn nonnegative(&self) -> bool {
        self.inner.nonnegative
    }

    pub fn max_order(&self) -> usize {
        self.inner.max_order
    }

    fn outside(&self, y: &[f64]) -> bool {
        match self.inner.profile {
            Profile::Bump => y.iter().map(|v| v * v).sum::<f64>() >= self.inner.kappa.powi(2),
            Profile::Custom(_) => y.iter().any(|v| v.abs() >= self.inner.kappa),
        }
    }

    /// Taylor jet of `φ` at `y` up to the given order.
    pub fn jet(&self, y: &[f64], order: usize) -> Result<Jet> {
        let inner = &self.inner;
        if order > inner.max_order {
            return Err(Error::OrderExceeded {
                requested: order,
                budget: inner.max_order,
            });
        }
        if y.len() != inner.dim {
            return Err(Error::DimensionMismatch {
                expected: inner.dim,
                found: y.len(),
            });
        }
        let d = inner.dim;
        if self.outside(y) {
            return Ok(Jet::zero(d, order));
        }
        match &inner.profile {
            Profile::Bump => {
                let k2 = inner.kappa * inner.kappa;
                let q0: f64 = y.iter().map(|v| v * v).sum::<f64>() / k2;
                let g0 = -1.0 / (1.0 - q0);
                if g0 < -700.0 {
                    return Ok(Jet::zero(d, order));
                }
                if order == 0 {
                    return Ok(Jet::constant(d, 0, inner.normalizer * g0.exp()));
                }
                let mut q = Jet::zero(d, order);
                for (axis, &v) in y.iter().enumerate() {
                    let t = Jet::variable(d, order, axis, v);
                    q = q.add(&t.mul(&t));
                }
                let q = q.scale(1.0 / k2);
                // g(q) = −1/(1−q) has Taylor coefficients −(1−q₀)^{−(j+1)}.
                let s = 1.0 / (1.0 - q0);
                let g: Vec<f64> = (0..=order).map(|j| -s.powi(j as i32 + 1)).collect();
                Ok(q.compose(&exp_series(&g)).scale(inner.normalizer))
            }
            Profile::Custom(c) => {
                Ok(Jet::from_derivatives(d, order, |a| (c.rule)(a, y)).scale(inner.normalizer))
            }
        }
    }

    /// `φ(y)`.
    pub fn value(&self, y: &[f64]) -> f64 {
        let inner = &self.inner;
        if y.len() != inner.dim || self.outside(y) {
            return 0.0;
        }
        match inner.profile {
            Profile::Bump => {
                let q0: f64 = y.iter().map(|v| v * v).sum::<f64>() / (inner.kappa * inner.kappa);
                inner.normalizer * (-1.0 / (1.0 - q0)).exp()
            }
            Profile::Custom(_) => self.jet(y, 0).map_or(0.0, |j| j.value()),
        }
    }

    /// `∂^α φ(y)`.
    pub fn derivative(&self, alpha: &MultiIndex, y: &[f64]) -> Result<f64> {
        Ok(self.jet(y, alpha.order())?.derivative(alpha))
    }

    /// `∂^α (φ^m)(y)`.
    pub fn power_derivative(&self, m: u32, alpha: &MultiIndex, y: &[f64]) -> Result<f64> {
        if alpha.is_zero() {
            return Ok(self.value(y).powi(m as i32));
        }
        if let (Profile::Bump, 1) = (&self.inner.profile, alpha.order()) {
            if y.len() == self.inner.dim && m > 0 {
                // ∂_i φ^m = −m φ^m · 2y_i / (κ²(1−q)²)
                let v = self.value(y);
                if v == 0.0 {
                    return Ok(0.0);
                }
                let k2 = self.inner.kappa * self.inner.kappa;
                let q: f64 = y.iter().map(|c| c * c).sum::<f64>() / k2;
                let i = alpha.components().iter().position(|&a| a == 1).expect("order-1 index");
                return Ok(-(m as f64) * v.powi(m as i32) * 2.0 * y[i] / (k2 * (1.0 - q) * (1.0 - q)));
            }
        }
        Ok(self.jet(y, alpha.order())?.powi(m).derivative(alpha))
    }

    fn require_1d(&self) -> Result<()> {
        if self.inner.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.inner.dim,
            });
        }
        Ok(())
    }

    /// `∫ φ^n` in one dimension (cached).
    pub fn power_mass(&self, n: u32) -> Result<f64> {
        self.require_1d()?;
        if let Some(&m) = self.inner.masses.lock().expect("mass cache poisoned").get(&n) {
            return Ok(m);
        }
        let k = self.inner.kappa;
        let m = composite(-k, k, 16, |y| self.value(&[y]).powi(n as i32));
        self.inner.masses.lock().expect("mass cache poisoned").insert(n, m);
        Ok(m)
    }

    /// `Φ_n(z) = ∫_{−κ}^{z} φ^n` in one dimension, integrating whichever tail is shorter.
    pub fn cumulative_power(&self, n: u32, z: f64) -> Result<f64> {
        self.require_1d()?;
        let k = self.inner.kappa;
        if z <= -k {
            return Ok(0.0);
        }
        let total = self.power_mass(n)?;
        if z >= k {
            return Ok(total);
        }
        let f = |y: f64| self.value(&[y]).powi(n as i32);
        Ok(if z <= 0.0 {
            quadrature::fixed(-k, z, 32, f)
        } else {
            total - quadrature::fixed(z, k, 32, f)
        })
    }

    /// Support box of `φ_ε` for every `ε ≤ 1`.
    fn support_hint(&self, center: f64) -> SupportHint {
        let k = self.inner.kappa;
        SupportHint {
            lo: vec![center - k; self.inner.dim],
            hi: vec![center + k; self.inner.dim],
            eps0: 1.0,
        }
    }
}

/// `δ^m ≈ φ_ε^m = ε^{−md} φ^m(·/ε)`.
pub fn delta_power_net(m: u32, moll: &Mollifier) -> Result<Net> {
    if m < 1 {
        return Err(Error::InvalidParameter(format!("delta power m = {m} must be ≥ 1")));
    }
    let d = moll.dim();
    let order = DEFAULT_MAX_DERIV_ORDER.min(moll.max_order());
    let mo = moll.clone();
    let kappa = moll.kappa();
    let label = if m == 1 { "delta".to_string() } else { format!("delta^{m}") };
    Ok(Net::new(d, order, label, move |alpha, x, eps| {
        let y: Vec<f64> = x.iter().map(|v| v / eps).collect();
        if mo.outside(&y) {
            return Ok(0.0);
        }
        if alpha.is_zero() {
            return Ok(mo.value(&y).powi(m as i32) * eps.powi(-((m as usize * d) as i32)));
        }
        let jet = mo.jet(&y, alpha.order())?;
        let v = if m == 1 { jet.derivative(alpha) } else { jet.powi(m).derivative(alpha) };
        Ok(v * eps.powi(-((m as usize * d + alpha.order()) as i32)))
    })
    .with_support(moll.support_hint(0.0))
    .with_structure(move |_, _, eps| {
        vec![Structure::Band {
            lo: -kappa * eps,
            hi: kappa * eps,
        }]
    }))
}

/// `∂^k δ ≈ ε^{−1−k} φ^{(k)}(·/ε)` in one dimension.
pub fn delta_derivative_net(k: usize, moll: &Mollifier) -> Result<Net> {
    moll.require_1d()?;
    if k > moll.max_order() {
        return Err(Error::OrderExceeded {
            requested: k,
            budget: moll.max_order(),
        });
    }
    let order = DEFAULT_MAX_DERIV_ORDER.min(moll.max_order() - k);
    let mo = moll.clone();
    let kappa = moll.kappa();
    let label = if k == 0 { "delta".to_string() } else { format!("d^{k}delta") };
    Ok(Net::new(1, order, label, move |alpha, x, eps| {
        let total = k + alpha.order();
        let v = mo.derivative(&MultiIndex::new(vec![total]), &[x[0] / eps])?;
        Ok(v * eps.powi(-(1 + total as i32)))
    })
    .with_support(moll.support_hint(0.0))
    .with_structure(move |_, _, eps| {
        vec![Structure::Band {
            lo: -kappa * eps,
            hi: kappa * eps,
        }]
    }))
}

/// A function of one variable that is smooth on `(−∞, x₀]` and on `[x₀, ∞)`.
#[derive(Debug, Clone)]
pub struct PiecewiseSmooth {
    pub x0: f64,
    pub left: SmoothFn,
    pub right: SmoothFn,
}

impl PiecewiseSmooth {
    pub fn new(x0: f64, left: SmoothFn, right: SmoothFn) -> Self {
        PiecewiseSmooth { x0, left, right }
    }

    /// Heaviside step at `x₀`.
    pub fn heaviside(x0: f64) -> Self {
        let c = |v: f64| {
            SmoothFn::new(1, usize::MAX, move |a, _| if a.is_zero() { v } else { 0.0 })
        };
        PiecewiseSmooth::new(x0, c(0.0), c(1.0))
    }

    /// `|x − x₀|`: continuous with a kink.
    pub fn kink(x0: f64) -> Self {
        let lin = |s: f64| {
            SmoothFn::new(1, usize::MAX, move |a, x| match a.order() {
                0 => s * (x[0] - x0),
                1 => s,
                _ => 0.0,
            })
        };
        PiecewiseSmooth::new(x0, lin(-1.0), lin(1.0))
    }

    /// A globally smooth function (no breakpoint effect).
    pub fn smooth(f: SmoothFn) -> Self {
        PiecewiseSmooth::new(0.0, f.clone(), f)
    }

    fn max_order(&self) -> usize {
        self.left.max_order().min(self.right.max_order())
    }
}

/// `f ∗ φ_ε` for piecewise-smooth `f`.
///
/// Derivatives are moved onto `f`: with `[g] = g(x₀⁺) − g(x₀⁻)`,
/// `∂^k(f∗φ_ε) = f^{(k)}∗φ_ε + Σ_{j<k} [f^{(j)}] φ_ε^{(k−1−j)}(x − x₀)`,
/// which keeps the convolution integrand bounded and the ε-singular part
/// analytic. The integral uses two 32-point Gauss–Legendre panels split at
/// the breakpoint and is divided by the discrete mass of `φ`, so constants
/// are reproduced to rounding.
pub fn embed_piecewise(f: PiecewiseSmooth, moll: &Mollifier) -> Result<Net> {
    moll.require_1d()?;
    if f.left.dim() != 1 || f.right.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: f.left.dim().max(f.right.dim()),
        });
    }
    let order = DEFAULT_MAX_DERIV_ORDER.min(moll.max_order()).min(f.max_order());
    let mo = moll.clone();
    let kappa = moll.kappa();
    let x0 = f.x0;
    let f2 = f.clone();
    Ok(Net::new(1, order, "f*phi_eps", move |alpha, x, eps| {
        let k = alpha.order();
        let x = x[0];
        let ka = MultiIndex::new(vec![k]);
        let ys = (x - x0) / eps;
        let (nodes, weights) = quadrature::rule(32);
        let mut num = 0.0;
        let mut mass = 0.0;
        let split = if ys > -kappa && ys < kappa { ys } else { 0.0 };
        for (a, b) in [(-kappa, split), (split, kappa)] {
            let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
            for (t, w) in nodes.iter().zip(weights) {
                let y = m + h * t;
                let wp = w * h * mo.value(&[y]);
                if wp == 0.0 {
                    continue;
                }
                let arg = x - eps * y;
                // y < ys ⟺ arg > x₀; the midpoint decides which piece a panel uses.
                let g = if m < ys { f2.right.eval(&ka, &[arg]) } else { f2.left.eval(&ka, &[arg]) };
                num += wp * g;
                mass += wp;
            }
        }
        let mut out = num / mass;
        for j in 0..k {
            let jump = f2.right.eval(&MultiIndex::new(vec![j]), &[x0])
                - f2.left.eval(&MultiIndex::new(vec![j]), &[x0]);
            if jump != 0.0 {
                let i = k - 1 - j;
                out += jump
                    * mo.derivative(&MultiIndex::new(vec![i]), &[ys])?
                    * eps.powi(-(1 + i as i32));
            }
        }
        Ok(out)
    })
    .with_structure(move |_, _, eps| {
        vec![Structure::Band {
            lo: x0 - kappa * eps,
            hi: x0 + kappa * eps,
        }]
    }))
}

/// `H ∗ φ_ε` for the standard bump.
pub fn heaviside_net(moll: &Mollifier) -> Result<Net> {
    Ok(embed_piecewise(PiecewiseSmooth::heaviside(0.0), moll)?.with_label("H*phi_eps"))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Bump normaliser, its peak and ∫φ², from 30-digit quadrature of
    // exp(−1/(1−x²)) on [−1, 1].
    const C: f64 = 2.252_283_621_043_581;
    const PHI0: f64 = 0.828_568_839_869_105_2;
    const PHI_SQ: f64 = 0.675_116_813_009_697_5;
    const PHI_CUBE: f64 = 0.486_277_949_449_998_55;

    #[test]
    fn standard_bump_constants() {
        let m = standard_bump();
        assert!((m.normalizer() - C).abs() < 1e-12 * C);
        assert!((m.value(&[0.0]) - PHI0).abs() < 1e-13);
        assert!((m.power_mass(2).unwrap() - PHI_SQ).abs() < 1e-12);
        assert!((m.power_mass(3).unwrap() - PHI_CUBE).abs() < 1e-12);
    }

    #[test]
    fn unit_mass_by_independent_quadrature() {
        let m = standard_bump();
        let q = Adaptive { rel_tol: 1e-13, ..Adaptive::default() };
        let mass = q.integrate_scalar(-1.0, 1.0, &[], |y| Ok(m.value(&[y]))).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);

        let wide = make_mollifier(ProfileKind::StandardBump, 2.5, 1).unwrap();
        let mass = q.integrate_scalar(-2.5, 2.5, &[], |y| Ok(wide.value(&[y]))).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);

        let plane = make_mollifier(ProfileKind::StandardBump, 1.0, 2).unwrap();
        let outer = Adaptive { rel_tol: 1e-10, ..Adaptive::default() };
        let inner = Adaptive { rel_tol: 1e-12, ..Adaptive::default() };
        let mass = outer
            .integrate_scalar(-1.0, 1.0, &[], |a| {
                let h = (1.0 - a * a).max(0.0).sqrt();
                inner.integrate_scalar(-h, h, &[], |b| Ok(plane.value(&[a, b])))
            })
            .unwrap();
        assert!((mass - 1.0).abs() < 1e-9, "{mass}");
    }

    #[test]
    fn bump_is_even_and_compactly_supported() {
        let m = standard_bump();
        for i in 0..50 {
            let y = -1.2 + 0.049 * i as f64;
            assert_eq!(m.value(&[y]), m.value(&[-y]));
            if y.abs() >= 1.0 {
                assert_eq!(m.value(&[y]), 0.0);
            } else {
                assert!(m.value(&[y]) >= 0.0);
            }
        }
    }

    #[test]
    fn jet_derivatives_match_closed_form() {
        // φ′(y) = φ(y)·(−2y/(1−y²)²)
        let m = standard_bump();
        for &y in &[-0.7, -0.2, 0.1, 0.55] {
            let d1 = m.derivative(&MultiIndex::new(vec![1]), &[y]).unwrap();
            let want = m.value(&[y]) * (-2.0 * y / (1.0 - y * y).powi(2));
            assert!((d1 - want).abs() < 1e-13, "{d1} vs {want}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_mollifier(ProfileKind::StandardBump, 0.0, 1).is_err());
        assert!(make_mollifier(ProfileKind::StandardBump, -1.0, 1).is_err());
        let c = CustomProfile::new(0, true, |_, _| 1.0);
        assert!(make_mollifier(ProfileKind::Custom(c), 1.0, 1).is_err());
        assert!(delta_power_net(0, &standard_bump()).is_err());
    }

    #[test]
    fn custom_profile_is_normalised() {
        // (1 − y²)³ on [−1, 1], mass 32/35.
        let c = CustomProfile::new(6, true, |a, y| {
            let v = y[0];
            match a.order() {
                0 => (1.0 - v * v).powi(3),
                1 => -6.0 * v * (1.0 - v * v).powi(2),
                2 => -6.0 * (1.0 - v * v) * (1.0 - 5.0 * v * v),
                3 => 24.0 * v * (3.0 - 5.0 * v * v),
                4 => 72.0 - 360.0 * v * v,
                5 => -720.0 * v,
                6 => -720.0,
                _ => 0.0,
            }
        });
        let m = make_mollifier(ProfileKind::Custom(c), 1.0, 1).unwrap();
        assert!((m.normalizer() - 35.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn delta_nets_at_the_origin() {
        let m = standard_bump();
        let d = delta_power_net(1, &m).unwrap();
        assert!((d.value(&[0.0], 0.1).unwrap() - 10.0 * PHI0).abs() < 1e-12);
        assert_eq!(d.value(&[0.2], 0.1).unwrap(), 0.0);
        let d2 = delta_power_net(2, &m).unwrap();
        assert!((d2.value(&[0.0], 0.1).unwrap() - 100.0 * PHI0 * PHI0).abs() < 1e-11);
        let dd = delta_derivative_net(0, &m).unwrap();
        for &x in &[-0.05, 0.0, 0.03] {
            assert_eq!(dd.value(&[x], 0.1).unwrap(), d.value(&[x], 0.1).unwrap());
        }
        let d1 = delta_derivative_net(1, &m).unwrap();
        assert_eq!(d1.value(&[0.0], 0.01).unwrap(), 0.0);
        assert!((d1.value(&[0.004], 0.01).unwrap() + d1.value(&[-0.004], 0.01).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn delta_power_scaling_law() {
        let m = standard_bump();
        let d3 = delta_power_net(3, &m).unwrap();
        for &eps in &[0.1, 0.01, 1e-4] {
            let v = d3.value(&[0.0], eps).unwrap() * eps.powi(3);
            assert!((v - PHI0.powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn heaviside_embedding() {
        let m = standard_bump();
        let h = heaviside_net(&m).unwrap();
        assert!((h.value(&[0.0], 0.01).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(h.value(&[0.011], 0.01).unwrap(), 1.0);
        assert_eq!(h.value(&[-0.5], 0.01).unwrap(), 0.0);
        let d2 = h.evaluate(&MultiIndex::new(vec![2]), &[0.0], 0.01).unwrap();
        assert!(d2.abs() < 1e-9);
        let d1 = h.evaluate(&MultiIndex::new(vec![1]), &[0.0], 0.01).unwrap();
        assert!((d1 - 100.0 * PHI0).abs() < 1e-10);

        let one = embed_piecewise(PiecewiseSmooth::smooth(crate::nets::library::one(1)), &m).unwrap();
        for &x in &[-1.0, 0.0, 0.004, 2.0] {
            assert!((one.value(&[x], 0.01).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn piecewise_embedding_reproduces_pieces_away_from_breakpoint() {
        let m = standard_bump();
        let k = embed_piecewise(PiecewiseSmooth::kink(0.0), &m).unwrap();
        // |x| is linear on each side, so the even mollifier reproduces it.
        for &x in &[-0.3, -0.02, 0.05, 0.7] {
            assert!((k.value(&[x], 0.01).unwrap() - x.abs()).abs() < 1e-13);
        }
        assert!(k.value(&[0.0], 0.01).unwrap() > 0.0);
    }

    #[test]
    fn cumulative_power_is_monotone_to_the_mass() {
        let m = standard_bump();
        let mut prev = 0.0;
        for i in 0..=40 {
            let z = -1.0 + 0.05 * i as f64;
            let c = m.cumulative_power(2, z).unwrap();
            assert!(c >= prev - 1e-15);
            prev = c;
        }
        assert!((prev - PHI_SQ).abs() < 1e-12);
        assert!((m.cumulative_power(1, 0.0).unwrap() - 0.5).abs() < 1e-9);
    }
}
