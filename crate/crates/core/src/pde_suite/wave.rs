use super::power_derivative;
use crate::error::{Error, Result};
use crate::mollify::Mollifier;
use crate::nets::{Net, Structure, DEFAULT_MAX_DERIV_ORDER};

/// Initial data `u(x,0) = c₀δ^m`, `∂_t u(x,0) = c₁δ^n` for the 1-D wave equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveData1D {
    pub c0: f64,
    pub c1: f64,
    pub m: u32,
    pub n: u32,
}

impl WaveData1D {
    pub fn new(c0: f64, c1: f64, m: u32, n: u32) -> Result<Self> {
        let data = WaveData1D { c0, c1, m, n };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<()> {
        if !(self.c0.is_finite() && self.c1.is_finite()) || (self.c0 == 0.0 && self.c1 == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wave data needs finite c0, c1 with one nonzero (got {}, {})",
                self.c0, self.c1
            )));
        }
        if self.m < 1 || self.n < 1 {
            return Err(Error::InvalidParameter(format!(
                "delta orders must be ≥ 1 (got m = {}, n = {})",
                self.m, self.n
            )));
        }
        Ok(())
    }
}

/// d'Alembert solution of `∂_t²u − ∂_x²u = 0` in the variables `(x, t)`:
///
/// `u_ε = c₀/2·(φ_ε^m(x−t) + φ_ε^m(x+t)) + c₁/2·∫_{x−t}^{x+t} φ_ε^n`.
///
/// The primitive `Φ_n` of `φ^n` is integrated over its shorter tail; every
/// derivative is a derivative of `φ_ε^m` or `φ_ε^n` at `x ± t`.
pub fn dalembert_wave(data: &WaveData1D, moll: &Mollifier) -> Result<Net> {
    data.validate()?;
    if moll.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: moll.dim(),
        });
    }
    let order = DEFAULT_MAX_DERIV_ORDER.min(moll.max_order());
    let mo = moll.clone();
    let kappa = moll.kappa();
    let WaveData1D { c0, c1, m, n } = *data;
    let label = format!("wave1d(c0={c0},c1={c1},m={m},n={n})");
    Ok(Net::new(2, order, label, move |alpha, p, eps| {
        let (a, b) = (alpha.components()[0], alpha.components()[1]);
        let k = a + b;
        let (minus, plus) = (p[0] - p[1], p[0] + p[1]);
        // ∂_x^a ∂_t^b g(x − t) = (−1)^b g^{(a+b)}(x − t).
        let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = 0.0;
        if c0 != 0.0 {
            let f = |z| power_derivative(&mo, m, k, z, eps);
            out += 0.5 * c0 * (sign * f(minus)? + f(plus)?);
        }
        if c1 != 0.0 {
            out += 0.5
                * c1
                * if k == 0 {
                    let big = |z: f64| mo.cumulative_power(n, z / eps);
                    eps.powi(1 - n as i32) * (big(plus)? - big(minus)?)
                } else {
                    let f = |z| power_derivative(&mo, n, k - 1, z, eps);
                    f(plus)? - sign * f(minus)?
                };
        }
        Ok(out)
    })
    .with_structure(move |axis, p, eps| {
        // The characteristics x = ±t, seen along either coordinate.
        let w = kappa * eps;
        let c = if axis == 0 { p[1] } else { p[0] };
        vec![
            Structure::Band { lo: -c - w, hi: -c + w },
            Structure::Band { lo: c - w, hi: c + w },
        ]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollify::standard_bump;
    use crate::nets::{DiffPolynomial, MultiIndex};

    #[test]
    fn vanishes_outside_light_cone() {
        let u = dalembert_wave(&WaveData1D::new(1.0, 0.0, 1, 1).unwrap(), &standard_bump()).unwrap();
        assert_eq!(u.value(&[0.5, 1.0], 1e-2).unwrap(), 0.0);
        assert_eq!(u.value(&[-1.7, 1.0], 1e-2).unwrap(), 0.0);
        assert!(u.value(&[1.0, 1.0], 1e-2).unwrap() > 1.0);
    }

    #[test]
    fn velocity_data_fills_the_cone() {
        let moll = standard_bump();
        let u = dalembert_wave(&WaveData1D::new(0.0, 1.0, 1, 1).unwrap(), &moll).unwrap();
        assert!((u.value(&[0.2, 1.0], 1e-2).unwrap() - 0.5).abs() < 1e-14);
        assert!((u.value(&[0.2, -1.0], 1e-2).unwrap() + 0.5).abs() < 1e-14);
        let u = dalembert_wave(&WaveData1D::new(0.0, 1.0, 1, 2).unwrap(), &moll).unwrap();
        let phi_sq = moll.power_mass(2).unwrap();
        let v = u.value(&[0.1, 0.7], 1e-2).unwrap();
        assert!((v - 0.5 * phi_sq / 1e-2).abs() < 1e-10 * v);
    }

    #[test]
    fn wave_operator_annihilates_the_solution() {
        let u = dalembert_wave(&WaveData1D::new(1.0, 0.7, 2, 2).unwrap(), &standard_bump()).unwrap();
        let pu = DiffPolynomial::wave_operator().apply(&u).unwrap();
        let e = 0.05;
        for &(x, t) in &[(0.51, 0.5), (0.49, 0.5), (-0.98, 1.0), (0.0, 0.02)] {
            let scale = u.evaluate(&MultiIndex::new(vec![2, 0]), &[x, t], e).unwrap().abs().max(1.0);
            assert!(pu.value(&[x, t], e).unwrap().abs() <= 1e-12 * scale);
        }
    }
}
