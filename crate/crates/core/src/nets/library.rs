//! Elementary nets used throughout the experiments.

use std::f64::consts::PI;

use super::{MultiIndex, Net, SmoothFn, Structure, DEFAULT_MAX_DERIV_ORDER};

pub fn zero(dim: usize) -> Net {
    Net::new(dim, DEFAULT_MAX_DERIV_ORDER, "0", |_, _, _| Ok(0.0))
}

pub fn constant(dim: usize, c: f64) -> Net {
    Net::new(dim, DEFAULT_MAX_DERIV_ORDER, format!("{c}"), move |alpha, _, _| {
        Ok(if alpha.is_zero() { c } else { 0.0 })
    })
}

/// ε-independent smooth function given by its derivative rule.
pub fn smooth(
    dim: usize,
    label: &str,
    rule: impl Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync + 'static,
) -> Net {
    Net::new(dim, DEFAULT_MAX_DERIV_ORDER, label, move |alpha, x, _| Ok(rule(alpha, x)))
}

/// `u_ε(x) = ε sin(x/ε)` in one dimension.
pub fn oscillatory() -> Net {
    Net::new(1, DEFAULT_MAX_DERIV_ORDER, "eps*sin(x/eps)", |alpha, x, eps| {
        let k = alpha.order();
        let y = x[0] / eps;
        let s = [y.sin(), y.cos(), -y.sin(), -y.cos()][k % 4];
        Ok(eps.powi(1 - k as i32) * s)
    })
    .with_structure(|_, _, eps| {
        vec![Structure::Periodic {
            period: 2.0 * PI * eps,
            phase: 0.0,
        }]
    })
}

/// `u_ε(x) = ε^{-r} |ln ε|^k f(x)` for a smooth `f`.
pub fn eps_power(r: f64, log_power: i32, f: SmoothFn, dim: usize) -> Net {
    Net::new(
        dim,
        DEFAULT_MAX_DERIV_ORDER,
        format!("eps^-{r}*|ln eps|^{log_power}*f"),
        move |alpha, x, eps| Ok(eps.powf(-r) * eps.ln().abs().powi(log_power) * f.eval(alpha, x)),
    )
}

/// The constant function `1` as a [`SmoothFn`].
pub fn one(dim: usize) -> SmoothFn {
    SmoothFn::new(dim, usize::MAX, |alpha, _| if alpha.is_zero() { 1.0 } else { 0.0 })
}

/// `f(x) = 1 + x²/2` in one dimension, nonzero with nonvanishing low derivatives.
pub fn quadratic_bump() -> SmoothFn {
    SmoothFn::new(1, usize::MAX, |alpha, x| match alpha.order() {
        0 => 1.0 + 0.5 * x[0] * x[0],
        1 => x[0],
        2 => 1.0,
        _ => 0.0,
    })
}

/// `f(x) = cos(x)` in one dimension.
pub fn cosine() -> SmoothFn {
    SmoothFn::new(1, usize::MAX, |alpha, x| {
        let (s, c) = x[0].sin_cos();
        [c, -s, -c, s][alpha.order() % 4]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillatory_derivative_at_origin() {
        let u = oscillatory();
        let du = u.differentiate(&MultiIndex::new(vec![1])).unwrap();
        assert_eq!(du.value(&[0.0], 0.01).unwrap(), 1.0);
        assert!(u.value(&[0.3], 1e-3).unwrap().abs() <= 1e-3);
    }

    #[test]
    fn zero_net_is_zero() {
        assert_eq!(zero(1).value(&[0.3], 0.01).unwrap(), 0.0);
    }
}
