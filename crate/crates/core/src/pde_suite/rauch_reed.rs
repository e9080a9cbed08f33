use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::mollify::Mollifier;
use crate::nets::{MultiIndex, Net, Structure, SupportHint};
use crate::quadrature::Adaptive;

const CACHE_LIMIT: usize = 1 << 20;

/// Interaction term of two delta waves crossing at `(0, 1)`:
/// `w_ε(x,t) = ∫_0^t φ_ε^m(x+1−s) φ_ε^n(x−1+s) ds`.
///
/// With `s = 1 + ετ` and `ξ = x/ε` this is
/// `ε^{1−m−n} ∫ φ^m(ξ−τ) φ^n(ξ+τ) dτ` over `τ ∈ [−1/ε, (t−1)/ε]`, where the
/// integrand lives on `|τ| < κ − |ξ|`. `∂_t w` is the integrand at `s = t`;
/// `∂_x w` differentiates both factors under the integral.
///
/// Past the crossing the τ-range no longer depends on `t`, so integrals are
/// memoized on `(ξ, range, order)`.
pub fn rauch_reed_w(m: u32, n: u32, moll: &Mollifier) -> Result<Net> {
    if m < 1 || n < 1 {
        return Err(Error::InvalidParameter(format!("powers must be ≥ 1 (got m = {m}, n = {n})")));
    }
    if moll.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: moll.dim(),
        });
    }
    let mo = moll.clone();
    let kappa = moll.kappa();
    let quad = Adaptive {
        rel_tol: 1e-12,
        ..Adaptive::default()
    };
    let cache: Arc<Mutex<HashMap<(u64, u64, u64, usize), f64>>> = Arc::new(Mutex::new(HashMap::new()));
    let label = format!("rauch_reed(m={m},n={n})");
    let d0 = MultiIndex::new(vec![0]);
    let d1 = MultiIndex::new(vec![1]);
    Ok(Net::new(2, 1, label, move |alpha, p, eps| {
        let (x, t) = (p[0], p[1]);
        let xi = x / eps;
        let half = kappa - xi.abs();
        if half <= 0.0 {
            return Ok(0.0);
        }
        let scale = eps.powi(-((m + n) as i32));
        match (alpha.components()[0], alpha.components()[1]) {
            (0, 1) => {
                let tau = (t - 1.0) / eps;
                Ok(scale * mo.value(&[xi - tau]).powi(m as i32) * mo.value(&[xi + tau]).powi(n as i32))
            }
            (a, _) => {
                let lo = (-1.0 / eps).max(-half);
                let hi = ((t - 1.0) / eps).min(half);
                if hi <= lo {
                    return Ok(0.0);
                }
                let key = (xi.to_bits(), lo.to_bits(), hi.to_bits(), a);
                let hit = cache.lock().expect("integral cache poisoned").get(&key).copied();
                let integral = match hit {
                    Some(v) => v,
                    None => {
                        let v = quad
                            .integrate_scalar(lo, hi, &[], |tau| {
                                let (l, r) = ([xi - tau], [xi + tau]);
                                Ok(if a == 0 {
                                    mo.value(&l).powi(m as i32) * mo.value(&r).powi(n as i32)
                                } else {
                                    mo.power_derivative(m, &d1, &l)? * mo.power_derivative(n, &d0, &r)?
                                        + mo.power_derivative(m, &d0, &l)? * mo.power_derivative(n, &d1, &r)?
                                })
                            })
                            .map_err(|e| match e {
                                Error::QuadratureNonConvergence { lo, hi, .. } => {
                                    Error::QuadratureNonConvergence { lo, hi, eps }
                                }
                                other => other,
                            })?;
                        let mut c = cache.lock().expect("integral cache poisoned");
                        if c.len() >= CACHE_LIMIT {
                            c.clear();
                        }
                        c.insert(key, v);
                        v
                    }
                };
                Ok(if a == 0 { eps * scale * integral } else { scale * integral })
            }
        }
    })
    .with_support(SupportHint {
        lo: vec![-kappa, 1.0 - kappa],
        hi: vec![kappa, f64::INFINITY],
        eps0: 1.0,
    })
    .with_structure(move |axis, _, eps| {
        let w = kappa * eps;
        let c = if axis == 0 { 0.0 } else { 1.0 };
        vec![Structure::Band { lo: c - w, hi: c + w }]
    }))
}
