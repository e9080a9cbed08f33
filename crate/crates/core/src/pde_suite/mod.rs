//! Solution nets for linear and semilinear propagation experiments.
//!
//! Each constructor returns a [`Net`](crate::nets::Net) in the space-time variables `(x, t)`,
//! so spectra are measured with the same fiber machinery as any other net;
//! `t` is just the second coordinate. Transport problems are written after
//! the characteristic change of variables, i.e. with zero speed.

mod blowup;
mod rauch_reed;
mod semilinear;
mod wave;

use crate::asymptotics::{Endpoint, SigmaFiber};
use crate::error::{Error, Result};
use crate::mollify::Mollifier;
use crate::nets::MultiIndex;

pub use blowup::{blowup_truncated, BlowupConfig};
pub use rauch_reed::rauch_reed_w;
pub use semilinear::{semilinear_solution, InitialData, SemilinearKind, SemilinearTag, SEMILINEAR_ORDER};
pub use wave::{dalembert_wave, WaveData1D};

/// `∂^k(φ_ε^m)(z) = ε^{−m−k} (φ^m)^{(k)}(z/ε)` in one dimension.
fn power_derivative(moll: &Mollifier, m: u32, k: usize, z: f64, eps: f64) -> Result<f64> {
    let v = moll.power_derivative(m, &MultiIndex::new(vec![k]), &[z / eps])?;
    Ok(if v == 0.0 { 0.0 } else { v * eps.powi(-((m as usize + k) as i32)) })
}

/// Largest distance of `R` from an integer still read as that integer.
pub const STRENGTH_SLACK: f64 = 0.25;

/// Strength of a singularity from its `C^1` fiber: `[0, n]` ⟼ `−n`.
///
/// `Ok(None)` means the fiber is empty (no singularity at the point).
pub fn strength_from_fiber(fiber: &SigmaFiber) -> Result<Option<i64>> {
    match fiber.endpoint {
        Endpoint::Empty => Ok(None),
        Endpoint::AllOfRplus => Err(Error::Inconclusive("fiber is all of R+: no finite strength".into())),
        _ => {
            let n = fiber.r.round();
            if (fiber.r - n).abs() > STRENGTH_SLACK {
                return Err(Error::Inconclusive(format!(
                    "R = {} ({}) is not within {STRENGTH_SLACK} of an integer",
                    fiber.r,
                    fiber.endpoint.as_str()
                )));
            }
            Ok(Some(-(n as i64)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{localized_fiber, EpsilonSchedule, FiberOptions, Target};
    use crate::mollify::{delta_derivative_net, embed_piecewise, heaviside_net, standard_bump, PiecewiseSmooth};

    fn c1_fiber(net: &crate::nets::Net) -> SigmaFiber {
        localized_fiber(net, &[0.0], Target::Cp(1), &EpsilonSchedule::default(), 0.1, &FiberOptions::default())
            .unwrap()
    }

    #[test]
    fn strength_of_classic_singularities() {
        let moll = standard_bump();
        let kink = embed_piecewise(PiecewiseSmooth::kink(0.0), &moll).unwrap();
        assert_eq!(strength_from_fiber(&c1_fiber(&kink)).unwrap(), Some(0));
        let h = heaviside_net(&moll).unwrap();
        assert_eq!(strength_from_fiber(&c1_fiber(&h)).unwrap(), Some(-1));
        let dd = delta_derivative_net(1, &moll).unwrap();
        assert_eq!(strength_from_fiber(&c1_fiber(&dd)).unwrap(), Some(-3));
    }

    #[test]
    fn strength_sentinels() {
        let mut f = SigmaFiber {
            r: 0.0,
            endpoint: Endpoint::Empty,
            per_order_slopes: Vec::new(),
            residual: 0.0,
            classification: crate::asymptotics::Classification::ConvergesToZero,
            radius: 0.1,
        };
        assert_eq!(strength_from_fiber(&f).unwrap(), None);
        f.endpoint = Endpoint::Inconclusive;
        f.r = 1.5;
        assert!(strength_from_fiber(&f).is_err());
        f.r = 2.1;
        assert_eq!(strength_from_fiber(&f).unwrap(), Some(-2));
    }
}
