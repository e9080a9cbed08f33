use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::mollify::Mollifier;
use crate::nets::{Net, Structure};

/// Parameters of the truncated blow-up problem `∂_t u = χ_ε(u)u²`, `u(x,0) = H_ε(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupConfig {
    /// Cutoff exponent: `χ_ε = 1` on `|z| ≤ ε^{−s}`.
    pub s: f64,
    pub t_max: f64,
    /// Local error tolerance of the step-doubling control, relative to `|u|`.
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Smallest admissible step, relative to `max(1, t)`.
    pub h_min: f64,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        BlowupConfig {
            s: 1.0,
            t_max: 2.0,
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 0.05,
            h_min: 1e-15,
        }
    }
}

impl BlowupConfig {
    pub fn new(s: f64, t_max: f64) -> Result<Self> {
        let cfg = BlowupConfig {
            s,
            t_max,
            ..BlowupConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff exponent s = {} must be positive", self.s)));
        }
        if !(self.t_max > 1.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_max = {} must exceed 1 to reach the blow-up time",
                self.t_max
            )));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.h_max > 0.0 && self.h_min > 0.0 && self.h_min < self.h_max) {
            return Err(Error::InvalidParameter("step control parameters must be positive with h_min < h_max".into()));
        }
        Ok(())
    }
}

/// `S(w) = e^{−1/w} / (e^{−1/w} + e^{−1/(1−w)})` on `(0, 1)` and its derivative.
fn smooth_step(w: f64) -> (f64, f64) {
    if w <= 0.0 {
        return (0.0, 0.0);
    }
    if w >= 1.0 {
        return (1.0, 0.0);
    }
    let z = 1.0 / w - 1.0 / (1.0 - w);
    let s = if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    };
    (s, s * (1.0 - s) * (1.0 / (w * w) + 1.0 / ((1.0 - w) * (1.0 - w))))
}

/// The cutoff `χ_ε(z)`: `1` for `|z| ≤ L`, `0` for `|z| ≥ L + 1`, a smooth
/// monotone ramp in between; returns `(χ, χ′)`.
fn cutoff(z: f64, level: f64) -> (f64, f64) {
    let (s, ds) = smooth_step(1.0 - (z.abs() - level));
    (s, -ds * z.signum())
}

/// State `(u, V)` with `V = ∂u/∂u₀`-type variational factor.
type State = [f64; 2];

fn rhs(y: State, level: f64) -> State {
    let (c, dc) = cutoff(y[0], level);
    let u = y[0];
    [c * u * u, (dc * u * u + 2.0 * c * u) * y[1]]
}

fn rk4(y: State, h: f64, level: f64) -> State {
    let add = |a: State, b: State, s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
    let k1 = rhs(y, level);
    let k2 = rhs(add(y, k1, 0.5 * h), level);
    let k3 = rhs(add(y, k2, 0.5 * h), level);
    let k4 = rhs(add(y, k3, h), level);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Accepted RK4 nodes of one trajectory; intermediate times are reached by
/// one more RK4 step from the preceding node.
#[derive(Debug)]
struct Trajectory {
    times: Vec<f64>,
    states: Vec<State>,
    level: f64,
}

impl Trajectory {
    fn at(&self, t: f64) -> State {
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        let h = t - self.times[i];
        if h == 0.0 {
            self.states[i]
        } else {
            rk4(self.states[i], h, self.level)
        }
    }
}

fn integrate(cfg: &BlowupConfig, u0: f64, eps: f64, x: f64) -> Result<Trajectory> {
    let level = eps.powf(-cfg.s);
    let window_cap = eps.powf(cfg.s) / 8.0;
    let mut t = 0.0;
    let mut y: State = [u0, 1.0];
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y],
        level,
    };
    let mut h = cfg.h_max.min(0.01);
    while t < cfg.t_max {
        // Near the blow-up window the step is tied to the stiffness scale ε^s.
        let (c, _) = cutoff(y[0], level);
        let mut cap = cfg.h_max;
        if y[0] >= 0.5 * level && c > 1e-6 {
            cap = cap.min(window_cap);
        }
        h = h.min(cap).min(cfg.t_max - t);
        if h < cfg.h_min * t.max(1.0) && t + h < cfg.t_max {
            return Err(Error::StepUnderflow { x, eps, t });
        }
        let full = rk4(y, h, level);
        let half = rk4(rk4(y, 0.5 * h, level), 0.5 * h, level);
        let tol = |a: f64, b: f64| cfg.atol + cfg.rtol * a.abs().max(b.abs());
        let ratio = ((half[0] - full[0]).abs() / 15.0 / tol(half[0], y[0]))
            .max((half[1] - full[1]).abs() / 15.0 / tol(half[1], y[1]));
        if !half[0].is_finite() || !half[1].is_finite() || ratio > 1.0 {
            h *= if ratio.is_finite() { (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
            continue;
        }
        t += h;
        // Richardson-extrapolated state.
        y = [half[0] + (half[0] - full[0]) / 15.0, half[1] + (half[1] - full[1]) / 15.0];
        traj.times.push(t);
        traj.states.push(y);
        h *= if ratio > 0.0 { (0.9 * ratio.powf(-0.2)).min(4.0) } else { 4.0 };
    }
    Ok(traj)
}

type Cache = Mutex<HashMap<(u64, u64), Arc<Trajectory>>>;

/// Solution of the truncated blow-up problem as a net in `(x, t)`, `t ∈ [0, t_max]`.
///
/// Trajectories depend on `x` only through `H_ε(x)`, so they are memoized per
/// `(H_ε(x), ε)`: every point right of the transition layer shares one.
/// The `x`-derivative is `φ_ε(x)·V(t)` with `V` from the variational equation
/// `V′ = (χ′(u)u² + 2χ(u)u)V`, `V(0) = 1`.
pub fn blowup_truncated(cfg: BlowupConfig, moll: &Mollifier) -> Result<Net> {
    cfg.validate()?;
    if moll.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: moll.dim(),
        });
    }
    let mo = moll.clone();
    let kappa = moll.kappa();
    let cache: Arc<Cache> = Arc::new(Mutex::new(HashMap::new()));
    let label = format!("blowup(s={})", cfg.s);
    let solve = move |x: f64, t: f64, eps: f64| -> Result<(State, f64)> {
        if !(0.0..=cfg.t_max).contains(&t) {
            return Err(Error::DomainViolation {
                x: vec![x, t],
                eps,
                reason: format!("time outside [0, {}]", cfg.t_max),
            });
        }
        let u0 = mo.cumulative_power(1, x / eps)?;
        if u0 == 0.0 {
            return Ok(([0.0, 1.0], 0.0));
        }
        let key = (u0.to_bits(), eps.to_bits());
        let hit = cache.lock().expect("trajectory cache poisoned").get(&key).cloned();
        let traj = match hit {
            Some(tr) => tr,
            None => {
                let tr = Arc::new(integrate(&cfg, u0, eps, x)?);
                cache.lock().expect("trajectory cache poisoned").entry(key).or_insert(tr).clone()
            }
        };
        Ok((traj.at(t), traj.level))
    };
    let mo2 = moll.clone();
    Ok(Net::new(2, 1, label, move |alpha, p, eps| {
        let (x, t) = (p[0], p[1]);
        let (y, level) = solve(x, t, eps)?;
        Ok(match (alpha.components()[0], alpha.components()[1]) {
            (0, 0) => y[0],
            (0, 1) => y[0] * y[0] * cutoff(y[0], level).0,
            _ => mo2.value(&[x / eps]) / eps * y[1],
        })
    })
    .with_structure(move |axis, _, eps| {
        if axis == 0 {
            vec![Structure::Band {
                lo: -kappa * eps,
                hi: kappa * eps,
            }]
        } else {
            // Right of the layer u reaches ε^{−s} at t = 1 − ε^s.
            let w = eps.powf(cfg.s);
            vec![Structure::Band {
                lo: 1.0 - 2.0 * w,
                hi: 1.0 + w,
            }]
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollify::standard_bump;
    use crate::nets::MultiIndex;

    fn net() -> Net {
        blowup_truncated(BlowupConfig::default(), &standard_bump()).unwrap()
    }

    #[test]
    fn cutoff_is_a_monotone_ramp() {
        let level = 100.0;
        assert_eq!(cutoff(100.0, level), (1.0, 0.0));
        assert_eq!(cutoff(101.0, level).0, 0.0);
        let mut prev = 1.0;
        for i in 1..100 {
            let z = level + i as f64 / 100.0;
            let (c, dc) = cutoff(z, level);
            assert!(c <= prev && dc <= 0.0);
            let fd = (cutoff(z + 1e-6, level).0 - cutoff(z - 1e-6, level).0) / 2e-6;
            assert!((fd - dc).abs() < 1e-5 * dc.abs().max(1.0));
            prev = c;
        }
    }

    #[test]
    fn left_of_the_layer_stays_zero() {
        let u = net();
        for &t in &[0.0, 0.5, 1.5] {
            assert_eq!(u.value(&[-0.3, t], 1e-2).unwrap(), 0.0);
        }
    }

    #[test]
    fn follows_the_untruncated_solution_before_blow_up() {
        let u = net();
        for &t in &[0.25, 0.5, 0.9] {
            let v = u.value(&[0.4, t], 1e-2).unwrap();
            assert!((v - 1.0 / (1.0 - t)).abs() < 1e-8 * v, "{t}: {v}");
        }
    }

    #[test]
    fn truncated_value_is_sandwiched_after_blow_up() {
        let u = net();
        for &e in &[1e-1, 1e-2, 1e-4] {
            for &t in &[1.0 + e, 1.5, 2.0] {
                let v = u.value(&[0.5, t], e).unwrap();
                assert!(v >= 1.0 / e && v <= 1.0 + 1.0 / e, "{e} {t}: {v}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let u = net();
        let e = 0.05;
        let (x, t) = (0.01, 0.6);
        let h = 1e-5;
        let dx = u.evaluate(&MultiIndex::new(vec![1, 0]), &[x, t], e).unwrap();
        let fd = (u.value(&[x + h, t], e).unwrap() - u.value(&[x - h, t], e).unwrap()) / (2.0 * h);
        assert!((dx - fd).abs() < 1e-5 * dx.abs().max(1.0), "{dx} {fd}");
        let dt = u.evaluate(&MultiIndex::new(vec![0, 1]), &[x, t], e).unwrap();
        let fd = (u.value(&[x, t + h], e).unwrap() - u.value(&[x, t - h], e).unwrap()) / (2.0 * h);
        assert!((dt - fd).abs() < 1e-5 * dt.abs().max(1.0), "{dt} {fd}");
    }
}
