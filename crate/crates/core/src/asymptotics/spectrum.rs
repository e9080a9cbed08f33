use rayon::prelude::*;

use super::fiber::{converges_near, localized_fiber, FiberOptions, SigmaFiber, Target};
use super::fit::CLASSIFY_TOL;
use super::{valuation_fit, EpsilonSchedule};
use crate::error::{Error, Result};
use crate::nets::Net;
use crate::seminorms::CompactRegion;

/// Environment variable capping the number of worker threads in grid scans.
pub const THREADS_ENV: &str = "MICROLOCAL_THREADS";

/// Map `f` over `items` in parallel, gathering results in input order.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| items.par_iter().map(&f).collect())
        }
        None => items.par_iter().map(&f).collect(),
    }
}

/// The `(a, F)`-singular spectrum sampled on a grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub target: Target,
    pub scale: String,
    pub region: CompactRegion,
    /// Initial neighborhood half-width.
    pub delta: f64,
    pub points: Vec<(Vec<f64>, SigmaFiber)>,
}

impl Spectrum {
    /// Grid points with nonempty fiber: the projection onto the base.
    pub fn projection(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .filter(|(_, f)| !f.is_empty())
            .map(|(x, _)| x.clone())
            .collect()
    }

    pub fn max_r(&self) -> f64 {
        self.points
            .iter()
            .filter(|(_, f)| !f.is_empty())
            .map(|(_, f)| f.r)
            .fold(0.0, f64::max)
    }

    pub fn fiber_at(&self, x: &[f64]) -> Option<&SigmaFiber> {
        self.points
            .iter()
            .find(|(p, _)| p.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-12))
            .map(|(_, f)| f)
    }
}

/// Default neighborhood: two grid spacings.
pub fn default_delta(region: &CompactRegion) -> f64 {
    2.0 * (0..region.dim()).map(|i| region.spacing(i)).fold(0.0, f64::max)
}

pub fn singular_spectrum(net: &Net, region: &CompactRegion, target: Target, sched: &EpsilonSchedule) -> Result<Spectrum> {
    singular_spectrum_with(net, region, target, sched, default_delta(region), &FiberOptions::default())
}

pub fn singular_spectrum_with(
    net: &Net,
    region: &CompactRegion,
    target: Target,
    sched: &EpsilonSchedule,
    delta: f64,
    opts: &FiberOptions,
) -> Result<Spectrum> {
    spectrum_at(net, region, &region.grid(), target, sched, delta, opts)
}

/// Fibers at an explicit list of points (which need not be a full grid).
pub fn spectrum_at(
    net: &Net,
    region: &CompactRegion,
    points: &[Vec<f64>],
    target: Target,
    sched: &EpsilonSchedule,
    delta: f64,
    opts: &FiberOptions,
) -> Result<Spectrum> {
    if net.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: region.dim(),
        });
    }
    let fibers = par_map(points, |x| localized_fiber(net, x, target, sched, delta, opts))?;
    Ok(Spectrum {
        target,
        scale: opts.scale.id().to_string(),
        region: region.clone(),
        delta,
        points: points.iter().cloned().zip(fibers).collect(),
    })
}

/// `S^F(u)` on the grid, computed by direct convergence tests.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSupport {
    pub points: Vec<Vec<f64>>,
    /// For `C^p` with `p ≥ 1`: whether `S^{C^{p−1}}(u) ⊂ S^{C^p}(u)` held.
    pub contains_lower_order: Option<bool>,
}

fn support_points(
    net: &Net,
    region: &CompactRegion,
    target: Target,
    sched: &EpsilonSchedule,
    delta: f64,
    opts: &FiberOptions,
) -> Result<Vec<Vec<f64>>> {
    let grid = region.grid();
    let regular = par_map(&grid, |x| converges_near(net, x, target, sched, delta, opts))?;
    Ok(grid.into_iter().zip(regular).filter(|(_, r)| !r).map(|(x, _)| x).collect())
}

pub fn singular_support(net: &Net, region: &CompactRegion, target: Target, sched: &EpsilonSchedule) -> Result<SingularSupport> {
    singular_support_with(net, region, target, sched, default_delta(region), &FiberOptions::default())
}

pub fn singular_support_with(
    net: &Net,
    region: &CompactRegion,
    target: Target,
    sched: &EpsilonSchedule,
    delta: f64,
    opts: &FiberOptions,
) -> Result<SingularSupport> {
    let points = support_points(net, region, target, sched, delta, opts)?;
    let contains_lower_order = match target {
        Target::Cp(p) if p >= 1 => {
            let lower = support_points(net, region, Target::Cp(p - 1), sched, delta, opts)?;
            Some(lower.iter().all(|x| points.contains(x)))
        }
        _ => None,
    };
    Ok(SingularSupport {
        points,
        contains_lower_order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity {
    /// One growth exponent `m` bounds every derivative order.
    GInfinity { m: f64 },
    /// Every derivative order grows slower than any negative power of ε.
    TotalSlowScale,
    Neither,
}

impl Regularity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regularity::GInfinity { .. } => "g_infinity_with_m",
            Regularity::TotalSlowScale => "total_slow_scale",
            Regularity::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub class: Regularity,
    /// Fitted growth order of `p_{K,l}` for `l = 0..=L_max`.
    pub slopes: Vec<f64>,
}

/// Classify `u` on `K`, with `C^∞` approximated by orders `0..=L_max`.
pub fn classify_regularity(net: &Net, k: &CompactRegion, sched: &EpsilonSchedule, l_max: usize) -> Result<RegularityReport> {
    if l_max > net.max_deriv_order() {
        return Err(Error::OrderExceeded {
            requested: l_max,
            budget: net.max_deriv_order(),
        });
    }
    let orders: Vec<usize> = (0..=l_max).collect();
    let slopes = par_map(&orders, |&l| Ok(valuation_fit(net, k, l, sched)?.slope))?;
    let tol = CLASSIFY_TOL;
    let top = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let class = if slopes.iter().all(|&s| s <= tol) {
        Regularity::TotalSlowScale
    } else {
        let lo = slopes.len().saturating_sub(3);
        let window = &slopes[lo..];
        let growing = window.windows(2).any(|w| w[1] > w[0] + tol) || window[window.len() - 1] > window[0] + tol;
        if growing {
            Regularity::Neither
        } else {
            Regularity::GInfinity { m: top }
        }
    };
    Ok(RegularityReport { class, slopes })
}
