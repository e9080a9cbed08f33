use super::fit::{fit_order, local_slopes, Classification, OrderFit, CLASSIFY_TOL};
use super::EpsilonSchedule;
use crate::error::{Error, Result};
use crate::nets::{MultiIndex, Net, ScaleMap};
use crate::seminorms::{
    cp_seminorm, make_test_dictionary, order_sups_at, pair_all, sample_points, CompactRegion,
};

/// Grid points per axis of the neighborhoods `K(x, δ)`.
pub const NEIGHBORHOOD_POINTS: usize = 9;
/// Pairings below this fraction of the largest pairing are treated as zero.
pub const PAIRING_NOISE_FLOOR: f64 = 1e-9;

/// Relative distance within which `r` counts as the endpoint itself.
const ENDPOINT_SLACK: f64 = 1e-9;

/// Function space in which convergence is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    /// `C^p`: uniform convergence of derivatives up to order `p`.
    Cp(usize),
    /// Distributions, probed by a finite test-function dictionary.
    Dprime,
}

impl Target {
    pub fn label(self) -> String {
        match self {
            Target::Cp(p) => format!("C^{p}"),
            Target::Dprime => "Dprime".into(),
        }
    }
}

/// Shape of `Σ_x` at its right endpoint `R = inf N_x`.
///
/// The variant names describe `N_x` at `R`: `ClosedAtR` means `R ∈ N_x` (the
/// scaled net `a_ε(R)u_ε` converges), so the fiber is `[0, R)`; `OpenAtR`
/// means `R ∉ N_x`, so the fiber is `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Empty,
    ClosedAtR,
    OpenAtR,
    AllOfRplus,
    Inconclusive,
}

impl Endpoint {
    pub fn as_str(self) -> &'static str {
        match self {
            Endpoint::Empty => "empty",
            Endpoint::ClosedAtR => "closed_at_R",
            Endpoint::OpenAtR => "open_at_R",
            Endpoint::AllOfRplus => "all_of_Rplus",
            Endpoint::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaFiber {
    pub r: f64,
    pub endpoint: Endpoint,
    /// `(order l, slope)` for `C^p`, `(probe index, slope)` for `D′`.
    pub per_order_slopes: Vec<(usize, f64)>,
    /// Residual of the fit that determined `R`.
    pub residual: f64,
    /// Classification of the unscaled net on the neighborhood.
    pub classification: Classification,
    /// Neighborhood half-width the verdict was reached at.
    pub radius: f64,
}

impl SigmaFiber {
    pub fn is_empty(&self) -> bool {
        self.endpoint == Endpoint::Empty
    }

    /// Whether `R` itself belongs to the fiber (`None` when undecided).
    pub fn contains_endpoint(&self) -> Option<bool> {
        match self.endpoint {
            Endpoint::OpenAtR | Endpoint::AllOfRplus => Some(true),
            Endpoint::ClosedAtR | Endpoint::Empty => Some(false),
            Endpoint::Inconclusive => None,
        }
    }

    /// Whether `r ≥ 0` lies in `Σ_x` (`None` only at an undecided endpoint).
    pub fn contains(&self, r: f64) -> Option<bool> {
        if self.endpoint == Endpoint::Empty {
            return Some(false);
        }
        if self.endpoint == Endpoint::AllOfRplus || r < self.r - ENDPOINT_SLACK * self.r.max(1.0) {
            return Some(true);
        }
        if r > self.r + ENDPOINT_SLACK * self.r.max(1.0) {
            return Some(false);
        }
        self.contains_endpoint()
    }
}

/// Knobs for fiber estimation.
#[derive(Debug, Clone)]
pub struct FiberOptions {
    pub scale: ScaleMap,
    pub points_per_axis: usize,
    /// Halvings of δ tried while the fiber stays nonempty.
    pub shrink_levels: usize,
    pub tol: f64,
}

impl Default for FiberOptions {
    fn default() -> Self {
        FiberOptions {
            scale: ScaleMap::power(),
            points_per_axis: NEIGHBORHOOD_POINTS,
            shrink_levels: 2,
            tol: CLASSIFY_TOL,
        }
    }
}

/// Everything measured about a net on one neighborhood over the schedule.
struct Measurements {
    eps: Vec<f64>,
    /// `channels[k][j]`: per-order sup (`C^p`) or `|pairing j|` (`D′`) at `ε_k`.
    channels: Vec<Vec<f64>>,
    /// Values at `ε_k` and `ε_{k+1}` on a common sample set.
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
    dprime: bool,
}

fn neighborhood(x: &[f64], delta: f64, n: usize) -> Result<CompactRegion> {
    let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(delta > 1e-9 * scale) || !delta.is_finite() {
        return Err(Error::NeighborhoodTooSmall(delta));
    }
    CompactRegion::around(x, delta, n)
}

fn measure(net: &Net, k: &CompactRegion, target: Target, sched: &EpsilonSchedule) -> Result<Measurements> {
    let eps = sched.values().to_vec();
    match target {
        Target::Cp(p) => {
            if p > net.max_deriv_order() {
                return Err(Error::OrderExceeded {
                    requested: p,
                    budget: net.max_deriv_order(),
                });
            }
            let alphas = MultiIndex::up_to_order(net.dim(), p);
            let sets: Vec<Vec<Vec<f64>>> = eps.iter().map(|&e| sample_points(net, k, e)).collect();
            let mut channels = Vec::with_capacity(eps.len());
            for (e, s) in eps.iter().zip(&sets) {
                channels.push(order_sups_at(net, s, p, *e)?);
            }
            let mut pairs = Vec::with_capacity(eps.len() - 1);
            for i in 0..eps.len() - 1 {
                let mut union = sets[i].clone();
                union.extend(sets[i + 1].iter().cloned());
                let mut a = Vec::with_capacity(union.len() * alphas.len());
                let mut b = Vec::with_capacity(union.len() * alphas.len());
                for alpha in &alphas {
                    for x in &union {
                        a.push(net.evaluate(alpha, x, eps[i])?);
                        b.push(net.evaluate(alpha, x, eps[i + 1])?);
                    }
                }
                pairs.push((a, b));
            }
            Ok(Measurements {
                eps,
                channels,
                pairs,
                dprime: false,
            })
        }
        Target::Dprime => {
            let dict = make_test_dictionary(k);
            let mut raw = Vec::with_capacity(eps.len());
            for &e in &eps {
                raw.push(pair_all(net, &dict.members, e)?);
            }
            let top = raw.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            let floor = PAIRING_NOISE_FLOOR * top;
            for row in raw.iter_mut() {
                for v in row.iter_mut() {
                    if v.abs() <= floor {
                        *v = 0.0;
                    }
                }
            }
            let channels = raw.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect();
            let pairs = raw.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
            Ok(Measurements {
                eps,
                channels,
                pairs,
                dprime: true,
            })
        }
    }
}

impl Measurements {
    fn magnitude(&self, k: usize) -> f64 {
        self.channels[k].iter().fold(0.0, |m, v| m.max(*v))
    }

    fn channel_series(&self, j: usize) -> Vec<(f64, f64)> {
        self.eps.iter().zip(&self.channels).map(|(e, c)| (*e, c[j])).collect()
    }

    /// Increments `|P_j(ε_k) − P_j(ε_{k+1})|` indexed by `ε_{k+1}`.
    fn increment_series(&self, j: usize) -> Vec<(f64, f64)> {
        self.pairs
            .iter()
            .zip(&self.eps[1..])
            .map(|((a, b), e)| (*e, (a[j] - b[j]).abs()))
            .collect()
    }

    /// Whether `a_ε(r)u_ε` converges in the target on the neighborhood.
    fn converges_at(&self, scale: &ScaleMap, r: f64, tol: f64) -> Result<Option<bool>> {
        let s: Vec<f64> = self.eps.iter().map(|&e| scale.eval(r, e)).collect();
        let mags: Vec<(f64, f64)> = (0..self.eps.len()).map(|k| (self.eps[k], s[k] * self.magnitude(k))).collect();
        let fit = super::fit::fit_order_with(&mags, tol)?;
        match fit.classification {
            Classification::ConvergesToZero => return Ok(Some(true)),
            Classification::Diverges => return Ok(Some(false)),
            _ => {}
        }
        // Bounded but not negligible: compare the Cauchy increments with the size.
        let start = self.pairs.len() / 2;
        let q: Vec<f64> = (start..self.pairs.len())
            .map(|k| {
                let (a, b) = &self.pairs[k];
                let d = a
                    .iter()
                    .zip(b)
                    .fold(0.0f64, |m, (x, y)| m.max((s[k] * x - s[k + 1] * y).abs()));
                let size = mags[k].1.max(mags[k + 1].1);
                if size > 0.0 {
                    d / size
                } else {
                    0.0
                }
            })
            .collect();
        let quarter = &q[q.len() - (q.len() / 2).max(2)..];
        let qmax = quarter.iter().fold(0.0f64, |m, v| m.max(*v));
        let qmin = quarter.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        let last = *q.last().expect("nonempty tail");
        let decaying = q.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
        Ok(if qmax < 1e-3 || (decaying && last < 0.05) {
            Some(true)
        } else if qmin >= 0.05 {
            Some(false)
        } else {
            None
        })
    }

    fn channel_fits(&self) -> Result<Vec<OrderFit>> {
        let n = self.channels[0].len();
        (0..n)
            .map(|j| {
                if self.dprime {
                    fit_order(&self.increment_series(j))
                } else {
                    fit_order(&self.channel_series(j))
                }
            })
            .collect()
    }

    fn superpolynomial(&self) -> bool {
        let series: Vec<(f64, f64)> = (0..self.eps.len()).map(|k| (self.eps[k], self.magnitude(k))).collect();
        let ls = local_slopes(&series[series.len() / 2..]);
        ls.len() >= 4
            && ls.windows(2).all(|w| w[1] > w[0])
            && ls[ls.len() - 1] > ls[0] + 2.0
            && ls[ls.len() - 1] > 4.0
    }
}

fn fiber_from(m: &Measurements, opts: &FiberOptions, radius: f64) -> Result<SigmaFiber> {
    let tol = opts.tol;
    let base_series: Vec<(f64, f64)> = (0..m.eps.len()).map(|k| (m.eps[k], m.magnitude(k))).collect();
    let base = fit_order(&base_series)?;
    let fits = m.channel_fits()?;
    let per_order_slopes: Vec<(usize, f64)> = fits.iter().enumerate().map(|(j, f)| (j, f.slope)).collect();
    let mut fiber = SigmaFiber {
        r: 0.0,
        endpoint: Endpoint::Inconclusive,
        per_order_slopes,
        residual: 0.0,
        classification: base.classification,
        radius,
    };
    if m.superpolynomial() {
        fiber.r = f64::INFINITY;
        fiber.endpoint = Endpoint::AllOfRplus;
        return Ok(fiber);
    }
    let r = if opts.scale.is_power() {
        let lead = fits
            .iter()
            .filter(|f| !f.is_zero_tail())
            .max_by(|a, b| a.slope.total_cmp(&b.slope));
        if let Some(f) = lead {
            fiber.residual = f.residual;
        }
        let raw = lead.map_or(0.0, |f| f.slope);
        if raw < tol {
            0.0
        } else {
            raw
        }
    } else {
        bisect_threshold(m, opts)?
    };
    if r.is_infinite() {
        fiber.r = r;
        fiber.endpoint = Endpoint::AllOfRplus;
        return Ok(fiber);
    }
    fiber.r = r;
    fiber.endpoint = match m.converges_at(&opts.scale, r, tol)? {
        Some(true) if r == 0.0 => Endpoint::Empty,
        Some(true) => Endpoint::ClosedAtR,
        Some(false) => Endpoint::OpenAtR,
        None => Endpoint::Inconclusive,
    };
    Ok(fiber)
}

/// Threshold `r` at which the fitted growth of the `a_ε(r)`-scaled
/// measurements (increments for `D′`) changes sign, by bisection. Used for
/// scales other than `ε^r`, where slopes of the raw data have no meaning.
fn bisect_threshold(m: &Measurements, opts: &FiberOptions) -> Result<f64> {
    let growth = |r: f64| -> Result<f64> {
        let s: Vec<f64> = m.eps.iter().map(|&e| opts.scale.eval(r, e)).collect();
        let series: Vec<(f64, f64)> = if m.dprime {
            m.pairs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let d = a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((s[k] * x - s[k + 1] * y).abs()));
                    (m.eps[k + 1], d)
                })
                .collect()
        } else {
            (0..m.eps.len()).map(|k| (m.eps[k], s[k] * m.magnitude(k))).collect()
        };
        Ok(fit_order(&series)?.slope)
    };
    if growth(0.0)? < opts.tol {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while growth(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 64.0 {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0;
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if growth(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Σ_x(u)` on the neighborhood `x ± δ`: `R` from the growth orders of the
/// measurements, then the endpoint from the convergence of `a_ε(R)u_ε`.
pub fn sigma_fiber(net: &Net, x: &[f64], target: Target, sched: &EpsilonSchedule, delta: f64) -> Result<SigmaFiber> {
    sigma_fiber_with(net, x, target, sched, delta, &FiberOptions::default())
}

pub fn sigma_fiber_with(
    net: &Net,
    x: &[f64],
    target: Target,
    sched: &EpsilonSchedule,
    delta: f64,
    opts: &FiberOptions,
) -> Result<SigmaFiber> {
    if x.len() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: x.len(),
        });
    }
    let k = neighborhood(x, delta, opts.points_per_axis)?;
    if let Some(h) = net.support_hint() {
        if h.eps0 >= sched.values()[0] && h.misses_box(k.lo(), k.hi()) {
            return Ok(SigmaFiber {
                r: 0.0,
                endpoint: Endpoint::Empty,
                per_order_slopes: Vec::new(),
                residual: 0.0,
                classification: Classification::ConvergesToZero,
                radius: delta,
            });
        }
    }
    let m = measure(net, &k, target, sched)?;
    fiber_from(&m, opts, delta)
}

/// The fiber at `x`, refining the neighborhood `δ → δ/2 → …` while it stays
/// nonempty; the smallest neighborhood examined decides.
pub fn localized_fiber(
    net: &Net,
    x: &[f64],
    target: Target,
    sched: &EpsilonSchedule,
    delta: f64,
    opts: &FiberOptions,
) -> Result<SigmaFiber> {
    let mut fiber = sigma_fiber_with(net, x, target, sched, delta, opts)?;
    let mut d = delta;
    for _ in 0..opts.shrink_levels {
        if fiber.is_empty() {
            break;
        }
        d *= 0.5;
        fiber = sigma_fiber_with(net, x, target, sched, d, opts)?;
    }
    Ok(fiber)
}

/// Whether `u` is associated with an element of the target on `x ± δ`:
/// the unscaled net converges there. Shares no slope estimate with
/// [`sigma_fiber`], so the two give independent routes to the support.
pub fn converges_near(
    net: &Net,
    x: &[f64],
    target: Target,
    sched: &EpsilonSchedule,
    delta: f64,
    opts: &FiberOptions,
) -> Result<bool> {
    let mut d = delta;
    for level in 0..=opts.shrink_levels {
        let k = neighborhood(x, d, opts.points_per_axis)?;
        let regular = match net.support_hint() {
            Some(h) if h.eps0 >= sched.values()[0] && h.misses_box(k.lo(), k.hi()) => true,
            _ => {
                let m = measure(net, &k, target, sched)?;
                m.converges_at(&ScaleMap::power(), 0.0, opts.tol)? == Some(true)
            }
        };
        if regular || level == opts.shrink_levels {
            return Ok(regular);
        }
        d *= 0.5;
    }
    unreachable!("loop returns on its last level")
}

/// Order fit of `p_{K,l}(u_ε)` over the schedule.
pub fn valuation_fit(net: &Net, k: &CompactRegion, l: usize, sched: &EpsilonSchedule) -> Result<OrderFit> {
    let mut samples = Vec::with_capacity(sched.len());
    for &e in sched.values() {
        samples.push((e, cp_seminorm(net, k, l, e)?));
    }
    fit_order(&samples)
}

/// `v_{K,l}(u) = inf{r : p_{K,l}(u_ε) = o(ε^{-r})}`, estimated as the fitted
/// growth order (`−1e9` for nets vanishing on `K`).
pub fn valuation(net: &Net, k: &CompactRegion, l: usize, sched: &EpsilonSchedule) -> Result<f64> {
    Ok(valuation_fit(net, k, l, sched)?.slope)
}

/// `ν_{K,l}(u) = max(v_{K,l}(u), 0)`.
pub fn clamped_valuation(net: &Net, k: &CompactRegion, l: usize, sched: &EpsilonSchedule) -> Result<f64> {
    Ok(valuation(net, k, l, sched)?.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollify::{delta_power_net, standard_bump};
    use crate::nets::library;

    #[test]
    fn delta_square_c0_fiber() {
        let d2 = delta_power_net(2, &standard_bump()).unwrap();
        let s = EpsilonSchedule::default();
        let f = sigma_fiber(&d2, &[0.0], Target::Cp(0), &s, 0.1).unwrap();
        assert!((f.r - 2.0).abs() < 0.15, "{f:?}");
        assert_eq!(f.endpoint, Endpoint::OpenAtR);
        assert_eq!(f.contains(2.0), Some(true));
        let far = sigma_fiber(&d2, &[0.7], Target::Cp(0), &s, 0.1).unwrap();
        assert!(far.is_empty());
    }

    #[test]
    fn log_factor_decides_the_endpoint() {
        let s = EpsilonSchedule::default();
        let u = library::eps_power(1.0, 0, library::one(1), 1);
        let v = library::eps_power(1.0, 1, library::one(1), 1);
        let fu = sigma_fiber(&u, &[0.0], Target::Cp(0), &s, 0.1).unwrap();
        let fv = sigma_fiber(&v, &[0.0], Target::Cp(0), &s, 0.1).unwrap();
        assert!((fu.r - 1.0).abs() < 0.1 && (fv.r - 1.0).abs() < 0.1);
        assert_eq!(fu.endpoint, Endpoint::ClosedAtR);
        assert_eq!(fv.endpoint, Endpoint::OpenAtR);
    }

    #[test]
    fn valuation_of_delta() {
        let d = delta_power_net(1, &standard_bump()).unwrap();
        let k = CompactRegion::interval(-0.5, 0.5, 9).unwrap();
        let s = EpsilonSchedule::default();
        assert!((valuation(&d, &k, 0, &s).unwrap() - 1.0).abs() < 0.1);
        assert!((valuation(&d, &k, 1, &s).unwrap() - 2.0).abs() < 0.1);
        let c = library::constant(1, 3.0);
        let f = valuation_fit(&c, &k, 2, &s).unwrap();
        assert!(f.slope.abs() < 1e-12);
        assert_eq!(f.classification, Classification::ConvergesNonzero);
    }

    #[test]
    fn custom_scale_agrees_with_power_slopes() {
        let s = EpsilonSchedule::default();
        let d2 = delta_power_net(2, &standard_bump()).unwrap();
        let opts = FiberOptions {
            scale: ScaleMap::custom("power-rule", |r, e: f64| e.powf(r)),
            ..FiberOptions::default()
        };
        let a = sigma_fiber(&d2, &[0.0], Target::Cp(0), &s, 0.1).unwrap();
        let b = sigma_fiber_with(&d2, &[0.0], Target::Cp(0), &s, 0.1, &opts).unwrap();
        assert!((a.r - b.r).abs() < 0.01, "{} vs {}", a.r, b.r);
        assert_eq!(a.endpoint, b.endpoint);
    }

    #[test]
    fn rejects_degenerate_neighborhoods() {
        let u = library::constant(1, 1.0);
        let s = EpsilonSchedule::default();
        assert!(matches!(
            sigma_fiber(&u, &[0.0], Target::Cp(0), &s, 0.0),
            Err(Error::NeighborhoodTooSmall(_))
        ));
    }
}
