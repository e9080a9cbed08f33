//! Compact regions, sample grids, the seminorms `p_{K,l}` and weak pairings
//! against a finite dictionary of test functions.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::mollify::{standard_bump, Mollifier};
use crate::nets::{MultiIndex, Net, Structure};
use crate::quadrature::Adaptive;

/// Uniform grid density used for region-wide sups.
pub const DEFAULT_GRID_POINTS: usize = 257;
/// Samples placed across every ε-scale band reported by a net.
pub const BAND_POINTS: usize = 33;
/// Cap on structure-driven samples per evaluation.
pub const MAX_AUGMENTED_POINTS: usize = 100_000;

/// Closed axis-aligned box with a uniform grid that contains its corners and
/// its center (the per-axis point count is always odd).
#[derive(Debug, Clone, PartialEq)]
pub struct CompactRegion {
    lo: Vec<f64>,
    hi: Vec<f64>,
    n: usize,
}

impl CompactRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, points_per_axis: usize) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidParameter("region bounds must be nonempty and of equal length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidParameter(format!("region {lo:?}..{hi:?} has empty interior")));
        }
        if points_per_axis < 9 {
            return Err(Error::InvalidParameter(format!(
                "regions need at least 9 grid points per axis, got {points_per_axis}"
            )));
        }
        let n = points_per_axis | 1;
        Ok(CompactRegion { lo, hi, n })
    }

    pub fn interval(a: f64, b: f64, points: usize) -> Result<Self> {
        Self::new(vec![a], vec![b], points)
    }

    /// The cube `x ± radius`.
    pub fn around(center: &[f64], radius: f64, points: usize) -> Result<Self> {
        Self::new(
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
            points,
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.n - 1) as f64
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| v >= a && v <= b)
    }

    pub fn axis_grid(&self, axis: usize) -> Vec<f64> {
        let (a, b) = (self.lo[axis], self.hi[axis]);
        let h = (b - a) / (self.n - 1) as f64;
        let mut g: Vec<f64> = (0..self.n).map(|i| a + i as f64 * h).collect();
        // Exact endpoints and center regardless of rounding.
        g[self.n - 1] = b;
        g[self.n / 2] = 0.5 * (a + b);
        g
    }

    /// All tensor grid points, last axis fastest.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim()).map(|i| self.axis_grid(i)).collect();
        tensor(&axes)
    }

    /// Whether `other` lies inside `self`.
    pub fn includes(&self, other: &CompactRegion) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }
}

fn tensor(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for p in &out {
            for &v in axis {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Extra coordinates in `[lo, hi]` resolving the given structures.
fn structure_coords(structs: &[Structure], lo: f64, hi: f64, budget: &mut usize) -> Vec<f64> {
    let mut out = Vec::new();
    for s in structs {
        match *s {
            Structure::Band { lo: a, hi: b } => {
                if b < lo || a > hi {
                    continue;
                }
                for i in 0..BAND_POINTS {
                    let v = a + (b - a) * i as f64 / (BAND_POINTS - 1) as f64;
                    if v >= lo && v <= hi && *budget > 0 {
                        out.push(v);
                        *budget -= 1;
                    }
                }
            }
            Structure::Periodic { period, phase } => {
                if !(period > 0.0) {
                    continue;
                }
                let q = period / 4.0;
                let mut k = ((lo - phase) / q).ceil();
                loop {
                    let v = phase + k * q;
                    if v > hi || *budget == 0 {
                        break;
                    }
                    out.push(v);
                    *budget -= 1;
                    k += 1.0;
                }
            }
        }
    }
    out
}

/// Sample points for sups of `net` over `K` at scale ε: the uniform grid plus
/// structure-aware points along every grid line.
pub fn sample_points(net: &Net, k: &CompactRegion, eps: f64) -> Vec<Vec<f64>> {
    let base = k.grid();
    let mut points = base.clone();
    let mut budget = MAX_AUGMENTED_POINTS;
    for axis in 0..k.dim() {
        for p in base.iter().filter(|p| p[axis] == k.lo[axis]) {
            let structs = net.structure(axis, p, eps);
            if structs.is_empty() {
                continue;
            }
            for v in structure_coords(&structs, k.lo[axis], k.hi[axis], &mut budget) {
                let mut q = p.clone();
                q[axis] = v;
                points.push(q);
            }
        }
    }
    points
}

fn check_order(net: &Net, l: usize) -> Result<()> {
    if l > net.max_deriv_order() {
        return Err(Error::OrderExceeded {
            requested: l,
            budget: net.max_deriv_order(),
        });
    }
    Ok(())
}

/// `sup_{x∈S, |α|=j} |∂^α u_ε(x)|` for each `j = 0..=l` over the given points.
pub fn order_sups_at(net: &Net, points: &[Vec<f64>], l: usize, eps: f64) -> Result<Vec<f64>> {
    check_order(net, l)?;
    let mut sups = vec![0.0f64; l + 1];
    for j in 0..=l {
        for alpha in MultiIndex::of_order(net.dim(), j) {
            for p in points {
                let v = net.evaluate(&alpha, p, eps)?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample { eps, value: v });
                }
                sups[j] = sups[j].max(v.abs());
            }
        }
    }
    Ok(sups)
}

/// Per-order sups over the sample set of `K`.
pub fn order_sups(net: &Net, k: &CompactRegion, l: usize, eps: f64) -> Result<Vec<f64>> {
    order_sups_at(net, &sample_points(net, k, eps), l, eps)
}

/// `p_{K,l}(u_ε) = sup_{x∈K, |α|≤l} |∂^α u_ε(x)|`, with the sup taken on the
/// sample set of `K`.
pub fn cp_seminorm(net: &Net, k: &CompactRegion, l: usize, eps: f64) -> Result<f64> {
    check_region(net, k)?;
    Ok(order_sups(net, k, l, eps)?.into_iter().fold(0.0, f64::max))
}

fn check_region(net: &Net, k: &CompactRegion) -> Result<()> {
    if net.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            found: k.dim(),
        });
    }
    Ok(())
}

/// `sup_{x∈S, |α|≤l} |a·∂^α u_{ε₁}(x) − b·∂^α u_{ε₂}(x)|` on the union of
/// both sample sets: the Cauchy increment of the scaled net.
pub fn cp_increment(net: &Net, k: &CompactRegion, l: usize, (e1, a): (f64, f64), (e2, b): (f64, f64)) -> Result<f64> {
    check_order(net, l)?;
    let mut points = sample_points(net, k, e1);
    points.extend(sample_points(net, k, e2));
    let mut sup = 0.0f64;
    for alpha in MultiIndex::up_to_order(net.dim(), l) {
        for p in &points {
            let v = a * net.evaluate(&alpha, p, e1)? - b * net.evaluate(&alpha, p, e2)?;
            sup = sup.max(v.abs());
        }
    }
    Ok(sup)
}

fn unit_bump() -> &'static Mollifier {
    static B: OnceLock<Mollifier> = OnceLock::new();
    B.get_or_init(standard_bump)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    /// Tensor product of bumps.
    Even,
    /// The even probe times `(x₀ − c₀)/w₀`.
    Odd,
}

/// A test function: a dilated, translated tensor bump (optionally odd in the
/// first coordinate), supported in `center ± width`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub center: Vec<f64>,
    pub width: Vec<f64>,
    pub kind: ProbeKind,
}

impl TestFunction {
    pub fn new(center: Vec<f64>, width: Vec<f64>, kind: ProbeKind) -> Result<Self> {
        if center.len() != width.len() || width.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter("test function widths must be positive".into()));
        }
        Ok(TestFunction { center, width, kind })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn support(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.center.iter().zip(&self.width).map(|(c, w)| c - w).collect(),
            self.center.iter().zip(&self.width).map(|(c, w)| c + w).collect(),
        )
    }

    fn factor(&self, axis: usize, k: usize, v: f64) -> f64 {
        let w = self.width[axis];
        let s = (v - self.center[axis]) / w;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        if k == 0 {
            let v = unit_bump().value(&[s]);
            return if axis == 0 && self.kind == ProbeKind::Odd { s * v } else { v };
        }
        let jet = unit_bump().jet(&[s], k).expect("bump order budget");
        let d = |i: usize| jet.derivative(&MultiIndex::new(vec![i]));
        let raw = if axis == 0 && self.kind == ProbeKind::Odd {
            s * d(k) + if k > 0 { k as f64 * d(k - 1) } else { 0.0 }
        } else {
            d(k)
        };
        raw / w.powi(k as i32)
    }

    /// `∂^α ψ(x)`.
    pub fn derivative(&self, alpha: &MultiIndex, x: &[f64]) -> f64 {
        let mut out = 1.0;
        for (axis, &k) in alpha.components().iter().enumerate() {
            out *= self.factor(axis, k, x[axis]);
            if out == 0.0 {
                break;
            }
        }
        out
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.derivative(&MultiIndex::zero(self.dim()), x)
    }
}

/// A finite probe of the weak topology near a region.
#[derive(Debug, Clone, PartialEq)]
pub struct TestDictionary {
    pub members: Vec<TestFunction>,
    pub region: CompactRegion,
}

impl TestDictionary {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Bumps at three centers per axis (`c ± h/2` and `c`, `h` the half-width)
/// with widths `h/2` and `h/4`, plus one odd probe (odd along the first axis)
/// per center.
/// Every member is supported inside `K`.
pub fn make_test_dictionary(k: &CompactRegion) -> TestDictionary {
    let c = k.center();
    let h: Vec<f64> = k.lo.iter().zip(&k.hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let offsets: Vec<Vec<f64>> = (0..k.dim())
        .map(|i| vec![c[i] - h[i] / 2.0, c[i], c[i] + h[i] / 2.0])
        .collect();
    let centers = tensor(&offsets);
    let mut members = Vec::new();
    for frac in [0.5, 0.25] {
        for ctr in &centers {
            let w: Vec<f64> = h.iter().map(|v| v * frac).collect();
            members.push(TestFunction::new(ctr.clone(), w, ProbeKind::Even).expect("positive widths"));
        }
    }
    for ctr in &centers {
        let w: Vec<f64> = h.iter().map(|v| v * 0.5).collect();
        members.push(TestFunction::new(ctr.clone(), w, ProbeKind::Odd).expect("positive widths"));
    }
    TestDictionary {
        members,
        region: k.clone(),
    }
}

/// Pairings below this fraction of the largest one need only absolute accuracy.
const CROSS_SHARE: f64 = 1e-4;

/// Smallest panel, relative to ε, that pairings refine to.
const MIN_WIDTH: f64 = 1e-4;

/// Pairing tolerance; nested inner integrals run a hundred times tighter so
/// their error does not look like noise to the outer rule.
fn quadrature(rel_tol: f64, eps: f64) -> Adaptive {
    Adaptive {
        rel_tol,
        max_depth: 48,
        order: 16,
        cross_share: CROSS_SHARE,
        min_width: MIN_WIDTH * eps,
    }
}

/// Breakpoints along `axis` from the net's structure (capped for periodic
/// structure, where adaptivity takes over).
fn structure_breaks(net: &Net, axis: usize, point: &[f64], eps: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for s in net.structure(axis, point, eps) {
        match s {
            Structure::Band { lo: a, hi: b } => {
                out.push(a);
                out.push(b);
                out.push(0.5 * (a + b));
            }
            Structure::Periodic { period, phase } => {
                if period > 0.0 && (hi - lo) / period <= 2000.0 {
                    let mut k = ((lo - phase) / period).ceil();
                    while phase + k * period < hi {
                        out.push(phase + k * period);
                        k += 1.0;
                    }
                }
            }
        }
    }
    out
}

/// Gauss–Legendre order of the fixed tensor rule used for planar pairings.
pub const TENSOR_ORDER: usize = 16;
/// Equal subpanels per breakpoint interval in the tensor rule; one keeps
/// pairings within about 1e-7 of the largest, which is far below what the
/// slope fits resolve.
pub const TENSOR_SUBPANELS: usize = 1;

struct PairingSetup {
    lo: Vec<f64>,
    hi: Vec<f64>,
    mid: Vec<f64>,
    supports: Vec<(Vec<f64>, Vec<f64>)>,
}

fn setup(net: &Net, probes: &[TestFunction], eps: f64) -> Result<Option<PairingSetup>> {
    let d = net.dim();
    if probes.iter().any(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: probes[0].dim(),
        });
    }
    if d > 2 {
        return Err(Error::InvalidParameter("weak pairings are implemented for d ≤ 2".into()));
    }
    let supports: Vec<(Vec<f64>, Vec<f64>)> = probes.iter().map(|p| p.support()).collect();
    let lo: Vec<f64> = (0..d).map(|i| supports.iter().map(|s| s.0[i]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|i| supports.iter().map(|s| s.1[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
    if let Some(h) = net.support_hint() {
        if eps <= h.eps0 && h.misses_box(&lo, &hi) {
            return Ok(None);
        }
    }
    let mid = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok(Some(PairingSetup { lo, hi, mid, supports }))
}

impl PairingSetup {
    /// Probe support edges and centers along `axis`.
    fn edges(&self, axis: usize) -> Vec<f64> {
        self.supports
            .iter()
            .flat_map(|s| [s.0[axis], s.1[axis], 0.5 * (s.0[axis] + s.1[axis])])
            .collect()
    }
}

fn tag_eps(eps: f64) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::QuadratureNonConvergence { lo, hi, .. } => Error::QuadratureNonConvergence { lo, hi, eps },
        other => other,
    }
}

/// Adaptive pairing: panels bisected until a panel and its halves agree
/// (nested one-dimensional rules in the plane).
pub fn pair_adaptive(net: &Net, probes: &[TestFunction], eps: f64) -> Result<Vec<f64>> {
    if probes.is_empty() {
        return Ok(Vec::new());
    }
    let Some(st) = setup(net, probes, eps)? else {
        return Ok(vec![0.0; probes.len()]);
    };
    let n = probes.len();
    let integrand = |x: &[f64]| -> Result<Vec<f64>> {
        let psi: Vec<f64> = probes.iter().map(|p| p.value(x)).collect();
        if psi.iter().all(|v| *v == 0.0) {
            return Ok(psi);
        }
        let u = net.value(x, eps)?;
        Ok(psi.into_iter().map(|v| u * v).collect())
    };
    let (lo, hi, mid) = (&st.lo, &st.hi, &st.mid);
    if net.dim() == 1 {
        let mut br = st.edges(0);
        br.extend(structure_breaks(net, 0, mid, eps, lo[0], hi[0]));
        return quadrature(1e-10, eps)
            .integrate(lo[0], hi[0], &br, n, |x| integrand(&[x]))
            .map_err(tag_eps(eps));
    }
    let mut br_t = st.edges(1);
    br_t.extend(structure_breaks(net, 1, mid, eps, lo[1], hi[1]));
    let br_x = st.edges(0);
    let inner = quadrature(1e-12, eps);
    quadrature(1e-10, eps)
        .integrate(lo[1], hi[1], &br_t, n, |t| {
            let mut br = br_x.clone();
            br.extend(structure_breaks(net, 0, &[mid[0], t], eps, lo[0], hi[0]));
            inner.integrate(lo[0], hi[0], &br, n, |x| integrand(&[x, t]))
        })
        .map_err(tag_eps(eps))
}

/// Composite Gauss–Legendre nodes on `[lo, hi]` split at `breaks`, each
/// interval cut into `sub` equal panels.
fn composite_nodes(lo: f64, hi: f64, breaks: &[f64], order: usize, sub: usize) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|b| *b > lo && *b < hi && b.is_finite()).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let (nodes, weights) = crate::quadrature::rule(order);
    let mut out = Vec::with_capacity(cuts.len() * sub * order);
    for w in cuts.windows(2) {
        let step = (w[1] - w[0]) / sub as f64;
        for i in 0..sub {
            let a = w[0] + i as f64 * step;
            let (m, h) = (a + 0.5 * step, 0.5 * step);
            out.extend(nodes.iter().zip(weights).map(|(t, wt)| (m + h * t, wt * h)));
        }
    }
    out
}

/// Planar pairings with a fixed tensor rule: probes are products
/// `a(x)·b(t)`, so the inner integrals `∫ u_ε(x,t) a(x) dx` are shared by
/// every probe with the same first factor.
fn pair_tensor(net: &Net, probes: &[TestFunction], eps: f64, st: &PairingSetup) -> Result<Vec<f64>> {
    let key = |p: &TestFunction, axis: usize| {
        let odd = axis == 0 && p.kind == ProbeKind::Odd;
        (p.center[axis].to_bits(), p.width[axis].to_bits(), odd)
    };
    let mut x_keys: Vec<(u64, u64, bool)> = Vec::new();
    let mut t_keys: Vec<(u64, u64, bool)> = Vec::new();
    let mut x_rep: Vec<&TestFunction> = Vec::new();
    let mut t_rep: Vec<&TestFunction> = Vec::new();
    let mut index = Vec::with_capacity(probes.len());
    for p in probes {
        let (kx, kt) = (key(p, 0), key(p, 1));
        let ix = x_keys.iter().position(|k| *k == kx).unwrap_or_else(|| {
            x_keys.push(kx);
            x_rep.push(p);
            x_keys.len() - 1
        });
        let it = t_keys.iter().position(|k| *k == kt).unwrap_or_else(|| {
            t_keys.push(kt);
            t_rep.push(p);
            t_keys.len() - 1
        });
        index.push((ix, it));
    }
    let (lo, hi, mid) = (&st.lo, &st.hi, &st.mid);
    let mut br_t = st.edges(1);
    br_t.extend(structure_breaks(net, 1, mid, eps, lo[1], hi[1]));
    let br_x = st.edges(0);
    let mut out = vec![0.0; probes.len()];
    let mut a = vec![0.0; x_rep.len()];
    let mut inner = vec![0.0; x_rep.len()];
    for (t, wt) in composite_nodes(lo[1], hi[1], &br_t, TENSOR_ORDER, TENSOR_SUBPANELS) {
        let b: Vec<f64> = t_rep.iter().map(|p| p.factor(1, 0, t)).collect();
        if b.iter().all(|v| *v == 0.0) {
            continue;
        }
        let mut br = br_x.clone();
        br.extend(structure_breaks(net, 0, &[mid[0], t], eps, lo[0], hi[0]));
        inner.iter_mut().for_each(|v| *v = 0.0);
        for (x, wx) in composite_nodes(lo[0], hi[0], &br, TENSOR_ORDER, TENSOR_SUBPANELS) {
            for (v, p) in a.iter_mut().zip(&x_rep) {
                *v = p.factor(0, 0, x);
            }
            if a.iter().all(|v| *v == 0.0) {
                continue;
            }
            let u = net.value(&[x, t], eps)?;
            if u == 0.0 {
                continue;
            }
            for (acc, v) in inner.iter_mut().zip(&a) {
                *acc += wx * u * v;
            }
        }
        for (o, &(ix, it)) in out.iter_mut().zip(&index) {
            *o += wt * b[it] * inner[ix];
        }
    }
    Ok(out)
}

/// `⟨u_ε, ψ_j⟩ = ∫ u_ε ψ_j` for every dictionary member at once, as used by
/// spectrum scans: adaptive on the line, a fixed structure-aware tensor rule
/// in the plane (checked against [`pair_adaptive`] in the tests).
pub fn pair_all(net: &Net, probes: &[TestFunction], eps: f64) -> Result<Vec<f64>> {
    if probes.is_empty() {
        return Ok(Vec::new());
    }
    if net.dim() == 1 {
        return pair_adaptive(net, probes, eps);
    }
    match setup(net, probes, eps)? {
        None => Ok(vec![0.0; probes.len()]),
        Some(st) => pair_tensor(net, probes, eps, &st),
    }
}

/// `∫ u_ε ψ`.
pub fn dprime_pairing(net: &Net, psi: &TestFunction, eps: f64) -> Result<f64> {
    Ok(pair_adaptive(net, std::slice::from_ref(psi), eps)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollify::delta_power_net;
    use crate::nets::library;

    #[test]
    fn region_grid_contains_corners_and_center() {
        let k = CompactRegion::interval(-1.0, 1.0, 10).unwrap();
        assert_eq!(k.points_per_axis(), 11);
        let g = k.axis_grid(0);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[10], 1.0);
        assert_eq!(g[5], 0.0);
        assert!(CompactRegion::interval(-1.0, 1.0, 5).is_err());
        assert!(CompactRegion::interval(1.0, 1.0, 9).is_err());
        let sq = CompactRegion::around(&[0.0, 1.0], 0.5, 9).unwrap();
        assert_eq!(sq.grid().len(), 81);
    }

    #[test]
    fn constant_seminorm() {
        let k = CompactRegion::interval(-1.0, 1.0, 9).unwrap();
        let u = library::constant(1, -2.5);
        for l in 0..3 {
            assert_eq!(cp_seminorm(&u, &k, l, 0.01).unwrap(), 2.5);
        }
        assert!(matches!(cp_seminorm(&u, &k, 7, 0.01), Err(Error::OrderExceeded { .. })));
    }

    #[test]
    fn oscillation_is_resolved() {
        let k = CompactRegion::interval(-1.0, 1.0, DEFAULT_GRID_POINTS).unwrap();
        let u = library::oscillatory();
        for &eps in &[1e-3, 1.234e-4, 7e-6] {
            assert!(cp_seminorm(&u, &k, 0, eps).unwrap() <= eps);
            assert!(cp_seminorm(&u, &k, 0, eps).unwrap() >= 0.99 * eps);
            assert!(cp_seminorm(&u, &k, 1, eps).unwrap() >= 0.99);
        }
    }

    #[test]
    fn delta_sup_is_self_similar() {
        let k = CompactRegion::interval(-0.5, 0.5, 9).unwrap();
        let d = delta_power_net(1, &standard_bump()).unwrap();
        let a = order_sups(&d, &k, 2, 1e-3).unwrap();
        let b = order_sups(&d, &k, 2, 1e-5).unwrap();
        for j in 0..3 {
            let ratio = b[j] / a[j];
            let want = 100f64.powi(j as i32 + 1);
            assert!((ratio / want - 1.0).abs() < 1e-9, "order {j}: {ratio}");
        }
    }

    #[test]
    fn dictionary_shape() {
        let k = CompactRegion::interval(-1.0, 1.0, 9).unwrap();
        let dict = make_test_dictionary(&k);
        assert_eq!(dict.len(), 3 * 2 + 3);
        assert!(dict
            .members
            .iter()
            .any(|p| p.kind == ProbeKind::Even && p.center == vec![0.0] && p.value(&[0.0]) > 0.0));
        for p in &dict.members {
            let (lo, hi) = p.support();
            assert!(lo[0] >= -1.0 && hi[0] <= 1.0);
            assert_eq!(p.value(&[1.0 + 1e-9]), 0.0);
        }
        assert_eq!(dict, make_test_dictionary(&k));
        let k2 = CompactRegion::around(&[0.0, 1.0], 0.2, 9).unwrap();
        assert_eq!(make_test_dictionary(&k2).len(), 9 * 3);
    }

    #[test]
    fn delta_pairing_tends_to_point_value() {
        let d = delta_power_net(1, &standard_bump()).unwrap();
        let psi = TestFunction::new(vec![0.0], vec![0.5], ProbeKind::Even).unwrap();
        let want = psi.value(&[0.0]);
        let got = dprime_pairing(&d, &psi, 1e-4).unwrap();
        assert!((got - want).abs() < 1e-6 * want);
        assert_eq!(dprime_pairing(&library::zero(1), &psi, 1e-2).unwrap(), 0.0);
    }

    #[test]
    fn two_dimensional_pairing_of_a_product() {
        // u(x, t) = x t paired with an even bump in t and odd bump in x.
        let u = library::smooth(2, "xt", |a, x| match a.components() {
            [0, 0] => x[0] * x[1],
            [1, 0] => x[1],
            [0, 1] => x[0],
            [1, 1] => 1.0,
            _ => 0.0,
        });
        let psi = TestFunction::new(vec![0.0, 1.0], vec![0.5, 0.5], ProbeKind::Odd).unwrap();
        let got = dprime_pairing(&u, &psi, 0.1).unwrap();
        // ∫ x·(x/w)b(x/w) dx · ∫ t b((t−1)/w) dt = w²∫s²b · w∫b
        let b = unit_bump();
        let q = Adaptive::default();
        let m2 = q.integrate_scalar(-1.0, 1.0, &[], |s| Ok(s * s * b.value(&[s]))).unwrap();
        let want = 0.25 * m2 * 0.5;
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn tensor_rule_agrees_with_nested_adaptive() {
        use crate::pde_suite::{dalembert_wave, WaveData1D};
        let u = dalembert_wave(&WaveData1D::new(1.0, 0.0, 2, 1).unwrap(), &standard_bump()).unwrap();
        let k = CompactRegion::around(&[1.0, 1.0], 0.2, 9).unwrap();
        let dict = make_test_dictionary(&k);
        let e = 0.02;
        let fast = pair_all(&u, &dict.members, e).unwrap();
        let slow = pair_adaptive(&u, &dict.members, e).unwrap();
        let top = slow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (f, s) in fast.iter().zip(&slow) {
            assert!((f - s).abs() <= 1e-7 * top, "{f} vs {s}");
        }
    }
}
