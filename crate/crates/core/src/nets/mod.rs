//! ε-parameterized nets of smooth functions and their algebra.
//!
//! A [`Net`] is the computational stand-in for a representative
//! `(u_ε)_{ε∈(0,1]}`: an evaluable rule `(α, x, ε) ↦ ∂^α u_ε(x)` with analytic
//! derivatives up to a declared order. Nets are immutable and cheap to clone
//! (the rule is reference counted), so they can be shared across worker
//! threads freely.

mod diffpoly;
mod index;
pub mod jet;
pub mod library;
mod scale;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use diffpoly::{Coefficient, DiffPolynomial, SmoothFn};
pub use index::MultiIndex;
pub use scale::ScaleMap;

/// Highest derivative order carried by library nets unless configured otherwise.
pub const DEFAULT_MAX_DERIV_ORDER: usize = 6;

pub type EvalRule = dyn Fn(&MultiIndex, &[f64], f64) -> Result<f64> + Send + Sync;
pub type StructureRule = dyn Fn(usize, &[f64], f64) -> Vec<Structure> + Send + Sync;

/// Where along one axis a net has ε-scale structure, used to place grid
/// samples and quadrature breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Structure {
    /// Fine features confined to `[lo, hi]`.
    Band { lo: f64, hi: f64 },
    /// Oscillation with the given period, extrema at `phase + k·period/4`.
    Periodic { period: f64, phase: f64 },
}

/// Axis-aligned box outside which the net vanishes for every `ε ≤ eps0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportHint {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub eps0: f64,
}

impl SupportHint {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Whether the closed box `[lo, hi]` misses the support entirely.
    pub fn misses_box(&self, lo: &[f64], hi: &[f64]) -> bool {
        (0..self.lo.len()).any(|i| hi[i] < self.lo[i] || lo[i] > self.hi[i])
    }

    fn union(&self, other: &SupportHint) -> SupportHint {
        SupportHint {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
            eps0: self.eps0.min(other.eps0),
        }
    }

    fn intersection(&self, other: &SupportHint) -> SupportHint {
        SupportHint {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
            eps0: self.eps0.min(other.eps0),
        }
    }
}

#[derive(Clone)]
pub struct Net {
    dim: usize,
    max_order: usize,
    rule: Arc<EvalRule>,
    support: Option<SupportHint>,
    structure: Option<Arc<StructureRule>>,
    label: String,
}

impl fmt::Debug for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Net")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("max_order", &self.max_order)
            .field("support", &self.support)
            .finish()
    }
}

pub fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::EpsilonDomain(eps))
    }
}

impl Net {
    pub fn new(
        dim: usize,
        max_order: usize,
        label: impl Into<String>,
        rule: impl Fn(&MultiIndex, &[f64], f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        assert!(dim > 0, "nets need a positive dimension");
        Net {
            dim,
            max_order,
            rule: Arc::new(rule),
            support: None,
            structure: None,
            label: label.into(),
        }
    }

    pub fn with_support(mut self, hint: SupportHint) -> Self {
        debug_assert_eq!(hint.lo.len(), self.dim);
        self.support = Some(hint);
        self
    }

    pub fn with_structure(
        mut self,
        rule: impl Fn(usize, &[f64], f64) -> Vec<Structure> + Send + Sync + 'static,
    ) -> Self {
        self.structure = Some(Arc::new(rule));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_deriv_order(&self) -> usize {
        self.max_order
    }

    pub fn support_hint(&self) -> Option<&SupportHint> {
        self.support.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// ε-scale structure along `axis` through `point` at the given ε.
    pub fn structure(&self, axis: usize, point: &[f64], eps: f64) -> Vec<Structure> {
        self.structure
            .as_ref()
            .map_or_else(Vec::new, |s| s(axis, point, eps))
    }

    /// `∂^α u_ε(x)`.
    pub fn evaluate(&self, alpha: &MultiIndex, x: &[f64], eps: f64) -> Result<f64> {
        if alpha.order() > self.max_order {
            return Err(Error::OrderExceeded {
                requested: alpha.order(),
                budget: self.max_order,
            });
        }
        if alpha.dim() != self.dim || x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: if alpha.dim() != self.dim { alpha.dim() } else { x.len() },
            });
        }
        check_eps(eps)?;
        if let Some(h) = &self.support {
            if eps <= h.eps0 && !h.contains(x) {
                return Ok(0.0);
            }
        }
        (self.rule)(alpha, x, eps)
    }

    /// Shorthand for the value `u_ε(x)`.
    pub fn value(&self, x: &[f64], eps: f64) -> Result<f64> {
        self.evaluate(&MultiIndex::zero(self.dim), x, eps)
    }

    /// The net `∂^α u`.
    pub fn differentiate(&self, alpha: &MultiIndex) -> Result<Net> {
        if alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: alpha.dim(),
            });
        }
        if alpha.order() > self.max_order {
            return Err(Error::OrderExceeded {
                requested: alpha.order(),
                budget: self.max_order,
            });
        }
        let inner = self.clone();
        let shift = alpha.clone();
        let mut out = Net::new(
            self.dim,
            self.max_order - alpha.order(),
            format!("d{:?}({})", alpha.components(), self.label),
            move |beta, x, eps| inner.evaluate(&beta.add(&shift), x, eps),
        );
        out.support = self.support.clone();
        out.structure = self.structure.clone();
        Ok(out)
    }

    /// The net `a_ε(r)·u_ε`.
    pub fn scale(&self, a: &ScaleMap, r: f64) -> Result<Net> {
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter(format!("scale exponent {r} must be ≥ 0")));
        }
        let inner = self.clone();
        let a2 = a.clone();
        let mut out = Net::new(
            self.dim,
            self.max_order,
            format!("{}^{r}·{}", a.id(), self.label),
            move |alpha, x, eps| Ok(a2.eval(r, eps) * inner.evaluate(alpha, x, eps)?),
        );
        out.support = self.support.clone();
        out.structure = self.structure.clone();
        Ok(out)
    }

    /// Restriction to the hyperplane `x_axis = value`, e.g. the time slice
    /// `u(·, t)` of a space-time net.
    pub fn restrict(&self, axis: usize, value: f64) -> Result<Net> {
        if self.dim < 2 || axis >= self.dim {
            return Err(Error::InvalidParameter(format!(
                "cannot restrict a {}-dimensional net along axis {axis}",
                self.dim
            )));
        }
        let inner = self.clone();
        let lift = move |x: &[f64]| {
            let mut full = Vec::with_capacity(x.len() + 1);
            full.extend_from_slice(&x[..axis]);
            full.push(value);
            full.extend_from_slice(&x[axis..]);
            full
        };
        let lift2 = lift.clone();
        let mut out = Net::new(
            self.dim - 1,
            self.max_order,
            format!("{}|x{axis}={value}", self.label),
            move |alpha, x, eps| {
                let mut a = alpha.components().to_vec();
                a.insert(axis, 0);
                inner.evaluate(&MultiIndex::new(a), &lift(x), eps)
            },
        );
        if let Some(h) = &self.support {
            let mut lo = h.lo.clone();
            let mut hi = h.hi.clone();
            let outside = value < lo[axis] || value > hi[axis];
            lo.remove(axis);
            hi.remove(axis);
            if outside {
                // Empty slice: collapse to a degenerate box far away.
                lo.iter_mut().for_each(|v| *v = f64::INFINITY);
                hi.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
            }
            out.support = Some(SupportHint { lo, hi, eps0: h.eps0 });
        }
        if let Some(s) = self.structure.clone() {
            out.structure = Some(Arc::new(move |ax: usize, p: &[f64], eps: f64| {
                let full_axis = if ax >= axis { ax + 1 } else { ax };
                s(full_axis, &lift2(p), eps)
            }));
        }
        Ok(out)
    }

    pub fn add(&self, other: &Net) -> Result<Net> {
        combine(Combine::Add(self.clone(), other.clone()))
    }

    pub fn mul(&self, other: &Net) -> Result<Net> {
        combine(Combine::Mul(self.clone(), other.clone()))
    }

    pub fn scalar_mul(&self, c: f64) -> Net {
        combine(Combine::ScalarMul(c, self.clone())).expect("scalar multiple is always defined")
    }

    pub fn powi(&self, p: u32) -> Result<Net> {
        combine(Combine::IntPow(self.clone(), p))
    }
}

/// Pointwise algebra on nets.
#[derive(Debug, Clone)]
pub enum Combine {
    Add(Net, Net),
    Mul(Net, Net),
    ScalarMul(f64, Net),
    IntPow(Net, u32),
}

fn merged_structure(a: &Net, b: &Net) -> Option<Arc<StructureRule>> {
    match (a.structure.clone(), b.structure.clone()) {
        (None, None) => None,
        (Some(s), None) | (None, Some(s)) => Some(s),
        (Some(s), Some(t)) => Some(Arc::new(move |axis: usize, p: &[f64], eps: f64| {
            let mut v = s(axis, p, eps);
            v.extend(t(axis, p, eps));
            v
        })),
    }
}

fn check_same_dim(a: &Net, b: &Net) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

pub fn combine(op: Combine) -> Result<Net> {
    match op {
        Combine::Add(u, v) => {
            check_same_dim(&u, &v)?;
            let label = format!("({} + {})", u.label, v.label);
            let support = match (&u.support, &v.support) {
                (Some(a), Some(b)) => Some(a.union(b)),
                _ => None,
            };
            let structure = merged_structure(&u, &v);
            let (dim, order) = (u.dim, u.max_order.min(v.max_order));
            let mut out = Net::new(dim, order, label, move |alpha, x, eps| {
                Ok(u.evaluate(alpha, x, eps)? + v.evaluate(alpha, x, eps)?)
            });
            out.support = support;
            out.structure = structure;
            Ok(out)
        }
        Combine::Mul(u, v) => {
            check_same_dim(&u, &v)?;
            let label = format!("({} · {})", u.label, v.label);
            let support = match (&u.support, &v.support) {
                (Some(a), Some(b)) => Some(a.intersection(b)),
                (Some(a), None) | (None, Some(a)) => Some(a.clone()),
                (None, None) => None,
            };
            let structure = merged_structure(&u, &v);
            let (dim, order) = (u.dim, u.max_order.min(v.max_order));
            let mut out = Net::new(dim, order, label, move |alpha, x, eps| {
                // Leibniz: ∂^α(uv) = Σ_{β≤α} C(α,β) ∂^β u ∂^{α−β} v
                let mut acc = 0.0;
                for beta in alpha.lower_set() {
                    let rest = alpha.checked_sub(&beta).expect("β ≤ α");
                    let a = u.evaluate(&beta, x, eps)?;
                    if a == 0.0 {
                        continue;
                    }
                    acc += alpha.binomial(&beta) * a * v.evaluate(&rest, x, eps)?;
                }
                Ok(acc)
            });
            out.support = support;
            out.structure = structure;
            Ok(out)
        }
        Combine::ScalarMul(c, u) => {
            let mut out = Net::new(u.dim, u.max_order, format!("{c}·{}", u.label), {
                let u = u.clone();
                move |alpha, x, eps| Ok(c * u.evaluate(alpha, x, eps)?)
            });
            out.support = u.support.clone();
            out.structure = u.structure.clone();
            Ok(out)
        }
        Combine::IntPow(u, p) => {
            if p < 1 {
                return Err(Error::InvalidParameter(format!("integer power {p} must be ≥ 1")));
            }
            let mut result: Option<Net> = None;
            let mut base = u.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    result = Some(match result {
                        None => base.clone(),
                        Some(r) => combine(Combine::Mul(r, base.clone()))?,
                    });
                }
                e >>= 1;
                if e > 0 {
                    base = combine(Combine::Mul(base.clone(), base))?;
                }
            }
            Ok(result
                .expect("p ≥ 1")
                .with_label(format!("({})^{p}", u.label)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::library::{constant, smooth};
    use super::*;

    fn sin_net() -> Net {
        smooth(1, "sin", |alpha, x| {
            let k = alpha.order();
            let s = x[0].sin();
            let c = x[0].cos();
            [s, c, -s, -c][k % 4]
        })
    }

    #[test]
    fn evaluate_rejects_bad_inputs() {
        let u = sin_net();
        assert!(matches!(
            u.evaluate(&MultiIndex::new(vec![7]), &[0.1], 0.5),
            Err(Error::OrderExceeded { .. })
        ));
        assert!(matches!(u.value(&[0.1], 0.0), Err(Error::EpsilonDomain(_))));
        assert!(matches!(u.value(&[0.1], 1.5), Err(Error::EpsilonDomain(_))));
    }

    #[test]
    fn differentiate_shifts_index() {
        let u = sin_net();
        let du = u.differentiate(&MultiIndex::new(vec![1])).unwrap();
        assert_eq!(du.max_deriv_order(), DEFAULT_MAX_DERIV_ORDER - 1);
        assert_eq!(du.value(&[0.0], 0.3).unwrap(), 1.0);
        let d2 = du.evaluate(&MultiIndex::new(vec![1]), &[0.4], 0.3).unwrap();
        assert_eq!(d2, u.evaluate(&MultiIndex::new(vec![2]), &[0.4], 0.3).unwrap());
    }

    #[test]
    fn int_pow_rejects_zero_and_mismatch() {
        let u = sin_net();
        assert!(u.powi(0).is_err());
        let v = constant(2, 1.0);
        assert!(matches!(u.add(&v), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn restrict_slices_space_time() {
        let u = Net::new(2, 2, "x*t", |alpha, x, _| {
            Ok(match alpha.components() {
                [0, 0] => x[0] * x[1],
                [1, 0] => x[1],
                [0, 1] => x[0],
                [1, 1] => 1.0,
                _ => 0.0,
            })
        });
        let s = u.restrict(1, 3.0).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.value(&[2.0], 0.5).unwrap(), 6.0);
        assert_eq!(s.evaluate(&MultiIndex::new(vec![1]), &[2.0], 0.5).unwrap(), 3.0);
    }

    #[test]
    fn support_hint_is_enforced() {
        let u = constant(1, 1.0).with_support(SupportHint {
            lo: vec![-1.0],
            hi: vec![1.0],
            eps0: 0.5,
        });
        assert_eq!(u.value(&[2.0], 0.1).unwrap(), 0.0);
        assert_eq!(u.value(&[2.0], 0.9).unwrap(), 1.0);
        let p = u.mul(&sin_net()).unwrap();
        assert_eq!(p.value(&[3.0], 0.1).unwrap(), 0.0);
        assert!(p.support_hint().is_some());
    }
}
