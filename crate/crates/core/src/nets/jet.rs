//! Truncated multivariate Taylor expansions.
//!
//! A [`Jet`] holds the Taylor coefficients `c_α = ∂^α f(x₀) / α!` of a
//! function at a point for every `|α| ≤ order`. Products and compositions
//! with univariate functions are exact up to the truncation order, which is
//! how the mollifier profiles and their powers get analytic derivatives.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::index::MultiIndex;

#[derive(Debug)]
struct Layout {
    dim: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `(i, j, k)` with `indices[i] + indices[j] = indices[k]`.
    products: Vec<(usize, usize, usize)>,
}

fn layout(dim: usize, order: usize) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet layout cache poisoned");
    guard
        .entry((dim, order))
        .or_insert_with(|| {
            let indices = MultiIndex::up_to_order(dim, order);
            let lookup: HashMap<MultiIndex, usize> =
                indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
            let mut products = Vec::new();
            for (i, a) in indices.iter().enumerate() {
                for (j, b) in indices.iter().enumerate() {
                    if a.order() + b.order() <= order {
                        products.push((i, j, lookup[&a.add(b)]));
                    }
                }
            }
            Arc::new(Layout {
                dim,
                order,
                indices,
                lookup,
                products,
            })
        })
        .clone()
}

#[derive(Debug, Clone)]
pub struct Jet {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn zero(dim: usize, order: usize) -> Self {
        let layout = layout(dim, order);
        let n = layout.indices.len();
        Jet {
            layout,
            coeffs: vec![0.0; n],
        }
    }

    pub fn constant(dim: usize, order: usize, value: f64) -> Self {
        let mut j = Self::zero(dim, order);
        j.coeffs[0] = value;
        j
    }

    /// The coordinate function `x ↦ x_axis` expanded at a point whose
    /// `axis` coordinate is `value`.
    pub fn variable(dim: usize, order: usize, axis: usize, value: f64) -> Self {
        let mut j = Self::constant(dim, order, value);
        if order >= 1 {
            let idx = j.layout.lookup[&MultiIndex::unit(dim, axis)];
            j.coeffs[idx] = 1.0;
        }
        j
    }

    /// Build a jet from a derivative oracle `α ↦ ∂^α f(x₀)`.
    pub fn from_derivatives(dim: usize, order: usize, mut deriv: impl FnMut(&MultiIndex) -> f64) -> Self {
        let mut j = Self::zero(dim, order);
        let layout = j.layout.clone();
        for (i, a) in layout.indices.iter().enumerate() {
            j.coeffs[i] = deriv(a) / a.factorial();
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `c_α`; zero beyond the truncation order.
    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.layout.lookup.get(alpha).map_or(0.0, |&i| self.coeffs[i])
    }

    /// `∂^α f(x₀) = α! c_α`.
    pub fn derivative(&self, alpha: &MultiIndex) -> f64 {
        self.coeff(alpha) * alpha.factorial()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        self
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += b);
        out
    }

    pub fn add_constant(mut self, c: f64) -> Self {
        self.coeffs[0] += c;
        self
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let mut out = Jet::zero(self.dim(), self.order());
        for &(i, j, k) in &self.layout.products {
            let (a, b) = (self.coeffs[i], other.coeffs[j]);
            if a != 0.0 && b != 0.0 {
                out.coeffs[k] += a * b;
            }
        }
        out
    }

    pub fn powi(&self, p: u32) -> Jet {
        let mut result = Jet::constant(self.dim(), self.order(), 1.0);
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Compose with a univariate function given its Taylor coefficients
    /// `h_k = h^{(k)}(f(x₀)) / k!` at the jet's value.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        let n = self.order().min(taylor.len().saturating_sub(1));
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut out = Jet::constant(self.dim(), self.order(), taylor[n]);
        for k in (0..n).rev() {
            out = out.mul(&delta).add_constant(taylor[k]);
        }
        out
    }
}

/// Taylor coefficients of `exp` at `g₀` given those of `g` (all orders in `g`).
pub fn exp_series(g: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; g.len()];
    e[0] = g[0].exp();
    for k in 1..g.len() {
        let mut s = 0.0;
        for i in 1..=k {
            s += i as f64 * g[i] * e[k - i];
        }
        e[k] = s / k as f64;
    }
    e
}

/// Taylor coefficients of `z ↦ z^p` (real `p`) at `z₀ > 0`.
pub fn powf_series(z0: f64, p: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut coeff = 1.0;
    for k in 0..=order {
        out.push(coeff * z0.powf(p - k as f64));
        coeff *= (p - k as f64) / (k + 1) as f64;
    }
    out
}
