use std::fmt;
use std::sync::Arc;

use super::{MultiIndex, Net};
use crate::error::{Error, Result};

type SmoothRule = dyn Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync;

/// An ε-independent smooth function with its own derivative rules.
#[derive(Clone)]
pub struct SmoothFn {
    dim: usize,
    max_order: usize,
    rule: Arc<SmoothRule>,
}

impl SmoothFn {
    pub fn new(
        dim: usize,
        max_order: usize,
        rule: impl Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SmoothFn {
            dim,
            max_order,
            rule: Arc::new(rule),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn eval(&self, alpha: &MultiIndex, x: &[f64]) -> f64 {
        if alpha.order() > self.max_order {
            return 0.0;
        }
        (self.rule)(alpha, x)
    }
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothFn(dim={}, order≤{})", self.dim, self.max_order)
    }
}

#[derive(Debug, Clone)]
pub enum Coefficient {
    Constant(f64),
    Smooth(SmoothFn),
}

impl Coefficient {
    fn eval(&self, gamma: &MultiIndex, x: &[f64]) -> f64 {
        match self {
            Coefficient::Constant(c) => {
                if gamma.is_zero() {
                    *c
                } else {
                    0.0
                }
            }
            Coefficient::Smooth(f) => f.eval(gamma, x),
        }
    }
}

/// Linear differential operator `P(∂) = Σ C_α(x) ∂^α`.
#[derive(Debug, Clone, Default)]
pub struct DiffPolynomial {
    terms: Vec<(MultiIndex, Coefficient)>,
}

impl DiffPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, alpha: impl Into<MultiIndex>, coeff: Coefficient) -> Self {
        self.terms.push((alpha.into(), coeff));
        self
    }

    pub fn constant_term(self, alpha: impl Into<MultiIndex>, c: f64) -> Self {
        self.term(alpha, Coefficient::Constant(c))
    }

    /// The 1-D wave operator `∂_t² − ∂_x²` on `(x, t)`.
    pub fn wave_operator() -> Self {
        DiffPolynomial::new()
            .constant_term(vec![0, 2], 1.0)
            .constant_term(vec![2, 0], -1.0)
    }

    pub fn order(&self) -> usize {
        self.terms.iter().map(|(a, _)| a.order()).max().unwrap_or(0)
    }

    /// The net `P(∂)u`; derivatives of the result use Leibniz on each term.
    pub fn apply(&self, net: &Net) -> Result<Net> {
        for (alpha, coeff) in &self.terms {
            if alpha.dim() != net.dim() {
                return Err(Error::DimensionMismatch {
                    expected: net.dim(),
                    found: alpha.dim(),
                });
            }
            if let Coefficient::Smooth(f) = coeff {
                if f.dim != net.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: net.dim(),
                        found: f.dim,
                    });
                }
            }
            if alpha.order() > net.max_deriv_order() {
                return Err(Error::OrderExceeded {
                    requested: alpha.order(),
                    budget: net.max_deriv_order(),
                });
            }
        }
        let mut budget = net.max_deriv_order() - self.order();
        for (_, c) in &self.terms {
            if let Coefficient::Smooth(f) = c {
                budget = budget.min(f.max_order);
            }
        }
        let terms = self.terms.clone();
        let u = net.clone();
        let mut out = Net::new(net.dim(), budget, format!("P(∂){}", net.label()), move |beta, x, eps| {
            let mut acc = 0.0;
            for (alpha, coeff) in &terms {
                for gamma in beta.lower_set() {
                    let c = coeff.eval(&gamma, x);
                    if c == 0.0 {
                        continue;
                    }
                    let rest = beta.checked_sub(&gamma).expect("γ ≤ β");
                    acc += beta.binomial(&gamma) * c * u.evaluate(&rest.add(alpha), x, eps)?;
                }
            }
            Ok(acc)
        });
        if let Some(h) = net.support_hint() {
            out = out.with_support(h.clone());
        }
        let inner = net.clone();
        out = out.with_structure(move |axis, p, eps| inner.structure(axis, p, eps));
        Ok(out)
    }
}
