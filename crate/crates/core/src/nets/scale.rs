use std::fmt;
use std::sync::Arc;

type ScaleRule = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Asymptotic scale `(r, ε) ↦ a_ε(r)`.
///
/// The power scale `a_ε(r) = ε^r` is the first-class case; anything else is
/// a user rule that should satisfy `a_ε(0) = 1`, submultiplicativity and
/// `a_ε(r) → 0` for `r > 0`.
#[derive(Clone)]
pub struct ScaleMap {
    id: String,
    rule: Option<Arc<ScaleRule>>,
}

impl ScaleMap {
    pub fn power() -> Self {
        ScaleMap {
            id: "power".into(),
            rule: None,
        }
    }

    pub fn custom(id: impl Into<String>, rule: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ScaleMap {
            id: id.into(),
            rule: Some(Arc::new(rule)),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_power(&self) -> bool {
        self.rule.is_none()
    }

    pub fn eval(&self, r: f64, eps: f64) -> f64 {
        match &self.rule {
            None => eps.powf(r),
            Some(f) => f(r, eps),
        }
    }
}

impl Default for ScaleMap {
    fn default() -> Self {
        Self::power()
    }
}

impl fmt::Debug for ScaleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScaleMap({})", self.id)
    }
}
