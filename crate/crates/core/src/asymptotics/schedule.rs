use crate::error::{Error, Result};

/// Geometric sequence `ε_k = ε_max·ρ^k`, `k = 0..n`, discretising `ε → 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSchedule {
    eps_max: f64,
    rho: f64,
    values: Vec<f64>,
}

impl EpsilonSchedule {
    pub fn new(eps_max: f64, rho: f64, n: usize) -> Result<Self> {
        if !(eps_max > 0.0 && eps_max <= 1.0) {
            return Err(Error::InvalidParameter(format!("eps_max = {eps_max} must lie in (0, 1]")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!("rho = {rho} must lie in (0, 1)")));
        }
        if n < 8 {
            return Err(Error::TooFewSamples { needed: 8, got: n });
        }
        let values: Vec<f64> = (0..n).map(|k| eps_max * rho.powi(k as i32)).collect();
        let min = values[n - 1];
        if !(min > 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "smallest epsilon {min:e} must stay above 1e-12"
            )));
        }
        Ok(EpsilonSchedule { eps_max, rho, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eps_max(&self) -> f64 {
        self.eps_max
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule::new(0.1, 0.6, 24).expect("default schedule is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule() {
        let s = EpsilonSchedule::default();
        assert_eq!(s.len(), 24);
        assert_eq!(s.values()[0], 0.1);
        assert!(s.values().windows(2).all(|w| w[1] < w[0]));
        assert!(*s.values().last().unwrap() > 1e-12);
    }

    #[test]
    fn rejects_bad_schedules() {
        assert!(EpsilonSchedule::new(1.5, 0.6, 24).is_err());
        assert!(EpsilonSchedule::new(0.1, 1.0, 24).is_err());
        assert!(EpsilonSchedule::new(0.1, 0.6, 4).is_err());
        assert!(EpsilonSchedule::new(0.1, 0.1, 24).is_err());
    }
}
