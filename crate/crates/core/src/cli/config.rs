//! Experiment configuration files and their validation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::registry;
use crate::asymptotics::{EpsilonSchedule, Target};
use crate::error::{Error, Result};
use crate::nets::Net;
use crate::seminorms::CompactRegion;

/// Largest grid accepted per axis.
pub const MAX_POINTS: usize = 257;
pub const MAX_SCHEDULE_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub id: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    #[default]
    Spectrum,
    /// `v_{K,l}` on the region.
    Valuation { l: usize },
    /// Regularity class with `C^∞` cut at `lmax`.
    Classify { lmax: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub eps_max: f64,
    pub rho: f64,
    pub n: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            eps_max: 0.1,
            rho: 0.6,
            n: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub net: NetSpec,
    #[serde(default)]
    pub task: Task,
    /// `c<p>` or `dprime`.
    #[serde(default = "default_target")]
    pub target: String,
    pub region: RegionConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    /// Only the power scale `a_ε(r) = ε^r` is exposed.
    #[serde(default = "default_scale")]
    pub scale: String,
    /// Initial neighborhood half-width; two grid spacings when absent.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Recorded only: every pipeline is deterministic.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_target() -> String {
    "c0".into()
}

fn default_scale() -> String {
    "power".into()
}

pub fn parse_target(s: &str) -> Result<Target> {
    let t = s.trim().to_ascii_lowercase();
    if t == "dprime" || t == "d'" {
        return Ok(Target::Dprime);
    }
    t.strip_prefix('c')
        .and_then(|p| p.parse::<usize>().ok())
        .map(Target::Cp)
        .ok_or_else(|| Error::Config(format!("target '{s}' is neither c<p> nor dprime")))
}

pub fn target_id(t: Target) -> String {
    match t {
        Target::Cp(p) => format!("c{p}"),
        Target::Dprime => "dprime".into(),
    }
}

/// A config checked against the registry, with everything built.
pub struct Validated {
    pub config: ExperimentConfig,
    pub net: Net,
    pub target: Target,
    pub region: CompactRegion,
    pub schedule: EpsilonSchedule,
    pub delta: f64,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<Validated> {
        let mut config = self.clone();
        config.net.params = registry::resolved_params(&self.net)?;
        let dim = registry::net_dim(&self.net)?;
        let net = registry::build_net(&self.net).map_err(config_err)?;
        let target = parse_target(&self.target)?;
        config.target = target_id(target);
        if self.scale != "power" {
            return Err(Error::Config(format!("scale '{}' is not supported (only 'power')", self.scale)));
        }
        let r = &self.region;
        if r.lo.len() != dim || r.hi.len() != dim {
            return Err(Error::Config(format!(
                "net '{}' lives in dimension {dim} but the region has bounds of length {}/{}",
                self.net.id,
                r.lo.len(),
                r.hi.len()
            )));
        }
        if !(9..=MAX_POINTS).contains(&r.points) {
            return Err(Error::Config(format!("region points {} outside [9, {MAX_POINTS}]", r.points)));
        }
        let region = CompactRegion::new(r.lo.clone(), r.hi.clone(), r.points).map_err(config_err)?;
        config.region.points = region.points_per_axis();
        let s = &self.schedule;
        if s.n > MAX_SCHEDULE_LEN {
            return Err(Error::Config(format!("schedule length {} exceeds {MAX_SCHEDULE_LEN}", s.n)));
        }
        let schedule = EpsilonSchedule::new(s.eps_max, s.rho, s.n).map_err(config_err)?;
        let order = net.max_deriv_order();
        let needed = match (self.task, target) {
            (Task::Spectrum, Target::Cp(p)) => p,
            (Task::Spectrum, Target::Dprime) => 0,
            (Task::Valuation { l }, _) => l,
            (Task::Classify { lmax }, _) => lmax,
        };
        if needed > order {
            return Err(Error::Config(format!(
                "derivative order {needed} exceeds the budget {order} of '{}'",
                self.net.id
            )));
        }
        let delta = match self.delta {
            Some(d) if !(d > 0.0 && d.is_finite()) => {
                return Err(Error::Config(format!("delta = {d} must be positive")));
            }
            Some(d) => d,
            None => crate::asymptotics::default_delta(&region),
        };
        config.delta = Some(delta);
        Ok(Validated {
            config,
            net,
            target,
            region,
            schedule,
            delta,
        })
    }
}
