//! Named nets and their default experiments.

use std::collections::BTreeMap;

use super::config::{ExperimentConfig, NetSpec, RegionConfig, ScheduleConfig, Task};
use crate::error::{Error, Result};
use crate::mollify::{delta_derivative_net, delta_power_net, heaviside_net, standard_bump};
use crate::nets::{library, Net};
use crate::pde_suite::{
    blowup_truncated, dalembert_wave, rauch_reed_w, semilinear_solution, BlowupConfig, InitialData, SemilinearKind,
    SemilinearTag, WaveData1D,
};

pub struct Entry {
    pub name: &'static str,
    pub about: &'static str,
    /// Parameters with their defaults; `None` means "absent unless given".
    pub params: &'static [(&'static str, Option<f64>)],
    /// Listed by `list` (the extra nets are only reachable through `--net`).
    pub listed: bool,
}

const SEMILINEAR_PARAMS: &[(&str, Option<f64>)] = &[("m", Some(1.0)), ("k", None), ("t", None)];

pub const REGISTRY: &[Entry] = &[
    Entry {
        name: "delta_pow",
        about: "powers δ^m of the embedded delta",
        params: &[("m", Some(2.0))],
        listed: true,
    },
    Entry {
        name: "delta_deriv",
        about: "derivatives ∂^k δ of the embedded delta",
        params: &[("k", Some(1.0))],
        listed: true,
    },
    Entry {
        name: "heaviside",
        about: "the embedded Heaviside function H∗φ_ε",
        params: &[],
        listed: true,
    },
    Entry {
        name: "osc",
        about: "ε sin(x/ε)",
        params: &[],
        listed: true,
    },
    Entry {
        name: "wave1d",
        about: "d'Alembert solution with data c0·δ^m, c1·δ^n",
        params: &[("c0", Some(1.0)), ("c1", Some(0.0)), ("m", Some(2.0)), ("n", Some(1.0))],
        listed: true,
    },
    Entry {
        name: "semilinear:dissipative",
        about: "∂_t u = −u³ from δ^m (or ∂^k δ); t= restricts to a time slice",
        params: SEMILINEAR_PARAMS,
        listed: true,
    },
    Entry {
        name: "semilinear:sqrt",
        about: "∂_t u = √(1+u²) from δ^m (or ∂^k δ); t= restricts to a time slice",
        params: SEMILINEAR_PARAMS,
        listed: true,
    },
    Entry {
        name: "semilinear:log",
        about: "∂_t u = (1+u)ln(1+u) from δ^m (or ∂^k δ); t= restricts to a time slice",
        params: SEMILINEAR_PARAMS,
        listed: true,
    },
    Entry {
        name: "blowup",
        about: "∂_t u = χ_ε(u)u² from H∗φ_ε with cutoff at ε^{-s}",
        params: &[("s", Some(1.0)), ("t_max", Some(2.0))],
        listed: true,
    },
    Entry {
        name: "rauch_reed",
        about: "interaction term of two crossing delta waves δ^m, δ^n",
        params: &[("m", Some(1.0)), ("n", Some(1.0))],
        listed: true,
    },
    Entry {
        name: "classify",
        about: "regularity class of ε^{-r}|ln ε|^log on a compact",
        params: &[("r", Some(1.0)), ("log", Some(0.0))],
        listed: true,
    },
    Entry {
        name: "eps_pow",
        about: "ε^{-r}|ln ε|^log",
        params: &[("r", Some(1.0)), ("log", Some(0.0))],
        listed: false,
    },
    Entry {
        name: "zero",
        about: "the zero net",
        params: &[],
        listed: false,
    },
];

pub fn lookup(name: &str) -> Result<&'static Entry> {
    REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Config(format!("unknown net or experiment '{name}' (see `list`)")))
}

/// Parse `name[:k=v,k=v]`; names may themselves contain `:`.
pub fn parse_net_spec(text: &str) -> Result<NetSpec> {
    let entry = REGISTRY
        .iter()
        .filter(|e| text == e.name || text.starts_with(&format!("{}:", e.name)))
        .max_by_key(|e| e.name.len())
        .ok_or_else(|| Error::Config(format!("unknown net '{text}' (see `list`)")))?;
    let mut params = BTreeMap::new();
    let rest = &text[entry.name.len()..];
    for kv in rest.trim_start_matches(':').split(',').filter(|s| !s.is_empty()) {
        let (k, v) = parse_param(kv)?;
        params.insert(k, v);
    }
    Ok(NetSpec {
        id: entry.name.to_string(),
        params,
    })
}

pub fn parse_param(kv: &str) -> Result<(String, f64)> {
    let (k, v) = kv
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("parameter '{kv}' is not of the form key=value")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("parameter {k} = '{v}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("parameter {k} must be finite")));
    }
    Ok((k.trim().to_string(), v))
}

/// Parameters of `spec` merged over the entry's defaults.
pub fn resolved_params(spec: &NetSpec) -> Result<BTreeMap<String, f64>> {
    let entry = lookup(&spec.id)?;
    let mut out = BTreeMap::new();
    for (k, d) in entry.params {
        if let Some(v) = d {
            out.insert(k.to_string(), *v);
        }
    }
    for (k, v) in &spec.params {
        if !entry.params.iter().any(|(name, _)| name == k) {
            return Err(Error::Config(format!("'{}' takes no parameter '{k}'", spec.id)));
        }
        out.insert(k.clone(), *v);
    }
    Ok(out)
}

fn count(p: &BTreeMap<String, f64>, key: &str, min: u32) -> Result<u32> {
    let v = p[key];
    if v.fract() != 0.0 || v < min as f64 || v > 64.0 {
        return Err(Error::Config(format!("{key} = {v} must be an integer in [{min}, 64]")));
    }
    Ok(v as u32)
}

/// Spatial (or space-time) dimension of the net named by `spec`.
pub fn net_dim(spec: &NetSpec) -> Result<usize> {
    let p = resolved_params(spec)?;
    Ok(match spec.id.as_str() {
        "wave1d" | "blowup" | "rauch_reed" => 2,
        id if id.starts_with("semilinear:") => {
            if p.contains_key("t") {
                1
            } else {
                2
            }
        }
        _ => 1,
    })
}

pub fn build_net(spec: &NetSpec) -> Result<Net> {
    let p = resolved_params(spec)?;
    let moll = standard_bump();
    let net = match spec.id.as_str() {
        "delta_pow" => delta_power_net(count(&p, "m", 1)?, &moll)?,
        "delta_deriv" => delta_derivative_net(count(&p, "k", 0)? as usize, &moll)?,
        "heaviside" => heaviside_net(&moll)?,
        "osc" => library::oscillatory(),
        "wave1d" => {
            let data = WaveData1D::new(p["c0"], p["c1"], count(&p, "m", 1)?, count(&p, "n", 1)?)?;
            dalembert_wave(&data, &moll)?
        }
        "blowup" => blowup_truncated(BlowupConfig::new(p["s"], p["t_max"])?, &moll)?,
        "rauch_reed" => rauch_reed_w(count(&p, "m", 1)?, count(&p, "n", 1)?, &moll)?,
        "classify" | "eps_pow" => {
            let log = p["log"];
            if log.fract() != 0.0 || log.abs() > 8.0 {
                return Err(Error::Config(format!("log = {log} must be an integer in [-8, 8]")));
            }
            library::eps_power(p["r"], log as i32, library::one(1), 1)
        }
        "zero" => library::zero(1),
        id => {
            let tag = match id {
                "semilinear:dissipative" => SemilinearTag::DissipativeCubic,
                "semilinear:sqrt" => SemilinearTag::SqrtGrowth,
                "semilinear:log" => SemilinearTag::LogGrowth,
                other => return Err(Error::Config(format!("unknown net '{other}'"))),
            };
            let initial = if p.contains_key("k") {
                InitialData::DeltaDerivative(count(&p, "k", 0)? as usize)
            } else {
                InitialData::DeltaPower(count(&p, "m", 1)?)
            };
            let u = semilinear_solution(SemilinearKind { tag, initial }, &moll)?;
            match p.get("t") {
                Some(&t) if t < 0.0 => return Err(Error::Config(format!("time slice t = {t} must be ≥ 0"))),
                Some(&t) => u.restrict(1, t)?,
                None => u,
            }
        }
    };
    Ok(net)
}

/// The experiment `example <name>` runs.
pub fn default_experiment(name: &str, overrides: BTreeMap<String, f64>) -> Result<ExperimentConfig> {
    let entry = lookup(name)?;
    let net = NetSpec {
        id: entry.name.to_string(),
        params: overrides,
    };
    let region = |lo: &[f64], hi: &[f64], points: usize| RegionConfig {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        points,
    };
    let (task, target, reg) = match entry.name {
        "delta_pow" => (Task::Spectrum, "c0", region(&[-2.0], &[2.0], 81)),
        "delta_deriv" | "heaviside" => (Task::Spectrum, "c0", region(&[-1.0], &[1.0], 41)),
        "osc" => (Task::Spectrum, "c1", region(&[-1.0], &[1.0], 21)),
        "wave1d" => (Task::Spectrum, "c0", region(&[-1.2, 0.6], &[1.2, 1.4], 9)),
        // Neighborhoods (two spacings wide) must stay inside 0 ≤ t ≤ t_max.
        "blowup" => (Task::Spectrum, "c0", region(&[-0.5, 0.5], &[0.5, 1.5], 9)),
        "rauch_reed" => (Task::Spectrum, "c0", region(&[-0.2, 0.8], &[0.2, 1.6], 9)),
        "classify" => (Task::Classify { lmax: 4 }, "c0", region(&[-0.5], &[0.5], 41)),
        "eps_pow" | "zero" => (Task::Spectrum, "c0", region(&[-1.0], &[1.0], 21)),
        _ => {
            // Semilinear family: a time slice is 1-D, otherwise a space-time box.
            if net_dim(&net)? == 1 {
                (Task::Spectrum, "c0", region(&[-0.5], &[0.5], 21))
            } else {
                (Task::Spectrum, "c0", region(&[-0.4, 0.25], &[0.4, 1.0], 9))
            }
        }
    };
    Ok(ExperimentConfig {
        experiment: entry.name.to_string(),
        net,
        task,
        target: target.to_string(),
        region: reg,
        schedule: ScheduleConfig::default(),
        scale: "power".into(),
        delta: None,
        seed: None,
    })
}
