//! Report assembly and encoding.
//!
//! Reports are `serde_json::Value`s with sorted keys, written with every
//! float as C `%.6e`; CSV cells use the same strings so both encodings of a
//! run carry identical numbers.

use std::io;
use std::path::Path;

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::Validated;
use crate::asymptotics::{EpsilonSchedule, OrderFit, RegularityReport, Regularity, Spectrum, Target};
use crate::error::{Error, Result};

pub const SCHEMA_ID: &str = "microlocal.report";
pub const SCHEMA_VERSION: &str = "1.0.0";

/// `x` as C's `%.6e`, e.g. `-1.250000e-03`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

/// Pretty JSON with floats in `%.6e`.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(sci(v).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        w.write_all(sci(v as f64).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter(PrettyFormatter::new()));
    serde::Serialize::serialize(v, &mut ser).expect("serializing a Value into memory cannot fail");
    out.push(b'\n');
    out
}

/// SHA-256 over the exact bit patterns of the schedule.
pub fn schedule_hash(s: &EpsilonSchedule) -> String {
    let mut h = Sha256::new();
    h.update(s.eps_max().to_bits().to_le_bytes());
    h.update(s.rho().to_bits().to_le_bytes());
    for e in s.values() {
        h.update(e.to_bits().to_le_bytes());
    }
    hex::encode(h.finalize())
}

fn header(kind: &str, v: &Validated) -> Value {
    json!({
        "schema": SCHEMA_ID,
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "tool": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "config": serde_json::to_value(&v.config).expect("config serializes"),
        "schedule_hash": schedule_hash(&v.schedule),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

/// Per-point slope column names: `slope_l<j>` for `C^p`, `slope_psi<j>` for `D′`.
fn slope_prefix(t: Target) -> &'static str {
    match t {
        Target::Cp(_) => "slope_l",
        Target::Dprime => "slope_psi",
    }
}

pub fn spectrum_report(v: &Validated, s: &Spectrum) -> Value {
    let points: Vec<Value> = s
        .points
        .iter()
        .map(|(x, f)| {
            json!({
                "x": x,
                "R": f.r,
                "endpoint": f.endpoint.as_str(),
                "classification": f.classification.as_str(),
                "residual": f.residual,
                "radius": f.radius,
                "per_order_slopes": f.per_order_slopes.iter().map(|(j, sl)| json!({"index": j, "slope": sl})).collect::<Vec<_>>(),
            })
        })
        .collect();
    let proj = s.projection();
    let extent = if proj.is_empty() {
        Value::Null
    } else {
        let d = proj[0].len();
        let lo: Vec<f64> = (0..d).map(|i| proj.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min)).collect();
        let hi: Vec<f64> = (0..d).map(|i| proj.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        json!({ "lo": lo, "hi": hi })
    };
    let inconclusive = s
        .points
        .iter()
        .filter(|(_, f)| f.endpoint == crate::asymptotics::Endpoint::Inconclusive)
        .count();
    merge(
        header("spectrum", v),
        json!({
            "points": points,
            "summary": {
                "grid_points": s.points.len(),
                "nonempty_points": proj.len(),
                "inconclusive_points": inconclusive,
                "singular_support_extent": extent,
                "max_R": s.max_r(),
            },
        }),
    )
}

fn fit_json(f: &OrderFit) -> Value {
    json!({
        "slope": f.slope,
        "residual": f.residual,
        "log_power": f.log_power,
        "classification": f.classification.as_str(),
    })
}

/// `v_{K,l}` is the fitted slope; `clamped` is `ν_{K,l} = max(v_{K,l}, 0)`.
pub fn valuation_report(v: &Validated, l: usize, fit: &OrderFit) -> Value {
    merge(
        header("valuation", v),
        json!({ "valuation": { "l": l, "value": fit.slope, "clamped": fit.slope.max(0.0), "fit": fit_json(fit) } }),
    )
}

pub fn classify_report(v: &Validated, r: &RegularityReport) -> Value {
    let m = match r.class {
        Regularity::GInfinity { m } => Some(m),
        _ => None,
    };
    merge(
        header("classify", v),
        json!({ "regularity": { "class": r.class.as_str(), "m": m, "slopes": r.slopes } }),
    )
}

pub fn write_csv(path: &Path, s: &Spectrum) -> Result<()> {
    let dim = s.region.dim();
    let slopes = s.points.iter().map(|(_, f)| f.per_order_slopes.len()).max().unwrap_or(0);
    let slopes = match s.target {
        Target::Cp(p) => slopes.max(p + 1),
        Target::Dprime => slopes,
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut head: Vec<String> = ["x", "t"][..dim.min(2)].iter().map(|s| s.to_string()).collect();
    head.extend((2..dim).map(|i| format!("x{i}")));
    head.extend(["R", "endpoint", "classification", "residual"].map(String::from));
    head.extend((0..slopes).map(|j| format!("{}{j}", slope_prefix(s.target))));
    let io = |e: csv::Error| Error::Io(format!("{}: {e}", path.display()));
    w.write_record(&head).map_err(io)?;
    for (x, f) in &s.points {
        let mut row: Vec<String> = x.iter().map(|v| sci(*v)).collect();
        row.push(sci(f.r));
        row.push(f.endpoint.as_str().into());
        row.push(f.classification.as_str().into());
        row.push(sci(f.residual));
        let mut cells = vec![String::new(); slopes];
        for (j, sl) in &f.per_order_slopes {
            cells[*j] = sci(*sl);
        }
        row.extend(cells);
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
