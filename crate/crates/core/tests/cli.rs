//! End-to-end tests of the `microlocal` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_microlocal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare against a golden file; `UPDATE_GOLDEN=1` rewrites it instead.
fn check_golden(name: &str, actual: &[u8]) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let want = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        want == actual,
        "{} differs:\n{}",
        path.display(),
        String::from_utf8_lossy(actual)
    );
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/spectrum_report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Required keys of the shipped schema, checked recursively through the
/// parts of a report whose shape is fixed. Full validation runs in the
/// Python smoke test.
fn check_required(report: &Value, schema: &Value, defs: &Value, path: &str) {
    let schema = match schema.get("$ref").and_then(Value::as_str) {
        Some(r) => &defs[r.trim_start_matches("#/$defs/")],
        None => schema,
    };
    if let (Some(req), Some(obj)) = (schema.get("required").and_then(Value::as_array), report.as_object()) {
        for k in req {
            let k = k.as_str().unwrap();
            assert!(obj.contains_key(k), "{path}: missing required key '{k}'");
        }
    }
    if let (Some(props), Some(obj)) = (schema.get("properties").and_then(Value::as_object), report.as_object()) {
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for k in obj.keys() {
                assert!(props.contains_key(k), "{path}: unexpected key '{k}'");
            }
        }
        for (k, sub) in props {
            if let Some(v) = obj.get(k) {
                check_required(v, sub, defs, &format!("{path}.{k}"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), report.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            check_required(v, items, defs, &format!("{path}[{i}]"));
        }
    }
    if let Some(e) = schema.get("enum").and_then(Value::as_array) {
        assert!(e.contains(report), "{path}: {report} not in {e:?}");
    }
    if let Some(c) = schema.get("const") {
        assert_eq!(report, c, "{path}");
    }
}

fn conforms(report: &Value) {
    let s = schema();
    let kind = report["kind"].as_str().unwrap();
    let extra = match kind {
        "spectrum" => &["points", "summary"][..],
        "valuation" => &["valuation"],
        _ => &["regularity"],
    };
    for k in extra {
        assert!(report.get(*k).is_some(), "{kind} report without '{k}'");
    }
    check_required(report, &s, &s["$defs"], "$");
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn list_is_golden() {
    let out = run(&["list"]);
    assert!(out.status.success());
    check_golden("list.txt", &out.stdout);
    let names: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "delta_pow",
            "delta_deriv",
            "heaviside",
            "osc",
            "wave1d",
            "semilinear:dissipative",
            "semilinear:sqrt",
            "semilinear:log",
            "blowup",
            "rauch_reed",
            "classify"
        ]
    );
}

#[test]
fn delta_pow_report_is_golden_and_deterministic() {
    let a = run(&["example", "delta_pow"]);
    let b = run(&["example", "delta_pow"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "rerun changed the report");
    check_golden("delta_pow.json", &a.stdout);
    let r = stdout_json(&a);
    conforms(&r);
    assert_eq!(r["summary"]["nonempty_points"], 1);
    assert_eq!(r["summary"]["max_R"].as_f64().unwrap(), 2.0);
}

#[test]
fn every_listed_example_runs_with_defaults() {
    let out = run(&["list"]);
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let name = line.split_whitespace().next().unwrap();
        let out = run(&["example", name]);
        let r = stdout_json(&out);
        conforms(&r);
        assert_eq!(r["config"]["experiment"], name);
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = run(&[
        "spectrum",
        "--net",
        "delta_pow:m=3",
        "--target",
        "c1",
        "--box",
        "-1,1",
        "--nx",
        "21",
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&json).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    conforms(&report);
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let head = rdr.headers().unwrap().clone();
    assert_eq!(
        head.iter().collect::<Vec<_>>(),
        ["x", "R", "endpoint", "classification", "residual", "slope_l0", "slope_l1"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let points = report["points"].as_array().unwrap();
    assert_eq!(rows.len(), points.len());
    for (row, p) in rows.iter().zip(points) {
        // The CSV strings parse to exactly the numbers in the JSON.
        let num = |i: usize| row[i].parse::<f64>().unwrap();
        assert_eq!(num(0), p["x"][0].as_f64().unwrap());
        assert_eq!(num(1), p["R"].as_f64().unwrap());
        assert_eq!(&row[2], p["endpoint"].as_str().unwrap());
        assert_eq!(&row[3], p["classification"].as_str().unwrap());
        assert_eq!(num(4), p["residual"].as_f64().unwrap());
        for s in p["per_order_slopes"].as_array().unwrap() {
            let j = s["index"].as_u64().unwrap() as usize;
            assert_eq!(num(5 + j), s["slope"].as_f64().unwrap());
        }
    }
    // And every float in the JSON text is in %.6e form.
    let fx = text.lines().find(|l| l.contains("\"residual\"")).unwrap();
    assert!(fx.trim().trim_end_matches(',').ends_with(|c: char| c.is_ascii_digit()));
    assert!(fx.contains('e'), "{fx}");
}

#[test]
fn config_files_reproduce_ad_hoc_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"experiment":"adhoc","net":{"id":"heaviside"},"target":"c0",
            "region":{"lo":[-1],"hi":[1],"points":21},"schedule":{"eps_max":0.1,"rho":0.6,"n":24}}"#,
    )
    .unwrap();
    let a = stdout_json(&run(&["spectrum", "--config", cfg.to_str().unwrap()]));
    let b = stdout_json(&run(&["spectrum", "--net", "heaviside", "--box", "-1,1", "--nx", "21"]));
    assert_eq!(a["points"], b["points"]);
    assert_eq!(a["schedule_hash"], b["schedule_hash"]);
    assert_eq!(a["summary"]["nonempty_points"], 1);
}

#[test]
fn zero_net_has_an_empty_spectrum() {
    let r = stdout_json(&run(&["spectrum", "--net", "zero", "--box", "-1,1", "--nx", "21", "--target", "c2"]));
    conforms(&r);
    assert_eq!(r["summary"]["nonempty_points"], 0);
    assert!(r["summary"]["singular_support_extent"].is_null());
    for p in r["points"].as_array().unwrap() {
        assert_eq!(p["endpoint"], "empty");
    }
}

#[test]
fn valuation_and_classify_reports() {
    let v = stdout_json(&run(&["valuation", "--net", "delta_pow:m=1", "--k=-0.5,0.5", "--l", "1"]));
    conforms(&v);
    let value = v["valuation"]["value"].as_f64().unwrap();
    assert!((value - 2.0).abs() < 0.1, "{value}");
    let c = stdout_json(&run(&["classify", "--net", "eps_pow:r=1"]));
    conforms(&c);
    assert_eq!(c["regularity"]["class"], "g_infinity_with_m");
    let c = stdout_json(&run(&["classify", "--net", "heaviside"]));
    assert_eq!(c["regularity"]["class"], "neither");
}

#[test]
fn seed_is_recorded_but_does_not_change_results() {
    let a = stdout_json(&run(&["example", "heaviside", "--seed", "7"]));
    let b = stdout_json(&run(&["example", "heaviside"]));
    assert_eq!(a["config"]["seed"], 7);
    assert!(b["config"]["seed"].is_null());
    assert_eq!(a["points"], b["points"]);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["spectrum", "--net", "nope", "--box", "0,1"]), 2);
    assert_eq!(code(&["spectrum", "--net", "delta_pow:m=1.5", "--box", "0,1"]), 2);
    assert_eq!(code(&["spectrum", "--net", "delta_pow", "--box", "0,1", "--rho", "2"]), 2);
    assert_eq!(code(&["spectrum", "--config", "/nonexistent/config.json"]), 2);
    assert_eq!(code(&["example", "delta_pow", "--param", "q=1"]), 2);
    // Neighborhoods leaving the solution's time range are a numerical failure.
    assert_eq!(code(&["spectrum", "--net", "blowup", "--box", "-0.5,0.5,1.5,2.0", "--nx", "9"]), 3);
    assert_eq!(code(&["example", "heaviside", "--out", "/nonexistent/dir/r.json"]), 1);
}
