//! CSV and JSON rendering of sweep results.
//!
//! CSV starts with a `#schema=` line followed by a fixed header. Floats use
//! the shortest representation that round-trips; undefined values are the
//! literal `nan`. Summaries follow the data as `#`-prefixed lines. JSON
//! carries the same content with `null` for undefined values.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::sweep::{EngineComparison, GammaSummary, OutputFormat, SweepConfig, SweepOutput, SweepRow, ThetaScanRow};

pub const SWEEP_SCHEMA: &str = "oat-sweep/1";
pub const THETA_SCHEMA: &str = "oat-theta-scan/1";

pub const SWEEP_HEADER: [&str; 15] = [
    "tau", "theta0", "phi0", "gamma", "engine", "xi_k2", "xi_w2", "chi2", "f_max", "v_plus", "v_minus", "n_opt_x",
    "n_opt_y", "n_opt_z", "degenerate",
];

pub const THETA_HEADER: [&str; 11] = [
    "theta0",
    "engine",
    "tau_min_closed",
    "xi_k2_at_closed",
    "tau_min",
    "xi_k2_min",
    "xi_w2_min",
    "tau_plateau",
    "chi2_plateau",
    "tau_window_start",
    "chi2_window_start",
];

/// Shortest round-trip decimal, `nan` for anything non-finite or missing.
pub fn format_float(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:?}"),
        _ => "nan".to_string(),
    }
}

fn f(x: f64) -> String {
    format_float(Some(x))
}

fn sweep_line(r: &SweepRow) -> String {
    [
        f(r.tau),
        f(r.theta0),
        f(r.phi0),
        f(r.gamma),
        r.engine.tag().to_string(),
        f(r.xi_k2),
        format_float(r.xi_w2),
        f(r.chi2),
        f(r.f_max),
        f(r.v_plus),
        f(r.v_minus),
        f(r.n_opt_x),
        f(r.n_opt_y),
        f(r.n_opt_z),
        r.degenerate.to_string(),
    ]
    .join(",")
}

fn theta_line(r: &ThetaScanRow) -> String {
    [
        f(r.theta0),
        r.engine.tag().to_string(),
        f(r.tau_min_closed),
        f(r.xi_k2_at_closed),
        f(r.tau_min),
        f(r.xi_k2_min),
        format_float(r.xi_w2_min),
        f(r.tau_plateau),
        f(r.chi2_plateau),
        f(r.tau_window_start),
        f(r.chi2_window_start),
    ]
    .join(",")
}

fn comparison_line(c: &EngineComparison) -> String {
    format!(
        "#engine-comparison,rows={},max_abs_diff={},max_rel_diff={}\n",
        c.rows_compared,
        f(c.max_abs_diff),
        f(c.max_rel_diff)
    )
}

fn gamma_line(s: &GammaSummary) -> String {
    format!(
        "#gamma-summary,gamma={},engine={},xi_k2_min={},tau_at_min={},squeeze_start_tau={},squeeze_end_tau={},plateau_arrival_tau={}\n",
        f(s.gamma),
        s.engine.tag(),
        f(s.xi_k2_min),
        f(s.tau_at_min),
        format_float(s.squeeze_start_tau),
        format_float(s.squeeze_end_tau),
        format_float(s.plateau_arrival_tau),
    )
}

pub fn render_csv(output: &SweepOutput) -> String {
    let mut out = String::new();
    let (schema, header): (&str, &[&str]) = match output {
        SweepOutput::ThetaScan { .. } => (THETA_SCHEMA, &THETA_HEADER),
        _ => (SWEEP_SCHEMA, &SWEEP_HEADER),
    };
    let _ = writeln!(out, "#schema={schema}");
    let _ = writeln!(out, "{}", header.join(","));
    match output {
        SweepOutput::Dynamics { rows, .. } | SweepOutput::GammaScan { rows, .. } => {
            for r in rows {
                let _ = writeln!(out, "{}", sweep_line(r));
            }
        }
        SweepOutput::ThetaScan { rows, .. } => {
            for r in rows {
                let _ = writeln!(out, "{}", theta_line(r));
            }
        }
    }
    if let SweepOutput::GammaScan { summaries, .. } = output {
        for s in summaries {
            out.push_str(&gamma_line(s));
        }
    }
    if let Some(c) = output.comparison() {
        out.push_str(&comparison_line(c));
    }
    out
}

pub fn render_json(output: &SweepOutput, config: &SweepConfig) -> Result<String> {
    let to_value = |v: serde_json::Result<Value>| v.map_err(|e| Error::InvalidConfig(format!("serialization: {e}")));
    let (schema, rows) = match output {
        SweepOutput::Dynamics { rows, .. } | SweepOutput::GammaScan { rows, .. } => {
            (SWEEP_SCHEMA, to_value(serde_json::to_value(rows))?)
        }
        SweepOutput::ThetaScan { rows, .. } => (THETA_SCHEMA, to_value(serde_json::to_value(rows))?),
    };
    let gamma = match output {
        SweepOutput::GammaScan { summaries, .. } => to_value(serde_json::to_value(summaries))?,
        _ => Value::Null,
    };
    let doc = json!({
        "schema_version": schema,
        "kind": config.scan_variable.tag(),
        "config": to_value(serde_json::to_value(config))?,
        "rows": rows,
        "summary": {
            "engine_comparison": to_value(serde_json::to_value(output.comparison()))?,
            "gamma": gamma,
        },
    });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidConfig(format!("serialization: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn render(output: &SweepOutput, config: &SweepConfig, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(render_csv(output)),
        OutputFormat::Json => render_json(output, config),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run_sweep, EngineChoice, ScanVariable, TauGrid};

    fn config(scan: ScanVariable) -> SweepConfig {
        let mut c = SweepConfig::defaults(scan, 6);
        c.tau_grid = TauGrid::linear(0.0, PI_HALF, 5);
        c.theta_grid = vec![1.0, 1.5];
        c.gamma_list = vec![0.0, 0.1];
        c
    }

    const PI_HALF: f64 = std::f64::consts::FRAC_PI_2;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456789.123, -2.5e-7] {
            assert_eq!(f(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(None), "nan");
        assert_eq!(format_float(Some(f64::NAN)), "nan");
    }

    #[test]
    fn csv_layout() {
        let c = config(ScanVariable::Time);
        let text = render_csv(&run_sweep(&c).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "#schema=oat-sweep/1");
        assert_eq!(lines[1], SWEEP_HEADER.join(","));
        assert_eq!(lines.len(), 7);
        assert!(lines[2..].iter().all(|l| l.split(',').count() == 15));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn degenerate_rows_use_nan_and_null() {
        // N = 6 at tau = pi/2 has no mean spin
        let c = config(ScanVariable::Time);
        let out = run_sweep(&c).unwrap();
        let csv = render_csv(&out);
        let last = csv.lines().last().unwrap();
        assert!(last.split(',').nth(6) == Some("nan"), "{last}");
        assert!(last.ends_with("true"));
        let v: Value = serde_json::from_str(&render_json(&out, &c).unwrap()).unwrap();
        assert!(v["rows"][4]["xi_w2"].is_null());
        assert_eq!(v["rows"][4]["degenerate"], Value::Bool(true));
    }

    #[test]
    fn json_document_shape() {
        for scan in [ScanVariable::Time, ScanVariable::Theta0, ScanVariable::Gamma] {
            let mut c = config(scan);
            c.engine = EngineChoice::Both;
            let v: Value = serde_json::from_str(&render_json(&run_sweep(&c).unwrap(), &c).unwrap()).unwrap();
            assert_eq!(v["kind"], scan.tag());
            assert!(v["rows"].as_array().unwrap().len() >= 4);
            assert!(v["summary"]["engine_comparison"]["max_rel_diff"].as_f64().unwrap() < 1e-8);
            assert_eq!(v["summary"]["gamma"].is_array(), scan == ScanVariable::Gamma);
        }
    }

    #[test]
    fn gamma_csv_has_summaries() {
        let c = config(ScanVariable::Gamma);
        let text = render_csv(&run_sweep(&c).unwrap());
        assert_eq!(text.lines().filter(|l| l.starts_with("#gamma-summary")).count(), 2);
    }

    #[test]
    fn unwritable_path() {
        let err = write_text(Path::new("/nonexistent-dir/x.csv"), "x").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
