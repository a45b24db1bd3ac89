//! Dataset assembly and CSV/JSON serialization.
//!
//! Every file starts with a '#'-prefixed comment block recording the
//! resolved parameter set and the regime-report summary; no timestamps, so
//! output is byte-identical for identical configuration.

use std::io::Write;
use std::path::{Path, PathBuf};

use eit_core::params::{check_regime, CouplingSpec, MediumSpec, ModelParams};

use crate::config::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    /// Header comment lines (without the leading '#').
    pub meta: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn non_finite_cells(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .filter(|x| !x.is_finite())
            .count()
    }
}

/// Meta lines describing the fully resolved parameter set and the regime
/// report.
pub fn meta_block(params: &ModelParams) -> Vec<String> {
    let mut lines = vec![format!(
        "eitpol {} dataset (units: gamma = 1, v_T = 1)",
        env!("CARGO_PKG_VERSION")
    )];
    lines.push(format!(
        "gamma_cb = {:.16e}, omega_rabi = {:.16e}, delta_d = {:.16e}, doppler = {:.16e}, c_over_vt = {:.16e}",
        params.atom.gamma_cb,
        params.drive.omega_rabi,
        params.drive.delta_d,
        params.drive.doppler,
        params.drive.c_over_vt
    ));
    match params.atom.coupling {
        CouplingSpec::CouplingG(g) => lines.push(format!("coupling_g = {g:.16e}")),
        CouplingSpec::DensityRatio(nu) => lines.push(format!("density_ratio = {nu:.16e}")),
    }
    match params.medium {
        MediumSpec::Beam { v } => lines.push(format!("medium = beam, beam_velocity = {v:.16e}")),
        MediumSpec::HotGas { dist } => {
            lines.push(format!("medium = hot, distribution = {dist:?}"))
        }
    }
    if let Ok(d) = params.derive() {
        lines.push(format!(
            "derived: coupling_g = {:.16e}, density_ratio = {:.16e}, G = {:.16e}, v_d = {:.16e}",
            d.coupling_g, d.density_ratio, d.big_g, d.v_d
        ));
        lines.push(format!(
            "derived: vg_tilde = {:.16e}, vg_tilde_prime = {:.16e}, gamma_k = {:.16e}, dk_eit_prime = {:.16e}",
            d.vg_tilde, d.vg_tilde_prime, d.gamma_k, d.dk_eit_prime
        ));
    }
    match check_regime(params) {
        Ok(report) => {
            for c in &report.conditions {
                lines.push(format!(
                    "regime: {} [{}] (left = {:.6e}, right = {:.6e})",
                    c.name,
                    if c.satisfied { "ok" } else { "VIOLATED" },
                    c.left,
                    c.right
                ));
            }
        }
        Err(e) => lines.push(format!("regime: report unavailable ({e})")),
    }
    lines
}

fn render_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    for line in &ds.meta {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&ds.columns.join(","));
    out.push('\n');
    for row in &ds.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|x| {
                if x.is_finite() {
                    format!("{x:.16e}")
                } else if x.is_nan() {
                    "NaN".to_string()
                } else if *x > 0.0 {
                    "inf".to_string()
                } else {
                    "-inf".to_string()
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render_json(ds: &Dataset) -> String {
    let rows: Vec<Vec<serde_json::Value>> = ds
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    if x.is_finite() {
                        serde_json::json!(x)
                    } else if x.is_nan() {
                        serde_json::Value::String("NaN".into())
                    } else if *x > 0.0 {
                        serde_json::Value::String("inf".into())
                    } else {
                        serde_json::Value::String("-inf".into())
                    }
                })
                .collect()
        })
        .collect();
    let doc = serde_json::json!({
        "meta": ds.meta,
        "columns": ds.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("static document serializes");
    s.push('\n');
    s
}

pub fn render(ds: &Dataset, format: Format) -> String {
    match format {
        Format::Csv => render_csv(ds),
        Format::Json => render_json(ds),
    }
}

/// Write one dataset to `out` (or stdout when None); returns the count of
/// non-finite cells for the exit summary.
pub fn emit(ds: &Dataset, out: Option<&Path>, format: Format) -> CliResult<usize> {
    let text = render(ds, format);
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    Ok(ds.non_finite_cells())
}

/// Derive a suffixed path: foo.csv + "omega" -> foo_omega.csv.
pub fn suffixed_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().into_owned());
    let name = match ext {
        Some(e) => format!("{stem}_{suffix}.{e}"),
        None => format!("{stem}_{suffix}"),
    };
    base.with_file_name(name)
}
