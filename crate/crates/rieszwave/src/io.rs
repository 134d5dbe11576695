//! Deterministic file output: CSV samples and the JSON run manifest.
//!
//! The output contract is bit-reproducibility: two runs with the same
//! configuration and seed must produce identical bytes.  To that end
//!
//! * CSV uses `.` as the decimal separator, LF line endings, and floats
//!   rendered by [`format_sig`] with 17 significant digits — enough to
//!   round-trip every `f64` exactly;
//! * the manifest is a [`Manifest`] serialized with a fixed field order;
//!   the single volatile field, `timestamp`, carries both the completion
//!   time and the wall-clock duration, so byte comparison after dropping
//!   that one field is exact.  JSON numbers are written unquoted.
//!
//! Sample layouts: paths are `t,low,high,total` rows (low/high being the
//! coarse and fine halves of the frequency split); one-dimensional fields
//! are `t,value` rows; two-dimensional fields are `t0,t1,value` rows in
//! row-major order.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::synth::{FieldSample, PathSample, SynthesisReport};
use serde::Serialize;
use std::io::Write;

/// Render a float with 17 significant digits (exact `f64` round-trip).
pub fn format_sig<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// Write one path as `t,low,high,total` CSV.
pub fn write_path_csv<T: Real, W: Write>(w: &mut W, path: &PathSample<T>) -> Result<()> {
    writeln!(w, "t,low,high,total").map_err(Error::from)?;
    for i in 0..path.times.len() {
        writeln!(
            w,
            "{},{},{},{}",
            format_sig(path.times[i]),
            format_sig(path.low[i]),
            format_sig(path.high[i]),
            format_sig(path.total[i]),
        )
        .map_err(Error::from)?;
    }
    Ok(())
}

/// Write one field as `t,value` (d = 1) or `t0,t1,value` (d = 2) CSV.
pub fn write_field_csv<T: Real, W: Write>(w: &mut W, field: &FieldSample<T>) -> Result<()> {
    let n_pts = field.n_axis + 1;
    if field.values.len() == n_pts {
        writeln!(w, "t,value").map_err(Error::from)?;
        for (t, v) in field.axis.iter().zip(field.values.iter()) {
            writeln!(w, "{},{}", format_sig(*t), format_sig(*v)).map_err(Error::from)?;
        }
        return Ok(());
    }
    if field.values.len() != n_pts * n_pts {
        return Err(Error::Format(
            "field value count matches neither a 1-d nor a 2-d grid".into(),
        ));
    }
    writeln!(w, "t0,t1,value").map_err(Error::from)?;
    for i0 in 0..n_pts {
        for i1 in 0..n_pts {
            writeln!(
                w,
                "{},{},{}",
                format_sig(field.axis[i0]),
                format_sig(field.axis[i1]),
                format_sig(field.values[i0 * n_pts + i1]),
            )
            .map_err(Error::from)?;
        }
    }
    Ok(())
}

/// Synthesis diagnostics of one stage, echoed into the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct StageBudget {
    /// Stage label (e.g. `"path 3"`).
    pub stage: String,
    /// Fraction of `‖h₁‖²` captured by the realized windows.
    pub coverage: f64,
    /// In-range mass discarded by the k-windows, relative to `‖h₁‖²`.
    pub window_tail_rel: f64,
    /// Estimated mass below `j_min`, relative.
    pub low_tail_rel: f64,
    /// Estimated mass above `j_max`, relative.
    pub high_tail_rel: f64,
    /// Potential-table evaluations truncated to zero.
    pub truncated_evals: u64,
    /// Coefficient shifts evaluated one-sided under the box rule.
    pub one_sided_pairs: u64,
}

impl StageBudget {
    /// Capture a synthesis report under a stage label.
    pub fn from_report<T: Real>(stage: impl Into<String>, r: &SynthesisReport<T>) -> Self {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        StageBudget {
            stage: stage.into(),
            coverage: f(r.coverage),
            window_tail_rel: f(r.window_tail_rel),
            low_tail_rel: f(r.low_tail_rel),
            high_tail_rel: f(r.high_tail_rel),
            truncated_evals: r.truncated_evals,
            one_sided_pairs: r.one_sided_pairs,
        }
    }
}

/// The single volatile manifest field: completion time and duration.
#[derive(Debug, Clone, Serialize)]
pub struct Timestamp {
    /// Completion instant, seconds since the Unix epoch.
    pub completed_unix_s: u64,
    /// Wall-clock duration of the run in milliseconds.
    pub wall_ms: u64,
}

/// Library versions baked into every manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    /// This crate.
    pub rieszwave: &'static str,
    /// Wavelet filter construction identifier.
    pub basis: &'static str,
}

/// Run manifest: everything needed to audit or reproduce a run.
///
/// All fields except `timestamp` are pure functions of the configuration
/// and seed; serializing with [`Manifest::write`] therefore yields
/// byte-identical output across reruns once `timestamp` is dropped.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    /// Subcommand that produced the artifacts.
    pub command: String,
    /// Full configuration echo.
    pub config: serde_json::Value,
    /// Master seed.
    pub seed: u64,
    /// Library versions.
    pub versions: Versions,
    /// Per-stage truncation/audit budgets.
    pub budgets: Vec<StageBudget>,
    /// Files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
    /// Volatile timing field (exempt from byte-identity).
    pub timestamp: Timestamp,
}

impl Manifest {
    /// Start a manifest for `command` with its configuration echo.
    pub fn new(command: impl Into<String>, config: serde_json::Value, seed: u64) -> Self {
        Manifest {
            command: command.into(),
            config,
            seed,
            versions: Versions {
                rieszwave: env!("CARGO_PKG_VERSION"),
                basis: crate::meyer::BASIS_VERSION,
            },
            budgets: Vec::new(),
            outputs: Vec::new(),
            timestamp: Timestamp {
                completed_unix_s: 0,
                wall_ms: 0,
            },
        }
    }

    /// Record a produced file.
    pub fn push_output(&mut self, name: impl Into<String>) {
        self.outputs.push(name.into());
    }

    /// Record a stage's synthesis diagnostics.
    pub fn push_budget(&mut self, budget: StageBudget) {
        self.budgets.push(budget);
    }

    /// Fill the volatile timing field.
    pub fn stamp(&mut self, completed_unix_s: u64, wall_ms: u64) {
        self.timestamp = Timestamp {
            completed_unix_s,
            wall_ms,
        };
    }

    /// Serialize as pretty JSON with a trailing newline.
    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Format(format!("manifest serialization failed: {e}")))?;
        w.write_all(body.as_bytes()).map_err(Error::from)?;
        w.write_all(b"\n").map_err(Error::from)?;
        Ok(())
    }
}
