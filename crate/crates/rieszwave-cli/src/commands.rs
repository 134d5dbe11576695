//! Pipeline execution behind the subcommands.
//!
//! Each runner consumes a validated [`RunConfig`], synthesizes through the
//! library, and writes artifacts under the output directory:
//!
//! * CSV data files (one per path/field, `.`-decimal, LF, 17 significant
//!   digits),
//! * JSON reports for the estimator commands,
//! * `manifest.json` echoing the configuration, library versions, per-stage
//!   truncation budgets, the produced file list, and the wall time.
//!
//! Replicate `i` draws from the derived seed `path_seed(master, i)`
//! (coordinate `c` of dimension replicate `r` uses counter `r·N + c`), so
//! any single artifact can be regenerated in isolation.  Thread counts only
//! partition grids; all bytes are invariant under `--threads`.

use crate::config::{CommandKind, RunConfig};
use rieszwave::analysis::{box_dimension, dimension_bounds, holder_estimate};
use rieszwave::io::{format_sig, Manifest, StageBudget};
use rieszwave::meyer::filter_pair;
use rieszwave::potential::TableStore;
use rieszwave::rng::path_seed;
use rieszwave::synth::{PathSample, Synthesizer, TruncationSpec};
use rieszwave::{derive_params, Error, FilterPair, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// What a completed run produced, for the final console line.
#[derive(Debug)]
pub struct RunSummary {
    /// Output directory holding every artifact.
    pub out_dir: PathBuf,
    /// File names written, in creation order (manifest last).
    pub outputs: Vec<String>,
}

/// Filter tolerance used by every pipeline.
const FILTER_TOL: f64 = 1e-10;

/// Box-counting scale range used by the dimension pipeline.
const BOX_SCALES: (u32, u32) = (2, 10);

/// Execute a validated configuration end to end.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let started = Instant::now();
    std::fs::create_dir_all(&cfg.out)?;
    let mut manifest = Manifest::new(
        cfg.command.name(),
        serde_json::to_value(cfg).map_err(|e| Error::Format(e.to_string()))?,
        cfg.seed,
    );

    match cfg.command {
        CommandKind::Synth => run_synth(cfg, &mut manifest)?,
        CommandKind::Field => run_field(cfg, &mut manifest)?,
        CommandKind::Analyze => run_analyze(cfg, &mut manifest)?,
        CommandKind::Dimension => run_dimension(cfg, &mut manifest)?,
    }

    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    manifest.stamp(unix, started.elapsed().as_millis() as u64);
    let mut outputs = manifest.outputs.clone();
    write_json_artifact(&cfg.out, "manifest.json", |w| manifest.write(w))?;
    outputs.push("manifest.json".to_string());
    Ok(RunSummary {
        out_dir: cfg.out.clone(),
        outputs,
    })
}

/// The truncation window requested by the configuration.
fn spec_of(cfg: &RunConfig) -> TruncationSpec<f64> {
    TruncationSpec {
        j_min: cfg.j_min,
        j_max: cfg.j_max,
        k_halfwidth: cfg.k_halfwidth,
        tail_budget: cfg.tail_budget,
    }
}

/// Build a synthesizer for one Hurst index under the run's chaos order.
fn synthesizer_for(
    cfg: &RunConfig,
    hurst: f64,
    filters: &Arc<FilterPair<f64>>,
    store: &Arc<TableStore<f64>>,
) -> Result<Synthesizer<f64>> {
    let params = derive_params(hurst, cfg.d, !cfg.raw)?;
    Synthesizer::new(params, Arc::clone(filters), Arc::clone(store))
}

fn shared_backend() -> Result<(Arc<FilterPair<f64>>, Arc<TableStore<f64>>)> {
    Ok((
        Arc::new(filter_pair(FILTER_TOL)?),
        Arc::new(TableStore::new()),
    ))
}

/// Write one artifact through a buffered writer, recording nothing itself.
fn write_artifact<F>(dir: &Path, name: &str, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Write a JSON artifact (pretty, trailing newline).
fn write_json_artifact<F>(dir: &Path, name: &str, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    write_artifact(dir, name, body)
}

/// Serialize any report as pretty JSON with a trailing newline.
fn write_report<T: Serialize, W: Write>(w: &mut W, report: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, report).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Sample a diagonal path honoring the configured horizon.
fn sample_cfg_path(
    cfg: &RunConfig,
    synth: &Synthesizer<f64>,
    seed: u64,
    spec: &TruncationSpec<f64>,
) -> Result<PathSample<f64>> {
    if cfg.t_max > 1.0 {
        synth.sample_high_diagonal(seed, spec, cfg.n, cfg.t_max, cfg.threads)
    } else {
        synth.sample_path(seed, spec, cfg.n, cfg.threads)
    }
}

fn run_synth(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let (filters, store) = shared_backend()?;
    let synth = synthesizer_for(cfg, cfg.hurst, &filters, &store)?;
    let spec = spec_of(cfg);
    for i in 0..cfg.paths {
        let sample = sample_cfg_path(cfg, &synth, path_seed(cfg.seed, i as u64), &spec)?;
        let name = format!("path-{i:04}.csv");
        write_artifact(&cfg.out, &name, |w| rieszwave::io::write_path_csv(w, &sample))?;
        manifest.push_budget(StageBudget::from_report(format!("path-{i:04}"), &sample.report));
        manifest.push_output(name);
    }
    Ok(())
}

fn run_field(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let (filters, store) = shared_backend()?;
    let synth = synthesizer_for(cfg, cfg.hurst, &filters, &store)?;
    let spec = spec_of(cfg);
    for i in 0..cfg.paths {
        let sample = synth.sample_field(path_seed(cfg.seed, i as u64), &spec, cfg.n_axis, cfg.threads)?;
        let name = format!("field-{i:04}.csv");
        write_artifact(&cfg.out, &name, |w| rieszwave::io::write_field_csv(w, &sample))?;
        manifest.push_budget(StageBudget::from_report(format!("field-{i:04}"), &sample.report));
        manifest.push_output(name);
    }
    Ok(())
}

/// Per-path record emitted by the analyze pipeline.
#[derive(Debug, Serialize)]
struct AnalysisRecord {
    /// Replicate number under the master seed.
    replicate: u32,
    /// Derived per-path seed actually used.
    seed: u64,
    hurst: f64,
    chaos_order: usize,
    n_steps: usize,
    t_max: f64,
    /// Pointwise/global regularity summary.
    regularity: rieszwave::analysis::RegularityReport<f64>,
    /// Plain (uncorrected) increment supremum over the same grid.
    plain_sup: f64,
    /// Law-of-iterated-logarithm growth statistic; only defined once the
    /// horizon reaches 16.
    growth: Option<f64>,
}

fn run_analyze(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let (filters, store) = shared_backend()?;
    let synth = synthesizer_for(cfg, cfg.hurst, &filters, &store)?;
    let spec = spec_of(cfg);
    let mut summary = String::from(
        "replicate,seed,global_exponent,modulus_sup,modulus_stable,plain_sup,growth\n",
    );
    for i in 0..cfg.paths {
        let seed = path_seed(cfg.seed, i as u64);
        let sample = sample_cfg_path(cfg, &synth, seed, &spec)?;
        let regularity = holder_estimate(&sample, (cfg.m_lo, cfg.m_hi))?;
        let plain_sup = rieszwave::analysis::modulus_statistic_with_exponent(
            &sample.times,
            &sample.total,
            cfg.hurst,
            cfg.b,
            0.0,
        )?;
        let growth = if cfg.t_max >= 16.0 {
            Some(rieszwave::analysis::growth_statistic(&sample, cfg.c)?)
        } else {
            None
        };
        let record = AnalysisRecord {
            replicate: i,
            seed,
            hurst: cfg.hurst,
            chaos_order: cfg.d,
            n_steps: cfg.n,
            t_max: cfg.t_max,
            regularity,
            plain_sup,
            growth,
        };
        summary.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i,
            seed,
            format_sig(record.regularity.global_exponent),
            format_sig(record.regularity.modulus_sup),
            record.regularity.modulus_stable,
            format_sig(plain_sup),
            growth.map(format_sig).unwrap_or_default(),
        ));
        let name = format!("analysis-{i:04}.json");
        write_json_artifact(&cfg.out, &name, |w| write_report(w, &record))?;
        manifest.push_budget(StageBudget::from_report(format!("path-{i:04}"), &sample.report));
        manifest.push_output(name);
    }
    write_artifact(&cfg.out, "summary.csv", |w| {
        w.write_all(summary.as_bytes())?;
        Ok(())
    })?;
    manifest.push_output("summary.csv".to_string());
    Ok(())
}

/// Mean and `1.96·sd/√n` half-width of replicate estimates; with a single
/// replicate, fall back to that fit's own half-width.
fn pool(estimates: &[(f64, f64)]) -> (f64, f64) {
    let n = estimates.len();
    let mean = estimates.iter().map(|e| e.0).sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, estimates[0].1);
    }
    let var = estimates
        .iter()
        .map(|e| (e.0 - mean).powi(2))
        .sum::<f64>()
        / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

fn run_dimension(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let mut h_vec = cfg.hvec.clone();
    h_vec.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut report = dimension_bounds(&h_vec, cfg.d, cfg.dim_e)?;

    let (filters, store) = shared_backend()?;
    let spec = spec_of(cfg);
    let n_coords = h_vec.len();
    let synths: Vec<Synthesizer<f64>> = h_vec
        .iter()
        .map(|&h| synthesizer_for(cfg, h, &filters, &store))
        .collect::<Result<_>>()?;

    let n_pts = cfg.n;
    let mut range_fits = Vec::new();
    let mut graph_fits = Vec::new();
    for rep in 0..cfg.paths {
        let mut coords: Vec<Vec<f64>> = Vec::with_capacity(n_coords);
        for (ci, synth) in synths.iter().enumerate() {
            let seed = path_seed(cfg.seed, (rep as u64) * n_coords as u64 + ci as u64);
            let sample = synth.sample_path(seed, &spec, n_pts, cfg.threads)?;
            manifest.push_budget(StageBudget::from_report(
                format!("rep-{rep:02}-coord-{ci}"),
                &sample.report,
            ));
            coords.push(sample.total);
        }
        let times: Vec<f64> = (0..=n_pts).map(|i| i as f64 / n_pts as f64).collect();

        let mut range_pts = Vec::with_capacity((n_pts + 1) * n_coords);
        let mut graph_pts = Vec::with_capacity((n_pts + 1) * (n_coords + 1));
        for i in 0..=n_pts {
            graph_pts.push(times[i]);
            for c in &coords {
                range_pts.push(c[i]);
                graph_pts.push(c[i]);
            }
        }
        let rf = box_dimension(&range_pts, n_coords, BOX_SCALES)?;
        let gf = box_dimension(&graph_pts, n_coords + 1, BOX_SCALES)?;
        if rep == 0 {
            report.est_windows = [Some(rf.window), Some(gf.window)];
        }
        range_fits.push((rf.estimate, rf.ci));
        graph_fits.push((gf.estimate, gf.ci));
    }
    report.est_range = Some(pool(&range_fits));
    report.est_graph = Some(pool(&graph_fits));

    write_json_artifact(&cfg.out, "dimension.json", |w| write_report(w, &report))?;
    manifest.push_output("dimension.json".to_string());

    let (er, eci) = report.est_range.unwrap();
    let (eg, gci) = report.est_graph.unwrap();
    let summary = format!(
        "lower_range,upper_range,lower_graph,upper_graph,est_range,est_range_ci,est_graph,est_graph_ci\n{},{},{},{},{},{},{},{}\n",
        format_sig(report.lower_range),
        format_sig(report.upper_range),
        format_sig(report.lower_graph),
        format_sig(report.upper_graph),
        format_sig(er),
        format_sig(eci),
        format_sig(eg),
        format_sig(gci),
    );
    write_artifact(&cfg.out, "summary.csv", |w| {
        w.write_all(summary.as_bytes())?;
        Ok(())
    })?;
    manifest.push_output("summary.csv".to_string());
    Ok(())
}
