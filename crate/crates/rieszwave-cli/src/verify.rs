//! The end-to-end verification battery behind `verify-all`.
//!
//! Ten numbered criteria check the synthesized process against its closed
//! forms and oracles: Gaussian equivalence at chaos order 1, exact second
//! moments and Parseval mass, the chaos covariance combinatorics, pointwise
//! regularity, the necessity of the log-corrected modulus, the small-ball
//! bound, dual coefficient recovery, dimension bounds and box-counting
//! estimates, and byte determinism.  Each criterion returns a structured
//! [`CriterionOutcome`]; the binary prints one pass/fail line per criterion
//! and the `acceptance` integration test asserts each one.
//!
//! Everything here is seeded with fixed constants, so a pass/fail verdict is
//! reproducible bit for bit.  [`Mode::Quick`] shrinks only the Monte-Carlo
//! ensembles (widening the entrywise gate where the replicate count drops);
//! grid sizes and tolerances that define a criterion stay untouched.

use rieszwave::analysis::{
    box_dimension, dimension_bounds, dual_recover, dual_tables, holder_estimate,
    modulus_stability, modulus_statistic_with_exponent, small_ball_report,
};
use rieszwave::chaos::{chaos_cov, chaos_value, CascadeSampler, LevelRequest, Window};
use rieszwave::fbm::{fbm_cov, FbmSampler};
use rieszwave::meyer::filter_pair;
use rieszwave::potential::TableStore;
use rieszwave::rng::path_seed;
use rieszwave::synth::{PathSample, SynthesisReport, Synthesizer, TruncationSpec};
use rieszwave::{derive_params, FilterPair, Result, WaveletIndex};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

/// Ensemble sizing of the battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Reduced Monte-Carlo ensembles for a fast smoke signal.
    Quick,
    /// Full ensembles at the documented acceptance sizes.
    Full,
}

/// Verdict and human-readable evidence for one criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    /// Criterion number, 1-based.
    pub id: u8,
    /// Short kebab-case name.
    pub name: &'static str,
    /// Whether every assertion of the criterion held.
    pub pass: bool,
    /// Worst observed statistics, for the console line.
    pub detail: String,
}

impl CriterionOutcome {
    fn new(id: u8, name: &'static str, pass: bool, detail: String) -> Self {
        CriterionOutcome { id, name, pass, detail }
    }
}

/// Run the whole battery in order; library errors become failed outcomes.
pub fn run_all(mode: Mode) -> Vec<CriterionOutcome> {
    type Crit = fn(Mode) -> Result<CriterionOutcome>;
    let table: [(u8, &'static str, Crit); 10] = [
        (1, "fbm-equivalence", criterion_01_fbm_equivalence),
        (2, "second-moment", criterion_02_second_moment),
        (3, "parseval-truncation", criterion_03_parseval_truncation),
        (4, "chaos-covariance", criterion_04_chaos_covariance),
        (5, "pointwise-hoelder", criterion_05_pointwise_hoelder),
        (6, "log-modulus", criterion_06_log_modulus),
        (7, "small-ball", criterion_07_small_ball),
        (8, "dual-recovery", criterion_08_dual_recovery),
        (9, "dimension-bounds", criterion_09_dimension_bounds),
        (10, "determinism", criterion_10_determinism),
    ];
    table
        .iter()
        .map(|&(id, name, f)| match f(mode) {
            Ok(o) => o,
            Err(e) => CriterionOutcome::new(id, name, false, format!("error: {e}")),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Shared fixtures
// ---------------------------------------------------------------------------

fn backend() -> (Arc<FilterPair<f64>>, Arc<TableStore<f64>>) {
    static B: OnceLock<(Arc<FilterPair<f64>>, Arc<TableStore<f64>>)> = OnceLock::new();
    let (f, s) = B.get_or_init(|| {
        (
            Arc::new(filter_pair(1e-10).expect("filter construction")),
            Arc::new(TableStore::new()),
        )
    });
    (Arc::clone(f), Arc::clone(s))
}

fn synth_for(d: usize, hurst: f64) -> Result<Synthesizer<f64>> {
    let (filters, store) = backend();
    Synthesizer::new(derive_params(hurst, d, true)?, filters, store)
}

/// Truncation of the shared fine paths: deep negative levels for the
/// low-frequency mass, high `j_max` so oscillation windows down to `2^-10`
/// see genuine detail.
fn fine_spec() -> TruncationSpec<f64> {
    TruncationSpec {
        j_min: -20,
        j_max: 16,
        k_halfwidth: 24,
        tail_budget: 1e-3,
    }
}

/// Shared `d = 2`, `H = 0.7` path with `2^14` steps (criteria 5 and 6).
fn shared_d2_path() -> Result<Arc<PathSample<f64>>> {
    static P: OnceLock<std::result::Result<Arc<PathSample<f64>>, String>> = OnceLock::new();
    P.get_or_init(|| {
        let synth = synth_for(2, 0.7).map_err(|e| e.to_string())?;
        synth
            .sample_path(SEED_C5_D2, &fine_spec(), 1 << 14, 1)
            .map(Arc::new)
            .map_err(|e| e.to_string())
    })
    .clone()
    .map_err(rieszwave::Error::Format)
}

// Fixed master seeds, one namespace per criterion.
const SEED_C1: u64 = 6101;
const SEED_C1_REF: u64 = 6102;
const SEED_C2: u64 = 6201;
const SEED_C4_D2: u64 = 6401;
const SEED_C4_D3: u64 = 6402;
const SEED_C5_D2: u64 = 5601;
const SEED_C5_D1: u64 = 6502;
const SEED_C5_FBM: u64 = 6503;
const SEED_C7: u64 = 6701;
const SEED_C8_D1: u64 = 6801;
const SEED_C8_D2: u64 = 6802;
const SEED_C9: u64 = 6901;
const SEED_C10: u64 = 4242;

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F̂_a - F̂_b|`.
fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usizeusize_zero(), 0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Least-squares slope of `y` against `x`.
fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// 1: at chaos order 1 the synthesized process matches fractional Brownian
/// motion — covariance at ten `(s, t)` pairs within 3 Monte-Carlo standard
/// errors, and the mid-scale increment marginal passes a two-sample KS test
/// against the exact-covariance reference sampler at the 1% level.
pub fn criterion_01_fbm_equivalence(mode: Mode) -> Result<CriterionOutcome> {
    let started = Instant::now();
    let m = match mode {
        Mode::Full => 2000,
        Mode::Quick => 300,
    };
    let n = 1024usize;
    let pairs: [(f64, f64); 10] = [
        (0.125, 0.25),
        (0.25, 0.5),
        (0.5, 0.75),
        (0.75, 1.0),
        (0.25, 1.0),
        (0.5, 1.0),
        (0.125, 0.625),
        (0.375, 0.875),
        (0.625, 0.875),
        (1.0, 1.0),
    ];
    let spec = TruncationSpec::default();
    let mut worst_z = 0f64;
    let mut worst_ks = 0f64;
    let mut ks_crit = f64::INFINITY;
    let mut pass = true;
    for &h in &[0.6, 0.75] {
        let synth = synth_for(1, h)?;
        let at = |t: f64| (t * n as f64).round() as usize;
        let mut prods: Vec<Vec<f64>> = vec![Vec::with_capacity(m); pairs.len()];
        let mut incs = Vec::with_capacity(m);
        let scale = 0.5f64.powf(h);
        for i in 0..m {
            let p = synth.sample_path(path_seed(SEED_C1, i as u64), &spec, n, 1)?;
            for (pi, &(s, t)) in pairs.iter().enumerate() {
                prods[pi].push(p.total[at(s)] * p.total[at(t)]);
            }
            incs.push((p.total[at(1.0)] - p.total[at(0.5)]) / scale);
        }
        for (pi, &(s, t)) in pairs.iter().enumerate() {
            let (mean, sd) = mean_sd(&prods[pi]);
            let se = sd / (m as f64).sqrt();
            let z = (mean - fbm_cov(h, s, t)).abs() / se;
            worst_z = worst_z.max(z);
            pass &= z <= 3.0;
        }
        let reference = FbmSampler::new(h, 2)?;
        let m_ref = 2 * m;
        let mut ref_incs = Vec::with_capacity(m_ref);
        for i in 0..m_ref {
            let rp = reference.sample_path(path_seed(SEED_C1_REF, i as u64));
            ref_incs.push((rp[2] - rp[1]) / scale);
        }
        let d_stat = two_sample_ks(&incs, &ref_incs);
        ks_crit = 1.628 * (((m + m_ref) as f64) / ((m * m_ref) as f64)).sqrt();
        worst_ks = worst_ks.max(d_stat);
        pass &= d_stat <= ks_crit;
    }
    let secs = started.elapsed().as_secs_f64();
    pass &= secs < 600.0;
    Ok(CriterionOutcome::new(
        1,
        "fbm-equivalence",
        pass,
        format!(
            "{m} paths/H: cov max |z| {worst_z:.2} (<=3), KS max D {worst_ks:.4} \
             (<= {ks_crit:.4}), {secs:.1} s"
        ),
    ))
}

/// 2: the windowed coefficient-covariance quadratic form reproduces
/// `E[X_t²] = t^{2H}` within 0.5% at three times for `d = 2`, `H = 0.7`,
/// and the Monte-Carlo second moment agrees within 3σ.
pub fn criterion_02_second_moment(mode: Mode) -> Result<CriterionOutcome> {
    let m = match mode {
        Mode::Full => 2000,
        Mode::Quick => 400,
    };
    let synth = synth_for(2, 0.7)?;
    let spec = TruncationSpec::default();
    let times = [0.25f64, 0.5, 1.0];
    let mut pass = true;
    let mut worst_rel = 0f64;
    for &t in &times {
        let analytic = synth.second_moment_windowed(t, &spec)?;
        let target = t.powf(1.4);
        let rel = (analytic - target).abs() / target;
        worst_rel = worst_rel.max(rel);
        pass &= rel <= 0.005;
    }
    // Monte-Carlo on the 4-step grid t ∈ {0.25, 0.5, 0.75, 1}.
    let mut squares: [Vec<f64>; 3] = [
        Vec::with_capacity(m),
        Vec::with_capacity(m),
        Vec::with_capacity(m),
    ];
    for i in 0..m {
        let p = synth.sample_path(path_seed(SEED_C2, i as u64), &spec, 4, 1)?;
        for (k, &gi) in [1usize, 2, 4].iter().enumerate() {
            squares[k].push(p.total[gi] * p.total[gi]);
        }
    }
    let mut worst_z = 0f64;
    for (k, &t) in times.iter().enumerate() {
        let (mean, sd) = mean_sd(&squares[k]);
        let se = sd / (m as f64).sqrt();
        let z = (mean - t.powf(1.4)).abs() / se;
        worst_z = worst_z.max(z);
        pass &= z <= 3.0;
    }
    Ok(CriterionOutcome::new(
        2,
        "second-moment",
        pass,
        format!(
            "analytic max rel {worst_rel:.2e} (<=5e-3); MC {m} paths max |z| \
             {worst_z:.2} (<=3)"
        ),
    ))
}

/// 3: the Parseval sum over the default truncation reaches the frozen
/// quadrature value of `‖h₁‖²` within 1% for `d ∈ {1, 2}`.
pub fn criterion_03_parseval_truncation(_mode: Mode) -> Result<CriterionOutcome> {
    // Frozen spectral-quadrature values of ‖h₁‖² (independently computed and
    // pinned in the kernel-norm unit tests).
    let cases = [(1usize, 0.6, 0.954_310_988_531_844_47), (2, 0.7, 0.460_796_181_349_183_27)];
    let spec = TruncationSpec::default();
    let mut pass = true;
    let mut detail = String::new();
    for (d, h, norm) in cases {
        let synth = synth_for(d, h)?;
        let sum = synth.parseval_window_sum(1.0, &spec)?;
        let rel = (sum - norm).abs() / norm;
        pass &= rel <= 0.01;
        detail.push_str(&format!("d={d}: rel {rel:.2e} (<=1e-2); "));
    }
    Ok(CriterionOutcome::new(3, "parseval-truncation", pass, detail))
}

/// The 20 basis indices used by criterion 4 at chaos order `d`.
fn c4_indices(d: usize) -> Vec<WaveletIndex> {
    let mut out = Vec::with_capacity(20);
    for j in 0..=3i32 {
        match d {
            2 => {
                for k0 in [-2i64, 1, 4] {
                    out.push(WaveletIndex::new(j, vec![k0, k0 + 1], vec![1, 1]).unwrap());
                }
                out.push(WaveletIndex::new(j, vec![0, 0], vec![0, 1]).unwrap());
                out.push(WaveletIndex::new(j, vec![2, 2], vec![1, 1]).unwrap());
            }
            3 => {
                out.push(WaveletIndex::new(j, vec![0, 1, 2], vec![1, 1, 1]).unwrap());
                // Same atom multiset as the previous index in permuted slot
                // order: covariance exactly 1.
                out.push(WaveletIndex::new(j, vec![2, 0, 1], vec![1, 1, 1]).unwrap());
                out.push(WaveletIndex::new(j, vec![1, 1, 3], vec![1, 1, 1]).unwrap());
                out.push(WaveletIndex::new(j, vec![0, 0, 1], vec![0, 0, 1]).unwrap());
                out.push(WaveletIndex::new(j, vec![-1, 2, 2], vec![1, 1, 1]).unwrap());
            }
            _ => unreachable!("criterion 4 uses d ∈ {{2, 3}}"),
        }
    }
    out
}

/// 4: the exact chaos covariance matrix of 20 basis values matches the
/// Monte-Carlo covariance entrywise, for `d = 2` and `d = 3` — including a
/// `d = 3` pair with covariance exactly 1 (identical atom multiset in
/// permuted slot order).
pub fn criterion_04_chaos_covariance(mode: Mode) -> Result<CriterionOutcome> {
    let (filters, _) = backend();
    let (m, z_lim) = match mode {
        Mode::Full => (100_000usize, 4.0),
        Mode::Quick => (10_000, 5.0),
    };
    let requests: Vec<LevelRequest> = (0..=3)
        .map(|j| {
            Ok(LevelRequest {
                j,
                a: Some(Window::new(-4, 8)?),
                b: Some(Window::new(-4, 8)?),
            })
        })
        .collect::<Result<_>>()?;
    let mut pass = true;
    let mut worst_z = 0f64;
    for (d, base_seed) in [(2usize, SEED_C4_D2), (3, SEED_C4_D3)] {
        let indices = c4_indices(d);
        let k = indices.len();
        let mut analytic = vec![0f64; k * k];
        for i in 0..k {
            for l in i..k {
                let c = chaos_cov::<f64>(&indices[i], &indices[l])?;
                analytic[i * k + l] = c;
                analytic[l * k + i] = c;
            }
        }
        if d == 3 {
            // The permuted-slot pair at level 0 sits at positions 0 and 1.
            if analytic[1] != 1.0 {
                pass = false;
            }
        }
        let mut sum = vec![0f64; k * k];
        let mut sum_sq = vec![0f64; k * k];
        let mut vals = vec![0f64; k];
        for i in 0..m {
            let sampler = CascadeSampler::new(Arc::clone(&filters), path_seed(base_seed, i as u64));
            let field = sampler.sample(0, &requests)?;
            for (vi, idx) in indices.iter().enumerate() {
                vals[vi] = chaos_value(&field, idx)?;
            }
            for a in 0..k {
                for b in a..k {
                    let p = vals[a] * vals[b];
                    sum[a * k + b] += p;
                    sum_sq[a * k + b] += p * p;
                }
            }
        }
        let mf = m as f64;
        for a in 0..k {
            for b in a..k {
                let emp = sum[a * k + b] / mf;
                let var = (sum_sq[a * k + b] / mf - emp * emp).max(0.0);
                let se = (var / mf).sqrt().max(1e-12);
                let z = (emp - analytic[a * k + b]).abs() / se;
                worst_z = worst_z.max(z);
                pass &= z <= z_lim;
            }
        }
    }
    Ok(CriterionOutcome::new(
        4,
        "chaos-covariance",
        pass,
        format!("{m} replicates: entrywise max |z| {worst_z:.2} (<= {z_lim}); cov-1 pair exact"),
    ))
}

/// Wrap an external series as a [`PathSample`] so the same estimator code
/// paths apply to oracle data.
fn path_from_series(values: Vec<f64>, hurst: f64, d: usize, seed: u64) -> Result<PathSample<f64>> {
    let n = values.len() - 1;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    Ok(PathSample {
        times,
        low: vec![0.0; n + 1],
        high: values.clone(),
        total: values,
        params: derive_params(hurst, d, true)?,
        truncation: fine_spec(),
        seed,
        report: SynthesisReport {
            truncated_evals: 0,
            one_sided_pairs: 0,
            coverage: 1.0,
            window_tail_rel: 0.0,
            low_tail_rel: 0.0,
            high_tail_rel: 0.0,
        },
    })
}

/// 5: the median pointwise exponent over 50 interior points equals
/// `H = 0.7 ± 0.07` on a `2^14`-step `d = 2` path, and for `d = 1` tracks
/// the identically-estimated fBm oracle within ±0.05.
pub fn criterion_05_pointwise_hoelder(_mode: Mode) -> Result<CriterionOutcome> {
    let levels = (4u32, 10u32);
    let p2 = shared_d2_path()?;
    let rep2 = holder_estimate(p2.as_ref(), levels)?;
    let mut pass = (rep2.global_exponent - 0.7).abs() <= 0.07;

    let synth1 = synth_for(1, 0.7)?;
    let p1 = synth1.sample_path(SEED_C5_D1, &fine_spec(), 1 << 14, 1)?;
    let rep1 = holder_estimate(&p1, levels)?;
    let oracle = FbmSampler::new(0.7, 1 << 14)?;
    let op = path_from_series(oracle.sample_path(SEED_C5_FBM), 0.7, 1, SEED_C5_FBM)?;
    let rep_o = holder_estimate(&op, levels)?;
    let gap = (rep1.global_exponent - rep_o.global_exponent).abs();
    pass &= gap <= 0.05;
    Ok(CriterionOutcome::new(
        5,
        "pointwise-hoelder",
        pass,
        format!(
            "d=2 median {:.3} (0.70±0.07); d=1 median {:.3} vs fBm oracle {:.3} \
             (gap {:.3} <= 0.05)",
            rep2.global_exponent, rep1.global_exponent, rep_o.global_exponent, gap
        ),
    ))
}

/// 6: on the shared `d = 2` path the log-corrected modulus statistic
/// (exponent `d/2 = 1`) moves ≤ 25% under the `2^12 → 2^14` refinement
/// while the uncorrected supremum grows by ≥ 10%.
pub fn criterion_06_log_modulus(_mode: Mode) -> Result<CriterionOutcome> {
    let p = shared_d2_path()?;
    let (fine, coarse, _) = modulus_stability(&p.times, &p.total, 0.7, 2.0, 1.0, 4)?;
    let corrected_growth = fine / coarse - 1.0;

    let sub_t: Vec<f64> = p.times.iter().step_by(4).copied().collect();
    let sub_v: Vec<f64> = p.total.iter().step_by(4).copied().collect();
    let plain_fine = modulus_statistic_with_exponent(&p.times, &p.total, 0.7, 2.0, 0.0)?;
    let plain_coarse = modulus_statistic_with_exponent(&sub_t, &sub_v, 0.7, 2.0, 0.0)?;
    let plain_growth = plain_fine / plain_coarse - 1.0;

    let pass = corrected_growth <= 0.25 && plain_growth >= 0.10;
    Ok(CriterionOutcome::new(
        6,
        "log-modulus",
        pass,
        format!(
            "corrected growth {:.1}% (<=25%); plain growth {:.1}% (>=10%)",
            100.0 * corrected_growth,
            100.0 * plain_growth
        ),
    ))
}

/// 7: over `10^5` samples of `X₁` (`d = 2`) the ratio `F̂(x)/√x` stays
/// bounded on `x ∈ [10⁻³, 1]` and the CDF log-slope over the smallest
/// decade is at least `1/d − 0.1`.
pub fn criterion_07_small_ball(_mode: Mode) -> Result<CriterionOutcome> {
    let synth = synth_for(2, 0.7)?;
    let spec = TruncationSpec {
        j_min: -10,
        j_max: 6,
        k_halfwidth: 12,
        tail_budget: 0.5,
    };
    let m = 100_000usize;
    let mut xs = Vec::with_capacity(m);
    for i in 0..m {
        xs.push(synth.sample_path(path_seed(SEED_C7, i as u64), &spec, 1, 1)?.total[1]);
    }
    let grid: Vec<f64> = (0..=12).map(|i| 1e-3 * 10f64.powf(i as f64 / 4.0)).collect();
    let report = small_ball_report(&xs, 2, &grid)?;
    let small: Vec<&rieszwave::analysis::SmallBallRow<f64>> = report
        .rows
        .iter()
        .filter(|r| r.x <= 0.010_000_1)
        .collect();
    let mut pass = report.fitted_c.is_finite() && report.fitted_c > 0.0;
    let slope = if small.len() >= 3 {
        let lx: Vec<f64> = small.iter().map(|r| r.x.ln()).collect();
        let lf: Vec<f64> = small.iter().map(|r| r.cdf.ln()).collect();
        ls_slope(&lx, &lf)
    } else {
        pass = false;
        f64::NAN
    };
    pass &= slope >= 0.5 - 0.1;
    Ok(CriterionOutcome::new(
        7,
        "small-ball",
        pass,
        format!(
            "fitted C {:.3}; smallest-decade slope {:.3} (>= 0.4); {} rows kept, {} dropped",
            report.fitted_c,
            slope,
            report.rows.len(),
            report.dropped.len()
        ),
    ))
}

/// Recover the ten largest-magnitude coefficients among `candidates` and
/// return the worst relative error.
fn dual_worst_rel(
    synth: &Synthesizer<f64>,
    seed: u64,
    spec: &TruncationSpec<f64>,
    n_axis: usize,
    candidates: Vec<WaveletIndex>,
) -> Result<f64> {
    let (_, store) = backend();
    let field = synth.sample_field(seed, spec, n_axis, 1)?;
    let tables = dual_tables(store.as_ref(), &field.params, field.params.chaos_order)?;
    let truth = synth.chaos_for(seed, spec, &candidates)?;
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| truth[b].abs().partial_cmp(&truth[a].abs()).unwrap());
    let mut worst = 0f64;
    for &i in order.iter().take(10) {
        let rec = dual_recover(&field, &candidates[i], &tables)?;
        worst = worst.max((rec - truth[i]).abs() / truth[i].abs());
    }
    Ok(worst)
}

/// 8: integrating the sampled field against the dual kernel recovers the
/// ten largest interior chaos coefficients to ≤ 5% relative error, for
/// `d = 1` and for `d = 2` at coarse resolution.
pub fn criterion_08_dual_recovery(mode: Mode) -> Result<CriterionOutcome> {
    let synth1 = synth_for(1, 0.7)?;
    let spec1 = TruncationSpec {
        j_min: -4,
        j_max: 8,
        k_halfwidth: 12,
        tail_budget: 0.5,
    };
    let cands1: Vec<WaveletIndex> = (0..=15)
        .map(|k| WaveletIndex::new(4, vec![k], vec![1]).unwrap())
        .collect();
    let worst1 = dual_worst_rel(&synth1, SEED_C8_D1, &spec1, 1024, cands1)?;

    let synth2 = synth_for(2, 0.7)?;
    let spec2 = TruncationSpec {
        j_min: -6,
        j_max: 7,
        k_halfwidth: 12,
        tail_budget: 0.5,
    };
    let (j2, k_lo, k_hi, n_axis2) = match mode {
        Mode::Full => (3i32, 2i64, 9i64, 256usize),
        Mode::Quick => (2, 1, 6, 128),
    };
    let mut cands2 = Vec::new();
    for k0 in k_lo..=k_hi {
        for k1 in k_lo..=k_hi {
            cands2.push(WaveletIndex::new(j2, vec![k0, k1], vec![1, 1]).unwrap());
        }
    }
    let worst2 = dual_worst_rel(&synth2, SEED_C8_D2, &spec2, n_axis2, cands2)?;

    let pass = worst1 <= 0.05 && worst2 <= 0.05;
    Ok(CriterionOutcome::new(
        8,
        "dual-recovery",
        pass,
        format!(
            "worst rel err over top-10: d=1 {:.3}% , d=2 {:.3}% (<= 5%)",
            100.0 * worst1,
            100.0 * worst2
        ),
    ))
}

/// Mean box-counting estimate of graph/range clouds over a few replicate
/// coordinate paths of the order-1 process.
fn c9_estimates(mode: Mode) -> Result<(f64, f64)> {
    let reps = match mode {
        Mode::Full => 4u64,
        Mode::Quick => 2,
    };
    let n = 1usize << 14;
    let spec = fine_spec();
    let synth_g = synth_for(1, 0.7)?;
    let synth_a = synth_for(1, 0.6)?;
    let synth_b = synth_for(1, 0.8)?;
    let mut graph_est = 0f64;
    let mut range_est = 0f64;
    for r in 0..reps {
        let pg = synth_g.sample_path(path_seed(SEED_C9, 3 * r), &spec, n, 1)?;
        let mut graph_pts = Vec::with_capacity(2 * (n + 1));
        for i in 0..=n {
            graph_pts.push(pg.times[i]);
            graph_pts.push(pg.total[i]);
        }
        graph_est += box_dimension(&graph_pts, 2, (2, 10))?.estimate;

        let pa = synth_a.sample_path(path_seed(SEED_C9, 3 * r + 1), &spec, n, 1)?;
        let pb = synth_b.sample_path(path_seed(SEED_C9, 3 * r + 2), &spec, n, 1)?;
        let mut range_pts = Vec::with_capacity(2 * (n + 1));
        for i in 0..=n {
            range_pts.push(pa.total[i]);
            range_pts.push(pb.total[i]);
        }
        range_est += box_dimension(&range_pts, 2, (2, 10))?.estimate;
    }
    Ok((graph_est / reps as f64, range_est / reps as f64))
}

/// 9: the closed-form bounds reproduce the worked values exactly, and the
/// box-counting estimates land inside the stated brackets: graph of the
/// `d = 1`, `H = 0.7` path at `1.30 ± 0.10` and the anisotropic
/// `(0.6, 0.8)` range at `1.50 ± 0.15`.
pub fn criterion_09_dimension_bounds(mode: Mode) -> Result<CriterionOutcome> {
    let worked = dimension_bounds(&[0.6], 2, 1.0)?;
    let mut pass = worked.lower_graph == 1.2 && worked.upper_graph == 1.4;
    let line = dimension_bounds(&[0.7], 1, 1.0)?;
    pass &= line.lower_graph == 1.3 && line.upper_graph == 1.3;
    let aniso = dimension_bounds(&[0.6, 0.8], 1, 1.0)?;
    pass &= (aniso.lower_range - 1.5).abs() < 1e-12 && (aniso.upper_range - 1.5).abs() < 1e-12;

    let (graph_est, range_est) = c9_estimates(mode)?;
    pass &= (graph_est - 1.30).abs() <= 0.10;
    pass &= (range_est - 1.50).abs() <= 0.15;
    Ok(CriterionOutcome::new(
        9,
        "dimension-bounds",
        pass,
        format!(
            "worked bounds exact; graph est {graph_est:.3} (1.30±0.10); range est \
             {range_est:.3} (1.50±0.15)"
        ),
    ))
}

/// 10: identical bytes across reruns and across thread counts {1, 4, 16}
/// for both the path and the field writer.
pub fn criterion_10_determinism(_mode: Mode) -> Result<CriterionOutcome> {
    let spec = TruncationSpec::default();
    let synth1 = synth_for(1, 0.6)?;
    let synth2 = synth_for(2, 0.7)?;
    let path_bytes = |threads: usize| -> Result<Vec<u8>> {
        let p = synth1.sample_path(SEED_C10, &spec, 256, threads)?;
        let mut buf = Vec::new();
        rieszwave::io::write_path_csv(&mut buf, &p)?;
        Ok(buf)
    };
    let field_bytes = |threads: usize| -> Result<Vec<u8>> {
        let f = synth2.sample_field(SEED_C10, &spec, 24, threads)?;
        let mut buf = Vec::new();
        rieszwave::io::write_field_csv(&mut buf, &f)?;
        Ok(buf)
    };
    let p1 = path_bytes(1)?;
    let f1 = field_bytes(1)?;
    let mut pass = !p1.is_empty() && !f1.is_empty();
    for threads in [1usize, 4, 16] {
        pass &= path_bytes(threads)? == p1;
        pass &= field_bytes(threads)? == f1;
    }
    Ok(CriterionOutcome::new(
        10,
        "determinism",
        pass,
        format!(
            "path CSV {} B and field CSV {} B identical across reruns and threads {{1,4,16}}",
            p1.len(),
            f1.len()
        ),
    ))
}
