//! Run configuration: flag/file merging and exhaustive validation.
//!
//! Every subcommand resolves to one [`RunConfig`].  Values come from three
//! layers, highest priority first:
//!
//! 1. flags given explicitly on the command line,
//! 2. a JSON file passed with `--config` (same field names as the flags),
//! 3. built-in defaults (a few of which depend on the subcommand).
//!
//! The resolved configuration is validated as a whole: validation collects
//! *every* violation instead of stopping at the first, so a rejected run
//! reports the complete list in machine-readable form (see
//! [`RunConfig::validate`]).  After resolution the configuration alone
//! determines all output bytes; the environment never enters except for the
//! documented output-directory override applied in `main`.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Which pipeline a resolved configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// Paths `t ↦ X_t` on a uniform grid, one CSV per path.
    Synth,
    /// Fields `t ↦ X_t` over an axis-aligned grid, one CSV per field.
    Field,
    /// Regularity battery (pointwise exponents, modulus, growth) on
    /// synthesized paths.
    Analyze,
    /// Closed-form dimension bounds plus box-counting estimates for an
    /// anisotropic coordinate vector.
    Dimension,
}

impl CommandKind {
    /// Stable lower-case name used in manifests and output layout.
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Synth => "synth",
            CommandKind::Field => "field",
            CommandKind::Analyze => "analyze",
            CommandKind::Dimension => "dimension",
        }
    }
}

/// One optional value per configurable field.
///
/// Doubles as the clap flag set and as the `--config` JSON schema, so flags
/// and file keys can never drift apart.  `None` means "not specified at
/// this layer".
#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    /// Subcommand a config file was written for (rejected if it does not
    /// match the one actually invoked).  Not a flag.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,

    /// Hurst index `H ∈ (1/2, 1)` [default: 0.7]
    #[arg(long = "H", alias = "hurst", value_name = "H")]
    pub hurst: Option<f64>,

    /// Comma-separated Hurst indices of the anisotropic coordinate vector
    /// (dimension subcommand) [default: 0.6,0.8]
    #[arg(long = "Hvec", value_name = "H1,H2,..", value_delimiter = ',')]
    pub hvec: Option<Vec<f64>>,

    /// Chaos order `d` of the driving multiple integral (1 or 2) [default: 1]
    #[arg(long)]
    pub d: Option<usize>,

    /// Steps of the synthesis grid: paths carry `n+1` samples [default:
    /// 1024; analyze/dimension: 16384]
    #[arg(long)]
    pub n: Option<usize>,

    /// Axis steps of a field grid (field subcommand) [default: 128]
    #[arg(long = "n-axis")]
    pub n_axis: Option<usize>,

    /// Independent paths/replicates [default: 1; dimension: 8]
    #[arg(long)]
    pub paths: Option<u32>,

    /// Master seed; replicate `i` uses a derived per-path seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Worker threads; partitions grids only, never changes output bytes
    /// [default: 1]
    #[arg(long)]
    pub threads: Option<usize>,

    /// Horizon of the diagonal restriction, `t ∈ [0, t_max]`; values above 1
    /// switch synth/analyze to the long-horizon sampler [default: 1]
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,

    /// Hausdorff dimension of the time set for the bounds (dimension
    /// subcommand) [default: 1]
    #[arg(long = "dim-e")]
    pub dim_e: Option<f64>,

    /// Skip unit normalization and keep raw kernel variance [default: false]
    #[arg(long, value_name = "BOOL")]
    pub raw: Option<bool>,

    /// Coarsest wavelet level of the truncation [default: -20]
    #[arg(long = "j-min")]
    pub j_min: Option<i32>,

    /// Finest wavelet level of the truncation [default: 12; analyze: 16]
    #[arg(long = "j-max")]
    pub j_max: Option<i32>,

    /// Translation half-width of the truncation windows [default: 24]
    #[arg(long = "k-halfwidth")]
    pub k_halfwidth: Option<i64>,

    /// Admissible relative variance loss of the truncation [default: 1e-4;
    /// analyze: 1e-3]
    #[arg(long = "tail-budget")]
    pub tail_budget: Option<f64>,

    /// Offset `b > 1` of the modulus log factor (analyze) [default: 2]
    #[arg(long)]
    pub b: Option<f64>,

    /// Offset `c > 3` of the growth log-log factor (analyze) [default: 4]
    #[arg(long)]
    pub c: Option<f64>,

    /// Coarsest oscillation-window level `m_lo` (analyze) [default: 4]
    #[arg(long = "m-lo")]
    pub m_lo: Option<u32>,

    /// Finest oscillation-window level `m_hi` (analyze) [default: 10]
    #[arg(long = "m-hi")]
    pub m_hi: Option<u32>,

    /// Output directory (created if missing) [default: runs]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Layer `self` over `base`: any field set here wins.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            command: self.command.or(base.command),
            hurst: self.hurst.or(base.hurst),
            hvec: self.hvec.or(base.hvec),
            d: self.d.or(base.d),
            n: self.n.or(base.n),
            n_axis: self.n_axis.or(base.n_axis),
            paths: self.paths.or(base.paths),
            seed: self.seed.or(base.seed),
            threads: self.threads.or(base.threads),
            t_max: self.t_max.or(base.t_max),
            dim_e: self.dim_e.or(base.dim_e),
            raw: self.raw.or(base.raw),
            j_min: self.j_min.or(base.j_min),
            j_max: self.j_max.or(base.j_max),
            k_halfwidth: self.k_halfwidth.or(base.k_halfwidth),
            tail_budget: self.tail_budget.or(base.tail_budget),
            b: self.b.or(base.b),
            c: self.c.or(base.c),
            m_lo: self.m_lo.or(base.m_lo),
            m_hi: self.m_hi.or(base.m_hi),
            out: self.out.or(base.out),
        }
    }
}

/// A fully resolved run: every knob pinned, ready for validation.
///
/// Serialized verbatim into the manifest so a run can be reproduced from its
/// artifacts alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub hurst: f64,
    pub hvec: Vec<f64>,
    pub d: usize,
    pub n: usize,
    pub n_axis: usize,
    pub paths: u32,
    pub seed: u64,
    pub threads: usize,
    pub t_max: f64,
    pub dim_e: f64,
    pub raw: bool,
    pub j_min: i32,
    pub j_max: i32,
    pub k_halfwidth: i64,
    pub tail_budget: f64,
    pub b: f64,
    pub c: f64,
    pub m_lo: u32,
    pub m_hi: u32,
    pub out: PathBuf,
}

/// Merge CLI flags over an optional `--config` layer and fill defaults.
pub fn resolve(kind: CommandKind, cli: Overrides, file: Option<Overrides>) -> RunConfig {
    let o = match file {
        Some(f) => cli.over(f),
        None => cli,
    };
    let analyze = kind == CommandKind::Analyze;
    let estimation = analyze || kind == CommandKind::Dimension;
    RunConfig {
        command: kind,
        hurst: o.hurst.unwrap_or(0.7),
        hvec: o.hvec.unwrap_or_else(|| vec![0.6, 0.8]),
        d: o.d.unwrap_or(1),
        n: o.n.unwrap_or(if estimation { 1 << 14 } else { 1024 }),
        n_axis: o.n_axis.unwrap_or(128),
        paths: o
            .paths
            .unwrap_or(if kind == CommandKind::Dimension { 8 } else { 1 }),
        seed: o.seed.unwrap_or(0),
        threads: o.threads.unwrap_or(1),
        t_max: o.t_max.unwrap_or(1.0),
        dim_e: o.dim_e.unwrap_or(1.0),
        raw: o.raw.unwrap_or(false),
        j_min: o.j_min.unwrap_or(-20),
        j_max: o.j_max.unwrap_or(if estimation { 16 } else { 12 }),
        k_halfwidth: o.k_halfwidth.unwrap_or(24),
        tail_budget: o.tail_budget.unwrap_or(if estimation { 1e-3 } else { 1e-4 }),
        b: o.b.unwrap_or(2.0),
        c: o.c.unwrap_or(4.0),
        m_lo: o.m_lo.unwrap_or(4),
        m_hi: o.m_hi.unwrap_or(10),
        out: o.out.unwrap_or_else(|| PathBuf::from("runs")),
    }
}

impl RunConfig {
    /// Check every constraint, returning the full list of violations.
    ///
    /// An empty `Ok(())` means the configuration is runnable; otherwise the
    /// vector holds one human-readable sentence per violated constraint (the
    /// machine-readable envelope is added by the binary).
    pub fn validate(&self, file_command: Option<CommandKind>) -> Result<(), Vec<String>> {
        let mut v = Vec::new();
        let kind = self.command;
        if let Some(fc) = file_command {
            if fc != kind {
                v.push(format!(
                    "config file targets `{}` but the `{}` subcommand was invoked",
                    fc.name(),
                    kind.name()
                ));
            }
        }

        let uses_hurst = matches!(
            kind,
            CommandKind::Synth | CommandKind::Field | CommandKind::Analyze
        );
        if uses_hurst && !(self.hurst > 0.5 && self.hurst < 1.0) {
            v.push(format!(
                "hurst must lie in the open interval (0.5, 1); got {}",
                self.hurst
            ));
        }
        if kind == CommandKind::Dimension {
            if self.hvec.is_empty() {
                v.push("hvec must list at least one Hurst index".into());
            }
            if self.hvec.len() > 3 {
                v.push(format!(
                    "hvec supports at most 3 components (box keys carry the \
                     graph's {} coordinates); got {}",
                    4,
                    self.hvec.len()
                ));
            }
            for (i, h) in self.hvec.iter().enumerate() {
                if !(*h > 0.5 && *h < 1.0) {
                    v.push(format!(
                        "hvec[{i}] must lie in the open interval (0.5, 1); got {h}"
                    ));
                }
            }
            if !(self.dim_e > 0.0 && self.dim_e <= 1.0) {
                v.push(format!("dim-e must lie in (0, 1]; got {}", self.dim_e));
            }
        }
        if !(1..=2).contains(&self.d) {
            v.push(format!(
                "d must be 1 or 2 (table-backed synthesis); got {}",
                self.d
            ));
        }

        match kind {
            CommandKind::Field => {
                if self.n_axis < 2 {
                    v.push(format!("n-axis must be at least 2; got {}", self.n_axis));
                }
                if self.n_axis > 4096 {
                    v.push(format!(
                        "n-axis above 4096 is not supported (grid would hold \
                         more than 16M points); got {}",
                        self.n_axis
                    ));
                }
            }
            CommandKind::Analyze | CommandKind::Dimension => {
                if self.n < 1 << 10 {
                    v.push(format!(
                        "n must be at least 1024 for oscillation windows down \
                         to 2^-10; got {}",
                        self.n
                    ));
                }
                if kind == CommandKind::Dimension && self.n < 1 << 14 {
                    v.push(format!(
                        "n must be at least 16384 for box-counting estimates; \
                         got {}",
                        self.n
                    ));
                }
            }
            CommandKind::Synth => {
                if self.n < 1 {
                    v.push("n must be at least 1".into());
                }
            }
        }
        if self.n > 1 << 22 {
            v.push(format!("n above 2^22 is not supported; got {}", self.n));
        }

        if self.paths < 1 {
            v.push("paths must be at least 1".into());
        }
        if self.paths > 100_000 {
            v.push(format!("paths above 100000 is not supported; got {}", self.paths));
        }
        if self.threads < 1 {
            v.push("threads must be at least 1".into());
        }
        if self.threads > 1024 {
            v.push(format!("threads above 1024 is not supported; got {}", self.threads));
        }
        if !(self.t_max >= 1.0 && self.t_max <= 128.0) {
            v.push(format!("t-max must lie in [1, 128]; got {}", self.t_max));
        }

        if self.j_min > 0 {
            v.push(format!("j-min must be at most 0; got {}", self.j_min));
        }
        if self.j_max < 0 {
            v.push(format!("j-max must be at least 0; got {}", self.j_max));
        }
        if self.j_min > self.j_max {
            v.push(format!(
                "j-min must not exceed j-max; got {} > {}",
                self.j_min, self.j_max
            ));
        }
        if self.j_min < -60 || self.j_max > 24 {
            v.push(format!(
                "levels must satisfy -60 <= j-min and j-max <= 24; got [{}, {}]",
                self.j_min, self.j_max
            ));
        }
        if !(1..=4096).contains(&self.k_halfwidth) {
            v.push(format!(
                "k-halfwidth must lie in [1, 4096]; got {}",
                self.k_halfwidth
            ));
        }
        if !(self.tail_budget > 0.0 && self.tail_budget.is_finite()) {
            v.push(format!(
                "tail-budget must be a positive finite number; got {}",
                self.tail_budget
            ));
        }

        if kind == CommandKind::Analyze {
            if !(self.b > 1.0) {
                v.push(format!("b must exceed 1; got {}", self.b));
            }
            if !(self.c > 3.0) {
                v.push(format!("c must exceed 3; got {}", self.c));
            }
            if self.m_lo < 1 || self.m_hi > 28 || self.m_lo + 2 > self.m_hi {
                v.push(format!(
                    "window levels must satisfy 1 <= m-lo <= m-hi - 2 <= 26; \
                     got [{}, {}]",
                    self.m_lo, self.m_hi
                ));
            } else if self.t_max > 1.0
                && (self.n as f64) < self.t_max * f64::powi(2.0, self.m_hi as i32 + 1)
            {
                v.push(format!(
                    "long-horizon analysis needs n >= t_max·2^(m-hi+1) so the \
                     finest oscillation window spans at least two grid steps; \
                     got n = {}, t-max = {}, m-hi = {}",
                    self.n, self.t_max, self.m_hi
                ));
            }
        }

        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn over(f: impl FnOnce(&mut Overrides)) -> Overrides {
        let mut o = Overrides::default();
        f(&mut o);
        o
    }

    #[test]
    fn cli_layer_wins_over_file_layer_and_defaults_fill_the_rest() {
        let cli = over(|o| {
            o.hurst = Some(0.8);
            o.paths = Some(3);
        });
        let file = over(|o| {
            o.hurst = Some(0.6);
            o.seed = Some(9);
        });
        let cfg = resolve(CommandKind::Synth, cli, Some(file));
        assert_eq!(cfg.hurst, 0.8);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.paths, 3);
        assert_eq!(cfg.n, 1024);
        assert_eq!(cfg.j_max, 12);
        assert_eq!(cfg.threads, 1);
    }

    #[test]
    fn per_command_defaults_differ_where_documented() {
        let a = resolve(CommandKind::Analyze, Overrides::default(), None);
        assert_eq!(a.n, 1 << 14);
        assert_eq!(a.j_max, 16);
        let d = resolve(CommandKind::Dimension, Overrides::default(), None);
        assert_eq!(d.paths, 8);
        let s = resolve(CommandKind::Synth, Overrides::default(), None);
        assert_eq!(s.paths, 1);
        assert_eq!(s.j_max, 12);
    }

    #[test]
    fn validation_collects_every_violation() {
        let mut cfg = resolve(CommandKind::Synth, Overrides::default(), None);
        cfg.hurst = 0.4;
        cfg.d = 3;
        cfg.t_max = 0.5;
        cfg.j_min = 5;
        cfg.j_max = 2;
        let errs = cfg.validate(None).unwrap_err();
        assert!(errs.len() >= 5, "expected >= 5 violations, got {errs:?}");
        assert!(errs.iter().any(|e| e.contains("hurst")));
        assert!(errs.iter().any(|e| e.contains("d must be 1 or 2")));
        assert!(errs.iter().any(|e| e.contains("t-max")));
    }

    #[test]
    fn file_command_mismatch_is_a_violation() {
        let cfg = resolve(CommandKind::Synth, Overrides::default(), None);
        let errs = cfg.validate(Some(CommandKind::Field)).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].contains("config file targets `field`"));
        assert!(cfg.validate(Some(CommandKind::Synth)).is_ok());
    }

    #[test]
    fn config_json_round_trips_through_overrides() {
        let json = r#"{"command":"synth","hurst":0.65,"n":512,"raw":true}"#;
        let o: Overrides = serde_json::from_str(json).unwrap();
        assert_eq!(o.command, Some(CommandKind::Synth));
        assert_eq!(o.hurst, Some(0.65));
        assert_eq!(o.raw, Some(true));
        let cfg = resolve(CommandKind::Synth, Overrides::default(), Some(o));
        assert_eq!(cfg.n, 512);
        assert!(cfg.raw);
        assert!(serde_json::from_str::<Overrides>(r#"{"mystery":1}"#).is_err());
    }
}
