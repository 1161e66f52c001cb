use clap::{Args, Parser, Subcommand};
use elliptic::exactcore::{format_rational, parse_rational, Rational};
use elliptic::rootsys::CartanType;
use serde_json::{json, Value};
use std::path::PathBuf;
use thiserror::Error;

/// Environment variable naming the on-disk cache of good invariant sets.
pub const CACHE_ENV: &str = "ELLFROB_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "ellfrob", version, about = "Elliptic root systems X_l^(1,1): Coxeter data, admissible triplets, good invariants and Frobenius structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Root system data and the elliptic root system axioms.
    Describe,
    /// Hyperbolic Coxeter transformation, degrees and Jordan factors.
    Coxeter,
    /// Admissible triplet (c̃^ss, ζ, L(r)) and its admissibility report.
    Triplet,
    /// Basic invariants as Taylor jets along L^⊥ (exchange format with --out).
    Invariants {
        /// Make the set good and compatible (x^α = ψ^{-1}(z^α)).
        #[arg(long)]
        good: bool,
    },
    /// Flat metric and structure constants of the codimension-one Frobenius structure.
    Frobenius,
    /// Full property suite; exits 1 if any check fails.
    Verify {
        /// Skip the re-run at q-order + 5.
        #[arg(long)]
        skip_drift: bool,
    },
    /// Expands the invariants of an exchange file in the good basic invariants.
    Expand {
        /// Invariant exchange file.
        file: PathBuf,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Root system type, e.g. G2, D4, or a family letter together with --rank.
    #[arg(long = "type", global = true)]
    pub type_: Option<String>,
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Triplet parameter r = Ĩ(λ_r, λ_r), rational.
    #[arg(long, global = true, default_value = "0", allow_hyphen_values = true)]
    pub r: String,
    /// Series are kept modulo q^N.
    #[arg(long = "q-order", global = true, default_value_t = 20, allow_hyphen_values = true)]
    pub q_order: i64,
    /// Weighted degree of the Taylor jets (default 3·d_n).
    #[arg(long = "jet-bound", global = true)]
    pub jet_bound: Option<u32>,
    /// Working precision in bits: 24, 53 or 106.
    #[arg(long, global = true, default_value_t = 106)]
    pub precision: u32,
    #[arg(long, global = true, default_value_t = 1e-8, allow_hyphen_values = true)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Single,
    Double,
    DoubleDouble,
}

impl Precision {
    pub fn bits(self) -> u32 {
        match self {
            Precision::Single => 24,
            Precision::Double => 53,
            Precision::DoubleDouble => 106,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("--type is required")]
    MissingType,
    #[error("unknown type {0:?}")]
    BadType(String),
    #[error("--rank {rank} contradicts --type {label}")]
    RankMismatch { label: String, rank: usize },
    #[error("--r must be a rational number, got {0:?}")]
    BadR(String),
    #[error("--q-order must be at least 8, got {0}")]
    QOrder(i64),
    #[error("--jet-bound must be positive")]
    JetBound,
    #[error("--precision must be 24, 53 or 106, got {0}")]
    Precision(u32),
    #[error("--tol must be a positive number, got {0}")]
    Tol(f64),
    #[error("{0}")]
    Input(String),
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub cartan: CartanType,
    pub r: Rational,
    pub q_order: i64,
    pub jet_bound: Option<u32>,
    pub precision: Precision,
    pub tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl RunConfig {
    /// `fallback_type` is used when --type is absent (e.g. taken from an input file).
    pub fn from_opts(o: &Opts, fallback_type: Option<&str>) -> Result<Self, ConfigError> {
        let label = o.type_.as_deref().or(fallback_type).ok_or(ConfigError::MissingType)?.trim().to_string();
        let has_rank = label.chars().skip(1).any(|c| c.is_ascii_digit());
        let full = match (has_rank, o.rank) {
            (true, None) => label.clone(),
            (true, Some(k)) => {
                if label[1..].parse::<usize>().ok() != Some(k) {
                    return Err(ConfigError::RankMismatch { label, rank: k });
                }
                label.clone()
            }
            (false, Some(k)) => format!("{label}{k}"),
            (false, None) => return Err(ConfigError::BadType(format!("{label} (no rank given)"))),
        };
        let cartan: CartanType = full.parse().map_err(|_| ConfigError::BadType(full.clone()))?;
        let r = parse_rational(&o.r).map_err(|_| ConfigError::BadR(o.r.clone()))?;
        if o.q_order < 8 {
            return Err(ConfigError::QOrder(o.q_order));
        }
        if o.jet_bound == Some(0) {
            return Err(ConfigError::JetBound);
        }
        let precision = match o.precision {
            24 => Precision::Single,
            53 => Precision::Double,
            106 => Precision::DoubleDouble,
            p => return Err(ConfigError::Precision(p)),
        };
        if !(o.tol.is_finite() && o.tol > 0.0) {
            return Err(ConfigError::Tol(o.tol));
        }
        Ok(RunConfig { cartan, r, q_order: o.q_order, jet_bound: o.jet_bound, precision, tol: o.tol, seed: o.seed, out: o.out.clone(), json: o.json })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": self.cartan.to_string(),
            "rank": self.cartan.rank,
            "r": format_rational(&self.r),
            "q_order": self.q_order,
            "jet_bound": self.jet_bound,
            "precision": self.precision.bits(),
            "tol": self.tol,
            "seed": self.seed,
        })
    }

    /// Canonical text of everything a good invariant set depends on.
    pub fn cache_key(&self, q_order: i64, jet_bound: u32) -> String {
        format!(
            "good-set/1 type={} r={} q_order={} jet_bound={} precision={} seed={}",
            self.cartan,
            format_rational(&self.r),
            q_order,
            jet_bound,
            self.precision.bits(),
            self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(args: &[&str]) -> Opts {
        let mut v = vec!["ellfrob", "describe"];
        v.extend_from_slice(args);
        Cli::try_parse_from(v).unwrap().opts
    }

    #[test]
    fn type_and_rank_combine() {
        let c = RunConfig::from_opts(&opts(&["--type", "D", "--rank", "4"]), None).unwrap();
        assert_eq!(c.cartan.to_string(), "D4");
        assert!(RunConfig::from_opts(&opts(&["--type", "G2", "--rank", "2"]), None).is_ok());
        assert!(matches!(RunConfig::from_opts(&opts(&["--type", "G2", "--rank", "3"]), None), Err(ConfigError::RankMismatch { .. })));
        assert!(matches!(RunConfig::from_opts(&opts(&["--type", "Q7"]), None), Err(ConfigError::BadType(_))));
        assert_eq!(RunConfig::from_opts(&opts(&[]), None).unwrap_err(), ConfigError::MissingType);
        assert_eq!(RunConfig::from_opts(&opts(&[]), Some("A1")).unwrap().cartan.to_string(), "A1");
    }

    #[test]
    fn numeric_flags_are_checked() {
        let base = ["--type", "G2"];
        let with = |extra: &[&str]| {
            let mut v = base.to_vec();
            v.extend_from_slice(extra);
            RunConfig::from_opts(&opts(&v), None)
        };
        assert_eq!(with(&["--r", "-1"]).unwrap().r, elliptic::exactcore::int(-1));
        assert_eq!(with(&["--r", "1/2"]).unwrap().r, elliptic::exactcore::rat(1, 2));
        assert!(matches!(with(&["--r", "x"]), Err(ConfigError::BadR(_))));
        assert!(matches!(with(&["--q-order", "7"]), Err(ConfigError::QOrder(7))));
        assert!(matches!(with(&["--precision", "64"]), Err(ConfigError::Precision(64))));
        assert!(matches!(with(&["--tol", "0"]), Err(ConfigError::Tol(_))));
        assert!(matches!(with(&["--tol", "-1e-3"]), Err(ConfigError::Tol(_))));
        assert_eq!(with(&["--precision", "53"]).unwrap().precision, Precision::Double);
    }
}
