//! Random-sequence benchmark: both algorithms on the same sequences across
//! a range of don't-care fractions.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assign::{Algorithm, Permutation};
use crate::pipeline::{default_sweep_range, sweep_parallelization, synthesize, SynthesisConfig};
use crate::seq::{TernaryBit, TernarySequence};

/// Version of the report layout.
pub const REPORT_VERSION: u32 = 1;

pub const SEQUENCE_MODEL: &str =
    "specified bits i.i.d. fair; round(fraction*n) don't-care positions sampled uniformly without replacement";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("config: {0}")]
    Json(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Fixed degree of parallelization, or the best of a sweep per algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "serde_json::Value", try_from = "serde_json::Value")]
pub enum Parallelism {
    Fixed(usize),
    Sweep,
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parallelism::Fixed(p) => write!(f, "{p}"),
            Parallelism::Sweep => f.write_str("sweep"),
        }
    }
}

impl FromStr for Parallelism {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "sweep" => Ok(Parallelism::Sweep),
            other => other
                .parse()
                .map(Parallelism::Fixed)
                .map_err(|_| format!("p must be a positive integer or `sweep`, got {other:?}")),
        }
    }
}

impl From<Parallelism> for serde_json::Value {
    fn from(p: Parallelism) -> Self {
        match p {
            Parallelism::Fixed(p) => p.into(),
            Parallelism::Sweep => "sweep".into(),
        }
    }
}

impl TryFrom<serde_json::Value> for Parallelism {
    type Error = String;

    fn try_from(v: serde_json::Value) -> Result<Self, Self::Error> {
        match v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|p| Parallelism::Fixed(p as usize))
                .ok_or_else(|| format!("p must be a positive integer, got {n}")),
            serde_json::Value::String(s) => s.parse(),
            other => Err(format!("p must be a number or \"sweep\", got {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(alias = "n")]
    pub sequence_length: usize,
    #[serde(alias = "fractions")]
    pub dontcare_fractions: Vec<f64>,
    pub p: Parallelism,
    pub trials: usize,
    pub seed: u64,
    pub perm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sequence_length: 1 << 12,
            dontcare_fractions: vec![0.0, 0.25, 0.5, 0.9, 0.99],
            p: Parallelism::Fixed(2),
            trials: 5,
            seed: 1,
            perm: "lfsr".into(),
            output: None,
        }
    }
}

impl BenchConfig {
    /// Reads `key = value` lines (`#` comments) or a JSON object.
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        let config = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| BenchError::Json(e.to_string()))?
        } else {
            Self::parse_pairs(text)?
        };
        config.validate()?;
        Ok(config)
    }

    fn parse_pairs(text: &str) -> Result<Self, BenchError> {
        let mut config = BenchConfig::default();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| BenchError::Syntax { line: index + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let value = value.trim();
            let number = |v: &str| v.parse::<u64>().map_err(|_| err(format!("{v:?} is not an integer")));
            match key.trim() {
                "n" | "sequence_length" => config.sequence_length = number(value)? as usize,
                "fractions" | "dontcare_fractions" => {
                    config.dontcare_fractions = value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse::<f64>().map_err(|_| err(format!("{t:?} is not a number"))))
                        .collect::<Result<_, _>>()?;
                }
                "p" => config.p = value.parse().map_err(err)?,
                "trials" => config.trials = number(value)? as usize,
                "seed" => config.seed = number(value)?,
                "perm" => config.perm = value.to_string(),
                "output" => config.output = Some(PathBuf::from(value)),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let invalid = |m: String| Err(BenchError::Invalid(m));
        if self.sequence_length < 8 {
            return invalid(format!("sequence_length {} is below 8", self.sequence_length));
        }
        if self.trials < 1 {
            return invalid("trials must be at least 1".into());
        }
        if self.dontcare_fractions.is_empty() {
            return invalid("at least one don't-care fraction is required".into());
        }
        if let Some(f) = self.dontcare_fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return invalid(format!("fraction {f} is outside [0, 1]"));
        }
        if self.dontcare_fractions.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("fractions must be sorted ascending and distinct".into());
        }
        if let Parallelism::Fixed(p) = self.p {
            if p == 0 || p >= self.sequence_length || p > crate::seq::MAX_PARALLELIZATION {
                return invalid(format!("p={p} does not suit a sequence of {} bits", self.sequence_length));
            }
        }
        self.perm.parse::<Permutation>().map_err(|e| BenchError::Invalid(e.to_string()))?;
        Ok(())
    }

    /// FNV-1a over the canonical JSON form, output path excluded.
    pub fn hash(&self) -> String {
        let canonical = BenchConfig { output: None, ..self.clone() };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// A random ternary sequence with exactly `round(fraction·n)` don't cares.
/// Returns the sequence and its realized don't-care fraction.
pub fn random_sequence(n: usize, fraction: f64, rng: &mut impl Rng) -> (TernarySequence, f64) {
    let dc = ((fraction * n as f64).round() as usize).min(n);
    let mut bits: Vec<TernaryBit> = (0..n).map(|_| TernaryBit::from_bool(rng.gen())).collect();
    for i in rand::seq::index::sample(rng, n, dc) {
        bits[i] = TernaryBit::DontCare;
    }
    let seq = TernarySequence::new(bits).expect("n >= 1");
    (seq, dc as f64 / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub fraction: f64,
    pub trial: usize,
    pub g1_baseline: Option<usize>,
    pub g2_presented: Option<usize>,
    /// `(G1 - G2) / G1 · 100`
    pub reduction_percent: Option<f64>,
    pub k_baseline: Option<usize>,
    pub k_presented: Option<usize>,
    pub p_baseline: Option<usize>,
    pub p_presented: Option<usize>,
    pub realized_fraction: f64,
    /// `ok`, or the first error.
    pub status: String,
}

impl BenchRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchAggregate {
    pub fraction: f64,
    pub mean_g1_baseline: Option<f64>,
    pub mean_g2_presented: Option<f64>,
    pub mean_reduction_percent: Option<f64>,
    pub ok_trials: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub report_version: u32,
    pub crate_version: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: BenchConfig,
    pub sequence_model: String,
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<BenchAggregate>,
}

fn run_one(
    a: &TernarySequence,
    algorithm: Algorithm,
    p: Parallelism,
    perm: &Permutation,
) -> Result<(usize, usize, usize), String> {
    let template = SynthesisConfig {
        algorithm,
        perm: perm.clone(),
        ..Default::default()
    };
    match p {
        Parallelism::Fixed(p) => {
            let s = synthesize(a, &SynthesisConfig { p, ..template }).map_err(|e| e.to_string())?;
            Ok((s.gates(), s.stages(), p))
        }
        Parallelism::Sweep => {
            let report = sweep_parallelization(a, Some(default_sweep_range(a.len())), &template);
            match report.best() {
                Some((p, best)) => Ok((best.gates, best.stages, p)),
                None => Err(report
                    .rows
                    .first()
                    .and_then(|r| r.outcome.clone().err())
                    .unwrap_or_else(|| "empty sweep".into())),
            }
        }
    }
}

fn run_cell(config: &BenchConfig, perm: &Permutation, fraction_index: usize, trial: usize) -> BenchRow {
    let fraction = config.dontcare_fractions[fraction_index];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream((fraction_index as u64) << 32 | trial as u64);
    let (a, realized_fraction) = random_sequence(config.sequence_length, fraction, &mut rng);
    let base = run_one(&a, Algorithm::Baseline, config.p, perm);
    let pres = run_one(&a, Algorithm::Presented, config.p, perm);
    let status = match (&base, &pres) {
        (Ok(_), Ok(_)) => "ok".to_string(),
        (Err(e), _) => format!("baseline: {e}"),
        (_, Err(e)) => format!("presented: {e}"),
    };
    let base = base.ok();
    let pres = pres.ok();
    let reduction_percent = match (base, pres) {
        (Some((g1, ..)), Some((g2, ..))) if g1 > 0 => Some((g1 as f64 - g2 as f64) / g1 as f64 * 100.0),
        _ => None,
    };
    BenchRow {
        fraction,
        trial,
        g1_baseline: base.map(|b| b.0),
        g2_presented: pres.map(|b| b.0),
        reduction_percent,
        k_baseline: base.map(|b| b.1),
        k_presented: pres.map(|b| b.1),
        p_baseline: base.map(|b| b.2),
        p_presented: pres.map(|b| b.2),
        realized_fraction,
        status,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Runs every (fraction, trial) cell. Cells run in parallel; each draws from
/// its own stream of the master seed, so the report does not depend on
/// scheduling.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, BenchError> {
    config.validate()?;
    let perm: Permutation = config.perm.parse().map_err(|e: crate::assign::AssignError| BenchError::Invalid(e.to_string()))?;
    let cells: Vec<(usize, usize)> = (0..config.dontcare_fractions.len())
        .flat_map(|f| (0..config.trials).map(move |t| (f, t)))
        .collect();
    let rows: Vec<BenchRow> = cells
        .par_iter()
        .map(|&(f, t)| run_cell(config, &perm, f, t))
        .collect();
    let aggregates = config
        .dontcare_fractions
        .iter()
        .map(|&fraction| {
            let ok: Vec<&BenchRow> = rows.iter().filter(|r| r.fraction == fraction && r.is_ok()).collect();
            BenchAggregate {
                fraction,
                mean_g1_baseline: mean(ok.iter().filter_map(|r| r.g1_baseline).map(|g| g as f64)),
                mean_g2_presented: mean(ok.iter().filter_map(|r| r.g2_presented).map(|g| g as f64)),
                mean_reduction_percent: mean(ok.iter().filter_map(|r| r.reduction_percent)),
                ok_trials: ok.len(),
                trials: config.trials,
            }
        })
        .collect();
    Ok(BenchReport {
        report_version: REPORT_VERSION,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        config_hash: config.hash(),
        config: config.clone(),
        sequence_model: SEQUENCE_MODEL.to_string(),
        rows,
        aggregates,
    })
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fixed(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_default()
}

impl BenchReport {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| !r.is_ok())
    }

    /// One line per cell followed by one `mean` line per fraction.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = [
            "fraction",
            "g1_baseline",
            "g2_presented",
            "reduction_percent",
            "trial",
            "k_baseline",
            "k_presented",
            "p_baseline",
            "p_presented",
            "realized_fraction",
            "status",
        ];
        w.write_record(header).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.fraction.to_string(),
                cell(r.g1_baseline),
                cell(r.g2_presented),
                fixed(r.reduction_percent, 4),
                r.trial.to_string(),
                cell(r.k_baseline),
                cell(r.k_presented),
                cell(r.p_baseline),
                cell(r.p_presented),
                format!("{:.6}", r.realized_fraction),
                r.status.clone(),
            ])
            .expect("in-memory write");
        }
        for a in &self.aggregates {
            w.write_record([
                a.fraction.to_string(),
                fixed(a.mean_g1_baseline, 2),
                fixed(a.mean_g2_presented, 2),
                fixed(a.mean_reduction_percent, 4),
                "mean".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("ok {}/{}", a.ok_trials, a.trials),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_config_forms() {
        let text = "# desk run\nn = 64\nfractions = 0, 0.5, 0.99\np = sweep\ntrials = 3\nseed = 9\nperm = counter\n";
        let c = BenchConfig::parse(text).unwrap();
        assert_eq!(c.sequence_length, 64);
        assert_eq!(c.dontcare_fractions, [0.0, 0.5, 0.99]);
        assert_eq!(c.p, Parallelism::Sweep);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(BenchConfig::parse(&json).unwrap(), c);
        let short = BenchConfig::parse(r#"{"n": 100, "fractions": [0.1], "p": 3}"#).unwrap();
        assert_eq!((short.sequence_length, short.p), (100, Parallelism::Fixed(3)));
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "n = 4",
            "trials = 0",
            "fractions = 0.5, 0.2",
            "fractions = 0.5, 0.5",
            "fractions = 1.5",
            "p = 0",
            "p = many",
            "perm = spiral",
            "colour = blue",
            "n 12",
            r#"{"n": 64, "bogus": 1}"#,
        ] {
            assert!(BenchConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn realized_fraction_is_within_one_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, f) in [(8, 0.5), (101, 0.33), (4096, 0.99), (10, 0.0), (10, 1.0)] {
            let (a, realized) = random_sequence(n, f, &mut rng);
            assert_eq!(a.len(), n);
            assert!((realized - f).abs() < 1.0 / n as f64);
            assert_eq!(a.specified_stats().dontcare as f64 / n as f64, realized);
        }
    }

    #[test]
    fn small_bench_shape_and_determinism() {
        let config = BenchConfig {
            sequence_length: 256,
            dontcare_fractions: vec![0.0, 0.5, 0.99],
            trials: 3,
            ..Default::default()
        };
        let report = run_bench(&config).unwrap();
        assert_eq!(report.rows.len(), 9);
        assert!(report.rows.iter().all(BenchRow::is_ok));
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 1 + 9 + 3);
        assert_eq!(csv.lines().filter(|l| l.contains(",mean,")).count(), 3);
        let again = run_bench(&config).unwrap();
        assert_eq!(again.to_csv(), csv);
        assert_eq!(again.to_json(), report.to_json());
        let other = run_bench(&BenchConfig { seed: 2, ..config }).unwrap();
        assert_ne!(other.config_hash, report.config_hash);
    }
}
