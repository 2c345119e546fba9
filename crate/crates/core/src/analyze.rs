//! Don't-care statistics for scan-pattern sets and pattern-subset selection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::{synthesize, SynthesisConfig};
use crate::seq::{PatternSet, TernaryBit, TernarySequence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyzeError {
    #[error("drop fraction {0} is outside [0, 1)")]
    DropFraction(f64),
    #[error("gate budget must be at least 1")]
    ZeroBudget,
    #[error("even the sparsest pattern needs {gates} gates, over the budget of {budget}")]
    BudgetUnsatisfiable { gates: usize, budget: usize },
    #[error("pilot synthesis failed: {0}")]
    Pilot(#[from] crate::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternStats {
    pub pattern_index: usize,
    pub specified_bits: usize,
    pub specified_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternProfile {
    pub per_pattern: Vec<PatternStats>,
    pub total_fraction: f64,
    /// First-order entropy of the specified bits, in bits for the whole set.
    pub entropy_bits: f64,
}

/// Binary entropy of a coin with bias `q`.
fn binary_entropy(q: f64) -> f64 {
    [q, 1.0 - q]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Specified-bit counts per pattern and the entropy estimate
/// `specified · H(ones / specified)`; don't-care positions carry nothing.
pub fn profile(ps: &PatternSet) -> PatternProfile {
    let width = ps.width();
    let mut specified = 0usize;
    let mut ones = 0usize;
    let per_pattern = ps
        .patterns()
        .iter()
        .enumerate()
        .map(|(pattern_index, pat)| {
            let stats = pat.specified_stats();
            specified += stats.specified;
            ones += pat.bits().iter().filter(|b| b.value() == Some(true)).count();
            PatternStats {
                pattern_index,
                specified_bits: stats.specified,
                specified_fraction: stats.fraction,
            }
        })
        .collect();
    let total = width * ps.count();
    let entropy_bits = if specified == 0 {
        0.0
    } else {
        specified as f64 * binary_entropy(ones as f64 / specified as f64)
    };
    PatternProfile {
        per_pattern,
        total_fraction: specified as f64 / total as f64,
        entropy_bits,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsetStrategy {
    /// Drop the `⌈fraction · count⌉` patterns with the most specified bits.
    DropMostSpecifiedPrefix { fraction: f64 },
    /// Keep the sparsest patterns while the pilot machine fits in `budget` gates.
    GreedyBySpecifiedBits { budget: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetPlan {
    /// Ascending pattern indices.
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    /// Gates of the pilot machine for the kept patterns; `None` when nothing
    /// is kept or the set is too short to build one.
    pub predicted_gate_count: Option<usize>,
    /// Share of the specified bits that the kept patterns retain.
    pub coverage_proxy: f64,
}

/// Indices ordered by specified-bit count, sparsest first, ties to the lower index.
fn sparsest_first(ps: &PatternSet) -> Vec<usize> {
    let counts: Vec<usize> = ps
        .patterns()
        .iter()
        .map(|p| p.specified_stats().specified)
        .collect();
    let mut order: Vec<usize> = (0..ps.count()).collect();
    order.sort_by_key(|&i| (counts[i], i));
    order
}

/// The patterns in `indices` chained in their original slots; every other
/// pattern is replaced by don't cares, so the care bits are a subset of the
/// full set's.
pub fn masked_sequence(ps: &PatternSet, indices: &[usize]) -> TernarySequence {
    let mut keep = vec![false; ps.count()];
    for &i in indices {
        keep[i] = true;
    }
    let blank = vec![TernaryBit::DontCare; ps.width()];
    let bits: Vec<TernaryBit> = ps
        .patterns()
        .iter()
        .zip(&keep)
        .flat_map(|(pat, &k)| if k { pat.bits() } else { &blank[..] }.iter().copied())
        .collect();
    TernarySequence::new(bits).expect("pattern sets are non-empty")
}

/// Gate count of the pilot machine for the patterns in `indices`, laid out by
/// [`masked_sequence`].
pub fn pilot_gates(ps: &PatternSet, indices: &[usize], pilot: &SynthesisConfig) -> Result<Option<usize>, AnalyzeError> {
    if indices.is_empty() {
        return Ok(None);
    }
    let a = masked_sequence(ps, indices);
    if a.len().div_ceil(pilot.p) < 2 {
        return Ok(None);
    }
    Ok(Some(synthesize(&a, pilot)?.gates()))
}

pub fn select_subset(
    ps: &PatternSet,
    strategy: SubsetStrategy,
    pilot: &SynthesisConfig,
) -> Result<SubsetPlan, AnalyzeError> {
    let order = sparsest_first(ps);
    let count = ps.count();
    let (keep_len, gates) = match strategy {
        SubsetStrategy::DropMostSpecifiedPrefix { fraction } => {
            if !(0.0..1.0).contains(&fraction) {
                return Err(AnalyzeError::DropFraction(fraction));
            }
            let drop = (fraction * count as f64).ceil() as usize;
            let keep_len = count - drop.min(count);
            (keep_len, pilot_gates(ps, &order[..keep_len], pilot)?)
        }
        SubsetStrategy::GreedyBySpecifiedBits { budget } => {
            if budget == 0 {
                return Err(AnalyzeError::ZeroBudget);
            }
            greedy_prefix(ps, &order, budget, pilot)?
        }
    };
    let mut kept = order[..keep_len].to_vec();
    let mut dropped = order[keep_len..].to_vec();
    kept.sort_unstable();
    dropped.sort_unstable();
    let retained: usize = kept.iter().map(|&i| ps.patterns()[i].specified_stats().specified).sum();
    let total: usize = ps.patterns().iter().map(|p| p.specified_stats().specified).sum();
    Ok(SubsetPlan {
        kept,
        dropped,
        predicted_gate_count: gates,
        coverage_proxy: if total == 0 { 1.0 } else { retained as f64 / total as f64 },
    })
}

/// Longest sparsest-first prefix within budget, found by doubling and then
/// bisection over the prefix length.
fn greedy_prefix(
    ps: &PatternSet,
    order: &[usize],
    budget: usize,
    pilot: &SynthesisConfig,
) -> Result<(usize, Option<usize>), AnalyzeError> {
    let fits = |len: usize| -> Result<(bool, Option<usize>), AnalyzeError> {
        let gates = pilot_gates(ps, &order[..len], pilot)?;
        Ok((gates.unwrap_or(0) <= budget, gates))
    };
    let (ok, first) = fits(1)?;
    if !ok {
        return Err(AnalyzeError::BudgetUnsatisfiable {
            gates: first.unwrap_or(0),
            budget,
        });
    }
    let mut good = (1, first);
    let mut bad = None;
    let mut len = 2;
    while len <= order.len() {
        let (ok, gates) = fits(len)?;
        if ok {
            good = (len, gates);
            len *= 2;
        } else {
            bad = Some(len);
            break;
        }
    }
    let mut hi = bad.unwrap_or(order.len() + 1).min(order.len() + 1);
    if bad.is_none() && good.0 < order.len() {
        let (ok, gates) = fits(order.len())?;
        if ok {
            return Ok((order.len(), gates));
        }
        hi = order.len();
    }
    let mut lo = good.0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let (ok, gates) = fits(mid)?;
        if ok {
            lo = mid;
            good = (mid, gates);
        } else {
            hi = mid;
        }
    }
    Ok(good)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{parse_patterns, ChainOrder};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(rng: &mut ChaCha8Rng, densities: &[f64], width: usize) -> PatternSet {
        let patterns = densities
            .iter()
            .map(|&d| {
                let bits = (0..width)
                    .map(|_| {
                        if rng.gen_bool(d) {
                            TernaryBit::from_bool(rng.gen())
                        } else {
                            TernaryBit::DontCare
                        }
                    })
                    .collect();
                TernarySequence::new(bits).unwrap()
            })
            .collect();
        PatternSet::new(patterns).unwrap()
    }

    #[test]
    fn small_profile() {
        let ps = parse_patterns("0X\nXX\n").unwrap();
        let prof = profile(&ps);
        assert_eq!(prof.total_fraction, 0.25);
        let counts: Vec<usize> = prof.per_pattern.iter().map(|s| s.specified_bits).collect();
        assert_eq!(counts, [1, 0]);
        assert_eq!(prof.entropy_bits, 0.0);
        let blank = parse_patterns("XXX\nXXX").unwrap();
        assert_eq!(profile(&blank).entropy_bits, 0.0);
    }

    #[test]
    fn masking_keeps_slots() {
        let ps = parse_patterns("01\n1X\n00").unwrap();
        assert_eq!(masked_sequence(&ps, &[2, 0]).to_string(), "01XX00");
        assert_eq!(masked_sequence(&ps, &[0, 1, 2]), ps.flatten(ChainOrder::PatternMajor));
    }

    #[test]
    fn fair_bits_carry_one_bit_each() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ps = random_set(&mut rng, &[1.0; 100], 100);
        let per_position = profile(&ps).entropy_bits / 10_000.0;
        assert!((per_position - 1.0).abs() <= 0.05, "{per_position}");
    }

    #[test]
    fn drop_prefix_picks_densest() {
        let mut rows = Vec::new();
        for count in [100, 5, 4, 6] {
            rows.push(format!("{}{}", "1".repeat(count), "X".repeat(100 - count)));
        }
        let ps = parse_patterns(&rows.join("\n")).unwrap();
        let pilot = SynthesisConfig::presented(1);
        let plan = select_subset(&ps, SubsetStrategy::DropMostSpecifiedPrefix { fraction: 0.25 }, &pilot).unwrap();
        assert_eq!(plan.dropped, [0]);
        assert_eq!(plan.kept, [1, 2, 3]);
        assert!((plan.coverage_proxy - 15.0 / 115.0).abs() < 1e-12);
        let all = select_subset(&ps, SubsetStrategy::DropMostSpecifiedPrefix { fraction: 0.0 }, &pilot).unwrap();
        assert_eq!(all.kept, [0, 1, 2, 3]);
        assert!(all.dropped.is_empty());
        assert!(select_subset(&ps, SubsetStrategy::DropMostSpecifiedPrefix { fraction: 1.0 }, &pilot).is_err());
    }

    #[test]
    fn greedy_respects_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let densities: Vec<f64> = (0..24).map(|i| 0.02 + 0.04 * i as f64).collect();
        let ps = random_set(&mut rng, &densities, 32);
        let pilot = SynthesisConfig::presented(1);
        let full = pilot_gates(&ps, &(0..24).collect::<Vec<_>>(), &pilot).unwrap().unwrap();
        let budget = full / 3;
        let plan = select_subset(&ps, SubsetStrategy::GreedyBySpecifiedBits { budget }, &pilot).unwrap();
        assert!(plan.predicted_gate_count.unwrap() <= budget);
        assert!(!plan.kept.is_empty() && !plan.dropped.is_empty());
        let mut all: Vec<usize> = plan.kept.iter().chain(&plan.dropped).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..24).collect::<Vec<_>>());
        let again = select_subset(&ps, SubsetStrategy::GreedyBySpecifiedBits { budget }, &pilot).unwrap();
        assert_eq!(again, plan);
        let dense = random_set(&mut rng, &[1.0; 4], 32);
        assert!(matches!(
            select_subset(&dense, SubsetStrategy::GreedyBySpecifiedBits { budget: 1 }, &pilot),
            Err(AnalyzeError::BudgetUnsatisfiable { .. })
        ));
        let generous = select_subset(&ps, SubsetStrategy::GreedyBySpecifiedBits { budget: full }, &pilot).unwrap();
        assert_eq!(generous.kept.len(), 24);
    }

    #[test]
    fn profile_matches_flattened_stats() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let densities: Vec<f64> = (0..7).map(|_| rng.gen()).collect();
            let ps = random_set(&mut rng, &densities, 19);
            let flat = ps.flatten(ChainOrder::PatternMajor).specified_stats();
            assert!((profile(&ps).total_fraction - flat.fraction).abs() < 1e-12);
        }
    }
}
