// Specified-bit profile of a scan pattern set and the effect of leaving
// the densest patterns out of the embedded set.

use bmsynth::analyze::{profile, select_subset, SubsetStrategy};
use bmsynth::pipeline::SynthesisConfig;
use bmsynth::seq::{PatternSet, TernaryBit, TernarySequence};
use rand::{Rng, SeedableRng};

fn synthetic(count: usize, width: usize, seed: u64) -> Result<PatternSet, Box<dyn std::error::Error>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dense = count / 20;
    let patterns = (0..count)
        .map(|i| {
            let density = if i < dense { 0.5 } else { 0.02 };
            let bits = (0..width)
                .map(|_| {
                    if rng.gen_bool(density) {
                        TernaryBit::from_bool(rng.gen())
                    } else {
                        TernaryBit::DontCare
                    }
                })
                .collect();
            TernarySequence::new(bits)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PatternSet::new(patterns)?)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ps = synthetic(60, 64, 3)?;
    let full = profile(&ps);
    println!("{} patterns, {:.1}% specified, {:.0} bits of entropy", ps.count(), 100.0 * full.total_fraction, full.entropy_bits);

    let pilot = SynthesisConfig::presented(2);
    let plan = select_subset(&ps, SubsetStrategy::DropMostSpecifiedPrefix { fraction: 0.05 }, &pilot)?;
    let kept = profile(&ps.subset(&plan.kept)?);
    println!(
        "dropping {:?}: entropy {:.0} bits, pilot machine {:?} gates, {:.0}% of specified bits kept",
        plan.dropped,
        kept.entropy_bits,
        plan.predicted_gate_count,
        100.0 * plan.coverage_proxy
    );
    assert!(kept.entropy_bits < full.entropy_bits);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
