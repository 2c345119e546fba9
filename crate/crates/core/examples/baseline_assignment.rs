// The minimal-stage baseline: each state is the current digit plus an
// occurrence counter, so the register is as short as possible.

use bmsynth::assign::{assign_states_minimal, Fill};
use bmsynth::pipeline::{synthesize, SynthesisConfig};
use bmsynth::seq::parse_sequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = parse_sequence("00101101")?;
    for p in [1, 2] {
        let sa = assign_states_minimal(&a, p, Fill::BalanceDigits)?;
        let s = synthesize(&a, &SynthesisConfig::baseline(p))?;
        println!("p={p}: states {:?} -> {}", sa.states(), s.summary());
    }
    let three = assign_states_minimal(&a, 1, Fill::BalanceDigits)?;
    assert_eq!(three.k(), 3);
    assert_eq!(three.states(), [0, 2, 1, 4, 3, 5, 6, 7]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
