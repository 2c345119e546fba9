// Presented state assignment for a 20-bit sequence at two bits per cycle,
// then the minimized machine and a check that it replays the sequence.

use bmsynth::assign::{assign_states, format_state, Permutation};
use bmsynth::machine::{verify_against, BinaryMachine};
use bmsynth::logic::{minimize, MinimizeOptions};
use bmsynth::seq::parse_sequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = parse_sequence("00110111001011101100")?;
    // tags from the LFSR 1 + x + x^4, seeded at 1
    let perm = Permutation::Lfsr { poly: Some(0x13), seed: 1 };
    let sa = assign_states(&a, 2, &perm)?;
    let k = sa.k();

    let states: Vec<String> = sa.states().iter().map(|&s| format_state(s, k)).collect();
    println!("k = {k}, states: {}", states.join(" "));
    let width = sa.support().len();
    for t in sa.transitions() {
        println!("  {} -> {}", format_state(t.point, width), t.next.render(k));
    }

    let machine = BinaryMachine::build(&sa, minimize(&sa.functions()?, &MinimizeOptions::default())?)?;
    print!("{}", machine.feedback().to_structural_text());
    let check = verify_against(&machine, &a, 2)?;
    println!("gates = {}, verified = {}", machine.gate_count(), check.is_pass());
    assert_eq!(states[0], "000100");
    assert!(check.is_pass());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
