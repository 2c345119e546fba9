// A 4-stage NLFSR and a 4-stage binary machine producing the same
// period-15 sequence; the binary machine needs fewer gates.

use bmsynth::machine::BinaryMachine;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let nlfsr = BinaryMachine::shift_register(4, "x0 ^ x3 ^ x1 & x2 ^ x2 & x3", 0b0001)?;
    let bm = BinaryMachine::from_expressions(
        4,
        1,
        0b0001,
        &[(3, "x0 ^ x3"), (2, "x3 ^ x1 & x2"), (1, "x2"), (0, "x1")],
    )?;
    for (name, m) in [("nlfsr", &nlfsr), ("binary machine", &bm)] {
        println!(
            "{name:>14}: {} period={:?} gates={}",
            m.simulate(15).emitted_string(),
            m.period(64),
            m.gate_count()
        );
    }
    assert_eq!(nlfsr.simulate(15).emitted, bm.simulate(15).emitted);
    assert!(bm.gate_count() < nlfsr.gate_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
