// Gate count as a function of the number of bits emitted per cycle.

use bmsynth::pipeline::{sweep_parallelization, SynthesisConfig};
use bmsynth::seq::parse_sequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = parse_sequence("00110111001011101100")?;
    let report = sweep_parallelization(&a, None, &SynthesisConfig::default());
    for row in &report.rows {
        match &row.outcome {
            Ok(r) => println!("p={} stages={} gates={}", row.p, r.stages, r.gates),
            Err(e) => println!("p={} failed: {e}", row.p),
        }
    }
    let (p, best) = report.best().ok_or("no p succeeded")?;
    println!("cheapest: p={p} with {} gates", best.gates);
    assert_eq!(report.rows.len(), 5);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
