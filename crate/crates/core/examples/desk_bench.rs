// A small random-sequence benchmark of the baseline against the presented
// algorithm, written as CSV.

use bmsynth::bench::{run_bench, BenchConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = BenchConfig::parse("n = 256\nfractions = 0, 0.5, 0.9\ntrials = 2\nseed = 11\n")?;
    let report = run_bench(&config)?;
    print!("{}", report.to_csv());
    for a in &report.aggregates {
        println!("fraction {}: mean reduction {:.1}%", a.fraction, a.mean_reduction_percent.unwrap_or(f64::NAN));
    }
    assert_eq!(report.rows.len(), 6);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
