// Writing a synthesized machine as JSON and as a gate listing, and reading
// the JSON back.

use bmsynth::machine::{verify_against, BinaryMachine, ExportFormat};
use bmsynth::pipeline::{synthesize, SynthesisConfig};
use bmsynth::seq::parse_sequence;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a = parse_sequence("0X1X10XX0111X0X1")?;
    let s = synthesize(&a, &SynthesisConfig::presented(2))?;
    let json = s.machine.export(ExportFormat::Json);
    print!("{}", s.machine.export(ExportFormat::StructuralText));
    let back = BinaryMachine::import_json(&json)?;
    assert_eq!(back, s.machine);
    assert!(verify_against(&back, &a, 2)?.is_pass());
    println!("{} bytes of JSON, round trip ok", json.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
