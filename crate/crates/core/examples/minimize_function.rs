// Don't-care-aware minimization of an incompletely specified function,
// compared with a plain sum of minterms.

use bmsynth::logic::{
    care_equivalent, minimize, naive_sum_of_minterms, CheckMode, IncompleteFunction, MinimizeOptions,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // five-input majority, but only specified on half of the points
    let rows = (0..32u64)
        .filter(|p| p % 2 == 0 || p.count_ones() == 1)
        .map(|p| (p, p.count_ones() >= 3));
    let f = IncompleteFunction::new(7, vec![0, 1, 2, 3, 4], rows)?;
    println!("{} care rows of {}", f.care_rows().len(), 1 << f.vars());

    let fs = [f];
    let net = minimize(&fs, &MinimizeOptions::default())?;
    let naive = naive_sum_of_minterms(&fs)?;
    print!("{}", net.to_structural_text());
    println!("gates: minimized {} vs naive {}", net.gate_count(), naive.gate_count());
    assert!(care_equivalent(&net, &fs, CheckMode::Exhaustive)?.is_equivalent());
    assert!(net.gate_count() <= naive.gate_count());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
