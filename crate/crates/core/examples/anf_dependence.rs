// Algebraic normal form of feedback functions and the variables they
// depend on.

use bmsynth::logic::{dependence_set, to_anf, Completion, IncompleteFunction};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // f(x1, x2, x3) = x3 xor x1 x2, as a truth table over the support
    let support = vec![1, 2, 3];
    let table: Vec<bool> = (0..8u64)
        .map(|p| (p >> 2 & 1 == 1) ^ (p & 1 == 1 && p >> 1 & 1 == 1))
        .collect();
    let f = IncompleteFunction::from_truth_table(2, support.clone(), &table)?;
    let anf = to_anf(&f)?;
    println!("f2 = {anf} (degree {})", anf.degree());

    // x1 is irrelevant on the care rows: some completion ignores it, another does not
    let g = IncompleteFunction::new(0, support, [(0b000, false), (0b100, true), (0b010, false)])?;
    let must = dependence_set(&g, Completion::AllCompletions);
    let may = dependence_set(&g, Completion::AnyCompletion);
    println!("g depends on {must:?} in every completion, on {may:?} in some");
    assert_eq!(anf.to_string(), "x1*x2 ^ x3");
    assert!(must.is_subset(&may));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
