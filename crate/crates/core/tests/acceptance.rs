// Acceptance criteria, run in order with one PASS/FAIL line each.
// Built with `harness = false` so the criteria run sequentially with their own timing.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use bmsynth::analyze::{profile, select_subset, SubsetStrategy};
use bmsynth::assign::{assign_states, assign_states_minimal, format_state, Algorithm, Fill, Permutation};
use bmsynth::bench::{random_sequence, run_bench, BenchConfig};
use bmsynth::logic::{
    dependence_set, minimize, naive_sum_of_minterms, to_anf, Completion, IncompleteFunction, MinimizeOptions,
    Netlist,
};
use bmsynth::machine::{verify_against, BinaryMachine};
use bmsynth::pipeline::{default_sweep_range, synthesize, SynthesisConfig};
use bmsynth::seq::{parse_sequence, PatternSet, TernaryBit, TernarySequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Independent replay check: the machine's emitted bits agree with every
/// specified bit of `a`.
fn replays(m: &BinaryMachine, a: &TernarySequence) -> bool {
    let cycles = a.len().div_ceil(m.p());
    let emitted = m.simulate(cycles).emitted;
    a.bits().iter().zip(&emitted).all(|(b, &e)| b.admits(e))
}

fn worked_example() -> Outcome {
    let a = parse_sequence("00110111001011101100").map_err(|e| e.to_string())?;
    let perm = Permutation::Lfsr { poly: Some(0x13), seed: 1 };
    let sa = assign_states(&a, 2, &perm).map_err(|e| e.to_string())?;
    let expected = [
        "000100", "100011", "010001", "001011", "100100", "110010", "011011", "101110", "010111", "101000",
    ];
    let got: Vec<String> = sa.states().iter().map(|&s| format_state(s, sa.k())).collect();
    ensure!(got == expected, "states {got:?}");
    // x5 x4 x3 x2 -> f5 .. f0
    let table = [
        ("0001", "100011"),
        ("1000", "010001"),
        ("0100", "001011"),
        ("0010", "100100"),
        ("1001", "110010"),
        ("1100", "011011"),
        ("0110", "101110"),
        ("1011", "010111"),
        ("0101", "101000"),
    ];
    ensure!(sa.support() == [2, 3, 4, 5], "support {:?}", sa.support());
    let rows: BTreeSet<(String, String)> = sa
        .transitions()
        .iter()
        .map(|t| (format_state(t.point, 4), t.next.render(6)))
        .collect();
    let want: BTreeSet<(String, String)> = table.iter().map(|(x, f)| (x.to_string(), f.to_string())).collect();
    ensure!(rows == want, "table {rows:?}");
    let s = synthesize(&a, &SynthesisConfig { perm, ..SynthesisConfig::presented(2) }).map_err(|e| e.to_string())?;
    ensure!(replays(&s.machine, &a), "machine does not replay the sequence");
    Ok(format!("10 states, 9 table rows, {}", s.summary()))
}

fn nlfsr_equivalence() -> Outcome {
    let expected = [1, 0, 0, 0, 1, 1, 0, 1, 0, 1, 1, 1, 1, 0, 0].map(|b| b == 1);
    let nlfsr = BinaryMachine::shift_register(4, "x0 ^ x3 ^ x1 & x2 ^ x2 & x3", 0b0001).map_err(|e| e.to_string())?;
    let bm = BinaryMachine::from_expressions(4, 1, 0b0001, &[(3, "x0 ^ x3"), (2, "x3 ^ x1 & x2"), (1, "x2"), (0, "x1")])
        .map_err(|e| e.to_string())?;
    for (name, m, gates) in [("nlfsr", &nlfsr, 5), ("binary machine", &bm, 3)] {
        ensure!(m.simulate(15).emitted == expected, "{name} emits {}", m.simulate(15).emitted_string());
        ensure!(m.period(1000) == Some(15), "{name} period {:?}", m.period(1000));
        ensure!(m.gate_count() == gates, "{name} gates {}", m.gate_count());
    }
    Ok("both emit 100011010111100, period 15, gates 5 and 3".into())
}

fn baseline_goldens() -> Outcome {
    let a = parse_sequence("00101101").map_err(|e| e.to_string())?;
    for (p, k, states) in [(1, 3, vec![0, 2, 1, 4, 3, 5, 6, 7]), (2, 2, vec![0, 2, 3, 1])] {
        let sa = assign_states_minimal(&a, p, Fill::BalanceDigits).map_err(|e| e.to_string())?;
        ensure!(sa.k() == k && sa.states() == states, "p={p}: k={} states {:?}", sa.k(), sa.states());
        let s = synthesize(&a, &SynthesisConfig::baseline(p)).map_err(|e| e.to_string())?;
        ensure!(s.stages() == k && replays(&s.machine, &a), "p={p}: {}", s.summary());
    }
    Ok("3 stages at p=1, 2 stages at p=2, both verified".into())
}

fn soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let fractions = [0.0, 0.5, 0.9, 0.99];
    let mut runs = 0;
    for i in 0..100 {
        let n = rng.gen_range(8..=4096);
        let fraction = fractions[i % fractions.len()];
        let (a, _) = random_sequence(n, fraction, &mut rng);
        let hi = *default_sweep_range(n).end();
        let p = rng.gen_range(1..=hi);
        let perm = match i % 3 {
            0 => Permutation::default(),
            1 => Permutation::Counter,
            _ => Permutation::Random { seed: i as u64 },
        };
        for algorithm in [Algorithm::Baseline, Algorithm::Presented] {
            let config = SynthesisConfig {
                algorithm,
                p,
                perm: perm.clone(),
                ..Default::default()
            };
            let s = synthesize(&a, &config).map_err(|e| format!("n={n} f={fraction} p={p} {algorithm}: {e}"))?;
            let check = verify_against(&s.machine, &a, p).map_err(|e| e.to_string())?;
            ensure!(check.is_pass() && replays(&s.machine, &a), "n={n} f={fraction} p={p} {algorithm}: mismatch");
            runs += 1;
        }
    }
    Ok(format!("{runs}/200 runs verified"))
}

/// Value of `net`'s output for `target` at a support point, evaluated gate by gate.
fn eval_at(net: &Netlist, f: &IncompleteFunction, point: u64) -> bool {
    let values: Vec<bool> = net
        .inputs()
        .iter()
        .map(|s| {
            let j = f.support().iter().position(|x| x == s).expect("input in support");
            point >> j & 1 == 1
        })
        .collect();
    let index = net.outputs().keys().position(|&t| t == f.target()).expect("output present");
    net.evaluate(&values).expect("evaluates")[index]
}

fn minimizer_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut saved = 0usize;
    for _ in 0..500 {
        let v = rng.gen_range(0..=10);
        let care = rng.gen_range(0.05..=1.0);
        let support: Vec<usize> = (0..v).map(|j| j + rng.gen_range(0..3) * v).collect::<BTreeSet<_>>().into_iter().collect();
        let v = support.len();
        let rows: Vec<(u64, bool)> = (0..1u64 << v).filter_map(|p| rng.gen_bool(care).then(|| (p, rng.gen()))).collect();
        let f = IncompleteFunction::new(100, support, rows).map_err(|e| e.to_string())?;
        let fs = [f];
        let net = minimize(&fs, &MinimizeOptions::default()).map_err(|e| e.to_string())?;
        for (&point, &value) in fs[0].care_rows() {
            ensure!(eval_at(&net, &fs[0], point) == value, "v={v}: wrong at {point:#b}");
        }
        let naive = naive_sum_of_minterms(&fs).map_err(|e| e.to_string())?;
        ensure!(net.gate_count() <= naive.gate_count(), "v={v}: {} > naive {}", net.gate_count(), naive.gate_count());
        saved += naive.gate_count() - net.gate_count();
    }
    Ok(format!("500/500 care-equivalent and within the naive count ({saved} gates saved in total)"))
}

fn table_trend() -> Outcome {
    let config = BenchConfig {
        sequence_length: 1 << 12,
        dontcare_fractions: vec![0.0, 0.25, 0.5, 0.9, 0.99],
        trials: 5,
        ..Default::default()
    };
    let report = run_bench(&config).map_err(|e| e.to_string())?;
    ensure!(report.rows.iter().all(|r| r.is_ok()), "failed rows");
    let reduction: Vec<f64> = report.aggregates.iter().map(|a| a.mean_reduction_percent.unwrap_or(f64::NAN)).collect();
    let g2: Vec<f64> = report.aggregates.iter().map(|a| a.mean_g2_presented.unwrap_or(f64::NAN)).collect();
    let shown = format!("reductions {reduction:.1?}, mean G2 {g2:.1?}");
    ensure!(reduction.windows(2).all(|w| w[0] <= w[1]), "(a) not monotone: {shown}");
    ensure!(reduction[4] >= 60.0, "(b) {:.1}% < 60%: {shown}", reduction[4]);
    ensure!(g2.windows(2).all(|w| w[0] >= w[1]), "(c) G2 not monotone: {shown}");
    Ok(shown)
}

fn anf_and_dependence() -> Outcome {
    let table = |support: &[usize], f: &dyn Fn(&dyn Fn(usize) -> bool) -> bool| {
        let rows: Vec<bool> = (0..1u64 << support.len())
            .map(|p| f(&|s| p >> support.iter().position(|&x| x == s).unwrap() & 1 == 1))
            .collect();
        IncompleteFunction::from_truth_table(0, support.to_vec(), &rows).unwrap()
    };
    let f3 = to_anf(&table(&[0, 3], &|x| x(0) ^ x(3))).map_err(|e| e.to_string())?;
    let f2 = to_anf(&table(&[1, 2, 3], &|x| x(3) ^ (x(1) & x(2)))).map_err(|e| e.to_string())?;
    let set = |m: &[&[usize]]| m.iter().map(|x| x.to_vec()).collect::<BTreeSet<_>>();
    ensure!(f3.monomials() == &set(&[&[0], &[3]]), "f3 = {f3}");
    ensure!(f2.monomials() == &set(&[&[3], &[1, 2]]), "f2 = {f2}");

    let mut functions = 0u64;
    for v in 0..=4usize {
        let points = 1u32 << v;
        let full: u32 = (1 << points) - 1;
        // variable j matters for table t iff some point differs from its j-neighbour
        let low: Vec<u32> = (0..v).map(|j| (0..points).filter(|x| x >> j & 1 == 0).fold(0, |m, x| m | 1 << x)).collect();
        let depends: Vec<u8> = (0..=full)
            .map(|t| (0..v).filter(|&j| (t ^ (t >> (1 << j))) & low[j] != 0).fold(0, |m, j| m | 1 << j))
            .collect();
        let support: Vec<usize> = (0..v).collect();
        for care in 0..=full {
            // values on the care points: every submask of `care`
            let mut values = care;
            loop {
                let dc = full & !care;
                let (mut any, mut all) = (0u32, (1u32 << v) - 1);
                let mut fill = dc;
                loop {
                    let d = u32::from(depends[(values | fill) as usize]);
                    any |= d;
                    all &= d;
                    // neither set can change any further
                    if fill == 0 || (any == (1 << v) - 1 && all == 0) {
                        break;
                    }
                    fill = (fill - 1) & dc;
                }
                let rows = (0..points).filter(|x| care >> x & 1 == 1).map(|x| (x as u64, values >> x & 1 == 1));
                let f = IncompleteFunction::new(0, support.clone(), rows).unwrap();
                let to_mask = |set: BTreeSet<usize>| set.into_iter().fold(0u32, |m, j| m | 1 << j);
                ensure!(to_mask(dependence_set(&f, Completion::AnyCompletion)) == any, "any: v={v} care={care:b} values={values:b}");
                ensure!(to_mask(dependence_set(&f, Completion::AllCompletions)) == all, "all: v={v} care={care:b} values={values:b}");
                functions += 1;
                if values == 0 {
                    break;
                }
                values = (values - 1) & care;
            }
        }
    }
    Ok(format!("f3 and f2 monomials exact; dependence matched on all {functions} functions with v <= 4"))
}

fn analyzer_direction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (count, width) = (100, 128);
    let patterns: Vec<TernarySequence> = (0..count)
        .map(|i| {
            let density = if i % 20 == 7 { 0.5 } else { 0.02 };
            let bits = (0..width)
                .map(|_| if rng.gen_bool(density) { TernaryBit::from_bool(rng.gen()) } else { TernaryBit::DontCare })
                .collect();
            TernarySequence::new(bits).unwrap()
        })
        .collect();
    let ps = PatternSet::new(patterns).map_err(|e| e.to_string())?;
    let pilot = SynthesisConfig::presented(4);
    let full = profile(&ps);
    let all: Vec<usize> = (0..count).collect();
    let full_gates = bmsynth::analyze::pilot_gates(&ps, &all, &pilot).map_err(|e| e.to_string())?.ok_or("no machine")?;
    let plan = select_subset(&ps, SubsetStrategy::DropMostSpecifiedPrefix { fraction: 0.05 }, &pilot).map_err(|e| e.to_string())?;
    let dense: Vec<usize> = (0..count).filter(|i| i % 20 == 7).collect();
    ensure!(plan.dropped == dense, "dropped {:?}", plan.dropped);
    let kept = profile(&ps.subset(&plan.kept).map_err(|e| e.to_string())?);
    let drop_percent = (1.0 - kept.entropy_bits / full.entropy_bits) * 100.0;
    let kept_gates = plan.predicted_gate_count.ok_or("no kept machine")?;
    let shown = format!(
        "entropy {:.0} -> {:.0} bits (-{drop_percent:.1}%), gates {full_gates} -> {kept_gates}",
        full.entropy_bits, kept.entropy_bits
    );
    ensure!(drop_percent >= 40.0, "{shown}");
    ensure!(kept_gates < full_gates, "{shown}");
    Ok(shown)
}

fn determinism() -> Outcome {
    let config = BenchConfig::parse("n = 512\nfractions = 0, 0.5, 0.9\ntrials = 2\nseed = 5\n").map_err(|e| e.to_string())?;
    let first = run_bench(&config).map_err(|e| e.to_string())?;
    let second = run_bench(&config).map_err(|e| e.to_string())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().map_err(|e| e.to_string())?;
    let third = pool.install(|| run_bench(&config)).map_err(|e| e.to_string())?;
    for other in [&second, &third] {
        ensure!(other.to_csv() == first.to_csv(), "CSV differs");
        ensure!(other.to_json() == first.to_json(), "JSON differs");
    }
    Ok(format!("3 runs, identical {}-byte CSV and {}-byte JSON", first.to_csv().len(), first.to_json().len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("worked example golden", worked_example, Duration::from_secs(1)),
        ("NLFSR equivalence", nlfsr_equivalence, Duration::from_secs(1)),
        ("baseline goldens", baseline_goldens, Duration::from_secs(1)),
        ("end-to-end soundness", soundness, Duration::from_secs(300)),
        ("minimizer oracle", minimizer_oracle, Duration::from_secs(120)),
        ("random-sequence trend", table_trend, Duration::from_secs(1800)),
        ("ANF and dependence", anf_and_dependence, Duration::from_secs(60)),
        ("analyzer direction", analyzer_direction, Duration::from_secs(300)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = started.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({elapsed:.2?}) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({elapsed:.2?}) {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
