//! Multi-output minimization of incompletely specified functions.
//!
//! Per output: a two-level cover (exact primes for narrow supports, the
//! expand/irredundant heuristic above that), in either polarity, optionally
//! XORed with a parity of up to three inputs when that leaves a cheaper
//! residue. Across outputs: common AND pairs and common OR pairs are
//! extracted into shared gates, and the builder's structural hashing merges
//! whatever else coincides.

mod bits;
mod espresso;
mod extract;
mod qm;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use self::bits::{cover_cost, is_constant, Bits, Cube, Space};
use super::{Gate, IncompleteFunction, LogicError, Netlist, NetlistBuilder, NodeId, MAX_MINIMIZE_SUPPORT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Supports up to this width get exact prime generation.
    pub exact_limit: usize,
    /// Largest parity (in literals) tried as an XOR decomposition.
    pub max_parity: usize,
    /// Parity candidates fully minimized per output.
    pub xor_candidates: usize,
    /// Reduce/expand rounds of the heuristic cover.
    pub refine_rounds: usize,
    /// Extract shared AND/OR pairs across outputs.
    pub share: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            exact_limit: 10,
            max_parity: 3,
            xor_candidates: 3,
            refine_rounds: 2,
            share: true,
        }
    }
}

/// How one output is realized: `parity(vars) ^ (sop ^ complement)`.
#[derive(Debug, Clone)]
struct OutputPlan {
    parity: Vec<usize>,
    complement: bool,
    cubes: Vec<Cube>,
}

impl OutputPlan {
    fn cost(&self) -> usize {
        let parity = self.parity.len().saturating_sub(1);
        let join = usize::from(!self.parity.is_empty() && !is_constant(&self.cubes));
        parity + cover_cost(&self.cubes) + join
    }
}

fn two_level(space: &Space, on: &[u64], off: &[u64], opts: &MinimizeOptions) -> Vec<Cube> {
    if space.vars <= opts.exact_limit {
        qm::exact_cover(space, on, off)
    } else {
        espresso::heuristic_cover(space, on, off, opts.refine_rounds)
    }
}

/// Cheaper of the on-set cover and the complemented off-set cover.
fn best_polarity(space: &Space, on: &[u64], off: &[u64], opts: &MinimizeOptions) -> (Vec<Cube>, bool) {
    let direct = two_level(space, on, off, opts);
    if cover_cost(&direct) == 0 {
        return (direct, false);
    }
    let inverted = two_level(space, off, on, opts);
    if cover_cost(&inverted) < cover_cost(&direct) {
        (inverted, true)
    } else {
        (direct, false)
    }
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), out);
}

fn plan_output(space: &Space, on: &[u64], off: &[u64], opts: &MinimizeOptions) -> OutputPlan {
    let (cubes, complement) = best_polarity(space, on, off, opts);
    let mut best = OutputPlan {
        parity: Vec::new(),
        complement,
        cubes,
    };
    if best.cost() == 0 || opts.max_parity == 0 {
        return best;
    }
    let base_score = bits::count(on).min(bits::count(off));
    let max_parity = if space.vars > 16 {
        opts.max_parity.min(2)
    } else {
        opts.max_parity
    };
    let mut subsets = Vec::new();
    for k in 1..=max_parity.min(space.vars) {
        combinations(space.vars, k, &mut subsets);
    }
    let mut scored: Vec<(usize, Vec<usize>)> = subsets
        .into_iter()
        .filter_map(|vars| {
            let g = space.parity(&vars);
            let flipped_on = bits::count_and(off, &g);
            let kept_on = bits::count(on) - bits::count_and(on, &g);
            let residual_on = kept_on + flipped_on;
            let residual_off = bits::count(on) + bits::count(off) - residual_on;
            let score = residual_on.min(residual_off);
            (score < base_score).then_some((score, vars))
        })
        .collect();
    scored.sort_by(|a, b| (a.0, a.1.len(), &a.1).cmp(&(b.0, b.1.len(), &b.1)));
    for (_, vars) in scored.into_iter().take(opts.xor_candidates) {
        let g = space.parity(&vars);
        let residual_on: Bits = bits::select(on, off, &g);
        let residual_off: Bits = bits::select(off, on, &g);
        let (cubes, complement) = best_polarity(space, &residual_on, &residual_off, opts);
        let candidate = OutputPlan {
            parity: vars,
            complement,
            cubes,
        };
        let pure = is_constant(&candidate.cubes);
        let cost = candidate.cost();
        if cost < best.cost() || (cost == best.cost() && pure && !is_constant(&best.cubes)) {
            best = candidate;
        }
    }
    best
}

fn on_off(space: &Space, f: &IncompleteFunction) -> (Bits, Bits) {
    let mut on = space.empty();
    let mut off = space.empty();
    for (&point, &value) in f.care_rows() {
        if value {
            bits::set(&mut on, point);
        } else {
            bits::set(&mut off, point);
        }
    }
    (on, off)
}

fn common_support(fs: &[IncompleteFunction]) -> Result<Vec<usize>, LogicError> {
    let support = fs.first().map(|f| f.support().to_vec()).unwrap_or_default();
    let mut targets = BTreeSet::new();
    for f in fs {
        if f.support() != support.as_slice() {
            return Err(LogicError::MixedSupport);
        }
        if !targets.insert(f.target()) {
            return Err(LogicError::DuplicateTarget { stage: f.target() });
        }
    }
    if support.len() > MAX_MINIMIZE_SUPPORT {
        return Err(LogicError::SupportTooWide {
            vars: support.len(),
            limit: MAX_MINIMIZE_SUPPORT,
        });
    }
    Ok(support)
}

/// Builds a small netlist agreeing with every function on its care rows.
/// Deterministic: equal inputs give identical netlists.
pub fn minimize(fs: &[IncompleteFunction], opts: &MinimizeOptions) -> Result<Netlist, LogicError> {
    let support = common_support(fs)?;
    let space = Space::new(support.len());
    let plans: Vec<(usize, OutputPlan)> = fs
        .iter()
        .map(|f| {
            let (on, off) = on_off(&space, f);
            (f.target(), plan_output(&space, &on, &off, opts))
        })
        .collect();
    Ok(build(&support, &plans, opts.share))
}

fn build(support: &[usize], plans: &[(usize, OutputPlan)], share: bool) -> Netlist {
    let mut b = NetlistBuilder::with_inputs(support);
    let pos: Vec<NodeId> = support.iter().map(|&s| b.input(s)).collect();
    let neg: Vec<NodeId> = pos.iter().map(|&x| b.not(x)).collect();
    let literal = |c: &Cube, j: usize| if c.value >> j & 1 == 1 { pos[j] } else { neg[j] };

    // AND level: one operand set per non-trivial cube
    let mut cube_sets: Vec<Vec<NodeId>> = Vec::new();
    let mut cube_slots: Vec<Vec<Option<usize>>> = Vec::new();
    for (_, plan) in plans {
        let slots = plan
            .cubes
            .iter()
            .map(|c| {
                if c.mask == 0 {
                    return None;
                }
                let set: Vec<NodeId> = (0..support.len())
                    .filter(|j| c.mask >> j & 1 == 1)
                    .map(|j| literal(c, j))
                    .collect();
                cube_sets.push(set);
                Some(cube_sets.len() - 1)
            })
            .collect();
        cube_slots.push(slots);
    }
    if share {
        extract::extract_pairs(&mut cube_sets, |x, y| b.and(x, y));
    }
    let cube_nodes: Vec<NodeId> = cube_sets
        .iter_mut()
        .map(|set| {
            set.sort_unstable();
            b.and_all(set)
        })
        .collect();

    // OR level: one operand set per output
    let one = b.constant(true);
    let mut or_sets: Vec<Vec<NodeId>> = cube_slots
        .iter()
        .map(|slots| {
            let mut set: Vec<NodeId> = slots
                .iter()
                .map(|slot| slot.map_or(one, |i| cube_nodes[i]))
                .collect();
            set.sort_unstable();
            set.dedup();
            set
        })
        .collect();
    if share {
        extract::extract_pairs(&mut or_sets, |x, y| b.or(x, y));
    }

    let mut outputs = BTreeMap::new();
    for ((target, plan), set) in plans.iter().zip(or_sets.iter_mut()) {
        set.sort_unstable();
        let sop = b.or_all(set);
        let sop = if plan.complement { b.not(sop) } else { sop };
        let parity_inputs: Vec<NodeId> = plan.parity.iter().map(|&j| pos[j]).collect();
        let parity = b.xor_all(&parity_inputs);
        let node = b.xor(parity, sop);
        outputs.insert(*target, node);
    }
    b.finish(outputs)
}

/// One AND chain per on-set care row and one OR chain per output, with no
/// sharing: the reference form optimized circuits are measured against.
pub fn naive_sum_of_minterms(fs: &[IncompleteFunction]) -> Result<Netlist, LogicError> {
    let support = common_support(fs)?;
    let mut nodes: Vec<Gate> = support.iter().map(|&stage| Gate::Input { stage }).collect();
    let neg: Vec<NodeId> = (0..support.len())
        .map(|j| {
            nodes.push(Gate::Not { a: j as NodeId });
            (nodes.len() - 1) as NodeId
        })
        .collect();
    let push = |nodes: &mut Vec<Gate>, gate: Gate| {
        nodes.push(gate);
        (nodes.len() - 1) as NodeId
    };
    let mut outputs = BTreeMap::new();
    for f in fs {
        let mut terms = Vec::new();
        for (&point, _) in f.care_rows().iter().filter(|(_, &v)| v) {
            let mut acc: Option<NodeId> = None;
            for (j, &n) in neg.iter().enumerate() {
                let lit = if point >> j & 1 == 1 { j as NodeId } else { n };
                acc = Some(match acc {
                    None => lit,
                    Some(a) => push(&mut nodes, Gate::And { a, b: lit }),
                });
            }
            let term = acc.unwrap_or_else(|| push(&mut nodes, Gate::Const { value: true }));
            terms.push(term);
        }
        let mut acc: Option<NodeId> = None;
        for t in terms {
            acc = Some(match acc {
                None => t,
                Some(a) => push(&mut nodes, Gate::Or { a, b: t }),
            });
        }
        let out = acc.unwrap_or_else(|| push(&mut nodes, Gate::Const { value: false }));
        outputs.insert(f.target(), out);
    }
    Netlist::new(support, nodes, outputs)
}

/// How many care rows a verification pass inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CheckMode {
    /// Every care row.
    #[default]
    Exhaustive,
    /// A seeded random sample of care rows per function.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CareCheck {
    Equivalent,
    /// First violated care row: function target and input point.
    Counterexample { target: usize, point: u64 },
}

impl CareCheck {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, CareCheck::Equivalent)
    }
}

/// Checks that `netlist` produces the required value on care rows of every
/// function. The netlist may only read stages in each function's support.
pub fn care_equivalent(
    netlist: &Netlist,
    fs: &[IncompleteFunction],
    mode: CheckMode,
) -> Result<CareCheck, LogicError> {
    for f in fs {
        let node = *netlist
            .outputs()
            .get(&f.target())
            .ok_or(LogicError::MissingOutput { stage: f.target() })?;
        let lanes: Vec<usize> = netlist
            .inputs()
            .iter()
            .map(|&stage| {
                f.support()
                    .iter()
                    .position(|&s| s == stage)
                    .ok_or(LogicError::SupportMismatch { stage })
            })
            .collect::<Result<_, _>>()?;
        let mut rows: Vec<(u64, bool)> = f.care_rows().iter().map(|(&p, &v)| (p, v)).collect();
        if let CheckMode::Sampled { samples, seed } = mode {
            if samples < rows.len() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ f.target() as u64);
                rows.shuffle(&mut rng);
                rows.truncate(samples);
                rows.sort_unstable();
            }
        }
        for chunk in rows.chunks(64) {
            let inputs: Vec<u64> = lanes
                .iter()
                .map(|&j| {
                    chunk
                        .iter()
                        .enumerate()
                        .fold(0u64, |w, (lane, (p, _))| w | (p >> j & 1) << lane)
                })
                .collect();
            let slots = netlist.node_values(&inputs)?;
            let got = slots[node as usize];
            for (lane, &(point, value)) in chunk.iter().enumerate() {
                if (got >> lane & 1 == 1) != value {
                    return Ok(CareCheck::Counterexample {
                        target: f.target(),
                        point,
                    });
                }
            }
        }
    }
    Ok(CareCheck::Equivalent)
}
