//! Filling don't-care bits of digits before the minimal-stage assignment.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::seq::{low_mask, Digit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Fill {
    /// Choose digit values that minimize the largest occurrence count.
    #[default]
    BalanceDigits,
    Zeros,
    Random { seed: u64 },
}

impl std::fmt::Display for Fill {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fill::BalanceDigits => f.write_str("balance"),
            Fill::Zeros => f.write_str("zeros"),
            Fill::Random { seed } => write!(f, "random:{seed}"),
        }
    }
}

/// `balance`, `zeros` or `random:<seed>`.
impl std::str::FromStr for Fill {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "balance" => Ok(Fill::BalanceDigits),
            "zeros" => Ok(Fill::Zeros),
            other => other
                .strip_prefix("random:")
                .and_then(|seed| seed.parse().ok())
                .map(|seed| Fill::Random { seed })
                .ok_or_else(|| format!("unknown fill {other:?}; expected balance, zeros or random:<seed>")),
        }
    }
}

/// Above this many (group, value) pairs the exact balancing falls back to a
/// greedy pass.
const MAX_FLOW_EDGES: usize = 2_000_000;

/// Concrete values for every digit, agreeing with each specified bit.
pub fn fill_digits(digits: &[Digit], p: usize, fill: Fill) -> Vec<u64> {
    match fill {
        Fill::Zeros => digits.iter().map(|d| d.value).collect(),
        Fill::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let full = low_mask(p);
            digits
                .iter()
                .map(|d| d.value | (rng.gen::<u64>() & full & !d.care))
                .collect()
        }
        Fill::BalanceDigits => balance(digits, p),
    }
}

/// Digits sharing a care pattern and value are interchangeable.
struct Group {
    care: u64,
    value: u64,
    members: Vec<usize>,
}

fn balance(digits: &[Digit], p: usize) -> Vec<u64> {
    let full = low_mask(p);
    let mut fixed: BTreeMap<u64, usize> = BTreeMap::new();
    let mut keyed: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    let mut out: Vec<u64> = digits.iter().map(|d| d.value).collect();
    for (i, d) in digits.iter().enumerate() {
        if d.care == full {
            *fixed.entry(d.value).or_insert(0) += 1;
        } else {
            keyed.entry((d.care, d.value)).or_default().push(i);
        }
    }
    if keyed.is_empty() {
        return out;
    }
    let groups: Vec<Group> = keyed
        .into_iter()
        .map(|((care, value), members)| Group { care, value, members })
        .collect();

    let greedy = greedy_fill(&groups, &fixed, p);
    let greedy_max = max_count(&fixed, &greedy);
    let edges: usize = groups
        .iter()
        .map(|g| 1usize.checked_shl((p as u32) - g.care.count_ones()).unwrap_or(usize::MAX))
        .fold(0usize, |a, b| a.saturating_add(b));
    let chosen = if edges > MAX_FLOW_EDGES {
        greedy
    } else {
        let free: usize = groups.iter().map(|g| g.members.len()).sum();
        let floor = fixed.values().copied().max().unwrap_or(0);
        let spread = (digits.len()).div_ceil(1usize.checked_shl(p as u32).unwrap_or(usize::MAX));
        let mut lo = floor.max(spread).max(1);
        let mut hi = greedy_max;
        let mut best = greedy;
        while lo < hi {
            let mid = (lo + hi) / 2;
            match flow_fill(&groups, &fixed, p, mid, free) {
                Some(assign) => {
                    best = assign;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
        best
    };
    for (g, values) in groups.iter().zip(chosen) {
        for (&i, v) in g.members.iter().zip(values) {
            out[i] = v;
        }
    }
    out
}

fn max_count(fixed: &BTreeMap<u64, usize>, chosen: &[Vec<u64>]) -> usize {
    let mut counts = fixed.clone();
    for values in chosen {
        for &v in values {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// Values compatible with a group, ascending.
fn completions(g: &Group, p: usize) -> impl Iterator<Item = u64> {
    let free = low_mask(p) & !g.care;
    let base = g.value;
    // enumerate subsets of `free` in ascending order
    let mut sub = 0u64;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let v = base | sub;
        sub = sub.wrapping_sub(free) & free;
        done = sub == 0;
        Some(v)
    })
}

/// Most constrained groups first, each digit to its least used value.
fn greedy_fill(groups: &[Group], fixed: &BTreeMap<u64, usize>, p: usize) -> Vec<Vec<u64>> {
    let mut counts = fixed.clone();
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(groups[i].care.count_ones()), i));
    let mut chosen = vec![Vec::new(); groups.len()];
    for gi in order {
        let g = &groups[gi];
        for _ in &g.members {
            // a value never seen has count 0 and wins outright
            let mut best: Option<(usize, u64)> = None;
            for v in completions(g, p) {
                let c = counts.get(&v).copied().unwrap_or(0);
                if best.is_none_or(|(bc, _)| c < bc) {
                    best = Some((c, v));
                    if c == 0 {
                        break;
                    }
                }
            }
            let (_, v) = best.expect("a group admits at least its own value");
            *counts.entry(v).or_insert(0) += 1;
            chosen[gi].push(v);
        }
    }
    for values in &mut chosen {
        values.sort_unstable();
    }
    chosen
}

/// Routes every free digit to a value with total count at most `cap`, or
/// reports that no such fill exists.
fn flow_fill(
    groups: &[Group],
    fixed: &BTreeMap<u64, usize>,
    p: usize,
    cap: usize,
    free: usize,
) -> Option<Vec<Vec<u64>>> {
    let mut value_ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut pairs = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        for v in completions(g, p) {
            let room = cap.saturating_sub(fixed.get(&v).copied().unwrap_or(0));
            if room == 0 {
                continue;
            }
            let next = value_ids.len();
            let id = *value_ids.entry(v).or_insert(next);
            pairs.push((gi, id));
        }
    }
    let source = 0;
    let sink = 1;
    let group_node = |gi: usize| 2 + gi;
    let value_node = |id: usize| 2 + groups.len() + id;
    let mut net = Dinic::new(2 + groups.len() + value_ids.len());
    for (gi, g) in groups.iter().enumerate() {
        net.add_edge(source, group_node(gi), g.members.len());
    }
    let mut pair_edges = Vec::with_capacity(pairs.len());
    for &(gi, id) in &pairs {
        pair_edges.push(net.add_edge(group_node(gi), value_node(id), usize::MAX / 4));
    }
    for (&v, &id) in &value_ids {
        let room = cap - fixed.get(&v).copied().unwrap_or(0);
        net.add_edge(value_node(id), sink, room);
    }
    if net.max_flow(source, sink) < free {
        return None;
    }
    let values: Vec<u64> = {
        let mut by_id = vec![0u64; value_ids.len()];
        for (&v, &id) in &value_ids {
            by_id[id] = v;
        }
        by_id
    };
    let mut chosen = vec![Vec::new(); groups.len()];
    for (&(gi, id), &edge) in pairs.iter().zip(&pair_edges) {
        for _ in 0..net.flow(edge) {
            chosen[gi].push(values[id]);
        }
    }
    for values in &mut chosen {
        values.sort_unstable();
    }
    Some(chosen)
}

struct Edge {
    to: usize,
    cap: usize,
    flow: usize,
}

struct Dinic {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(nodes: usize) -> Dinic {
        Dinic {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            next: vec![0; nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: usize) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, cap, flow: 0 });
        self.edges.push(Edge { to: from, cap: 0, flow: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    fn flow(&self, edge: usize) -> usize {
        self.edges[edge].flow
    }

    fn residual(&self, e: usize) -> usize {
        let edge = &self.edges[e];
        if e % 2 == 0 {
            edge.cap - edge.flow
        } else {
            self.edges[e - 1].flow
        }
    }

    fn push(&mut self, e: usize, amount: usize) {
        if e % 2 == 0 {
            self.edges[e].flow += amount;
        } else {
            self.edges[e - 1].flow -= amount;
        }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for i in 0..self.adj[u].len() {
                let e = self.adj[u][i];
                let to = self.edges[e].to;
                if self.level[to] < 0 && self.residual(e) > 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, limit: usize) -> usize {
        if u == t {
            return limit;
        }
        while self.next[u] < self.adj[u].len() {
            let e = self.adj[u][self.next[u]];
            let to = self.edges[e].to;
            let room = self.residual(e);
            if room > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, limit.min(room));
                if got > 0 {
                    self.push(e, got);
                    return got;
                }
            }
            self.next[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut total = 0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|n| *n = 0);
            loop {
                let got = self.dfs(s, t, usize::MAX);
                if got == 0 {
                    break;
                }
                total += got;
            }
        }
        total
    }
}
