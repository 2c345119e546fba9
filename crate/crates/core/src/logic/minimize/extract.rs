//! Greedy common-pair extraction across a family of AND (or OR) operand
//! sets: the pair shared by the most sets becomes one new gate, repeatedly,
//! until no pair is shared. Each extraction of a pair held by `c` sets saves
//! `c - 1` gates.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::logic::NodeId;

type Pair = (NodeId, NodeId);

fn pair(a: NodeId, b: NodeId) -> Pair {
    (a.min(b), a.max(b))
}

pub(crate) fn extract_pairs(sets: &mut [Vec<NodeId>], mut make: impl FnMut(NodeId, NodeId) -> NodeId) {
    let mut counts: HashMap<Pair, u32> = HashMap::new();
    let mut holders: HashMap<Pair, Vec<u32>> = HashMap::new();
    for (i, set) in sets.iter().enumerate() {
        for (k, &a) in set.iter().enumerate() {
            for &b in &set[k + 1..] {
                let key = pair(a, b);
                *counts.entry(key).or_insert(0) += 1;
                holders.entry(key).or_default().push(i as u32);
            }
        }
    }
    let mut heap: BinaryHeap<(u32, Reverse<Pair>)> = counts
        .iter()
        .filter(|(_, &c)| c >= 2)
        .map(|(&p, &c)| (c, Reverse(p)))
        .collect();

    while let Some((c, Reverse(key))) = heap.pop() {
        if counts.get(&key) != Some(&c) {
            continue;
        }
        let (a, b) = key;
        let z = make(a, b);
        counts.remove(&key);
        let ids = holders.remove(&key).unwrap_or_default();
        let mut touched: Vec<Pair> = Vec::new();
        for i in ids {
            let set = &mut sets[i as usize];
            if !(set.contains(&a) && set.contains(&b)) {
                continue;
            }
            set.retain(|&x| x != a && x != b);
            for &x in set.iter() {
                for y in [a, b] {
                    let k = pair(x, y);
                    if let Some(n) = counts.get_mut(&k) {
                        *n -= 1;
                        touched.push(k);
                    }
                }
            }
            if set.contains(&z) {
                continue;
            }
            for &x in set.iter() {
                let k = pair(x, z);
                *counts.entry(k).or_insert(0) += 1;
                holders.entry(k).or_default().push(i);
                touched.push(k);
            }
            set.push(z);
        }
        touched.sort_unstable();
        touched.dedup();
        for k in touched {
            match counts.get(&k) {
                Some(&0) => {
                    counts.remove(&k);
                }
                Some(&n) if n >= 2 => heap.push((n, Reverse(k))),
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(sets: &[Vec<NodeId>], made: usize) -> usize {
        made + sets.iter().map(|s| s.len().saturating_sub(1)).sum::<usize>()
    }

    #[test]
    fn shares_common_pairs() {
        let mut sets = vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 2, 3, 4]];
        let before = cost(&sets, 0);
        let mut next = 100;
        let mut made = Vec::new();
        extract_pairs(&mut sets, |a, b| {
            made.push((a, b));
            next += 1;
            next
        });
        assert_eq!(made[0], (1, 2));
        assert!(cost(&sets, made.len()) < before);
    }

    #[test]
    fn nothing_shared() {
        let mut sets = vec![vec![1, 2], vec![3, 4]];
        extract_pairs(&mut sets, |_, _| unreachable!());
        assert_eq!(sets, vec![vec![1, 2], vec![3, 4]]);
    }
}
