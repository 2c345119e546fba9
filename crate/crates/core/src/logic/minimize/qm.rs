//! Exact prime generation over the ternary cube lattice, followed by an
//! essential-prime and greedy covering step.

use super::bits::{self, Bits, Cube, Space};
use super::espresso::irredundant;

/// Prime implicants of `on ∪ dc` that cover at least one on-set point.
pub(crate) fn primes(space: &Space, on: &[u64], off: &[u64]) -> Vec<Cube> {
    let v = space.vars;
    let pow3: Vec<usize> = (0..=v).map(|i| 3usize.pow(i as u32)).collect();
    let total = pow3[v];
    // implicant[t]: cube with ternary code t (digit 2 = absent literal) avoids the off-set
    let mut implicant = vec![false; total];
    let decode = |t: usize| -> Cube {
        let mut rest = t;
        let mut cube = Cube::UNIVERSE;
        for i in 0..v {
            match rest % 3 {
                0 => cube.mask |= 1 << i,
                1 => {
                    cube.mask |= 1 << i;
                    cube.value |= 1 << i;
                }
                _ => {}
            }
            rest /= 3;
        }
        cube
    };
    for t in 0..total {
        let mut rest = t;
        let mut dash = None;
        let mut point = 0u64;
        for i in 0..v {
            match rest % 3 {
                1 => point |= 1 << i,
                2 if dash.is_none() => dash = Some(i),
                _ => {}
            }
            rest /= 3;
        }
        implicant[t] = match dash {
            None => !bits::get(off, point),
            Some(i) => implicant[t - 2 * pow3[i]] && implicant[t - pow3[i]],
        };
    }
    let mut result = Vec::new();
    for t in 0..total {
        if !implicant[t] {
            continue;
        }
        let mut rest = t;
        let mut prime = true;
        for w in pow3.iter().take(v) {
            let digit = rest % 3;
            rest /= 3;
            if digit != 2 && implicant[t + (2 - digit) * w] {
                prime = false;
                break;
            }
        }
        if prime {
            let cube = decode(t);
            if bits::intersects(&space.cube(cube), on) {
                result.push(cube);
            }
        }
    }
    result
}

/// Minimum-ish sum of products: all essential primes, then the prime
/// covering the most remaining on-set points (ties: fewer literals, then
/// lower cube order), then redundant cubes dropped.
pub(crate) fn exact_cover(space: &Space, on: &[u64], off: &[u64]) -> Vec<Cube> {
    if bits::is_zero(on) {
        return Vec::new();
    }
    let primes = primes(space, on, off);
    let coverage: Vec<Bits> = primes
        .iter()
        .map(|&c| bits::and(&space.cube(c), on))
        .collect();
    let mut multiplicity = vec![0u32; 1 << space.vars];
    for cov in &coverage {
        for p in bits::ones(cov) {
            multiplicity[p as usize] += 1;
        }
    }
    let mut chosen = vec![false; primes.len()];
    let mut uncovered = on.to_vec();
    for (i, cov) in coverage.iter().enumerate() {
        if bits::ones(cov).any(|p| multiplicity[p as usize] == 1) {
            chosen[i] = true;
            bits::and_not_assign(&mut uncovered, cov);
        }
    }
    let essential = chosen.clone();
    let core_uncovered = uncovered.clone();
    while !bits::is_zero(&uncovered) {
        let mut best: Option<(usize, usize)> = None;
        for (i, cov) in coverage.iter().enumerate() {
            if chosen[i] {
                continue;
            }
            let gain = bits::count_and(cov, &uncovered);
            if gain == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((j, g)) => {
                    gain > g
                        || (gain == g
                            && (primes[i].literals(), primes[i]) < (primes[j].literals(), primes[j]))
                }
            };
            if better {
                best = Some((i, gain));
            }
        }
        let (i, _) = best.expect("every on-set point lies in some prime");
        chosen[i] = true;
        bits::and_not_assign(&mut uncovered, &coverage[i]);
    }
    let pick = |chosen: &[bool]| -> Vec<Cube> {
        primes
            .iter()
            .zip(chosen)
            .filter(|(_, &c)| c)
            .map(|(&p, _)| p)
            .collect()
    };
    let greedy = irredundant(space, on, pick(&chosen));
    if bits::is_zero(&core_uncovered) {
        return greedy;
    }

    // Exact search over the cyclic core, seeded with the greedy answer.
    let weight = |c: &Cube| (c.literals() as usize).max(1);
    let core: Vec<usize> = (0..primes.len())
        .filter(|&i| !essential[i] && bits::intersects(&coverage[i], &core_uncovered))
        .collect();
    if core.len() > SEARCH_CORE_LIMIT {
        return greedy;
    }
    let base: usize = pick(&essential).iter().map(weight).sum();
    let mut search = Search {
        coverage: &coverage,
        weights: primes.iter().map(weight).collect(),
        core,
        best_cost: greedy.iter().map(weight).sum::<usize>().saturating_sub(base),
        best: None,
        budget: SEARCH_BUDGET,
    };
    let mut stack = Vec::new();
    search.branch(&core_uncovered, 0, &mut stack);
    match search.best {
        Some(extra) => {
            let mut chosen = essential;
            for i in extra {
                chosen[i] = true;
            }
            irredundant(space, on, pick(&chosen))
        }
        None => greedy,
    }
}

const SEARCH_BUDGET: usize = 5_000;
const SEARCH_CORE_LIMIT: usize = 48;

struct Search<'a> {
    coverage: &'a [Bits],
    weights: Vec<usize>,
    core: Vec<usize>,
    best_cost: usize,
    best: Option<Vec<usize>>,
    budget: usize,
}

impl Search<'_> {
    fn branch(&mut self, uncovered: &[u64], cost: usize, stack: &mut Vec<usize>) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        let Some(point) = self.hardest_point(uncovered) else {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = Some(stack.clone());
            }
            return;
        };
        let mut options: Vec<usize> = self
            .core
            .iter()
            .copied()
            .filter(|&i| bits::get(&self.coverage[i], point))
            .collect();
        options.sort_by_key(|&i| (std::cmp::Reverse(bits::count_and(&self.coverage[i], uncovered)), self.weights[i]));
        for i in options {
            // every further cube costs at least one
            if cost + self.weights[i] >= self.best_cost {
                continue;
            }
            let mut rest = uncovered.to_vec();
            bits::and_not_assign(&mut rest, &self.coverage[i]);
            stack.push(i);
            self.branch(&rest, cost + self.weights[i], stack);
            stack.pop();
        }
    }

    /// The uncovered point with the fewest covering primes.
    fn hardest_point(&self, uncovered: &[u64]) -> Option<u64> {
        bits::ones(uncovered).min_by_key(|&p| {
            self.core
                .iter()
                .filter(|&&i| bits::get(&self.coverage[i], p))
                .count()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_sets(vars: usize, on_pts: &[u64], off_pts: &[u64]) -> (Space, Bits, Bits) {
        let space = Space::new(vars);
        let mut on = space.empty();
        let mut off = space.empty();
        for &p in on_pts {
            bits::set(&mut on, p);
        }
        for &p in off_pts {
            bits::set(&mut off, p);
        }
        (space, on, off)
    }

    #[test]
    fn textbook_primes() {
        // f = sum m(0,1,2,5,6,7) over 3 variables has six primes of two literals
        let on_pts = [0, 1, 2, 5, 6, 7];
        let off_pts = [3, 4];
        let (space, on, off) = space_sets(3, &on_pts, &off_pts);
        let p = primes(&space, &on, &off);
        assert_eq!(p.len(), 6);
        assert!(p.iter().all(|c| c.literals() == 2));
        let cover = exact_cover(&space, &on, &off);
        assert_eq!(cover.len(), 3);
    }

    #[test]
    fn dont_cares_grow_cubes() {
        // on = {0b11}, off = {0b00}: x0 alone (or x1 alone) suffices
        let (space, on, off) = space_sets(2, &[3], &[0]);
        let cover = exact_cover(&space, &on, &off);
        assert_eq!(cover.len(), 1);
        assert_eq!(cover[0].literals(), 1);
    }

    #[test]
    fn tautology_and_empty() {
        let (space, on, off) = space_sets(3, &[1, 6], &[]);
        assert_eq!(exact_cover(&space, &on, &off), vec![Cube::UNIVERSE]);
        let (space, on, off) = space_sets(3, &[], &[2]);
        assert!(exact_cover(&space, &on, &off).is_empty());
    }
}
