//! Heuristic two-level minimization for wide supports: expand on-set points
//! into primes, drop redundant cubes, then reduce/re-expand while the cover
//! keeps getting cheaper.

use super::bits::{self, cover_cost, Bits, Cube, Space};

/// Widens `cube` one literal at a time without touching `off`, preferring the
/// literal whose removal covers the most points of `attract` (ties: lowest
/// variable). The result is prime.
fn expand(space: &Space, cube: Cube, off: &[u64], attract: &[u64]) -> (Cube, Bits) {
    let mut cube = cube;
    let mut current = space.cube(cube);
    let mut trial = space.empty();
    let mut best_bits = space.empty();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for var in 0..space.vars {
            if cube.mask >> var & 1 == 0 {
                continue;
            }
            space.raise_into(&current, var, &mut trial);
            if bits::intersects(&trial, off) {
                continue;
            }
            let gain = bits::count_and(&trial, attract);
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((var, gain));
                std::mem::swap(&mut best_bits, &mut trial);
            }
        }
        match best {
            Some((var, _)) => {
                cube = cube.without(var);
                std::mem::swap(&mut current, &mut best_bits);
            }
            None => return (cube, current),
        }
    }
}

/// Removes cubes whose on-set points are all covered by the rest, visiting
/// the smallest cubes (most literals) first.
pub(crate) fn irredundant(space: &Space, on: &[u64], mut cover: Vec<Cube>) -> Vec<Cube> {
    let coverage: Vec<Bits> = cover
        .iter()
        .map(|&c| bits::and(&space.cube(c), on))
        .collect();
    let mut multiplicity = vec![0u32; 1 << space.vars];
    for cov in &coverage {
        for p in bits::ones(cov) {
            multiplicity[p as usize] += 1;
        }
    }
    let mut order: Vec<usize> = (0..cover.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(cover[i].literals()), cover[i]));
    let mut keep = vec![true; cover.len()];
    for i in order {
        if bits::ones(&coverage[i]).all(|p| multiplicity[p as usize] >= 2) {
            keep[i] = false;
            for p in bits::ones(&coverage[i]) {
                multiplicity[p as usize] -= 1;
            }
        }
    }
    let mut idx = 0;
    cover.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });
    cover.sort();
    cover
}

pub(crate) fn heuristic_cover(space: &Space, on: &[u64], off: &[u64], rounds: usize) -> Vec<Cube> {
    if bits::is_zero(on) {
        return Vec::new();
    }
    if bits::is_zero(off) {
        return vec![Cube::UNIVERSE];
    }
    let mut uncovered = on.to_vec();
    let mut cover = Vec::new();
    for point in bits::ones(on) {
        if !bits::get(&uncovered, point) {
            continue;
        }
        let (cube, covered) = expand(space, Cube::minterm(point, space.vars), off, &uncovered);
        bits::and_not_assign(&mut uncovered, &covered);
        cover.push(cube);
    }
    let mut cover = irredundant(space, on, cover);
    let mut cost = cover_cost(&cover);
    for _ in 0..rounds {
        let next = reduce_expand(space, on, off, &cover);
        let next = irredundant(space, on, next);
        let next_cost = cover_cost(&next);
        if next_cost >= cost {
            break;
        }
        cover = next;
        cost = next_cost;
    }
    cover
}

/// Shrinks each cube in turn to the supercube of the on-set points only it
/// covers, then re-expands it toward on-set points it did not cover before.
/// Cubes are processed sequentially so coverage is never lost.
fn reduce_expand(space: &Space, on: &[u64], off: &[u64], cover: &[Cube]) -> Vec<Cube> {
    let mut multiplicity = vec![0u32; 1 << space.vars];
    for &c in cover {
        for p in bits::ones(&bits::and(&space.cube(c), on)) {
            multiplicity[p as usize] += 1;
        }
    }
    let mut result = Vec::with_capacity(cover.len());
    for &cube in cover {
        let old = space.cube(cube);
        let covered = bits::and(&old, on);
        for p in bits::ones(&covered) {
            multiplicity[p as usize] -= 1;
        }
        let unique = bits::ones(&covered).filter(|&p| multiplicity[p as usize] == 0);
        let Some(reduced) = Cube::supercube(unique, space.vars) else {
            continue;
        };
        let mut attract = on.to_vec();
        bits::and_not_assign(&mut attract, &old);
        let (grown, grown_bits) = expand(space, reduced, off, &attract);
        for p in bits::ones(&bits::and(&grown_bits, on)) {
            multiplicity[p as usize] += 1;
        }
        result.push(grown);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn covers_exactly_the_care_set() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for vars in [3usize, 6, 9, 12] {
            let space = Space::new(vars);
            let mut on = space.empty();
            let mut off = space.empty();
            for p in 0..1u64 << vars {
                match rng.gen_range(0..4) {
                    0 | 1 => bits::set(&mut on, p),
                    2 => bits::set(&mut off, p),
                    _ => {}
                }
            }
            let cover = heuristic_cover(&space, &on, &off, 2);
            let mut union = space.empty();
            for &c in &cover {
                let cb = space.cube(c);
                assert!(!bits::intersects(&cb, &off));
                for (u, w) in union.iter_mut().zip(&cb) {
                    *u |= w;
                }
            }
            assert_eq!(bits::and(&union, &on), on);
        }
    }

    #[test]
    fn single_literal_function() {
        let space = Space::new(12);
        let on = space.cube(Cube { mask: 1 << 7, value: 1 << 7 });
        let off = space.cube(Cube { mask: 1 << 7, value: 0 });
        let cover = heuristic_cover(&space, &on, &off, 2);
        assert_eq!(cover, vec![Cube { mask: 1 << 7, value: 1 << 7 }]);
    }
}
