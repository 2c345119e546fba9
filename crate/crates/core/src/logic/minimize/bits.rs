//! Truth-table bitsets: bit `x` is set when input point `x` is in the set.

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

pub(crate) type Bits = Vec<u64>;

/// A product term. Variable `j` appears as a literal when bit `j` of `mask`
/// is set, with polarity given by bit `j` of `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Cube {
    pub mask: u32,
    pub value: u32,
}

impl Cube {
    pub const UNIVERSE: Cube = Cube { mask: 0, value: 0 };

    pub fn minterm(point: u64, vars: usize) -> Cube {
        let mask = if vars >= 32 { u32::MAX } else { (1u32 << vars) - 1 };
        Cube {
            mask,
            value: point as u32 & mask,
        }
    }

    pub fn literals(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn without(&self, var: usize) -> Cube {
        Cube {
            mask: self.mask & !(1 << var),
            value: self.value & !(1 << var),
        }
    }

    /// Smallest cube containing every point in `points`.
    pub fn supercube(points: impl IntoIterator<Item = u64>, vars: usize) -> Option<Cube> {
        let mut all_and = u32::MAX;
        let mut all_or = 0u32;
        let mut any = false;
        for p in points {
            any = true;
            all_and &= p as u32;
            all_or |= p as u32;
        }
        any.then(|| {
            let full = Cube::minterm(0, vars).mask;
            let mask = !(all_and ^ all_or) & full;
            Cube {
                mask,
                value: all_and & mask,
            }
        })
    }
}

/// Gate cost of a sum of products with free inverters.
pub(crate) fn cover_cost(cubes: &[Cube]) -> usize {
    if cubes.is_empty() {
        return 0;
    }
    let ands: usize = cubes
        .iter()
        .map(|c| (c.literals() as usize).saturating_sub(1))
        .sum();
    ands + cubes.len() - 1
}

/// True when the cover is the constant 0 or constant 1.
pub(crate) fn is_constant(cubes: &[Cube]) -> bool {
    cubes.is_empty() || cubes.iter().any(|c| c.mask == 0)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Space {
    pub vars: usize,
    pub words: usize,
    tail: u64,
}

impl Space {
    pub fn new(vars: usize) -> Space {
        let points = 1usize << vars;
        Space {
            vars,
            words: (points / 64).max(1),
            tail: if points >= 64 {
                u64::MAX
            } else {
                (1u64 << points) - 1
            },
        }
    }

    pub fn empty(&self) -> Bits {
        vec![0; self.words]
    }

    pub fn cube(&self, c: Cube) -> Bits {
        let mut low = self.tail;
        for (var, pattern) in PATTERNS.iter().enumerate().take(self.vars.min(6)) {
            if c.mask >> var & 1 == 1 {
                low &= if c.value >> var & 1 == 1 {
                    *pattern
                } else {
                    !pattern
                };
            }
        }
        let high_mask = (c.mask >> 6) as usize;
        let high_value = (c.value >> 6) as usize;
        (0..self.words)
            .map(|w| {
                if (w ^ high_value) & high_mask == 0 {
                    low
                } else {
                    0
                }
            })
            .collect()
    }

    /// Points where the XOR of the given variables is 1.
    pub fn parity(&self, vars: &[usize]) -> Bits {
        let mut out = self.empty();
        for &v in vars {
            let lit = self.cube(Cube {
                mask: 1 << v,
                value: 1 << v,
            });
            xor_assign(&mut out, &lit);
        }
        out
    }

    /// `bits` widened across variable `var` (the union with its mirror image).
    pub fn raise_into(&self, bits: &[u64], var: usize, out: &mut Bits) {
        if var < 6 {
            let shift = 1u32 << var;
            let pattern = PATTERNS[var];
            for (o, &w) in out.iter_mut().zip(bits) {
                *o = w | ((w & pattern) >> shift) | ((w & !pattern) << shift);
            }
        } else {
            let stride = 1usize << (var - 6);
            for (i, o) in out.iter_mut().enumerate() {
                *o = bits[i] | bits[i ^ stride];
            }
        }
    }
}

pub(crate) fn set(bits: &mut [u64], point: u64) {
    bits[(point / 64) as usize] |= 1 << (point % 64);
}

pub(crate) fn get(bits: &[u64], point: u64) -> bool {
    bits[(point / 64) as usize] >> (point % 64) & 1 == 1
}

pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

pub(crate) fn count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

pub(crate) fn count_and(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

pub(crate) fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&w| w == 0)
}

pub(crate) fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

pub(crate) fn and_not_assign(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= !y;
    }
}

pub(crate) fn xor_assign(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// `(a & !mask) | (b & mask)`: swaps membership between two disjoint sets
/// on the points of `mask`.
pub(crate) fn select(a: &[u64], b: &[u64], mask: &[u64]) -> Bits {
    a.iter()
        .zip(b)
        .zip(mask)
        .map(|((x, y), m)| (x & !m) | (y & m))
        .collect()
}

/// Set points in ascending order.
pub(crate) fn ones(a: &[u64]) -> impl Iterator<Item = u64> + '_ {
    a.iter().enumerate().flat_map(|(i, &w)| {
        let mut word = w;
        std::iter::from_fn(move || {
            if word == 0 {
                None
            } else {
                let bit = word.trailing_zeros() as u64;
                word &= word - 1;
                Some(i as u64 * 64 + bit)
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_cube(space: &Space, c: Cube) -> Bits {
        let mut out = space.empty();
        for p in 0..1u64 << space.vars {
            if (p as u32 ^ c.value) & c.mask == 0 {
                set(&mut out, p);
            }
        }
        out
    }

    #[test]
    fn cube_bits_match_enumeration() {
        for vars in 0..=9 {
            let space = Space::new(vars);
            let full = Cube::minterm(0, vars).mask;
            for mask in 0..=full {
                for value in [0, 0x155 & mask, 0xAA & mask, mask] {
                    let c = Cube { mask, value };
                    assert_eq!(space.cube(c), brute_cube(&space, c), "vars={vars} {c:?}");
                }
            }
        }
    }

    #[test]
    fn raise_matches_dropping_a_literal() {
        for vars in 1..=8 {
            let space = Space::new(vars);
            let c = Cube::minterm(0b1011_0110 & ((1 << vars) - 1), vars);
            let bits = space.cube(c);
            for var in 0..vars {
                let mut out = space.empty();
                space.raise_into(&bits, var, &mut out);
                assert_eq!(out, space.cube(c.without(var)));
            }
        }
    }

    #[test]
    fn supercube_and_cost() {
        let c = Cube::supercube([0b0101, 0b0111], 4).unwrap();
        assert_eq!(c, Cube { mask: 0b1101, value: 0b0101 });
        assert!(Cube::supercube(std::iter::empty(), 4).is_none());
        assert_eq!(cover_cost(&[]), 0);
        assert_eq!(cover_cost(&[Cube::UNIVERSE]), 0);
        assert_eq!(cover_cost(&[c, Cube::minterm(0, 4)]), 2 + 3 + 1);
    }

    #[test]
    fn ones_in_order() {
        let space = Space::new(8);
        let mut b = space.empty();
        for p in [3, 64, 200, 255] {
            set(&mut b, p);
        }
        assert_eq!(ones(&b).collect::<Vec<_>>(), vec![3, 64, 200, 255]);
        assert_eq!(count(&b), 4);
    }
}
