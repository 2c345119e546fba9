//! Tag permutations: the order in which the `m`-bit tags of successive
//! states are drawn.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AssignError;
use crate::seq::low_mask;

/// Widest tag the built-in tables and integer packing support.
pub const MAX_TAG_WIDTH: usize = 32;

/// Exponents of a primitive polynomial of each degree 1..=32.
const PRIMITIVE: [&[u32]; MAX_TAG_WIDTH] = [
    &[1, 0],
    &[2, 1, 0],
    &[3, 1, 0],
    &[4, 1, 0],
    &[5, 2, 0],
    &[6, 1, 0],
    &[7, 1, 0],
    &[8, 4, 3, 2, 0],
    &[9, 4, 0],
    &[10, 3, 0],
    &[11, 2, 0],
    &[12, 6, 4, 1, 0],
    &[13, 4, 3, 1, 0],
    &[14, 5, 3, 1, 0],
    &[15, 1, 0],
    &[16, 5, 3, 2, 0],
    &[17, 3, 0],
    &[18, 7, 0],
    &[19, 5, 2, 1, 0],
    &[20, 3, 0],
    &[21, 2, 0],
    &[22, 1, 0],
    &[23, 5, 0],
    &[24, 4, 3, 1, 0],
    &[25, 3, 0],
    &[26, 6, 2, 1, 0],
    &[27, 5, 2, 1, 0],
    &[28, 3, 0],
    &[29, 2, 0],
    &[30, 6, 4, 1, 0],
    &[31, 3, 0],
    &[32, 7, 6, 2, 0],
];

/// The built-in primitive polynomial of degree `m`, bit `i` holding the
/// coefficient of `x^i`.
pub fn primitive_polynomial(m: usize) -> Option<u64> {
    let exps = PRIMITIVE.get(m.checked_sub(1)?)?;
    Some(exps.iter().fold(0u64, |acc, &e| acc | 1 << e))
}

/// Source of the tag order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Permutation {
    /// `0, 1, 2, ...`
    Counter,
    /// Successive states of a Fibonacci LFSR, then the all-zero tag.
    /// `poly: None` picks the built-in primitive polynomial for the width.
    Lfsr { poly: Option<u64>, seed: u64 },
    Explicit(Vec<u64>),
    /// A uniformly random injection into `[0, 2^m)`.
    Random { seed: u64 },
}

impl Default for Permutation {
    fn default() -> Self {
        Permutation::Lfsr { poly: None, seed: 1 }
    }
}

impl Permutation {
    /// Parses a whitespace- or comma-separated list of tags.
    pub fn explicit_from_text(text: &str) -> Result<Permutation, AssignError> {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| AssignError::InvalidPermutation(format!("bad tag {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Permutation::Explicit)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Permutation::Counter => write!(f, "counter"),
            Permutation::Lfsr { poly: None, seed: 1 } => write!(f, "lfsr"),
            Permutation::Lfsr { poly: None, seed } => write!(f, "lfsr::{seed}"),
            Permutation::Lfsr { poly: Some(poly), seed } => write!(f, "lfsr:{poly:x}:{seed}"),
            Permutation::Explicit(list) => {
                let items: Vec<String> = list.iter().map(u64::to_string).collect();
                write!(f, "explicit:{}", items.join(","))
            }
            Permutation::Random { seed } => write!(f, "random:{seed}"),
        }
    }
}

/// Accepts `counter`, `lfsr`, `lfsr:<poly-hex>[:<seed>]`, `lfsr::<seed>`,
/// `random:<seed>` and `explicit:<list>`. Reading `explicit:@file` is left
/// to the caller.
impl FromStr for Permutation {
    type Err = AssignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| AssignError::InvalidPermutation(format!("{msg} in {s:?}"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "counter" if rest.is_empty() => Ok(Permutation::Counter),
            "lfsr" => {
                let (poly, seed) = rest.split_once(':').unwrap_or((rest, ""));
                let poly = if poly.is_empty() {
                    None
                } else {
                    let hex = poly.trim_start_matches("0x");
                    Some(u64::from_str_radix(hex, 16).map_err(|_| bad("bad polynomial"))?)
                };
                let seed = if seed.is_empty() {
                    1
                } else {
                    seed.parse().map_err(|_| bad("bad seed"))?
                };
                Ok(Permutation::Lfsr { poly, seed })
            }
            "random" => Ok(Permutation::Random {
                seed: rest.parse().map_err(|_| bad("bad seed"))?,
            }),
            "explicit" if rest.starts_with('@') => Err(bad("file lists must be read by the caller")),
            "explicit" => Permutation::explicit_from_text(rest),
            _ => Err(bad("unknown permutation")),
        }
    }
}

/// A permutation bound to a tag width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSpec {
    pub kind: Permutation,
    pub m: usize,
}

/// One step of the Fibonacci LFSR: every bit moves one place down and the
/// top bit becomes the parity of the tapped bits.
pub fn lfsr_step(state: u64, poly: u64, m: usize) -> u64 {
    let taps = poly & low_mask(m);
    let feedback = (state & taps).count_ones() as u64 & 1;
    (state >> 1) | feedback << (m - 1)
}

/// The first `r` tags of `spec`, pairwise distinct and below `2^m`.
pub fn expand_permutation(spec: &PermutationSpec, r: usize) -> Result<Vec<u64>, AssignError> {
    let m = spec.m;
    if m == 0 || m > MAX_TAG_WIDTH {
        return Err(AssignError::TagWidth { m });
    }
    let space = 1u64 << m;
    let short = |available: u64| AssignError::PermutationTooShort {
        needed: r,
        available: available as usize,
    };
    if r as u64 > space {
        return Err(short(space));
    }
    match &spec.kind {
        Permutation::Counter => Ok((0..r as u64).collect()),
        Permutation::Lfsr { poly, seed } => {
            let poly = match poly {
                Some(poly) => *poly,
                None => primitive_polynomial(m).ok_or(AssignError::TagWidth { m })?,
            };
            if poly >> m != 1 || poly & 1 == 0 {
                return Err(AssignError::InvalidPermutation(format!(
                    "polynomial {poly:x} is not of degree {m} with a constant term"
                )));
            }
            if *seed == 0 || *seed >= space {
                return Err(AssignError::InvalidPermutation(format!(
                    "LFSR seed {seed} must be a nonzero {m}-bit value"
                )));
            }
            let mut out = Vec::with_capacity(r);
            let mut state = *seed;
            while out.len() < r {
                out.push(state);
                state = lfsr_step(state, poly, m);
                if state == *seed {
                    break;
                }
            }
            if out.len() < r {
                // the zero tag closes a maximal cycle
                if out.len() as u64 == space - 1 {
                    out.push(0);
                } else {
                    return Err(short(out.len() as u64));
                }
            }
            Ok(out)
        }
        Permutation::Explicit(list) => {
            if list.len() < r {
                return Err(short(list.len() as u64));
            }
            let mut seen = HashSet::with_capacity(r);
            for &tag in &list[..r] {
                if tag >= space {
                    return Err(AssignError::InvalidPermutation(format!(
                        "tag {tag} does not fit in {m} bits"
                    )));
                }
                if !seen.insert(tag) {
                    return Err(AssignError::InvalidPermutation(format!("tag {tag} repeats")));
                }
            }
            Ok(list[..r].to_vec())
        }
        Permutation::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(rand::seq::index::sample(&mut rng, space as usize, r)
                .into_iter()
                .map(|i| i as u64)
                .collect())
        }
    }
}
