//! Constellation offset patterns and their classification.
//!
//! A pattern `(0, a_1, ..., a_{m-1})` describes the tuple `p, p + a_1, ...`.
//! It is *admissible* when no prime `q` has every residue class mod `q` hit by
//! the offsets, and *basic* when, in addition, every offset and every pairwise
//! difference is `m`-smooth (has no prime factor above the tuple length).
//!
//! Smoothness is taken relative to `m` itself rather than to the number of
//! primes up to `m`. The two readings agree on every canonical pattern
//! returned by [`basic_pattern_for`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted offsets starting at 0; all even; at least two of them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct OffsetPattern {
    offsets: Vec<u64>,
}

impl OffsetPattern {
    /// Builds a pattern, translating it so the first offset is 0.
    pub fn new(offsets: &[u64]) -> Result<Self> {
        let mut sorted = offsets.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("repeated offset in {offsets:?}")));
        }
        if sorted.len() < 2 {
            return Err(Error::domain("a pattern needs at least two offsets"));
        }
        let base = sorted[0];
        for o in &mut sorted {
            *o -= base;
        }
        if sorted == [0, 1] {
            return Err(Error::domain(
                "pattern (0,1) is degenerate: only (2,3) can ever match",
            ));
        }
        if let Some(odd) = sorted.iter().find(|&&o| o % 2 == 1) {
            return Err(Error::domain(format!(
                "offset {odd} is odd; such patterns have at most one occurrence"
            )));
        }
        Ok(OffsetPattern { offsets: sorted })
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    /// Tuple length.
    pub fn m(&self) -> usize {
        self.offsets.len()
    }

    /// Largest offset.
    pub fn span(&self) -> u64 {
        *self.offsets.last().expect("patterns are never empty")
    }

    /// Offsets halved, i.e. distances in the odd-only sieve bitmap.
    pub(crate) fn half_offsets(&self) -> Vec<usize> {
        self.offsets.iter().map(|&o| (o / 2) as usize).collect()
    }

    /// True for two-element patterns `(0, n)`.
    pub fn is_pair(&self) -> bool {
        self.m() == 2
    }

    pub fn classify(&self) -> PatternClassification {
        let m = self.m() as u64;
        let obstruction = (2..=m).filter(|&q| is_prime_small(q)).find(|&q| {
            let mut seen = vec![false; q as usize];
            for &o in &self.offsets {
                seen[(o % q) as usize] = true;
            }
            seen.iter().all(|&s| s)
        });
        let is_admissible = obstruction.is_none();
        let smooth = self.offsets.iter().enumerate().all(|(i, &a)| {
            (a == 0 || is_smooth(a, m)) && self.offsets[..i].iter().all(|&b| is_smooth(a - b, m))
        });
        PatternClassification {
            is_admissible,
            is_basic: is_admissible && smooth,
            obstruction,
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.classify().is_admissible
    }

    pub fn is_basic(&self) -> bool {
        self.classify().is_basic
    }
}

impl TryFrom<Vec<u64>> for OffsetPattern {
    type Error = Error;

    fn try_from(offsets: Vec<u64>) -> Result<Self> {
        OffsetPattern::new(&offsets)
    }
}

impl From<OffsetPattern> for Vec<u64> {
    fn from(p: OffsetPattern) -> Self {
        p.offsets
    }
}

impl fmt::Display for OffsetPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.offsets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

/// Parses the comma-separated literal form, e.g. `"0,2,6,8"`.
impl FromStr for OffsetPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let offsets = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::domain(format!("bad offset {t:?} in pattern {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        OffsetPattern::new(&offsets)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternClassification {
    pub is_admissible: bool,
    /// Implies `is_admissible`.
    pub is_basic: bool,
    /// Smallest prime whose residues the offsets cover completely.
    pub obstruction: Option<u64>,
}

/// True iff no prime factor of `k` exceeds `bound`. `is_smooth(1, _)` holds;
/// 0 is treated as not smooth.
pub fn is_smooth(k: u64, bound: u64) -> bool {
    if k == 0 {
        return false;
    }
    let mut rest = k;
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            if d > bound {
                return false;
            }
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    // `rest` is now 1 or prime.
    rest <= bound
}

fn is_prime_small(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

const CANONICAL: [&[u64]; 5] = [
    &[0, 2],
    &[0, 2, 6],
    &[0, 2, 6, 8],
    &[0, 2, 6, 8, 12],
    &[0, 2, 6, 8, 12, 18],
];

/// The canonical basic pattern of length `m`, for `2 <= m <= 6`.
pub fn basic_pattern_for(m: usize) -> Result<OffsetPattern> {
    match m {
        2..=6 => OffsetPattern::new(CANONICAL[m - 2]),
        _ => Err(Error::domain(format!(
            "canonical basic patterns exist for m = 2..6, not {m}"
        ))),
    }
}
