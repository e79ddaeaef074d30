//! Hardy-Littlewood numbers
//!
//! `c_m = prod_{p > m} p^(m-1) (p - m) / (p - 1)^m`
//!
//! truncated at a prime bound `P`. Each factor is `1 - O(1/p^2)`, so the
//! product is accumulated as a compensated sum of
//! `ln(1 - m/p) - m ln(1 - 1/p)`, block by block over a fixed partition of
//! `(m, P]`. Blocks are merged in index order, making the result independent
//! of the thread count.
//!
//! The omitted tail satisfies
//! `0 <= -sum_{p > P} ln f_p <= sum_{n > P} m^2 / (2 n^2 (1 - m/P)) < m^2 / (2 (P - m))`,
//! which is what [`HlConstant::tail_bound`] reports.

use serde::{Deserialize, Serialize};

use super::compensated::CompensatedSum;
use crate::error::{Error, Result};
use crate::parallel::map_indexed;
use crate::sieve::{self, RangeBounds, Sieve};

/// Truncation point used when none is given.
pub const DEFAULT_PRIME_BOUND: u64 = 100_000_000;

const BLOCK_LENGTH: u64 = 10_000_000;
const MAX_M: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HlConstant {
    pub m: usize,
    pub value: f64,
    /// Largest prime included in the product.
    pub prime_bound: u64,
    /// Upper bound on `|ln(truncated) - ln(c_m)|`.
    pub tail_bound: f64,
}

fn next_prime_after(m: usize) -> u64 {
    let mut n = m as u64 + 1;
    while !(2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) {
        n += 1;
    }
    n
}

fn validate(m: usize, prime_bound: u64) -> Result<()> {
    if !(2..=MAX_M).contains(&m) {
        return Err(Error::domain(format!(
            "Hardy-Littlewood numbers are supported for m = 2..{MAX_M}, not {m}"
        )));
    }
    let first = next_prime_after(m);
    if prime_bound < first {
        return Err(Error::domain(format!(
            "prime bound {prime_bound} must be at least {first}, the first prime above {m}"
        )));
    }
    Ok(())
}

/// `c_m` truncated at `prime_bound`.
pub fn hl_constant(m: usize, prime_bound: u64, threads: usize) -> Result<HlConstant> {
    Ok(hl_constants(&[m], prime_bound, threads)?.remove(0))
}

/// Several `c_m` from a single sieve pass.
pub fn hl_constants(ms: &[usize], prime_bound: u64, threads: usize) -> Result<Vec<HlConstant>> {
    for &m in ms {
        validate(m, prime_bound)?;
    }
    let sieve = Sieve::with_segment_length(BLOCK_LENGTH)?;
    let blocks: Vec<RangeBounds> =
        sieve::split(RangeBounds::new(1, prime_bound)?, BLOCK_LENGTH).collect();
    let partials = map_indexed(blocks.len(), threads, |i| -> Result<Vec<CompensatedSum>> {
        let window = sieve.window(blocks[i])?;
        let mut sums = vec![CompensatedSum::new(); ms.len()];
        for p in window.iter() {
            let pf = p as f64;
            let log_cofactor = (-1.0 / pf).ln_1p();
            for (sum, &m) in sums.iter_mut().zip(ms) {
                if p > m as u64 {
                    let mf = m as f64;
                    sum.add((-mf / pf).ln_1p() - mf * log_cofactor);
                }
            }
        }
        Ok(sums)
    });
    let partials = partials.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ms
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let total = tree_merge(partials.iter().map(|block| block[k]).collect());
            let mf = m as f64;
            HlConstant {
                m,
                value: total.value().exp(),
                prime_bound,
                tail_bound: mf * mf / (2.0 * (prime_bound as f64 - mf)),
            }
        })
        .collect())
}

/// Pairwise merge in a fixed shape so the rounding pattern depends only on
/// the number of blocks.
fn tree_merge(mut level: Vec<CompensatedSum>) -> CompensatedSum {
    if level.is_empty() {
        return CompensatedSum::new();
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| {
                let mut s = pair[0];
                if let Some(rhs) = pair.get(1) {
                    s.merge(rhs);
                }
                s
            })
            .collect();
    }
    level[0]
}

/// `c_2 ..= c_6` at one truncation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HlTable {
    pub prime_bound: u64,
    constants: Vec<HlConstant>,
}

impl HlTable {
    pub fn compute(prime_bound: u64, threads: usize) -> Result<Self> {
        let ms: Vec<usize> = (2..=MAX_M).collect();
        Ok(HlTable {
            prime_bound,
            constants: hl_constants(&ms, prime_bound, threads)?,
        })
    }

    pub fn get(&self, m: usize) -> Result<&HlConstant> {
        self.constants
            .iter()
            .find(|c| c.m == m)
            .ok_or_else(|| Error::domain(format!("no Hardy-Littlewood number for m = {m}")))
    }

    /// Conjectured distribution factor of the canonical basic `m`-tuple.
    pub fn conjectured_pdf(&self, m: usize) -> Result<f64> {
        let (num, den) = super::conjectured_factor(m)?;
        Ok(num as f64 / den as f64 * self.get(m)?.value)
    }

    /// Conjectured distribution factor of the pair `(p, p + gap)`.
    pub fn gap_pdf(&self, gap: u64) -> Result<f64> {
        Ok(self.conjectured_pdf(2)? * super::gap_factor(gap)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct product over an explicit prime list, in plain multiplication.
    fn naive(m: usize, bound: u64) -> f64 {
        let primes = sieve::primes_up_to(bound).unwrap();
        primes
            .primes()
            .iter()
            .filter(|&&p| p > m as u64)
            .map(|&p| {
                let p = p as f64;
                p.powi(m as i32 - 1) * (p - m as f64) / (p - 1.0).powi(m as i32)
            })
            .product()
    }

    #[test]
    fn matches_naive_product_at_small_bound() {
        for m in 2..=6 {
            let c = hl_constant(m, 100_000, 1).unwrap();
            assert!((c.value - naive(m, 100_000)).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn twin_product_reading() {
        // prod (1 - 1/(p-1)^2) over odd primes equals c_2 factor by factor.
        let primes = sieve::primes_up_to(10_000).unwrap();
        let alt: f64 = primes.primes()[1..]
            .iter()
            .map(|&p| 1.0 - 1.0 / ((p - 1) as f64).powi(2))
            .product();
        assert!((hl_constant(2, 10_000, 1).unwrap().value - alt).abs() < 1e-14);
    }

    #[test]
    fn refinement_stays_within_tail_bound() {
        for m in 2..=6 {
            let coarse = hl_constant(m, 1_000_000, 2).unwrap();
            let fine = hl_constant(m, 10_000_000, 2).unwrap();
            assert!(fine.tail_bound < coarse.tail_bound);
            let diff = (coarse.value.ln() - fine.value.ln()).abs();
            assert!(
                diff < coarse.tail_bound,
                "m = {m}: {diff} vs {}",
                coarse.tail_bound
            );
            assert!(coarse.value > fine.value);
        }
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let a = hl_constants(&[2, 3, 4, 5, 6], 25_000_000, 1).unwrap();
        let b = hl_constants(&[2, 3, 4, 5, 6], 25_000_000, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn domain_checks() {
        assert!(hl_constant(1, 1000, 1).is_err());
        assert!(hl_constant(7, 1000, 1).is_err());
        assert!(hl_constant(5, 6, 1).is_err());
        assert!(hl_constant(5, 7, 1).is_ok());
        assert!(hl_constant(2, 3, 1).is_ok());
        assert!(hl_constant(2, 2, 1).is_err());
    }
}
