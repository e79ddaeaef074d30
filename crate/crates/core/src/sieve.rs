//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! A [`SieveWindow`] stores one bit per odd number in `[lo, hi]`; the prime 2
//! is tracked separately. Windows are filled block by block so the working set
//! of the crossing-off loop stays in cache, after a pre-sieve that stamps out
//! the multiples of 3, 5, 7, 11 and 13 with a periodic bit pattern.
//!
//! Base primes up to `sqrt(hi)` live in a cache owned by [`Sieve`]. The cache
//! only ever grows and is shared behind an `Arc`, so concurrent callers sieving
//! disjoint ranges read it without contention.

use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numbers per segment when none is configured.
pub const DEFAULT_SEGMENT_LENGTH: u64 = 10_000_000;

/// Largest `hi - lo + 1` a single call may materialise.
pub const DEFAULT_BUFFER_BUDGET: u64 = 1 << 30;

/// Largest number any window may reach.
pub const MAX_SUPPORTED: u64 = 10_000_000_000_000_000;

/// Bits per cache block of the crossing-off loop (32 KiB).
const BLOCK_BITS: usize = 1 << 18;

/// Odd primes removed by the periodic pre-sieve.
const PRESIEVE_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const PRESIEVE_PERIOD: usize = 3 * 5 * 7 * 11 * 13;

/// Inclusive range `[lo, hi]` with `1 <= lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RangeBounds {
    lo: u64,
    hi: u64,
}

impl RangeBounds {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 {
            return Err(Error::domain("range must start at 1 or above"));
        }
        if hi < lo {
            return Err(Error::domain(format!("empty range [{lo}, {hi}]")));
        }
        if hi > MAX_SUPPORTED {
            return Err(Error::domain(format!(
                "upper bound {hi} exceeds the supported maximum {MAX_SUPPORTED}"
            )));
        }
        Ok(RangeBounds { lo, hi })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Number of integers in the range.
    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n <= self.hi
    }
}

/// The primes of a range, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSegment {
    bounds: RangeBounds,
    primes: Vec<u64>,
}

impl PrimeSegment {
    /// Wraps an explicit list. The list must be strictly increasing and lie in
    /// `bounds`; primality is the caller's responsibility.
    pub fn from_sorted(bounds: RangeBounds, primes: Vec<u64>) -> Result<Self> {
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("prime list is not strictly increasing"));
        }
        if let (Some(&first), Some(&last)) = (primes.first(), primes.last()) {
            if !bounds.contains(first) || !bounds.contains(last) {
                return Err(Error::domain("prime list escapes its bounds"));
            }
        }
        Ok(PrimeSegment { bounds, primes })
    }

    pub fn bounds(&self) -> RangeBounds {
        self.bounds
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn into_primes(self) -> Vec<u64> {
        self.primes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    pub segment_length: u64,
    pub buffer_budget: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_length: DEFAULT_SEGMENT_LENGTH,
            buffer_budget: DEFAULT_BUFFER_BUDGET,
        }
    }
}

#[derive(Debug)]
struct BasePrimes {
    limit: u64,
    /// All primes up to `limit`, including 2.
    primes: Vec<u32>,
}

/// Segmented sieve with a shared base-prime cache.
#[derive(Debug)]
pub struct Sieve {
    config: SieveConfig,
    base: RwLock<Arc<BasePrimes>>,
}

impl Default for Sieve {
    fn default() -> Self {
        Sieve::new(SieveConfig::default()).expect("default config is valid")
    }
}

impl Sieve {
    pub fn new(config: SieveConfig) -> Result<Self> {
        if config.segment_length == 0 {
            return Err(Error::domain("segment length must be positive"));
        }
        if config.buffer_budget == 0 {
            return Err(Error::domain("buffer budget must be positive"));
        }
        Ok(Sieve {
            config,
            base: RwLock::new(Arc::new(BasePrimes {
                limit: 1,
                primes: Vec::new(),
            })),
        })
    }

    pub fn with_segment_length(segment_length: u64) -> Result<Self> {
        Sieve::new(SieveConfig {
            segment_length,
            ..SieveConfig::default()
        })
    }

    pub fn config(&self) -> SieveConfig {
        self.config
    }

    fn base_cache(&self, limit: u64) -> Arc<BasePrimes> {
        {
            let cached = self.base.read().expect("base prime cache poisoned");
            if cached.limit >= limit {
                return Arc::clone(&cached);
            }
        }
        let mut slot = self.base.write().expect("base prime cache poisoned");
        if slot.limit < limit {
            let target = limit.max(slot.limit.saturating_mul(2)).max(1 << 16);
            *slot = Arc::new(BasePrimes {
                limit: target,
                primes: simple_sieve(target),
            });
        }
        Arc::clone(&slot)
    }

    fn check_budget(&self, bounds: RangeBounds) -> Result<()> {
        if bounds.len() > self.config.buffer_budget {
            return Err(Error::BufferBudget {
                requested: bounds.len(),
                budget: self.config.buffer_budget,
            });
        }
        Ok(())
    }

    /// Bitmap of the primes in `bounds`, sieved in one piece.
    pub fn window(&self, bounds: RangeBounds) -> Result<SieveWindow> {
        self.check_budget(bounds)?;
        let base = self.base_cache(bounds.hi.isqrt());
        Ok(SieveWindow::sieve(bounds, &base.primes))
    }

    /// All primes in `[2, n]`.
    pub fn primes_up_to(&self, n: u64) -> Result<PrimeSegment> {
        if n < 2 {
            return Err(Error::domain(format!("no primes below 2 (got n = {n})")));
        }
        self.primes_in_range(RangeBounds::new(1, n)?)
    }

    /// Exactly the primes in `[lo, hi]`, produced segment by segment.
    pub fn primes_in_range(&self, bounds: RangeBounds) -> Result<PrimeSegment> {
        self.check_budget(bounds)?;
        let mut primes = Vec::new();
        for chunk in split(bounds, self.config.segment_length) {
            let base = self.base_cache(chunk.hi.isqrt());
            SieveWindow::sieve(chunk, &base.primes).append_primes(&mut primes);
        }
        Ok(PrimeSegment { bounds, primes })
    }

    /// Number of primes up to `n`, without materialising the list.
    pub fn count_primes(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(Error::domain(format!("no primes below 2 (got n = {n})")));
        }
        let bounds = RangeBounds::new(1, n)?;
        Ok(split(bounds, self.config.segment_length)
            .map(|chunk| {
                let base = self.base_cache(chunk.hi.isqrt());
                SieveWindow::sieve(chunk, &base.primes).count()
            })
            .sum())
    }
}

/// Consecutive sub-ranges of `bounds` of at most `len` numbers.
pub(crate) fn split(bounds: RangeBounds, len: u64) -> impl Iterator<Item = RangeBounds> {
    let mut next = Some(bounds.lo);
    std::iter::from_fn(move || {
        let lo = next?;
        let hi = lo.saturating_add(len - 1).min(bounds.hi);
        next = (hi < bounds.hi).then_some(hi + 1);
        Some(RangeBounds { lo, hi })
    })
}

fn default_sieve() -> &'static Sieve {
    static SIEVE: OnceLock<Sieve> = OnceLock::new();
    SIEVE.get_or_init(Sieve::default)
}

/// All primes in `[2, n]` using the process-wide default sieve.
pub fn primes_up_to(n: u64) -> Result<PrimeSegment> {
    default_sieve().primes_up_to(n)
}

/// The primes in `bounds` using the process-wide default sieve.
pub fn primes_in_range(bounds: RangeBounds) -> Result<PrimeSegment> {
    default_sieve().primes_in_range(bounds)
}

/// pi(n) using the process-wide default sieve.
pub fn count_primes(n: u64) -> Result<u64> {
    default_sieve().count_primes(n)
}

/// Plain byte sieve for the base primes.
fn simple_sieve(limit: u64) -> Vec<u32> {
    let limit = usize::try_from(limit).expect("base prime limit fits in memory");
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(u32::try_from(i).expect("base primes fit in u32"));
        let mut j = i.saturating_mul(i);
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// One bit per odd number of `[lo, hi]`; bit `i` stands for `first_odd + 2 i`.
#[derive(Debug, Clone)]
pub struct SieveWindow {
    bounds: RangeBounds,
    first_odd: u64,
    bits: usize,
    /// One trailing zero word so unaligned reads never index out of range.
    words: Vec<u64>,
    has_two: bool,
}

impl SieveWindow {
    fn empty(bounds: RangeBounds) -> Self {
        let first_odd = bounds.lo | 1;
        let bits = if first_odd > bounds.hi {
            0
        } else {
            ((bounds.hi - first_odd) / 2 + 1) as usize
        };
        SieveWindow {
            bounds,
            first_odd,
            bits,
            words: vec![0; bits.div_ceil(64) + 1],
            has_two: bounds.contains(2),
        }
    }

    /// Builds a window from an explicit prime list, e.g. one assembled by a
    /// caller from several segments. Values outside `bounds` are rejected.
    pub fn from_segment(segment: &PrimeSegment) -> Result<Self> {
        let mut window = SieveWindow::empty(segment.bounds);
        for &p in segment.primes() {
            if p == 2 {
                continue;
            }
            if p % 2 == 0 {
                return Err(Error::domain(format!("{p} is even and cannot be prime")));
            }
            let i = ((p - window.first_odd) / 2) as usize;
            window.words[i / 64] |= 1 << (i % 64);
        }
        if !segment.primes().contains(&2) {
            window.has_two = false;
        }
        Ok(window)
    }

    fn sieve(bounds: RangeBounds, base: &[u32]) -> Self {
        let mut window = SieveWindow::empty(bounds);
        if window.bits == 0 {
            return window;
        }
        window.presieve();

        let hi = bounds.hi;
        let first_odd = window.first_odd;
        let sieving: Vec<u64> = base
            .iter()
            .map(|&q| q as u64)
            .skip_while(|&q| q <= 13)
            .take_while(|&q| q * q <= hi)
            .collect();
        let mut next: Vec<usize> = sieving
            .iter()
            .map(|&q| {
                let mut start = (q * q).max(first_odd.div_ceil(q) * q);
                if start % 2 == 0 {
                    start += q;
                }
                ((start - first_odd) / 2) as usize
            })
            .collect();

        let bits = window.bits;
        let words = &mut window.words;
        let mut block_start = 0;
        while block_start < bits {
            let block_end = (block_start + BLOCK_BITS).min(bits);
            for (q, idx) in sieving.iter().zip(next.iter_mut()) {
                let step = *q as usize;
                let mut i = *idx;
                while i < block_end {
                    words[i >> 6] &= !(1u64 << (i & 63));
                    i += step;
                }
                *idx = i;
            }
            block_start = block_end;
        }

        if first_odd == 1 {
            window.words[0] &= !1;
        }
        for q in PRESIEVE_PRIMES {
            if bounds.contains(q) {
                let i = ((q - first_odd) / 2) as usize;
                window.words[i / 64] |= 1 << (i % 64);
            }
        }
        window
    }

    /// Stamps the periodic pattern of numbers coprime to 3*5*7*11*13.
    fn presieve(&mut self) {
        let pattern = presieve_pattern();
        // Odd n = 2g + 1; divisibility by the pre-sieve primes depends on g mod period.
        let g0 = ((self.first_odd - 1) / 2 % PRESIEVE_PERIOD as u64) as usize;
        let n_words = self.bits.div_ceil(64);
        for (w, word) in self.words[..n_words].iter_mut().enumerate() {
            let phase = (g0 + w * 64) % PRESIEVE_PERIOD;
            *word = read_bits(pattern, phase);
        }
        let tail = self.bits % 64;
        if tail != 0 {
            self.words[n_words - 1] &= (1u64 << tail) - 1;
        }
    }

    pub fn bounds(&self) -> RangeBounds {
        self.bounds
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if !self.bounds.contains(n) {
            return false;
        }
        if n % 2 == 0 {
            return n == 2 && self.has_two;
        }
        let i = ((n - self.first_odd) / 2) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of primes in the window.
    pub fn count(&self) -> u64 {
        let odd: u64 = self.words.iter().map(|w| w.count_ones() as u64).sum();
        odd + self.has_two as u64
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let two = self.has_two.then_some(2);
        let first_odd = self.first_odd;
        two.into_iter()
            .chain(self.words.iter().enumerate().flat_map(move |(w, &word)| {
                let mut rest = word;
                std::iter::from_fn(move || {
                    if rest == 0 {
                        return None;
                    }
                    let bit = rest.trailing_zeros() as u64;
                    rest &= rest - 1;
                    Some(first_odd + 2 * (w as u64 * 64 + bit))
                })
            }))
    }

    fn append_primes(&self, out: &mut Vec<u64>) {
        out.extend(self.iter());
    }

    pub fn to_segment(&self) -> PrimeSegment {
        PrimeSegment {
            bounds: self.bounds,
            primes: self.iter().collect(),
        }
    }

    /// Counts odd `p` in `[lo, hi]` such that `p + 2 d` is prime for every
    /// `d` in `half_offsets`. The window must reach `hi + 2 max(d)`.
    pub(crate) fn count_shifted(&self, lo: u64, hi: u64, half_offsets: &[usize]) -> Result<u64> {
        let span = 2 * half_offsets.iter().copied().max().unwrap_or(0) as u64;
        let needed = hi.saturating_add(span);
        if needed > self.bounds.hi || lo < self.bounds.lo {
            return Err(Error::MissingLookahead {
                window_hi: self.bounds.hi,
                needed,
            });
        }
        let lo = (lo.max(self.first_odd)) | 1;
        let hi = if hi % 2 == 0 {
            hi.saturating_sub(1)
        } else {
            hi
        };
        if lo > hi || self.bits == 0 {
            return Ok(0);
        }
        let start = ((lo - self.first_odd) / 2) as usize;
        let end = ((hi - self.first_odd) / 2) as usize + 1;

        let mut total = 0u64;
        let mut pos = start;
        while pos < end {
            let mut acc = read_bits(&self.words, pos);
            for &d in half_offsets {
                if d != 0 {
                    acc &= read_bits(&self.words, pos + d);
                }
            }
            let remaining = end - pos;
            if remaining < 64 {
                acc &= (1u64 << remaining) - 1;
            }
            total += acc.count_ones() as u64;
            pos += 64;
        }
        Ok(total)
    }
}

/// 64 bits starting at bit `pos`; bits past the end read as zero.
#[inline]
fn read_bits(words: &[u64], pos: usize) -> u64 {
    let w = pos >> 6;
    let shift = pos & 63;
    let low = words.get(w).copied().unwrap_or(0) >> shift;
    if shift == 0 {
        low
    } else {
        low | words.get(w + 1).copied().unwrap_or(0) << (64 - shift)
    }
}

fn presieve_pattern() -> &'static [u64] {
    static PATTERN: OnceLock<Vec<u64>> = OnceLock::new();
    PATTERN.get_or_init(|| {
        // One period plus a word of wrap-around so any 64-bit read is contiguous.
        let len = PRESIEVE_PERIOD + 64;
        let mut words = vec![0u64; len.div_ceil(64) + 1];
        for g in 0..len {
            let n = 2 * (g % PRESIEVE_PERIOD) as u64 + 1;
            if PRESIEVE_PRIMES.iter().all(|&q| n % q != 0) {
                words[g / 64] |= 1 << (g % 64);
            }
        }
        words
    })
}
