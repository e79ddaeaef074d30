//! Independent reference implementations shared by the integration tests.
//! Nothing here touches the segmented sieve or the bitmap counter.
#![allow(dead_code)]

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn trial_division_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Occurrences with smallest element `p <= limit`, by trial division.
pub fn brute_count(offsets: &[u64], limit: u64) -> u64 {
    (2..=limit)
        .filter(|&p| offsets.iter().all(|&a| is_prime(p + a)))
        .count() as u64
}

/// Whole-range byte sieve, one flag per integer in `[0, n]`.
pub struct OneShotSieve {
    prime: Vec<bool>,
}

impl OneShotSieve {
    pub fn new(n: u64) -> Self {
        let n = n as usize;
        let mut prime = vec![true; n + 1];
        prime[0] = false;
        if n >= 1 {
            prime[1] = false;
        }
        let mut i = 2;
        while i * i <= n {
            if prime[i] {
                let mut j = i * i;
                while j <= n {
                    prime[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        OneShotSieve { prime }
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.prime[n as usize]
    }

    pub fn pi(&self, n: u64) -> u64 {
        self.prime[..=n as usize].iter().filter(|&&b| b).count() as u64
    }

    /// Pattern occurrences with `p <= limit`; the sieve must reach `limit + span`.
    pub fn count(&self, offsets: &[u64], limit: u64) -> u64 {
        (2..=limit)
            .filter(|&p| offsets.iter().all(|&a| self.is_prime(p + a)))
            .count() as u64
    }
}

/// True when `value` lies in `[printed, printed + unit)`, i.e. `value`
/// truncated to the printed number of decimals equals `printed`.
pub fn matches_printed(value: f64, printed: &str) -> bool {
    let decimals = printed.split_once('.').map_or(0, |(_, f)| f.len());
    let unit = 10f64.powi(-(decimals as i32));
    let p: f64 = printed.parse().unwrap();
    (value - (p + unit / 2.0)).abs() < unit / 2.0
}

/// True when `value` rounded to the printed number of decimals equals
/// `printed`.
pub fn rounds_to(value: f64, printed: &str) -> bool {
    let decimals = printed.split_once('.').map_or(0, |(_, f)| f.len());
    format!("{value:.decimals$}") == printed
}

/// Printed figures are sometimes truncated and sometimes rounded; accept
/// either reading.
pub fn agrees_with_printed(value: f64, printed: &str) -> bool {
    matches_printed(value, printed) || rounds_to(value, printed)
}
