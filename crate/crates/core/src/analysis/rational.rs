//! Small-denominator rationals near a measured factor.
//!
//! Candidates are found by walking the Stern-Brocot tree of each unit
//! interval the tolerance window touches: every node is the mediant of its
//! two bounding ancestors, every positive reduced fraction occurs exactly
//! once, and denominators grow along every path. A subtree is skipped when
//! its interval misses the window or its root already exceeds the
//! denominator cap, so the search is exhaustive without scanning all `q`.
//! The continued-fraction convergents of `x` are the nodes on the path
//! toward `x` and therefore show up whenever they fall in the window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalCandidate {
    pub numerator: u64,
    pub denominator: u64,
    /// `|numerator / denominator - x|`.
    pub distance: f64,
}

fn distance(p: u64, q: u64, x: f64) -> f64 {
    (p as f64 / q as f64 - x).abs()
}

/// All reduced positive `p / q` with `q <= max_denominator` and
/// `|p / q - x| <= tolerance`, nearest first (ties: smaller denominator).
pub fn rational_candidates(
    x: f64,
    max_denominator: u64,
    tolerance: f64,
) -> Result<Vec<RationalCandidate>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "x must be positive and finite, got {x}"
        )));
    }
    if max_denominator == 0 {
        return Err(Error::domain("max denominator must be at least 1"));
    }
    if !(tolerance >= 0.0) || !tolerance.is_finite() {
        return Err(Error::domain(format!(
            "tolerance must be non-negative, got {tolerance}"
        )));
    }
    if x + tolerance >= 1e15 {
        return Err(Error::domain("x is too large for exact enumeration"));
    }
    let lo = x - tolerance;
    let hi = x + tolerance;
    // Pruning uses a slightly widened window so rounding never drops a node.
    let slack = 4.0 * f64::EPSILON * hi.abs().max(1.0);
    let (wlo, whi) = (lo - slack, hi + slack);

    let mut found = Vec::new();
    let mut keep = |p: u64, q: u64| {
        if p > 0 && distance(p, q, x) <= tolerance {
            found.push(RationalCandidate {
                numerator: p,
                denominator: q,
                distance: distance(p, q, x),
            });
        }
    };

    let first = lo.max(0.0).floor() as u64;
    let last = hi.floor() as u64;
    for n in first..=last {
        keep(n, 1);
        // Open interval (n/1, (n+1)/1) as (a/b, c/d).
        let mut stack = vec![(n, 1u64, n + 1, 1u64)];
        while let Some((a, b, c, d)) = stack.pop() {
            let (p, q) = (a + c, b + d);
            if q > max_denominator {
                continue;
            }
            keep(p, q);
            let v = p as f64 / q as f64;
            if v > wlo && (a as f64 / b as f64) < whi {
                stack.push((a, b, p, q));
            }
            if v < whi && (c as f64 / d as f64) > wlo {
                stack.push((p, q, c, d));
            }
        }
    }
    found.sort_by(|l, r| {
        l.distance
            .total_cmp(&r.distance)
            .then(l.denominator.cmp(&r.denominator))
    });
    Ok(found)
}

/// Continued-fraction convergents of `x` with denominator at most
/// `max_denominator`.
pub fn convergents(x: f64, max_denominator: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    if !(x > 0.0) || !x.is_finite() || max_denominator == 0 {
        return out;
    }
    let (mut p_prev, mut q_prev) = (1u64, 0u64);
    let (mut p, mut q) = (x.floor() as u64, 1u64);
    out.push((p, q));
    let mut frac = x - x.floor();
    while frac > 1e-12 {
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as u64;
        let (Some(p_next), Some(q_next)) = (
            a.checked_mul(p).and_then(|v| v.checked_add(p_prev)),
            a.checked_mul(q).and_then(|v| v.checked_add(q_prev)),
        ) else {
            break;
        };
        if q_next > max_denominator {
            break;
        }
        (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
        out.push((p, q));
    }
    out
}
