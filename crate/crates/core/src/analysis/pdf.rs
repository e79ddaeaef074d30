//! Distribution-factor estimates: `C = N(n) / Li_m(n)`.

use serde::{Deserialize, Serialize};

use super::hl::{HlConstant, HlTable};
use super::logint::{log_integral, LogIntegralValue, DEFAULT_REL_TOL};
use crate::counter::ConstellationCount;
use crate::error::{Error, Result};
use crate::patterns::{basic_pattern_for, OffsetPattern};

/// Below this limit no estimate is produced.
pub const MIN_ESTIMATE_LIMIT: u64 = 100;
/// Below this limit estimates carry a warning.
pub const RELIABLE_ESTIMATE_LIMIT: u64 = 10_000;

/// Rational factor `num / den` with `C(m) = (num / den) c_m` for the
/// canonical basic `m`-tuple.
pub fn conjectured_factor(m: usize) -> Result<(u64, u64)> {
    match m {
        2 => Ok((2, 1)),
        3 => Ok((9, 2)),
        4 => Ok((27, 2)),
        5 | 6 => Err(Error::NoConjecture { m }),
        _ => Err(Error::domain(format!("no conjecture for m = {m}"))),
    }
}

/// `prod (q - 1) / (q - 2)` over the odd primes `q` dividing an even gap.
pub fn gap_factor(gap: u64) -> Result<f64> {
    if gap < 2 || gap % 2 == 1 {
        return Err(Error::domain(format!(
            "gap must be even and at least 2, got {gap}"
        )));
    }
    let (mut num, mut den) = (1u128, 1u128);
    let mut rest = gap;
    while rest % 2 == 0 {
        rest /= 2;
    }
    let mut q = 3;
    while q * q <= rest {
        if rest % q == 0 {
            num *= (q - 1) as u128;
            den *= (q - 2) as u128;
            while rest % q == 0 {
                rest /= q;
            }
        }
        q += 2;
    }
    if rest > 1 {
        num *= (rest - 1) as u128;
        den *= (rest - 2) as u128;
    }
    Ok(num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfEstimate {
    pub pattern: OffsetPattern,
    pub limit: u64,
    pub count: u64,
    pub denominator: LogIntegralValue,
    pub c_estimate: f64,
    pub conjectured: Option<f64>,
    /// `|c_estimate - conjectured|`.
    pub deviation: Option<f64>,
    /// `|c_estimate - conjectured| / conjectured`.
    pub relative_deviation: Option<f64>,
    pub warnings: Vec<String>,
}

/// The conjectured factor for `pattern`, when one is known: pairs `(0, n)`
/// through the gap formula, and the canonical basic tuples for `m <= 4` (or
/// their mirror images).
pub fn conjecture_for(pattern: &OffsetPattern, table: &HlTable) -> Option<f64> {
    if pattern.is_pair() {
        return table.gap_pdf(pattern.span()).ok();
    }
    let m = pattern.m();
    if m > 4 {
        return None;
    }
    let canonical = basic_pattern_for(m).ok()?;
    let span = pattern.span();
    let mirrored: Vec<u64> = pattern.offsets().iter().rev().map(|&a| span - a).collect();
    if pattern == &canonical || mirrored == canonical.offsets() {
        table.conjectured_pdf(m).ok()
    } else {
        None
    }
}

pub fn estimate_pdf(count: &ConstellationCount, table: Option<&HlTable>) -> Result<PdfEstimate> {
    estimate_pdf_for(count.job.pattern(), count.job.limit(), count.count, table)
}

/// Estimate from a raw count, e.g. one published elsewhere.
pub fn estimate_pdf_for(
    pattern: &OffsetPattern,
    limit: u64,
    count: u64,
    table: Option<&HlTable>,
) -> Result<PdfEstimate> {
    if limit < MIN_ESTIMATE_LIMIT {
        return Err(Error::domain(format!(
            "limit {limit} is too small for a density estimate (need at least {MIN_ESTIMATE_LIMIT})"
        )));
    }
    let mut warnings = Vec::new();
    if limit < RELIABLE_ESTIMATE_LIMIT {
        warnings.push(format!(
            "limit {limit} is below {RELIABLE_ESTIMATE_LIMIT}; the estimate is not meaningful"
        ));
    }
    let denominator = log_integral(pattern.m() as u32, limit as f64, DEFAULT_REL_TOL)?;
    let c_estimate = count as f64 / denominator.value;
    let conjectured = table.and_then(|t| conjecture_for(pattern, t));
    Ok(PdfEstimate {
        pattern: pattern.clone(),
        limit,
        count,
        denominator,
        c_estimate,
        conjectured,
        deviation: conjectured.map(|c| (c_estimate - c).abs()),
        relative_deviation: conjectured.map(|c| (c_estimate - c).abs() / c),
        warnings,
    })
}

/// `c_estimate / c_m`: the empirical rational factor.
pub fn ratio_to_hl(estimate: &PdfEstimate, constant: &HlConstant) -> Result<f64> {
    if constant.m != estimate.pattern.m() {
        return Err(Error::domain(format!(
            "pattern has m = {} but the constant is c_{}",
            estimate.pattern.m(),
            constant.m
        )));
    }
    Ok(estimate.c_estimate / constant.value)
}

/// Flat export row shared by the JSON and CSV writers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfRecord {
    pub pattern: String,
    pub limit: u64,
    pub count: u64,
    pub li_value: f64,
    pub c_estimate: f64,
    pub conjectured: Option<f64>,
    pub deviation: Option<f64>,
    pub relative_deviation: Option<f64>,
    pub c_m: Option<f64>,
    pub ratio: Option<f64>,
}

impl PdfRecord {
    pub fn new(estimate: &PdfEstimate, constant: Option<&HlConstant>) -> Self {
        let constant = constant.filter(|c| c.m == estimate.pattern.m());
        PdfRecord {
            pattern: estimate.pattern.to_string(),
            limit: estimate.limit,
            count: estimate.count,
            li_value: estimate.denominator.value,
            c_estimate: estimate.c_estimate,
            conjectured: estimate.conjectured,
            deviation: estimate.deviation,
            relative_deviation: estimate.relative_deviation,
            c_m: constant.map(|c| c.value),
            ratio: constant.map(|c| estimate.c_estimate / c.value),
        }
    }
}
