//! `Li_m(n) = integral from 2 to n of dx / ln(x)^m`, the density denominator of
//! the constellation counting function.
//!
//! Substituting `x = e^t` gives `integral of e^t / t^m dt` over `[ln 2, ln n]`,
//! which is smooth and free of the huge dynamic range in `x`. It is integrated
//! by globally adaptive 7/15-point Gauss-Kronrod bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::compensated::CompensatedSum;
use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-12;

const MAX_INTERVALS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogIntegralValue {
    pub m: u32,
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub abs_error_estimate: f64,
}

/// `Li_m(upper)` with lower limit 2.
pub fn log_integral(m: u32, upper: f64, rel_tol: f64) -> Result<LogIntegralValue> {
    log_integral_between(m, 2.0, upper, rel_tol)
}

/// Integral of `1 / ln(x)^m` over `[lower, upper]` with `2 <= lower <= upper`.
pub fn log_integral_between(
    m: u32,
    lower: f64,
    upper: f64,
    rel_tol: f64,
) -> Result<LogIntegralValue> {
    if m == 0 {
        return Err(Error::domain("log-integral order must be at least 1"));
    }
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::domain(format!(
            "relative tolerance {rel_tol} outside (0, 1e-3]"
        )));
    }
    if !(lower >= 2.0) || !lower.is_finite() {
        return Err(Error::domain(format!("lower limit {lower} below 2")));
    }
    if !(upper >= lower) || !upper.is_finite() {
        return Err(Error::domain(format!(
            "upper limit {upper} below lower limit {lower}"
        )));
    }
    let mut out = LogIntegralValue {
        m,
        lower,
        upper,
        value: 0.0,
        abs_error_estimate: 0.0,
    };
    if upper == lower {
        return Ok(out);
    }
    let integrand = |t: f64| t.exp() / t.powi(m as i32);
    let (value, err) = adaptive(integrand, lower.ln(), upper.ln(), rel_tol)?;
    out.value = value;
    out.abs_error_estimate = err;
    Ok(out)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let piece = |a: f64, b: f64| {
        let (value, err) = gauss_kronrod_15(&f, a, b);
        Piece { a, b, value, err }
    };
    let mut heap = BinaryHeap::new();
    heap.push(piece(a, b));
    loop {
        let total: CompensatedSum = heap.iter().map(|p| p.value).collect();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let total = total.value();
        if err <= rel_tol * total.abs() {
            return Ok((total, err));
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::domain(format!(
                "quadrature did not reach relative tolerance {rel_tol} (estimate {err:e} on {total})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(piece(worst.a, mid));
        heap.push(piece(mid, worst.b));
    }
}

// Digits as published for the 7/15-point rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod estimate and QUADPACK-style error on `[a, b]`.
fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut values = [(0.0, 0.0); 7];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let (lo, hi) = (f(center - dx), f(center + dx));
        values[j] = (lo, hi);
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, &(lo, hi)) in values.iter().enumerate() {
        asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }
    let result = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_sum);
    }
    (result, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson rule in `t` on a fixed mesh.
    fn simpson(m: u32, upper: f64, panels: usize) -> f64 {
        let (a, b) = (2f64.ln(), upper.ln());
        let h = (b - a) / panels as f64;
        let f = |t: f64| t.exp() / t.powi(m as i32);
        let mut s = CompensatedSum::new();
        s.add(f(a));
        s.add(f(b));
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s.add(w * f(a + i as f64 * h));
        }
        s.value() * h / 3.0
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for k in 0..=22 {
            let (v, _) = gauss_kronrod_15(&|x: f64| x.powi(k), -1.0, 1.0);
            let exact = if k % 2 == 0 {
                2.0 / (k + 1) as f64
            } else {
                0.0
            };
            assert!((v - exact).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn empty_interval_is_zero() {
        for m in 1..5 {
            let li = log_integral(m, 2.0, 1e-10).unwrap();
            assert_eq!(li.value, 0.0);
        }
    }

    #[test]
    fn li1_at_one_million_matches_fine_mesh() {
        let li = log_integral(1, 1e6, 1e-13).unwrap();
        let coarse = simpson(1, 1e6, 20_000);
        let fine = simpson(1, 1e6, 200_000);
        assert!(((coarse - fine) / fine).abs() < 1e-12);
        assert!(
            ((li.value - fine) / fine).abs() < 1e-10,
            "{} vs {fine}",
            li.value
        );
        // li(10^6) - li(2)
        assert!((li.value - 78_626.503_995_682_1).abs() < 1e-6);
    }

    #[test]
    fn higher_orders_match_fine_mesh() {
        for (m, upper) in [(2, 1e10), (3, 2e10), (4, 7e10), (5, 4e11), (6, 1e9)] {
            let li = log_integral(m, upper, 1e-12).unwrap();
            let oracle = simpson(m, upper, 400_000);
            assert!(((li.value - oracle) / oracle).abs() < 1e-10, "m = {m}");
            assert!(li.abs_error_estimate <= 1e-12 * li.value);
        }
    }

    #[test]
    fn domain_checks() {
        assert!(log_integral(2, 1.5, 1e-8).is_err());
        assert!(log_integral(2, f64::NAN, 1e-8).is_err());
        assert!(log_integral(0, 10.0, 1e-8).is_err());
        assert!(log_integral(2, 10.0, 0.0).is_err());
        assert!(log_integral(2, 10.0, 1e-2).is_err());
        assert!(log_integral(2, 10.0, 1e-3).is_ok());
    }

    #[test]
    fn increasing_in_upper() {
        let mut last = 0.0;
        for k in 1..40 {
            let v = log_integral(3, 2.0 + (k as f64).powi(3), 1e-10)
                .unwrap()
                .value;
            assert!(v > last);
            last = v;
        }
    }
}
