//! Exact integer literals such as `1e10`, `2.5e3` or `10_000_000`.

use crate::error::{Error, Result};

/// Parses a non-negative integer written in decimal, scientific notation or
/// with `_` separators. Values that are not whole numbers are rejected.
pub fn parse_integer(text: &str) -> Result<u64> {
    let bad = || Error::domain(format!("{text:?} is not a whole number"));
    let cleaned: String = text.trim().chars().filter(|&c| c != '_').collect();
    let (mantissa, exponent) = match cleaned.find(['e', 'E']) {
        Some(i) => (
            &cleaned[..i],
            cleaned[i + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (cleaned.as_str(), 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let frac_part = frac_part.trim_end_matches('0');
    let digits = format!("{int_part}{frac_part}");
    let scale = exponent - frac_part.len() as i32;
    let too_big = || Error::domain(format!("{text:?} does not fit in 64 bits"));
    let mut value: u128 = 0;
    for d in digits.bytes() {
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((d - b'0') as u128))
            .ok_or_else(too_big)?;
    }
    if scale >= 0 {
        for _ in 0..scale {
            value = value.checked_mul(10).ok_or_else(too_big)?;
        }
    } else {
        for _ in 0..-scale {
            if value % 10 != 0 {
                return Err(bad());
            }
            value /= 10;
        }
    }
    u64::try_from(value).map_err(|_| too_big())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepted_forms() {
        assert_eq!(parse_integer("1e10").unwrap(), 10_000_000_000);
        assert_eq!(parse_integer("2e10").unwrap(), 20_000_000_000);
        assert_eq!(parse_integer("4E11").unwrap(), 400_000_000_000);
        assert_eq!(parse_integer("2.5e3").unwrap(), 2500);
        assert_eq!(parse_integer("10_000_000").unwrap(), 10_000_000);
        assert_eq!(parse_integer("100").unwrap(), 100);
        assert_eq!(parse_integer("1.0").unwrap(), 1);
        assert_eq!(parse_integer("120e-1").unwrap(), 12);
    }

    #[test]
    fn rejected_forms() {
        for s in ["", "e5", "1.5", "1e-1", "-3", "abc", "1e40", "1x"] {
            assert!(parse_integer(s).is_err(), "{s:?}");
        }
    }
}
