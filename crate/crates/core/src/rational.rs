//! Exact rationals and the textual forms used in files and on the command line.
//!
//! Rationals are written `p/q` or as plain integers. Decimal literals such as
//! `0.25` are also accepted on input and converted exactly (`1/4`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p/q`, an integer, or a finite decimal literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse {
        line: 0,
        message: format!("`{s}` is not a rational number"),
    };
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse {
                line: 0,
                message: format!("`{s}` has a zero denominator"),
            });
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !whole_digits.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(numer, denom);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    match r.to_f64() {
        Some(v) if v.is_finite() => v,
        // Very large numerators and denominators overflow the direct
        // conversion; scale both down to their leading bits first.
        _ => {
            let n = r.numer().abs();
            let d = r.denom().clone();
            let shift = n.bits().max(d.bits()).saturating_sub(900);
            let nf = (&n >> shift).to_f64().unwrap_or(f64::INFINITY);
            let df = (&d >> shift).to_f64().unwrap_or(f64::INFINITY);
            let v = if df == 0.0 { f64::INFINITY } else { nf / df };
            if r.is_negative() {
                -v
            } else {
                v
            }
        }
    }
}

/// Real numbers in reports: twelve significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.*e}", 11, x);
    // Reparse so that the output uses plain notation when it is short.
    let v: f64 = s.parse().unwrap_or(x);
    let plain = format!("{v}");
    if plain.len() <= 20 {
        plain
    } else {
        s
    }
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= one()
}
