//! Injective coding of tuples of positive rationals as natural numbers:
//! `(r1/s1, ..., rN/sN) -> p1^r1 ... pN^rN * p(N+1)^s1 ... p(2N)^sN`
//! over the first `2N` primes.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

/// Largest exponent accepted on either side; keeps codes to a few hundred
/// kilobits.
const MAX_EXPONENT: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaCode {
    pub value: BigUint,
    pub arity: usize,
}

impl fmt::Display for SigmaCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| candidate % p != 0)
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn exponent(n: &BigInt, what: &str, r: &Rational) -> Result<u32> {
    n.to_u32()
        .filter(|&e| e <= MAX_EXPONENT)
        .ok_or_else(|| {
            Error::OutOfRange(format!(
                "{what} of {} exceeds the supported exponent {MAX_EXPONENT}",
                format_rational(r)
            ))
        })
}

/// Encodes positive rationals; each is taken in lowest terms.
pub fn sigma_encode(rs: &[Rational]) -> Result<SigmaCode> {
    if rs.is_empty() {
        return Err(Error::OutOfRange("cannot encode an empty tuple".into()));
    }
    let n = rs.len();
    let primes = first_primes(2 * n);
    let mut value = BigUint::one();
    for (j, r) in rs.iter().enumerate() {
        if !r.is_positive() {
            return Err(Error::OutOfRange(format!(
                "entries must be positive, got {}",
                format_rational(r)
            )));
        }
        let num = exponent(r.numer(), "numerator", r)?;
        let den = exponent(r.denom(), "denominator", r)?;
        value *= BigUint::from(primes[j]).pow(num);
        value *= BigUint::from(primes[n + j]).pow(den);
    }
    Ok(SigmaCode { value, arity: n })
}

/// Inverts [`sigma_encode`], rejecting anything outside its image.
pub fn sigma_decode(code: &SigmaCode) -> Result<Vec<Rational>> {
    let n = code.arity;
    let not_in_image = |why: &str| Error::NotInImage(format!("{} ({why})", code.value));
    if n == 0 {
        return Err(not_in_image("arity must be positive"));
    }
    let primes = first_primes(2 * n);
    let mut rest = code.value.clone();
    if rest.is_zero() {
        return Err(not_in_image("zero"));
    }
    let mut exps = Vec::with_capacity(2 * n);
    for &p in &primes {
        let p = BigUint::from(p);
        let mut e = 0u64;
        loop {
            let (q, r) = rest.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e == 0 {
            return Err(not_in_image(&format!("prime {p} is missing")));
        }
        exps.push(e);
    }
    if !rest.is_one() {
        return Err(not_in_image(&format!(
            "factor {rest} lies outside the first {} primes",
            2 * n
        )));
    }
    (0..n)
        .map(|j| {
            let (num, den) = (exps[j], exps[n + j]);
            if num.gcd(&den) != 1 {
                return Err(not_in_image(&format!(
                    "entry {num}/{den} is not in lowest terms"
                )));
            }
            Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn primes() {
        assert_eq!(first_primes(6), vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn encodes_small_tuples() {
        assert_eq!(sigma_encode(&[rat(1, 2)]).unwrap().value, BigUint::from(18u32));
        assert_eq!(
            sigma_encode(&[int(1), rat(2, 3)]).unwrap().value,
            BigUint::from(30870u32)
        );
        // Not in lowest terms on input: reduced first.
        assert_eq!(sigma_encode(&[rat(2, 4)]).unwrap().value, BigUint::from(18u32));
    }

    #[test]
    fn decodes_and_rejects() {
        let c = |v: u32, n| SigmaCode {
            value: BigUint::from(v),
            arity: n,
        };
        assert_eq!(sigma_decode(&c(18, 1)).unwrap(), vec![rat(1, 2)]);
        assert_eq!(sigma_decode(&c(30870, 2)).unwrap(), vec![int(1), rat(2, 3)]);
        assert!(sigma_decode(&c(36, 1)).is_err()); // 2^2 3^2: 2/2 not reduced
        assert!(sigma_decode(&c(90, 1)).is_err()); // stray factor 5
        assert!(sigma_decode(&c(2, 1)).is_err()); // missing 3
        assert!(sigma_decode(&c(0, 1)).is_err());
    }

    #[test]
    fn rejects_non_positive_entries() {
        assert!(sigma_encode(&[int(0)]).is_err());
        assert!(sigma_encode(&[rat(-1, 2)]).is_err());
        assert!(sigma_encode(&[]).is_err());
    }
}
