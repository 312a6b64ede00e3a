//! Helpers for exact rational scalars.

use num::bigint::{BigInt, Sign};
use num::{BigRational, One, ToPrimitive, Zero};

use crate::error::{MagError, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Integer power with negative exponents going through the reciprocal.
pub fn q_pow(base: &Q, exp: i64) -> Q {
    if exp == 0 {
        return Q::one();
    }
    let mag = base.pow(i32::try_from(exp.unsigned_abs()).expect("exponent fits i32"));
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from a finite float (floats are dyadic rationals).
pub fn q_from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| MagError::Invalid(format!("non-finite value {x}")))
}

/// Renders `num/den`, or just the numerator when the value is integral.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| MagError::Parse(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(MagError::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(parse_int(n)?, den))
        }
        None => Ok(Q::from_integer(parse_int(s)?)),
    }
}

/// Scales a rational vector to coprime integers with a positive leading entry.
///
/// Returns `None` for the zero vector.
pub fn canonical_integer_vector(v: &[Q]) -> Option<Vec<BigInt>> {
    if v.iter().all(|x| x.is_zero()) {
        return None;
    }
    let mut lcm = BigInt::one();
    for x in v {
        lcm = num::integer::lcm(lcm, x.denom().clone());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut gcd = BigInt::zero();
    for n in &ints {
        gcd = num::integer::gcd(gcd, n.clone());
    }
    let mut out: Vec<BigInt> = ints.iter().map(|n| n / &gcd).collect();
    if let Some(first) = out.iter().find(|n| !n.is_zero()) {
        if first.sign() == Sign::Minus {
            for n in &mut out {
                *n = -n.clone();
            }
        }
    }
    Some(out)
}
