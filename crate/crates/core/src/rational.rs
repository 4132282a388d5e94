//! Exact rational scalars and the small helpers the solvers share.

use std::str::FromStr;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or an integer literal. Whitespace around the value is
/// tolerated; anything else is an input error.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::input("empty rational literal"));
    }
    let ok = t
        .chars()
        .all(|c| c.is_ascii_digit() || c == '/' || c == '-' || c == '+');
    if !ok || t.matches('/').count() > 1 {
        return Err(Error::input(format!("malformed rational literal {s:?}")));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n).map_err(|_| Error::input(format!("bad numerator in {s:?}")))?;
        let d = BigInt::from_str(d).map_err(|_| Error::input(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::input(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| Error::input(format!("bad integer {s:?}")))?;
        Ok(Rational::from_integer(n))
    }
}

/// Canonical `"p/q"` rendering; integers print without a denominator.
pub fn render(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal approximation with `digits` fractional digits, rounded half away
/// from zero. Display only; never fed back into a solver.
pub fn render_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r * Rational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let abs = rounded.abs();
    let (whole, rem) = abs.div_rem(&scale);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if digits > 0 {
        let rem = rem.to_string();
        out.push('.');
        for _ in rem.len()..digits {
            out.push('0');
        }
        out.push_str(&rem);
    }
    out
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn sum<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Rational {
    it.into_iter().fold(zero(), |acc, x| acc + x)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a row so every entry is an integer and the entries share no common
/// factor. Returns the multiplier that was applied (always positive).
pub fn clear_denominators(coeffs: &mut [Rational], rhs: &mut Rational) -> Rational {
    let mut lcm = BigInt::one();
    for c in coeffs.iter().chain(std::iter::once(&*rhs)) {
        lcm = lcm.lcm(c.denom());
    }
    let mut gcd = BigInt::zero();
    for c in coeffs.iter().chain(std::iter::once(&*rhs)) {
        let v = (c * Rational::from_integer(lcm.clone())).to_integer();
        gcd = gcd.gcd(&v);
    }
    if gcd.is_zero() {
        gcd = BigInt::one();
    }
    let factor = Rational::new(lcm, gcd);
    for c in coeffs.iter_mut() {
        *c = &*c * &factor;
    }
    *rhs = &*rhs * &factor;
    factor
}
