//! Exact rational scalars and small vector helpers.
//!
//! All decision paths in the toolkit run over `Rat`; floating point never
//! appears. `num::BigRational` already keeps values in canonical form
//! (positive denominator, reduced fraction).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// `n / d` as an exact rational. Panics on zero denominator.
pub fn rat(n: BigInt, d: BigInt) -> Rat {
    Rat::new(n, d)
}

pub fn rat_i64(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Fractional part reduced into `[0, 1)`.
pub fn frac_part(x: &Rat) -> Rat {
    let f = x - x.floor();
    debug_assert!(!f.is_negative() && f < Rat::one());
    f
}

pub fn is_integral(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Canonical string form: integers as `n`, otherwise `p/q`.
pub fn rat_to_string(x: &Rat) -> String {
    if is_integral(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `p`, `-p` or `p/q` with `q > 0` after reduction.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::Schema(format!("invalid rational `{s}`")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from(parse_int(s)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Schema(format!("zero denominator in `{s}`")));
            }
            Ok(Rat::new(num, den))
        }
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int_rat(a: &[BigInt], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| Rat::from(x.clone()) * y).sum()
}

pub fn scale(v: &[Rat], c: &Rat) -> Vec<Rat> {
    v.iter().map(|x| x * c).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn zeros(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}

pub fn from_int_vec(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from(x.clone())).collect()
}

/// Scale a rational vector by a positive constant so entries become coprime
/// integers. The direction (sign pattern) is preserved.
pub fn primitive(v: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn primitive_rat(v: &[Rat]) -> Vec<Rat> {
    primitive(v).into_iter().map(Rat::from).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(rat_to_string(&rat_from_str("3/6").unwrap()), "1/2");
        assert_eq!(rat_to_string(&rat_from_str("-4/2").unwrap()), "-2");
        assert_eq!(rat_to_string(&rat_from_str("7").unwrap()), "7");
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x").is_err());
    }

    #[test]
    fn frac_part_negative() {
        assert_eq!(frac_part(&rat_i64(-3, 2)), rat_i64(1, 2));
        assert_eq!(frac_part(&int(-2)), Rat::zero());
    }

    #[test]
    fn primitive_preserves_direction() {
        let v = vec![rat_i64(-2, 3), rat_i64(4, 3)];
        assert_eq!(primitive(&v), vec![BigInt::from(-1), BigInt::from(2)]);
    }
}
