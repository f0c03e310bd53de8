//! Helpers around [`BigRational`]: parsing, formatting, exact conversion from
//! `f64`, and serde adapters that encode rationals as `"p/q"` strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaling for very large numerators/denominators.
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let (n2, d2) = if shift > 0 {
        (n.clone(), d.clone() << (shift as usize))
    } else {
        (n.clone() << ((-shift) as usize), d.clone())
    };
    let scaled = BigRational::new(n2, d2).to_f64().unwrap_or(f64::NAN);
    scaled * 2f64.powi(shift as i32)
}

/// Natural log of `|n|` for arbitrarily large integers.
pub fn ln_abs_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift as usize).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of `|x|`; `-inf` at zero.
pub fn ln_abs(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_abs_int(x.numer()) - ln_abs_int(x.denom())
}

/// Formats as `"p"` for integers and `"p/q"` otherwise.
pub fn format(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-2.125"` or
/// `"1e-3"`, exactly.
pub fn parse(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{whole}{frac}0").parse().map_err(|_| bad())?;
    let all = all / BigInt::from(10);
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let mut v = BigRational::from_integer(all);
    if scale >= 0 {
        v *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

/// Representative of `x` modulo 1 in the half-open interval `[-1/2, 1/2)`.
pub fn centered_fract(x: &BigRational) -> BigRational {
    let half = ratio(1, 2);
    let shifted = x + &half;
    let fl = shifted.floor();
    x - fl
}

/// Nearest rational with denominator `2^k` (ties away from zero).
pub fn round_dyadic(x: f64, k: u32) -> BigRational {
    let scale = BigInt::one() << k as usize;
    let v = from_f64(x) * BigRational::from_integer(scale.clone());
    let r = v.round();
    BigRational::new(r.to_integer(), scale)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions).
pub fn best_approximation(x: f64, max_den: u64) -> BigRational {
    let target = from_f64(x);
    let mut best = BigRational::from_integer(target.floor().to_integer());
    let mut best_err = (&target - &best).abs();
    // Convergents and semiconvergents of the continued fraction expansion.
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    let limit = BigInt::from(max_den);
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > limit {
            // Largest admissible semiconvergent.
            let t = (&limit - &k0).div_floor(&k1);
            if t > BigInt::zero() {
                let hs = &t * &h1 + &h0;
                let ks = &t * &k1 + &k0;
                let cand = BigRational::new(hs, ks);
                let err = (&target - &cand).abs();
                if err < best_err {
                    best = cand;
                }
            }
            break;
        }
        let cand = BigRational::new(h2.clone(), k2.clone());
        let err = (&target - &cand).abs();
        if err < best_err {
            best = cand;
            best_err = err;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    best
}

/// Serde adapter for a single rational encoded as a string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let v = NumberOrString::deserialize(d)?;
        v.into_rational().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for an optional rational encoded as a string.
pub mod serde_rational_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        x.as_ref().map(format).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigRational>, D::Error> {
        match Option::<NumberOrString>::deserialize(d)? {
            None => Ok(None),
            Some(v) => v.into_rational().map(Some).map_err(serde::de::Error::custom),
        }
    }
}

/// Serde adapter for a list of rationals encoded as strings.
pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigRational>, D::Error> {
        let v = Vec::<NumberOrString>::deserialize(d)?;
        v.into_iter()
            .map(|x| x.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// JSON inputs may give rationals as strings or as plain numbers; numbers
/// are taken at their exact binary value only when they are integral,
/// otherwise through their shortest decimal representation.
#[derive(serde::Deserialize)]
#[serde(untagged)]
pub enum NumberOrString {
    Int(i64),
    Float(f64),
    Str(String),
}

impl NumberOrString {
    pub fn into_rational(self) -> Result<BigRational> {
        match self {
            NumberOrString::Int(n) => Ok(int(n)),
            NumberOrString::Float(x) if x.is_finite() => parse(&format!("{x:e}")),
            NumberOrString::Float(x) => Err(Error::Parse(format!("non-finite number {x}"))),
            NumberOrString::Str(s) => parse(&s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse("-7").unwrap(), int(-7));
        assert_eq!(parse("2.125").unwrap(), ratio(17, 8));
        assert_eq!(parse("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse("2.5E2").unwrap(), int(250));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse(".").is_err());
    }

    #[test]
    fn format_roundtrip() {
        for x in [ratio(3, 2), int(-9), ratio(-5, 12)] {
            assert_eq!(parse(&format(&x)).unwrap(), x);
        }
        assert_eq!(format(&int(4)), "4");
    }

    #[test]
    fn centered_fraction_range() {
        assert_eq!(centered_fract(&ratio(9, 2)), ratio(-1, 2));
        assert_eq!(centered_fract(&ratio(-9, 2)), ratio(-1, 2));
        assert_eq!(centered_fract(&ratio(7, 3)), ratio(1, 3));
        assert_eq!(centered_fract(&ratio(8, 3)), ratio(-1, 3));
        assert_eq!(centered_fract(&int(5)), int(0));
    }

    #[test]
    fn continued_fraction_recovers_simple_ratios() {
        assert_eq!(best_approximation(0.5 + 1e-13, 64), ratio(1, 2));
        assert_eq!(best_approximation(-5.0 - 3e-12, 64), int(-5));
        assert_eq!(best_approximation(2.0 / 3.0, 10), ratio(2, 3));
        assert_eq!(best_approximation(std::f64::consts::PI, 7), ratio(22, 7));
    }

    #[test]
    fn logs_of_big_numbers() {
        let big = BigInt::from(3u32).pow(2000);
        assert!((ln_abs_int(&big) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert!((ln_abs(&ratio(-1, 8)) + 8f64.ln()).abs() < 1e-15);
        assert_eq!(ln_abs(&int(0)), f64::NEG_INFINITY);
    }

    #[test]
    fn to_f64_large() {
        let big = BigRational::from_integer(BigInt::one() << 2000usize)
            / BigRational::from_integer(BigInt::one() << 1999usize);
        assert_eq!(to_f64(&big), 2.0);
    }
}
