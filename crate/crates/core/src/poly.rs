//! Dense univariate polynomials, lowest-degree coefficient first.
//!
//! [`RealPoly`] carries `f64` coefficients; [`ExactPoly`] carries exact
//! rationals and never rounds.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        RealPoly { coeffs }
    }

    pub fn zero() -> Self {
        RealPoly { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        RealPoly { coeffs: c }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            c = next;
        }
        RealPoly::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        RealPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        RealPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Long division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &RealPoly) -> (RealPoly, RealPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        if rem.len() <= dd {
            return (RealPoly::zero(), self.clone());
        }
        let lead = divisor.leading();
        let mut quot = vec![0.0; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd] / lead;
            quot[i] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * d;
            }
            rem[i + dd] = 0.0;
        }
        rem.truncate(dd);
        (RealPoly::new(quot), RealPoly::new(rem))
    }

    /// Exact rational image of the float coefficients.
    pub fn to_exact(&self) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().map(|&c| rational::from_f64(c)).collect())
    }

    /// Monomial form of `sum c_k T_k((x - center) / half_width)`.
    pub fn from_chebyshev(c: &[f64], center: f64, half_width: f64) -> RealPoly {
        let u = RealPoly::new(vec![-center / half_width, 1.0 / half_width]);
        let mut t_prev = RealPoly::constant(1.0);
        let mut t_cur = u.clone();
        let mut out = RealPoly::constant(c.first().copied().unwrap_or(0.0));
        if c.len() > 1 {
            out = &out + &t_cur.scale(c[1]);
        }
        for ck in c.iter().skip(2) {
            let t_next = &(&u * &t_cur).scale(2.0) - &t_prev;
            out = &out + &t_next.scale(*ck);
            t_prev = t_cur;
            t_cur = t_next;
        }
        out
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &RealPoly) -> RealPoly {
        let mut acc = RealPoly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &RealPoly::constant(c);
        }
        acc
    }
}

impl Add for &RealPoly {
    type Output = RealPoly;
    fn add(self, rhs: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, rhs: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RealPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, rhs: &RealPoly) -> RealPoly {
        if self.is_zero() || rhs.is_zero() {
            return RealPoly::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RealPoly::new(c)
    }
}

impl Neg for &RealPoly {
    type Output = RealPoly;
    fn neg(self) -> RealPoly {
        self.scale(-1.0)
    }
}

impl Serialize for RealPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(RealPoly::new(Vec::<f64>::deserialize(d)?))
    }
}

fn write_terms<T, F>(
    f: &mut fmt::Formatter<'_>,
    coeffs: &[T],
    is_zero: F,
    fmt_c: impl Fn(&T) -> (bool, String),
) -> fmt::Result
where
    F: Fn(&T) -> bool,
{
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if is_zero(c) {
            continue;
        }
        let (neg, mag) = fmt_c(c);
        let sign = match (first, neg) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        let unit = mag == "1";
        let body = match (i, unit) {
            (0, _) => mag,
            (1, true) => "X".to_string(),
            (1, false) => format!("{mag}*X"),
            (_, true) => format!("X^{i}"),
            (_, false) => format!("{mag}*X^{i}"),
        };
        write!(f, "{sign}{body}")?;
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.coeffs, |c| *c == 0.0, |c| (*c < 0.0, format!("{}", c.abs())))
    }
}

/// Polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExactPoly {
    coeffs: Vec<BigRational>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ExactPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn from_bigints(coeffs: Vec<BigInt>) -> Self {
        Self::new(coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Self {
        ExactPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![BigRational::zero(); n + 1];
        c[n] = BigRational::one();
        ExactPoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    /// True when every coefficient has denominator 1.
    pub fn is_integer(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sign of the value at `x` (-1, 0, 1). Uses a common-denominator
    /// integer Horner scheme, which is much cheaper than rational Horner.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        if self.is_zero() {
            return 0;
        }
        // Sign of L * d^deg * p(n/d) with L the lcm of coefficient denominators.
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let n = x.numer();
        let d = x.denom();
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            let ci = (c * BigRational::from_integer(l.clone())).to_integer();
            acc = acc * n + ci * &dpow;
            dpow *= d;
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    pub fn derivative(&self) -> Self {
        ExactPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        ExactPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![BigRational::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        ExactPoly { coeffs: c }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut result = ExactPoly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &ExactPoly) -> ExactPoly {
        let mut acc = ExactPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &ExactPoly::constant(c.clone());
        }
        acc
    }

    pub fn div_rem(&self, divisor: &ExactPoly) -> (ExactPoly, ExactPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree();
        if self.coeffs.len() <= dd {
            return (ExactPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let lead_inv = divisor.leading().recip();
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + dd] * &lead_inv;
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &q * d;
                }
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        (ExactPoly::new(quot), ExactPoly::new(rem))
    }

    pub fn monic(&self) -> ExactPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &ExactPoly) -> ExactPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Scales to integer coefficients with unit content and positive
    /// leading coefficient.
    pub fn primitive(&self) -> ExactPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
        let mut g = if g.is_zero() { BigInt::one() } else { g };
        if ints.last().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        ExactPoly::from_bigints(ints.into_iter().map(|c| c / &g).collect())
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree() == 0 || self.gcd(&self.derivative()).degree() == 0
    }

    /// Yun's squarefree decomposition: returns `(factor, multiplicity)` with
    /// monic squarefree, pairwise coprime factors of positive degree.
    pub fn squarefree_decomposition(&self) -> Vec<(ExactPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree() == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Resultant `lc(self)^deg(other) * prod other(z)` over the roots `z` of
    /// `self`, computed by the Euclidean recursion over the rationals.
    pub fn resultant(&self, other: &ExactPoly) -> BigRational {
        if self.is_zero() || other.is_zero() {
            return BigRational::zero();
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut acc = BigRational::one();
        loop {
            let m = a.degree();
            let n = b.degree();
            if n == 0 {
                return acc * num_traits::pow(b.leading(), m);
            }
            if m == 0 {
                return acc * num_traits::pow(a.leading(), n);
            }
            let (_, r) = a.div_rem(&b);
            if r.is_zero() {
                return BigRational::zero();
            }
            // res(a, b) = (-1)^{mn} lc(b)^{m - deg r} res(b, r)
            let k = r.degree();
            if (m * n) % 2 == 1 {
                acc = -acc;
            }
            acc *= num_traits::pow(b.leading(), m - k);
            a = b;
            b = r;
        }
    }

    pub fn to_real(&self) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(rational::to_f64).collect())
    }

    /// Integer coefficients, or an error if any coefficient is fractional.
    pub fn integer_coeffs(&self) -> Result<Vec<BigInt>> {
        if !self.is_integer() {
            return Err(Error::NotInteger);
        }
        Ok(self.coeffs.iter().map(|c| c.to_integer()).collect())
    }
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &ExactPoly) -> ExactPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ExactPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &ExactPoly) -> ExactPoly {
        if self.is_zero() || rhs.is_zero() {
            return ExactPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        ExactPoly::new(c)
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            &self.coeffs,
            |c| c.is_zero(),
            |c| (c.is_negative(), rational::format(&c.abs())),
        )
    }
}

impl Serialize for ExactPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational::serde_rational_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for ExactPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(ExactPoly::new(rational::serde_rational_vec::deserialize(d)?))
    }
}
