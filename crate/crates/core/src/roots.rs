//! Real-root isolation (exact Sturm sequences and floating bisection) and
//! complex roots by the Aberth-Ehrlich iteration.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::IntervalUnion;
use crate::poly::{ExactPoly, RealPoly};
use crate::rational;

/// Sturm sequence of a polynomial with integer-normalized members.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<Vec<BigInt>>,
}

fn int_coeffs(p: &ExactPoly) -> Vec<BigInt> {
    p.primitive().coeffs().iter().map(|c| c.to_integer()).collect()
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// Divides out the positive content, preserving signs.
fn remove_content(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c = &*c / &g;
        }
    }
}

/// Pseudo-remainder scaled by a positive constant: a positive multiple of `a mod b`.
fn positive_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let b: Vec<BigInt> = if b[db].is_negative() {
        b.iter().map(|c| -c).collect()
    } else {
        b.to_vec()
    };
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &lr * bj;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn horner_sign(p: &[BigInt], x: &BigRational) -> i32 {
    if p.is_empty() {
        return 0;
    }
    let n = x.numer();
    let d = x.denom();
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * n + c * &dpow;
        dpow *= d;
    }
    sign_int(&acc)
}

fn sign_int(v: &BigInt) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

impl SturmSequence {
    /// Canonical sequence `p, p', -rem, ...`. Counts distinct real roots
    /// even when `p` is not squarefree.
    pub fn new(p: &ExactPoly) -> Result<Self> {
        if p.degree() == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let mut seq = vec![int_coeffs(p), int_coeffs(&p.derivative())];
        // int_coeffs forces a positive leading coefficient; restore sign.
        if p.leading().is_negative() {
            for c in seq[0].iter_mut() {
                *c = -&*c;
            }
            for c in seq[1].iter_mut() {
                *c = -&*c;
            }
        }
        loop {
            let n = seq.len();
            let b = &seq[n - 1];
            if b.len() <= 1 {
                break;
            }
            let mut r = positive_prem(&seq[n - 2], b);
            trim(&mut r);
            if r.is_empty() {
                break;
            }
            for c in r.iter_mut() {
                *c = -&*c;
            }
            remove_content(&mut r);
            seq.push(r);
        }
        Ok(SturmSequence { seq })
    }

    fn variations<F: Fn(&[BigInt]) -> i32>(&self, sign: F) -> usize {
        let mut last = 0;
        let mut count = 0;
        for p in &self.seq {
            let s = sign(p);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        self.variations(|p| horner_sign(p, x))
    }

    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        self.variations(|p| {
            let s = sign_int(p.last().unwrap());
            if positive || (p.len() - 1) % 2 == 0 {
                s
            } else {
                -s
            }
        })
    }

    /// Distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    /// Distinct real roots on the whole line.
    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }
}

/// Isolates the real roots of a squarefree exact polynomial inside closed
/// rational bands. Each returned closed interval contains exactly one root.
pub fn isolate_in_rational_bands(
    p: &ExactPoly,
    bands: &[(BigRational, BigRational)],
) -> Result<Vec<(BigRational, BigRational)>> {
    if p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if !p.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let sturm = SturmSequence::new(p)?;
    let mut out = Vec::new();
    for (a, b) in bands {
        if p.sign_at(a) == 0 {
            out.push((a.clone(), a.clone()));
        }
        bisect_isolate(p, &sturm, a.clone(), b.clone(), &mut out);
    }
    Ok(out)
}

fn bisect_isolate(
    p: &ExactPoly,
    sturm: &SturmSequence,
    lo: BigRational,
    hi: BigRational,
    out: &mut Vec<(BigRational, BigRational)>,
) {
    let mut stack = vec![(lo, hi)];
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count_in(&lo, &hi) {
            0 => {}
            1 => out.push(exclude_lower_root(p, sturm, lo, hi)),
            _ => {
                let mid = (&lo + &hi) / rational::int(2);
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    // Stack order already yields increasing intervals within the band.
}

/// Exact isolation over a floating window; band endpoints are converted to
/// rationals exactly.
pub fn isolate_real_roots_exact(p: &ExactPoly, window: &IntervalUnion) -> Result<Vec<(BigRational, BigRational)>> {
    let bands: Vec<(BigRational, BigRational)> = window
        .bands()
        .iter()
        .map(|&(a, b)| (rational::from_f64(a), rational::from_f64(b)))
        .collect();
    isolate_in_rational_bands(p, &bands)
}

/// Narrows an isolating interval by exact bisection until its width is at
/// most `width`.
pub fn refine_exact(
    p: &ExactPoly,
    mut lo: BigRational,
    mut hi: BigRational,
    width: &BigRational,
) -> (BigRational, BigRational) {
    let two = rational::int(2);
    let mut slo = p.sign_at(&lo);
    if slo == 0 {
        return (lo.clone(), lo);
    }
    if p.sign_at(&hi) == 0 {
        return (hi.clone(), hi);
    }
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        let s = p.sign_at(&mid);
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == slo {
            lo = mid;
            slo = s;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Closed bracket of the single root in `(lo, hi]` that avoids a root at `lo`.
fn exclude_lower_root(
    p: &ExactPoly,
    sturm: &SturmSequence,
    mut lo: BigRational,
    mut hi: BigRational,
) -> (BigRational, BigRational) {
    if p.sign_at(&hi) == 0 {
        return (hi.clone(), hi);
    }
    while p.sign_at(&lo) == 0 {
        let mid = (&lo + &hi) / rational::int(2);
        if p.sign_at(&mid) == 0 {
            return (mid.clone(), mid);
        }
        if sturm.count_in(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Floating root isolation: one tight bracket per real root inside the window.
pub fn isolate_real_roots(p: &RealPoly, window: &IntervalUnion) -> Result<Vec<(f64, f64)>> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let mut out = Vec::new();
    for &(a, b) in window.bands() {
        out.extend(brackets_in(p, a, b, true)?);
    }
    Ok(out)
}

/// Real roots of `p` in `[a, b]`, polished to double precision.
pub fn real_roots_in(p: &RealPoly, a: f64, b: f64) -> Result<Vec<f64>> {
    Ok(brackets_in(p, a, b, true)?
        .into_iter()
        .map(|(lo, hi)| polish(p, lo, hi))
        .collect())
}

/// Distinct real roots of `p` in `[a, b]`, where a critical point with a
/// negligible value counts as a (multiple) root instead of an error.
pub fn real_roots_touching(p: &RealPoly, a: f64, b: f64) -> Result<Vec<f64>> {
    Ok(brackets_in(p, a, b, false)?
        .into_iter()
        .map(|(lo, hi)| polish(p, lo, hi))
        .collect())
}

fn magnitude(p: &RealPoly, x: f64) -> f64 {
    p.coeffs().iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs())
}

fn brackets_in(p: &RealPoly, a: f64, b: f64, strict: bool) -> Result<Vec<(f64, f64)>> {
    let deg = p.degree();
    if p.is_zero() {
        return Err(Error::ConstantPolynomial);
    }
    if deg == 0 {
        return Ok(vec![]);
    }
    if deg == 1 {
        let r = -p.coeff(0) / p.coeff(1);
        return Ok(if r >= a && r <= b { vec![(r, r)] } else { vec![] });
    }
    let dp = p.derivative();
    let crit: Vec<f64> = brackets_in(&dp, a, b, false)?
        .into_iter()
        .map(|(lo, hi)| polish(&dp, lo, hi))
        .filter(|&c| c > a && c < b)
        .collect();
    let eps = 1e-13;
    let mut knots = vec![a];
    let mut touching = vec![false];
    for &c in &crit {
        let t = p.eval(c).abs() <= eps * magnitude(p, c);
        if t && strict {
            return Err(Error::NotSquarefree);
        }
        knots.push(c);
        touching.push(t);
    }
    knots.push(b);
    touching.push(false);
    let vals: Vec<f64> = knots
        .iter()
        .zip(&touching)
        .map(|(&x, &t)| if t { 0.0 } else { p.eval(x) })
        .collect();
    let mut out: Vec<(f64, f64)> = Vec::new();
    let push = |br: (f64, f64), out: &mut Vec<(f64, f64)>| {
        if out.last().is_none_or(|last| last.1 < br.0) {
            out.push(br);
        }
    };
    for i in 0..knots.len() - 1 {
        let (lo, hi) = (knots[i], knots[i + 1]);
        let (flo, fhi) = (vals[i], vals[i + 1]);
        if flo == 0.0 {
            push((lo, lo), &mut out);
        }
        if flo != 0.0 && fhi != 0.0 && (flo < 0.0) != (fhi < 0.0) {
            push(bisect(p, lo, hi, flo), &mut out);
        }
        if fhi == 0.0 {
            push((hi, hi), &mut out);
        }
    }
    Ok(out)
}

fn bisect(p: &RealPoly, mut lo: f64, mut hi: f64, mut flo: f64) -> (f64, f64) {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return (mid, mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn polish(p: &RealPoly, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let dp = p.derivative();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..5 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let nx = x - p.eval(x) / d;
        if !(lo..=hi).contains(&nx) {
            break;
        }
        x = nx;
    }
    x
}

/// All complex roots (with multiplicity) by the Aberth-Ehrlich iteration.
pub fn complex_roots(p: &RealPoly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let lead = p.leading();
    let monic: Vec<f64> = p.coeffs().iter().map(|c| c / lead).collect();
    if n == 1 {
        return Ok(vec![Complex64::new(-monic[0], 0.0)]);
    }
    // Fujiwara-type radius for the initial circle.
    let radius = (0..n)
        .map(|k| monic[k].abs().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3)
        * 1.2;
    let center = -monic[n - 1] / n as f64;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, th)
        })
        .collect();
    let mp = RealPoly::new(monic);
    let dmp = mp.derivative();
    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let pv = mp.eval_complex(z[i]);
            let dv = dmp.eval_complex(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for w in z.iter_mut() {
        if w.im.abs() < 1e-12 * (1.0 + w.re.abs()) {
            w.im = 0.0;
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn sturm_counts() {
        let p = ExactPoly::from_ints(&[-5, 0, 1]);
        let s = SturmSequence::new(&p).unwrap();
        assert_eq!(s.count_real(), 2);
        assert_eq!(s.count_in(&int(0), &int(3)), 1);
        let q = ExactPoly::from_ints(&[1, 0, 1]);
        assert_eq!(SturmSequence::new(&q).unwrap().count_real(), 0);
        // negative leading coefficient
        let r = ExactPoly::from_ints(&[6, -5, 0, -1]).scale(&int(1));
        let sr = SturmSequence::new(&r).unwrap();
        assert_eq!(sr.count_real(), 1);
    }

    #[test]
    fn chebyshev_like_all_real() {
        // X^5 - 5X^3 + 5X has five roots in (-2, 2).
        let p = ExactPoly::from_ints(&[0, 5, 0, -5, 0, 1]);
        let s = SturmSequence::new(&p).unwrap();
        assert_eq!(s.count_real(), 5);
        assert_eq!(s.count_in(&int(-2), &int(2)), 5);
    }

    #[test]
    fn exact_isolation_examples() {
        let e = IntervalUnion::new(&[(0.0, 2.0)]).unwrap();
        let iso = isolate_real_roots_exact(&ExactPoly::from_ints(&[-2, 0, 1]), &e).unwrap();
        assert_eq!(iso.len(), 1);
        let (lo, hi) = &iso[0];
        assert!(rational::to_f64(lo) <= 2f64.sqrt() && 2f64.sqrt() <= rational::to_f64(hi));

        let e = IntervalUnion::new(&[(-2.0, 2.0)]).unwrap();
        assert!(isolate_real_roots_exact(&ExactPoly::from_ints(&[1, 0, 1]), &e)
            .unwrap()
            .is_empty());

        let e = IntervalUnion::new(&[(-3.0, -1.0), (1.0, 3.0)]).unwrap();
        let iso = isolate_real_roots_exact(&ExactPoly::from_ints(&[-5, 0, 1]), &e).unwrap();
        assert_eq!(iso.len(), 2);
        assert!(rational::to_f64(&iso[0].1) <= -1.0);
        assert!(rational::to_f64(&iso[1].0) >= 1.0);
    }

    #[test]
    fn exact_isolation_rejects_square() {
        let e = IntervalUnion::new(&[(-3.0, 3.0)]).unwrap();
        let p = ExactPoly::from_ints(&[1, -2, 1]);
        assert_eq!(isolate_real_roots_exact(&p, &e), Err(Error::NotSquarefree));
    }

    #[test]
    fn exact_root_at_endpoint() {
        let p = ExactPoly::from_ints(&[-1, 0, 1]);
        let iso = isolate_in_rational_bands(&p, &[(int(-1), int(1))]).unwrap();
        assert_eq!(iso.len(), 2);
    }

    #[test]
    fn bisection_midpoint_root_is_not_shared() {
        // X^2 - 3X has a root at the first midpoint 0 of [-4, 4].
        let p = ExactPoly::from_ints(&[0, -3, 1]);
        let iso = isolate_in_rational_bands(&p, &[(int(-4), int(4))]).unwrap();
        assert_eq!(iso[0], (int(0), int(0)));
        let (lo, hi) = refine_exact(&p, iso[1].0.clone(), iso[1].1.clone(), &ratio(1, 1 << 20));
        assert!(lo > int(0) && lo <= int(3) && hi >= int(3));
    }

    #[test]
    fn refine() {
        let p = ExactPoly::from_ints(&[-2, 0, 1]);
        let (lo, hi) = refine_exact(&p, int(1), int(2), &ratio(1, 1 << 40));
        let x = rational::to_f64(&lo);
        assert!((x - 2f64.sqrt()).abs() < 1e-11);
        assert!(hi > lo);
    }

    #[test]
    fn floating_isolation() {
        let e = IntervalUnion::new(&[(-3.0, -1.0), (1.0, 3.0)]).unwrap();
        let p = RealPoly::new(vec![-5.0, 0.0, 1.0]);
        let br = isolate_real_roots(&p, &e).unwrap();
        assert_eq!(br.len(), 2);
        let roots = real_roots_in(&RealPoly::new(vec![0.0, 5.0, 0.0, -5.0, 0.0, 1.0]), -2.0, 2.0).unwrap();
        assert_eq!(roots.len(), 5);
        let p2 = RealPoly::new(vec![1.0, -2.0, 1.0]);
        assert_eq!(
            isolate_real_roots(&p2, &IntervalUnion::single(0.0, 2.0).unwrap()),
            Err(Error::NotSquarefree)
        );
    }

    #[test]
    fn aberth_roots() {
        let r = complex_roots(&RealPoly::new(vec![1.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        let r = complex_roots(&RealPoly::from_roots(&[1.0, 2.0, 3.0, -4.0])).unwrap();
        let expect = [-4.0, 1.0, 2.0, 3.0];
        for (z, e) in r.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-10 && z.im == 0.0);
        }
    }
}
