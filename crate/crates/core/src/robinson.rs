//! Monic integer polynomials with all roots in `E`, built from a rational
//! Pell-Abel datum with `Q = 1` and `M > 2`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abel::BandDensity;
use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::pellabel::{self, PellAbelDatum};
use crate::poly::ExactPoly;
use crate::rational;

/// Default cap on the degree `n r` of generated polynomials.
pub const DEFAULT_DEGREE_CAP: usize = 256;
/// Dyadic exponent of the rational extremum points used for sign certification.
const POINT_BITS: u32 = 48;
/// Samples per band for the numerical check of `sup_E |C_n|`.
const SUP_SAMPLES: usize = 4000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobinsonInstance {
    pub pa: PellAbelDatum,
    /// Exact `P`.
    pub p: ExactPoly,
    /// `M / 2`.
    #[serde(with = "rational::serde_rational")]
    pub lambda: BigRational,
    /// `sup_E (1 + |x| + ... + |x|^(r-1))`.
    pub a: f64,
    /// Smallest `l >= 1` with `lambda^l (lambda - 1) >= A / 2`.
    pub ell: usize,
}

impl RobinsonInstance {
    pub fn new(pa: PellAbelDatum) -> Result<Self> {
        let ex = pa
            .exact
            .as_ref()
            .ok_or_else(|| Error::Precondition("P must be exact rational".into()))?;
        if ex.q != ExactPoly::one() {
            return Err(Error::Precondition("Q must be 1".into()));
        }
        let m =
            ex.m.clone()
                .ok_or_else(|| Error::Precondition("M must be rational".into()))?;
        if m <= rational::int(2) {
            return Err(Error::Precondition(format!(
                "M = {} must exceed 2 (cap(E) > 1)",
                rational::format(&m)
            )));
        }
        let p = ex.p.clone();
        let lambda = m / rational::int(2);
        let (lo, hi) = pa.bands.hull();
        let xmax = lo.abs().max(hi.abs());
        let a: f64 = (0..pa.r).map(|j| xmax.powi(j as i32)).sum();
        let lf = rational::to_f64(&lambda);
        let ell = (1..)
            .find(|&l| lf.powi(l as i32) * (lf - 1.0) >= 0.5 * a)
            .expect("lambda > 1");
        Ok(RobinsonInstance { pa, p, lambda, a, ell })
    }

    /// `E = {|P| <= M}` for exact `P` and `M`.
    pub fn from_polynomial(p: &ExactPoly, m: &BigRational) -> Result<Self> {
        Self::new(pellabel::from_exact_q1(p, m)?)
    }

    /// `P = X^2 - 6`, `M = 4` on `[-sqrt 10, -sqrt 2] u [sqrt 2, sqrt 10]`.
    pub fn x2m6() -> Self {
        Self::from_polynomial(&ExactPoly::from_ints(&[-6, 0, 1]), &rational::int(4)).expect("valid preset")
    }

    /// `P = X^2 - 5`, `M = 3` on `[-sqrt 8, -sqrt 2] u [sqrt 2, sqrt 8]`.
    pub fn x2m5() -> Self {
        Self::from_polynomial(&ExactPoly::from_ints(&[-5, 0, 1]), &rational::int(3)).expect("valid preset")
    }

    pub fn r(&self) -> usize {
        self.pa.r
    }

    pub fn lambda_f64(&self) -> f64 {
        rational::to_f64(&self.lambda)
    }
}

/// `T_n` normalised by `T_n(t + 1/t) = t^n + t^(-n)`.
pub fn chebyshev_tn(n: usize) -> Result<ExactPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    for k in 1..=n / 2 {
        // (n/k) C(n-k-1, k-1) = n (n-k-1)! / (k! (n-2k)!)
        let binom = binomial(n - k - 1, k - 1);
        let v = (BigInt::from(n) * binom) / BigInt::from(k);
        c[n - 2 * k] = if k % 2 == 1 { -v } else { v };
    }
    Ok(ExactPoly::from_bigints(c))
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `P_1, ..., P_n` with `P_k = lambda^k T_k(P / lambda)`.
fn dickson_sequence(inst: &RobinsonInstance, n: usize) -> Vec<ExactPoly> {
    let l2 = ExactPoly::constant(&inst.lambda * &inst.lambda);
    let mut seq = vec![ExactPoly::constant(rational::int(2)), inst.p.clone()];
    while seq.len() <= n {
        let k = seq.len();
        let next = &(&inst.p * &seq[k - 1]) - &(&l2 * &seq[k - 2]);
        seq.push(next);
    }
    seq
}

/// `P_n = lambda^n T_n(P / lambda)`.
pub fn compose_pn(inst: &RobinsonInstance, n: usize) -> Result<ExactPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(dickson_sequence(inst, n).swap_remove(n))
}

/// Whether the `l r` coefficients of `P_n` just below the leading one are integers.
pub fn certify_integrality(inst: &RobinsonInstance, n: usize) -> Result<bool> {
    Ok(top_integral(&compose_pn(inst, n)?, inst.ell * inst.r()))
}

fn top_integral(pn: &ExactPoly, count: usize) -> bool {
    let d = pn.degree();
    (1..=count.min(d)).all(|i| pn.coeffs()[d - i].is_integer())
}

/// The correction `C_n = sum c_jk x^j P_k` and `P'_n = P_n - C_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub n: usize,
    pub c_n: ExactPoly,
    pub p_prime: ExactPoly,
    /// `c_jk` indexed `[k][j]`.
    #[serde(with = "coeff_table")]
    pub c_jk: Vec<Vec<BigRational>>,
    pub max_abs_c: f64,
    /// Sampled `sup_E |C_n|`.
    pub sup_abs: f64,
    /// `A lambda^(n-l) / (lambda - 1)`.
    pub analytic_bound: f64,
    /// `2 lambda^n`.
    pub threshold: f64,
}

mod coeff_table {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Row(#[serde(with = "rational::serde_rational_vec")] Vec<BigRational>);

    pub fn serialize<S: Serializer>(t: &[Vec<BigRational>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Row> = t.iter().map(|r| Row(r.clone())).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<BigRational>>, D::Error> {
        Ok(Vec::<Row>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

/// Reduces the coefficients below the top `l r` to integers, top degree down,
/// with `c_jk` in `[-1/2, 1/2)`.
pub fn correction_cn(inst: &RobinsonInstance, n: usize) -> Result<Correction> {
    let r = inst.r();
    let seq = dickson_sequence(inst, n);
    let pn = seq[n].clone();
    if pn.is_integer() {
        return Ok(Correction {
            n,
            c_n: ExactPoly::zero(),
            p_prime: pn,
            c_jk: Vec::new(),
            max_abs_c: 0.0,
            sup_abs: 0.0,
            analytic_bound: 0.0,
            threshold: 2.0 * inst.lambda_f64().powi(n as i32),
        });
    }
    if n <= inst.ell || !top_integral(&pn, inst.ell * r) {
        return Err(Error::Precondition(format!(
            "integrality of the top {} coefficients fails at n = {n} (l = {})",
            inst.ell * r,
            inst.ell
        )));
    }
    let kmax = n - inst.ell;
    let basis = |k: usize| if k == 0 { ExactPoly::one() } else { seq[k].clone() };
    let mut c_jk = vec![vec![BigRational::zero(); r]; kmax];
    let mut rest = pn.clone();
    let mut c_n = ExactPoly::zero();
    for deg in (0..kmax * r).rev() {
        let (k, j) = deg.div_rem(&r);
        let c = rational::centered_fract(&rest.coeff(deg));
        if c.is_zero() {
            continue;
        }
        let term = &basis(k).shift(j).scale(&c);
        rest = &rest - term;
        c_n = &c_n + term;
        c_jk[k][j] = c;
    }
    if !rest.is_integer() {
        return Err(Error::Certification("correction left non-integer coefficients".into()));
    }
    let lf = inst.lambda_f64();
    let max_abs_c = c_jk
        .iter()
        .flatten()
        .map(|c| rational::to_f64(c).abs())
        .fold(0.0, f64::max);
    let sup_abs = sup_on_bands(inst, &c_jk);
    Ok(Correction {
        n,
        c_n,
        p_prime: rest,
        c_jk,
        max_abs_c,
        sup_abs,
        analytic_bound: inst.a * lf.powi(kmax as i32) / (lf - 1.0),
        threshold: 2.0 * lf.powi(n as i32),
    })
}

/// `sup_E |sum c_jk x^j P_k(x)|` on a cosine grid per band, with `P_k`
/// evaluated by its three-term recurrence.
fn sup_on_bands(inst: &RobinsonInstance, c_jk: &[Vec<BigRational>]) -> f64 {
    let lf = inst.lambda_f64();
    let p = inst.p.to_real();
    let c: Vec<Vec<f64>> = c_jk
        .iter()
        .map(|row| row.iter().map(rational::to_f64).collect())
        .collect();
    let eval = |x: f64| {
        let y = p.eval(x);
        let (mut prev, mut cur) = (2.0, y);
        let mut total = 0.0;
        for (k, row) in c.iter().enumerate() {
            let pk = match k {
                0 => 1.0,
                1 => y,
                _ => {
                    let next = y * cur - lf * lf * prev;
                    prev = cur;
                    cur = next;
                    cur
                }
            };
            let poly_x: f64 = row.iter().rev().fold(0.0, |acc, &cj| acc * x + cj);
            total += poly_x * pk;
        }
        total.abs()
    };
    inst.pa
        .bands
        .bands()
        .par_iter()
        .map(|&(a, b)| {
            (0..=SUP_SAMPLES)
                .map(|i| {
                    let t = PI * i as f64 / SUP_SAMPLES as f64;
                    eval(0.5 * (a + b) - 0.5 * (b - a) * t.cos())
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Exact certificate that `P'_n` has `n r` simple roots in `E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootCertificate {
    pub n: usize,
    pub degree: usize,
    /// One isolating interval per root, endpoints exact rationals in `E`.
    pub intervals: Vec<IsolatingInterval>,
    pub band_counts: Vec<usize>,
    pub all_simple_in_e: bool,
    pub correction_zero: bool,
    pub max_abs_c: f64,
    pub sup_abs_correction: f64,
    pub analytic_bound: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolatingInterval {
    #[serde(with = "rational::serde_rational")]
    pub lo: BigRational,
    #[serde(with = "rational::serde_rational")]
    pub hi: BigRational,
    pub band: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub p_prime: ExactPoly,
    pub correction: Correction,
    pub certificate: RootCertificate,
}

/// Smallest admissible `n` with `n r >= degree_target`, then `P'_n` and its
/// root certificate.
pub fn generate(inst: &RobinsonInstance, degree_target: usize) -> Result<Generated> {
    generate_capped(inst, degree_target, DEFAULT_DEGREE_CAP)
}

pub fn generate_capped(inst: &RobinsonInstance, degree_target: usize, degree_cap: usize) -> Result<Generated> {
    let r = inst.r();
    let n0 = degree_target.div_ceil(r).max(1);
    let mut denominators = Vec::new();
    let l2 = ExactPoly::constant(&inst.lambda * &inst.lambda);
    let (mut prev, mut pn) = (ExactPoly::constant(rational::int(2)), inst.p.clone());
    for n in 1..=(degree_cap / r) {
        if n > 1 {
            let next = &(&inst.p * &pn) - &(&l2 * &prev);
            prev = std::mem::replace(&mut pn, next);
        }
        if n < n0 {
            continue;
        }
        let admissible = pn.is_integer() || (n > inst.ell && top_integral(&pn, inst.ell * r));
        if !admissible {
            let d = pn
                .coeffs()
                .iter()
                .rev()
                .skip(1)
                .take(inst.ell * r)
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            denominators.push((n, d));
            continue;
        }
        let correction = correction_cn(inst, n)?;
        let certificate = certify_roots(inst, &correction)?;
        return Ok(Generated {
            p_prime: correction.p_prime.clone(),
            correction,
            certificate,
        });
    }
    let worst = denominators
        .iter()
        .max_by_key(|(_, d)| d.bits())
        .map(|(n, d)| format!("; top-coefficient denominator {d} at n = {n}"))
        .unwrap_or_default();
    Err(Error::Certification(format!(
        "no n with {n0} <= n <= {} makes the top {} coefficients of P_n integral: the required divisibility modulus exceeds the degree cap{worst}",
        degree_cap / r,
        inst.ell * r
    )))
}

/// Points of band `j` where `P_n = +-2 lambda^n`, as exact rationals inside `E`.
fn extremum_points(inst: &RobinsonInstance, n: usize) -> Result<Vec<Vec<BigRational>>> {
    let p = inst.p.to_real();
    let m = rational::to_f64(&(&inst.lambda * rational::int(2)));
    let m_exact = &inst.lambda * rational::int(2);
    inst.pa
        .bands
        .bands()
        .iter()
        .map(|&(a, b)| {
            let rising = p.eval(b) > p.eval(a);
            (0..=n)
                .map(|i| {
                    let y = m * (PI * i as f64 / n as f64).cos();
                    let y = if rising { -y } else { y };
                    let f = |x: f64| if rising { p.eval(x) - y } else { y - p.eval(x) };
                    let (mut lo, mut hi) = (a, b);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if f(mid) < 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let mut x = 0.5 * (lo + hi);
                    // Pull the point inward until it is exactly in E.
                    let inward = if i == 0 {
                        1.0
                    } else if i == n {
                        -1.0
                    } else {
                        0.0
                    };
                    let mut step = 1e-15 * (b - a);
                    for _ in 0..60 {
                        let q = rational::round_dyadic(x, POINT_BITS);
                        if inst.p.eval(&q).abs() <= m_exact {
                            return Ok(q);
                        }
                        x += inward * step;
                        step *= 2.0;
                    }
                    Err(Error::Certification(format!(
                        "extremum point {i} not certified inside E"
                    )))
                })
                .collect()
        })
        .collect()
}

/// Exact sign alternation of `P'_n` across the extremum points of `P_n`.
fn certify_roots(inst: &RobinsonInstance, cor: &Correction) -> Result<RootCertificate> {
    let n = cor.n;
    let pts = extremum_points(inst, n)?;
    let mut intervals = Vec::new();
    let mut band_counts = Vec::new();
    for (band, row) in pts.iter().enumerate() {
        let signs: Vec<i32> = row.par_iter().map(|x| cor.p_prime.sign_at(x)).collect();
        let mut count = 0;
        for (i, w) in signs.windows(2).enumerate() {
            if w[0] * w[1] < 0 {
                count += 1;
                intervals.push(IsolatingInterval {
                    lo: row[i].clone(),
                    hi: row[i + 1].clone(),
                    band,
                });
            }
        }
        band_counts.push(count);
    }
    let degree = cor.p_prime.degree();
    let all = intervals.len() == degree && band_counts.iter().all(|&c| c == n);
    if !all {
        return Err(Error::Certification(format!(
            "sign alternation found {} of {degree} roots (per band {band_counts:?})",
            intervals.len()
        )));
    }
    Ok(RootCertificate {
        n,
        degree,
        intervals,
        band_counts,
        all_simple_in_e: all,
        correction_zero: cor.c_n.is_zero(),
        max_abs_c: cor.max_abs_c,
        sup_abs_correction: cor.sup_abs,
        analytic_bound: cor.analytic_bound,
        threshold: cor.threshold,
    })
}

/// Root measure of a certified `P'_n`, roots refined by exact bisection.
pub fn certified_root_measure(g: &Generated) -> Result<DiscreteMeasure> {
    let width = rational::ratio(1, 1 << 40);
    let pts: Vec<f64> = g
        .certificate
        .intervals
        .par_iter()
        .map(|iv| {
            let (lo, hi) = crate::roots::refine_exact(&g.p_prime, iv.lo.clone(), iv.hi.clone(), &width);
            rational::to_f64(&((lo + hi) / rational::int(2)))
        })
        .collect();
    DiscreteMeasure::uniform_real(&pts)
}

/// Sup distance between the CDF of a real discrete measure and `cdf`.
pub fn kolmogorov_distance(mu: &DiscreteMeasure, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    let mut worst: f64 = 0.0;
    for &(z, w) in mu.atoms() {
        let f = cdf(z.re);
        worst = worst.max((f - acc).abs());
        acc += w;
        worst = worst.max((f - acc).abs());
    }
    worst
}

/// Kolmogorov distance of each measure to the equilibrium measure.
pub fn convergence_report(measures: &[DiscreteMeasure], mu_e: &BandDensity) -> Result<Vec<f64>> {
    measures
        .iter()
        .map(|m| {
            let mass = m.total_mass();
            if (mass - 1.0).abs() > 1e-9 || !m.is_real(1e-12) {
                return Err(Error::NotNormalized(mass));
            }
            Ok(kolmogorov_distance(m, |x| mu_e.cdf(x)))
        })
        .collect()
}

/// Integer coefficient strings, constant term first.
pub fn integer_strings(p: &ExactPoly) -> Result<Vec<String>> {
    Ok(p.integer_coeffs()?.iter().map(|c| c.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abel::{equilibrium_density, solve_r};
    use crate::rational::ratio;

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_tn(1).unwrap(), ExactPoly::from_ints(&[0, 1]));
        assert_eq!(chebyshev_tn(3).unwrap(), ExactPoly::from_ints(&[0, -3, 0, 1]));
        assert_eq!(chebyshev_tn(5).unwrap(), ExactPoly::from_ints(&[0, 5, 0, -5, 0, 1]));
        assert_eq!(chebyshev_tn(2).unwrap(), ExactPoly::from_ints(&[-2, 0, 1]));
        assert!(chebyshev_tn(0).is_err());
    }

    #[test]
    fn composition_matches_chebyshev() {
        let inst = RobinsonInstance::x2m5();
        assert_eq!(inst.lambda, ratio(3, 2));
        assert_eq!(compose_pn(&inst, 1).unwrap(), inst.p);
        let p2 = &(&inst.p * &inst.p) - &ExactPoly::constant(ratio(9, 2));
        assert_eq!(compose_pn(&inst, 2).unwrap(), p2);
        let t5 = chebyshev_tn(5).unwrap();
        let l = &inst.lambda;
        let direct = t5
            .compose(&inst.p.scale(&l.recip()))
            .scale(&num_traits::pow(l.clone(), 5));
        assert_eq!(compose_pn(&inst, 5).unwrap(), direct);
    }

    #[test]
    fn reference_instance() {
        let inst = RobinsonInstance::x2m6();
        assert_eq!(inst.lambda, rational::int(2));
        assert_eq!(inst.ell, 2);
        assert!(certify_integrality(&inst, 7).unwrap());
        let c = correction_cn(&inst, 4).unwrap();
        assert!(c.c_n.is_zero() && c.p_prime.degree() == 8 && c.p_prime.is_integer());
        let g = generate(&inst, 2).unwrap();
        assert_eq!(g.p_prime, inst.p);
        assert_eq!(g.certificate.band_counts, vec![1, 1]);
    }

    #[test]
    fn low_capacity_rejected() {
        let err = RobinsonInstance::from_polynomial(&ExactPoly::from_ints(&[0, 1]), &rational::int(2));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn convergence_on_reference() {
        let inst = RobinsonInstance::x2m6();
        let dens = equilibrium_density(&solve_r(&inst.pa.bands).unwrap());
        let mut ms = vec![crate::measure::DiscreteMeasure::uniform_real(&[-6f64.sqrt(), 6f64.sqrt()]).unwrap()];
        for n in [2, 4, 8] {
            ms.push(certified_root_measure(&generate(&inst, 2 * n).unwrap()).unwrap());
        }
        let d = convergence_report(&ms, &dens).unwrap();
        assert!(d[0] > 0.0);
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        let q: Vec<f64> = (0..16).map(|i| dens.quantile((i as f64 + 0.5) / 16.0)).collect();
        let mq = crate::measure::DiscreteMeasure::uniform_real(&q).unwrap();
        assert!(kolmogorov_distance(&mq, |x| dens.cdf(x)) <= 1.0 / 32.0 + 1e-9);
    }

    #[test]
    fn correction_path_on_rational_lambda() {
        let inst = RobinsonInstance::x2m5();
        assert_eq!(inst.ell, 4);
        assert!(!certify_integrality(&inst, 2).unwrap());
        assert!(correction_cn(&inst, 6).is_err());
        let g = generate(&inst, 3).unwrap();
        let c = &g.correction;
        assert_eq!(c.n, 32);
        assert!(!c.c_n.is_zero() && c.p_prime.is_integer() && c.p_prime.is_monic());
        assert!(c.max_abs_c <= 0.5);
        assert!(c.sup_abs < c.threshold && c.analytic_bound < c.threshold);
        assert_eq!(g.certificate.band_counts, vec![32, 32]);
    }

    #[test]
    fn infeasible_modulus_is_diagnosed() {
        let inst = RobinsonInstance::from_polynomial(&ExactPoly::from_ints(&[-5, 0, 1]), &ratio(5, 2)).unwrap();
        assert_eq!(inst.ell, 10);
        let err = generate_capped(&inst, 3, 64).unwrap_err();
        assert!(err.to_string().contains("divisibility"));
    }
}
