//! Pell-Abel polynomials: `P^2 - D Q^2 = M^2` with `E = {|P| <= M}`.
//! Detection from the harmonic weights, synthesis of `P` and `Q`, the
//! structure certificate, and rationalisation with `Q = 1`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::abel::{self, AbelDatum};
use crate::capacity::cheb_t;
use crate::error::{Error, Result};
use crate::interval::IntervalUnion;
use crate::poly::{ExactPoly, RealPoly};
use crate::rational;
use crate::roots;

/// Tolerance for recognising `r omega_j` as an integer.
pub const TOL_RAT: f64 = 1e-9;
pub const DEFAULT_MAX_DENOMINATOR: usize = 64;
pub const FIT_TOL: f64 = 1e-6;
const DIVISION_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-8;
const DERIVATIVE_TOL: f64 = 1e-6;
/// Largest denominator tried when snapping floating coefficients to rationals.
const SNAP_DENOMINATOR: u64 = 1 << 12;

/// Exact companion of a Pell-Abel datum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactPellAbel {
    pub p: ExactPoly,
    pub q: ExactPoly,
    pub d: ExactPoly,
    #[serde(with = "rational::serde_rational")]
    pub m_squared: BigRational,
    /// `M` itself when it is rational.
    #[serde(with = "rational::serde_rational_opt")]
    pub m: Option<BigRational>,
}

impl ExactPellAbel {
    /// `P^2 - D Q^2 - M^2`, which vanishes for a valid datum.
    pub fn identity_defect(&self) -> ExactPoly {
        let lhs = &(&self.p * &self.p) - &(&self.d * &(&self.q * &self.q));
        &lhs - &ExactPoly::constant(self.m_squared.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PellResiduals {
    /// Largest fit error of `P` against `M cos(theta)`, relative to `M`.
    pub fit: f64,
    /// Remainder of `(P^2 - M^2) / D`, relative to the dividend.
    pub division: f64,
    /// Remainder of the polynomial square root, relative.
    pub sqrt: f64,
    /// Coefficients of `P^2 - D Q^2 - M^2`, relative to `M^2`.
    pub identity: f64,
}

/// `P^2 - D Q^2 = M^2` on the union `E = {|P| <= M}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PellAbelDatum {
    pub bands: IntervalUnion,
    pub p: RealPoly,
    pub q: RealPoly,
    pub d: RealPoly,
    /// The polynomial `R` of `E`, so that `P' = r Q R`.
    pub r_poly: RealPoly,
    pub m: f64,
    pub r: usize,
    pub r_j: Vec<usize>,
    pub residuals: PellResiduals,
    pub exact: Option<ExactPellAbel>,
}

impl PellAbelDatum {
    /// `(M/2)^(1/r)`.
    pub fn capacity(&self) -> f64 {
        (0.5 * self.m).powf(1.0 / self.r as f64)
    }
}

pub fn rotation_numbers(datum: &AbelDatum) -> Vec<f64> {
    datum.omega.clone()
}

/// Smallest `r <= max_denominator` with every `r omega_j` within `tol` of a
/// positive integer.
pub fn detect_from_weights(omega: &[f64], max_denominator: usize, tol: f64) -> Option<(usize, Vec<usize>)> {
    (1..=max_denominator).find_map(|r| {
        let rj: Vec<f64> = omega.iter().map(|w| r as f64 * w).collect();
        rj.iter()
            .all(|v| v.round() >= 1.0 && (v - v.round()).abs() <= tol)
            .then(|| (r, rj.iter().map(|v| v.round() as usize).collect()))
    })
}

pub fn detect_pell_abel(datum: &AbelDatum, max_denominator: usize) -> Option<(usize, Vec<usize>)> {
    detect_from_weights(&datum.omega, max_denominator, TOL_RAT)
}

/// Synthesises `P = M cos(theta)` band by band, then `Q` from `(P^2 - M^2) / D`.
pub fn construct_pa_polynomial(datum: &AbelDatum, r: usize) -> Result<PellAbelDatum> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let r_j: Vec<usize> = datum
        .omega
        .iter()
        .map(|w| {
            let v = r as f64 * w;
            if v.round() >= 1.0 && (v - v.round()).abs() <= TOL_RAT {
                Ok(v.round() as usize)
            } else {
                Err(Error::Precondition(format!(
                    "r * omega = {v} is not a positive integer"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let m = 2.0 * datum.capacity().powi(r as i32);
    let density = abel::equilibrium_density(datum);
    let masses = density.band_masses();
    let bands = datum.bands.bands();
    let (lo, hi) = datum.bands.hull();
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let per_band = (4 * r + 8).max(32);
    // Sign of P at the right end of each band.
    let mut signs = vec![1.0; bands.len()];
    for j in (0..bands.len().saturating_sub(1)).rev() {
        signs[j] = signs[j + 1] * if r_j[j + 1] % 2 == 1 { -1.0 } else { 1.0 };
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (j, &(a, b)) in bands.iter().enumerate() {
        for i in 0..per_band {
            let t = (PI * (i as f64 + 0.5) / per_band as f64).cos();
            let x = 0.5 * (a + b) - 0.5 * (b - a) * t;
            let frac = density.band_cdf(j, x) / masses[j];
            xs.push(x);
            ys.push(signs[j] * m * (PI * r_j[j] as f64 * (1.0 - frac)).cos());
        }
    }
    // Monic least squares in the scaled Chebyshev basis of the hull.
    let lead = half.powi(r as i32) / 2f64.powi(r as i32 - 1);
    let n = xs.len();
    let a = DMatrix::from_fn(n, r, |i, k| cheb_t(k, (xs[i] - center) / half));
    let rhs = DVector::from_fn(n, |i, _| ys[i] / lead - cheb_t(r, (xs[i] - center) / half));
    let sol = a
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::NoConvergence(format!("least squares failed: {e}")))?;
    let mut cheb: Vec<f64> = sol.iter().map(|v| v * lead).collect();
    cheb.push(lead);
    let p = RealPoly::from_chebyshev(&cheb, center, half);
    let fit = xs
        .iter()
        .zip(&ys)
        .fold(0.0f64, |mx, (&x, &y)| mx.max((p.eval(x) - y).abs()))
        / m;
    if fit > FIT_TOL {
        return Err(Error::Certification(format!(
            "fit residual {fit} above {FIT_TOL}: r is wrong or the quadrature is too coarse"
        )));
    }
    let d = datum.d.clone();
    let (q, division, sqrt_res) = extract_q(&p, &d, m);
    if division > DIVISION_TOL || sqrt_res > DIVISION_TOL {
        return Err(Error::Certification(format!(
            "Q extraction remainders too large: division {division}, square root {sqrt_res}"
        )));
    }
    let identity = identity_residual(&p, &q, &d, m);
    let mut pa = PellAbelDatum {
        bands: datum.bands.clone(),
        p,
        q,
        d,
        r_poly: datum.r.clone(),
        m,
        r,
        r_j,
        residuals: PellResiduals {
            fit,
            division,
            sqrt: sqrt_res,
            identity,
        },
        exact: None,
    };
    pa.exact = snap_exact(&pa);
    Ok(pa)
}

/// `Q` with `Q^2 = (P^2 - M^2) / D`, plus relative division and root remainders.
fn extract_q(p: &RealPoly, d: &RealPoly, m: f64) -> (RealPoly, f64, f64) {
    let num = &(p * p) - &RealPoly::constant(m * m);
    let (s, rem) = num.div_rem(d);
    let division = rem.max_abs_coeff() / num.max_abs_coeff().max(1e-300);
    let deg = s.degree() / 2;
    let mut q = vec![0.0; deg + 1];
    q[deg] = s.leading().abs().sqrt();
    for i in 1..=deg {
        let k = 2 * deg - i;
        let mut acc = s.coeff(k);
        for a in (deg - i + 1)..=deg {
            let b = k as isize - a as isize;
            if b > (deg - i) as isize && b <= deg as isize {
                acc -= q[a] * q[b as usize];
            }
        }
        q[deg - i] = acc / (2.0 * q[deg]);
    }
    let q = RealPoly::new(q);
    let sq = &s - &(&q * &q);
    let sqrt_res = sq.max_abs_coeff() / s.max_abs_coeff().max(1e-300);
    (q, division, sqrt_res)
}

fn identity_residual(p: &RealPoly, q: &RealPoly, d: &RealPoly, m: f64) -> f64 {
    let defect = &(&(p * p) - &(d * &(q * q))) - &RealPoly::constant(m * m);
    defect.max_abs_coeff() / (m * m)
}

fn snap(x: f64) -> BigRational {
    rational::best_approximation(x, SNAP_DENOMINATOR)
}

/// Snaps `P`, `Q`, `D`, `M^2` to small-denominator rationals and keeps the
/// result when the identity then holds exactly.
fn snap_exact(pa: &PellAbelDatum) -> Option<ExactPellAbel> {
    let sp = |p: &RealPoly| ExactPoly::new(p.coeffs().iter().map(|&c| snap(c)).collect());
    let m_squared = snap(pa.m * pa.m);
    let m = Some(snap(pa.m)).filter(|v| v * v == m_squared);
    let ex = ExactPellAbel {
        p: sp(&pa.p),
        q: sp(&pa.q),
        d: sp(&pa.d),
        m_squared,
        m,
    };
    (ex.p.is_monic() && ex.identity_defect().is_zero()).then_some(ex)
}

/// Pass/fail entry of a structure report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub clauses: Vec<Clause>,
    /// Sub-intervals of monotonicity per band.
    pub sub_intervals: Vec<usize>,
    /// Signs of `P` at the sub-interval ends, per band.
    pub alternation: Vec<Vec<i8>>,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

/// Checks the identity, root counts, alternation, containment and the
/// derivative identity; failures are report entries, not errors.
pub fn certify_structure(pa: &PellAbelDatum) -> StructureReport {
    let mut clauses = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        clauses.push(Clause {
            name: name.to_string(),
            passed,
            detail,
        });
    };
    let m = pa.m;
    let identity = identity_residual(&pa.p, &pa.q, &pa.d, m);
    match &pa.exact {
        Some(ex) => {
            let zero = ex.identity_defect().is_zero();
            push("pell_identity", zero, format!("exact identity holds: {zero}"));
        }
        None => push(
            "pell_identity",
            identity < IDENTITY_TOL,
            format!("relative coefficient residual {identity:.3e}"),
        ),
    }
    let bands = pa.bands.bands();
    let mut p_ok = true;
    let mut q_ok = true;
    let mut alt_ok = true;
    let mut mono_ok = true;
    let mut p_detail = Vec::new();
    let mut q_detail = Vec::new();
    let mut sub_intervals = Vec::new();
    let mut alternation = Vec::new();
    let dp = pa.p.derivative();
    for (j, &(a, b)) in bands.iter().enumerate() {
        let want = pa.r_j.get(j).copied().unwrap_or(0);
        let pr = roots::real_roots_in(&pa.p, a, b).map(|v| v.len()).unwrap_or(usize::MAX);
        p_ok &= pr == want;
        p_detail.push(pr.to_string());
        let qr: Vec<f64> = if pa.q.degree() == 0 {
            vec![]
        } else {
            roots::real_roots_in(&pa.q, a, b)
                .unwrap_or_default()
                .into_iter()
                .filter(|&x| x > a && x < b)
                .collect()
        };
        q_ok &= qr.len() + 1 == want;
        q_detail.push(qr.len().to_string());
        let mut cuts = vec![a];
        cuts.extend(qr.iter().copied());
        cuts.push(b);
        let signs: Vec<i8> = cuts
            .iter()
            .map(|&x| {
                let v = pa.p.eval(x);
                if (v.abs() - m).abs() > 1e-6 * m {
                    alt_ok = false;
                }
                if v >= 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        alt_ok &= signs.windows(2).all(|w| w[0] != w[1]);
        let crit = roots::real_roots_in(&dp, a, b)
            .map(|v| v.into_iter().filter(|&x| x > a && x < b).count())
            .unwrap_or(usize::MAX);
        mono_ok &= crit + 1 == want;
        sub_intervals.push(cuts.len() - 1);
        alternation.push(signs);
    }
    push(
        "p_roots_per_band",
        p_ok,
        format!("roots per band [{}], expected {:?}", p_detail.join(", "), pa.r_j),
    );
    push(
        "q_roots_per_band",
        q_ok,
        format!("interior roots of Q per band [{}]", q_detail.join(", ")),
    );
    push(
        "alternation",
        alt_ok,
        format!("extremes +-M at sub-interval ends, signs {alternation:?}"),
    );
    push(
        "monotone",
        mono_ok,
        "P' vanishes only at the roots of Q inside E".to_string(),
    );
    // Containment: |P| <= M on E and |P| > M off E.
    let (lo, hi) = pa.bands.hull();
    let span = hi - lo;
    let mut inside_ok = true;
    for &(a, b) in bands {
        for i in 0..=50 {
            let x = a + (b - a) * i as f64 / 50.0;
            inside_ok &= pa.p.eval(x).abs() <= m * (1.0 + 1e-9);
        }
    }
    let mut outside = vec![lo - 0.1 * span, hi + 0.1 * span, lo - 1e-3 * span, hi + 1e-3 * span];
    for (ga, gb) in pa.bands.gaps() {
        for f in [0.25, 0.5, 0.75] {
            outside.push(ga + (gb - ga) * f);
        }
    }
    let outside_ok = outside.iter().all(|&x| pa.p.eval(x).abs() > m);
    push(
        "containment",
        inside_ok && outside_ok,
        format!("|P| <= M on E: {inside_ok}; |P| > M off E: {outside_ok}"),
    );
    let rq = &(&pa.q * &pa.r_poly).scale(pa.r as f64);
    let diff = &dp - rq;
    let rel = diff.max_abs_coeff() / dp.max_abs_coeff();
    push(
        "derivative_identity",
        rel < DERIVATIVE_TOL,
        format!("|P' - r Q R| / |P'| = {rel:.3e}"),
    );
    StructureReport {
        clauses,
        sub_intervals,
        alternation,
    }
}

/// Output of [`rationalize`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rationalized {
    pub p_prime: ExactPoly,
    pub e_prime: IntervalUnion,
    pub pa_prime: PellAbelDatum,
    /// Dyadic exponent `k` of the coefficient rounding.
    pub rounding_bits: u32,
    /// `(M'/2)^(1/r)`.
    pub capacity: f64,
}

/// Rounds `P` to a rational `P'` and returns `E' = {|P'| <= M'}` with `Q' = 1`.
pub fn rationalize(pa: &PellAbelDatum, m_prime: &BigRational) -> Result<Rationalized> {
    let mp = rational::to_f64(m_prime);
    if !m_prime.is_positive() || mp >= pa.m {
        return Err(Error::Precondition(format!("need 0 < M' < M = {}", pa.m)));
    }
    let candidates: Vec<(u32, ExactPoly)> = match &pa.exact {
        Some(ex) => vec![(0, ex.p.clone())],
        None => (0..=52)
            .map(|k| {
                let mut c: Vec<BigRational> = pa.p.coeffs().iter().map(|&x| rational::round_dyadic(x, k)).collect();
                *c.last_mut().unwrap() = BigRational::one();
                (k, ExactPoly::new(c))
            })
            .collect(),
    };
    let mut last_err = String::new();
    for (k, p_prime) in candidates {
        match certify_rational(pa, &p_prime, m_prime) {
            Ok(pa_prime) => {
                return Ok(Rationalized {
                    p_prime,
                    e_prime: pa_prime.bands.clone(),
                    capacity: pa_prime.capacity(),
                    pa_prime,
                    rounding_bits: k,
                })
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(Error::Certification(format!(
        "M' too close to M for the rounding radius: {last_err}"
    )))
}

/// Builds the `Q = 1` datum of `E' = {|P| <= M}` exactly, then checks its bands
/// sit inside `pa`'s bands with the same per-band counts.
fn certify_rational(pa: &PellAbelDatum, p: &ExactPoly, m: &BigRational) -> Result<PellAbelDatum> {
    let out = from_exact_q1(p, m)?;
    let bands = pa.bands.bands();
    let mut counts = vec![0usize; bands.len()];
    for &(a, b) in out.bands.bands() {
        let j = bands
            .iter()
            .position(|&(lo, hi)| lo < a && b < hi)
            .ok_or_else(|| Error::Certification(format!("band [{a}, {b}] leaves the interior of E")))?;
        counts[j] += 1;
    }
    if counts != pa.r_j {
        return Err(Error::Certification(format!(
            "band counts {counts:?} differ from {:?}",
            pa.r_j
        )));
    }
    Ok(out)
}

/// Isolates and refines the real roots of `p` exactly; returns isolating
/// intervals of width at most `2^-60` times the root bound.
pub fn exact_real_roots(p: &ExactPoly) -> Result<Vec<(BigRational, BigRational)>> {
    let lead = p.leading().abs();
    let bound = p.coeffs()[..p.degree()].iter().fold(BigRational::zero(), |mx, c| {
        let v = c.abs() / &lead;
        if v > mx {
            v
        } else {
            mx
        }
    }) + BigRational::one();
    let iso = roots::isolate_in_rational_bands(p, &[(-bound.clone(), bound.clone())])?;
    let width = &bound / BigRational::from_integer(num_bigint::BigInt::one() << 60);
    Ok(iso
        .into_iter()
        .map(|(lo, hi)| roots::refine_exact(p, lo, hi, &width))
        .collect())
}

/// The `Q = 1` Pell-Abel datum of `E = {|P| <= M}` for rational `P` and `M`.
pub fn from_exact_q1(p: &ExactPoly, m: &BigRational) -> Result<PellAbelDatum> {
    if !p.is_monic() || p.degree() == 0 {
        return Err(Error::InvalidArgument("P must be monic and nonconstant".into()));
    }
    if !m.is_positive() {
        return Err(Error::InvalidArgument("M must be positive".into()));
    }
    let r = p.degree();
    let mc = ExactPoly::constant(m.clone());
    let plus = p - &mc;
    let minus = p + &mc;
    let mut ends = Vec::new();
    for s in [&plus, &minus] {
        let iso = exact_real_roots(s)?;
        if iso.len() != r {
            return Err(Error::Certification(format!(
                "P -+ M has {} real roots, expected {r}",
                iso.len()
            )));
        }
        ends.extend(iso);
    }
    ends.sort();
    for w in ends.windows(2) {
        if w[0].1 >= w[1].0 {
            return Err(Error::Certification("endpoints of E are not separated".into()));
        }
    }
    let pts: Vec<f64> = ends
        .iter()
        .map(|(lo, hi)| rational::to_f64(&((lo + hi) / rational::int(2))))
        .collect();
    let pairs: Vec<(f64, f64)> = pts.chunks(2).map(|c| (c[0], c[1])).collect();
    let bands = IntervalUnion::with_tolerance(&pairs, 0.0)?;
    if bands.band_count() != r {
        return Err(Error::Certification("E does not have r bands".into()));
    }
    let m2 = m * m;
    let d_exact = &(p * p) - &ExactPoly::constant(m2.clone());
    let exact = ExactPellAbel {
        p: p.clone(),
        q: ExactPoly::one(),
        d: d_exact.clone(),
        m_squared: m2,
        m: Some(m.clone()),
    };
    let pr = p.to_real();
    let r_poly = p.derivative().scale(&rational::int(r as i64).recip()).to_real();
    Ok(PellAbelDatum {
        bands,
        p: pr,
        q: RealPoly::constant(1.0),
        d: d_exact.to_real(),
        r_poly,
        m: rational::to_f64(m),
        r,
        r_j: vec![1; r],
        residuals: PellResiduals {
            fit: 0.0,
            division: 0.0,
            sqrt: 0.0,
            identity: 0.0,
        },
        exact: Some(exact),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abel::solve_r;
    use crate::rational::{int, ratio};

    fn sym_pair() -> IntervalUnion {
        IntervalUnion::new(&[(-8f64.sqrt(), -2f64.sqrt()), (2f64.sqrt(), 8f64.sqrt())]).unwrap()
    }

    #[test]
    fn detection() {
        assert_eq!(detect_from_weights(&[0.5, 0.5], 10, TOL_RAT), Some((2, vec![1, 1])));
        assert_eq!(detect_from_weights(&[1.0], 10, TOL_RAT), Some((1, vec![1])));
        let w = 1.0 / 2f64.sqrt();
        assert_eq!(detect_from_weights(&[w, 1.0 - w], 50, TOL_RAT), None);
        let d = solve_r(&IntervalUnion::new(&[(0.0, 1.0), (2.0, 3.0)]).unwrap()).unwrap();
        let om = rotation_numbers(&d);
        assert!((om[0] - 0.5).abs() < 1e-12);
        assert_eq!(detect_pell_abel(&d, DEFAULT_MAX_DENOMINATOR), Some((2, vec![1, 1])));
    }

    #[test]
    fn symmetric_pair_recovers_x2_minus_5() {
        let d = solve_r(&sym_pair()).unwrap();
        let pa = construct_pa_polynomial(&d, 2).unwrap();
        assert!((pa.m - 3.0).abs() < 1e-9);
        let ex = pa.exact.as_ref().expect("exact form");
        assert_eq!(ex.p, ExactPoly::from_ints(&[-5, 0, 1]));
        assert_eq!(ex.q, ExactPoly::one());
        assert_eq!(ex.m, Some(int(3)));
        let rep = certify_structure(&pa);
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.sub_intervals, vec![1, 1]);
    }

    #[test]
    fn chebyshev_pairs_on_interval() {
        let d = solve_r(&IntervalUnion::single(-2.0, 2.0).unwrap()).unwrap();
        let pa = construct_pa_polynomial(&d, 1).unwrap();
        assert!((pa.p.coeff(0)).abs() < 1e-12 && (pa.m - 2.0).abs() < 1e-10);
        assert_eq!(pa.q.degree(), 0);
        let pa4 = construct_pa_polynomial(&d, 4).unwrap();
        let expect = [2.0, 0.0, -4.0, 0.0, 1.0];
        for (x, y) in pa4.p.coeffs().iter().zip(expect) {
            assert!((x - y).abs() < 1e-8);
        }
        let rep = certify_structure(&pa4);
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.sub_intervals, vec![4]);
        assert_eq!(rep.alternation[0], vec![1, -1, 1, -1, 1]);
    }

    #[test]
    fn corrupted_datum_fails_containment() {
        let d = solve_r(&sym_pair()).unwrap();
        let mut pa = construct_pa_polynomial(&d, 2).unwrap();
        pa.m = 2.5;
        pa.exact = None;
        let rep = certify_structure(&pa);
        assert!(!rep.clause("containment").unwrap().passed);
    }

    #[test]
    fn wrong_r_is_rejected() {
        let d = solve_r(&sym_pair()).unwrap();
        assert!(construct_pa_polynomial(&d, 3).is_err());
    }

    #[test]
    fn rationalize_examples() {
        let d = solve_r(&sym_pair()).unwrap();
        let pa = construct_pa_polynomial(&d, 2).unwrap();
        let out = rationalize(&pa, &ratio(5, 2)).unwrap();
        assert_eq!(out.p_prime, ExactPoly::from_ints(&[-5, 0, 1]));
        let b = out.e_prime.bands();
        assert!((b[1].0 - 2.5f64.sqrt()).abs() < 1e-14 && (b[1].1 - 7.5f64.sqrt()).abs() < 1e-14);
        assert!((out.capacity - 1.25f64.sqrt()).abs() < 1e-15);
        let dd = solve_r(&out.e_prime).unwrap();
        assert!((dd.capacity() - out.capacity).abs() < 1e-7);
        assert!(rationalize(&pa, &int(3)).is_err());

        let d = solve_r(&IntervalUnion::single(-2.0, 2.0).unwrap()).unwrap();
        let pa3 = construct_pa_polynomial(&d, 3).unwrap();
        let mut pa3 = pa3;
        pa3.exact = None;
        let out = rationalize(&pa3, &ratio(3, 2)).unwrap();
        assert_eq!(out.p_prime, ExactPoly::from_ints(&[0, -3, 0, 1]));
        assert_eq!(out.e_prime.band_count(), 3);
        let (lo, hi) = out.e_prime.hull();
        assert!(lo > -2.0 && hi < 2.0);
    }
}
