//! Transfer between the circle `|z| = sqrt q` and `I = [-2 sqrt q, 2 sqrt q]`
//! through `f(z) = z + conj(z)`, Weil-type lifts of integer polynomials, and
//! the `q^(1/4)` support-capacity test.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::abel::{self, BandDensity};
use crate::capacity;
use crate::error::{Error, Result};
use crate::interval::IntervalUnion;
use crate::measure::{self, Density};
use crate::poly::ExactPoly;
use crate::rational;
use crate::roots::{self, SturmSequence};

/// A conjugation-invariant closed subset of the circle `|z| = sqrt q`, given
/// by its image under `z + conj(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSet {
    pub q: u64,
    pub x_bands: IntervalUnion,
}

impl CircleSet {
    pub fn new(q: u64, x_bands: IntervalUnion) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("q = {q} must be at least 2")));
        }
        let s = 2.0 * (q as f64).sqrt();
        let (lo, hi) = x_bands.hull();
        let slack = 1e-12 * s;
        if lo < -s - slack || hi > s + slack {
            return Err(Error::InvalidArgument(format!("bands [{lo}, {hi}] leave [-{s}, {s}]")));
        }
        Ok(CircleSet { q, x_bands })
    }

    /// The whole circle.
    pub fn full_circle(q: u64) -> Result<Self> {
        let s = 2.0 * (q as f64).sqrt();
        Self::new(q, IntervalUnion::single(-s, s)?)
    }

    /// Points of the circle with real part in `[a, b]`.
    pub fn vertical_strip(q: u64, a: f64, b: f64) -> Result<Self> {
        Self::new(q, IntervalUnion::single(2.0 * a, 2.0 * b)?)
    }

    /// `sqrt q`.
    pub fn radius(&self) -> f64 {
        (self.q as f64).sqrt()
    }
}

/// `cap = r^(1/2) cap(x_bands)^(1/2)`.
pub fn circle_capacity(cs: &CircleSet) -> Result<f64> {
    let datum = abel::solve_r(&cs.x_bands)?;
    let cap_i = abel::abel_capacity(&datum)?.value;
    Ok((cs.radius() * cap_i).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportBound {
    pub cap: f64,
    /// `q^(1/4)`.
    pub bound: f64,
    pub satisfied: bool,
}

pub fn support_capacity_bound(cs: &CircleSet) -> Result<SupportBound> {
    let cap = circle_capacity(cs)?;
    let bound = (cs.q as f64).powf(0.25);
    Ok(SupportBound {
        cap,
        bound,
        satisfied: cap >= bound,
    })
}

/// Whether every complex root of `p` is real with `x^2 <= 4q`.
pub fn roots_within(p: &ExactPoly, q: u64) -> Result<bool> {
    let four_q = rational::int(4 * q as i64);
    let edge = &(&ExactPoly::x() * &ExactPoly::x()) - &ExactPoly::constant(four_q.clone());
    for (factor, _) in p.squarefree_decomposition() {
        // Roots exactly at +-2 sqrt q are admissible; split them off.
        let g = factor.gcd(&edge);
        let rest = if g.degree() > 0 { factor.div_rem(&g).0 } else { factor };
        if rest.degree() == 0 {
            continue;
        }
        let sturm = SturmSequence::new(&rest)?;
        if sturm.count_real() != rest.degree() {
            return Ok(false);
        }
        // Rational bracket around 2 sqrt q free of roots of `rest`.
        let (mut lo, mut hi) = sqrt_bracket(&four_q);
        while sturm.count_in(&lo, &hi) > 0 || sturm.count_in(&-&hi, &-&lo) > 0 {
            let mid = (&lo + &hi) / rational::int(2);
            if &mid * &mid < four_q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if sturm.count_in(&-&lo, &lo) != rest.degree() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `lo < sqrt(v) <= hi` with `lo >= 0`.
fn sqrt_bracket(v: &BigRational) -> (BigRational, BigRational) {
    let mut hi = v + BigRational::one();
    let mut lo = BigRational::zero();
    for _ in 0..8 {
        let mid = (&lo + &hi) / rational::int(2);
        if &mid * &mid < *v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// `X^d P_I((X^2 + q) / X)`: the monic integer polynomial whose roots `z`
/// satisfy `z + q/z = a` for the roots `a` of `P_I`.
pub fn weil_lift(p_i: &ExactPoly, q: u64) -> Result<ExactPoly> {
    if !p_i.is_monic() || !p_i.is_integer() {
        return Err(Error::InvalidArgument(
            "P_I must be monic with integer coefficients".into(),
        ));
    }
    if p_i.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    if !roots_within(p_i, q)? {
        return Err(Error::Precondition(format!(
            "a root of {p_i} lies off [-2 sqrt {q}, 2 sqrt {q}]"
        )));
    }
    let d = p_i.degree();
    let x2q = ExactPoly::from_bigints(vec![BigInt::from(q), BigInt::zero(), BigInt::one()]);
    let mut out = ExactPoly::zero();
    let mut power = ExactPoly::one();
    for (i, c) in p_i.coeffs().iter().enumerate() {
        out = &out + &power.shift(d - i).scale(c);
        power = &power * &x2q;
    }
    Ok(out)
}

/// Roots of `p` with multiplicity, from its squarefree factors.
fn roots_with_multiplicity(p: &ExactPoly) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        if factor.degree() == 0 {
            continue;
        }
        for z in roots::complex_roots(&factor.to_real())? {
            out.extend(std::iter::repeat_n(z, mult));
        }
    }
    Ok(out)
}

/// Largest `| |z| - sqrt q |` over the roots of `p_c`.
pub fn modulus_defect(p_c: &ExactPoly, q: u64) -> Result<f64> {
    let r = (q as f64).sqrt();
    Ok(roots_with_multiplicity(p_c)?
        .iter()
        .map(|z| (z.norm() - r).abs())
        .fold(0.0, f64::max))
}

/// Whether `{z + q/z}` over the roots of `p_c` is the root multiset of `p_i`,
/// each root counted twice, within `1e-10`.
pub fn pushforward_check(p_c: &ExactPoly, p_i: &ExactPoly, q: u64) -> bool {
    const TOL: f64 = 1e-10;
    if p_i.degree() == 0 || p_c.degree() != 2 * p_i.degree() {
        return false;
    }
    let (Ok(zc), Ok(zi)) = (roots_with_multiplicity(p_c), roots_with_multiplicity(p_i)) else {
        return false;
    };
    let qf = q as f64;
    let mut images: Vec<Complex64> = zc.iter().map(|&z| z + qf / z).collect();
    let mut targets: Vec<Complex64> = zi.iter().flat_map(|&a| [a, a]).collect();
    let key = |a: &Complex64, b: &Complex64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
    images.sort_by(key);
    targets.sort_by(key);
    let scale = 1.0 + 2.0 * qf.sqrt();
    images.iter().zip(&targets).all(|(a, b)| (a - b).norm() <= TOL * scale)
}

/// Equilibrium measure of the circle set in the angle `phi`, with the
/// circle's points `sqrt q e^(i phi)`.
struct AngleDensity<'a> {
    rho: &'a BandDensity,
    r: f64,
    support: IntervalUnion,
}

impl Density for AngleDensity<'_> {
    fn support(&self) -> &IntervalUnion {
        &self.support
    }

    fn eval(&self, phi: f64) -> f64 {
        let x = 2.0 * self.r * phi.cos();
        0.5 * self.rho.eval(x) * 2.0 * self.r * phi.sin().abs()
    }
}

/// Energies of the interval equilibrium measure `nu'` and of its transfer
/// `nu` to the circle, computed independently.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyTransfer {
    pub interval_energy: f64,
    pub circle_energy: f64,
    /// `2 I(nu) - log r`, equal to `I(nu')`.
    pub predicted_interval_energy: f64,
    pub defect: f64,
}

/// Needs bands strictly inside `(-2r, 2r)` so the arcs stay apart.
pub fn energy_transfer(x_bands: &IntervalUnion, r: f64) -> Result<EnergyTransfer> {
    let (lo, hi) = x_bands.hull();
    if lo <= -2.0 * r || hi >= 2.0 * r {
        return Err(Error::Precondition("bands must lie strictly inside (-2r, 2r)".into()));
    }
    let datum = abel::solve_r(x_bands)?;
    let rho = abel::equilibrium_density(&datum);
    let interval_energy = capacity::energy(&rho)?;
    let mut arcs: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in x_bands.bands() {
        let p1 = (b / (2.0 * r)).acos();
        let p2 = (a / (2.0 * r)).acos();
        arcs.push((p1, p2));
        arcs.push((-p2, -p1));
    }
    let support = IntervalUnion::with_tolerance(&arcs, 0.0)?;
    let dens = AngleDensity { rho: &rho, r, support };
    let specs = measure::spectra(&dens, measure::SPECTRAL_MODES);
    // log|r e^(i phi) - r e^(i psi)| = log r + log|phi - psi| + log|2 sin(d/2) / d|.
    let line = capacity::energy_from_spectra(&specs)?;
    let smooth = |d: f64| {
        if d.abs() < 1e-8 {
            -d * d / 24.0
        } else {
            (2.0 * (0.5 * d).sin() / d).abs().ln()
        }
    };
    let correction: f64 = specs
        .iter()
        .map(|si| {
            specs
                .iter()
                .map(|sj| si.integrate(|phi| sj.integrate(|psi| smooth(phi - psi))))
                .sum::<f64>()
        })
        .sum();
    let circle_energy = r.ln() + line + correction;
    let predicted = 2.0 * circle_energy - r.ln();
    Ok(EnergyTransfer {
        interval_energy,
        circle_energy,
        predicted_interval_energy: predicted,
        defect: (predicted - interval_energy).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacities() {
        let full = CircleSet::full_circle(2).unwrap();
        assert!((circle_capacity(&full).unwrap() - 2f64.sqrt()).abs() < 1e-10);
        let cs = CircleSet::new(4, IntervalUnion::single(-2.0, 2.0).unwrap()).unwrap();
        assert!((circle_capacity(&cs).unwrap() - 2f64.sqrt()).abs() < 1e-9);
        let b = support_capacity_bound(&CircleSet::full_circle(4).unwrap()).unwrap();
        assert!((b.cap - 2.0).abs() < 1e-10 && (b.bound - 2f64.sqrt()).abs() < 1e-15 && b.satisfied);
        let small = CircleSet::new(4, IntervalUnion::single(-0.1, 0.1).unwrap()).unwrap();
        let b = support_capacity_bound(&small).unwrap();
        assert!((b.cap - (2.0 * 0.05f64).sqrt()).abs() < 1e-9 && !b.satisfied);
        let strip = CircleSet::vertical_strip(9, -1.0, 1.0).unwrap();
        assert!(circle_capacity(&strip).unwrap() >= 3f64.sqrt() - 1e-9);
        assert!(CircleSet::new(2, IntervalUnion::single(-3.0, 0.0).unwrap()).is_err());
        assert!(CircleSet::full_circle(1).is_err());
    }

    #[test]
    fn lifts() {
        let x = ExactPoly::from_ints(&[0, 1]);
        let l = weil_lift(&x, 2).unwrap();
        assert_eq!(l, ExactPoly::from_ints(&[2, 0, 1]));
        assert!(pushforward_check(&l, &x, 2));
        let xm1 = ExactPoly::from_ints(&[-1, 1]);
        let l = weil_lift(&xm1, 2).unwrap();
        assert_eq!(l, ExactPoly::from_ints(&[2, -1, 1]));
        assert!(pushforward_check(&l, &xm1, 2));
        assert!(modulus_defect(&l, 2).unwrap() < 1e-12);
        assert!(!pushforward_check(&l, &x, 2));
        assert!(matches!(
            weil_lift(&ExactPoly::from_ints(&[-3, 1]), 2),
            Err(Error::Precondition(_))
        ));
        // Roots at the ends of I lift to double roots at +-sqrt q.
        let ends = ExactPoly::from_ints(&[-16, 0, 1]);
        let l = weil_lift(&ends, 4).unwrap();
        assert_eq!(
            l,
            &ExactPoly::from_ints(&[-2, 1]).pow(2) * &ExactPoly::from_ints(&[2, 1]).pow(2)
        );
        assert!(pushforward_check(&l, &ends, 4));
        assert!(!roots_within(&ExactPoly::from_ints(&[1, 0, 1]), 2).unwrap());
    }

    #[test]
    fn energy_doubling() {
        let e = IntervalUnion::new(&[(-1.5, -0.5), (0.25, 1.5)]).unwrap();
        let t = energy_transfer(&e, 1.0).unwrap();
        assert!(t.defect < 2e-4, "{t:?}");
        let t = energy_transfer(&e, 2.0).unwrap();
        assert!(t.defect < 2e-4, "{t:?}");
    }
}
