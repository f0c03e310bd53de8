//! Discrete measures, densities on interval unions, and the band-wise
//! Chebyshev spectra used for log-kernel energies and potentials.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalUnion;
use crate::poly::{ExactPoly, RealPoly};
use crate::quadrature;
use crate::roots;

/// Finitely many weighted point masses in the complex plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    atoms: Vec<(Complex64, f64)>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        for &(z, w) in &atoms {
            if !(w > 0.0) || !z.is_finite() {
                return Err(Error::InvalidArgument(format!("bad atom {z} with weight {w}")));
            }
        }
        let mut m = DiscreteMeasure { atoms };
        m.sort();
        Ok(m)
    }

    /// Real atoms with the given weights.
    pub fn from_real(points: &[f64], weights: &[f64]) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidArgument("points and weights differ in length".into()));
        }
        Self::new(
            points
                .iter()
                .zip(weights)
                .map(|(&x, &w)| (Complex64::new(x, 0.0), w))
                .collect(),
        )
    }

    /// Equal-weight atoms of total mass 1.
    pub fn uniform_real(points: &[f64]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        Self::from_real(points, &vec![w; points.len()])
    }

    fn sort(&mut self) {
        self.atoms
            .sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    }

    pub fn atoms(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Merges atoms closer than `tol` and rescales to mass 1.
    pub fn normalized(&self, tol: f64) -> DiscreteMeasure {
        let mut merged: Vec<(Complex64, f64)> = Vec::new();
        for &(z, w) in &self.atoms {
            match merged.iter_mut().find(|(y, _)| (*y - z).norm() <= tol) {
                Some(slot) => slot.1 += w,
                None => merged.push((z, w)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        for a in merged.iter_mut() {
            a.1 /= total;
        }
        let mut m = DiscreteMeasure { atoms: merged };
        m.sort();
        m
    }

    /// True when every atom lies on the real line within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.atoms.iter().all(|a| a.0.im.abs() <= tol)
    }

    /// Mass of atoms with real part at most `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0.re <= x).map(|a| a.1).sum()
    }
}

/// Root measure of an exact polynomial; multiplicities are exact.
pub fn root_measure_exact(p: &ExactPoly) -> Result<DiscreteMeasure> {
    if p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let d = p.degree() as f64;
    let mut atoms = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for z in roots::complex_roots(&factor.to_real())? {
            atoms.push((z, mult as f64 / d));
        }
    }
    DiscreteMeasure::new(atoms)
}

/// Root measure of a floating polynomial, via its exact binary image.
pub fn root_measure(p: &RealPoly) -> Result<DiscreteMeasure> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    root_measure_exact(&p.to_exact())
}

/// A mass density on a finite union of bands.
pub trait Density: Send + Sync {
    fn support(&self) -> &IntervalUnion;

    /// Density value at `x`; zero off the support.
    fn eval(&self, x: f64) -> f64;

    /// Closed pieces covering the support on which the density is smooth in
    /// the angle variable. Defaults to the bands.
    fn pieces(&self) -> Vec<(f64, f64)> {
        self.support().bands().to_vec()
    }

    /// Density in the angle variable of `piece`: `g(phi) = rho(x) h sin(phi)`
    /// with `x = m - h cos(phi)`. Implementors with endpoint singularities
    /// should override this with a form that stays finite.
    fn angular(&self, piece: (f64, f64), phi: f64) -> f64 {
        let (a, b) = piece;
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.eval(m - h * phi.cos()) * h * phi.sin()
    }
}

/// Normalized Lebesgue measure on a union of bands.
#[derive(Clone, Debug)]
pub struct UniformDensity {
    support: IntervalUnion,
    total: f64,
}

impl UniformDensity {
    pub fn new(support: IntervalUnion) -> Self {
        let total = support.total_length();
        UniformDensity { support, total }
    }
}

impl Density for UniformDensity {
    fn support(&self) -> &IntervalUnion {
        &self.support
    }

    fn eval(&self, x: f64) -> f64 {
        if self.support.contains(x) {
            1.0 / self.total
        } else {
            0.0
        }
    }

    fn angular(&self, piece: (f64, f64), phi: f64) -> f64 {
        0.5 * (piece.1 - piece.0) * phi.sin() / self.total
    }
}

/// Cosine modes kept per piece for spectral quantities.
pub const SPECTRAL_MODES: usize = 512;

/// Cosine coefficients of the angular density of one piece.
///
/// With `g(phi)` on `[0, pi]`, `coeffs[k] = (2/pi) int g cos(k phi)`.
#[derive(Clone, Debug)]
pub struct BandSpectrum {
    pub center: f64,
    pub half_width: f64,
    pub mass: f64,
    pub coeffs: Vec<f64>,
    phis: Vec<f64>,
    weighted: Vec<f64>,
}

impl BandSpectrum {
    pub fn new<D: Density + ?Sized>(density: &D, piece: (f64, f64), modes: usize) -> Self {
        let (a, b) = piece;
        let rule = quadrature::gauss_legendre(2 * modes);
        let half = 0.5 * PI;
        let phis: Vec<f64> = rule.nodes.iter().map(|t| half * (1.0 + t)).collect();
        let weighted: Vec<f64> = phis
            .iter()
            .zip(&rule.weights)
            .map(|(&p, w)| w * half * density.angular(piece, p))
            .collect();
        let coeffs: Vec<f64> = (0..modes)
            .map(|k| {
                2.0 / PI
                    * weighted
                        .iter()
                        .zip(&phis)
                        .map(|(g, p)| g * (k as f64 * p).cos())
                        .sum::<f64>()
            })
            .collect();
        BandSpectrum {
            center: 0.5 * (a + b),
            half_width: 0.5 * (b - a),
            mass: 0.5 * PI * coeffs[0],
            coeffs,
            phis,
            weighted,
        }
    }

    /// `int int log|x - y|` over this piece against itself.
    pub fn self_energy(&self) -> f64 {
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a * a / k as f64)
            .sum();
        self.mass * self.mass * (0.5 * self.half_width).ln() - 0.5 * PI * PI * tail
    }

    /// `int log|x - z|` against this piece's mass.
    pub fn potential(&self, z: Complex64) -> f64 {
        let zeta = (Complex64::new(self.center, 0.0) - z) / self.half_width;
        let one = Complex64::new(1.0, 0.0);
        let mut t = zeta + (zeta - one).sqrt() * (zeta + one).sqrt();
        if t.norm() < 1.0 {
            t = t.inv();
        }
        let tinv = t.inv();
        let mut pw = one;
        let mut sum = 0.0;
        for (k, a) in self.coeffs.iter().enumerate().skip(1) {
            pw *= tinv;
            sum += a / k as f64 * pw.re;
            if pw.norm() < 1e-18 {
                break;
            }
        }
        self.mass * (0.5 * self.half_width * t.norm()).ln() - PI * sum
    }

    /// `int f dmu` over this piece.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.weighted
            .iter()
            .zip(&self.phis)
            .map(|(g, p)| g * f(self.center - self.half_width * p.cos()))
            .sum()
    }
}

/// Spectra of every piece of a density.
pub fn spectra<D: Density + ?Sized>(density: &D, modes: usize) -> Vec<BandSpectrum> {
    density
        .pieces()
        .into_iter()
        .map(|piece| BandSpectrum::new(density, piece, modes))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_atoms(m: &DiscreteMeasure) -> Vec<(f64, f64)> {
        m.atoms().iter().map(|(z, w)| (z.re, *w)).collect()
    }

    #[test]
    fn root_measure_examples() {
        let m = root_measure_exact(&ExactPoly::from_ints(&[-2, 0, 1])).unwrap();
        let a = real_atoms(&m);
        assert_eq!(a.len(), 2);
        assert!((a[0].0 + 2f64.sqrt()).abs() < 1e-14 && a[0].1 == 0.5);

        let m = root_measure_exact(&ExactPoly::from_ints(&[0, 0, 0, 1])).unwrap();
        assert_eq!(real_atoms(&m), vec![(0.0, 1.0)]);

        let m = root_measure(&RealPoly::new(vec![6.0, -5.0, 1.0])).unwrap();
        let a = real_atoms(&m);
        assert!((a[0].0 - 2.0).abs() < 1e-14 && (a[1].0 - 3.0).abs() < 1e-14);
        assert!((m.total_mass() - 1.0).abs() < 1e-15);

        assert_eq!(root_measure(&RealPoly::constant(3.0)), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn power_has_same_root_measure() {
        let p = ExactPoly::from_ints(&[-5, 1, 1]);
        let base = root_measure_exact(&p).unwrap();
        for k in 2..4 {
            let m = root_measure_exact(&p.pow(k)).unwrap().normalized(1e-9);
            assert_eq!(m.atoms().len(), base.atoms().len());
            for (x, y) in m.atoms().iter().zip(base.atoms()) {
                assert!((x.0 - y.0).norm() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalization_merges() {
        let m = DiscreteMeasure::from_real(&[1.0, 1.0, 2.0], &[1.0, 1.0, 2.0]).unwrap();
        let n = m.normalized(1e-12);
        assert_eq!(real_atoms(&n), vec![(1.0, 0.5), (2.0, 0.5)]);
        assert_eq!(n.cdf(1.5), 0.5);
    }

    #[test]
    fn uniform_spectrum() {
        let d = UniformDensity::new(IntervalUnion::single(0.0, 1.0).unwrap());
        let s = BandSpectrum::new(&d, (0.0, 1.0), SPECTRAL_MODES);
        assert!((s.mass - 1.0).abs() < 1e-12);
        assert!((s.self_energy() + 1.5).abs() < 1e-5);
        // potential of the uniform measure at an interior point
        let x: f64 = 0.3;
        let exact = x * x.ln() + (1.0 - x) * (1.0 - x).ln() - 1.0;
        assert!((s.potential(Complex64::new(x, 0.0)) - exact).abs() < 1e-5);
        let far = Complex64::new(5.0, 2.0);
        let exact = s.integrate(|y| (far - y).norm().ln());
        assert!((s.potential(far) - exact).abs() < 1e-10);
    }
}
