//! The polynomial `R` attached to an interval union `E`: monic of degree
//! `g` with vanishing gap integrals of `R / sqrt(D)`, where `D` is the monic
//! polynomial with the endpoints of `E` as roots. From it come the harmonic
//! weights of the bands, the capacity, the equilibrium density and the
//! equilibrium potential.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{CapacityReport, Method};
use crate::error::{Error, Result};
use crate::interval::IntervalUnion;
use crate::measure::{self, BandSpectrum, Density};
use crate::poly::{ExactPoly, RealPoly};
use crate::quadrature;
use crate::rational;
use crate::roots;

/// Gauss-Legendre nodes per graded panel.
const PANEL_NODES: usize = 24;
/// Nodes per panel for the independent residual check.
const CHECK_NODES: usize = 40;
/// Condition number above which the linear system for `R` is rejected.
pub const CONDITION_LIMIT: f64 = 1e12;
pub const GAP_RESIDUAL_TOL: f64 = 1e-10;
const MASS_TOL: f64 = 1e-8;
/// Agreement required between the two capacity rays.
pub const RAY_AGREEMENT: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelDiagnostics {
    /// Largest gap integral of the final `R`, relative to the integrals of its terms.
    pub gap_residual: f64,
    /// Condition estimate of the last row-scaled linear system.
    pub condition: f64,
    pub iterations: usize,
    /// `|sum omega_j - 1|`.
    pub mass_defect: f64,
}

/// `E` together with `R`, `D`, the band periods and the capacity exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelDatum {
    pub bands: IntervalUnion,
    /// One root of `R` per gap, increasing.
    pub gap_roots: Vec<f64>,
    pub d: RealPoly,
    pub r: RealPoly,
    /// `int_{E_j} |R| / sqrt|D|`.
    pub eta: Vec<f64>,
    /// `eta_j / pi`, the equilibrium mass of band `j`.
    pub omega: Vec<f64>,
    /// `log cap(E)`.
    pub v_e: f64,
    pub diagnostics: AbelDiagnostics,
}

impl AbelDatum {
    pub fn genus(&self) -> usize {
        self.bands.genus()
    }

    pub fn capacity(&self) -> f64 {
        self.v_e.exp()
    }

    /// `R(x)` in product form.
    pub fn eval_r(&self, x: f64) -> f64 {
        self.gap_roots.iter().map(|c| x - c).product()
    }

    /// `|R(x)| / (pi sqrt|D(x)|)` on `E`, zero elsewhere.
    pub fn density(&self, x: f64) -> f64 {
        if !self.bands.contains(x) {
            return 0.0;
        }
        let ends = self.bands.endpoints();
        let (_, l) = log_kernel(&self.gap_roots, &ends, None, x);
        l.exp() / PI
    }
}

/// Sign and log-magnitude of `prod (x - c_i) / sqrt(prod |x - e_k|)`, with
/// the two endpoints in `skip` left out of the denominator.
fn log_kernel(roots: &[f64], ends: &[f64], skip: Option<(usize, usize)>, x: f64) -> (f64, f64) {
    let mut sign = 1.0;
    let mut l = 0.0;
    for &c in roots {
        let d = x - c;
        if d < 0.0 {
            sign = -sign;
        }
        l += d.abs().ln();
    }
    for (k, &e) in ends.iter().enumerate() {
        if let Some((p, q)) = skip {
            if k == p || k == q {
                continue;
            }
        }
        l -= 0.5 * (x - e).abs().ln();
    }
    (sign, l)
}

/// Panel boundaries in the angle `theta` for `x = m - h cos(theta)` on
/// `[a, b]`, graded toward an endpoint when a singularity lies at distance
/// `dl` left of `a` or `dr` right of `b`.
fn angle_knots(a: f64, b: f64, dl: f64, dr: f64) -> Vec<f64> {
    let h = 0.5 * (b - a);
    let half = 0.5 * PI;
    let breaks = |d: f64| -> Vec<f64> {
        let delta = if d.is_finite() {
            (1.0 + d / h).acosh()
        } else {
            f64::INFINITY
        };
        let mut v = vec![0.0];
        let mut t = delta;
        while t < 0.5 * half {
            v.push(t);
            t *= 2.0;
        }
        v.push(half);
        v
    };
    let mut knots = breaks(dl);
    knots.extend(breaks(dr).iter().rev().skip(1).map(|t| PI - t));
    knots
}

/// Nodes `(x, weight, theta)` for `int_a^b F(x) / sqrt((x-a)(b-x)) dx`.
fn angle_rule(a: f64, b: f64, dl: f64, dr: f64, nodes: usize) -> Vec<(f64, f64, f64)> {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let knots = angle_knots(a, b, dl, dr);
    let rule = quadrature::gauss_legendre(nodes);
    let mut out = Vec::with_capacity((knots.len() - 1) * nodes);
    for w in knots.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let c = 0.5 * (t0 + t1);
        let r = 0.5 * (t1 - t0);
        for (&s, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let th = c + r * s;
            out.push((m - h * th.cos(), wt * r, th));
        }
    }
    out
}

/// Distance from band/gap `[a, b]` to the nearest other endpoint on each side.
fn side_distances(ends: &[f64], lo_idx: usize, hi_idx: usize) -> (f64, f64) {
    let dl = if lo_idx > 0 {
        ends[lo_idx] - ends[lo_idx - 1]
    } else {
        f64::INFINITY
    };
    let dr = if hi_idx + 1 < ends.len() {
        ends[hi_idx + 1] - ends[hi_idx]
    } else {
        f64::INFINITY
    };
    (dl, dr)
}

/// `int R / sqrt(D)` over gap `j` (1-based) of `E`, with `R` given by its roots.
fn gap_integral_roots(e: &IntervalUnion, roots: &[f64], j: usize, nodes: usize) -> f64 {
    let ends = e.endpoints();
    let (lo, hi) = (2 * j - 1, 2 * j);
    let (dl, dr) = side_distances(&ends, lo, hi);
    angle_rule(ends[lo], ends[hi], dl, dr, nodes)
        .iter()
        .map(|&(x, w, _)| {
            let (s, l) = log_kernel(roots, &ends, Some((lo, hi)), x);
            w * s * l.exp()
        })
        .sum()
}

/// `int_{b_{j-1}}^{a_j} R / sqrt(D)` for gap `gap_index` in `1..=g`. The
/// endpoints of `E` are recovered as the real roots of `D`.
pub fn gap_integral(r: &RealPoly, d: &RealPoly, gap_index: usize) -> Result<f64> {
    if d.degree() < 2 || d.degree() % 2 == 1 {
        return Err(Error::InvalidArgument("D must have even degree >= 2".into()));
    }
    let g = d.degree() / 2 - 1;
    if gap_index == 0 || gap_index > g {
        return Err(Error::GapIndex {
            index: gap_index,
            gaps: g,
        });
    }
    let bound = 1.0
        + d.coeffs()[..d.degree()]
            .iter()
            .fold(0.0f64, |m, c| m.max((c / d.leading()).abs()));
    let ends = roots::real_roots_in(d, -bound, bound)?;
    if ends.len() != d.degree() {
        return Err(Error::InvalidArgument("D must have simple real roots".into()));
    }
    let pairs: Vec<(f64, f64)> = ends.chunks(2).map(|c| (c[0], c[1])).collect();
    let rr = roots::complex_roots(r).ok();
    let real_roots: Option<Vec<f64>> = match (r.degree(), rr) {
        (0, _) => Some(vec![]),
        (_, Some(z)) if z.iter().all(|w| w.im == 0.0) => Some(z.iter().map(|w| w.re).collect()),
        _ => None,
    };
    let lo = pairs[gap_index - 1].1;
    let hi = pairs[gap_index].0;
    let (dl, dr) = side_distances(&ends, 2 * gap_index - 1, 2 * gap_index);
    let lead = r.leading();
    Ok(angle_rule(lo, hi, dl, dr, PANEL_NODES)
        .iter()
        .map(|&(x, w, _)| {
            let (_, l) = log_kernel(&[], &ends, Some((2 * gap_index - 1, 2 * gap_index)), x);
            let rv = match &real_roots {
                Some(rs) => lead * rs.iter().map(|c| x - c).product::<f64>(),
                None => r.eval(x),
            };
            w * rv * l.exp()
        })
        .sum::<f64>())
}

/// Solves for `R`, computes the band periods and `log cap(E)`.
pub fn solve_r(e: &IntervalUnion) -> Result<AbelDatum> {
    let g = e.genus();
    let ends = e.endpoints();
    let gaps = e.gaps();
    let mut c: Vec<f64> = gaps.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let mut condition = 1.0;
    let mut iterations = 0;
    for it in 1..=6 {
        if g == 0 {
            break;
        }
        iterations = it;
        let rows: Vec<(Vec<f64>, f64)> = (1..=g)
            .into_par_iter()
            .map(|j| {
                let (lo, hi) = (2 * j - 1, 2 * j);
                let (dl, dr) = side_distances(&ends, lo, hi);
                let mut row = vec![0.0; g];
                let mut rhs = 0.0;
                for (x, w, _) in angle_rule(ends[lo], ends[hi], dl, dr, PANEL_NODES) {
                    let (s, l) = log_kernel(&c, &ends, Some((lo, hi)), x);
                    let p = w * s * l.exp();
                    rhs -= p;
                    for (k, ck) in c.iter().enumerate() {
                        row[k] += p / (x - ck);
                    }
                }
                let scale = row.iter().fold(rhs.abs(), |m, v| m.max(v.abs()));
                (row.iter().map(|v| v / scale).collect(), rhs / scale)
            })
            .collect();
        let a = DMatrix::from_fn(g, g, |i, k| rows[i].0[k]);
        let b = DVector::from_iterator(g, rows.iter().map(|r| r.1));
        let sv = a.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if condition > CONDITION_LIMIT {
            return Err(Error::IllConditioned(condition));
        }
        let beta = a.lu().solve(&b).ok_or(Error::IllConditioned(f64::INFINITY))?;
        // New roots: the zero of R / prod_{i != j}(x - c_i) inside gap j.
        let new_c: Vec<f64> = (0..g)
            .into_par_iter()
            .map(|j| {
                let hj = |x: f64| -> f64 {
                    let mut s = 1.0;
                    for (k, ck) in c.iter().enumerate() {
                        if k != j {
                            s += beta[k] / (x - ck);
                        }
                    }
                    (x - c[j]) * s + beta[j]
                };
                let (mut lo, mut hi) = gaps[j];
                let mut flo = hj(lo);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = hj(mid);
                    if (fm < 0.0) == (flo < 0.0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let moved = new_c
            .iter()
            .zip(&c)
            .zip(&gaps)
            .fold(0.0f64, |m, ((x, y), (a, b))| m.max((x - y).abs() / (b - a)));
        c = new_c;
        if moved < 1e-13 {
            break;
        }
    }
    // Residual check with a finer rule.
    let gap_residual = (1..=g)
        .into_par_iter()
        .map(|j| {
            let val = gap_integral_roots(e, &c, j, CHECK_NODES);
            let (lo, hi) = (2 * j - 1, 2 * j);
            let (dl, dr) = side_distances(&ends, lo, hi);
            let scale: f64 = angle_rule(ends[lo], ends[hi], dl, dr, CHECK_NODES)
                .iter()
                .map(|&(x, w, _)| w * log_kernel(&c, &ends, Some((lo, hi)), x).1.exp())
                .sum();
            val.abs() / scale
        })
        .reduce(|| 0.0, f64::max);
    if gap_residual > GAP_RESIDUAL_TOL {
        return Err(Error::Quadrature(format!(
            "gap integrals of R not resolved: residual {gap_residual}"
        )));
    }
    let eta: Vec<f64> = (0..=g)
        .into_par_iter()
        .map(|j| band_integral(&c, &ends, j, PANEL_NODES, |_| 1.0))
        .collect();
    let omega: Vec<f64> = eta.iter().map(|v| v / PI).collect();
    let mass_defect = (omega.iter().sum::<f64>() - 1.0).abs();
    if mass_defect > MASS_TOL {
        return Err(Error::Quadrature(format!("harmonic weights sum to 1 + {mass_defect}")));
    }
    let v_e = right_ray_v(&c, &ends);
    Ok(AbelDatum {
        bands: e.clone(),
        d: RealPoly::from_roots(&ends),
        r: RealPoly::from_roots(&c),
        gap_roots: c,
        eta,
        omega,
        v_e,
        diagnostics: AbelDiagnostics {
            gap_residual,
            condition,
            iterations,
            mass_defect,
        },
    })
}

/// `int_{E_j} f(theta) |R| / sqrt|D|`, integrated in the band angle.
fn band_integral<F: Fn(f64) -> f64>(c: &[f64], ends: &[f64], j: usize, nodes: usize, f: F) -> f64 {
    let (lo, hi) = (2 * j, 2 * j + 1);
    let (dl, dr) = side_distances(ends, lo, hi);
    angle_rule(ends[lo], ends[hi], dl, dr, nodes)
        .iter()
        .map(|&(x, w, th)| w * f(th) * log_kernel(c, ends, Some((lo, hi)), x).1.exp())
        .sum()
}

/// `lim_{x -> +inf} (log x - int_{b_g}^x R / sqrt(D))`.
fn right_ray_v(c: &[f64], ends: &[f64]) -> f64 {
    let shift = 0.5 * (ends[0] + ends[ends.len() - 1]);
    let c: Vec<f64> = c.iter().map(|v| v - shift).collect();
    let e: Vec<f64> = ends.iter().map(|v| v - shift).collect();
    let b = e[e.len() - 1];
    let half = b;
    let x0 = 2.0 * half;
    // Near part: t = b + s^2, graded toward s = 0.
    let l = b - e[e.len() - 2];
    let smax = (x0 - b).sqrt();
    let mut knots = vec![0.0];
    let mut s = l.sqrt();
    while s < smax {
        knots.push(s);
        s *= 2.0;
    }
    knots.push(smax);
    let rule = quadrature::gauss_legendre(PANEL_NODES);
    let last = e.len() - 1;
    let mut near = 0.0;
    for w in knots.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        let cm = 0.5 * (s0 + s1);
        let r = 0.5 * (s1 - s0);
        for (&u, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let s = cm + r * u;
            let t = b + s * s;
            // R / sqrt(D) dt = 2 R / sqrt(D / (t - b)) ds
            let (sg, lk) = log_kernel(&c, &e, Some((last, last)), t);
            near += wt * r * 2.0 * sg * lk.exp();
        }
    }
    // Tail: u = x0 / t on (0, 1].
    let tail_rule = quadrature::gauss_legendre(48);
    let tail: f64 = tail_rule
        .nodes
        .iter()
        .zip(&tail_rule.weights)
        .map(|(&u, &wt)| {
            let u = 0.5 * (1.0 + u);
            let t = x0 / u;
            let lam: f64 = c.iter().map(|ci| (-ci / t).ln_1p()).sum::<f64>()
                - 0.5 * e.iter().map(|ek| (-ek / t).ln_1p()).sum::<f64>();
            0.5 * wt * lam.exp_m1() / u
        })
        .sum();
    x0.ln() - near - tail
}

/// Capacity from the right ray, cross-checked against the left ray.
pub fn abel_capacity(datum: &AbelDatum) -> Result<CapacityReport> {
    let ends = datum.bands.endpoints();
    let mirrored_ends: Vec<f64> = ends.iter().rev().map(|v| -v).collect();
    let mirrored_c: Vec<f64> = datum.gap_roots.iter().rev().map(|v| -v).collect();
    let v_left = right_ray_v(&mirrored_c, &mirrored_ends);
    let diff = (v_left - datum.v_e).abs();
    if diff > RAY_AGREEMENT {
        return Err(Error::Quadrature(format!(
            "capacity rays disagree: right {} left {v_left}",
            datum.v_e
        )));
    }
    Ok(CapacityReport::new(datum.capacity(), Method::AbelIntegral)
        .with("v_e", datum.v_e)
        .with("v_left_ray", v_left)
        .with("ray_difference", diff)
        .with("bands", datum.bands.band_count())
        .with("gap_residual", datum.diagnostics.gap_residual)
        .with("condition", datum.diagnostics.condition))
}

/// Cells per band in the cumulative tables.
const TABLE_CELLS: usize = 256;
const CELL_NODES: usize = 16;

/// The equilibrium density with per-band cumulative mass tables in the band
/// angle `theta`, where `x = m - h cos(theta)`.
#[derive(Clone, Debug)]
pub struct BandDensity {
    datum: AbelDatum,
    ends: Vec<f64>,
    /// Per band: cell boundaries in `theta` and the mass up to each.
    tables: Vec<(Vec<f64>, Vec<f64>)>,
    /// Mass strictly left of each band.
    offsets: Vec<f64>,
}

pub fn equilibrium_density(datum: &AbelDatum) -> BandDensity {
    let ends = datum.bands.endpoints();
    let g1 = datum.bands.band_count();
    let tables: Vec<(Vec<f64>, Vec<f64>)> = (0..g1)
        .into_par_iter()
        .map(|j| {
            let (lo, hi) = (2 * j, 2 * j + 1);
            let (dl, dr) = side_distances(&ends, lo, hi);
            // Graded panels subdivided to at least TABLE_CELLS cells.
            let coarse = angle_knots(ends[lo], ends[hi], dl, dr);
            let per = TABLE_CELLS.div_ceil(coarse.len() - 1);
            let mut knots: Vec<f64> = vec![0.0];
            for w in coarse.windows(2) {
                for i in 1..=per {
                    knots.push(w[0] + (w[1] - w[0]) * i as f64 / per as f64);
                }
            }
            *knots.last_mut().unwrap() = PI;
            let mut cum = vec![0.0];
            let mut acc = 0.0;
            for w in knots.windows(2) {
                acc += angular_mass(&datum.gap_roots, &ends, j, w[0], w[1]);
                cum.push(acc);
            }
            (knots, cum)
        })
        .collect();
    let mut offsets = Vec::with_capacity(g1);
    let mut acc = 0.0;
    for t in &tables {
        offsets.push(acc);
        acc += t.1.last().unwrap();
    }
    BandDensity {
        datum: datum.clone(),
        ends,
        tables,
        offsets,
    }
}

/// `int_{t0}^{t1} g_j(theta) dtheta` for band `j`.
fn angular_mass(c: &[f64], ends: &[f64], j: usize, t0: f64, t1: f64) -> f64 {
    let rule = quadrature::gauss_legendre(CELL_NODES);
    let (a, b) = (ends[2 * j], ends[2 * j + 1]);
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let cm = 0.5 * (t0 + t1);
    let r = 0.5 * (t1 - t0);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| {
            let th = cm + r * s;
            let x = m - h * th.cos();
            w * r * log_kernel(c, ends, Some((2 * j, 2 * j + 1)), x).1.exp() / PI
        })
        .sum()
}

impl BandDensity {
    pub fn datum(&self) -> &AbelDatum {
        &self.datum
    }

    /// Mass of each band from the tables.
    pub fn band_masses(&self) -> Vec<f64> {
        self.tables.iter().map(|t| *t.1.last().unwrap()).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.band_masses().iter().sum()
    }

    fn band_geometry(&self, j: usize) -> (f64, f64) {
        let (a, b) = (self.ends[2 * j], self.ends[2 * j + 1]);
        (0.5 * (a + b), 0.5 * (b - a))
    }

    fn mass_to_theta(&self, j: usize, th: f64) -> f64 {
        let (knots, cum) = &self.tables[j];
        let i = knots.partition_point(|&k| k <= th).clamp(1, knots.len() - 1) - 1;
        cum[i] + angular_mass(&self.datum.gap_roots, &self.ends, j, knots[i], th)
    }

    /// Mass of `[a_j, x]` within band `j`.
    pub fn band_cdf(&self, j: usize, x: f64) -> f64 {
        let (m, h) = self.band_geometry(j);
        let th = ((m - x) / h).clamp(-1.0, 1.0).acos();
        self.mass_to_theta(j, th)
    }

    /// Equilibrium mass of `(-inf, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let bands = self.datum.bands.bands();
        let j = bands.partition_point(|&(a, _)| a <= x);
        if j == 0 {
            return 0.0;
        }
        let j = j - 1;
        let b = bands[j].1;
        if x >= b {
            return self.offsets[j] + self.tables[j].1.last().unwrap();
        }
        let (m, h) = self.band_geometry(j);
        let th = ((m - x) / h).clamp(-1.0, 1.0).acos();
        self.offsets[j] + self.mass_to_theta(j, th)
    }

    /// Smallest `x` in `E` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let bands = self.datum.bands.bands();
        let p = p.clamp(0.0, self.total_mass());
        let mut j = self.offsets.partition_point(|&o| o <= p).max(1) - 1;
        let masses = self.band_masses();
        while j + 1 < bands.len() && p - self.offsets[j] > masses[j] {
            j += 1;
        }
        let target = p - self.offsets[j];
        let (knots, cum) = &self.tables[j];
        let i = cum.partition_point(|&v| v < target).clamp(1, knots.len() - 1) - 1;
        let (mut lo, mut hi) = (knots[i], knots[i + 1]);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.mass_to_theta(j, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (m, h) = self.band_geometry(j);
        m - h * (0.5 * (lo + hi)).cos()
    }

    /// Potential evaluator built from per-band spectra.
    pub fn potential(&self) -> Potential {
        Potential {
            spectra: measure::spectra(self, measure::SPECTRAL_MODES),
        }
    }
}

impl Density for BandDensity {
    fn support(&self) -> &IntervalUnion {
        &self.datum.bands
    }

    fn eval(&self, x: f64) -> f64 {
        self.datum.density(x)
    }

    fn angular(&self, piece: (f64, f64), phi: f64) -> f64 {
        let j = self
            .datum
            .bands
            .bands()
            .iter()
            .position(|b| b.0 == piece.0)
            .expect("piece is a band");
        let (m, h) = self.band_geometry(j);
        let x = m - h * phi.cos();
        log_kernel(&self.datum.gap_roots, &self.ends, Some((2 * j, 2 * j + 1)), x)
            .1
            .exp()
            / PI
    }
}

/// `p(z) = int log|w - z| dmu_E(w)`.
pub struct Potential {
    spectra: Vec<BandSpectrum>,
}

impl Potential {
    pub fn at(&self, z: Complex64) -> f64 {
        self.spectra.iter().map(|s| s.potential(z)).sum()
    }

    pub fn spectra(&self) -> &[BandSpectrum] {
        &self.spectra
    }
}

pub fn equilibrium_potential(datum: &AbelDatum, z: Complex64) -> f64 {
    equilibrium_density(datum).potential().at(z)
}

/// `(log|Res(P, Q)| / deg P, Res(P, Q))`; the value is `-inf` when the
/// resultant vanishes.
pub fn resultant_positivity(p: &ExactPoly, q: &ExactPoly) -> Result<(f64, BigInt)> {
    if p.degree() == 0 || p.is_zero() {
        return Err(Error::ConstantPolynomial);
    }
    if !p.is_monic() {
        return Err(Error::InvalidArgument("P must be monic".into()));
    }
    if q.is_zero() {
        return Err(Error::InvalidArgument("Q must be nonzero".into()));
    }
    if !p.is_integer() || !q.is_integer() {
        return Err(Error::NotInteger);
    }
    let res = p.resultant(q).to_integer();
    let value = rational::ln_abs_int(&res) / p.degree() as f64;
    Ok((
        if res == BigInt::from(0) {
            f64::NEG_INFINITY
        } else {
            value
        },
        res,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_pair() -> IntervalUnion {
        IntervalUnion::new(&[(-8f64.sqrt(), -2f64.sqrt()), (2f64.sqrt(), 8f64.sqrt())]).unwrap()
    }

    #[test]
    fn single_interval() {
        let d = solve_r(&IntervalUnion::single(-2.0, 2.0).unwrap()).unwrap();
        assert_eq!(d.r.coeffs(), &[1.0]);
        assert!((d.omega[0] - 1.0).abs() < 1e-14);
        assert!(d.v_e.abs() < 1e-12, "v = {}", d.v_e);
        let rep = abel_capacity(&d).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-12);
        let d = solve_r(&IntervalUnion::single(3.0, 5.0).unwrap()).unwrap();
        assert!((d.capacity() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair() {
        let d = solve_r(&sym_pair()).unwrap();
        assert!(d.gap_roots[0].abs() < 1e-12);
        assert!((d.omega[0] - 0.5).abs() < 1e-12 && (d.omega[1] - 0.5).abs() < 1e-12);
        assert!((d.capacity() - 1.5f64.sqrt()).abs() < 1e-10);
        assert!(abel_capacity(&d).is_ok());
    }

    #[test]
    fn gap_integral_examples() {
        let e = sym_pair();
        let dpoly = RealPoly::from_roots(&e.endpoints());
        assert!(gap_integral(&RealPoly::x(), &dpoly, 1).unwrap().abs() < 1e-12);
        assert!(gap_integral(&RealPoly::constant(1.0), &dpoly, 1).unwrap() > 0.0);
        let d1 = RealPoly::from_roots(&[-2.0, 2.0]);
        assert!(matches!(
            gap_integral(&RealPoly::constant(1.0), &d1, 1),
            Err(Error::GapIndex { .. })
        ));
    }

    #[test]
    fn asymmetric_two_bands() {
        let e = IntervalUnion::new(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let d = solve_r(&e).unwrap();
        let c = d.gap_roots[0];
        assert!(c > 1.0 && c < 2.0 && (c - 1.5).abs() < 1e-12);
        let e = IntervalUnion::new(&[(0.0, 1.0), (2.0, 5.0)]).unwrap();
        let d = solve_r(&e).unwrap();
        let c = d.gap_roots[0];
        assert!(c > 1.0 && c < 2.0);
        let dpoly = d.d.clone();
        assert!(gap_integral(&RealPoly::new(vec![-c, 1.0]), &dpoly, 1).unwrap().abs() < 1e-10);
        assert!(gap_integral(&RealPoly::new(vec![-(c - 0.01), 1.0]), &dpoly, 1).unwrap() > 0.0);
        assert!(gap_integral(&RealPoly::new(vec![-(c + 0.01), 1.0]), &dpoly, 1).unwrap() < 0.0);
        assert!(abel_capacity(&d).is_ok());
    }

    #[test]
    fn density_and_tables() {
        let d = solve_r(&IntervalUnion::single(-2.0, 2.0).unwrap()).unwrap();
        assert!((d.density(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let bd = equilibrium_density(&d);
        assert!((bd.total_mass() - 1.0).abs() < 1e-12);
        for x in [-1.9, -0.3, 0.0, 1.2] {
            let exact = 0.5 + (x / 2.0f64).asin() / PI;
            assert!((bd.cdf(x) - exact).abs() < 1e-12);
            assert!((bd.quantile(exact) - x).abs() < 1e-10);
        }
        let bd = equilibrium_density(&solve_r(&sym_pair()).unwrap());
        let m = bd.band_masses();
        assert!((m[0] - 0.5).abs() < 1e-12 && (m[1] - 0.5).abs() < 1e-12);
        assert!((bd.cdf(0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn potentials() {
        let d = solve_r(&IntervalUnion::single(-2.0, 2.0).unwrap()).unwrap();
        let p = equilibrium_density(&d).potential();
        assert!(p.at(Complex64::new(0.0, 0.0)).abs() < 1e-10);
        assert!((p.at(Complex64::new(1e6, 0.0)) - 1e6f64.ln()).abs() < 1e-4);
        let d = solve_r(&sym_pair()).unwrap();
        let p = equilibrium_density(&d).potential();
        assert!(p.at(Complex64::new(0.0, 0.0)) > d.v_e + 1e-3);
        assert!((p.at(Complex64::new(2.0, 0.0)) - d.v_e).abs() < 1e-9);
    }

    #[test]
    fn resultants() {
        let p = ExactPoly::from_ints(&[-2, 0, 1]);
        let (v, r) = resultant_positivity(&p, &ExactPoly::from_ints(&[-2, 1])).unwrap();
        assert_eq!(r, BigInt::from(2));
        assert!((v - 0.5 * 2f64.ln()).abs() < 1e-15);
        let (v, r) = resultant_positivity(&p, &p).unwrap();
        assert_eq!(r, BigInt::from(0));
        assert_eq!(v, f64::NEG_INFINITY);
        let (v, _) = resultant_positivity(&ExactPoly::x(), &ExactPoly::from_ints(&[-1, 1])).unwrap();
        assert_eq!(v, 0.0);
        let half = ExactPoly::new(vec![rational::ratio(1, 2), rational::int(1)]);
        assert_eq!(resultant_positivity(&p, &half), Err(Error::NotInteger));
    }
}
