//! Capacity by closed forms, transfinite diameter, Chebyshev constants and
//! preimage transforms, plus logarithmic energies of densities.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalUnion;
use crate::measure::{self, BandSpectrum, Density, DiscreteMeasure};
use crate::poly::RealPoly;
use crate::roots;

/// Sets with a closed-form capacity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// `[a, b]`.
    Interval { a: f64, b: f64 },
    /// `[-b, -a] U [a, b]` with `0 < a < b`.
    SymmetricPair { a: f64, b: f64 },
    /// Circle of radius `r`.
    Circle { r: f64 },
    /// Arc of angle `alpha` on a circle of radius `r`.
    Arc { r: f64, alpha: f64 },
}

pub fn capacity_closed_form(shape: &Shape) -> Result<f64> {
    let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
    match *shape {
        Shape::Interval { a, b } => {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return bad("interval needs a < b");
            }
            Ok((b - a) / 4.0)
        }
        Shape::SymmetricPair { a, b } => {
            if !(0.0 < a && a < b) || !b.is_finite() {
                return bad("symmetric pair needs 0 < a < b");
            }
            Ok(0.5 * (b * b - a * a).sqrt())
        }
        Shape::Circle { r } => {
            if !(r >= 0.0) || !r.is_finite() {
                return bad("circle needs r >= 0");
            }
            Ok(r)
        }
        Shape::Arc { r, alpha } => {
            if !(r >= 0.0) || !r.is_finite() || !(0.0..=std::f64::consts::TAU).contains(&alpha) {
                return bad("arc needs r >= 0 and 0 <= alpha <= 2 pi");
            }
            Ok(r * (alpha / 4.0).sin())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Fekete,
    Chebyshev,
    AbelIntegral,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Fekete => "fekete",
            Method::Chebyshev => "chebyshev",
            Method::AbelIntegral => "abel_integral",
        }
    }
}

/// A capacity value with its method and method-specific diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub value: f64,
    pub method: Method,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl CapacityReport {
    pub fn new(value: f64, method: Method) -> Self {
        CapacityReport {
            value,
            method,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.diagnostics.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
        self
    }
}

pub fn capacity_scale(cap: f64, lambda: f64) -> f64 {
    lambda.abs() * cap
}

pub fn capacity_preimage(cap_k: f64, d: u32) -> Result<f64> {
    if !(cap_k >= 0.0) || d == 0 {
        return Err(Error::InvalidArgument("need cap >= 0 and d >= 1".into()));
    }
    Ok(cap_k.powf(1.0 / d as f64))
}

/// Maximal Fekete configuration found for `n` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeketeResult {
    pub diameter: f64,
    pub points: Vec<f64>,
    pub starts: usize,
}

/// Largest oracle size accepted by [`fekete_diameter`].
pub const FEKETE_MAX_N: usize = 12;
const FEKETE_RANDOM_STARTS: usize = 20;
pub const FEKETE_SEED: u64 = 0x5eed_fe4e;
/// Relative change of the log Vandermonde product that ends coordinate ascent.
pub const FEKETE_TOL: f64 = 1e-15;

pub fn fekete_diameter(e: &IntervalUnion, n: usize) -> Result<f64> {
    Ok(fekete_points(e, n)?.diameter)
}

/// Maximizes the Vandermonde product over `n` ordered points of `e`, one
/// start per assignment of point counts to bands (or seeded random
/// assignments when there are too many).
pub fn fekete_points(e: &IntervalUnion, n: usize) -> Result<FeketeResult> {
    fekete_points_seeded(e, n, FEKETE_SEED)
}

/// [`fekete_points`] with an explicit seed for the random starts.
pub fn fekete_points_seeded(e: &IntervalUnion, n: usize, seed: u64) -> Result<FeketeResult> {
    if !(2..=FEKETE_MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "fekete oracle needs 2 <= n <= {FEKETE_MAX_N}, got {n}"
        )));
    }
    let bands = e.band_count();
    let mut assignments = Vec::new();
    compositions(n, bands, &mut vec![], &mut assignments, 5000);
    if assignments.len() >= 5000 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        assignments = (0..FEKETE_RANDOM_STARTS)
            .map(|_| {
                let mut c = vec![0; bands];
                for _ in 0..n {
                    c[rng.gen_range(0..bands)] += 1;
                }
                c
            })
            .collect();
    }
    let starts = assignments.len();
    let runs: Vec<(f64, Vec<f64>)> = assignments.par_iter().map(|counts| fekete_ascent(e, counts)).collect();
    let best = runs
        .into_iter()
        .filter(|(f, _)| f.is_finite())
        .fold((f64::NEG_INFINITY, vec![]), |a, b| if b.0 > a.0 { b } else { a });
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(FeketeResult {
        diameter: (best.0 / pairs).exp(),
        points: best.1,
        starts,
    })
}

fn compositions(n: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) {
    if out.len() >= cap {
        return;
    }
    if parts == 1 {
        let mut c = cur.clone();
        c.push(n);
        out.push(c);
        return;
    }
    for k in 0..=n {
        cur.push(k);
        compositions(n - k, parts - 1, cur, out, cap);
        cur.pop();
        if out.len() >= cap {
            return;
        }
    }
}

fn log_vandermonde(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            s += (x[j] - x[i]).abs().ln();
        }
    }
    s
}

/// Gauss-Seidel ascent: each point maximizes the concave log-distance sum
/// between its neighbours within its band.
fn fekete_ascent(e: &IntervalUnion, counts: &[usize]) -> (f64, Vec<f64>) {
    let mut x = Vec::new();
    let mut band_of = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        let (a, b) = e.bands()[j];
        for k in 0..c {
            let t = if c == 1 {
                0.5
            } else {
                0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (c - 1) as f64).cos())
            };
            x.push(a + (b - a) * (0.02 + 0.96 * t));
            band_of.push(j);
        }
    }
    let n = x.len();
    let mut f = log_vandermonde(&x);
    for _ in 0..20000 {
        for i in 0..n {
            let (a, b) = e.bands()[band_of[i]];
            let lo_n = if i > 0 && band_of[i - 1] == band_of[i] {
                Some(x[i - 1])
            } else {
                None
            };
            let hi_n = if i + 1 < n && band_of[i + 1] == band_of[i] {
                Some(x[i + 1])
            } else {
                None
            };
            let dh = |t: f64| -> f64 { (0..n).filter(|&j| j != i).map(|j| 1.0 / (t - x[j])).sum() };
            let new = match (lo_n, hi_n) {
                (None, _) if dh(a) <= 0.0 => a,
                (_, None) if dh(b) >= 0.0 => b,
                _ => {
                    let mut lo = lo_n.unwrap_or(a);
                    let mut hi = hi_n.unwrap_or(b);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        if dh(mid) > 0.0 {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                }
            };
            x[i] = new;
        }
        let nf = log_vandermonde(&x);
        let done = (nf - f).abs() <= FEKETE_TOL * (1.0 + nf.abs());
        f = nf;
        if done {
            break;
        }
    }
    (f, x)
}

/// Monic minimal-norm polynomial of degree `n` on `e` and its norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevResult {
    pub degree: usize,
    /// `t_n(E)`, the minimal sup norm.
    pub norm: f64,
    pub poly: RealPoly,
    /// `t_n^(1/n)`, an upper bound for the capacity.
    pub cap_upper: f64,
    /// `(t_n/2)^(1/n)`, also an upper bound on real sets and much sharper.
    pub cap_estimate: f64,
    pub iterations: usize,
    /// Alternation points of the final reference.
    pub reference: Vec<f64>,
}

const REMEZ_MAX_ITER: usize = 200;
pub const REMEZ_TOL: f64 = 1e-12;
/// Relative level change below which a nearly levelled reference is accepted.
const REMEZ_STALL: f64 = 1e-12;

/// `T_k(u)` by the three-term recurrence.
pub fn cheb_t(k: usize, u: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, u);
    if k == 0 {
        return 1.0;
    }
    for _ in 1..k {
        let t2 = 2.0 * u * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

fn parity_sign(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Monic levelled polynomial through a reference, in barycentric form.
///
/// With `u_0 < ... < u_n` it interpolates `g(u_i) = (-1)^i`; the monic
/// polynomial is `h g` where `h = 1 / sum (-1)^i w_i`.
struct Levelled {
    nodes: Vec<f64>,
    /// Barycentric weights divided by `exp(log_scale)`.
    weights: Vec<f64>,
    /// `log |h|`.
    log_level: f64,
    sign: f64,
}

impl Levelled {
    fn new(nodes: &[f64]) -> Result<Self> {
        let logs: Vec<(f64, f64)> = nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                nodes
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold((0.0, 1.0), |(l, s), (_, &y)| {
                        let d = x - y;
                        (l - d.abs().ln(), if d < 0.0 { -s } else { s })
                    })
            })
            .collect();
        let log_scale = logs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        if !log_scale.is_finite() {
            return Err(Error::NoConvergence("degenerate Remez reference".into()));
        }
        let weights: Vec<f64> = logs.iter().map(|&(l, s)| s * (l - log_scale).exp()).collect();
        let alt: f64 = weights.iter().enumerate().map(|(i, w)| parity_sign(i) * w).sum();
        if alt == 0.0 || !alt.is_finite() {
            return Err(Error::NoConvergence("singular Remez reference".into()));
        }
        Ok(Levelled {
            nodes: nodes.to_vec(),
            weights,
            log_level: -log_scale - alt.abs().ln(),
            sign: alt.signum(),
        })
    }

    /// `g(u)` and `g'(u)`.
    fn eval(&self, u: f64) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, (&x, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let d = u - x;
            if d == 0.0 {
                return (parity_sign(i), self.derivative_at_node(i));
            }
            let a = w / d;
            num += parity_sign(i) * a;
            den += a;
        }
        let g = num / den;
        let mut dnum = 0.0;
        for (i, (&x, &w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let d = u - x;
            let f = parity_sign(i);
            dnum += w / d * (g - f) / d;
        }
        (g, dnum / den)
    }

    fn derivative_at_node(&self, i: usize) -> f64 {
        let fi = parity_sign(i);
        let xi = self.nodes[i];
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, (&x, &w))| {
                let f = parity_sign(j);
                w / self.weights[i] * (fi - f) / (xi - x)
            })
            .sum();
        -s
    }

    /// Chebyshev coefficients on `[-1, 1]` of the monic polynomial `h g`.
    fn chebyshev_coefficients(&self) -> Vec<f64> {
        let n = self.nodes.len() - 1;
        let level = self.sign * self.log_level.exp();
        let pi = std::f64::consts::PI;
        let vals: Vec<f64> = (0..=n)
            .map(|j| level * self.eval((pi * j as f64 / n as f64).cos()).0)
            .collect();
        (0..=n)
            .map(|k| {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let c = (pi * (j * k) as f64 / n as f64).cos();
                        if j == 0 || j == n {
                            0.5 * v * c
                        } else {
                            v * c
                        }
                    })
                    .sum();
                let c = 2.0 * s / n as f64;
                if k == 0 || k == n {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect()
    }
}

/// Generalized Remez exchange on a union of bands.
pub fn chebyshev_constant(e: &IntervalUnion, n: usize) -> Result<ChebyshevResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be >= 1".into()));
    }
    let (lo, hi) = e.hull();
    let m = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let ubands: Vec<(f64, f64)> = e.bands().iter().map(|&(a, b)| ((a - m) / h, (b - m) / h)).collect();
    let mut reference = equilibrium_reference(e, n + 1)
        .map(|xs| xs.iter().map(|x| (x - m) / h).collect())
        .unwrap_or_else(|| initial_reference(&ubands, n + 1));
    let mut iterations = 0;
    let mut prev_level = f64::NAN;
    let mut best: Option<(f64, Levelled, f64)> = None;
    for it in 1..=REMEZ_MAX_ITER {
        iterations = it;
        let lev = Levelled::new(&reference)?;
        let extrema = local_extrema(&lev, &ubands, n);
        let ratio = extrema.iter().fold(0.0f64, |mx, p| mx.max(p.1.abs()));
        let log_level = lev.log_level;
        let gap = 1.0 - 1.0 / ratio;
        let stalled = (log_level - prev_level).abs() <= REMEZ_STALL && gap <= 1e-8;
        let better = best.as_ref().is_none_or(|b| log_level + ratio.ln() < b.0 + b.2.ln());
        let next = if gap > REMEZ_TOL && !stalled {
            Some(exchange(extrema, n + 1)?)
        } else {
            None
        };
        if better {
            best = Some((log_level, lev, ratio));
        }
        match next {
            None => break,
            Some(_) if it == REMEZ_MAX_ITER => {
                let b = best.as_ref().unwrap();
                return Err(Error::NoConvergence(format!(
                    "Remez exchange stalled at degree {n}: relative levelling gap {:.3e}",
                    1.0 - 1.0 / b.2
                )));
            }
            Some(r) => reference = r,
        }
        prev_level = log_level;
    }
    let (log_level, lev, ratio) = best.unwrap();
    let log_norm = n as f64 * h.ln() + log_level + ratio.ln();
    let norm = log_norm.exp();
    let lead = h.powi(n as i32);
    let poly = RealPoly::from_chebyshev(&lev.chebyshev_coefficients(), m, h).scale(lead);
    Ok(ChebyshevResult {
        degree: n,
        norm,
        poly,
        cap_upper: (log_norm / n as f64).exp(),
        cap_estimate: ((log_norm - std::f64::consts::LN_2) / n as f64).exp(),
        iterations,
        reference: lev.nodes.iter().map(|u| m + h * u).collect(),
    })
}

/// Equilibrium quantiles `i / (count - 1)`, close to the final alternation set.
fn equilibrium_reference(e: &IntervalUnion, count: usize) -> Option<Vec<f64>> {
    let dens = crate::abel::equilibrium_density(&crate::abel::solve_r(e).ok()?);
    let total = dens.total_mass();
    let mut xs: Vec<f64> = (0..count)
        .map(|i| dens.quantile(total * i as f64 / (count - 1) as f64))
        .collect();
    xs.dedup_by(|a, b| *a <= *b);
    (xs.len() == count).then_some(xs)
}

fn initial_reference(ubands: &[(f64, f64)], count: usize) -> Vec<f64> {
    let total: f64 = ubands.iter().map(|(a, b)| b - a).sum();
    let mut counts: Vec<usize> = ubands
        .iter()
        .map(|(a, b)| (((b - a) / total) * count as f64).floor() as usize)
        .collect();
    let mut assigned: usize = counts.iter().sum();
    let mut j = 0;
    let nb = counts.len();
    while assigned < count {
        counts[j % nb] += 1;
        assigned += 1;
        j += 1;
    }
    let mut pts = Vec::with_capacity(count);
    for (&(a, b), &c) in ubands.iter().zip(&counts) {
        for k in 0..c {
            let t = if c == 1 {
                0.5
            } else {
                0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (c - 1) as f64).cos())
            };
            pts.push(a + (b - a) * t);
        }
    }
    pts
}

/// Local extrema of the error curve (with band endpoints), sorted.
fn local_extrema(lev: &Levelled, ubands: &[(f64, f64)], n: usize) -> Vec<(f64, f64)> {
    let grid = 8 * n + 32;
    let mut out = Vec::new();
    for &(a, b) in ubands {
        let xs: Vec<f64> = (0..=grid)
            .map(|i| a + (b - a) * 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / grid as f64).cos()))
            .collect();
        let ds: Vec<f64> = xs.iter().map(|&u| lev.eval(u).1).collect();
        out.push((a, lev.eval(a).0));
        for i in 0..grid {
            if ds[i] == 0.0 && i > 0 {
                out.push((xs[i], lev.eval(xs[i]).0));
            } else if (ds[i] > 0.0 && ds[i + 1] < 0.0) || (ds[i] < 0.0 && ds[i + 1] > 0.0) {
                let (mut lo, mut hi) = (xs[i], xs[i + 1]);
                let slo = ds[i] > 0.0;
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if (lev.eval(mid).1 > 0.0) == slo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let u = 0.5 * (lo + hi);
                out.push((u, lev.eval(u).0));
            }
        }
        out.push((b, lev.eval(b).0));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-15);
    out
}

/// Chooses `count` alternating extrema containing the global maximum.
fn exchange(extrema: Vec<(f64, f64)>, count: usize) -> Result<Vec<f64>> {
    // Collapse runs of equal sign to their largest member.
    let mut alt: Vec<(f64, f64)> = Vec::new();
    for p in extrema {
        if p.1 == 0.0 {
            continue;
        }
        match alt.last_mut() {
            Some(last) if (last.1 > 0.0) == (p.1 > 0.0) => {
                if p.1.abs() > last.1.abs() {
                    *last = p;
                }
            }
            _ => alt.push(p),
        }
    }
    if alt.len() < count {
        return Err(Error::NoConvergence(format!(
            "only {} alternation points available, need {count}",
            alt.len()
        )));
    }
    while alt.len() > count {
        if alt.len() == count + 1 {
            if alt[0].1.abs() < alt[alt.len() - 1].1.abs() {
                alt.remove(0);
            } else {
                alt.pop();
            }
            continue;
        }
        let (imin, _) = alt
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.abs().total_cmp(&b.1 .1.abs()))
            .unwrap();
        if imin == 0 || imin == alt.len() - 1 {
            alt.remove(imin);
        } else {
            let drop_nb = if alt[imin - 1].1.abs() < alt[imin + 1].1.abs() {
                imin - 1
            } else {
                imin + 1
            };
            let (x, y) = if drop_nb < imin {
                (drop_nb, imin)
            } else {
                (imin, drop_nb)
            };
            alt.remove(y);
            alt.remove(x);
        }
    }
    Ok(alt.into_iter().map(|p| p.0).collect())
}

/// The canonical lift of a density under a real polynomial map:
/// `nu*(x) = nu(f(x)) |f'(x)| / deg f` on `f^{-1}(K)`.
pub struct PullbackDensity<'a> {
    pieces: Vec<(f64, f64)>,
    f: RealPoly,
    df: RealPoly,
    base: &'a dyn Density,
    support: IntervalUnion,
    degree: f64,
}

impl Density for PullbackDensity<'_> {
    fn support(&self) -> &IntervalUnion {
        &self.support
    }

    fn eval(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return 0.0;
        }
        self.base.eval(self.f.eval(x)) * self.df.eval(x).abs() / self.degree
    }

    fn pieces(&self) -> Vec<(f64, f64)> {
        self.pieces.clone()
    }
}

/// Real preimage of an interval union under a polynomial.
pub fn preimage(f: &RealPoly, k: &IntervalUnion) -> Result<IntervalUnion> {
    if f.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let lead = f.leading();
    let mut pieces = Vec::new();
    for &(alpha, beta) in k.bands() {
        let mut knots = Vec::new();
        for c in [alpha, beta] {
            let g = f - &RealPoly::constant(c);
            let bound = 1.0
                + g.coeffs()[..g.degree()]
                    .iter()
                    .fold(0.0f64, |mx, ci| mx.max((ci / lead).abs()));
            knots.extend(roots::real_roots_touching(&g, -bound, bound)?);
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        for w in knots.windows(2) {
            let mid = f.eval(0.5 * (w[0] + w[1]));
            if mid >= alpha && mid <= beta && w[1] > w[0] {
                pieces.push((w[0], w[1]));
            }
        }
    }
    if pieces.is_empty() {
        return Err(Error::Precondition("preimage has no real band".into()));
    }
    IntervalUnion::new(&pieces)
}

/// Pulls `nu` back under `f`; the preimage must be entirely real.
pub fn pullback_density<'a>(f: &RealPoly, nu: &'a dyn Density) -> Result<PullbackDensity<'a>> {
    let support = preimage(f, nu.support())?;
    let df = f.derivative();
    let mut pieces = Vec::new();
    for &(a, b) in support.bands() {
        let mut cuts = vec![a];
        if df.degree() > 0 {
            cuts.extend(
                roots::real_roots_touching(&df, a, b)?
                    .into_iter()
                    .filter(|&c| c > a && c < b),
            );
        }
        cuts.push(b);
        pieces.extend(cuts.windows(2).map(|w| (w[0], w[1])));
    }
    let pd = PullbackDensity {
        pieces,
        f: f.clone(),
        df,
        base: nu,
        degree: f.degree() as f64,
        support,
    };
    let mass: f64 = measure::spectra(&pd, measure::SPECTRAL_MODES)
        .iter()
        .map(|s| s.mass)
        .sum();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!(
            "pulled-back mass {mass} differs from 1: the preimage is not entirely real"
        )));
    }
    Ok(pd)
}

/// `I(mu) = int int log|x - y| dmu dmu` for a mass-1 density.
pub fn energy<D: Density + ?Sized>(mu: &D) -> Result<f64> {
    let specs = measure::spectra(mu, measure::SPECTRAL_MODES);
    energy_from_spectra(&specs)
}

pub fn energy_from_spectra(specs: &[BandSpectrum]) -> Result<f64> {
    let mass: f64 = specs.iter().map(|s| s.mass).sum();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(mass));
    }
    let parts: Vec<f64> = (0..specs.len())
        .into_par_iter()
        .map(|j| {
            let mut s = specs[j].self_energy();
            for (i, si) in specs.iter().enumerate() {
                if i != j {
                    s += specs[j].integrate(|x| si.potential(Complex64::new(x, 0.0)));
                }
            }
            s
        })
        .collect();
    Ok(parts.iter().sum())
}

/// `sum_{i != j} w_i w_j log|z_i - z_j|` for distinct atoms.
pub fn pseudo_energy_discrete(mu: &DiscreteMeasure) -> Result<f64> {
    let a = mu.atoms();
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let d = (a[i].0 - a[j].0).norm();
            if d == 0.0 {
                return Err(Error::CoincidentAtoms(a[i].0.re));
            }
            s += 2.0 * a[i].1 * a[j].1 * d.ln();
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::UniformDensity;

    #[test]
    fn closed_forms() {
        assert_eq!(capacity_closed_form(&Shape::Interval { a: -2.0, b: 2.0 }).unwrap(), 1.0);
        let v = capacity_closed_form(&Shape::SymmetricPair {
            a: 2f64.sqrt(),
            b: 8f64.sqrt(),
        })
        .unwrap();
        assert!((v - 0.5 * 6f64.sqrt()).abs() < 1e-15);
        let v = capacity_closed_form(&Shape::Arc {
            r: 1.0,
            alpha: std::f64::consts::TAU,
        })
        .unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(capacity_closed_form(&Shape::SymmetricPair { a: 2.0, b: 1.0 }).is_err());
        for l in [1.0, 2.0, 4.0, 8.0] {
            assert_eq!(
                capacity_closed_form(&Shape::Interval { a: 0.0, b: l }).unwrap(),
                l / 4.0
            );
        }
    }

    #[test]
    fn scale_and_preimage() {
        assert_eq!(capacity_scale(1.0, 3.0), 3.0);
        assert_eq!(capacity_scale(0.25, -4.0), 1.0);
        assert!((capacity_scale(0.220949, 10.0) - 2.20949).abs() < 1e-12);
        assert_eq!(capacity_preimage(1.0, 7).unwrap(), 1.0);
        assert!((capacity_preimage(1.5, 2).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
        let (a, b): (f64, f64) = (1.0, 3.0);
        let v = capacity_preimage((b * b - a * a) / 4.0, 2).unwrap();
        assert!((v - 0.5 * (b * b - a * a).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fekete_small() {
        let e = IntervalUnion::single(-2.0, 2.0).unwrap();
        assert!((fekete_diameter(&e, 2).unwrap() - 4.0).abs() < 1e-12);
        let e2 = IntervalUnion::single(0.0, 4.0).unwrap();
        assert!((fekete_diameter(&e2, 2).unwrap() - 4.0).abs() < 1e-12);
        // three points: -2, 0, 2 gives (4*2*2)^(1/3)
        let d3 = fekete_diameter(&e, 3).unwrap();
        assert!((d3 - 16f64.powf(1.0 / 3.0)).abs() < 1e-9);
        assert!(fekete_diameter(&e, 1).is_err());
        assert!(fekete_diameter(&e, 13).is_err());
    }

    #[test]
    fn remez_examples() {
        let e = IntervalUnion::single(-2.0, 2.0).unwrap();
        let r = chebyshev_constant(&e, 2).unwrap();
        assert!((r.norm - 2.0).abs() < 1e-12);
        let c = r.poly.coeffs();
        assert!((c[0] + 2.0).abs() < 1e-12 && c[1].abs() < 1e-12 && (c[2] - 1.0).abs() < 1e-12);
        let r = chebyshev_constant(&e, 5).unwrap();
        let expect = [0.0, 5.0, 0.0, -5.0, 0.0, 1.0];
        for (x, y) in r.poly.coeffs().iter().zip(expect) {
            assert!((x - y).abs() < 1e-10);
        }
        let r = chebyshev_constant(&IntervalUnion::single(0.0, 4.0).unwrap(), 1).unwrap();
        assert!((r.norm - 2.0).abs() < 1e-12);
        assert!((r.poly.coeff(0) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn remez_two_bands() {
        let e = IntervalUnion::new(&[(-8f64.sqrt(), -2f64.sqrt()), (2f64.sqrt(), 8f64.sqrt())]).unwrap();
        let r = chebyshev_constant(&e, 2).unwrap();
        assert!((r.norm - 3.0).abs() < 1e-10, "norm {}", r.norm);
        assert!((r.poly.coeff(0) + 5.0).abs() < 1e-9);
        let r4 = chebyshev_constant(&e, 4).unwrap();
        assert!((r4.norm - 4.5).abs() < 1e-9, "norm {}", r4.norm);
        let r3 = chebyshev_constant(&e, 3).unwrap();
        assert!(r3.cap_estimate >= 1.5f64.sqrt() - 1e-9);
    }

    #[test]
    fn remez_small_isolated_band() {
        let e = IntervalUnion::new(&[(0.0, 1.0), (1.5, 2.0), (3.0, 4.0), (5.0, 5.2)]).unwrap();
        let cap = crate::abel::abel_capacity(&crate::abel::solve_r(&e).unwrap())
            .unwrap()
            .value;
        let mut prev = f64::INFINITY;
        for n in [16, 64, 128] {
            let r = chebyshev_constant(&e, n).unwrap();
            assert!(
                r.cap_estimate >= cap && r.cap_estimate < prev,
                "n = {n}: {}",
                r.cap_estimate
            );
            prev = r.cap_estimate;
        }
        assert!(prev - cap < 5e-3);
    }

    #[test]
    fn energies() {
        let d = UniformDensity::new(IntervalUnion::single(0.0, 1.0).unwrap());
        assert!((energy(&d).unwrap() + 1.5).abs() < 1e-5);
        let d = UniformDensity::new(IntervalUnion::new(&[(0.0, 1.0), (2.0, 3.0)]).unwrap());
        let direct = {
            // tensor midpoint check of the off-diagonal block
            let n = 400;
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let x = (i as f64 + 0.5) / n as f64;
                    let y = 2.0 + (j as f64 + 0.5) / n as f64;
                    s += (y - x).ln();
                }
            }
            s / (n * n) as f64
        };
        let expect = 0.5 * (-1.5) + 0.5 * direct;
        assert!((energy(&d).unwrap() - expect).abs() < 1e-5);
    }

    #[test]
    fn pullback_uniform_halves_energy() {
        let base = UniformDensity::new(IntervalUnion::single(-2.0, 2.0).unwrap());
        let f = RealPoly::new(vec![-2.0, 0.0, 1.0]);
        let pb = pullback_density(&f, &base).unwrap();
        assert_eq!(pb.support().bands(), &[(-2.0, 2.0)]);
        assert!((pb.eval(1.0) - 0.25).abs() < 1e-12);
        let i0 = energy(&base).unwrap();
        let i1 = energy(&pb).unwrap();
        assert!((i1 - 0.5 * i0).abs() < 2e-4, "{i1} vs {}", 0.5 * i0);
        let id = pullback_density(&RealPoly::x(), &base).unwrap();
        assert!((id.eval(0.7) - base.eval(0.7)).abs() < 1e-15);
    }

    #[test]
    fn pullback_needs_real_preimage() {
        let base = UniformDensity::new(IntervalUnion::single(-2.0, 2.0).unwrap());
        let f = RealPoly::new(vec![1.0, 0.0, 1.0]);
        assert!(pullback_density(&f, &base).is_err());
    }

    #[test]
    fn pseudo_energy() {
        let m = DiscreteMeasure::uniform_real(&[0.0, 4.0]).unwrap();
        assert!((pseudo_energy_discrete(&m).unwrap() - 2f64.ln()).abs() < 1e-15);
        let m = DiscreteMeasure::uniform_real(&[-1.0, 1.0]).unwrap();
        assert!((pseudo_energy_discrete(&m).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        let m = DiscreteMeasure::uniform_real(&[3.0]).unwrap();
        assert_eq!(pseudo_energy_discrete(&m).unwrap(), 0.0);
        let m = DiscreteMeasure::from_real(&[1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert!(matches!(pseudo_energy_discrete(&m), Err(Error::CoincidentAtoms(_))));
    }

    #[test]
    fn report_serializes() {
        let r = CapacityReport::new(1.0, Method::AbelIntegral).with("bands", 1);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"abel_integral\""));
        let back: CapacityReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
