//! Subcommand execution.

use anyhow::{anyhow, bail, Context};
use logcap::abel::{self, AbelDatum};
use logcap::capacity::{self, CapacityReport, Method, Shape};
use logcap::measure::UniformDensity;
use logcap::pellabel;
use logcap::rational;
use logcap::robinson::{self, RobinsonInstance};
use logcap::weil::{self, CircleSet};
use logcap::{ExactPoly, IntervalUnion};
use serde::Serialize;
use serde_json::{json, Value};

use crate::problem::{self, Problem};
use crate::{Command, Format, Input, Outcome, PellAction, WeilAction};

const DEFAULT_CHEBYSHEV_DEGREE: usize = 64;
const DEFAULT_FEKETE_N: usize = 8;
const DEFAULT_SAMPLES: usize = 100;
const PUSHFORWARD_TOL: f64 = 1e-10;

fn read_file(path: &Option<std::path::PathBuf>) -> anyhow::Result<Problem> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Problem::from_json(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(Problem::default()),
    }
}

fn bands_flag(input: &Input) -> anyhow::Result<Option<IntervalUnion>> {
    input.bands.as_deref().map(problem::parse_bands).transpose()
}

/// Problem file merged with the command-line flags.
pub fn load_problem(cmd: &Command) -> anyhow::Result<Problem> {
    let (file, flags) = match cmd {
        Command::Cap {
            input,
            method,
            degree,
            seed,
        } => (
            read_file(&input.problem)?,
            Problem {
                bands: bands_flag(input)?,
                method: method.clone(),
                degree: *degree,
                seed: *seed,
                ..Default::default()
            },
        ),
        Command::Eqm { input, samples, .. } => (
            read_file(&input.problem)?,
            Problem {
                bands: bands_flag(input)?,
                samples: *samples,
                ..Default::default()
            },
        ),
        Command::Fekete { input, n, seed } => (
            read_file(&input.problem)?,
            Problem {
                bands: bands_flag(input)?,
                degree: *n,
                seed: *seed,
                ..Default::default()
            },
        ),
        Command::Energy { input, measure } => (
            read_file(&input.problem)?,
            Problem {
                bands: bands_flag(input)?,
                measure: measure.clone(),
                ..Default::default()
            },
        ),
        Command::Pell {
            input,
            r,
            max_denominator,
            m_prime,
            tol,
            ..
        } => (
            read_file(&input.problem)?,
            Problem {
                bands: bands_flag(input)?,
                r: *r,
                max_denominator: *max_denominator,
                m_prime: m_prime.as_deref().map(problem::parse_rational).transpose()?,
                tolerance: *tol,
                ..Default::default()
            },
        ),
        Command::Robinson {
            preset,
            p,
            m,
            degree,
            table,
            degree_cap,
            problem: path,
        } => (
            read_file(path)?,
            Problem {
                preset: preset.clone(),
                p: p.as_deref().map(problem::parse_poly).transpose()?,
                m: m.as_deref().map(problem::parse_rational).transpose()?,
                degree: *degree,
                table: table.as_deref().map(problem::parse_list).transpose()?,
                degree_cap: *degree_cap,
                ..Default::default()
            },
        ),
        Command::Weil { q, coeffs, input, .. } => (
            read_file(&input.problem)?,
            Problem {
                bands: bands_flag(input)?,
                q: *q,
                p: coeffs.as_deref().map(problem::parse_poly).transpose()?,
                ..Default::default()
            },
        ),
    };
    let merged = file.merge(flags);
    if let Some(t) = merged.tolerance {
        if t.is_nan() || t <= 0.0 {
            bail!("tolerance must be positive");
        }
    }
    Ok(merged)
}

fn need_bands(p: &Problem) -> anyhow::Result<&IntervalUnion> {
    p.bands
        .as_ref()
        .ok_or_else(|| anyhow!("missing --bands or \"bands\" in the problem file"))
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn done(text: String) -> anyhow::Result<Outcome> {
    Ok(Outcome {
        text,
        certified: true,
        header: None,
    })
}

fn json_only(format: Option<Format>, what: &str) -> anyhow::Result<()> {
    if format == Some(Format::Csv) {
        bail!("{what} has no csv output");
    }
    Ok(())
}

pub fn run(cmd: &Command, p: Problem, format: Option<Format>) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Cap { .. } => cap(&p, format),
        Command::Eqm { header, .. } => eqm(&p, format, header.clone()),
        Command::Fekete { .. } => fekete(&p, format),
        Command::Energy { .. } => {
            json_only(format, "energy")?;
            energy(&p)
        }
        Command::Pell { action, .. } => {
            json_only(format, "pell")?;
            pell(*action, &p)
        }
        Command::Robinson { .. } => robinson_cmd(&p, format),
        Command::Weil { action, .. } => {
            json_only(format, "weil")?;
            weil_cmd(*action, &p)
        }
    }
}

#[derive(Serialize)]
struct TaggedReport {
    #[serde(flatten)]
    report: CapacityReport,
    tolerance: f64,
}

fn closed_form_shape(e: &IntervalUnion) -> anyhow::Result<Shape> {
    let b = e.bands();
    match b {
        [(a, b)] => Ok(Shape::Interval { a: *a, b: *b }),
        [(a0, b0), (a1, b1)]
            if (a0 + b1).abs() <= 1e-12 * b1.abs() && (b0 + a1).abs() <= 1e-12 * a1.abs() && *a1 > 0.0 =>
        {
            Ok(Shape::SymmetricPair { a: *a1, b: *b1 })
        }
        _ => bail!("no closed form for these bands (one interval or a symmetric pair)"),
    }
}

fn cap_report(e: &IntervalUnion, method: &str, p: &Problem) -> anyhow::Result<TaggedReport> {
    Ok(match method {
        "abel" | "abel_integral" => {
            let datum = abel::solve_r(e)?;
            TaggedReport {
                report: abel::abel_capacity(&datum)?,
                tolerance: abel::RAY_AGREEMENT,
            }
        }
        "closed-form" | "closed_form" => {
            let shape = closed_form_shape(e)?;
            let v = capacity::capacity_closed_form(&shape)?;
            TaggedReport {
                report: CapacityReport::new(v, Method::ClosedForm).with("shape", &shape),
                tolerance: 0.0,
            }
        }
        "chebyshev" => {
            let n = p.degree.unwrap_or(DEFAULT_CHEBYSHEV_DEGREE);
            let c = capacity::chebyshev_constant(e, n)?;
            TaggedReport {
                report: CapacityReport::new(c.cap_estimate, Method::Chebyshev)
                    .with("degree", n)
                    .with("norm", c.norm)
                    .with("cap_upper", c.cap_upper)
                    .with("iterations", c.iterations),
                tolerance: capacity::REMEZ_TOL,
            }
        }
        "fekete" => {
            let n = p.degree.unwrap_or(DEFAULT_FEKETE_N);
            let f = capacity::fekete_points_seeded(e, n, p.seed.unwrap_or(capacity::FEKETE_SEED))?;
            TaggedReport {
                report: CapacityReport::new(f.diameter, Method::Fekete)
                    .with("n", n)
                    .with("points", &f.points)
                    .with("starts", f.starts),
                tolerance: capacity::FEKETE_TOL,
            }
        }
        other => bail!("unknown method {other:?}"),
    })
}

fn cap(p: &Problem, format: Option<Format>) -> anyhow::Result<Outcome> {
    let e = need_bands(p)?;
    let method = p.method.as_deref().unwrap_or("abel");
    let methods: Vec<&str> = if method == "all" {
        let mut v = vec!["abel", "chebyshev", "fekete"];
        if closed_form_shape(e).is_ok() {
            v.insert(0, "closed-form");
        }
        v
    } else {
        vec![method]
    };
    let reports: Vec<TaggedReport> = methods
        .iter()
        .map(|m| cap_report(e, m, p))
        .collect::<anyhow::Result<_>>()?;
    let text = if format == Some(Format::Csv) {
        let mut s = String::from("method,value,tolerance");
        for r in &reports {
            s += &format!("\n{},{},{}", r.report.method.tag(), r.report.value, r.tolerance);
        }
        s
    } else if reports.len() == 1 {
        to_json(&reports[0])?
    } else {
        to_json(&reports)?
    };
    done(text)
}

fn eqm_header(datum: &AbelDatum) -> Value {
    json!({
        "method": Method::AbelIntegral.tag(),
        "tolerance": abel::GAP_RESIDUAL_TOL,
        "bands": datum.bands,
        "r_coefficients": datum.r,
        "omega": datum.omega,
        "v_e": datum.v_e,
        "capacity": datum.capacity(),
    })
}

fn eqm(p: &Problem, format: Option<Format>, header: Option<std::path::PathBuf>) -> anyhow::Result<Outcome> {
    let e = need_bands(p)?;
    let n = p.samples.unwrap_or(DEFAULT_SAMPLES);
    if n == 0 {
        bail!("samples must be positive");
    }
    let datum = abel::solve_r(e)?;
    let rows: Vec<(f64, f64)> = e
        .bands()
        .iter()
        .flat_map(|&(a, b)| (1..=n).map(move |i| a + (b - a) * i as f64 / (n + 1) as f64))
        .map(|x| (x, datum.density(x)))
        .collect();
    let head = eqm_header(&datum);
    if format == Some(Format::Json) {
        return done(to_json(&json!({ "header": head, "rows": rows }))?);
    }
    let mut s = String::from("x,density");
    for (x, d) in &rows {
        s += &format!("\n{x},{d}");
    }
    let header = match header {
        Some(path) => Some((path, to_json(&head)?)),
        None => None,
    };
    Ok(Outcome {
        text: s,
        certified: true,
        header,
    })
}

fn fekete(p: &Problem, format: Option<Format>) -> anyhow::Result<Outcome> {
    let e = need_bands(p)?;
    let n = p.degree.unwrap_or(DEFAULT_FEKETE_N);
    let seed = p.seed.unwrap_or(capacity::FEKETE_SEED);
    let f = capacity::fekete_points_seeded(e, n, seed)?;
    if format == Some(Format::Csv) {
        let mut s = String::from("index,x");
        for (i, x) in f.points.iter().enumerate() {
            s += &format!("\n{i},{x}");
        }
        return done(s);
    }
    done(to_json(&json!({
        "method": Method::Fekete.tag(),
        "tolerance": 0.0,
        "n": n,
        "seed": seed,
        "diameter": f.diameter,
        "points": f.points,
        "starts": f.starts,
    }))?)
}

fn energy(p: &Problem) -> anyhow::Result<Outcome> {
    let e = need_bands(p)?;
    let which = p.measure.as_deref().unwrap_or("equilibrium");
    let value = match which {
        "equilibrium" => capacity::energy(&abel::equilibrium_density(&abel::solve_r(e)?))?,
        "uniform" => capacity::energy(&UniformDensity::new(e.clone()))?,
        other => bail!("unknown measure {other:?} (equilibrium or uniform)"),
    };
    done(to_json(&json!({
        "measure": which,
        "value": value,
        "method": "spectral",
        "modes": logcap::measure::SPECTRAL_MODES,
        "tolerance": 1e-6,
    }))?)
}

fn pell(action: PellAction, p: &Problem) -> anyhow::Result<Outcome> {
    let e = need_bands(p)?;
    let datum = abel::solve_r(e)?;
    let max_den = p.max_denominator.unwrap_or(pellabel::DEFAULT_MAX_DENOMINATOR);
    let tol = p.tolerance.unwrap_or(pellabel::TOL_RAT);
    let omega = pellabel::rotation_numbers(&datum);
    let found = pellabel::detect_from_weights(&omega, max_den, tol);
    let r = match (p.r, &found) {
        (Some(r), _) => r,
        (None, Some((r, _))) => *r,
        (None, None) if action != PellAction::Detect => {
            bail!("no Pell-Abel degree up to {max_den}; pass --r")
        }
        _ => 0,
    };
    match action {
        PellAction::Detect => done(to_json(&json!({
            "method": "rotation_numbers",
            "tolerance": tol,
            "max_denominator": max_den,
            "omega": omega,
            "r": found.as_ref().map(|f| f.0),
            "r_j": found.as_ref().map(|f| f.1.clone()),
        }))?),
        PellAction::Construct => {
            let pa = pellabel::construct_pa_polynomial(&datum, r)?;
            let report = pellabel::certify_structure(&pa);
            let text = to_json(&json!({
                "method": "band_fit",
                "tolerance": pellabel::FIT_TOL,
                "r": pa.r,
                "r_j": pa.r_j,
                "p": pa.p,
                "q": pa.q,
                "d": pa.d,
                "m": pa.m,
                "capacity": pa.capacity(),
                "residuals": pa.residuals,
                "exact": pa.exact,
                "structure": report,
            }))?;
            Ok(Outcome {
                text,
                certified: report.all_passed(),
                header: None,
            })
        }
        PellAction::Rationalize => {
            let m_prime = p.m_prime.as_ref().ok_or_else(|| anyhow!("missing --m-prime"))?;
            let pa = pellabel::construct_pa_polynomial(&datum, r)?;
            let out = pellabel::rationalize(&pa, m_prime)?;
            done(to_json(&json!({
                "method": "dyadic_rounding",
                "tolerance": 0.0,
                "p_prime": out.p_prime,
                "m_prime": rational::format(m_prime),
                "e_prime": out.e_prime,
                "capacity": out.capacity,
                "rounding_bits": out.rounding_bits,
            }))?)
        }
    }
}

fn instance(p: &Problem) -> anyhow::Result<RobinsonInstance> {
    match (&p.preset, &p.p, &p.m) {
        (Some(name), None, None) => match name.as_str() {
            "x2m6" => Ok(RobinsonInstance::x2m6()),
            "x2m5" => Ok(RobinsonInstance::x2m5()),
            other => bail!("unknown preset {other:?} (x2m6 or x2m5)"),
        },
        (None, Some(poly), Some(m)) => Ok(RobinsonInstance::from_polynomial(poly, m)?),
        _ => bail!("give either --preset or both --p and --m"),
    }
}

fn robinson_cmd(p: &Problem, format: Option<Format>) -> anyhow::Result<Outcome> {
    let inst = instance(p)?;
    let cap = p.degree_cap.unwrap_or(robinson::DEFAULT_DEGREE_CAP);
    let r = inst.r();
    let mut targets: Vec<usize> = p.table.clone().unwrap_or_default().iter().map(|n| n * r).collect();
    if let Some(d) = p.degree {
        targets.insert(0, d);
    }
    if targets.is_empty() {
        targets.push(r);
    }
    let runs: Vec<robinson::Generated> = targets
        .iter()
        .map(|&t| robinson::generate_capped(&inst, t, cap))
        .collect::<logcap::Result<_>>()?;
    let mut table = Vec::new();
    if p.table.is_some() {
        let dens = abel::equilibrium_density(&abel::solve_r(&inst.pa.bands)?);
        let measures: Vec<_> = runs
            .iter()
            .map(robinson::certified_root_measure)
            .collect::<logcap::Result<_>>()?;
        let dists = robinson::convergence_report(&measures, &dens)?;
        for (g, d) in runs.iter().zip(dists) {
            table.push((g.certificate.n, g.p_prime.degree(), d));
        }
    }
    if format == Some(Format::Csv) {
        if p.table.is_none() {
            bail!("csv output is the convergence table; pass --table");
        }
        let mut s = String::from("n,degree,kolmogorov_distance");
        for (n, deg, d) in &table {
            s += &format!("\n{n},{deg},{d}");
        }
        return done(s);
    }
    let run_json: Vec<Value> = runs
        .iter()
        .map(|g| -> anyhow::Result<Value> {
            Ok(json!({
                "n": g.certificate.n,
                "degree": g.p_prime.degree(),
                "coefficients": robinson::integer_strings(&g.p_prime)?,
                "certificate": g.certificate,
            }))
        })
        .collect::<anyhow::Result<_>>()?;
    let table_json: Vec<Value> = table
        .iter()
        .map(|(n, deg, d)| json!({"n": n, "degree": deg, "kolmogorov_distance": d}))
        .collect();
    done(to_json(&json!({
        "method": "exact_sign_alternation",
        "tolerance": 0.0,
        "instance": {
            "p": inst.p,
            "m": rational::format(&(&inst.lambda * rational::int(2))),
            "lambda": rational::format(&inst.lambda),
            "a": inst.a,
            "ell": inst.ell,
            "bands": inst.pa.bands,
        },
        "runs": run_json,
        "convergence": table_json,
    }))?)
}

fn weil_cmd(action: WeilAction, p: &Problem) -> anyhow::Result<Outcome> {
    let q = p.q.ok_or_else(|| anyhow!("missing --q"))?;
    match action {
        WeilAction::Lift => {
            let p_i: &ExactPoly = p.p.as_ref().ok_or_else(|| anyhow!("missing --coeffs"))?;
            let lift = weil::weil_lift(p_i, q)?;
            let defect = weil::modulus_defect(&lift, q)?;
            let push = weil::pushforward_check(&lift, p_i, q);
            let text = to_json(&json!({
                "method": "exact_composition",
                "tolerance": PUSHFORWARD_TOL,
                "q": q,
                "p_i": p_i,
                "lift": robinson::integer_strings(&lift)?,
                "modulus_defect": defect,
                "modulus_ok": defect <= PUSHFORWARD_TOL,
                "pushforward": push,
            }))?;
            Ok(Outcome {
                text,
                certified: push && defect <= PUSHFORWARD_TOL,
                header: None,
            })
        }
        WeilAction::Bound => {
            let cs = match &p.bands {
                Some(b) => CircleSet::new(q, b.clone())?,
                None => CircleSet::full_circle(q)?,
            };
            let b = weil::support_capacity_bound(&cs)?;
            done(to_json(&json!({
                "method": Method::AbelIntegral.tag(),
                "tolerance": abel::RAY_AGREEMENT,
                "q": q,
                "bands": cs.x_bands,
                "cap": b.cap,
                "bound": b.bound,
                "satisfied": b.satisfied,
            }))?)
        }
    }
}
