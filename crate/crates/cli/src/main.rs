mod commands;
mod problem;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use problem::Problem;

#[derive(Parser, Debug)]
#[command(
    name = "logcap",
    version,
    about = "Logarithmic capacity, equilibrium measures, Pell-Abel and integer polynomials on unions of intervals"
)]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; defaults to csv for `eqm` and json otherwise.
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Worker threads for parallel sections.
    #[arg(long, env = "LOGCAP_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Print the merged problem as JSON and exit.
    #[arg(long, global = true)]
    pub print_problem: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Bands as a JSON array of [a, b] pairs.
    #[arg(long)]
    pub bands: Option<String>,
    /// JSON problem file; flags override its fields.
    #[arg(long)]
    pub problem: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Capacity of a union of intervals.
    Cap {
        #[command(flatten)]
        input: Input,
        /// abel, closed-form, chebyshev, fekete or all.
        #[arg(long)]
        method: Option<String>,
        /// Degree for chebyshev, point count for fekete.
        #[arg(long)]
        degree: Option<usize>,
        /// Seed for the random Fekete starts.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Equilibrium density samples.
    Eqm {
        #[command(flatten)]
        input: Input,
        /// Interior samples per band.
        #[arg(long)]
        samples: Option<usize>,
        /// Also write the JSON header here in csv mode.
        #[arg(long)]
        header: Option<PathBuf>,
    },
    /// Fekete points and the discrete transfinite diameter.
    Fekete {
        #[command(flatten)]
        input: Input,
        /// Number of points.
        #[arg(long, short)]
        n: Option<usize>,
        /// Seed for the random starts.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Logarithmic energy of a measure on the bands.
    Energy {
        #[command(flatten)]
        input: Input,
        /// equilibrium or uniform.
        #[arg(long)]
        measure: Option<String>,
    },
    /// Pell-Abel detection, synthesis and rationalisation.
    Pell {
        #[arg(value_enum)]
        action: PellAction,
        #[command(flatten)]
        input: Input,
        /// Degree r of P; detected from the band masses when omitted.
        #[arg(long)]
        r: Option<usize>,
        /// Largest r tried by detect.
        #[arg(long)]
        max_denominator: Option<usize>,
        /// New level M' for rationalize, as "p/q" or a decimal.
        #[arg(long)]
        m_prime: Option<String>,
        /// Rationality tolerance for detect.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Monic integer polynomials with all roots in E.
    Robinson {
        /// x2m6 or x2m5.
        #[arg(long)]
        preset: Option<String>,
        /// Exact P as a JSON coefficient array, constant term first.
        #[arg(long)]
        p: Option<String>,
        /// Exact M.
        #[arg(long)]
        m: Option<String>,
        /// Target degree of the generated polynomial.
        #[arg(long)]
        degree: Option<usize>,
        /// Comma-separated multipliers n for the convergence table.
        #[arg(long)]
        table: Option<String>,
        /// Largest degree searched for an integral composition.
        #[arg(long)]
        degree_cap: Option<usize>,
        /// JSON problem file; flags override its fields.
        #[arg(long)]
        problem: Option<PathBuf>,
    },
    /// Circle of radius sqrt(q): lifts and the support-capacity bound.
    Weil {
        #[arg(value_enum)]
        action: WeilAction,
        /// Integer q >= 2; the circle has radius sqrt(q).
        #[arg(long)]
        q: Option<u64>,
        /// Polynomial to lift, JSON coefficient array, constant term first.
        #[arg(long)]
        coeffs: Option<String>,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PellAction {
    Detect,
    Construct,
    Rationalize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeilAction {
    Lift,
    Bound,
}

/// Result text plus whether every certificate passed.
pub struct Outcome {
    pub text: String,
    pub certified: bool,
    pub header: Option<(PathBuf, String)>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use logcap::Error as E;
    match err.downcast_ref::<logcap::Error>() {
        Some(E::Certification(_)) | Some(E::NotSquarefree) => 3,
        Some(E::Quadrature(_)) | Some(E::NoConvergence(_)) | Some(E::IllConditioned(_)) | Some(E::NotNormalized(_)) => {
            4
        }
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = commands::load_problem(&cli.command).and_then(|problem: Problem| {
        if cli.print_problem {
            let text = serde_json::to_string_pretty(&problem)?;
            return Ok(Outcome {
                text,
                certified: true,
                header: None,
            });
        }
        commands::run(&cli.command, problem, cli.format)
    });
    match result {
        Ok(out) => {
            if let Some((path, text)) = &out.header {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            let written = match &cli.output {
                Some(path) => std::fs::write(path, format!("{}\n", out.text)),
                None => writeln!(std::io::stdout(), "{}", out.text),
            };
            match written {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
                Ok(()) => {}
            }
            if out.certified {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: certification failed");
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
