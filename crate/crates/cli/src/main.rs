//! `kvc`: command-line front end for the kvcohom library.

mod report;
mod verbs;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use kvcohom::Rat;

use report::{render, Inputs, Report, FORMAT_VERSION};

#[derive(Parser, Debug)]
#[command(name = "kvc", version, about = "KV-algebra cohomology toolkit")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Cell budget per cochain space (overrides KVCOHOM_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[command(subcommand)]
    verb: Verb,
}

fn rat(s: &str) -> Result<Rat, String> {
    s.parse::<Rat>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Check the KV identity of an algebra, or the module identities of a module.
    Verify { file: PathBuf },
    /// Jacobi elements (and the center, for an algebra).
    Jacobi { file: PathBuf },
    /// KV cohomology of a module (an algebra file means its regular bimodule).
    Cohomology {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        q_max: usize,
    },
    /// Cohomology of the Nijenhuis comparison complex.
    Nijenhuis {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        q_max: usize,
    },
    /// Build `W (+) A` from a module and a 2-cochain.
    ExtendAlgebra {
        module: PathBuf,
        #[arg(long)]
        cochain: PathBuf,
    },
    /// Build the module extension of `W` by `V` from a cocycle on `A (+) W`.
    ExtendModule {
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        cochain: PathBuf,
    },
    /// Decide whether two module-extension cocycles give equivalent extensions.
    ClassifyExt {
        #[arg(long)]
        w: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Deformation residuals of a jet, order by order.
    DeformCheck { jet: PathBuf },
    /// Extend a jet by solving the next orders, or report an obstruction.
    DeformSolve {
        jet: PathBuf,
        #[arg(long, default_value_t = 1)]
        orders: usize,
    },
    /// Second cohomology of the regular bimodule.
    Rigidity { file: PathBuf },
    /// Curvature of `mu + S` against the commutator formula.
    CurvatureCheck {
        algebra: PathBuf,
        #[arg(long)]
        s: PathBuf,
    },
    /// Structural checks of a graded algebra `A (+) W`.
    GradedCheck { file: PathBuf },
    /// Deform a graded algebra by `theta : W x W -> W`.
    GradedDeform {
        file: PathBuf,
        #[arg(long)]
        theta: PathBuf,
    },
    /// Check a connectionlike pair `(theta, psi)`.
    Connectionlike {
        file: PathBuf,
        #[arg(long)]
        pair: PathBuf,
    },
    /// The `S_(alpha, beta)` cocycle suite on AFF.
    AffSuite {
        #[arg(long, value_parser = rat, requires = "beta", allow_hyphen_values = true)]
        alpha: Option<Rat>,
        #[arg(long, value_parser = rat, requires = "alpha", allow_hyphen_values = true)]
        beta: Option<Rat>,
    },
    /// Integrate a geodesic of the deformed connection; CSV on stdout.
    Geodesic {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        y0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        vx0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        vy0: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Emit a JSON summary instead of the CSV trajectory.
        #[arg(long)]
        summary: bool,
    },
    /// Right identities and radiant primitives of parallel 2-cochains.
    Radiant {
        module: PathBuf,
        #[arg(long)]
        cochain: Option<PathBuf>,
    },
    /// Seeded invariant battery.
    Proptest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Run against a coboundary with a flipped sign.
        #[arg(long)]
        mutant: bool,
    },
    /// Print a fixture file, or the list of fixture names.
    Fixtures { name: Option<String> },
}

impl Verb {
    fn name(&self) -> &'static str {
        match self {
            Verb::Verify { .. } => "verify",
            Verb::Jacobi { .. } => "jacobi",
            Verb::Cohomology { .. } => "cohomology",
            Verb::Nijenhuis { .. } => "nijenhuis",
            Verb::ExtendAlgebra { .. } => "extend-algebra",
            Verb::ExtendModule { .. } => "extend-module",
            Verb::ClassifyExt { .. } => "classify-ext",
            Verb::DeformCheck { .. } => "deform-check",
            Verb::DeformSolve { .. } => "deform-solve",
            Verb::Rigidity { .. } => "rigidity",
            Verb::CurvatureCheck { .. } => "curvature-check",
            Verb::GradedCheck { .. } => "graded-check",
            Verb::GradedDeform { .. } => "graded-deform",
            Verb::Connectionlike { .. } => "connectionlike",
            Verb::AffSuite { .. } => "aff-suite",
            Verb::Geodesic { .. } => "geodesic",
            Verb::Radiant { .. } => "radiant",
            Verb::Proptest { .. } => "proptest",
            Verb::Fixtures { .. } => "fixtures",
        }
    }
}

fn emit(text: &str, output: &Option<PathBuf>) -> Result<(), String> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(b) = cli.budget {
        std::env::set_var(kvcohom::complex::BUDGET_ENV, b.to_string());
    }
    let mut inputs = Inputs::default();
    let code = match verbs::run(&cli.verb, &mut inputs) {
        Ok(verbs::Output::Raw(text)) => emit(&text, &cli.output).map(|_| 0).unwrap_or_else(|e| {
            eprintln!("error: {e}");
            2
        }),
        Ok(verbs::Output::Report { verdict, results }) => {
            let report = Report {
                format_version: FORMAT_VERSION,
                verb: cli.verb.name().to_string(),
                inputs: inputs.digests,
                verdict,
                results,
            };
            match emit(&render(&report), &cli.output) {
                Ok(()) if verdict => 0,
                Ok(()) => 1,
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    };
    std::process::exit(code);
}
