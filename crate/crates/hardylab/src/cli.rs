//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hardylab_core::carleson::{
    compactness_trace, composition_report, criterion_sup, multiplication_report, s2p_boundedness_report,
    S2pBoundednessReport,
};
use hardylab_core::operators::{default_test_family, opnorm_lower_bound, opnorm_matrix_p2, HilbertNorm};
use hardylab_core::{AnalyticFunction, BoundaryGrid, CriterionSpec, NormParams, SelfMap, Space};
use serde_json::json;

use crate::catalog::{catalog, CaseJson};
use crate::formats::{
    pair, samples_csv, to_json, traces_csv, CompactnessReportJson, CriterionReportJson, FunctionJson, FunctionSpecJson,
    OperatorSpecJson, S2pReportJson,
};
use crate::golden::Golden;
use crate::verify::{self, Settings};

/// Sup searches deeper than this are out of scope.
const MAX_LEVELS: usize = 16;

#[derive(Debug, Parser)]
#[command(
    name = "hardylab",
    version,
    about = "Weighted composition operators on S_2^p: norms, Carleson criteria and verification"
)]
pub struct Cli {
    /// Boundary grid size M (power of two).
    #[arg(long, global = true, default_value_t = 4096)]
    samples: usize,
    /// Truncation degree N for series expansions.
    #[arg(long, global = true, default_value_t = 512)]
    degree: usize,
    /// Radial levels of the sup search.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=MAX_LEVELS as i64))]
    levels: u8,
    /// Seed of the random corpus.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Norm of a function in H^p, S^p, S_2^p or the disc algebra.
    Norm {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Function spec: a JSON file or an inline JSON object.
        function: String,
    },
    /// Apply an operator to a function.
    Apply {
        /// Operator spec: a JSON file or an inline JSON object.
        operator: String,
        function: String,
    },
    /// Sup search of the weighted Carleson integral.
    Criterion {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        p: f64,
        /// Defaults to p.
        #[arg(long)]
        q: Option<f64>,
        /// Emit every evaluated center as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Composite boundedness and compactness reports.
    Report {
        #[arg(value_enum)]
        kind: ReportKind,
        #[command(flatten)]
        symbols: SymbolArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Emit the radial traces as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Lower bounds for the operator norm.
    Opnorm {
        #[arg(long, value_enum)]
        method: Method,
        operator: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Space of the test-function method (input and output).
        #[arg(long, value_enum, default_value_t = SpaceArg::S2p)]
        space: SpaceArg,
        /// Largest monomial power of the test family.
        #[arg(long, default_value_t = 16)]
        max_power: usize,
        /// Hilbert norm of the matrix method.
        #[arg(long, value_enum, default_value_t = NormArg::S2)]
        norm: NormArg,
        /// Finite-section size of the matrix method.
        #[arg(long, default_value_t = 32)]
        basis: usize,
    },
    /// Run the verification suite; exits 1 if any check fails.
    Verify {
        /// Compare corpus constants against this baseline.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Print the corpus constants as a golden baseline.
    Baseline,
    /// Print the case catalog.
    Catalog,
}

#[derive(Debug, Args)]
struct SymbolArgs {
    /// Self-map φ (not used by `multiplication`).
    #[arg(long)]
    phi: Option<String>,
    /// Weight ψ (not used by `composition`).
    #[arg(long)]
    psi: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpaceArg {
    Hp,
    Sp,
    S2p,
    /// Disc algebra.
    A,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Hp => Space::Hp,
            SpaceArg::Sp => Space::Sp,
            SpaceArg::S2p => Space::S2p,
            SpaceArg::A => Space::DiscAlgebra,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    S2p,
    Composition,
    Multiplication,
    Compactness,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Testfns,
    Matrix,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormArg {
    H2,
    S2,
}

/// Failure of a `verify` run, as opposed to a usage or precondition error.
#[derive(Debug)]
struct ChecksFailed(usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

/// Runs the CLI and returns the process exit code: 0 on success, 1 when
/// `verify` finds failing checks, 2 on usage or precondition errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<ChecksFailed>() {
                1
            } else {
                2
            }
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let grid = BoundaryGrid::new(cli.samples).context("--samples")?;
    let settings = Settings {
        samples: cli.samples,
        degree: cli.degree,
        levels: cli.levels as usize,
        seed: cli.seed,
    };
    let function = |arg: &str| -> anyhow::Result<AnalyticFunction> {
        let spec: FunctionSpecJson = read_json(arg)?;
        spec.expand(cli.degree)
            .with_context(|| format!("function {}", describe(arg)))
    };
    let self_map = |arg: &str| -> anyhow::Result<SelfMap> {
        SelfMap::new(function(arg)?, &grid).with_context(|| format!("phi {}", describe(arg)))
    };
    let levels = settings.levels;

    let mut failed = 0;
    let output = match &cli.command {
        Command::Norm { space, p, function: f } => {
            let params = NormParams::new((*space).into(), *p)?;
            to_json(&params.norm(&function(f)?, &grid)?)
        }
        Command::Apply { operator, function: f } => {
            let op: OperatorSpecJson = read_json(operator)?;
            let op = op
                .build(cli.degree, &grid)
                .with_context(|| format!("operator {}", describe(operator)))?;
            to_json(&FunctionJson::from(&op.apply(&function(f)?)?))
        }
        Command::Criterion { phi, weight, p, q, csv } => {
            let spec = CriterionSpec::new(self_map(phi)?, function(weight)?, *p, q.unwrap_or(*p))?;
            let report = criterion_sup(&spec, levels, &grid, *csv)?;
            match (&report.samples, csv) {
                (Some(samples), true) => samples_csv(samples),
                _ => to_json(&CriterionReportJson::from(&report)),
            }
        }
        Command::Report { kind, symbols, p, csv } => {
            let phi = || -> anyhow::Result<SelfMap> {
                let Some(arg) = &symbols.phi else {
                    bail!("report {kind:?} requires --phi")
                };
                self_map(arg)
            };
            let psi = || -> anyhow::Result<AnalyticFunction> {
                let Some(arg) = &symbols.psi else {
                    bail!("report {kind:?} requires --psi")
                };
                function(arg)
            };
            if *kind == ReportKind::Compactness {
                let report = compactness_trace(&phi()?, &psi()?, *p, &grid, levels)?;
                if *csv {
                    traces_csv(&report)
                } else {
                    to_json(&CompactnessReportJson::from(&report))
                }
            } else {
                let report = match kind {
                    ReportKind::S2p => s2p_boundedness_report(&phi()?, &psi()?, *p, &grid, levels)?,
                    ReportKind::Composition => composition_report(&phi()?, *p, &grid, levels)?,
                    _ => multiplication_report(&psi()?, *p, &grid, levels)?,
                };
                if *csv {
                    s2p_levels_csv(&report)
                } else {
                    to_json(&S2pReportJson::from(&report))
                }
            }
        }
        Command::Opnorm {
            method,
            operator,
            p,
            space,
            max_power,
            norm,
            basis,
        } => {
            let op: OperatorSpecJson = read_json(operator)?;
            let op = op
                .build(cli.degree, &grid)
                .with_context(|| format!("operator {}", describe(operator)))?;
            match method {
                Method::Testfns => {
                    let params = NormParams::new((*space).into(), *p)?;
                    let family = default_test_family(*p, *max_power, cli.degree)?;
                    let lb = opnorm_lower_bound(&op, params, params, &family, &grid)?;
                    to_json(&json!({ "method": "testfns", "lower_bound": lb.value, "best_member": lb.best_member }))
                }
                Method::Matrix => {
                    let hilbert = match norm {
                        NormArg::H2 => HilbertNorm::H2,
                        NormArg::S2 => HilbertNorm::S2Hilbert,
                    };
                    let value = opnorm_matrix_p2(&op, hilbert, *basis)?;
                    to_json(&json!({ "method": "matrix", "basis": basis, "lower_bound": value }))
                }
            }
        }
        Command::Verify { golden } => {
            let golden = match golden {
                Some(path) => Some(Golden::load(path).with_context(|| format!("golden baseline {}", path.display()))?),
                None => None,
            };
            let report = verify::run(settings, golden.as_ref())?;
            failed = report.summary.failed;
            to_json(&report)
        }
        Command::Baseline => to_json(&Golden::generate(&settings)?),
        Command::Catalog => to_json(&catalog().iter().map(CaseJson::from).collect::<Vec<_>>()),
    };

    emit(cli.out.as_deref(), &output)?;
    if failed > 0 {
        return Err(ChecksFailed(failed).into());
    }
    Ok(())
}

fn s2p_levels_csv(report: &S2pBoundednessReport) -> String {
    let mut out = String::from("weight,eps,kappa,argmax_re,argmax_im\n");
    for (name, r) in [
        ("first_order", &report.first_order),
        ("second_order", &report.second_order),
    ] {
        for l in &r.levels {
            let [re, im] = pair(l.argmax);
            out.push_str(&format!("{name},{},{},{re},{im}\n", l.eps, l.kappa));
        }
    }
    out
}

fn describe(arg: &str) -> String {
    if is_inline(arg) {
        "(inline)".into()
    } else {
        arg.into()
    }
}

fn is_inline(arg: &str) -> bool {
    arg.trim_start().starts_with('{')
}

/// Parses `arg` as inline JSON if it starts with `{`, otherwise reads it as a path.
fn read_json<T: serde::de::DeserializeOwned>(arg: &str) -> anyhow::Result<T> {
    let text = if is_inline(arg) {
        arg.to_owned()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read spec file {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("invalid spec {}", describe(arg)))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
