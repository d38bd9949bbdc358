use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use supdelta::harness::{self, ExperimentConfig};
use supdelta::limits::DEFAULT_TIE_TOLERANCE;
use supdelta::reference;
use supdelta::{
    difference_quotient, directional_derivative, full_differentiability_witness, Error,
    FunctionalKind, GridDomain, GridFunction, Result,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_SELFTEST: u8 = 4;

#[derive(Parser)]
#[command(version, about = "Limit laws of supremum-type statistics via directional derivatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory for the report and replicate files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Directional derivative of a functional at `f` in direction `g`.
    /// Both CSV files hold `x,value[,left]` rows on the same nodes.
    Derivative {
        #[arg(long)]
        kind: FunctionalKind,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TIE_TOLERANCE)]
        eps: f64,
        /// Also print the difference quotient at this step.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Print a named reference constant as JSON.
    Oracle {
        /// One of the known names; `list` prints them.
        name: String,
    },
    /// Run the internal consistency checks.
    Selftest {
        #[arg(long, default_value_t = 20240229)]
        seed: u64,
    },
}

/// Nodes, values and optional left limits.
type Columns = (Vec<f64>, Vec<f64>, Option<Vec<f64>>);

/// Reads `x,value[,left]` rows; a non-numeric first row is a header.
fn read_grid_function(path: &Path) -> Result<Columns> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let (mut xs, mut vs, mut ls) = (Vec::new(), Vec::new(), Vec::new());
    let mut width = None;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse).collect();
        let row = match parsed {
            Ok(r) => r,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::InvalidInput(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    i + 1
                )))
            }
        };
        if !(row.len() == 2 || row.len() == 3) || width.is_some_and(|w| w != row.len()) {
            return Err(Error::InvalidInput(format!(
                "{}: expected 2 or 3 columns consistently",
                path.display()
            )));
        }
        width = Some(row.len());
        xs.push(row[0]);
        vs.push(row[1]);
        if row.len() == 3 {
            ls.push(row[2]);
        }
    }
    let left = (width == Some(3)).then_some(ls);
    Ok((xs, vs, left))
}

fn build(domain: &Arc<GridDomain>, values: Vec<f64>, left: Option<Vec<f64>>) -> Result<GridFunction> {
    match left {
        Some(l) => GridFunction::cadlag(Arc::clone(domain), values, l),
        None => GridFunction::new(Arc::clone(domain), values),
    }
}

fn derivative(
    kind: FunctionalKind,
    f: &Path,
    g: &Path,
    eps: f64,
    t: Option<f64>,
) -> Result<serde_json::Value> {
    let (xf, vf, lf) = read_grid_function(f)?;
    let (xg, vg, lg) = read_grid_function(g)?;
    if xf != xg {
        return Err(Error::GridMismatch("f and g are given on different nodes".into()));
    }
    let domain = Arc::new(GridDomain::line(xf)?);
    let (mut f, mut g) = (build(&domain, vf, lf)?, build(&domain, vg, lg)?);
    if f.is_cadlag() != g.is_cadlag() {
        f = f.to_cadlag()?;
        g = g.to_cadlag()?;
    }
    let value = directional_derivative(kind, &f, &g, eps)?;
    let linear = full_differentiability_witness(kind, &f, eps)?.is_some();
    let mut out = serde_json::json!({
        "kind": kind,
        "eps": eps,
        "derivative": value,
        "fully_differentiable": linear,
    });
    if let Some(t) = t {
        out["difference_quotient"] = difference_quotient(kind, &f, &g, t)?.into();
        out["t"] = t.into();
    }
    Ok(out)
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Oracle { .. } => ExitCode::from(EXIT_ORACLE),
        e if e.is_validation() => ExitCode::from(EXIT_VALIDATION),
        _ => ExitCode::FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<ExitCode> = match cli.command {
        Command::Run { config, out } => (|| {
            let text = fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let output = harness::run(&cfg)?;
            harness::write_outputs(&output, &out)?;
            println!("{}", serde_json::to_string_pretty(&output.report)?);
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Derivative { kind, f, g, eps, t } => derivative(kind, &f, &g, eps, t).map(|v| {
            println!("{v:#}");
            ExitCode::SUCCESS
        }),
        Command::Oracle { name } if name == "list" => {
            for n in reference::NAMES {
                println!("{n}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { name } => reference::named(&name).and_then(|r| {
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(ExitCode::SUCCESS)
        }),
        Command::Selftest { seed } => {
            let checks = harness::selftest(seed);
            for c in &checks {
                let tag = if c.passed { "ok  " } else { "FAIL" };
                println!("{tag} {:<36} {}", c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_SELFTEST)
            })
        }
    };
    result.unwrap_or_else(|e| exit_for(&e))
}
