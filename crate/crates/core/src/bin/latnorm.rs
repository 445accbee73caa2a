//! Command-line front end for lattice problems in general norms.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Serialize;

use latnorm::bodies::estimate_kissing_variant;
use latnorm::ellipsoid::{build_m_ellipsoid, EllipsoidConfig};
use latnorm::harness::{generate_instance, run_instance, run_suite, validate_report, ExperimentConfig, Instance, InstanceSpec};
use latnorm::reductions::{Mode, ReductionConfig};
use latnorm::rng::stream;
use latnorm::{exact_cvp, exact_svp, Error, NormSpec, Result};

#[derive(Parser)]
#[command(name = "latnorm", version, about = "SVP and CVP approximation in general norms")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances from a spec file.
    Generate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Solve an instance exactly by enumeration.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Solve CVP for the instance target instead of SVP.
        #[arg(long)]
        cvp: bool,
    },
    /// Build and certify an M-ellipsoid of a norm body.
    Ellipsoid {
        #[arg(long)]
        norm: PathBuf,
        /// Ambient dimension; inferred from matrix-valued norms when absent.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        /// Proposals per covering certificate.
        #[arg(long, default_value_t = 100_000)]
        certify_budget: usize,
    },
    /// Run one reduction on an instance.
    Reduce {
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        /// Report path; takes precedence over `--out`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Repetitions (SVP) or sieve budget (CVP), overriding the formula.
        #[arg(long)]
        budget: Option<usize>,
        /// Keep only consecutive answer differences.
        #[arg(long)]
        low_memory: bool,
    },
    /// Run an experiment suite and write JSON and CSV reports.
    Suite {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Greedy lower bound for the kissing-number variant of a body.
    Kissing {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => print_stdout(&text)?,
    }
    Ok(())
}

/// Prints to stdout; a closed pipe downstream is not an error.
fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Dimension of a norm spec, from `--dim` or its matrices.
fn norm_dim(spec: &NormSpec, dim: Option<usize>) -> Result<usize> {
    if let Some(d) = dim {
        return Ok(d);
    }
    match spec {
        NormSpec::Ellipsoid { a } => Ok(a.len()),
        NormSpec::Image { t, .. } => Ok(t.len()),
        NormSpec::Polytope { facets, .. } if !facets.is_empty() => Ok(facets[0].len()),
        _ => Err(Error::validation("--dim is required for this norm")),
    }
}

#[derive(Serialize)]
struct GeneratedSet {
    spec: InstanceSpec,
    instances: Vec<Instance>,
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(Error::validation("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Failure(e.to_string()))?;
    }
    let out = g.out.as_deref();
    match cli.command {
        Command::Generate { spec } => {
            let spec: InstanceSpec = parse(&spec)?;
            let instances = (0..spec.count)
                .map(|k| generate_instance(&spec, Some(format!("n{}-{k}", spec.n)), &mut stream(g.seed, &[k as u64])))
                .collect::<Result<Vec<_>>>()?;
            if instances.len() == 1 {
                emit(&instances[0], out)
            } else {
                emit(&GeneratedSet { spec, instances }, out)
            }
        }
        Command::Oracle { instance, cvp } => {
            let inst = Instance::from_json(&read(&instance)?)?;
            let basis = inst.lattice()?;
            let body = inst.body()?;
            let result = if cvp {
                let t = inst
                    .target_values()?
                    .ok_or_else(|| Error::validation("instance has no target"))?;
                let t: Vec<f64> = t.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
                exact_cvp(&basis, &t, &body)?
            } else {
                exact_svp(&basis, &body)?
            };
            emit(&result, out)
        }
        Command::Ellipsoid {
            norm,
            dim,
            epsilon,
            certify_budget,
        } => {
            let spec: NormSpec = parse(&norm)?;
            let body = spec.build(norm_dim(&spec, dim)?)?;
            let config = EllipsoidConfig {
                certify_budget: Some(certify_budget),
                ..Default::default()
            };
            let result = build_m_ellipsoid(&body, epsilon, &config, &mut stream(g.seed, &[]))?;
            emit(&result, out)
        }
        Command::Reduce {
            mode,
            instance,
            epsilon,
            report,
            budget,
            low_memory,
        } => {
            let inst = Instance::from_json(&read(&instance)?)?;
            let config = ReductionConfig {
                epsilon,
                repetition_budget: budget,
                seed: g.seed,
                low_memory,
                ..Default::default()
            };
            config.validate()?;
            let result = run_instance(&inst, mode, &config)?;
            emit(&result, report.as_deref().or(out))
        }
        Command::Suite { preset, config } => {
            let config = match (preset, config) {
                (Some(name), _) => ExperimentConfig::preset(&name)?,
                (None, Some(path)) => parse(&path)?,
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let report = run_suite(&config)?;
            validate_report(&serde_json::to_value(&report)?)?;
            match out {
                Some(p) => report.write(p),
                None => print_stdout(&report.to_json()?),
            }
        }
        Command::Kissing {
            norm,
            dim,
            gamma,
            budget,
        } => {
            let spec: NormSpec = parse(&norm)?;
            let body = spec.build::<f64>(norm_dim(&spec, dim)?)?;
            let estimate = estimate_kissing_variant(&body, gamma, budget, &mut stream(g.seed, &[]))?;
            emit(&estimate, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
