use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use dirichlet_lab::report::{report_summary, VerificationReport};
use dirichlet_lab_cli::{run, ExperimentConfig, ExperimentKind};

/// First Dirichlet eigenvalues on curved plane domains: experiments and
/// verification suites.
///
/// Exit status is 0 when every check passes, 1 when some check fails and
/// 2 on errors.
#[derive(Parser)]
#[command(name = "dirichlet-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model-space balls: eigenvalue, volume and radial eigenfunction.
    Model {
        #[command(flatten)]
        common: Common,
        /// Dimension.
        #[arg(long)]
        n: Option<String>,
        /// Curvature parameter; sectional curvature is −kappa².
        #[arg(long)]
        kappa: Option<String>,
        /// Geodesic radius.
        #[arg(long)]
        r: Option<String>,
    },
    /// First eigenpair of a domain with boundary flux.
    Eigen {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        domain: Domain,
    },
    /// Distribution function, rearrangement and comparison inequalities.
    Rearrange {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        domain: Domain,
        /// Number of levels for the distribution function.
        #[arg(long)]
        levels: Option<String>,
    },
    /// Evolve a domain outward and track the eigenvalue.
    Flow {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        domain: Domain,
        /// `unit` or `curvature`.
        #[arg(long)]
        law: Option<String>,
        #[arg(long)]
        dt: Option<String>,
        #[arg(long)]
        steps: Option<String>,
    },
    /// Eigenvalue ratios under conformal maps.
    Schwarz {
        #[command(flatten)]
        common: Common,
        /// Target surface.
        #[arg(long)]
        surface: Option<String>,
        /// Polynomial coefficients a1,a2,... with `re` or `re:im` entries.
        #[arg(long)]
        map: Option<String>,
        /// Radii as `start:end:count` or a comma list.
        #[arg(long)]
        t_grid: Option<String>,
        /// Higher-dimensional map: `dilation:<c>` or `inversion:<scale>:<pole>`.
        #[arg(long)]
        mobius: Option<String>,
        #[arg(long)]
        mobius_n: Option<String>,
        /// `corrected` or `stated`.
        #[arg(long)]
        hypothesis: Option<String>,
    },
    /// Run the verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// `all`, `model`, `eigen`, `rearrange`, `flow` or `schwarz`.
        #[arg(long)]
        suite: Option<String>,
        /// Random convex domains in the eigen suite.
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        steps: Option<String>,
    },
    /// Summarise an existing report.jsonl.
    Report { path: PathBuf },
}

#[derive(Args)]
struct Common {
    /// `key = value` file applied before command-line flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Mesh size.
    #[arg(long)]
    h: Option<String>,
    /// Relative tolerance for inequality checks.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    eigen_tol: Option<String>,
    /// Treat domains as small enough for the model isoperimetric inequality.
    #[arg(long)]
    assume_small: bool,
}

#[derive(Args)]
struct Domain {
    /// square, disk, ellipse, hexagon, geodesic-disk, random or a curve CSV.
    #[arg(long)]
    shape: Option<String>,
    /// euclidean, poincare or poincare:<kappa>.
    #[arg(long)]
    surface: Option<String>,
    /// Geodesic radius for `geodesic-disk`.
    #[arg(long)]
    r: Option<String>,
}

fn build(kind: ExperimentKind, common: &Common, flags: Vec<(&str, &Option<String>)>) -> dirichlet_lab::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(kind);
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    let shared = [("out", &common.out), ("seed", &common.seed), ("h", &common.h), ("tol", &common.tol), ("eigen_tol", &common.eigen_tol)];
    for (key, value) in shared.into_iter().chain(flags) {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if common.assume_small {
        cfg.assume_small = true;
    }
    Ok(cfg)
}

fn domain_flags(d: &Domain) -> Vec<(&'static str, &Option<String>)> {
    vec![("shape", &d.shape), ("surface", &d.surface), ("r", &d.r)]
}

fn config_for(command: &Command) -> dirichlet_lab::Result<ExperimentConfig> {
    match command {
        Command::Model { common, n, kappa, r } => build(ExperimentKind::Model, common, vec![("n", n), ("kappa", kappa), ("r", r)]),
        Command::Eigen { common, domain } => build(ExperimentKind::Eigen, common, domain_flags(domain)),
        Command::Rearrange { common, domain, levels } => {
            let mut f = domain_flags(domain);
            f.push(("levels", levels));
            build(ExperimentKind::Rearrange, common, f)
        }
        Command::Flow { common, domain, law, dt, steps } => {
            let mut f = domain_flags(domain);
            f.extend([("law", law), ("dt", dt), ("steps", steps)]);
            build(ExperimentKind::Flow, common, f)
        }
        Command::Schwarz { common, surface, map, t_grid, mobius, mobius_n, hypothesis } => build(
            ExperimentKind::Schwarz,
            common,
            vec![("surface", surface), ("map", map), ("t_grid", t_grid), ("mobius", mobius), ("mobius_n", mobius_n), ("hypothesis", hypothesis)],
        ),
        Command::Verify { common, suite, samples, steps } => {
            build(ExperimentKind::Verify, common, vec![("suite", suite), ("samples", samples), ("steps", steps)])
        }
        Command::Report { .. } => unreachable!("report takes no configuration"),
    }
}

fn summarise(path: &PathBuf) -> Result<ExitCode, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let report = VerificationReport::read_jsonl(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))?;
    print!("{}", report_summary(&report));
    Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn execute(command: &Command) -> Result<ExitCode, String> {
    if let Command::Report { path } = command {
        return summarise(path);
    }
    let cfg = config_for(command).map_err(|e| e.to_string())?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let report = run(&cfg).map_err(|e| e.to_string())?;

    fs::create_dir_all(&cfg.out).map_err(|e| format!("{}: {e}", cfg.out.display()))?;
    let path = cfg.out.join("report.jsonl");
    let file = File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    report.write_jsonl(BufWriter::new(file)).map_err(|e| format!("{}: {e}", path.display()))?;
    // timing lives apart from the report so reports stay byte-for-byte reproducible
    let meta = format!(
        "command: {}\nstarted_unix_s: {started}\nelapsed_s: {:.3}\n",
        std::env::args().collect::<Vec<_>>().join(" "),
        clock.elapsed().as_secs_f64()
    );
    fs::write(cfg.out.join("metadata.txt"), meta).map_err(|e| format!("metadata.txt: {e}"))?;

    print!("{}", report_summary(&report));
    Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(code) => {
            let _ = std::io::stdout().flush();
            code
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
