//! Command-line front end: argument parsing, dispatch and report output.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
//! 3 numeric degeneracy.

mod commands;
mod report;
mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    default_evolve_options, parse_vars, run_degrees, run_dof, run_evolve, run_gauss, run_legendre, run_quantize,
    run_tensors, DegreesConfig, EvolveConfig, GaussConfig, LatticeConfig, LegendreConfig, QuantizeConfig, TensorsConfig,
    Which,
};
pub use report::{Check, Report, Status};
pub use verify::{bracket_axioms, run_verify, Fault, VerifyConfig};

use crate::canonical::lattice::{Boundary, FrontOptions, KickSpec, Scheme};
use crate::quantum::CoefficientMode;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Kick,
    Flat,
}

#[derive(Debug, Parser)]
#[command(name = "gravham", version, about = "Canonical metric gravity: identity checks, analyzers, lattice and quantum labs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Override the check tolerance.
    #[arg(long, value_parser = positive)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[arg(long, value_enum, default_value_t = PresetArg::Kick)]
    pub preset: PresetArg,
    /// JSON lattice description (overrides --preset).
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub spacing: f64,
    #[arg(long, default_value = "periodic")]
    pub boundary: String,
    /// Kicked momentum component, e.g. 11 or 23.
    #[arg(long, default_value = "11")]
    pub component: String,
    #[arg(long, default_value_t = 0.01)]
    pub amplitude: f64,
    /// Gaussian width in sites; 0 kicks a single site.
    #[arg(long, default_value_t = 0.0)]
    pub width: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.002)]
    pub dt: f64,
    #[arg(long, default_value = "yoshida4")]
    pub scheme: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suites (I·E, B, e/E, Lagrangian, Legendre, brackets).
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Corrupt B on purpose to see the suite fail.
        #[arg(long, value_enum, hide = true)]
        fault: Option<Fault>,
    },
    /// Build one tensor and export it as CSV.
    Tensors {
        #[command(flatten)]
        common: Common,
        /// JSON metric {"d": .., "g": [[..]]}; Minkowski when absent.
        #[arg(long)]
        metric: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Which::CheckIe)]
        which: Which,
    },
    /// Legendre round-trip between velocities and momenta.
    Legendre {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Evolve a 1+1D lattice and report conservation and front diagnostics.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Also run backwards and report the time-reversal closure.
        #[arg(long)]
        reverse: bool,
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
        #[arg(long, default_value_t = 5)]
        window: usize,
    },
    /// Discrete Gauss law for the energy flux along a lattice run.
    Gauss {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        lattice: LatticeArgs,
    },
    /// Number of field degrees of freedom.
    Dof {
        #[command(flatten)]
        common: Common,
    },
    /// Polynomial-degree report of the Hamiltonian's potential terms.
    Degrees {
        #[command(flatten)]
        common: Common,
        /// Also fit the weak-field scaling exponent of H_c.
        #[arg(long)]
        weak: bool,
    },
    /// Solve the truncated Schrödinger equation on a grid of metric components.
    Quantize {
        #[command(flatten)]
        common: Common,
        /// Retained components, e.g. g11 or g11,g22.
        #[arg(long, default_value = "g11")]
        vars: String,
        /// lo:hi for diagonal components (off-diagonal axes get a centred range of the same width).
        #[arg(long, default_value = "0.2:1.8")]
        range: String,
        /// Points per axis.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1.28e-5)]
        dtau: f64,
        #[arg(long, default_value_t = 0.08)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Frozen)]
        mode: ModeArg,
        #[arg(long)]
        metric: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Frozen,
    GridLocal,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s} is not a positive number")),
    }
}

fn config_error(command: &str, msg: String) -> Report {
    let mut r = Report::new(command, 0, 0);
    r.push(Check::error("arguments", &crate::GravError::ConfigInvalid(msg)));
    r
}

impl LatticeArgs {
    fn to_config(&self, d: usize) -> Result<(LatticeConfig, Scheme), String> {
        let boundary = match self.boundary.as_str() {
            "periodic" => Boundary::Periodic,
            "fixed" => Boundary::Fixed,
            b => return Err(format!("unknown boundary {b:?}")),
        };
        let scheme = match self.scheme.as_str() {
            "leapfrog" => Scheme::Leapfrog,
            "yoshida4" => Scheme::Yoshida4,
            s => return Err(format!("unknown scheme {s:?}")),
        };
        let comp = parse_vars(&self.component).map_err(|e| e.to_string())?;
        let [component] = comp.as_slice() else {
            return Err("--component takes one index pair".into());
        };
        let kick = KickSpec { center: None, component: *component, amplitude: self.amplitude, width: self.width };
        let cfg = LatticeConfig {
            d,
            n: self.n,
            spacing: self.spacing,
            boundary,
            lattice: self.lattice.clone(),
            flat: self.preset == PresetArg::Flat,
            kick,
        };
        Ok((cfg, scheme))
    }
}

/// Runs a parsed command line and returns its report.
pub fn dispatch(cli: &Cli) -> Report {
    let out = cli.out.clone();
    match &cli.command {
        Command::Verify { common, samples, fault } => run_verify(&VerifyConfig {
            d: common.d,
            seed: common.seed,
            samples: *samples,
            tol: common.tol,
            fault: *fault,
        }),
        Command::Tensors { common, metric, which } => {
            run_tensors(&TensorsConfig { d: common.d, metric: metric.clone(), which: *which, tol: common.tol, out })
        }
        Command::Legendre { common, samples } => {
            run_legendre(&LegendreConfig { d: common.d, seed: common.seed, samples: *samples, tol: common.tol })
        }
        Command::Evolve { common, lattice, reverse, threshold, window } => match lattice.to_config(common.d) {
            Ok((lat, scheme)) => run_evolve(&EvolveConfig {
                lattice: lat,
                options: default_evolve_options(lattice.steps, lattice.dt, scheme),
                reverse: *reverse,
                tol: common.tol,
                front: FrontOptions { threshold: *threshold, window: *window },
                out,
            }),
            Err(msg) => config_error("evolve", msg),
        },
        Command::Gauss { common, lattice } => match lattice.to_config(common.d) {
            Ok((lat, scheme)) => run_gauss(&GaussConfig {
                lattice: lat,
                options: default_evolve_options(lattice.steps, lattice.dt, scheme),
                tol: common.tol,
            }),
            Err(msg) => config_error("gauss", msg),
        },
        Command::Dof { common } => run_dof(common.d),
        Command::Degrees { common, weak } => run_degrees(&DegreesConfig { d: common.d, seed: common.seed, weak: *weak }),
        Command::Quantize { common, vars, range, n, steps, dtau, sigma, k, hbar, mode, metric } => {
            let parsed = parse_vars(vars).map_err(|e| e.to_string()).and_then(|v| {
                let (lo, hi) = range.split_once(':').ok_or_else(|| format!("range {range:?} is not lo:hi"))?;
                let lo: f64 = lo.trim().parse().map_err(|_| format!("bad range start {lo:?}"))?;
                let hi: f64 = hi.trim().parse().map_err(|_| format!("bad range end {hi:?}"))?;
                Ok((v, (lo, hi)))
            });
            match parsed {
                Ok((vars, range)) => run_quantize(&QuantizeConfig {
                    vars,
                    range,
                    n: *n,
                    steps: *steps,
                    dtau: *dtau,
                    sigma: *sigma,
                    k: *k,
                    hbar: *hbar,
                    mode: match mode {
                        ModeArg::Frozen => CoefficientMode::Frozen,
                        ModeArg::GridLocal => CoefficientMode::GridLocal,
                    },
                    metric: metric.clone(),
                    d: common.d,
                    tol: common.tol,
                    out,
                }),
                Err(msg) => config_error("quantize", msg),
            }
        }
    }
}

/// Parses `args`, honours GRAVHAM_THREADS, prints the report and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = std::env::var("GRAVHAM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let report = dispatch(&cli);
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    report.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("gravham").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn every_subcommand_parses() {
        for args in [
            &["verify", "--d", "3", "--seed", "1"][..],
            &["tensors", "--which", "BS1"],
            &["tensors", "--which", "e"],
            &["legendre", "--samples", "5"],
            &["evolve", "--preset", "kick", "--steps", "10", "--reverse"],
            &["gauss", "--boundary", "fixed", "--steps", "5"],
            &["dof", "--d", "5"],
            &["degrees", "--weak"],
            &["quantize", "--vars", "g11,g22", "--range", "0.5:1.5", "--mode", "grid-local"],
            &["--format", "json", "dof"],
        ] {
            parse(args);
        }
        assert!(Cli::try_parse_from(["gravham", "verify", "--tol", "-1"]).is_err());
    }

    #[test]
    fn small_commands_report() {
        let r = dispatch(&parse(&["dof", "--d", "4"]));
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.checks[0].measured, Some(2.0));
        let r = dispatch(&parse(&["degrees", "--d", "4"]));
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        assert!(r.lines.iter().any(|l| l.contains("10 = 4 + 3 + 3")));
        let r = dispatch(&parse(&["evolve", "--boundary", "sideways"]));
        assert_eq!(r.exit_code(), 2);
        let r = dispatch(&parse(&["tensors", "--d", "2", "--which", "I"]));
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn evolve_and_gauss_commands() {
        let r = dispatch(&parse(&["evolve", "--n", "24", "--steps", "50", "--reverse", "--component", "23", "--amplitude", "0.05", "--width", "2"]));
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        assert!(r.lines.iter().any(|l| l.contains("front")));
        let r = dispatch(&parse(&["gauss", "--n", "24", "--steps", "20", "--component", "23", "--width", "2"]));
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
    }

    #[test]
    fn quantize_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let r = dispatch(&parse(&["--out", out, "quantize", "--vars", "g11", "--steps", "100"]));
        assert_eq!(r.exit_code(), 0, "{}", r.to_text());
        assert!(r.checks.iter().any(|c| c.name == "free-packet width" && c.passed()));
        let meta = std::fs::read_to_string(dir.path().join("meta.json")).unwrap();
        assert!(meta.contains("\"scheme\": \"cayley\""));
        let csv = std::fs::read_to_string(dir.path().join("psi_final.csv")).unwrap();
        assert!(csv.starts_with("g11,re,im"));
    }

    #[test]
    fn reports_are_deterministic() {
        let a = dispatch(&parse(&["verify", "--samples", "5", "--format", "json"])).to_json();
        let b = dispatch(&parse(&["verify", "--samples", "5", "--format", "json"])).to_json();
        assert_eq!(a, b);
    }
}
