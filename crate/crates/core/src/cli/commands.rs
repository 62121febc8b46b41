//! Subcommands other than `verify`. Each takes a plain config struct and
//! returns a [`Report`]; files go to `out` when it is set.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::report::{Check, Report};
use crate::canonical::lattice::{
    front_diagnostics, gauss_from_flux, hamilton_evolve, Boundary, EvolveOptions, FrontOptions, KickSpec, LatticeField,
    Scheme,
};
use crate::canonical::{dof_count, hamiltonian_hc, momentum_from_velocity, velocity_from_momentum, FieldPoint};
use crate::error::{GravError, Result};
use crate::grav::{check_ie_inverse, spatial_block, tensor_b, tensor_b_dsym, tensor_b_sym, tensor_big_e, tensor_e, tensor_i};
use crate::nonlinear::{classify_S_terms, log_schedule, weak_field_expand, NonPoly, WeakFieldDirection};
use crate::quantum::{
    build_hamiltonian_operator, evolve_schrodinger, free_coefficient, gaussian_width_law, quantum_bracket_check, Axis,
    CoefficientMode, ConfigGrid, SchrodingerOptions, WaveFunction,
};
use crate::sampling::random_field_point;
use crate::tensor::MetricState;

fn artifact(report: &mut Report, out: Option<&Path>, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        write(&path)?;
        report.artifacts.push(path.display().to_string());
    }
    Ok(())
}

fn load_metric(path: Option<&Path>, d: usize) -> Result<MetricState> {
    match path {
        Some(p) => MetricState::load_json(p),
        None if d >= 2 => Ok(MetricState::minkowski(d)),
        None => Err(GravError::DimensionTooSmall { d, min: 2 }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    #[value(name = "I")]
    I,
    #[value(name = "B")]
    B,
    #[value(name = "BS")]
    Bs,
    #[value(name = "BS1")]
    Bs1,
    #[value(name = "e")]
    SmallE,
    #[value(name = "E")]
    BigE,
    #[value(name = "check-IE")]
    CheckIe,
}

#[derive(Clone, Debug)]
pub struct TensorsConfig {
    pub d: usize,
    pub metric: Option<PathBuf>,
    pub which: Which,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn run_tensors(cfg: &TensorsConfig) -> Report {
    let mut r = Report::new("tensors", 0, cfg.d);
    let res = (|| -> Result<()> {
        let m = load_metric(cfg.metric.as_deref(), cfg.d)?;
        r.d = m.dim();
        let (name, t) = match cfg.which {
            Which::I => ("I", tensor_i(&m)?.tensor().clone()),
            Which::B => ("B", tensor_b(&m)),
            Which::Bs => ("BS", tensor_b_sym(&m)),
            Which::Bs1 => ("BS1", tensor_b_dsym(&m)),
            Which::SmallE => ("e", tensor_e(&m)?),
            Which::BigE => ("E", spatial_block(&tensor_big_e(&m)?)),
            Which::CheckIe => {
                let res = check_ie_inverse(&m)?;
                r.push(Check::at_most("I·E identity", res, cfg.tol.unwrap_or(1e-10), "max |I E − δδ|"));
                return Ok(());
            }
        };
        r.line(format!("{name}: rank {}, dimension {}, max |entry| {:.6e}", t.rank(), t.dim(), t.max_abs()));
        if matches!(cfg.which, Which::I | Which::BigE) {
            r.line("spatial block, axis j is index j+1".to_string());
        }
        artifact(&mut r, cfg.out.as_deref(), &format!("tensor_{name}.csv"), |p| Ok(fs::write(p, t.to_csv())?))?;
        Ok(())
    })();
    if let Err(e) = res {
        r.push(Check::error("tensors", &e));
    }
    r
}

#[derive(Clone, Debug)]
pub struct LegendreConfig {
    pub d: usize,
    pub seed: u64,
    pub samples: usize,
    pub tol: Option<f64>,
}

pub fn run_legendre(cfg: &LegendreConfig) -> Report {
    let mut r = Report::new("legendre", cfg.seed, cfg.d);
    let d = cfg.d;
    r.run("Legendre round-trip", || {
        if d < 3 {
            return Err(GravError::DimensionTooSmall { d, min: 3 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut w: f64 = 0.0;
        for _ in 0..cfg.samples {
            let p = random_field_point(d, &mut rng);
            let mut q = p.clone();
            q.set_momentum_tensor(momentum_from_velocity(&p));
            let v = velocity_from_momentum(&q)?;
            for a in 1..d {
                for b in 1..d {
                    let want = p.velocity(a, b);
                    w = w.max((v.get(&[a, b]) - want).abs() / want.abs().max(1.0));
                }
            }
        }
        Ok(Check::at_most("Legendre round-trip", w, cfg.tol.unwrap_or(1e-8), format!("{} points", cfg.samples)))
    });
    r.run("flat worked case", || {
        let mut p = FieldPoint::flat(d);
        p.set_velocity(1, 1, 1.0);
        let pi = momentum_from_velocity(&p);
        let diag: Vec<String> = (1..d).map(|a| format!("{}", pi.get(&[a, a]))).collect();
        let mut worst: f64 = 0.0;
        for a in 0..d {
            for b in 0..d {
                let want = if a == b && a >= 2 { -0.5 } else { 0.0 };
                worst = worst.max((pi.get(&[a, b]) - want).abs());
            }
        }
        let mut q = FieldPoint::flat(d);
        q.set_momentum_tensor(pi);
        let v = velocity_from_momentum(&q)?;
        worst = worst.max((v.get(&[1, 1]) - 1.0).abs());
        Ok(Check::at_most("flat worked case", worst, 1e-15, format!("g_11,0 = 1 ↔ spatial π = diag({})", diag.join(", "))))
    });
    r
}

#[derive(Clone, Debug)]
pub struct LatticeConfig {
    pub d: usize,
    pub n: usize,
    pub spacing: f64,
    pub boundary: Boundary,
    /// Explicit lattice description; overrides the preset.
    pub lattice: Option<PathBuf>,
    pub flat: bool,
    pub kick: KickSpec,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            d: 4,
            n: 64,
            spacing: 0.1,
            boundary: Boundary::Periodic,
            lattice: None,
            flat: false,
            kick: KickSpec::default(),
        }
    }
}

impl LatticeConfig {
    pub fn build(&self) -> Result<LatticeField> {
        if let Some(p) = &self.lattice {
            return LatticeField::load_json(p);
        }
        if self.flat {
            LatticeField::flat(self.d, self.n, self.spacing, self.boundary)
        } else {
            LatticeField::kick(self.d, self.n, self.spacing, self.boundary, &self.kick)
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolveConfig {
    pub lattice: LatticeConfig,
    pub options: EvolveOptions,
    pub reverse: bool,
    pub tol: Option<f64>,
    pub front: FrontOptions,
    pub out: Option<PathBuf>,
}

pub fn run_evolve(cfg: &EvolveConfig) -> Report {
    let mut r = Report::new("evolve", 0, cfg.lattice.d);
    let tol = cfg.tol.unwrap_or(1e-6);
    let res = (|| -> Result<()> {
        let lat = cfg.lattice.build()?;
        r.d = lat.dim();
        r.line(format!(
            "{} sites, Δx = {}, dt = {}, {} steps, {:?}",
            lat.len(),
            lat.spacing(),
            cfg.options.dt,
            cfg.options.steps,
            cfg.options.scheme
        ));
        let traj = hamilton_evolve(&lat, &cfg.options)?;
        r.line(format!("H(0) = {:.12e}", traj.initial_energy()));
        r.push(Check::at_most("energy drift", traj.max_relative_drift(), tol, "max |H(t) − H(0)| / |H(0)|"));
        artifact(&mut r, cfg.out.as_deref(), "trajectory.csv", |p| Ok(traj.write_csv(BufWriter::new(File::create(p)?))?))?;
        if cfg.reverse {
            let mut mid = traj.frame_lattice(traj.last_frame())?;
            mid.reverse_momenta();
            let back = hamilton_evolve(&mid, &cfg.options)?;
            let mut end = back.frame_lattice(back.last_frame())?;
            end.reverse_momenta();
            r.push(Check::at_most("time reversal", end.max_state_diff(&lat), tol, "max state difference"));
        }
        match front_diagnostics(&traj, &cfg.front) {
            Ok(samples) => {
                for s in &samples {
                    r.line(format!(
                        "t = {:.4}: front {:.4}, fraction {:.4}, behind variance {:.3e}",
                        s.time, s.front_position, s.front_energy_fraction, s.behind_front_variance
                    ));
                }
                artifact(&mut r, cfg.out.as_deref(), "front.csv", |p| {
                    let mut text = String::from("step,time,front_position,front_energy_fraction,behind_front_variance\n");
                    for s in &samples {
                        text.push_str(&format!(
                            "{},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                            s.step, s.time, s.front_position, s.front_energy_fraction, s.behind_front_variance
                        ));
                    }
                    Ok(fs::write(p, text)?)
                })?;
            }
            Err(GravError::NoFront) => r.line("no front: energy density below threshold everywhere"),
            Err(e) => return Err(e),
        }
        Ok(())
    })();
    if let Err(e) = res {
        r.push(Check::error("evolve", &e));
    }
    r
}

#[derive(Clone, Debug)]
pub struct GaussConfig {
    pub lattice: LatticeConfig,
    pub options: EvolveOptions,
    pub tol: Option<f64>,
}

/// Checks the discrete Gauss law on every recorded frame of a short run.
pub fn run_gauss(cfg: &GaussConfig) -> Report {
    let mut r = Report::new("gauss", 0, cfg.lattice.d);
    r.run("Gauss identity", || {
        let lat = cfg.lattice.build()?;
        let traj = hamilton_evolve(&lat, &cfg.options)?;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for f in &traj.frames {
            let g = gauss_from_flux(&f.flux, traj.spacing, traj.boundary);
            worst = worst.max(g.residual());
            scale = scale.max(f.flux.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
        }
        Ok(Check::at_most(
            "Gauss identity",
            worst,
            cfg.tol.unwrap_or(1e-12),
            format!("{} frames, {:?} boundary, max |G| {scale:.3e}", traj.frames.len(), traj.boundary),
        ))
    });
    r
}

pub fn run_dof(d: usize) -> Report {
    let mut r = Report::new("dof", 0, d);
    r.run("f = d(d−3)/2", || {
        let f = dof_count(d)?;
        let want = d * (d + 1) / 2 - 2 * d;
        let note = match d {
            4 => "two degrees of freedom in four dimensions",
            3 => "no local degrees of freedom in three dimensions",
            _ => "",
        };
        Ok(Check::holds(format!("f({d}) = {f}"), f == want && f * 2 == d * (d - 3), Some(f as f64), note))
    });
    r
}

#[derive(Clone, Debug)]
pub struct DegreesConfig {
    pub d: usize,
    pub seed: u64,
    pub weak: bool,
}

pub fn run_degrees(cfg: &DegreesConfig) -> Report {
    let d = cfg.d;
    let mut r = Report::new("degrees", cfg.seed, d);
    match classify_S_terms(d) {
        Ok(rep) => {
            for l in rep.to_text().lines() {
                r.line(l.to_string());
            }
            let want = format!("{} = {} + 3 + 3", d + 6, d);
            r.push(Check::holds(
                format!("term-2 degree {want}"),
                rep.degree_line.contains(&want),
                Some(rep.term(2).metric_degree as f64),
                rep.degree_line.clone(),
            ));
            r.push(Check::holds(
                "terms 1 and 3 carry sqrt(-g)",
                rep.term(1).has_flag(NonPoly::SqrtNegDet) && rep.term(3).has_flag(NonPoly::SqrtNegDet),
                None,
                "non-polynomial in g_αβ",
            ));
            r.push(Check::holds("not all-quadratic", !rep.all_quadratic, None, rep.conclusion.clone()));
        }
        Err(e) => r.push(Check::error("degree report", &e)),
    }
    if cfg.weak {
        r.run("weak-field exponent", || {
            let dir = WeakFieldDirection::random(d, false, &mut ChaCha8Rng::seed_from_u64(cfg.seed));
            let fit = weak_field_expand(hamiltonian_hc, &dir, &log_schedule(1e-1, 1e-3, 12))?;
            Ok(Check::at_most(
                "weak-field exponent",
                (fit.exponent - 3.0).abs(),
                0.2,
                format!("exponent {:.4}, quadratic coefficient {:.4e}", fit.exponent, fit.coefficients[0]),
            ))
        });
    }
    r
}

#[derive(Clone, Debug)]
pub struct QuantizeConfig {
    pub vars: Vec<(usize, usize)>,
    pub range: (f64, f64),
    /// Points per axis; `None` picks 256, 40 or 16 for one, two or more axes.
    pub n: Option<usize>,
    pub steps: usize,
    pub dtau: f64,
    pub sigma: f64,
    pub k: f64,
    pub hbar: f64,
    pub mode: CoefficientMode,
    pub metric: Option<PathBuf>,
    pub d: usize,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Default for QuantizeConfig {
    fn default() -> Self {
        Self {
            vars: vec![(1, 1)],
            range: (0.2, 1.8),
            n: None,
            steps: 100,
            dtau: 1.28e-5,
            sigma: 0.08,
            k: 0.0,
            hbar: 1.0,
            mode: CoefficientMode::Frozen,
            metric: None,
            d: 4,
            tol: None,
            out: None,
        }
    }
}

#[derive(Serialize)]
struct QuantizeMeta<'a> {
    hbar: f64,
    dtau: f64,
    steps: usize,
    scheme: &'a str,
    mode: CoefficientMode,
    axes: &'a [Axis],
    max_step_drift: f64,
    total_drift: f64,
    hermiticity_defect: f64,
    ordering_omitted: bool,
}

/// Parses "g11,g22,g01" into index pairs.
pub fn parse_vars(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|v| {
            let t = v.trim().trim_start_matches('g');
            let digits: Vec<usize> = t.chars().filter_map(|c| c.to_digit(10).map(|x| x as usize)).collect();
            match digits.as_slice() {
                [a, b] if t.len() == 2 => Ok((*a.min(b), *a.max(b))),
                _ => Err(GravError::ConfigInvalid(format!("variable {v:?} is not of the form g<a><b>"))),
            }
        })
        .collect()
}

pub fn run_quantize(cfg: &QuantizeConfig) -> Report {
    let mut r = Report::new("quantize", 0, cfg.d);
    let tol = cfg.tol.unwrap_or(1e-7);
    let res = (|| -> Result<()> {
        let ctx = FieldPoint::new(load_metric(cfg.metric.as_deref(), cfg.d)?);
        r.d = ctx.dim();
        let n = cfg.n.unwrap_or(match cfg.vars.len() {
            1 => 256,
            2 => 40,
            _ => 16,
        });
        let axes: Vec<Axis> = cfg
            .vars
            .iter()
            .map(|&c| {
                let (lo, hi) = if c.0 == c.1 || c.0 == 0 { cfg.range } else { (-0.5 * (cfg.range.1 - cfg.range.0), 0.5 * (cfg.range.1 - cfg.range.0)) };
                Axis::new(c, lo, hi, n)
            })
            .collect();
        let grid = ConfigGrid::new(axes)?.with_hbar(cfg.hbar);
        let h = build_hamiltonian_operator(&grid, &ctx, cfg.mode)?;
        r.line(format!("{} grid points, operator nnz {}, mode {:?}", grid.len(), h.op.nnz(), cfg.mode));
        if h.ordering_omitted {
            r.line("ordering term nonzero at the context and omitted from the operator");
        }
        let center: Vec<f64> = grid.axes().iter().map(|a| 0.5 * (a.lo + a.hi)).collect();
        let sigma = vec![cfg.sigma; grid.axes().len()];
        let kv = vec![cfg.k; grid.axes().len()];
        let psi0 = WaveFunction::gaussian(&grid, &center, &sigma, &kv).normalized(&grid);
        let opts = SchrodingerOptions { dtau: cfg.dtau, steps: cfg.steps, record_every: 0, max_step_drift: f64::INFINITY };
        let rep = evolve_schrodinger(&grid, &psi0, &h.op, &opts)?;
        r.push(Check::at_most("norm drift", rep.total_drift, tol, format!("{} Cayley steps", cfg.steps)));
        r.line(format!("max per-step drift {:.3e}, Hermiticity defect {:.3e}", rep.max_step_drift, h.hermiticity_defect));
        if grid.axes().len() == 1 && h.homogeneous && cfg.mode == CoefficientMode::Frozen && !grid.axes()[0].is_temporal() {
            let c = free_coefficient(&grid, &ctx, 0)?;
            let tau = cfg.steps as f64 * cfg.dtau;
            let (_, width) = rep.final_state().moments(&grid, 0);
            let want = gaussian_width_law(cfg.sigma, c, cfg.hbar, tau);
            r.push(Check::at_most(
                "free-packet width",
                (width / want - 1.0).abs(),
                0.01,
                format!("σ(τ) = {width:.6} vs {want:.6}, c = {c}"),
            ));
        }
        for a in 0..grid.axes().len() {
            let ax = &grid.axes()[a];
            let line = |n| ConfigGrid::new(vec![Axis::new(ax.component, ax.lo, ax.hi, n)]).map(|g| g.with_hbar(cfg.hbar));
            let (r1, r2) = (quantum_bracket_check(&line(64)?)?, quantum_bracket_check(&line(128)?)?);
            let order = (r1 / r2).log2();
            r.push(Check::holds(
                format!("commutator order g{}{}", ax.component.0, ax.component.1),
                order >= 1.8,
                Some(order),
                format!("residual {r1:.2e} → {r2:.2e}"),
            ));
        }
        let out = cfg.out.as_deref();
        artifact(&mut r, out, "psi_initial.csv", |p| Ok(psi0.write_csv(&grid, BufWriter::new(File::create(p)?))?))?;
        artifact(&mut r, out, "psi_final.csv", |p| Ok(rep.final_state().write_csv(&grid, BufWriter::new(File::create(p)?))?))?;
        let meta = QuantizeMeta {
            hbar: cfg.hbar,
            dtau: cfg.dtau,
            steps: cfg.steps,
            scheme: rep.scheme,
            mode: cfg.mode,
            axes: grid.axes(),
            max_step_drift: rep.max_step_drift,
            total_drift: rep.total_drift,
            hermiticity_defect: h.hermiticity_defect,
            ordering_omitted: h.ordering_omitted,
        };
        artifact(&mut r, out, "meta.json", |p| Ok(fs::write(p, serde_json::to_string_pretty(&meta)?)?))?;
        Ok(())
    })();
    if let Err(e) = res {
        r.push(Check::error("quantize", &e));
    }
    r
}

pub fn default_evolve_options(steps: usize, dt: f64, scheme: Scheme) -> EvolveOptions {
    EvolveOptions { dt, steps, scheme, record_every: (steps / 10).max(1), ..Default::default() }
}
