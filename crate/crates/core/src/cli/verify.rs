//! The identity suite behind `gravham verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::report::{Check, Report};
use crate::canonical::{
    bracket_pi_with_bg, bracket_pi_with_bg_engine, lagrangian_b_form, lagrangian_christoffel, lagrangian_split,
    momentum_from_velocity, poisson_bracket, velocity_from_momentum, CanonicalExpr, FieldPoint, Symbol,
};
use crate::error::{GravError, Result};
use crate::grav::{check_ie_inverse, tensor_b, tensor_b_dsym, tensor_b_sym, tensor_big_e, tensor_big_e_expanded, tensor_e};
use crate::sampling::{random_field_point, random_metric};
use crate::tensor::{DenseTensor, MetricState};

/// Deliberate corruption used to prove that the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum Fault {
    /// Flips the sign of the 2 g^αρ g^βν g^γμ term of B.
    FlipBSign,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub d: usize,
    pub seed: u64,
    pub samples: usize,
    /// Replaces every per-check tolerance when set.
    pub tol: Option<f64>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { d: 4, seed: 7, samples: 50, tol: None, fault: None }
    }
}

/// B as seen by the suite, possibly corrupted.
fn subject_b(m: &MetricState, fault: Option<Fault>) -> DenseTensor {
    let b = tensor_b(m);
    match fault {
        None => b,
        Some(Fault::FlipBSign) => {
            let g = |x: usize, y: usize| m.upper(x, y);
            let mut out = b;
            for idx in out.indices().collect::<Vec<_>>() {
                let [a, bb, c, mu, nu, rho] = [idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]];
                let v = out.get(&idx) - 4.0 * g(a, rho) * g(bb, nu) * g(c, mu);
                out.set(&idx, v);
            }
            out
        }
    }
}

/// Term-by-term B written out independently of the library routine.
fn b_oracle(m: &MetricState, i: &[usize]) -> f64 {
    let g = |x: usize, y: usize| m.upper(i[x], i[y]);
    // slots: α=0 β=1 γ=2 μ=3 ν=4 ρ=5
    let terms = [(1.0, [(0, 1), (2, 5), (3, 4)]), (-1.0, [(0, 3), (1, 4), (2, 5)]), (2.0, [(0, 5), (1, 4), (2, 3)]), (-2.0, [(0, 1), (2, 3), (4, 5)])];
    terms.iter().map(|(c, f)| c * f.iter().map(|&(x, y)| g(x, y)).product::<f64>()).sum()
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn random_expr(rng: &mut ChaCha8Rng, d: usize) -> CanonicalExpr {
    let mut e = CanonicalExpr::constant(rng.gen_range(-1.0..1.0));
    for _ in 0..3 {
        let deg = rng.gen_range(1..=2);
        let syms: Vec<Symbol> = (0..deg)
            .map(|_| {
                let (a, b) = (rng.gen_range(0..d), rng.gen_range(0..d));
                match rng.gen_range(0..5) {
                    0 => Symbol::metric(a, b),
                    1 => Symbol::inverse_metric(a, b),
                    2 => Symbol::SqrtNegDet,
                    3 => Symbol::derivative(a, b, rng.gen_range(1..d)),
                    _ => Symbol::momentum(a, b),
                }
            })
            .collect();
        e = e.add(&CanonicalExpr::product(syms, rng.gen_range(-1.0..1.0)));
    }
    e
}

/// Max residuals of antisymmetry, Leibniz and Jacobi over `n` random
/// triples of degree-≤2 expressions.
pub fn bracket_axioms(d: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<[f64; 3]> {
    let mut worst = [0.0f64; 3];
    for _ in 0..n {
        let (a, b, c) = (random_expr(rng, d), random_expr(rng, d), random_expr(rng, d));
        let p = random_field_point(d, rng);
        let ev = |e: &CanonicalExpr| e.eval(&p);
        let pb = poisson_bracket;
        let anti = ev(&pb(&a, &b)?)? + ev(&pb(&b, &a)?)?;
        let leib = ev(&pb(&a, &b.mul(&c))?)? - ev(&pb(&a, &b)?.mul(&c).add(&b.mul(&pb(&a, &c)?)))?;
        let jac = ev(&pb(&a, &pb(&b, &c)?)?)? + ev(&pb(&b, &pb(&c, &a)?)?)? + ev(&pb(&c, &pb(&a, &b)?)?)?;
        for (w, x) in worst.iter_mut().zip([anti, leib, jac]) {
            *w = w.max(x.abs());
        }
    }
    Ok(worst)
}

pub fn run_verify(cfg: &VerifyConfig) -> Report {
    let mut r = Report::new("verify", cfg.seed, cfg.d);
    let d = cfg.d;
    let tol = |t: f64| cfg.tol.unwrap_or(t);
    if d < 3 {
        r.push(Check::error("dimension", &GravError::DimensionTooSmall { d, min: 3 }));
        return r;
    }
    if let Some(f) = cfg.fault {
        r.line(format!("fault injected: {f:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let metrics: Vec<MetricState> = (0..cfg.samples).map(|_| random_metric(d, &mut rng)).collect();
    let points: Vec<FieldPoint> = (0..cfg.samples).map(|_| random_field_point(d, &mut rng)).collect();
    let n = cfg.samples;

    r.run("I·E identity", || {
        let w = metrics.iter().map(check_ie_inverse).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        Ok(Check::at_most("I·E identity", w, tol(1e-10), format!("{n} metrics")))
    });
    r.run("e inverts the spatial block", || {
        let mut w: f64 = 0.0;
        for m in &metrics {
            let e = tensor_e(m)?;
            for a in 1..d {
                for k in 1..d {
                    let s: f64 = (1..d).map(|nn| e.get(&[a, nn]) * m.lower(nn, k)).sum();
                    w = w.max((s - if a == k { 1.0 } else { 0.0 }).abs());
                }
                w = w.max(e.get(&[0, a]).abs());
            }
        }
        Ok(Check::at_most("e inverts the spatial block", w, tol(1e-11), "e^mn g_nk = δ^m_k, e^0ν = 0"))
    });
    r.run("E pair symmetry and expanded form", || {
        let mut w: f64 = 0.0;
        for m in &metrics {
            let e = tensor_big_e(m)?;
            w = w.max(e.max_abs_diff(&e.permute_axes(&[2, 3, 0, 1])?)?);
            w = w.max(e.max_abs_diff(&tensor_big_e_expanded(m)?)?);
        }
        Ok(Check::at_most("E pair symmetry and expanded form", w, tol(1e-12), ""))
    });
    r.run("B against term oracle", || {
        let mut w: f64 = 0.0;
        for m in metrics.iter().take(10) {
            let b = subject_b(m, cfg.fault);
            for idx in b.indices() {
                w = w.max((b.get(&idx) - b_oracle(m, &idx)).abs());
            }
        }
        Ok(Check::at_most("B against term oracle", w, tol(1e-13), "10 metrics, all components"))
    });
    r.run("B symmetrizations", || {
        let mut w: f64 = 0.0;
        for m in metrics.iter().take(10) {
            let b = subject_b(m, cfg.fault);
            let bs = tensor_b_sym(m);
            let bd = tensor_b_dsym(m);
            for i in b.indices() {
                let partner = |x: &[usize]| [x[3], x[4], x[5], x[0], x[1], x[2]];
                let sw = [i[1], i[0], i[2], i[3], i[4], i[5]];
                let avg2 = 0.5 * (b.get(&i) + b.get(&partner(&i)));
                let avg4 = 0.25 * (b.get(&i) + b.get(&partner(&i)) + b.get(&sw) + b.get(&partner(&sw)));
                w = w.max((bs.get(&i) - avg2).abs()).max((bd.get(&i) - avg4).abs());
            }
        }
        Ok(Check::at_most("B symmetrizations", w, tol(1e-13), "pair-exchange averages of B"))
    });
    r.run("Lagrangian B-form vs Christoffel form", || {
        let mut w: f64 = 0.0;
        for p in &points {
            let b = subject_b(p.metric(), cfg.fault);
            let dg = p.dg_tensor().data();
            let n3 = dg.len();
            let mut acc = 0.0;
            for x in 0..n3 {
                for y in 0..n3 {
                    acc += b.data()[x * n3 + y] * dg[x] * dg[y];
                }
            }
            let b_form = 0.25 * p.metric().sqrt_neg_det() * acc;
            w = w.max(rel(b_form, lagrangian_christoffel(p)));
        }
        Ok(Check::at_most("Lagrangian B-form vs Christoffel form", w, tol(1e-9), "relative"))
    });
    r.run("Lagrangian velocity split", || {
        let w = points.iter().map(|p| rel(lagrangian_split(p).total(), lagrangian_b_form(p))).fold(0.0, f64::max);
        Ok(Check::at_most("Lagrangian velocity split", w, tol(1e-10), "kinetic + cross + spatial vs B-form"))
    });
    r.run("Legendre round-trip", || {
        let mut w: f64 = 0.0;
        for p in &points {
            let mut q = p.clone();
            q.set_momentum_tensor(momentum_from_velocity(p));
            let v = velocity_from_momentum(&q)?;
            for a in 1..d {
                for b in 1..d {
                    let want = p.velocity(a, b);
                    w = w.max((v.get(&[a, b]) - want).abs() / want.abs().max(1.0));
                }
            }
        }
        Ok(Check::at_most("Legendre round-trip", w, tol(1e-8), "spatial velocities, relative"))
    });
    r.run("bracket axioms", || {
        let mut brng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xb5);
        let [a, l, j] = bracket_axioms(d, n.min(40), &mut brng)?;
        Ok(Check::at_most(
            "bracket axioms",
            a.max(l).max(j),
            tol(1e-11),
            format!("antisymmetry {a:.1e}, Leibniz {l:.1e}, Jacobi {j:.1e}"),
        ))
    });
    r.run("{g_12, π^12} = ½", || {
        let v = poisson_bracket(&CanonicalExpr::symbol(Symbol::metric(1, 2)), &CanonicalExpr::symbol(Symbol::momentum(1, 2)))?
            .eval(&FieldPoint::flat(d))?;
        Ok(Check::holds("{g_12, π^12} = ½", v == 0.5, Some(v), "exact"))
    });
    r.run("{π, B g_,k} closed form vs engine", || {
        let mut w: f64 = 0.0;
        for p in points.iter().take(5) {
            for pp in 1..d {
                for q in pp..d {
                    w = w.max(bracket_pi_with_bg(p, pp, q).max_abs_diff(&bracket_pi_with_bg_engine(p, pp, q)?)?);
                }
            }
        }
        Ok(Check::at_most("{π, B g_,k} closed form vs engine", w, tol(1e-11), ""))
    });
    r
}
