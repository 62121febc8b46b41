//! The contracted Hamiltonian operator Ĥ_c = I_mnpq Ĥ^pqmn on a grid and
//! its uncontracted components.
//!
//! With momenta to the right, each operator has the shape
//!
//!   Σ_ab K_ab π̂_a π̂_b + Σ_b L_b π̂_b + V
//!
//! over the grid axes. Only spatial axes carry momenta; g_0σ axes are
//! spectators.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{ConfigGrid, OperatorMatrix, WaveFunction};
use crate::canonical::{cross_coefficient, hamiltonian_tensor, hamiltonian_tilde, FieldPoint};
use crate::error::{GravError, Result};
use crate::grav::{spatial_block, tensor_big_e, tensor_i, SpatialQuadraticForm};
use crate::tensor::{DenseTensor, SINGULAR_TOL};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientMode {
    /// Kinetic and drift coefficients taken at the context point; the
    /// operator is self-adjoint.
    #[default]
    Frozen,
    /// Coefficients at every grid point with momenta to the right, as
    /// written; generally not self-adjoint.
    GridLocal,
}

#[derive(Clone, Debug)]
pub struct HamiltonianOperator {
    pub op: OperatorMatrix,
    pub mode: CoefficientMode,
    /// All spatial derivatives of the context vanish.
    pub homogeneous: bool,
    /// The ordering (bracket) term is nonzero at the context but not part of
    /// the operator.
    pub ordering_omitted: bool,
    pub hermiticity_defect: f64,
}

/// Per-point classical data.
struct PointData {
    i: SpatialQuadraticForm,
    c: DenseTensor,
    s: f64,
    /// ¼(−g)[I C C − g^00 U], the momentum-free part of H̃
    v: f64,
    /// momentum-free S^pqmn, 0-based spatial
    s_tensor: DenseTensor,
    /// E^pqmn spatial block, 0-based
    e: DenseTensor,
}

fn point_data(p: &FieldPoint) -> Result<PointData> {
    let m = p.metric();
    if m.g00().abs() < SINGULAR_TOL {
        return Err(GravError::TemporalDegeneracy { g00: m.g00() });
    }
    let mut q = p.clone();
    q.scale_momentum(0.0);
    let ht = hamiltonian_tensor(&q)?;
    Ok(PointData {
        i: tensor_i(m)?,
        c: cross_coefficient(&q),
        s: m.sqrt_neg_det(),
        v: hamiltonian_tilde(&q)?.classical,
        s_tensor: ht.s_classical,
        e: spatial_block(&tensor_big_e(m)?),
    })
}

fn orbit(c: (usize, usize)) -> Vec<(usize, usize)> {
    if c.0 == c.1 {
        vec![c]
    } else {
        vec![c, (c.1, c.0)]
    }
}

/// Which operator to assemble from the point data.
#[derive(Clone, Copy)]
enum Target {
    Contracted,
    Component([usize; 4]),
}

fn coefficients(grid: &ConfigGrid, pd: &PointData, target: Target) -> (Vec<Vec<f64>>, Vec<f64>) {
    let d = pd.c.dim();
    let axes = grid.axes();
    let n = axes.len();
    let mut k = vec![vec![0.0; n]; n];
    let mut l = vec![0.0; n];
    for (a, ax) in axes.iter().enumerate() {
        if ax.is_temporal() {
            continue;
        }
        for (b, bx) in axes.iter().enumerate() {
            if bx.is_temporal() {
                continue;
            }
            k[a][b] = match target {
                Target::Contracted => orbit(ax.component)
                    .iter()
                    .flat_map(|&(m, nn)| orbit(bx.component).into_iter().map(move |(p, q)| (m, nn, p, q)))
                    .map(|(m, nn, p, q)| pd.i.component(m, nn, p, q))
                    .sum(),
                Target::Component([p, q, m, nn]) => {
                    let hit = |c: (usize, usize), x: usize, y: usize| c == (x.min(y), x.max(y));
                    if hit(ax.component, p, q) && hit(bx.component, m, nn) {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
        l[a] = match target {
            Target::Contracted => {
                let mut acc = 0.0;
                for (p, q) in orbit(ax.component) {
                    for m in 1..d {
                        for nn in 1..d {
                            acc += pd.i.component(m, nn, p, q) * pd.c.get(&[m, nn]);
                        }
                    }
                }
                -pd.s * acc
            }
            Target::Component([p, q, m, nn]) => {
                if ax.component == (m.min(nn), m.max(nn)) {
                    -pd.s * pd.c.get(&[p, q])
                } else {
                    0.0
                }
            }
        };
    }
    (k, l)
}

fn potential(pd: &PointData, target: Target) -> f64 {
    match target {
        Target::Contracted => pd.v,
        Target::Component([p, q, m, n]) => pd.s_tensor.get(&[p - 1, q - 1, m - 1, n - 1]),
    }
}

/// Row i of Σ K_ab π̂_a π̂_b + Σ L_b π̂_b.
fn push_derivative_row(grid: &ConfigGrid, i: usize, k: &[Vec<f64>], l: &[f64], out: &mut Vec<(usize, usize, Complex64)>) {
    let hbar = grid.hbar();
    let axes = grid.axes();
    let idx = grid.multi_index(i);
    let inside = |a: usize, step: i64| {
        let j = idx[a] as i64 + step;
        j >= 0 && (j as usize) < axes[a].n
    };
    for a in 0..axes.len() {
        let (sa, ha, wa) = (grid.stride(a), axes[a].step(), axes[a].momentum_weight());
        for b in 0..axes.len() {
            let kab = k[a][b];
            if kab == 0.0 {
                continue;
            }
            let wb = axes[b].momentum_weight();
            let c = -hbar * hbar * wa * wb * kab;
            if a == b {
                let f = c / (ha * ha);
                out.push((i, i, Complex64::new(-2.0 * f, 0.0)));
                if inside(a, 1) {
                    out.push((i, i + sa, Complex64::new(f, 0.0)));
                }
                if inside(a, -1) {
                    out.push((i, i - sa, Complex64::new(f, 0.0)));
                }
            } else {
                let (sb, hb) = (grid.stride(b), axes[b].step());
                let f = c / (4.0 * ha * hb);
                for (da, db, sign) in [(1i64, 1i64, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)] {
                    if inside(a, da) && inside(b, db) {
                        let j = (i as i64 + da * sa as i64 + db * sb as i64) as usize;
                        out.push((i, j, Complex64::new(sign * f, 0.0)));
                    }
                }
            }
        }
        if l[a] != 0.0 {
            // L π̂ = L (−iħ w) (ψ_{+} − ψ_{−}) / 2h
            let f = Complex64::new(0.0, -hbar * wa * l[a] / (2.0 * ha));
            if inside(a, 1) {
                out.push((i, i + sa, f));
            }
            if inside(a, -1) {
                out.push((i, i - sa, -f));
            }
        }
    }
}

fn assemble(grid: &ConfigGrid, data: &[PointData], frozen: Option<&PointData>, target: Target) -> OperatorMatrix {
    let frozen_coeffs = frozen.map(|pd| coefficients(grid, pd, target));
    let rows: Vec<Vec<(usize, usize, Complex64)>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut t = Vec::new();
            let (k, l) = match &frozen_coeffs {
                Some(kl) => kl.clone(),
                None => coefficients(grid, &data[i], target),
            };
            push_derivative_row(grid, i, &k, &l, &mut t);
            t.push((i, i, Complex64::new(potential(&data[i], target), 0.0)));
            t
        })
        .collect();
    OperatorMatrix::from_triplets(grid.len(), rows.into_iter().flatten())
}

fn grid_data(grid: &ConfigGrid, context: &FieldPoint) -> Result<Vec<PointData>> {
    (0..grid.len()).into_par_iter().map(|i| point_data(&grid.point_at(context, i)?)).collect()
}

fn is_homogeneous(p: &FieldPoint) -> bool {
    let d = p.dim();
    itertools::iproduct!(0..d, 0..d, 1..d).all(|(a, b, k)| p.spatial(a, b, k) == 0.0)
}

/// Ĥ_c on the grid. Non-retained components sit at their `context` values,
/// spatial derivatives come from `context`, and momenta of non-retained
/// components are dropped.
pub fn build_hamiltonian_operator(grid: &ConfigGrid, context: &FieldPoint, mode: CoefficientMode) -> Result<HamiltonianOperator> {
    let data = grid_data(grid, context)?;
    let ctx = point_data(context)?;
    let frozen = (mode == CoefficientMode::Frozen).then_some(&ctx);
    let op = assemble(grid, &data, frozen, Target::Contracted);
    let homogeneous = is_homogeneous(context);
    let ordering_omitted = !homogeneous && hamiltonian_tilde(context)?.ordering != 0.0;
    let hermiticity_defect = op.hermiticity_defect();
    Ok(HamiltonianOperator { op, mode, homogeneous, ordering_omitted, hermiticity_defect })
}

/// Ĥ^pqmn for spacetime labels 1 ≤ p, q, m, n < d.
pub fn component_operator(
    grid: &ConfigGrid,
    context: &FieldPoint,
    mode: CoefficientMode,
    pqmn: [usize; 4],
) -> Result<OperatorMatrix> {
    let d = context.dim();
    if pqmn.iter().any(|&x| x == 0 || x >= d) {
        return Err(GravError::ConfigInvalid(format!("component {pqmn:?} is not spatial")));
    }
    let data = grid_data(grid, context)?;
    let ctx = point_data(context)?;
    let frozen = (mode == CoefficientMode::Frozen).then_some(&ctx);
    Ok(assemble(grid, &data, frozen, Target::Component(pqmn)))
}

/// ‖E^pqmn Ĥ_c Ψ − Ĥ^pqmn Ψ‖ / ‖Ψ‖ over interior points for every spatial
/// (p, q, m, n), with E taken at each grid point.
pub fn uncontracted_residuals(
    grid: &ConfigGrid,
    context: &FieldPoint,
    mode: CoefficientMode,
    psi: &WaveFunction,
) -> Result<Vec<([usize; 4], f64)>> {
    let d = context.dim();
    let data = grid_data(grid, context)?;
    let ctx = point_data(context)?;
    let frozen = (mode == CoefficientMode::Frozen).then_some(&ctx);
    let hpsi = assemble(grid, &data, frozen, Target::Contracted).apply(&psi.amps);
    let norm = |v: &[Complex64]| -> f64 {
        v.iter().enumerate().filter(|(i, _)| grid.is_interior(*i, 1)).map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt()
    };
    let base = norm(&psi.amps);
    let mut out = Vec::new();
    for (p, q, m, n) in itertools::iproduct!(1..d, 1..d, 1..d, 1..d) {
        let comp = assemble(grid, &data, frozen, Target::Component([p, q, m, n])).apply(&psi.amps);
        let r: Vec<Complex64> = (0..grid.len())
            .map(|i| data[i].e.get(&[p - 1, q - 1, m - 1, n - 1]) * hpsi[i] - comp[i])
            .collect();
        out.push(([p, q, m, n], norm(&r) / base));
    }
    Ok(out)
}

/// Kinetic coefficient of the single-axis free operator −ħ² c ∂², i.e.
/// c = w² Σ_orbit I at the context point.
pub fn free_coefficient(grid: &ConfigGrid, context: &FieldPoint, axis: usize) -> Result<f64> {
    let ctx = point_data(context)?;
    let (k, _) = coefficients(grid, &ctx, Target::Contracted);
    let w = grid.axes()[axis].momentum_weight();
    Ok(w * w * k[axis][axis])
}
