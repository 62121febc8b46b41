//! Position and momentum operators, the commutator check, the
//! primary-constraint condition on Ψ and the constraint-chain step.

use num_complex::Complex64;
use serde::Serialize;

use super::{ConfigGrid, OperatorMatrix, WaveFunction};
use crate::canonical::{cross_coefficient, FieldPoint};
use crate::error::{GravError, Result};

/// Gauge functions f_a(x) added to the momentum operators, indexed by axis.
pub type GaugeFn<'a> = &'a dyn Fn(usize, &[f64]) -> f64;

/// Central first difference along `axis` with zero (Dirichlet) values
/// outside the grid.
pub(crate) fn central_difference(grid: &ConfigGrid, axis: usize) -> OperatorMatrix {
    let stride = grid.stride(axis);
    let a = &grid.axes()[axis];
    let h = 1.0 / (2.0 * a.step());
    let mut t = Vec::with_capacity(2 * grid.len());
    for i in 0..grid.len() {
        let k = grid.multi_index(i)[axis];
        if k + 1 < a.n {
            t.push((i, i + stride, Complex64::new(h, 0.0)));
        }
        if k > 0 {
            t.push((i, i - stride, Complex64::new(-h, 0.0)));
        }
    }
    OperatorMatrix::from_triplets(grid.len(), t)
}

/// Multiplication by the grid coordinate of `axis`.
pub fn position_operator(grid: &ConfigGrid, axis: usize) -> OperatorMatrix {
    let a = &grid.axes()[axis];
    OperatorMatrix::diagonal((0..grid.len()).map(|i| Complex64::new(a.value(grid.multi_index(i)[axis]), 0.0)).collect())
}

/// Largest violation of ∂f_a/∂x_b = ∂f_b/∂x_a over the grid, by central
/// differences of step 1e-5 relative to the axis spacing.
pub fn check_integrability(grid: &ConfigGrid, f: GaugeFn) -> Result<f64> {
    let n = grid.axes().len();
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        let x = grid.coords(i);
        let deriv = |a: usize, b: usize| {
            let h = 1e-5 * grid.axes()[b].step().max(1e-3);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[b] += h;
            xm[b] -= h;
            (f(a, &xp) - f(a, &xm)) / (2.0 * h)
        };
        for a in 0..n {
            for b in a + 1..n {
                worst = worst.max((deriv(a, b) - deriv(b, a)).abs());
            }
        }
    }
    if worst > 1e-8 {
        return Err(GravError::NonIntegrableGauge { residual: worst });
    }
    Ok(worst)
}

/// π̂ = −iħ w (∂/∂x + f) for the component on `axis`, with w = ½ for
/// off-diagonal components. `f` must pass [`check_integrability`].
pub fn momentum_operator(grid: &ConfigGrid, axis: usize, f: Option<GaugeFn>) -> Result<OperatorMatrix> {
    let w = grid.axes()[axis].momentum_weight();
    let mut op = central_difference(grid, axis);
    if let Some(f) = f {
        check_integrability(grid, f)?;
        let diag = (0..grid.len()).map(|i| Complex64::new(f(axis, &grid.coords(i)), 0.0)).collect();
        op = op.add(&OperatorMatrix::diagonal(diag));
    }
    Ok(op.scale(Complex64::new(0.0, -grid.hbar() * w)))
}

fn interior_norm(grid: &ConfigGrid, v: &[Complex64]) -> f64 {
    v.iter().enumerate().filter(|(i, _)| grid.is_interior(*i, 1)).map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt()
}

/// max over axis pairs (a, b) and test functions of
/// ‖[ĝ_a, π̂_b]Ψ − iħ Δ_ab Ψ‖ / ‖Ψ‖ on interior points, where Δ_ab is the
/// fundamental bracket {g_a, π^b} (1 or ½ on the diagonal, 0 off it).
pub fn quantum_bracket_check(grid: &ConfigGrid) -> Result<f64> {
    let n = grid.axes().len();
    let tests: Vec<WaveFunction> = (0..3)
        .map(|t| {
            let center: Vec<f64> = grid.axes().iter().map(|a| a.lo + (0.4 + 0.1 * t as f64) * (a.hi - a.lo)).collect();
            let sigma: Vec<f64> = grid.axes().iter().map(|a| 0.12 * (a.hi - a.lo)).collect();
            let k: Vec<f64> = grid.axes().iter().map(|a| (2.0 + 3.0 * t as f64) / (a.hi - a.lo)).collect();
            WaveFunction::gaussian(grid, &center, &sigma, &k)
        })
        .collect();
    let hbar = grid.hbar();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let g = position_operator(grid, a);
        for b in 0..n {
            let p = momentum_operator(grid, b, None)?;
            let comm = g.commutator(&p);
            let delta = if a == b { grid.axes()[a].momentum_weight() } else { 0.0 };
            for psi in &tests {
                let lhs = comm.apply(&psi.amps);
                let r: Vec<Complex64> =
                    lhs.iter().zip(&psi.amps).map(|(l, s)| l - Complex64::new(0.0, hbar * delta) * s).collect();
                worst = worst.max(interior_norm(grid, &r) / interior_norm(grid, &psi.amps));
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintResidual {
    /// (σ, ‖iħ ∂Ψ/∂g_0σ − ½√−g B^((0σ)0|μνk) g_μν,k Ψ‖ / ‖Ψ‖)
    pub per_axis: Vec<(usize, f64)>,
    pub max: f64,
}

/// Residual of the primary-constraint condition on Ψ for every g_0σ axis of
/// the grid, with the coefficient frozen at `context` and norms over
/// interior points.
pub fn primary_constraint_apply(grid: &ConfigGrid, psi: &WaveFunction, context: &FieldPoint) -> Result<ConstraintResidual> {
    let temporal: Vec<usize> = (0..grid.axes().len()).filter(|&a| grid.axes()[a].is_temporal()).collect();
    if temporal.is_empty() {
        return Err(GravError::ConfigInvalid("primary-constraint check needs a g_0σ axis".into()));
    }
    let c = cross_coefficient(context);
    let s = context.metric().sqrt_neg_det();
    let hbar = grid.hbar();
    let mut per_axis = Vec::new();
    for a in temporal {
        let sigma = grid.axes()[a].component.1;
        let coeff = 0.5 * s * c.get(&[0, sigma]);
        let dpsi = central_difference(grid, a).apply(&psi.amps);
        let r: Vec<Complex64> =
            dpsi.iter().zip(&psi.amps).map(|(dp, p)| Complex64::new(0.0, hbar) * dp - coeff * p).collect();
        per_axis.push((sigma, interior_norm(grid, &r) / interior_norm(grid, &psi.amps)));
    }
    let max = per_axis.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(ConstraintResidual { per_axis, max })
}

/// (i/ħ)[Ĉ, Ĥ], the operator analogue of χ = {φ, H}.
pub fn constraint_chain_step(c: &OperatorMatrix, h: &OperatorMatrix, hbar: f64) -> OperatorMatrix {
    c.commutator(h).scale(Complex64::new(0.0, 1.0 / hbar))
}
