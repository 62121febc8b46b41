//! Cayley (Crank–Nicolson) stepping of iħ ∂Ψ/∂τ = ĤΨ.

use num_complex::Complex64;
use serde::Serialize;

use super::{BandedLu, ConfigGrid, OperatorMatrix, WaveFunction};
use crate::error::{GravError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchrodingerOptions {
    pub dtau: f64,
    pub steps: usize,
    /// Snapshot interval in steps; 0 keeps only the initial and final states.
    pub record_every: usize,
    /// Largest tolerated relative norm change in one step.
    pub max_step_drift: f64,
}

impl Default for SchrodingerOptions {
    fn default() -> Self {
        Self { dtau: 1e-4, steps: 1000, record_every: 0, max_step_drift: 1e-9 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveReport {
    pub hbar: f64,
    pub dtau: f64,
    pub steps: usize,
    pub scheme: &'static str,
    /// ‖Ψ‖ after every step, starting with the initial state.
    pub norms: Vec<f64>,
    pub max_step_drift: f64,
    /// |‖Ψ_end‖ − ‖Ψ_0‖| / ‖Ψ_0‖
    pub total_drift: f64,
    #[serde(skip)]
    pub snapshots: Vec<(usize, f64, WaveFunction)>,
}

impl EvolveReport {
    pub fn final_state(&self) -> &WaveFunction {
        &self.snapshots.last().expect("initial state is always recorded").2
    }
}

/// Steps (1 + iτĤ/2ħ) Ψ' = (1 − iτĤ/2ħ) Ψ. Exactly norm-preserving for
/// self-adjoint Ĥ up to rounding; a per-step norm change above
/// `max_step_drift` is returned as `NonUnitaryDrift`.
pub fn evolve_schrodinger(
    grid: &ConfigGrid,
    psi0: &WaveFunction,
    h: &OperatorMatrix,
    opts: &SchrodingerOptions,
) -> Result<EvolveReport> {
    if psi0.amps.len() != grid.len() || h.dim() != grid.len() {
        return Err(GravError::ConfigInvalid("wave function, operator and grid sizes differ".into()));
    }
    if !(opts.dtau > 0.0) || !opts.dtau.is_finite() {
        return Err(GravError::ConfigInvalid(format!("dτ = {} must be positive", opts.dtau)));
    }
    let alpha = Complex64::new(0.0, opts.dtau / (2.0 * grid.hbar()));
    let id = OperatorMatrix::identity(grid.len());
    let lhs = BandedLu::factor(&id.add(&h.scale(alpha)))?;
    let rhs = id.sub(&h.scale(alpha));

    let mut psi = psi0.clone();
    let n0 = psi.norm(grid);
    let mut norms = vec![n0];
    let mut snapshots = vec![(0, 0.0, psi.clone())];
    let mut max_step_drift: f64 = 0.0;
    for step in 1..=opts.steps {
        psi = WaveFunction { amps: lhs.solve(&rhs.apply(&psi.amps)) };
        let n = psi.norm(grid);
        let prev = *norms.last().unwrap();
        let drift = (n - prev).abs() / prev;
        max_step_drift = max_step_drift.max(drift);
        if !(drift <= opts.max_step_drift) {
            return Err(GravError::NonUnitaryDrift { step, drift });
        }
        norms.push(n);
        if (opts.record_every > 0 && step % opts.record_every == 0) || step == opts.steps {
            snapshots.push((step, step as f64 * opts.dtau, psi.clone()));
        }
    }
    let total_drift = (norms.last().unwrap() - n0).abs() / n0;
    Ok(EvolveReport {
        hbar: grid.hbar(),
        dtau: opts.dtau,
        steps: opts.steps,
        scheme: "cayley",
        norms,
        max_step_drift,
        total_drift,
        snapshots,
    })
}

/// Standard deviation of |Ψ|² for a free Gaussian under −ħ² c ∂²:
/// σ(τ) = σ0 √(1 + (ħ c τ / σ0²)²).
pub fn gaussian_width_law(sigma0: f64, c: f64, hbar: f64, tau: f64) -> f64 {
    sigma0 * (1.0 + (hbar * c * tau / (sigma0 * sigma0)).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::FieldPoint;
    use crate::quantum::{build_hamiltonian_operator, Axis, CoefficientMode};

    fn line() -> ConfigGrid {
        ConfigGrid::new(vec![Axis::new((1, 1), 0.2, 1.8, 256)]).unwrap()
    }

    #[test]
    fn zero_operator_leaves_state_unchanged() {
        let g = line();
        let psi = WaveFunction::gaussian(&g, &[1.0], &[0.1], &[4.0]);
        let opts = SchrodingerOptions { dtau: 0.01, steps: 20, ..Default::default() };
        let r = evolve_schrodinger(&g, &psi, &OperatorMatrix::zeros(g.len()), &opts).unwrap();
        assert_eq!(r.final_state(), &psi);
        assert_eq!(r.total_drift, 0.0);
    }

    #[test]
    fn free_packet_spreads_by_the_analytic_law() {
        let g = line();
        let h = build_hamiltonian_operator(&g, &FieldPoint::flat(4), CoefficientMode::Frozen).unwrap();
        let (sigma0, c) = (0.08, -0.5);
        let opts = SchrodingerOptions { dtau: 1.28e-5, steps: 1000, ..Default::default() };
        for k in [0.0, 10.0, 20.0] {
            let psi = WaveFunction::gaussian(&g, &[1.0], &[sigma0], &[k]).normalized(&g);
            let r = evolve_schrodinger(&g, &psi, &h.op, &opts).unwrap();
            let tau = 1000.0 * opts.dtau;
            let (mean, width) = r.final_state().moments(&g, 0);
            let want = gaussian_width_law(sigma0, c, 1.0, tau);
            assert!((width / want - 1.0).abs() < 0.01, "k={k}: {width} vs {want}");
            assert!((mean - (1.0 + 2.0 * c * k * tau)).abs() < 2e-3, "k={k}: mean {mean}");
            assert!(r.total_drift <= 1e-7, "{}", r.total_drift);
        }
    }

    #[test]
    fn non_self_adjoint_operator_is_reported() {
        let g = ConfigGrid::new(vec![Axis::new((1, 1), 0.2, 1.8, 32)]).unwrap();
        // an anti-Hermitian perturbation pumps the norm
        let h = OperatorMatrix::diagonal(vec![Complex64::new(0.0, -1.0); g.len()]);
        let psi = WaveFunction::gaussian(&g, &[1.0], &[0.1], &[0.0]);
        let opts = SchrodingerOptions { dtau: 1e-3, steps: 5, ..Default::default() };
        let r = evolve_schrodinger(&g, &psi, &h, &opts);
        assert!(matches!(r, Err(GravError::NonUnitaryDrift { step: 1, .. })), "{r:?}");
    }
}
