//! Propagation-front diagnostics for lattice trajectories.

use serde::Serialize;

use super::evolve::Trajectory;
use crate::error::{GravError, Result};

#[derive(Clone, Debug, Serialize)]
pub struct FrontOptions {
    /// Fraction of the peak energy density that counts as disturbed.
    pub threshold: f64,
    /// Sites added on each side of the disturbed cluster.
    pub window: usize,
}

impl Default for FrontOptions {
    fn default() -> Self {
        Self { threshold: 0.01, window: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontSample {
    pub step: usize,
    pub time: f64,
    /// Distance from the initial peak to the rightmost disturbed site.
    pub front_position: f64,
    /// Share of Σ|h| inside the disturbed cluster widened by the window.
    pub front_energy_fraction: f64,
    /// Summed per-component variance of g_mn between the origin and the
    /// start of the front region.
    pub behind_front_variance: f64,
}

/// One sample per recorded frame. Energies are |h_i|; the origin is the
/// site of largest initial energy density.
pub fn front_diagnostics(traj: &Trajectory, opts: &FrontOptions) -> Result<Vec<FrontSample>> {
    let first = traj.frames.first().ok_or(GravError::NoFront)?;
    let e0: Vec<f64> = first.energy_density.iter().map(|h| h.abs()).collect();
    let (origin, &peak0) = e0.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).ok_or(GravError::NoFront)?;
    if peak0 <= f64::MIN_POSITIVE {
        return Err(GravError::NoFront);
    }
    let mut out = Vec::with_capacity(traj.frames.len());
    for f in &traj.frames {
        let e: Vec<f64> = f.energy_density.iter().map(|h| h.abs()).collect();
        let n = e.len();
        let peak = e.iter().cloned().fold(0.0, f64::max);
        let total: f64 = e.iter().sum();
        if peak <= f64::MIN_POSITIVE {
            return Err(GravError::NoFront);
        }
        let cut = opts.threshold * peak;
        let above = |i: usize| e[i] >= cut;
        let front = (origin..n).rev().find(|&i| above(i)).unwrap_or(origin);
        let mut start = front;
        while start > 0 && above(start - 1) {
            start -= 1;
        }
        let lo = start.saturating_sub(opts.window);
        let hi = (front + opts.window).min(n - 1);
        let inside: f64 = e[lo..=hi].iter().sum();
        let fraction = if total > 0.0 { inside / total } else { 1.0 };

        let behind = origin..start.max(origin);
        let mut variance = 0.0;
        if behind.len() > 1 {
            let count = behind.len() as f64;
            for c in 0..traj.pairs.len() {
                let mean = behind.clone().map(|i| f.g[i][c]).sum::<f64>() / count;
                variance += behind.clone().map(|i| (f.g[i][c] - mean).powi(2)).sum::<f64>() / count;
            }
        }
        out.push(FrontSample {
            step: f.step,
            time: f.time,
            front_position: (front - origin) as f64 * traj.spacing,
            front_energy_fraction: fraction,
            behind_front_variance: variance,
        });
    }
    Ok(out)
}
