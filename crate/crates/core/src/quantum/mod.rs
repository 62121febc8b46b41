//! Truncated quantization: a wave function over a few metric components on a
//! uniform grid, canonical operators by central differences, and unitary
//! Cayley evolution.
//!
//! Components not on the grid are frozen at the values of a context
//! [`FieldPoint`]; their momenta are dropped.

mod evolve;
mod hamiltonian;
mod operator;
mod ops;

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::FieldPoint;
use crate::error::{GravError, Result};
use crate::tensor::MetricState;

pub use evolve::{evolve_schrodinger, gaussian_width_law, EvolveReport, SchrodingerOptions};
pub use hamiltonian::{
    build_hamiltonian_operator, component_operator, free_coefficient, uncontracted_residuals, CoefficientMode,
    HamiltonianOperator,
};
pub use operator::{BandedLu, OperatorMatrix};
pub use ops::{
    check_integrability, constraint_chain_step, momentum_operator, position_operator, primary_constraint_apply,
    quantum_bracket_check, ConstraintResidual, GaugeFn,
};

/// One grid axis: the metric component g_ab (a ≤ b) sampled on [lo, hi].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub component: (usize, usize),
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(component: (usize, usize), lo: f64, hi: f64, n: usize) -> Self {
        let (a, b) = component;
        Self { component: (a.min(b), a.max(b)), lo, hi, n }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step()
    }

    pub fn is_diagonal(&self) -> bool {
        self.component.0 == self.component.1
    }

    pub fn is_temporal(&self) -> bool {
        self.component.0 == 0
    }

    /// Weight of the component in its momentum operator: off-diagonal
    /// entries appear twice in the symmetric metric.
    pub fn momentum_weight(&self) -> f64 {
        if self.is_diagonal() {
            1.0
        } else {
            0.5
        }
    }
}

/// Uniform product grid over retained metric components, row-major with the
/// last axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigGrid {
    axes: Vec<Axis>,
    hbar: f64,
}

impl ConfigGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(GravError::ConfigInvalid("grid needs at least one axis".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.n < 8 {
                return Err(GravError::ConfigInvalid(format!("axis {:?} has {} points (need ≥ 8)", a.component, a.n)));
            }
            if !(a.hi > a.lo) {
                return Err(GravError::ConfigInvalid(format!("axis {:?} has an empty range", a.component)));
            }
            if a.is_diagonal() && !a.is_temporal() && a.lo <= 0.0 {
                return Err(GravError::ConfigInvalid(format!(
                    "axis {:?} must stay positive to keep the spatial block nondegenerate",
                    a.component
                )));
            }
            if axes[..i].iter().any(|b| b.component == a.component) {
                return Err(GravError::ConfigInvalid(format!("axis {:?} repeated", a.component)));
            }
        }
        Ok(Self { axes, hbar: 1.0 })
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis_of(&self, component: (usize, usize)) -> Option<usize> {
        let c = (component.0.min(component.1), component.0.max(component.1));
        self.axes.iter().position(|a| a.component == c)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Σ|Ψ|² weight per point.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::step).product()
    }

    /// Flat-index stride of an axis.
    pub fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(|a| a.n).product()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = flat % a.n;
            flat /= a.n;
        }
        out
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).iter().zip(&self.axes).map(|(i, a)| a.value(*i)).collect()
    }

    /// Whether the point is at least `margin` cells from every boundary.
    pub fn is_interior(&self, flat: usize, margin: usize) -> bool {
        self.multi_index(flat).iter().zip(&self.axes).all(|(i, a)| *i >= margin && *i + margin < a.n)
    }

    /// The context point with retained components replaced by grid values.
    pub fn point_at(&self, context: &FieldPoint, flat: usize) -> Result<FieldPoint> {
        let d = context.dim();
        let mut rows: Vec<Vec<f64>> = (0..d).map(|a| (0..d).map(|b| context.metric().lower(a, b)).collect()).collect();
        for (x, a) in self.coords(flat).iter().zip(&self.axes) {
            let (m, n) = a.component;
            if n >= d {
                return Err(GravError::ConfigInvalid(format!("axis {:?} outside dimension {d}", a.component)));
            }
            rows[m][n] = *x;
            rows[n][m] = *x;
        }
        Ok(context.clone().with_metric(MetricState::from_rows(&rows)?))
    }
}

/// Complex amplitudes over a [`ConfigGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub amps: Vec<Complex64>,
}

impl WaveFunction {
    pub fn from_fn(grid: &ConfigGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        Self { amps: (0..grid.len()).map(|i| f(&grid.coords(i))).collect() }
    }

    /// Product of Gaussians exp(−(x − c)²/(4σ²) + i k x) per axis, so that
    /// |Ψ|² has standard deviation σ along each axis.
    pub fn gaussian(grid: &ConfigGrid, center: &[f64], sigma: &[f64], k: &[f64]) -> Self {
        Self::from_fn(grid, |x| {
            let mut phase = 0.0;
            let mut env = 0.0;
            for j in 0..x.len() {
                env -= (x[j] - center[j]).powi(2) / (4.0 * sigma[j] * sigma[j]);
                phase += k[j] * x[j];
            }
            Complex64::from_polar(env.exp(), phase)
        })
    }

    pub fn norm_sq(&self, grid: &ConfigGrid) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.cell_volume()
    }

    pub fn norm(&self, grid: &ConfigGrid) -> f64 {
        self.norm_sq(grid).sqrt()
    }

    pub fn normalized(&self, grid: &ConfigGrid) -> Self {
        let n = self.norm(grid);
        Self { amps: self.amps.iter().map(|a| a / n).collect() }
    }

    /// Mean and standard deviation of |Ψ|² along an axis.
    pub fn moments(&self, grid: &ConfigGrid, axis: usize) -> (f64, f64) {
        let mut w = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let x = grid.axes()[axis].value(grid.multi_index(i)[axis]);
            let p = a.norm_sqr();
            w += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let mean = m1 / w;
        (mean, (m2 / w - mean * mean).max(0.0).sqrt())
    }

    /// CSV snapshot: one row per grid point with its coordinates, Re Ψ, Im Ψ.
    pub fn write_csv<W: Write>(&self, grid: &ConfigGrid, mut w: W) -> std::io::Result<()> {
        let names: Vec<String> = grid.axes().iter().map(|a| format!("g{}{}", a.component.0, a.component.1)).collect();
        writeln!(w, "{},re,im", names.join(","))?;
        for (i, a) in self.amps.iter().enumerate() {
            let x: Vec<String> = grid.coords(i).iter().map(|v| format!("{v:.10e}")).collect();
            writeln!(w, "{},{:.12e},{:.12e}", x.join(","), a.re, a.im)?;
        }
        Ok(())
    }
}
