//! Weak-field scaling of scalar functionals around flat space.
//!
//! A functional H is evaluated along g = η + ε h, g_,k = ε h_,k, π = ε p.
//! The leading ε² part is fitted and removed; the log–log slope of what is
//! left measures the order of the first non-quadratic correction.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::canonical::FieldPoint;
use crate::error::{GravError, Result};
use crate::tensor::{DenseTensor, MetricState, Variance};

/// Fixed direction of the expansion.
#[derive(Clone, Debug)]
pub struct WeakFieldDirection {
    pub h: DenseTensor,
    /// h_{ab,k}, only spatial k used.
    pub dh: Vec<DenseTensor>,
    pub momentum: Option<DenseTensor>,
}

impl WeakFieldDirection {
    /// Random symmetric h, spatial derivatives and (optionally) momenta with
    /// entries in [−1, 1].
    pub fn random<R: Rng + ?Sized>(d: usize, with_momentum: bool, rng: &mut R) -> Self {
        let h = crate::sampling::random_symmetric(d, Variance::Lower, 1.0, rng);
        let dh = (0..d).map(|_| crate::sampling::random_symmetric(d, Variance::Lower, 1.0, rng)).collect();
        let momentum = with_momentum.then(|| crate::sampling::random_symmetric(d, Variance::Upper, 1.0, rng));
        Self { h, dh, momentum }
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn point(&self, eps: f64) -> Result<FieldPoint> {
        let d = self.dim();
        let eta = MetricState::minkowski(d);
        let rows: Vec<Vec<f64>> =
            (0..d).map(|a| (0..d).map(|b| eta.lower(a, b) + eps * self.h.get(&[a, b])).collect()).collect();
        let mut p = FieldPoint::new(MetricState::from_rows(&rows)?);
        for k in 1..d {
            for a in 0..d {
                for b in a..d {
                    p.set_dg(a, b, k, eps * self.dh[k].get(&[a, b]));
                }
            }
        }
        if let Some(pi) = &self.momentum {
            for a in 1..d {
                for b in a..d {
                    p.set_momentum(a, b, eps * pi.get(&[a, b]));
                }
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakFieldFit {
    /// Slope of log |H − c2 ε²| against log ε.
    pub exponent: f64,
    /// Fitted c2, c3, c4 of H ≈ c2 ε² + c3 ε³ + c4 ε⁴.
    pub coefficients: [f64; 3],
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn least_squares(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    a.svd(true, true).solve(&b, 1e-14).map_err(|_| GravError::DegenerateFit { max_residual: f64::NAN })
}

/// Fits the scaling exponent of the non-quadratic remainder of `h` along
/// `dir` over the schedule `eps` (decreasing, positive).
///
/// Returns `DegenerateFit` when the remainder is at the float noise floor,
/// i.e. the functional is quadratic to machine precision.
pub fn weak_field_expand<F>(h: F, dir: &WeakFieldDirection, eps: &[f64]) -> Result<WeakFieldFit>
where
    F: Fn(&FieldPoint) -> Result<f64>,
{
    if eps.len() < 4 || eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(GravError::ConfigInvalid("ε schedule must be positive, decreasing and have at least 4 entries".into()));
    }
    let values = eps.iter().map(|&e| h(&dir.point(e)?)).collect::<Result<Vec<f64>>>()?;
    // H/ε² = c2 + c3 ε + c4 ε²
    let n = eps.len();
    let a = DMatrix::from_fn(n, 3, |i, j| eps[i].powi(j as i32));
    let b = DVector::from_fn(n, |i, _| values[i] / (eps[i] * eps[i]));
    let c = least_squares(a, b)?;
    let residuals: Vec<f64> = eps.iter().zip(&values).map(|(e, v)| v - c[0] * e * e).collect();
    let floor = values.iter().zip(&residuals).all(|(v, r)| r.abs() <= 1e-12 * v.abs().max(f64::MIN_POSITIVE));
    if floor {
        let max_residual = residuals.iter().fold(0.0, |m: f64, r| m.max(r.abs()));
        return Err(GravError::DegenerateFit { max_residual });
    }
    // slope of log|R| against log ε
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.abs().max(f64::MIN_POSITIVE).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(WeakFieldFit { exponent: sxy / sxx, coefficients: [c[0], c[1], c[2]], eps: eps.to_vec(), values, residuals })
}

/// Logarithmically spaced decreasing schedule from `hi` to `lo`.
pub fn log_schedule(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    let (a, b) = (hi.ln(), lo.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
