use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{DenseTensor, Variance};
use crate::error::{GravError, Result};

/// |det g| below this is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// One metric point: covariant and contravariant components plus the
/// determinant data every canonical formula divides by.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricState {
    g_lower: DenseTensor,
    g_upper: DenseTensor,
    det: f64,
    sqrt_neg_det: f64,
}

/// JSON form `{"d": 4, "g": [[...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricInput {
    pub d: usize,
    pub g: Vec<Vec<f64>>,
}

impl MetricInput {
    pub fn into_metric(self) -> Result<MetricState> {
        if self.g.len() != self.d {
            return Err(GravError::ConfigInvalid(format!(
                "metric has {} rows but d = {}",
                self.g.len(),
                self.d
            )));
        }
        let g = DenseTensor::from_rows(&self.g, [Variance::Lower, Variance::Lower])?;
        invert_metric(&g)
    }
}

impl MetricState {
    pub fn minkowski(d: usize) -> Self {
        let mut diag = vec![1.0; d];
        diag[0] = -1.0;
        Self::diagonal(&diag).expect("Minkowski metric is admissible")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let g = DenseTensor::from_fn(d, &[Variance::Lower, Variance::Lower], |i| {
            if i[0] == i[1] {
                diag[i[0]]
            } else {
                0.0
            }
        });
        invert_metric(&g)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        invert_metric(&DenseTensor::from_rows(rows, [Variance::Lower, Variance::Lower])?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<MetricInput>(s)?.into_metric()
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_input(&self) -> MetricInput {
        let d = self.dim();
        MetricInput {
            d,
            g: (0..d).map(|a| (0..d).map(|b| self.lower(a, b)).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.g_lower.dim()
    }

    #[inline]
    pub fn lower(&self, a: usize, b: usize) -> f64 {
        self.g_lower.data()[a * self.dim() + b]
    }

    #[inline]
    pub fn upper(&self, a: usize, b: usize) -> f64 {
        self.g_upper.data()[a * self.dim() + b]
    }

    pub fn g_lower(&self) -> &DenseTensor {
        &self.g_lower
    }

    pub fn g_upper(&self) -> &DenseTensor {
        &self.g_upper
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn sqrt_neg_det(&self) -> f64 {
        self.sqrt_neg_det
    }

    /// g^00
    pub fn g00(&self) -> f64 {
        self.upper(0, 0)
    }
}

/// Inverts a symmetric Lorentzian metric with the default tolerances.
pub fn invert_metric(g_lower: &DenseTensor) -> Result<MetricState> {
    invert_metric_with_tol(g_lower, SINGULAR_TOL)
}

pub fn invert_metric_with_tol(g_lower: &DenseTensor, singular_tol: f64) -> Result<MetricState> {
    if g_lower.rank() != 2 || g_lower.variance() != [Variance::Lower, Variance::Lower] {
        return Err(GravError::VarianceMismatch("metric must be a rank-2 lower tensor".into()));
    }
    let d = g_lower.dim();
    if d < 2 {
        return Err(GravError::DimensionTooSmall { d, min: 2 });
    }
    let mut asymmetry: f64 = 0.0;
    for a in 0..d {
        for b in 0..a {
            asymmetry = asymmetry.max((g_lower.get(&[a, b]) - g_lower.get(&[b, a])).abs());
        }
    }
    if asymmetry > 1e-12 {
        return Err(GravError::AsymmetricMetric { asymmetry });
    }

    let m = DMatrix::from_row_slice(d, d, g_lower.data());
    let lu = m.clone().lu();
    let det = lu.determinant();
    if !det.is_finite() || det.abs() < singular_tol {
        return Err(GravError::SingularMetric { det });
    }
    if det >= 0.0 {
        return Err(GravError::NonLorentzian { det });
    }
    let inv = lu.try_inverse().ok_or(GravError::SingularMetric { det })?;
    // symmetrize away rounding so g^ab == g^ba bit for bit
    let upper = DenseTensor::from_fn(d, &[Variance::Upper, Variance::Upper], |i| {
        0.5 * (inv[(i[0], i[1])] + inv[(i[1], i[0])])
    });
    let g00 = upper.get(&[0, 0]);
    if g00.abs() < singular_tol {
        return Err(GravError::TemporalDegeneracy { g00 });
    }
    Ok(MetricState {
        g_lower: g_lower.clone(),
        g_upper: upper,
        det,
        sqrt_neg_det: (-det).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_metric;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minkowski_is_self_inverse() {
        let m = MetricState::minkowski(4);
        assert_eq!(m.det(), -1.0);
        assert_eq!(m.sqrt_neg_det(), 1.0);
        assert_eq!(m.g_upper().data(), m.g_lower().data());
    }

    #[test]
    fn diagonal_inversion() {
        let m = MetricState::diagonal(&[-4.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((m.upper(0, 0) + 0.25).abs() < 1e-15);
        assert!((m.det() + 4.0).abs() < 1e-12);
        assert!((m.sqrt_neg_det() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_signature_is_rejected() {
        let err = MetricState::diagonal(&[1.0; 4]).unwrap_err();
        assert!(matches!(err, GravError::NonLorentzian { .. }));
    }

    #[test]
    fn singular_and_temporal_degeneracy() {
        let err = MetricState::diagonal(&[-1.0, 0.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, GravError::SingularMetric { .. }));
        // g^00 = g_11 / det for the 2x2 block [[0,1],[1,0]] embedded: g^00 = 0
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let err = MetricState::from_rows(&rows).unwrap_err();
        assert!(matches!(err, GravError::TemporalDegeneracy { .. }));
    }

    #[test]
    fn json_round_trip() {
        let m = MetricState::diagonal(&[-2.0, 1.0, 3.0]).unwrap();
        let s = serde_json::to_string(&m.to_input()).unwrap();
        let back = MetricState::from_json_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(MetricState::from_json_str(r#"{"d": 3, "g": [[-1,0],[0,1]]}"#).is_err());
    }

    #[test]
    fn inversion_residual_and_double_inversion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 2..=6 {
            for _ in 0..20 {
                let m = random_metric(d, &mut rng);
                let prod = super::super::contract(m.g_upper(), m.g_lower(), &[(1, 0)]).unwrap();
                let resid = prod.max_abs_diff(&DenseTensor::kronecker(d)).unwrap();
                assert!(resid <= 1e-12, "d={d} residual {resid}");
                // inverting the inverse (relabelled as lower) returns g_lower
                let relabelled =
                    DenseTensor::from_data(d, &[Variance::Lower, Variance::Lower], m.g_upper().data().to_vec())
                        .unwrap();
                let back = invert_metric(&relabelled).unwrap();
                let diff = back.g_upper().data().iter().zip(m.g_lower().data()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
                assert!(diff < 1e-10);
            }
        }
    }
}
