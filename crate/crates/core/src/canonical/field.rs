use crate::tensor::{DenseTensor, MetricState, Variance};

/// One point of the canonical field: the metric, its first derivatives and
/// the conjugate momenta.
///
/// `dg` holds g_{αβ,γ}; slot γ = 0 is the velocity g_{αβ,0}, slots γ ≥ 1 the
/// spatial derivatives. Both `dg` (in αβ) and `momentum` are kept symmetric
/// by the setters.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPoint {
    metric: MetricState,
    dg: DenseTensor,
    momentum: DenseTensor,
}

impl FieldPoint {
    pub fn new(metric: MetricState) -> Self {
        let d = metric.dim();
        Self {
            metric,
            dg: DenseTensor::zeros(d, &[Variance::Lower; 3]),
            momentum: DenseTensor::zeros(d, &[Variance::Upper; 2]),
        }
    }

    pub fn flat(d: usize) -> Self {
        Self::new(MetricState::minkowski(d))
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &MetricState {
        &self.metric
    }

    /// Replaces the metric, keeping derivatives and momenta.
    pub fn with_metric(mut self, metric: MetricState) -> Self {
        assert_eq!(metric.dim(), self.dim());
        self.metric = metric;
        self
    }

    pub fn dg_tensor(&self) -> &DenseTensor {
        &self.dg
    }

    pub fn momentum_tensor(&self) -> &DenseTensor {
        &self.momentum
    }

    /// g_{ab,c}
    #[inline]
    pub fn dg(&self, a: usize, b: usize, c: usize) -> f64 {
        let d = self.dim();
        self.dg.data()[(a * d + b) * d + c]
    }

    #[inline]
    pub fn velocity(&self, a: usize, b: usize) -> f64 {
        self.dg(a, b, 0)
    }

    /// g_{ab,k}, k ≥ 1
    #[inline]
    pub fn spatial(&self, a: usize, b: usize, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.dg(a, b, k)
    }

    #[inline]
    pub fn momentum(&self, a: usize, b: usize) -> f64 {
        self.momentum.data()[a * self.dim() + b]
    }

    pub fn set_dg(&mut self, a: usize, b: usize, c: usize, value: f64) {
        self.dg.set(&[a, b, c], value);
        self.dg.set(&[b, a, c], value);
    }

    pub fn set_velocity(&mut self, a: usize, b: usize, value: f64) {
        self.set_dg(a, b, 0, value);
    }

    pub fn set_momentum(&mut self, a: usize, b: usize, value: f64) {
        self.momentum.set_sym(a, b, value);
    }

    /// Replaces all momenta; `pi` must be a symmetric rank-2 tensor.
    pub fn set_momentum_tensor(&mut self, pi: DenseTensor) {
        assert_eq!(pi.dim(), self.dim());
        self.momentum = DenseTensor::from_data(self.dim(), &[Variance::Upper; 2], pi.data().to_vec())
            .expect("rank-2 momentum");
    }

    pub fn clear_velocity(&mut self) {
        let d = self.dim();
        for a in 0..d {
            for b in 0..d {
                self.dg.set(&[a, b, 0], 0.0);
            }
        }
    }

    pub fn clear_spatial(&mut self) {
        let d = self.dim();
        for a in 0..d {
            for b in 0..d {
                for k in 1..d {
                    self.dg.set(&[a, b, k], 0.0);
                }
            }
        }
    }

    /// Multiplies every derivative (velocity and spatial) by `factor`.
    pub fn scale_derivatives(&mut self, factor: f64) {
        self.dg.data_mut().iter_mut().for_each(|x| *x *= factor);
    }

    pub fn scale_momentum(&mut self, factor: f64) {
        self.momentum.data_mut().iter_mut().for_each(|x| *x *= factor);
    }
}
