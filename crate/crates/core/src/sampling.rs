//! Seeded generators for random admissible metrics and field points. All
//! randomness in the toolkit flows through a caller-supplied RNG.

use rand::Rng;

use crate::canonical::FieldPoint;
use crate::tensor::{DenseTensor, MetricState, Variance};

/// Random symmetric rank-2 tensor with entries in `[-scale, scale]`.
pub fn random_symmetric<R: Rng + ?Sized>(d: usize, variance: Variance, scale: f64, rng: &mut R) -> DenseTensor {
    let mut t = DenseTensor::zeros(d, &[variance, variance]);
    for a in 0..d {
        for b in a..d {
            t.set_sym(a, b, rng.gen_range(-scale..=scale));
        }
    }
    t
}

/// Random Lorentzian metric near Minkowski: η plus a symmetric perturbation of
/// size up to 0.3, resampled until the spatial block is comfortably positive
/// definite and g^00 stays away from zero.
pub fn random_metric<R: Rng + ?Sized>(d: usize, rng: &mut R) -> MetricState {
    random_metric_with_spread(d, 0.3, rng)
}

pub fn random_metric_with_spread<R: Rng + ?Sized>(d: usize, spread: f64, rng: &mut R) -> MetricState {
    loop {
        let mut g = random_symmetric(d, Variance::Lower, spread, rng);
        for a in 0..d {
            let eta = if a == 0 { -1.0 } else { 1.0 };
            g.set(&[a, a], g.get(&[a, a]) + eta);
        }
        if let Ok(m) = crate::tensor::invert_metric(&g) {
            let spatial = nalgebra::DMatrix::from_fn(d - 1, d - 1, |i, j| m.lower(i + 1, j + 1));
            let min_eig = spatial.symmetric_eigenvalues().min();
            if m.g00() < -0.2 && min_eig > 0.2 {
                return m;
            }
        }
    }
}

/// Random field point on a random metric: velocities, spatial derivatives
/// and momenta all populated with O(1) entries.
pub fn random_field_point<R: Rng + ?Sized>(d: usize, rng: &mut R) -> FieldPoint {
    let metric = random_metric(d, rng);
    random_fields_on(metric, rng)
}

pub fn random_fields_on<R: Rng + ?Sized>(metric: MetricState, rng: &mut R) -> FieldPoint {
    let d = metric.dim();
    let mut p = FieldPoint::new(metric);
    for c in 0..d {
        for a in 0..d {
            for b in a..d {
                p.set_dg(a, b, c, rng.gen_range(-1.0..=1.0));
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            p.set_momentum(a, b, rng.gen_range(-1.0..=1.0));
        }
    }
    p
}
