//! Legendre transform between velocities and momenta, and the primary
//! constraints left over by the temporal rows.

use crate::canonical::FieldPoint;
use crate::error::{GravError, Result};
use crate::grav::{tensor_b_dsym, tensor_i};
use crate::tensor::{DenseTensor, Variance};

fn dsym_contract(bd: &DenseTensor, p: &FieldPoint, a: usize, b: usize, slot: usize) -> f64 {
    let d = p.dim();
    let mut acc = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            acc += bd.get(&[a, b, 0, mu, nu, slot]) * p.dg(mu, nu, slot);
        }
    }
    acc
}

fn cross_from(bd: &DenseTensor, p: &FieldPoint) -> DenseTensor {
    let d = p.dim();
    DenseTensor::from_fn(d, &[Variance::Upper; 2], |i| {
        (1..d).map(|k| dsym_contract(bd, p, i[0], i[1], k)).sum()
    })
}

/// C^{αβ} = B^{((αβ)0|μνk)} g_μν,k, summed over μ, ν and spatial k.
pub fn cross_coefficient(p: &FieldPoint) -> DenseTensor {
    cross_from(&tensor_b_dsym(p.metric()), p)
}

/// π^γσ = ½√−g B^{((γσ)0|μν0)} g_μν,0 + ½√−g B^{((γσ)0|μνk)} g_μν,k for all
/// γσ, temporal rows included.
pub fn momentum_from_velocity(p: &FieldPoint) -> DenseTensor {
    let d = p.dim();
    let bd = tensor_b_dsym(p.metric());
    let c = cross_from(&bd, p);
    let s = p.metric().sqrt_neg_det();
    DenseTensor::from_fn(d, &[Variance::Upper; 2], |i| {
        0.5 * s * (dsym_contract(&bd, p, i[0], i[1], 0) + c.get(i))
    })
}

/// g_mn,0 = I_mnpq (1/g^00)(2π^pq/√−g − B^{((pq)0|μνk)} g_μν,k) from the
/// spatial momenta of `p`. The result has dimension d with its temporal row
/// and column zero.
pub fn velocity_from_momentum(p: &FieldPoint) -> Result<DenseTensor> {
    let d = p.dim();
    let m = p.metric();
    let i = tensor_i(m)?;
    let g00 = m.g00();
    if g00.abs() < crate::tensor::SINGULAR_TOL {
        return Err(GravError::TemporalDegeneracy { g00 });
    }
    let c = cross_coefficient(p);
    let s = m.sqrt_neg_det();
    let mut out = DenseTensor::zeros(d, &[Variance::Lower; 2]);
    for a in 1..d {
        for b in a..d {
            let mut acc = 0.0;
            for pp in 1..d {
                for q in 1..d {
                    acc += i.component(a, b, pp, q) * (2.0 * p.momentum(pp, q) / s - c.get(&[pp, q]));
                }
            }
            out.set_sym(a, b, acc / g00);
        }
    }
    Ok(out)
}

/// φ^{0σ} = π^{0σ} − ½√−g B^{((0σ)0|μνk)} g_μν,k.
pub fn primary_constraint(p: &FieldPoint, sigma: usize) -> f64 {
    let bd = tensor_b_dsym(p.metric());
    let c: f64 = (1..p.dim()).map(|k| dsym_contract(&bd, p, 0, sigma, k)).sum();
    p.momentum(0, sigma) - 0.5 * p.metric().sqrt_neg_det() * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grav::tensor_b;
    use crate::sampling::random_field_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_worked_case_round_trips() {
        let mut p = FieldPoint::flat(4);
        p.set_velocity(1, 1, 1.0);
        let pi = momentum_from_velocity(&p);
        let expect = [[0.0; 4], [0.0, 0.0, 0.0, 0.0], [0.0, 0.0, -0.5, 0.0], [0.0, 0.0, 0.0, -0.5]];
        for a in 0..4 {
            for b in 0..4 {
                assert!((pi.get(&[a, b]) - expect[a][b]).abs() < 1e-15, "{a}{b}");
            }
        }
        let mut q = FieldPoint::flat(4);
        q.set_momentum_tensor(pi);
        let v = velocity_from_momentum(&q).unwrap();
        assert!((v.get(&[1, 1]) - 1.0).abs() < 1e-15);
        assert!(v.get(&[2, 2]).abs() < 1e-15 && v.get(&[3, 3]).abs() < 1e-15);
    }

    #[test]
    fn zero_inputs_give_zero() {
        let p = FieldPoint::flat(4);
        assert_eq!(momentum_from_velocity(&p).max_abs(), 0.0);
        assert_eq!(velocity_from_momentum(&p).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn momentum_matches_raw_b_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = random_field_point(4, &mut rng);
        let b = tensor_b(p.metric());
        let pi = momentum_from_velocity(&p);
        let s = p.metric().sqrt_neg_det();
        for g in 0..4 {
            for sg in 0..4 {
                let mut acc = 0.0;
                for mu in 0..4 {
                    for nu in 0..4 {
                        for r in 0..4 {
                            let four = b.get(&[g, sg, 0, mu, nu, r])
                                + b.get(&[mu, nu, r, g, sg, 0])
                                + b.get(&[sg, g, 0, mu, nu, r])
                                + b.get(&[mu, nu, r, sg, g, 0]);
                            acc += 0.25 * four * p.dg(mu, nu, r);
                        }
                    }
                }
                assert!((pi.get(&[g, sg]) - 0.5 * s * acc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for d in [3, 4] {
            for _ in 0..20 {
                let p = random_field_point(d, &mut rng);
                let mut q = p.clone();
                q.set_momentum_tensor(momentum_from_velocity(&p));
                let v = velocity_from_momentum(&q).unwrap();
                for a in 1..d {
                    for b in 1..d {
                        let want = p.velocity(a, b);
                        assert!((v.get(&[a, b]) - want).abs() <= 1e-8 * want.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn primary_constraints_vanish_on_shell() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let mut p = random_field_point(4, &mut rng);
            p.set_momentum_tensor(momentum_from_velocity(&p));
            for s in 0..4 {
                assert!(primary_constraint(&p, s).abs() < 1e-12);
            }
            let shifted = p.momentum(0, 0) + 1.0;
            p.set_momentum(0, 0, shifted);
            assert!((primary_constraint(&p, 0) - 1.0).abs() < 1e-12);
        }
    }
}
