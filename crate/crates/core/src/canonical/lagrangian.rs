//! The ΓΓ part of the Einstein–Hilbert Lagrangian in its Christoffel form,
//! its B-coefficient form, and the velocity split of the latter.

use crate::canonical::FieldPoint;
use crate::error::{GravError, Result};
use crate::grav::{tensor_b, tensor_b_sym_with, BSymConvention};

/// Relative agreement demanded between the two Lagrangian forms.
pub const CHRISTOFFEL_RTOL: f64 = 1e-9;

/// ¼√−g B^{αβγμνρ} g_αβ,γ g_μν,ρ with slot 0 of the derivative index
/// meaning the velocity.
pub fn lagrangian_b_form(p: &FieldPoint) -> f64 {
    let d = p.dim();
    let b = tensor_b(p.metric());
    let dg = p.dg_tensor().data();
    let n3 = d * d * d;
    let mut acc = 0.0;
    for x in 0..n3 {
        if dg[x] == 0.0 {
            continue;
        }
        let row = &b.data()[x * n3..(x + 1) * n3];
        acc += dg[x] * row.iter().zip(dg).map(|(c, v)| c * v).sum::<f64>();
    }
    0.25 * p.metric().sqrt_neg_det() * acc
}

/// √−g g^αβ (Γ^μ_αν Γ^ν_βμ − Γ^ν_αβ Γ^μ_νμ).
pub fn lagrangian_christoffel(p: &FieldPoint) -> f64 {
    let d = p.dim();
    let m = p.metric();
    // Γ^μ_αν = ½ g^μλ (g_λα,ν + g_λν,α − g_αν,λ)
    let mut gamma = vec![0.0; d * d * d];
    for mu in 0..d {
        for a in 0..d {
            for nu in 0..d {
                let mut s = 0.0;
                for l in 0..d {
                    s += m.upper(mu, l) * (p.dg(l, a, nu) + p.dg(l, nu, a) - p.dg(a, nu, l));
                }
                gamma[(mu * d + a) * d + nu] = 0.5 * s;
            }
        }
    }
    let gm = |mu: usize, a: usize, nu: usize| gamma[(mu * d + a) * d + nu];
    let trace: Vec<f64> = (0..d).map(|nu| (0..d).map(|mu| gm(mu, nu, mu)).sum()).collect();
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            let gab = m.upper(a, b);
            if gab == 0.0 {
                continue;
            }
            let mut t = 0.0;
            for mu in 0..d {
                for nu in 0..d {
                    t += gm(mu, a, nu) * gm(nu, b, mu);
                }
            }
            for nu in 0..d {
                t -= gm(nu, a, b) * trace[nu];
            }
            acc += gab * t;
        }
    }
    m.sqrt_neg_det() * acc
}

/// The B-form Lagrangian, cross-checked against the Christoffel form.
pub fn lagrangian_gamma_gamma(p: &FieldPoint) -> Result<f64> {
    let b_form = lagrangian_b_form(p);
    let christoffel = lagrangian_christoffel(p);
    let denom = b_form.abs().max(christoffel.abs());
    let relative = if denom == 0.0 { 0.0 } else { (b_form - christoffel).abs() / denom };
    if relative > CHRISTOFFEL_RTOL {
        return Err(GravError::ChristoffelMismatch { b_form, christoffel, relative });
    }
    Ok(b_form)
}

/// Kinetic, cross and purely spatial parts of the Lagrangian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagrangianSplit {
    pub kinetic: f64,
    pub cross: f64,
    pub spatial: f64,
}

impl LagrangianSplit {
    pub fn total(&self) -> f64 {
        self.kinetic + self.cross + self.spatial
    }
}

pub fn lagrangian_split(p: &FieldPoint) -> LagrangianSplit {
    lagrangian_split_with(p, BSymConvention::default())
}

/// ¼√−g B^{αβ0μν0} v v + ½√−g B^{(αβ0|μνk)} v g_μν,k + ¼√−g B^{αβkμνl} g_,k g_,l
/// with the symmetrized coefficient built under `convention`.
pub fn lagrangian_split_with(p: &FieldPoint, convention: BSymConvention) -> LagrangianSplit {
    let d = p.dim();
    let b = tensor_b(p.metric());
    let bs = tensor_b_sym_with(p.metric(), convention);
    let (mut kinetic, mut cross, mut spatial) = (0.0, 0.0, 0.0);
    for a in 0..d {
        for bb in 0..d {
            let va = p.velocity(a, bb);
            for mu in 0..d {
                for nu in 0..d {
                    let vm = p.velocity(mu, nu);
                    kinetic += b.get(&[a, bb, 0, mu, nu, 0]) * va * vm;
                    for k in 1..d {
                        cross += bs.get(&[a, bb, 0, mu, nu, k]) * va * p.spatial(mu, nu, k);
                        for l in 1..d {
                            spatial += b.get(&[a, bb, k, mu, nu, l]) * p.spatial(a, bb, k) * p.spatial(mu, nu, l);
                        }
                    }
                }
            }
        }
    }
    let s = p.metric().sqrt_neg_det();
    LagrangianSplit {
        kinetic: 0.25 * s * kinetic,
        cross: 0.5 * s * cross,
        spatial: 0.25 * s * spatial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_field_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_zero_derivatives_vanish() {
        let p = FieldPoint::flat(4);
        assert_eq!(lagrangian_gamma_gamma(&p).unwrap(), 0.0);
        assert_eq!(lagrangian_split(&p).total(), 0.0);
    }

    #[test]
    fn both_forms_agree_and_scale_quadratically() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 3..=5 {
            for _ in 0..10 {
                let mut p = random_field_point(d, &mut rng);
                let l = lagrangian_gamma_gamma(&p).unwrap();
                p.scale_derivatives(2.0);
                let l2 = lagrangian_gamma_gamma(&p).unwrap();
                assert!((l2 - 4.0 * l).abs() <= 1e-12 * l.abs().max(1.0));
            }
        }
    }

    #[test]
    fn split_sums_to_full_lagrangian() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let p = random_field_point(4, &mut rng);
            let split = lagrangian_split(&p);
            assert!((split.total() - lagrangian_b_form(&p)).abs() < 1e-10);
        }
    }

    #[test]
    fn split_parts_vanish_as_expected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut p = random_field_point(4, &mut rng);
        p.clear_velocity();
        let s = lagrangian_split(&p);
        assert_eq!((s.kinetic, s.cross), (0.0, 0.0));
        let mut q = random_field_point(4, &mut rng);
        q.clear_spatial();
        let s = lagrangian_split(&q);
        assert_eq!((s.cross, s.spatial), (0.0, 0.0));
    }

    #[test]
    fn slot_swap_symmetrization_breaks_the_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_field_point(4, &mut rng);
        let literal = lagrangian_split_with(&p, BSymConvention::SlotSwap).total();
        assert!((literal - lagrangian_b_form(&p)).abs() > 1e-3);
    }
}
