//! The specific multi-index objects of the canonical formulation: the delta
//! tensors, the spatial quadratic form `I_mnpq`, the six-index coefficient
//! tensor `B^{αβγμνρ}` and its symmetrizations, the spatial projector `e^{μν}`
//! and its quartic companion `E^{μνγσ}`.
//!
//! Every tensor is materialized densely; at d = 6 the six-index objects hold
//! 46656 components.

use serde::{Deserialize, Serialize};

use crate::error::{GravError, Result};
use crate::tensor::{DenseTensor, MetricState, Variance};

use Variance::{Lower, Upper};

const UP6: [Variance; 6] = [Upper; 6];

/// Δ^{μν}_{αβ} = ½(δ^μ_α δ^ν_β + δ^ν_α δ^μ_β), the fundamental bracket
/// {g_αβ, π^μν}.
pub fn delta_mixed(d: usize) -> DenseTensor {
    DenseTensor::from_fn(d, &[Upper, Upper, Lower, Lower], |i| delta_mixed_component(i[0], i[1], i[2], i[3]))
}

#[inline]
pub fn delta_mixed_component(mu: usize, nu: usize, alpha: usize, beta: usize) -> f64 {
    let k = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    0.5 * (k(mu, alpha) * k(nu, beta) + k(nu, alpha) * k(mu, beta))
}

/// Δ^{μν;αβ} = g^{αα'} g^{ββ'} Δ^{μν}_{α'β'} = ½(g^{αμ}g^{βν} + g^{αν}g^{βμ}).
pub fn delta_upper(m: &MetricState) -> DenseTensor {
    DenseTensor::from_fn(m.dim(), &[Upper; 4], |i| delta_upper_component(m, i[0], i[1], i[2], i[3]))
}

#[inline]
pub fn delta_upper_component(m: &MetricState, mu: usize, nu: usize, alpha: usize, beta: usize) -> f64 {
    0.5 * (m.upper(alpha, mu) * m.upper(beta, nu) + m.upper(alpha, nu) * m.upper(beta, mu))
}

/// The rank-4 spatial tensor `I_mnpq = g_mn g_pq / (d-2) - g_mp g_nq`.
///
/// Stored over the d-1 spatial axes. [`component`](Self::component) takes
/// spacetime labels `1..d`; [`tensor`](Self::tensor) exposes the raw
/// 0-based (d-1)-dimensional storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialQuadraticForm {
    tensor: DenseTensor,
}

impl SpatialQuadraticForm {
    pub fn spacetime_dim(&self) -> usize {
        self.tensor.dim() + 1
    }

    #[inline]
    pub fn component(&self, m: usize, n: usize, p: usize, q: usize) -> f64 {
        self.tensor.get(&[m - 1, n - 1, p - 1, q - 1])
    }

    pub fn tensor(&self) -> &DenseTensor {
        &self.tensor
    }
}

pub fn tensor_i(m: &MetricState) -> Result<SpatialQuadraticForm> {
    let d = m.dim();
    if d < 3 {
        return Err(GravError::DimensionTooSmall { d, min: 3 });
    }
    let inv = 1.0 / (d as f64 - 2.0);
    let tensor = DenseTensor::from_fn(d - 1, &[Lower; 4], |i| {
        let g = |a: usize, b: usize| m.lower(a + 1, b + 1);
        inv * (g(i[0], i[1]) * g(i[2], i[3])) - g(i[0], i[2]) * g(i[1], i[3])
    });
    Ok(SpatialQuadraticForm { tensor })
}

/// One component of B^{αβγμνρ}.
#[inline]
pub fn b_component(m: &MetricState, a: usize, b: usize, c: usize, mu: usize, nu: usize, rho: usize) -> f64 {
    let g = |x: usize, y: usize| m.upper(x, y);
    g(a, b) * g(c, rho) * g(mu, nu) - g(a, mu) * g(b, nu) * g(c, rho) + 2.0 * g(a, rho) * g(b, nu) * g(c, mu)
        - 2.0 * g(a, b) * g(c, mu) * g(nu, rho)
}

/// B^{αβγμνρ} = g^αβ g^γρ g^μν − g^αμ g^βν g^γρ + 2 g^αρ g^βν g^γμ − 2 g^αβ g^γμ g^νρ.
pub fn tensor_b(m: &MetricState) -> DenseTensor {
    DenseTensor::from_fn(m.dim(), &UP6, |i| b_component(m, i[0], i[1], i[2], i[3], i[4], i[5]))
}

/// How the "(αβγ|μνρ)" symmetrization pairs the two index triples.
///
/// `PairExchange` averages B over exchange of the two triples,
/// ½(B^{αβγμνρ} + B^{μνραβγ}). This is the reading under which the
/// velocity split of the ΓΓ Lagrangian, the momentum definition and the
/// dynamical Hamiltonian are mutually exact, and it is what the canonical
/// module uses.
///
/// `SlotSwap` is the index-literal ½(B^{αβγμνρ} + B^{αβρμνγ}); contracted
/// against (velocity, spatial derivative) it does not reproduce the cross
/// term of the Lagrangian and is kept for comparison only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BSymConvention {
    #[default]
    PairExchange,
    SlotSwap,
}

#[inline]
fn b_sym_from(b: &DenseTensor, i: &[usize], convention: BSymConvention) -> f64 {
    let partner = match convention {
        BSymConvention::PairExchange => [i[3], i[4], i[5], i[0], i[1], i[2]],
        BSymConvention::SlotSwap => [i[0], i[1], i[5], i[3], i[4], i[2]],
    };
    0.5 * (b.get(i) + b.get(&partner))
}

/// B^{(αβγ|μνρ)} with the default convention.
pub fn tensor_b_sym(m: &MetricState) -> DenseTensor {
    tensor_b_sym_with(m, BSymConvention::default())
}

pub fn tensor_b_sym_with(m: &MetricState, convention: BSymConvention) -> DenseTensor {
    let b = tensor_b(m);
    DenseTensor::from_fn(m.dim(), &UP6, |i| b_sym_from(&b, i, convention))
}

/// B^{((αβ)γ|μνρ)}: the four-term average, additionally symmetric in α↔β.
pub fn tensor_b_dsym(m: &MetricState) -> DenseTensor {
    tensor_b_dsym_with(m, BSymConvention::default())
}

pub fn tensor_b_dsym_with(m: &MetricState, convention: BSymConvention) -> DenseTensor {
    let b = tensor_b(m);
    DenseTensor::from_fn(m.dim(), &UP6, |i| {
        let swapped = [i[1], i[0], i[2], i[3], i[4], i[5]];
        0.5 * (b_sym_from(&b, i, convention) + b_sym_from(&b, &swapped, convention))
    })
}

/// e^{μν} = g^{μν} − g^{0μ} g^{0ν} / g^{00}.
pub fn tensor_e(m: &MetricState) -> Result<DenseTensor> {
    let g00 = checked_g00(m)?;
    Ok(DenseTensor::from_fn(m.dim(), &[Upper, Upper], |i| {
        m.upper(i[0], i[1]) - m.upper(0, i[0]) * m.upper(0, i[1]) / g00
    }))
}

/// E^{μνγσ} = e^{μν} e^{γσ} − e^{μγ} e^{νσ}.
pub fn tensor_big_e(m: &MetricState) -> Result<DenseTensor> {
    let e = tensor_e(m)?;
    Ok(DenseTensor::from_fn(m.dim(), &[Upper; 4], |i| {
        e.get(&[i[0], i[1]]) * e.get(&[i[2], i[3]]) - e.get(&[i[0], i[2]]) * e.get(&[i[1], i[3]])
    }))
}

/// E written directly in inverse-metric components, without going through e.
pub fn tensor_big_e_expanded(m: &MetricState) -> Result<DenseTensor> {
    let g00 = checked_g00(m)?;
    let g = |a: usize, b: usize| m.upper(a, b);
    Ok(DenseTensor::from_fn(m.dim(), &[Upper; 4], |i| {
        let (mu, nu, ga, si) = (i[0], i[1], i[2], i[3]);
        g(mu, nu) * g(ga, si) - g(mu, ga) * g(nu, si)
            - (g(0, mu) * g(0, nu) * g(ga, si) + g(mu, nu) * g(0, ga) * g(0, si)
                - g(mu, ga) * g(0, nu) * g(0, si)
                - g(0, mu) * g(0, ga) * g(nu, si))
                / g00
    }))
}

fn checked_g00(m: &MetricState) -> Result<f64> {
    let g00 = m.g00();
    if g00.abs() < crate::tensor::SINGULAR_TOL {
        return Err(GravError::TemporalDegeneracy { g00 });
    }
    Ok(g00)
}

/// Restricts every axis of `t` to the spatial range 1..d, returning a
/// (d-1)-dimensional tensor indexed from 0.
pub fn spatial_block(t: &DenseTensor) -> DenseTensor {
    let shifted = |idx: &[usize]| idx.iter().map(|i| i + 1).collect::<Vec<_>>();
    DenseTensor::from_fn(t.dim() - 1, t.variance(), |idx| t.get(&shifted(idx)))
}

/// max over (m,n,k,l) of |I_mnpq E^pqkl − δ^k_m δ^l_n|.
pub fn check_ie_inverse(m: &MetricState) -> Result<f64> {
    let i = tensor_i(m)?;
    let e = spatial_block(&tensor_big_e(m)?);
    let n = m.dim() - 1;
    let it = i.tensor();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for p in 0..n {
                        for q in 0..n {
                            acc += it.get(&[a, b, p, q]) * e.get(&[p, q, k, l]);
                        }
                    }
                    let target = if a == k && b == l { 1.0 } else { 0.0 };
                    worst = worst.max((acc - target).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_metric, random_symmetric};
    use crate::tensor::contract;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Term-by-term B oracle written against raw matrix entries.
    fn b_oracle(gi: &nalgebra::DMatrix<f64>, idx: [usize; 6]) -> f64 {
        let [a, b, c, mu, nu, rho] = idx;
        let t1 = gi[(a, b)] * gi[(c, rho)] * gi[(mu, nu)];
        let t2 = gi[(a, mu)] * gi[(b, nu)] * gi[(c, rho)];
        let t3 = gi[(a, rho)] * gi[(b, nu)] * gi[(c, mu)];
        let t4 = gi[(a, b)] * gi[(c, mu)] * gi[(nu, rho)];
        t1 - t2 + 2.0 * t3 - 2.0 * t4
    }

    fn inverse_matrix(m: &MetricState) -> nalgebra::DMatrix<f64> {
        let d = m.dim();
        nalgebra::DMatrix::from_fn(d, d, |i, j| m.lower(i, j)).try_inverse().unwrap()
    }

    #[test]
    fn i_tensor_flat_values() {
        let flat4 = MetricState::minkowski(4);
        let i4 = tensor_i(&flat4).unwrap();
        assert_eq!(i4.component(1, 1, 1, 1), -0.5);
        assert_eq!(i4.component(1, 1, 2, 2), 0.5);
        let i3 = tensor_i(&MetricState::minkowski(3)).unwrap();
        assert_eq!(i3.component(1, 1, 1, 1), 0.0);
        assert!(matches!(tensor_i(&MetricState::minkowski(2)), Err(GravError::DimensionTooSmall { d: 2, .. })));
    }

    #[test]
    fn i_tensor_pair_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_metric(5, &mut rng);
        let i = tensor_i(&m).unwrap();
        for idx in i.tensor().indices() {
            let swapped = [idx[2], idx[3], idx[0], idx[1]];
            assert_eq!(i.tensor().get(&idx), i.tensor().get(&swapped));
        }
    }

    #[test]
    fn b_flat_values() {
        let b = tensor_b(&MetricState::minkowski(4));
        assert_eq!(b.get(&[0; 6]), 0.0);
        assert_eq!(b.get(&[1, 1, 0, 0, 0, 0]), -1.0);
        for m in 1..4 {
            for n in 1..4 {
                for p in 1..4 {
                    for q in 1..4 {
                        let k = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                        let expected = -(k(m, n) * k(p, q) - k(m, p) * k(n, q));
                        assert_eq!(b.get(&[m, n, 0, p, q, 0]), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn b_matches_oracle_on_random_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_metric(4, &mut rng);
        let gi = inverse_matrix(&m);
        let b = tensor_b(&m);
        for idx in b.indices() {
            let o = b_oracle(&gi, idx.clone().try_into().unwrap());
            assert!((b.get(&idx) - o).abs() < 1e-12);
        }
    }

    #[test]
    fn b_sym_is_average_of_two_lookups() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_metric(4, &mut rng);
        let b = tensor_b(&m);
        for conv in [BSymConvention::PairExchange, BSymConvention::SlotSwap] {
            let bs = tensor_b_sym_with(&m, conv);
            let mut worst: f64 = 0.0;
            for i in bs.indices() {
                let partner = match conv {
                    BSymConvention::PairExchange => [i[3], i[4], i[5], i[0], i[1], i[2]],
                    BSymConvention::SlotSwap => [i[0], i[1], i[5], i[3], i[4], i[2]],
                };
                worst = worst.max((bs.get(&i) - 0.5 * (b.get(&i) + b.get(&partner))).abs());
                // the partner lookup gives the same value by construction
                assert!((bs.get(&i) - bs.get(&partner)).abs() < 1e-15);
            }
            assert!(worst < 1e-13);
        }
        assert_eq!(tensor_b_sym(&MetricState::minkowski(4)).get(&[0; 6]), 0.0);
    }

    #[test]
    fn b_dsym_four_term_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_metric(4, &mut rng);
        let b = tensor_b(&m);
        let bd = tensor_b_dsym(&m);
        let mut worst: f64 = 0.0;
        for i in bd.indices() {
            let (a, be, c, mu, nu, rho) = (i[0], i[1], i[2], i[3], i[4], i[5]);
            let four = b.get(&[a, be, c, mu, nu, rho])
                + b.get(&[mu, nu, rho, a, be, c])
                + b.get(&[be, a, c, mu, nu, rho])
                + b.get(&[mu, nu, rho, be, a, c]);
            worst = worst.max((bd.get(&i) - 0.25 * four).abs());
            assert_eq!(bd.get(&i), bd.get(&[be, a, c, mu, nu, rho]));
        }
        assert!(worst < 1e-13);
    }

    #[test]
    fn b_dsym_degenerate_flat_case() {
        // with α = β and pair exchange mapping (1,1,0|1,1,0) onto itself all
        // four terms coincide
        let flat = MetricState::minkowski(4);
        let bd = tensor_b_dsym(&flat);
        let b = tensor_b(&flat);
        assert_eq!(bd.get(&[1, 1, 0, 1, 1, 0]), b.get(&[1, 1, 0, 1, 1, 0]));
    }

    #[test]
    fn b_dsym_reduces_to_b_sym_on_diagonal_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_metric(4, &mut rng);
        let bs = tensor_b_sym(&m);
        let bd = tensor_b_dsym(&m);
        for i in bd.indices().filter(|i| i[0] == i[1]) {
            assert!((bd.get(&i) - bs.get(&i)).abs() < 1e-15);
        }
    }

    #[test]
    fn e_tensor_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let flat = tensor_e(&MetricState::minkowski(4)).unwrap();
        for m in 1..4 {
            for n in 1..4 {
                assert_eq!(flat.get(&[m, n]), if m == n { 1.0 } else { 0.0 });
            }
        }
        for _ in 0..20 {
            let m = random_metric(4, &mut rng);
            let e = tensor_e(&m).unwrap();
            for nu in 0..4 {
                assert!(e.get(&[0, nu]).abs() < 1e-15);
            }
            // spatial block of e inverts the spatial block of g
            let mut worst: f64 = 0.0;
            for a in 1..4 {
                for k in 1..4 {
                    let s: f64 = (1..4).map(|n| e.get(&[a, n]) * m.lower(n, k)).sum();
                    worst = worst.max((s - if a == k { 1.0 } else { 0.0 }).abs());
                }
            }
            assert!(worst < 1e-11);
        }
    }

    #[test]
    fn big_e_flat_values_and_forms_agree() {
        let flat = tensor_big_e(&MetricState::minkowski(4)).unwrap();
        assert_eq!(flat.get(&[1, 1, 2, 2]), 1.0);
        assert_eq!(flat.get(&[1, 2, 1, 2]), -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let m = random_metric(4, &mut rng);
            let e = tensor_big_e(&m).unwrap();
            let ex = tensor_big_e_expanded(&m).unwrap();
            assert!(e.max_abs_diff(&ex).unwrap() < 1e-12);
            for i in e.indices() {
                assert!((e.get(&i) - e.get(&[i[2], i[3], i[0], i[1]])).abs() < 1e-12);
                if i.contains(&0) {
                    assert!(e.get(&i).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ie_identity_flat_and_random() {
        assert!(check_ie_inverse(&MetricState::minkowski(4)).unwrap() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for d in 3..=5 {
            for _ in 0..10 {
                let m = random_metric(d, &mut rng);
                assert!(check_ie_inverse(&m).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn delta_mixed_is_identity_on_symmetric_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let s = random_symmetric(4, Lower, 1.0, &mut rng);
        let out = contract(&delta_mixed(4), &s, &[(0, 0), (1, 1)]).unwrap();
        assert!(out.max_abs_diff(&s).unwrap() < 1e-15);
    }

    #[test]
    fn delta_upper_raises_mixed_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let m = random_metric(4, &mut rng);
        let du = delta_upper(&m);
        // g^{αα'} g^{ββ'} Δ^{μν}_{α'β'} via two contractions
        let step = contract(&delta_mixed(4), m.g_upper(), &[(2, 1)]).unwrap(); // μ ν β' α
        let raised = contract(&step, m.g_upper(), &[(2, 1)]).unwrap(); // μ ν α β
        assert!(raised.max_abs_diff(&du).unwrap() < 1e-14);
    }
}
