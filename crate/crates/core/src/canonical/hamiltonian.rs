//! Dynamical and total Hamiltonians, the rescaled Hamiltonian and its
//! spatial-tensor form, degree-of-freedom counting and the τ–t relation.

use crate::canonical::{bracket_pi_with_bg, cross_coefficient, primary_constraint, FieldPoint};
use crate::error::{GravError, Result};
use crate::grav::{spatial_block, tensor_b, tensor_big_e, tensor_i, SpatialQuadraticForm};
use crate::tensor::{DenseTensor, MetricState, Variance, SINGULAR_TOL};

fn checked_g00(m: &MetricState) -> Result<f64> {
    let g00 = m.g00();
    if g00.abs() < SINGULAR_TOL {
        return Err(GravError::TemporalDegeneracy { g00 });
    }
    Ok(g00)
}

/// B^{μνkαβl} g_μν,k g_αβ,l over spatial k, l.
fn potential_u(p: &FieldPoint) -> f64 {
    let d = p.dim();
    let b = tensor_b(p.metric());
    let mut acc = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            for k in 1..d {
                let x = p.spatial(mu, nu, k);
                if x == 0.0 {
                    continue;
                }
                for a in 0..d {
                    for bb in 0..d {
                        for l in 1..d {
                            acc += b.get(&[mu, nu, k, a, bb, l]) * x * p.spatial(a, bb, l);
                        }
                    }
                }
            }
        }
    }
    acc
}

/// Σ I_mnpq x^mn y^pq over spatial indices.
fn i_contract(i: &SpatialQuadraticForm, d: usize, x: impl Fn(usize, usize) -> f64, y: impl Fn(usize, usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for m in 1..d {
        for n in 1..d {
            let xv = x(m, n);
            if xv == 0.0 {
                continue;
            }
            for pp in 1..d {
                for q in 1..d {
                    acc += i.component(m, n, pp, q) * xv * y(pp, q);
                }
            }
        }
    }
    acc
}

/// H_c = (1/(√−g g^00)) I ππ − (1/g^00) I π C + ¼√−g [(1/g^00) I C C − B g_,k g_,l]
/// with C^{pq} = B^{((pq)0|μνk)} g_μν,k. Only spatial momenta enter.
pub fn hamiltonian_hc(p: &FieldPoint) -> Result<f64> {
    let d = p.dim();
    let m = p.metric();
    let g00 = checked_g00(m)?;
    let i = tensor_i(m)?;
    let s = m.sqrt_neg_det();
    let c = cross_coefficient(p);
    let pi = |a: usize, b: usize| p.momentum(a, b);
    let cc = |a: usize, b: usize| c.get(&[a, b]);
    let kinetic = i_contract(&i, d, pi, pi) / (s * g00);
    let cross = -i_contract(&i, d, pi, cc) / g00;
    let potential = 0.25 * s * (i_contract(&i, d, cc, cc) / g00 - potential_u(p));
    Ok(kinetic + cross + potential)
}

/// √−g g^00 H_c split into its classical value and the operator-ordering
/// bracket term −√−g I_mnpq {π^mn, B^{(pq0|μνk)} g_μν,k}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianTilde {
    pub classical: f64,
    pub ordering: f64,
}

impl HamiltonianTilde {
    pub fn total(&self) -> f64 {
        self.classical + self.ordering
    }
}

/// I ππ − √−g I π C + ¼(−g)[I C C − g^00 B g_,k g_,l], plus the separate
/// ordering term.
pub fn hamiltonian_tilde(p: &FieldPoint) -> Result<HamiltonianTilde> {
    let d = p.dim();
    let m = p.metric();
    let g00 = checked_g00(m)?;
    let i = tensor_i(m)?;
    let s = m.sqrt_neg_det();
    let c = cross_coefficient(p);
    let pi = |a: usize, b: usize| p.momentum(a, b);
    let cc = |a: usize, b: usize| c.get(&[a, b]);
    let classical = i_contract(&i, d, pi, pi) - s * i_contract(&i, d, pi, cc)
        + 0.25 * (-m.det()) * (i_contract(&i, d, cc, cc) - g00 * potential_u(p));
    let mut ordering = 0.0;
    for pp in 1..d {
        for q in 1..d {
            let br = bracket_pi_with_bg(p, pp, q);
            for mm in 1..d {
                for n in 1..d {
                    ordering += i.component(mm, n, pp, q) * br.get(&[mm, n]);
                }
            }
        }
    }
    Ok(HamiltonianTilde { classical, ordering: -s * ordering })
}

/// The spatial tensor H̃^{pqmn} = π^pq π^mn + S^pqmn, stored over 0-based
/// spatial axes (axis value j is spacetime index j+1).
///
/// The potential's E-term is normalized by (d−1)², the value of
/// I_mnpq E^pqmn, so that I_mnpq H̃^pqmn reproduces `hamiltonian_tilde`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTensor {
    /// π^pq π^mn
    pub kinetic: DenseTensor,
    /// Classical part of S^pqmn.
    pub s_classical: DenseTensor,
    /// −√−g {π^pq, B^{(mn0|μνk)} g_μν,k}
    pub ordering: DenseTensor,
}

impl HamiltonianTensor {
    pub fn classical(&self) -> DenseTensor {
        self.kinetic.lin_comb(1.0, &self.s_classical, 1.0).expect("same shape")
    }

    /// I_mnpq H^pqmn over the classical part.
    pub fn contract(&self, i: &SpatialQuadraticForm) -> f64 {
        contract_i_with(i, &self.classical())
    }
}

/// I_mnpq T^pqmn for a spatial rank-4 tensor.
pub fn contract_i_with(i: &SpatialQuadraticForm, t: &DenseTensor) -> f64 {
    let n = t.dim();
    let it = i.tensor();
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    acc += it.get(&[a, b, c, e]) * t.get(&[c, e, a, b]);
                }
            }
        }
    }
    acc
}

pub fn hamiltonian_tensor(p: &FieldPoint) -> Result<HamiltonianTensor> {
    let d = p.dim();
    let m = p.metric();
    let g00 = checked_g00(m)?;
    tensor_i(m)?;
    let s = m.sqrt_neg_det();
    let c = cross_coefficient(p);
    let e = spatial_block(&tensor_big_e(m)?);
    let u = potential_u(p);
    let norm = ((d - 1) * (d - 1)) as f64;
    let up4 = [Variance::Upper; 4];
    let sp = |j: usize| j + 1;
    let kinetic = DenseTensor::from_fn(d - 1, &up4, |i| p.momentum(sp(i[0]), sp(i[1])) * p.momentum(sp(i[2]), sp(i[3])));
    let s_classical = DenseTensor::from_fn(d - 1, &up4, |i| {
        let (pp, q, mm, n) = (sp(i[0]), sp(i[1]), sp(i[2]), sp(i[3]));
        -s * c.get(&[pp, q]) * p.momentum(mm, n)
            + 0.25 * (-m.det()) * (c.get(&[mm, n]) * c.get(&[pp, q]) - g00 * e.get(i) * u / norm)
    });
    let brackets: Vec<DenseTensor> =
        (0..(d - 1) * (d - 1)).map(|j| bracket_pi_with_bg(p, sp(j / (d - 1)), sp(j % (d - 1)))).collect();
    let ordering = DenseTensor::from_fn(d - 1, &up4, |i| {
        -s * brackets[i[2] * (d - 1) + i[3]].get(&[sp(i[0]), sp(i[1])])
    });
    Ok(HamiltonianTensor { kinetic, s_classical, ordering })
}

/// H_T = H_c + g_00,0 φ^00 + 2 g_0k,0 φ^0k; `temporal_velocities[σ]` is g_0σ,0.
pub fn total_hamiltonian(p: &FieldPoint, temporal_velocities: &[f64]) -> Result<f64> {
    let d = p.dim();
    if temporal_velocities.len() != d {
        return Err(GravError::ShapeMismatch(format!(
            "expected {d} temporal velocities, got {}",
            temporal_velocities.len()
        )));
    }
    let mut h = hamiltonian_hc(p)?;
    h += temporal_velocities[0] * primary_constraint(p, 0);
    for (k, v) in temporal_velocities.iter().enumerate().skip(1) {
        h += 2.0 * v * primary_constraint(p, k);
    }
    Ok(h)
}

/// f = d(d+1)/2 − 2d propagating degrees of freedom.
pub fn dof_count(d: usize) -> Result<usize> {
    if d < 3 {
        return Err(GravError::DimensionTooSmall { d, min: 3 });
    }
    Ok(d * (d + 1) / 2 - 2 * d)
}

/// τ = t / (√−g g^00).
pub fn tau_from_t(t: f64, m: &MetricState) -> Result<f64> {
    let g00 = checked_g00(m)?;
    Ok(t / (m.sqrt_neg_det() * g00))
}
