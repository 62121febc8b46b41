//! Per-site quadratic forms of the dynamical Hamiltonian on the lattice.
//!
//! With the temporal row fixed and only g_,1 nonzero, H_c at one site is
//!
//!   h = π·A·π + π·P·D + D·Q·D
//!
//! over the independent spatial pairs (m ≤ n), where A, P, Q depend on the
//! spatial metric only. The forms are generic over [`Scalar`] so that the
//! metric gradient comes from dual numbers.

use crate::dual::Scalar;

pub(crate) const MAX_D: usize = 4;
pub(crate) const MAX_PAIRS: usize = 6;

/// Independent spatial components (m, n), m ≤ n, in row order.
pub fn spatial_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 1..d {
        for n in m..d {
            out.push((m, n));
        }
    }
    out
}

/// Weight w of a pair in the canonical momentum p = w Δx π: 1 on the
/// diagonal, 2 off it (both π^mn and π^nm multiply the same velocity).
pub(crate) fn pair_weight(pair: (usize, usize)) -> f64 {
    if pair.0 == pair.1 {
        1.0
    } else {
        2.0
    }
}

pub(crate) type Mat<S> = [[S; MAX_PAIRS]; MAX_PAIRS];

#[derive(Clone, Copy, Debug)]
pub(crate) struct SiteForms<S> {
    pub a: Mat<S>,
    pub p: Mat<S>,
    pub q: Mat<S>,
}

impl<S: Scalar> SiteForms<S> {
    pub fn energy(&self, np: usize, pi: &[f64], dv: &[f64]) -> S {
        let mut h = S::zero();
        for a in 0..np {
            for b in 0..np {
                h += self.a[a][b].scale(pi[a] * pi[b]) + self.p[a][b].scale(pi[a] * dv[b]) + self.q[a][b].scale(dv[a] * dv[b]);
            }
        }
        h
    }
}

impl SiteForms<f64> {
    /// ∂h/∂π_a
    pub fn grad_pi(&self, np: usize, pi: &[f64], dv: &[f64], out: &mut [f64]) {
        for a in 0..np {
            let mut s = 0.0;
            for b in 0..np {
                s += (self.a[a][b] + self.a[b][a]) * pi[b] + self.p[a][b] * dv[b];
            }
            out[a] = s;
        }
    }

    /// ∂h/∂D_b
    pub fn grad_d(&self, np: usize, pi: &[f64], dv: &[f64], out: &mut [f64]) {
        for b in 0..np {
            let mut s = 0.0;
            for a in 0..np {
                s += pi[a] * self.p[a][b] + (self.q[a][b] + self.q[b][a]) * dv[a];
            }
            out[b] = s;
        }
    }
}

/// Inverts a small matrix by Gauss–Jordan with partial pivoting on the real
/// part; returns (inverse, determinant) or `None` when a pivot vanishes.
fn invert<S: Scalar>(d: usize, g: &[[S; MAX_D]; MAX_D]) -> Option<([[S; MAX_D]; MAX_D], S)> {
    let mut a = *g;
    let mut inv = [[S::zero(); MAX_D]; MAX_D];
    for (i, row) in inv.iter_mut().enumerate().take(d) {
        row[i] = S::cst(1.0);
    }
    let mut det = S::cst(1.0);
    for col in 0..d {
        let piv = (col..d).max_by(|&x, &y| a[x][col].value().abs().total_cmp(&a[y][col].value().abs()))?;
        if a[piv][col].value().abs() < 1e-12 {
            return None;
        }
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for j in 0..d {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let f = a[r][col];
            for j in 0..d {
                let (ac, ic) = (a[col][j], inv[col][j]);
                a[r][j] -= f * ac;
                inv[r][j] -= f * ic;
            }
        }
    }
    Some((inv, det))
}

/// A, P, Q at the spatial metric `q` (values per pair) with temporal row
/// `gauge`. `None` when the metric is degenerate or not Lorentzian.
pub(crate) fn site_forms<S: Scalar>(d: usize, gauge: &[f64], q: &[S]) -> Option<SiteForms<S>> {
    let pairs = spatial_pairs(d);
    let mut g = [[S::zero(); MAX_D]; MAX_D];
    for s in 0..d {
        g[0][s] = S::cst(gauge[s]);
        g[s][0] = S::cst(gauge[s]);
    }
    for (k, &(m, n)) in pairs.iter().enumerate() {
        g[m][n] = q[k];
        g[n][m] = q[k];
    }
    let (gi, det) = invert(d, &g)?;
    if det.value() >= 0.0 {
        return None;
    }
    let g00 = gi[0][0];
    if g00.value().abs() < 1e-12 {
        return None;
    }
    let s = (-det).sqrt();
    let ns = d - 1;
    let b = |a: usize, bb: usize, c: usize, mu: usize, nu: usize, rho: usize| -> S {
        gi[a][bb] * gi[c][rho] * gi[mu][nu] - gi[a][mu] * gi[bb][nu] * gi[c][rho]
            + (gi[a][rho] * gi[bb][nu] * gi[c][mu]).scale(2.0)
            - (gi[a][bb] * gi[c][mu] * gi[nu][rho]).scale(2.0)
    };
    let inv_d2 = 1.0 / (d as f64 - 2.0);
    // spatial tables, 0-based over 1..d
    let mut itab = [[[[S::zero(); 3]; 3]; 3]; 3];
    let mut bd = [[[[S::zero(); 3]; 3]; 3]; 3];
    for m in 0..ns {
        for n in 0..ns {
            for p in 0..ns {
                for r in 0..ns {
                    let (mm, nn, pp, rr) = (m + 1, n + 1, p + 1, r + 1);
                    itab[m][n][p][r] = (g[mm][nn] * g[pp][rr]).scale(inv_d2) - g[mm][pp] * g[nn][rr];
                    // B^{((mn)0|pr1)}
                    bd[m][n][p][r] = (b(mm, nn, 0, pp, rr, 1) + b(pp, rr, 1, mm, nn, 0) + b(nn, mm, 0, pp, rr, 1)
                        + b(pp, rr, 1, nn, mm, 0))
                    .scale(0.25);
                }
            }
        }
    }
    // M_{mn,μν} = Σ_pq I_mnpq B^{((pq)0|μν1)}
    let mut mt = [[[[S::zero(); 3]; 3]; 3]; 3];
    for m in 0..ns {
        for n in 0..ns {
            for mu in 0..ns {
                for nu in 0..ns {
                    let mut acc = S::zero();
                    for p in 0..ns {
                        for r in 0..ns {
                            acc += itab[m][n][p][r] * bd[p][r][mu][nu];
                        }
                    }
                    mt[m][n][mu][nu] = acc;
                }
            }
        }
    }
    // (BD·M)_{mn,pr} and B^{mn1pr1}
    let mut icc = [[[[S::zero(); 3]; 3]; 3]; 3];
    let mut b11 = [[[[S::zero(); 3]; 3]; 3]; 3];
    for m in 0..ns {
        for n in 0..ns {
            for p in 0..ns {
                for r in 0..ns {
                    let mut acc = S::zero();
                    for x in 0..ns {
                        for y in 0..ns {
                            acc += bd[x][y][m][n] * mt[x][y][p][r];
                        }
                    }
                    icc[m][n][p][r] = acc;
                    b11[m][n][p][r] = b(m + 1, n + 1, 1, p + 1, r + 1, 1);
                }
            }
        }
    }
    let orbit = |(m, n): (usize, usize)| -> Vec<(usize, usize)> {
        if m == n {
            vec![(m - 1, n - 1)]
        } else {
            vec![(m - 1, n - 1), (n - 1, m - 1)]
        }
    };
    let inv_sg = S::cst(1.0) / (s * g00);
    let inv_g00 = S::cst(1.0) / g00;
    let mut out = SiteForms {
        a: [[S::zero(); MAX_PAIRS]; MAX_PAIRS],
        p: [[S::zero(); MAX_PAIRS]; MAX_PAIRS],
        q: [[S::zero(); MAX_PAIRS]; MAX_PAIRS],
    };
    for (ia, &pa) in pairs.iter().enumerate() {
        for (ib, &pb) in pairs.iter().enumerate() {
            let (mut sa, mut sp, mut sq) = (S::zero(), S::zero(), S::zero());
            for &(m, n) in &orbit(pa) {
                for &(p, r) in &orbit(pb) {
                    sa += itab[m][n][p][r];
                    sp += mt[m][n][p][r];
                    sq += icc[m][n][p][r] * inv_g00 - b11[m][n][p][r];
                }
            }
            out.a[ia][ib] = sa * inv_sg;
            out.p[ia][ib] = -(sp * inv_g00);
            out.q[ia][ib] = (s * sq).scale(0.25);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{hamiltonian_hc, FieldPoint};
    use crate::dual::Dual;
    use crate::tensor::MetricState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_site(d: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let np = d * (d - 1) / 2;
        let pairs = spatial_pairs(d);
        let q = pairs.iter().map(|&(m, n)| if m == n { 1.0 } else { 0.0 } + rng.gen_range(-0.2..0.2)).collect();
        let pi = (0..np).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dv = (0..np).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (q, pi, dv)
    }

    #[test]
    fn site_energy_matches_dynamical_hamiltonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for d in [3, 4] {
            let pairs = spatial_pairs(d);
            for _ in 0..10 {
                let (q, pi, dv) = random_site(d, &mut rng);
                let gauge: Vec<f64> = (0..d).map(|s| if s == 0 { -1.1 } else { rng.gen_range(-0.2..0.2) }).collect();
                let forms = site_forms::<f64>(d, &gauge, &q).unwrap();
                let mut rows = vec![vec![0.0; d]; d];
                for s in 0..d {
                    rows[0][s] = gauge[s];
                    rows[s][0] = gauge[s];
                }
                for (k, &(m, n)) in pairs.iter().enumerate() {
                    rows[m][n] = q[k];
                    rows[n][m] = q[k];
                }
                let mut p = FieldPoint::new(MetricState::from_rows(&rows).unwrap());
                for (k, &(m, n)) in pairs.iter().enumerate() {
                    p.set_momentum(m, n, pi[k]);
                    p.set_dg(m, n, 1, dv[k]);
                }
                let want = hamiltonian_hc(&p).unwrap();
                let got = forms.energy(pairs.len(), &pi, &dv);
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "d={d}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn dual_gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let d = 4;
        let gauge = [-1.0, 0.0, 0.0, 0.0];
        let (q, pi, dv) = random_site(d, &mut rng);
        let qd: Vec<Dual<6>> = q.iter().enumerate().map(|(i, &x)| Dual::variable(x, i)).collect();
        let grad = site_forms(d, &gauge, &qd).unwrap().energy(6, &pi, &dv);
        for c in 0..6 {
            let h = 1e-6;
            let mut qp = q.clone();
            qp[c] += h;
            let mut qm = q.clone();
            qm[c] -= h;
            let fd = (site_forms::<f64>(d, &gauge, &qp).unwrap().energy(6, &pi, &dv)
                - site_forms::<f64>(d, &gauge, &qm).unwrap().energy(6, &pi, &dv))
                / (2.0 * h);
            assert!((grad.eps[c] - fd).abs() < 1e-7, "{c}: {} vs {fd}", grad.eps[c]);
        }
    }
}
