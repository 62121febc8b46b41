//! The energy flux vector of the free gravitational field.

use crate::canonical::FieldPoint;
use crate::error::{GravError, Result};
use crate::grav::tensor_big_e;
use crate::tensor::DenseTensor;

/// G^k for spatial k. `components[0]` is unused and always zero so that
/// `components[k]` is G^k.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxVector {
    pub components: Vec<f64>,
    /// Whether φ^{mk} was supplied by the caller; when false the term
    /// 2 g_0m φ^{mk} was evaluated as zero.
    pub phi_supplied: bool,
}

/// G^k = 2 g_0m φ^{mk} − √−g E^{mnki} g_mn,i
///       + √−g g_μν,i (g^{0μ}/g^{00}) (g^{νk} g^{0i} − g^{νi} g^{0k}).
///
/// `phi` is a rank-2 tensor of dimension d holding φ^{mk} on its spatial
/// block; `None` means zero.
pub fn flux_vector(p: &FieldPoint, phi: Option<&DenseTensor>) -> Result<FluxVector> {
    let d = p.dim();
    let m = p.metric();
    let g00 = m.g00();
    if g00.abs() < crate::tensor::SINGULAR_TOL {
        return Err(GravError::TemporalDegeneracy { g00 });
    }
    if let Some(phi) = phi {
        if phi.rank() != 2 || phi.dim() != d {
            return Err(GravError::ShapeMismatch("phi must be a rank-2 tensor of dimension d".into()));
        }
    }
    let e = tensor_big_e(m)?;
    let s = m.sqrt_neg_det();
    let mut components = vec![0.0; d];
    for (k, out) in components.iter_mut().enumerate().skip(1) {
        let mut g = 0.0;
        if let Some(phi) = phi {
            for mm in 1..d {
                g += 2.0 * m.lower(0, mm) * phi.get(&[mm, k]);
            }
        }
        for mm in 1..d {
            for n in 1..d {
                for i in 1..d {
                    g -= s * e.get(&[mm, n, k, i]) * p.spatial(mm, n, i);
                }
            }
        }
        for mu in 0..d {
            for nu in 0..d {
                for i in 1..d {
                    let w = m.upper(nu, k) * m.upper(0, i) - m.upper(nu, i) * m.upper(0, k);
                    g += s * p.spatial(mu, nu, i) * m.upper(0, mu) / g00 * w;
                }
            }
        }
        *out = g;
    }
    Ok(FluxVector { components, phi_supplied: phi.is_some() })
}
