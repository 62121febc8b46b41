//! A 1+1D lattice of canonical field points: one spatial axis x = x¹, all d
//! tensor indices retained, fields uniform along the suppressed directions.
//!
//! The temporal row g_0σ is a uniform gauge choice (Minkowski by default)
//! and never evolves; the spatial block g_mn and its momenta π^mn are the
//! dynamical variables.

mod evolve;
mod forms;
mod front;

pub use evolve::{hamilton_evolve, EvolveOptions, Frame, Scheme, Trajectory};
pub use forms::spatial_pairs;
pub use front::{front_diagnostics, FrontOptions, FrontSample};

use serde::{Deserialize, Serialize};

use crate::canonical::{cross_coefficient, flux_vector, hamiltonian_hc, velocity_from_momentum, FieldPoint};
use crate::error::{GravError, Result};
use crate::tensor::MetricState;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    /// End sites are held fixed; derivatives there use one-sided
    /// second-order stencils.
    Fixed,
}

/// Localized momentum kick: π^{mn} = amplitude · exp(−(i − center)²/(2 width²))
/// or a single site when `width` is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KickSpec {
    #[serde(default)]
    pub center: Option<usize>,
    #[serde(default = "KickSpec::default_component")]
    pub component: (usize, usize),
    #[serde(default = "KickSpec::default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub width: f64,
}

impl KickSpec {
    fn default_component() -> (usize, usize) {
        (1, 1)
    }

    fn default_amplitude() -> f64 {
        0.01
    }
}

impl Default for KickSpec {
    fn default() -> Self {
        Self {
            center: None,
            component: Self::default_component(),
            amplitude: Self::default_amplitude(),
            width: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Flat,
    Kick,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SiteInput {
    pub g: Vec<Vec<f64>>,
    #[serde(default)]
    pub pi: Option<Vec<Vec<f64>>>,
}

/// JSON lattice description: either explicit `sites` or a `preset` with `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeInput {
    pub d: usize,
    pub spacing: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub kick: Option<KickSpec>,
    #[serde(default)]
    pub sites: Option<Vec<SiteInput>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    points: Vec<FieldPoint>,
    spacing: f64,
    boundary: Boundary,
}

/// Volume integral of div G and the outward boundary flux.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussEnergy {
    pub volume_integral: f64,
    pub surface_integral: f64,
}

impl GaussEnergy {
    pub fn residual(&self) -> f64 {
        (self.volume_integral - self.surface_integral).abs()
    }
}

impl LatticeField {
    /// Builds a lattice and synchronizes derived fields.
    pub fn new(points: Vec<FieldPoint>, spacing: f64, boundary: Boundary) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(GravError::ConfigInvalid(format!("lattice spacing must be positive, got {spacing}")));
        }
        if points.len() < 5 {
            return Err(GravError::ConfigInvalid("lattice needs at least 5 sites".into()));
        }
        let d = points[0].dim();
        if !(3..=4).contains(&d) {
            return Err(GravError::ConfigInvalid(format!("lattice supports d = 3 or 4, got {d}")));
        }
        for p in &points {
            if p.dim() != d {
                return Err(GravError::ShapeMismatch("all sites must share d".into()));
            }
            for s in 0..d {
                if (p.metric().lower(0, s) - points[0].metric().lower(0, s)).abs() > 1e-12 {
                    return Err(GravError::ConfigInvalid("the temporal row g_0σ must be uniform".into()));
                }
            }
        }
        let mut lat = Self { points, spacing, boundary };
        lat.sync()?;
        Ok(lat)
    }

    pub fn flat(d: usize, n: usize, spacing: f64, boundary: Boundary) -> Result<Self> {
        Self::new(vec![FieldPoint::flat(d); n], spacing, boundary)
    }

    pub fn kick(d: usize, n: usize, spacing: f64, boundary: Boundary, spec: &KickSpec) -> Result<Self> {
        let (m, k) = spec.component;
        if m == 0 || k == 0 || m >= d || k >= d {
            return Err(GravError::ConfigInvalid(format!("kick component ({m},{k}) must be spatial")));
        }
        let center = spec.center.unwrap_or(n / 2);
        if center >= n {
            return Err(GravError::ConfigInvalid(format!("kick center {center} outside lattice of {n} sites")));
        }
        let mut points = vec![FieldPoint::flat(d); n];
        for (i, p) in points.iter_mut().enumerate() {
            let r = i as f64 - center as f64;
            let a = if spec.width > 0.0 {
                spec.amplitude * (-r * r / (2.0 * spec.width * spec.width)).exp()
            } else if i == center {
                spec.amplitude
            } else {
                0.0
            };
            p.set_momentum(m, k, a);
        }
        Self::new(points, spacing, boundary)
    }

    pub fn from_input(input: LatticeInput) -> Result<Self> {
        if let Some(sites) = input.sites {
            let mut points = Vec::with_capacity(sites.len());
            for s in sites {
                let mut p = FieldPoint::new(MetricState::from_rows(&s.g)?);
                if p.dim() != input.d {
                    return Err(GravError::ConfigInvalid("site metric dimension differs from d".into()));
                }
                if let Some(pi) = s.pi {
                    if pi.len() != input.d || pi.iter().any(|r| r.len() != input.d) {
                        return Err(GravError::ConfigInvalid("site momentum must be d x d".into()));
                    }
                    for a in 1..input.d {
                        for b in a..input.d {
                            p.set_momentum(a, b, 0.5 * (pi[a][b] + pi[b][a]));
                        }
                    }
                }
                points.push(p);
            }
            return Self::new(points, input.spacing, input.boundary);
        }
        let n = input.n.ok_or_else(|| GravError::ConfigInvalid("lattice input needs `sites` or `n`".into()))?;
        match input.preset.unwrap_or(Preset::Flat) {
            Preset::Flat => Self::flat(input.d, n, input.spacing, input.boundary),
            Preset::Kick => Self::kick(input.d, n, input.spacing, input.boundary, &input.kick.unwrap_or_default()),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_input(serde_json::from_str(s)?)
    }

    pub fn load_json(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn points(&self) -> &[FieldPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// g_0σ, shared by every site.
    pub fn gauge(&self) -> Vec<f64> {
        (0..self.dim()).map(|s| self.points[0].metric().lower(0, s)).collect()
    }

    /// Recomputes g_,1 from neighbouring metrics, the velocities from the
    /// momenta, and sets π^{0σ} to the value the primary constraints demand.
    pub fn sync(&mut self) -> Result<()> {
        let d = self.dim();
        let n = self.len();
        let st = stencil(n, self.boundary, self.spacing);
        let derivs: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut out = vec![0.0; d * d];
                for a in 0..d {
                    for b in 0..d {
                        out[a * d + b] = st[i].iter().map(|&(j, w)| w * self.points[j].metric().lower(a, b)).sum();
                    }
                }
                out
            })
            .collect();
        for (p, dv) in self.points.iter_mut().zip(&derivs) {
            p.clear_spatial();
            for a in 0..d {
                for b in a..d {
                    p.set_dg(a, b, 1, dv[a * d + b]);
                }
            }
            let v = velocity_from_momentum(p)?;
            p.clear_velocity();
            for a in 1..d {
                for b in a..d {
                    p.set_velocity(a, b, v.get(&[a, b]));
                }
            }
            let c = cross_coefficient(p);
            let s = p.metric().sqrt_neg_det();
            for sg in 0..d {
                p.set_momentum(0, sg, 0.5 * s * c.get(&[0, sg]));
            }
        }
        Ok(())
    }

    /// Negates every momentum and velocity (time reversal).
    pub fn reverse_momenta(&mut self) {
        for p in &mut self.points {
            p.scale_momentum(-1.0);
            let d = p.dim();
            for a in 0..d {
                for b in a..d {
                    let v = p.velocity(a, b);
                    p.set_velocity(a, b, -v);
                }
            }
        }
    }

    /// H_c at every site.
    pub fn energy_density(&self) -> Result<Vec<f64>> {
        self.points.iter().map(hamiltonian_hc).collect()
    }

    /// Σ H_c Δx.
    pub fn total_energy(&self) -> Result<f64> {
        Ok(self.energy_density()?.iter().sum::<f64>() * self.spacing)
    }

    /// G¹ at every site, with φ^{mk} taken as zero.
    pub fn flux(&self) -> Result<Vec<f64>> {
        self.points.iter().map(|p| Ok(flux_vector(p, None)?.components[1])).collect()
    }

    /// Largest componentwise difference in g_mn and π^mn against `other`.
    pub fn max_state_diff(&self, other: &LatticeField) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for (p, q) in self.points.iter().zip(&other.points) {
            for a in 1..d {
                for b in a..d {
                    worst = worst
                        .max((p.metric().lower(a, b) - q.metric().lower(a, b)).abs())
                        .max((p.momentum(a, b) - q.momentum(a, b)).abs());
                }
            }
        }
        worst
    }
}

/// Weights `(j, w)` with D_i = Σ w q_j for the first spatial derivative.
pub(crate) fn stencil(n: usize, boundary: Boundary, dx: f64) -> Vec<Vec<(usize, f64)>> {
    let h = 0.5 / dx;
    (0..n)
        .map(|i| match boundary {
            Boundary::Periodic => vec![((i + 1) % n, h), ((i + n - 1) % n, -h)],
            Boundary::Fixed if i == 0 => vec![(0, -3.0 * h), (1, 4.0 * h), (2, -h)],
            Boundary::Fixed if i == n - 1 => vec![(n - 1, 3.0 * h), (n - 2, -4.0 * h), (n - 3, h)],
            Boundary::Fixed => vec![(i + 1, h), (i - 1, -h)],
        })
        .collect()
}

/// Discrete Gauss law for a flux sampled on the lattice.
///
/// Periodic: central-difference divergence summed over the ring, against a
/// zero boundary flux. Fixed: trapezoid rule over central differences with
/// one-sided end differences, against the outward flux G(x_end) − G(x_0).
pub fn gauss_from_flux(g: &[f64], dx: f64, boundary: Boundary) -> GaussEnergy {
    let n = g.len();
    match boundary {
        Boundary::Periodic => {
            let volume = (0..n).map(|i| 0.5 * (g[(i + 1) % n] - g[(i + n - 1) % n])).sum();
            GaussEnergy { volume_integral: volume, surface_integral: 0.0 }
        }
        Boundary::Fixed => {
            let mut volume = 0.5 * (g[1] - g[0]) + 0.5 * (g[n - 1] - g[n - 2]);
            for i in 1..n - 1 {
                volume += 0.5 * (g[i + 1] - g[i - 1]);
            }
            let _ = dx;
            GaussEnergy { volume_integral: volume, surface_integral: g[n - 1] - g[0] }
        }
    }
}

/// Gauss law for the energy flux of a synchronized lattice.
pub fn gauss_energy(lat: &LatticeField) -> Result<GaussEnergy> {
    Ok(gauss_from_flux(&lat.flux()?, lat.spacing(), lat.boundary()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth_lattice(n: usize, boundary: Boundary) -> LatticeField {
        let len = match boundary {
            Boundary::Periodic => 1.0,
            Boundary::Fixed => 0.8,
        };
        let dx = match boundary {
            Boundary::Periodic => len / n as f64,
            Boundary::Fixed => len / (n - 1) as f64,
        };
        let points = (0..n)
            .map(|i| {
                let x = i as f64 * dx;
                let w = 2.0 * std::f64::consts::PI * x;
                let rows = vec![
                    vec![-1.0, 0.0, 0.0, 0.0],
                    vec![0.0, 1.0 + 0.1 * w.sin(), 0.05 * w.cos(), 0.0],
                    vec![0.0, 0.05 * w.cos(), 1.0 - 0.08 * (2.0 * w).sin(), 0.02 * w.sin()],
                    vec![0.0, 0.0, 0.02 * w.sin(), 1.0 + 0.03 * w.cos()],
                ];
                FieldPoint::new(MetricState::from_rows(&rows).unwrap())
            })
            .collect();
        LatticeField::new(points, dx, boundary).unwrap()
    }

    #[test]
    fn presets_and_json() {
        let flat = LatticeField::flat(4, 16, 0.1, Boundary::Periodic).unwrap();
        assert_eq!(flat.total_energy().unwrap(), 0.0);
        let kick = LatticeField::kick(4, 16, 0.1, Boundary::Periodic, &KickSpec::default()).unwrap();
        assert_eq!(kick.points()[8].momentum(1, 1), 0.01);
        assert!(kick.total_energy().unwrap() > 0.0);
        let json = r#"{"d": 4, "spacing": 0.1, "n": 16, "preset": "kick", "boundary": "fixed"}"#;
        let from_json = LatticeField::from_json_str(json).unwrap();
        assert_eq!(from_json.boundary(), Boundary::Fixed);
        assert_eq!(from_json.points()[8].momentum(1, 1), 0.01);
        assert!(LatticeField::from_json_str(r#"{"d": 4, "spacing": -1, "n": 16}"#).is_err());
    }

    #[test]
    fn derivative_sync_is_second_order() {
        let err = |n: usize| {
            let lat = smooth_lattice(n, Boundary::Fixed);
            let dx = lat.spacing();
            lat.points()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let w = 2.0 * std::f64::consts::PI * i as f64 * dx;
                    (p.spatial(1, 1, 1) - 0.1 * 2.0 * std::f64::consts::PI * w.cos()).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }

    #[test]
    fn constant_and_linear_flux() {
        let c = vec![2.5; 10];
        let g = gauss_from_flux(&c, 0.1, Boundary::Fixed);
        assert_eq!((g.volume_integral, g.surface_integral), (0.0, 0.0));
        let lin: Vec<f64> = (0..10).map(|i| 3.0 * i as f64 * 0.1).collect();
        let g = gauss_from_flux(&lin, 0.1, Boundary::Fixed);
        assert!((g.volume_integral - 3.0 * 0.9).abs() < 1e-14);
        assert!(g.residual() < 1e-14);
    }

    #[test]
    fn periodic_gauss_identity_is_exact() {
        let lat = smooth_lattice(64, Boundary::Periodic);
        let g = gauss_energy(&lat).unwrap();
        assert!(g.volume_integral.abs() <= 1e-12);
        assert_eq!(g.surface_integral, 0.0);
    }

    #[test]
    fn fixed_gauss_converges_to_continuum_flux() {
        // the continuum flux at the ends, from exact derivatives
        let exact = |boundary_lat: &LatticeField| {
            let mut ends = Vec::new();
            for &i in &[0, boundary_lat.len() - 1] {
                let mut p = boundary_lat.points()[i].clone();
                let x = i as f64 * boundary_lat.spacing();
                let w = 2.0 * std::f64::consts::PI * x;
                let tw = 2.0 * std::f64::consts::PI;
                p.clear_spatial();
                p.set_dg(1, 1, 1, 0.1 * tw * w.cos());
                p.set_dg(1, 2, 1, -0.05 * tw * w.sin());
                p.set_dg(2, 2, 1, -0.16 * tw * (2.0 * w).cos());
                p.set_dg(2, 3, 1, 0.02 * tw * w.cos());
                p.set_dg(3, 3, 1, -0.03 * tw * w.sin());
                ends.push(flux_vector(&p, None).unwrap().components[1]);
            }
            ends[1] - ends[0]
        };
        let err = |n: usize| {
            let lat = smooth_lattice(n, Boundary::Fixed);
            let g = gauss_energy(&lat).unwrap();
            assert!(g.residual() < 1e-12);
            (g.volume_integral - exact(&lat)).abs()
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }
}
