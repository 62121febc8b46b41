//! Symplectic evolution of the lattice under the summed dynamical
//! Hamiltonian H = Σ_i Δx h_i.
//!
//! The site Hamiltonian couples g and π through A(g), so the scheme is the
//! implicit (generalized) Störmer–Verlet method; an optional Yoshida triple
//! composition lifts it to fourth order. Both are time-reversible.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::forms::{pair_weight, site_forms, spatial_pairs, SiteForms, MAX_PAIRS};
use super::{stencil, Boundary, LatticeField};
use crate::canonical::FieldPoint;
use crate::dual::Dual;
use crate::error::{GravError, Result};
use crate::tensor::MetricState;

type Vals = [f64; MAX_PAIRS];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Second-order generalized Störmer–Verlet.
    Leapfrog,
    /// Fourth-order Yoshida composition of the leapfrog.
    #[default]
    Yoshida4,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveOptions {
    pub dt: f64,
    pub steps: usize,
    pub scheme: Scheme,
    /// Keep a frame every this many steps (the first and last are always kept).
    pub record_every: usize,
    /// Largest accepted dt / Δx.
    pub max_dt_ratio: f64,
    /// Relative energy drift that aborts the run with `Unstable`.
    pub drift_limit: f64,
    /// Convergence tolerance of the implicit stages.
    pub iteration_tol: f64,
    pub max_iterations: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 0.002,
            steps: 100,
            scheme: Scheme::default(),
            record_every: 10,
            max_dt_ratio: 0.2,
            drift_limit: 1e-3,
            iteration_tol: 1e-14,
            max_iterations: 100,
        }
    }
}

/// One recorded time slice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Frame {
    pub step: usize,
    pub time: f64,
    /// g_mn per site, ordered as [`spatial_pairs`].
    pub g: Vec<Vec<f64>>,
    /// π^mn per site, same ordering.
    pub pi: Vec<Vec<f64>>,
    pub energy_density: Vec<f64>,
    /// G¹ per site (φ^{mk} taken as zero).
    pub flux: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub d: usize,
    pub spacing: f64,
    pub boundary: Boundary,
    /// g_0σ held fixed during the run.
    pub gauge: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub options: EvolveOptions,
    /// Σ h_i Δx after every step, index 0 being the initial value.
    pub energies: Vec<f64>,
    pub frames: Vec<Frame>,
}

impl Trajectory {
    pub fn initial_energy(&self) -> f64 {
        self.energies[0]
    }

    /// max_t |H(t) − H(0)| / |H(0)| (absolute when H(0) = 0).
    pub fn max_relative_drift(&self) -> f64 {
        let h0 = self.energies[0];
        let scale = if h0 == 0.0 { 1.0 } else { h0.abs() };
        self.energies.iter().map(|h| (h - h0).abs() / scale).fold(0.0, f64::max)
    }

    pub fn last_frame(&self) -> &Frame {
        self.frames.last().expect("trajectory has frames")
    }

    /// Rebuilds a synchronized lattice from a recorded frame.
    pub fn frame_lattice(&self, frame: &Frame) -> Result<LatticeField> {
        let points = frame
            .g
            .iter()
            .zip(&frame.pi)
            .map(|(q, pi)| site_point(self.d, &self.gauge, &self.pairs, q, pi))
            .collect::<Result<Vec<_>>>()?;
        LatticeField::new(points, self.spacing, self.boundary)
    }

    /// Columns: step, time, site, x, g_mn..., pi_mn..., energy_density, flux.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let names: Vec<String> = self.pairs.iter().map(|(m, n)| format!("{m}{n}")).collect();
        let g_cols: Vec<String> = names.iter().map(|s| format!("g{s}")).collect();
        let p_cols: Vec<String> = names.iter().map(|s| format!("pi{s}")).collect();
        writeln!(w, "step,time,site,x,{},{},energy_density,flux", g_cols.join(","), p_cols.join(","))?;
        for f in &self.frames {
            for i in 0..f.g.len() {
                let g: Vec<String> = f.g[i].iter().map(|v| format!("{v:.12e}")).collect();
                let p: Vec<String> = f.pi[i].iter().map(|v| format!("{v:.12e}")).collect();
                writeln!(
                    w,
                    "{},{:.12e},{},{:.12e},{},{},{:.12e},{:.12e}",
                    f.step,
                    f.time,
                    i,
                    i as f64 * self.spacing,
                    g.join(","),
                    p.join(","),
                    f.energy_density[i],
                    f.flux[i]
                )?;
            }
        }
        Ok(())
    }
}

fn site_point(d: usize, gauge: &[f64], pairs: &[(usize, usize)], q: &[f64], pi: &[f64]) -> Result<FieldPoint> {
    let mut rows = vec![vec![0.0; d]; d];
    for s in 0..d {
        rows[0][s] = gauge[s];
        rows[s][0] = gauge[s];
    }
    for (k, &(m, n)) in pairs.iter().enumerate() {
        rows[m][n] = q[k];
        rows[n][m] = q[k];
    }
    let mut p = FieldPoint::new(MetricState::from_rows(&rows)?);
    for (k, &(m, n)) in pairs.iter().enumerate() {
        p.set_momentum(m, n, pi[k]);
    }
    Ok(p)
}

/// The integrator's working state and fixed data.
struct Lab {
    d: usize,
    np: usize,
    dx: f64,
    gauge: Vec<f64>,
    weights: Vals,
    stencil: Vec<Vec<(usize, f64)>>,
    /// transpose of the stencil: for site j, the (i, w) with D_i ∋ w q_j
    stencil_t: Vec<Vec<(usize, f64)>>,
    frozen: Vec<bool>,
}

/// Forms at one configuration: values and metric gradients.
struct Cached {
    forms: Vec<SiteForms<Dual<MAX_PAIRS>>>,
    plain: Vec<SiteForms<f64>>,
    dv: Vec<Vals>,
}

fn re(f: &SiteForms<Dual<MAX_PAIRS>>) -> SiteForms<f64> {
    let mut out = SiteForms { a: [[0.0; MAX_PAIRS]; MAX_PAIRS], p: [[0.0; MAX_PAIRS]; MAX_PAIRS], q: [[0.0; MAX_PAIRS]; MAX_PAIRS] };
    for i in 0..MAX_PAIRS {
        for j in 0..MAX_PAIRS {
            out.a[i][j] = f.a[i][j].re;
            out.p[i][j] = f.p[i][j].re;
            out.q[i][j] = f.q[i][j].re;
        }
    }
    out
}

impl Lab {
    fn derivatives(&self, q: &[Vals]) -> Vec<Vals> {
        self.stencil
            .iter()
            .map(|st| {
                let mut out = [0.0; MAX_PAIRS];
                for &(j, w) in st {
                    for a in 0..self.np {
                        out[a] += w * q[j][a];
                    }
                }
                out
            })
            .collect()
    }

    fn plain_forms(&self, q: &[Vals], step: usize) -> Result<Vec<SiteForms<f64>>> {
        q.par_iter()
            .enumerate()
            .map(|(i, qi)| site_forms::<f64>(self.d, &self.gauge, &qi[..self.np]).ok_or(GravError::MetricDegenerated { step, site: i }))
            .collect()
    }

    fn cache(&self, q: &[Vals], step: usize) -> Result<Cached> {
        let forms = q
            .par_iter()
            .enumerate()
            .map(|(i, qi)| {
                let qd: Vec<Dual<MAX_PAIRS>> = (0..self.np).map(|a| Dual::variable(qi[a], a)).collect();
                site_forms(self.d, &self.gauge, &qd).ok_or(GravError::MetricDegenerated { step, site: i })
            })
            .collect::<Result<Vec<_>>>()?;
        let plain = forms.iter().map(re).collect();
        Ok(Cached { forms, plain, dv: self.derivatives(q) })
    }

    fn energy(&self, c: &Cached, pi: &[Vals]) -> f64 {
        c.plain.iter().zip(pi).zip(&c.dv).map(|((f, p), dv)| f.energy(self.np, p, dv)).sum::<f64>() * self.dx
    }

    /// q̇ = (1/w) ∂h/∂π for every site.
    fn q_rate(&self, plain: &[SiteForms<f64>], dv: &[Vals], pi: &[Vals]) -> Vec<Vals> {
        (0..plain.len())
            .map(|i| {
                let mut out = [0.0; MAX_PAIRS];
                if !self.frozen[i] {
                    plain[i].grad_pi(self.np, &pi[i], &dv[i], &mut out);
                    for a in 0..self.np {
                        out[a] /= self.weights[a];
                    }
                }
                out
            })
            .collect()
    }

    /// π̇ = −(1/(w Δx)) ∂H/∂q for every site.
    fn pi_rate(&self, c: &Cached, pi: &[Vals]) -> Vec<Vals> {
        let n = pi.len();
        let dh_dd: Vec<Vals> = (0..n)
            .map(|i| {
                let mut out = [0.0; MAX_PAIRS];
                c.plain[i].grad_d(self.np, &pi[i], &c.dv[i], &mut out);
                out
            })
            .collect();
        (0..n)
            .map(|j| {
                let mut out = [0.0; MAX_PAIRS];
                if self.frozen[j] {
                    return out;
                }
                let explicit = c.forms[j].energy(self.np, &pi[j], &c.dv[j]);
                for a in 0..self.np {
                    let mut g = explicit.eps[a];
                    for &(i, w) in &self.stencil_t[j] {
                        g += dh_dd[i][a] * w;
                    }
                    out[a] = -g / self.weights[a];
                }
                out
            })
            .collect()
    }

    fn max_diff(&self, a: &[Vals], b: &[Vals]) -> (f64, f64) {
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (x, y) in a.iter().zip(b) {
            for k in 0..self.np {
                diff = diff.max((x[k] - y[k]).abs());
                scale = scale.max(x[k].abs());
            }
        }
        (diff, scale)
    }

    /// One generalized Störmer–Verlet step of size h. `c` holds the forms at
    /// `q` on entry and at the new `q` on exit.
    fn leapfrog(&self, h: f64, q: &mut Vec<Vals>, pi: &mut Vec<Vals>, c: &mut Cached, opts: &EvolveOptions, step: usize) -> Result<()> {
        let half = 0.5 * h;
        // π_{1/2} = π − h/2 ∂H/∂q(q, π_{1/2})
        let mut p_half = pi.clone();
        let mut converged = false;
        for _ in 0..opts.max_iterations {
            let rate = self.pi_rate(c, &p_half);
            let next: Vec<Vals> = pi.iter().zip(&rate).map(|(p, r)| axpy(p, half, r, self.np)).collect();
            let (diff, scale) = self.max_diff(&next, &p_half);
            p_half = next;
            if diff <= opts.iteration_tol * (1.0 + scale) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(GravError::Unstable(format!("momentum stage did not converge at step {step}")));
        }
        // q' = q + h/2 [∂H/∂π(q, π_{1/2}) + ∂H/∂π(q', π_{1/2})]
        let start_rate = self.q_rate(&c.plain, &c.dv, &p_half);
        let mut q_new: Vec<Vals> = q.iter().zip(&start_rate).map(|(x, r)| axpy(x, h, r, self.np)).collect();
        converged = false;
        for _ in 0..opts.max_iterations {
            let plain = self.plain_forms(&q_new, step)?;
            let dv = self.derivatives(&q_new);
            let end_rate = self.q_rate(&plain, &dv, &p_half);
            let next: Vec<Vals> = (0..q.len())
                .map(|i| {
                    let mut out = q[i];
                    for a in 0..self.np {
                        out[a] += half * (start_rate[i][a] + end_rate[i][a]);
                    }
                    out
                })
                .collect();
            let (diff, scale) = self.max_diff(&next, &q_new);
            q_new = next;
            if diff <= opts.iteration_tol * (1.0 + scale) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(GravError::Unstable(format!("position stage did not converge at step {step}")));
        }
        *c = self.cache(&q_new, step)?;
        // π' = π_{1/2} − h/2 ∂H/∂q(q', π_{1/2})
        let rate = self.pi_rate(c, &p_half);
        *pi = p_half.iter().zip(&rate).map(|(p, r)| axpy(p, half, r, self.np)).collect();
        *q = q_new;
        Ok(())
    }
}

fn axpy(x: &Vals, h: f64, r: &Vals, np: usize) -> Vals {
    let mut out = *x;
    for a in 0..np {
        out[a] += h * r[a];
    }
    out
}

/// Evolves the spatial metric and momenta of `lat` with g_0σ held fixed.
pub fn hamilton_evolve(lat: &LatticeField, opts: &EvolveOptions) -> Result<Trajectory> {
    let dx = lat.spacing();
    if !(opts.dt > 0.0) || opts.dt > opts.max_dt_ratio * dx {
        return Err(GravError::Unstable(format!(
            "time step {} outside (0, {} Δx] with Δx = {dx}",
            opts.dt, opts.max_dt_ratio
        )));
    }
    let d = lat.dim();
    let pairs = spatial_pairs(d);
    let np = pairs.len();
    let n = lat.len();
    let mut weights = [1.0; MAX_PAIRS];
    for (k, &p) in pairs.iter().enumerate() {
        weights[k] = pair_weight(p);
    }
    let st = stencil(n, lat.boundary(), dx);
    let mut st_t = vec![Vec::new(); n];
    for (i, row) in st.iter().enumerate() {
        for &(j, w) in row {
            st_t[j].push((i, w));
        }
    }
    let frozen: Vec<bool> = (0..n).map(|i| lat.boundary() == Boundary::Fixed && (i == 0 || i == n - 1)).collect();
    let lab = Lab { d, np, dx, gauge: lat.gauge(), weights, stencil: st, stencil_t: st_t, frozen };

    let mut q: Vec<Vals> = lat
        .points()
        .iter()
        .map(|p| {
            let mut v = [0.0; MAX_PAIRS];
            for (k, &(m, nn)) in pairs.iter().enumerate() {
                v[k] = p.metric().lower(m, nn);
            }
            v
        })
        .collect();
    let mut pi: Vec<Vals> = lat
        .points()
        .iter()
        .map(|p| {
            let mut v = [0.0; MAX_PAIRS];
            for (k, &(m, nn)) in pairs.iter().enumerate() {
                v[k] = p.momentum(m, nn);
            }
            v
        })
        .collect();

    let mut cache = lab.cache(&q, 0)?;
    let mut traj = Trajectory {
        d,
        spacing: dx,
        boundary: lat.boundary(),
        gauge: lat.gauge(),
        pairs: pairs.clone(),
        options: opts.clone(),
        energies: vec![lab.energy(&cache, &pi)],
        frames: Vec::new(),
    };
    let record = |traj: &mut Trajectory, step: usize, q: &[Vals], pi: &[Vals], c: &Cached| -> Result<()> {
        let g: Vec<Vec<f64>> = q.iter().map(|v| v[..np].to_vec()).collect();
        let p: Vec<Vec<f64>> = pi.iter().map(|v| v[..np].to_vec()).collect();
        let energy_density = c.plain.iter().zip(pi).zip(&c.dv).map(|((f, pp), dv)| f.energy(np, pp, dv)).collect();
        let mut frame = Frame { step, time: step as f64 * opts.dt, g, pi: p, energy_density, flux: Vec::new() };
        frame.flux = traj.frame_lattice(&frame)?.flux()?;
        traj.frames.push(frame);
        Ok(())
    };
    record(&mut traj, 0, &q, &pi, &cache)?;

    let sub: Vec<f64> = match opts.scheme {
        Scheme::Leapfrog => vec![1.0],
        Scheme::Yoshida4 => {
            let c = 2f64.powf(1.0 / 3.0);
            let w1 = 1.0 / (2.0 - c);
            vec![w1, -c * w1, w1]
        }
    };
    let h0 = traj.energies[0];
    let scale = if h0 == 0.0 { 1.0 } else { h0.abs() };
    for step in 1..=opts.steps {
        for &w in &sub {
            lab.leapfrog(w * opts.dt, &mut q, &mut pi, &mut cache, opts, step)?;
        }
        let h = lab.energy(&cache, &pi);
        traj.energies.push(h);
        let drift = (h - h0).abs() / scale;
        if !drift.is_finite() || drift > opts.drift_limit {
            return Err(GravError::Unstable(format!("relative energy drift {drift:e} at step {step}")));
        }
        if step % opts.record_every.max(1) == 0 || step == opts.steps {
            record(&mut traj, step, &q, &pi, &cache)?;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::lattice::KickSpec;

    #[test]
    fn flat_lattice_is_static() {
        let lat = LatticeField::flat(4, 12, 0.1, Boundary::Periodic).unwrap();
        let opts = EvolveOptions { dt: 0.01, steps: 20, ..Default::default() };
        let traj = hamilton_evolve(&lat, &opts).unwrap();
        let end = traj.frame_lattice(traj.last_frame()).unwrap();
        assert_eq!(end.max_state_diff(&lat), 0.0);
        assert_eq!(traj.max_relative_drift(), 0.0);
    }

    #[test]
    fn rejects_large_time_step() {
        let lat = LatticeField::flat(4, 12, 0.1, Boundary::Periodic).unwrap();
        let opts = EvolveOptions { dt: 0.05, ..Default::default() };
        assert!(matches!(hamilton_evolve(&lat, &opts), Err(GravError::Unstable(_))));
    }

    #[test]
    fn kick_conserves_energy_and_reverses() {
        let spec = KickSpec { component: (2, 3), amplitude: 0.05, width: 2.0, ..Default::default() };
        let lat = LatticeField::kick(4, 32, 0.1, Boundary::Periodic, &spec).unwrap();
        let opts = EvolveOptions { dt: 0.005, steps: 100, record_every: 100, ..Default::default() };
        let fwd = hamilton_evolve(&lat, &opts).unwrap();
        assert!(fwd.max_relative_drift() < 1e-6, "drift {}", fwd.max_relative_drift());
        let lattice_energy = lat.total_energy().unwrap();
        assert!((fwd.initial_energy() - lattice_energy).abs() < 1e-14);
        let mut mid = fwd.frame_lattice(fwd.last_frame()).unwrap();
        assert!(mid.max_state_diff(&lat) > 1e-4);
        mid.reverse_momenta();
        let back = hamilton_evolve(&mid, &opts).unwrap();
        let mut end = back.frame_lattice(back.last_frame()).unwrap();
        end.reverse_momenta();
        assert!(end.max_state_diff(&lat) < 1e-10, "{}", end.max_state_diff(&lat));
    }

    #[test]
    fn fixed_boundary_keeps_end_sites() {
        let spec = KickSpec { component: (2, 2), amplitude: 0.05, width: 1.5, ..Default::default() };
        let lat = LatticeField::kick(4, 20, 0.1, Boundary::Fixed, &spec).unwrap();
        let opts = EvolveOptions { dt: 0.01, steps: 40, record_every: 40, ..Default::default() };
        let traj = hamilton_evolve(&lat, &opts).unwrap();
        let f = traj.last_frame();
        assert_eq!(f.g[0], traj.frames[0].g[0]);
        assert_eq!(f.g[19], traj.frames[0].g[19]);
        assert!(traj.max_relative_drift() < 1e-6);
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,time,site,x,g11,g12,g13,g22,g23,g33,pi11"));
        assert_eq!(text.lines().count(), 1 + 2 * 20);
    }
}
