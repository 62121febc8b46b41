//! Discrete Gauss law for the energy flux on periodic and fixed lattices.

use gravham::canonical::lattice::{gauss_energy, hamilton_evolve, Boundary, EvolveOptions, KickSpec, LatticeField};

fn main() -> gravham::Result<()> {
    let spec = KickSpec { component: (2, 2), amplitude: 0.05, width: 2.0, ..Default::default() };
    for boundary in [Boundary::Periodic, Boundary::Fixed] {
        let lat = LatticeField::kick(4, 48, 0.1, boundary, &spec)?;
        let traj = hamilton_evolve(&lat, &EvolveOptions { steps: 200, record_every: 200, ..Default::default() })?;
        let g = gauss_energy(&traj.frame_lattice(traj.last_frame())?)?;
        println!(
            "{boundary:?}: ∫ div G = {:.6e}, boundary flux = {:.6e}, residual {:.1e}",
            g.volume_integral,
            g.surface_integral,
            g.residual()
        );
    }
    Ok(())
}
