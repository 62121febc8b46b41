//! A Gaussian π^23 kick on a periodic 1+1D lattice: energy conservation,
//! time reversal, and the energy-front diagnostics.

use gravham::canonical::lattice::{
    front_diagnostics, hamilton_evolve, Boundary, EvolveOptions, FrontOptions, KickSpec, LatticeField,
};

fn main() -> gravham::Result<()> {
    let spec = KickSpec { component: (2, 3), amplitude: 0.01, width: 1.0, ..Default::default() };
    let lat = LatticeField::kick(4, 64, 0.1, Boundary::Periodic, &spec)?;
    let opts = EvolveOptions { dt: 0.002, steps: 500, record_every: 50, ..Default::default() };
    let traj = hamilton_evolve(&lat, &opts)?;
    println!("H(0) = {:.6e}, max relative drift {:.2e}", traj.initial_energy(), traj.max_relative_drift());

    let mut back = traj.frame_lattice(traj.last_frame())?;
    back.reverse_momenta();
    let returned = hamilton_evolve(&back, &opts)?;
    let mut end = returned.frame_lattice(returned.last_frame())?;
    end.reverse_momenta();
    println!("time-reversal closure {:.2e}", end.max_state_diff(&lat));

    for s in front_diagnostics(&traj, &FrontOptions::default())? {
        println!(
            "t = {:.2}  front {:.2}  fraction {:.3}  behind-front variance {:.2e}",
            s.time, s.front_position, s.front_energy_fraction, s.behind_front_variance
        );
    }
    Ok(())
}
