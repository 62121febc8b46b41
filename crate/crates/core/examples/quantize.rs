//! One-variable minisuperspace: a Gaussian in g_11 under the contracted
//! Hamiltonian at flat context spreads as a free packet with c = I_1111.

use gravham::canonical::FieldPoint;
use gravham::quantum::{
    build_hamiltonian_operator, evolve_schrodinger, free_coefficient, gaussian_width_law, quantum_bracket_check, Axis,
    CoefficientMode, ConfigGrid, SchrodingerOptions, WaveFunction,
};

fn main() -> gravham::Result<()> {
    let grid = ConfigGrid::new(vec![Axis::new((1, 1), 0.2, 1.8, 256)])?;
    let ctx = FieldPoint::flat(4);
    let h = build_hamiltonian_operator(&grid, &ctx, CoefficientMode::Frozen)?;
    let c = free_coefficient(&grid, &ctx, 0)?;
    println!("c = {c}, Hermiticity defect {:.1e}", h.hermiticity_defect);

    let opts = SchrodingerOptions { dtau: 1.28e-5, steps: 1000, ..Default::default() };
    let tau = opts.dtau * opts.steps as f64;
    for k in [0.0, 10.0, 20.0] {
        let psi = WaveFunction::gaussian(&grid, &[1.0], &[0.08], &[k]).normalized(&grid);
        let r = evolve_schrodinger(&grid, &psi, &h.op, &opts)?;
        let (mean, width) = r.final_state().moments(&grid, 0);
        println!(
            "k = {k:>4}: width {width:.5} (law {:.5}), centre {mean:.4} (law {:.4}), norm drift {:.1e}",
            gaussian_width_law(0.08, c, 1.0, tau),
            1.0 + 2.0 * c * k * tau,
            r.total_drift
        );
    }
    let coarse = quantum_bracket_check(&ConfigGrid::new(vec![Axis::new((1, 1), 0.2, 1.8, 64)])?)?;
    let fine = quantum_bracket_check(&ConfigGrid::new(vec![Axis::new((1, 1), 0.2, 1.8, 128)])?)?;
    println!("commutator residual {coarse:.2e} → {fine:.2e}, order {:.2}", (coarse / fine).log2());
    Ok(())
}
