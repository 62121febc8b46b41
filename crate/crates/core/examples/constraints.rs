//! Primary-constraint condition on a wave function extended over g_01,
//! and one step of the constraint chain.

use gravham::canonical::{cross_coefficient, FieldPoint};
use gravham::quantum::{
    build_hamiltonian_operator, constraint_chain_step, momentum_operator, primary_constraint_apply, Axis,
    CoefficientMode, ConfigGrid, WaveFunction,
};
use num_complex::Complex64;

fn main() -> gravham::Result<()> {
    let mut ctx = FieldPoint::flat(4);
    ctx.set_dg(1, 1, 1, 0.3);
    ctx.set_dg(0, 1, 2, -0.2);
    let coeff = 0.5 * ctx.metric().sqrt_neg_det() * cross_coefficient(&ctx).get(&[0, 1]);
    println!("frozen coefficient ½√−g C^01 = {coeff:.6}");
    for n in [33, 65, 129] {
        let grid = ConfigGrid::new(vec![Axis::new((1, 1), 0.5, 1.5, 9), Axis::new((0, 1), -0.5, 0.5, n)])?;
        // iħ ∂Ψ/∂g_01 = coeff Ψ
        let psi = WaveFunction::from_fn(&grid, |x| {
            Complex64::from_polar((-(x[0] - 1.0).powi(2) / 0.1).exp(), -coeff * x[1])
        });
        println!("N = {n:>3}: residual {:.2e}", primary_constraint_apply(&grid, &psi, &ctx)?.max);
    }

    let grid = ConfigGrid::new(vec![Axis::new((1, 1), 0.5, 1.5, 32), Axis::new((0, 1), -0.5, 0.5, 16)])?;
    let flat = FieldPoint::flat(4);
    let phi = momentum_operator(&grid, 1, None)?;
    let h = build_hamiltonian_operator(&grid, &flat, CoefficientMode::Frozen)?;
    let chi = constraint_chain_step(&phi, &h.op, grid.hbar());
    println!("homogeneous truncation: ‖(i/ħ)[π̂^01, Ĥ]‖_max = {:.1e}", chi.max_abs());
    Ok(())
}
