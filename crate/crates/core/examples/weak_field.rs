//! Weak-field scaling of the dynamical Hamiltonian around flat space:
//! the quadratic part is removed and the remainder's exponent fitted.

use gravham::canonical::hamiltonian_hc;
use gravham::nonlinear::{log_schedule, weak_field_expand, WeakFieldDirection};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gravham::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    for with_momentum in [false, true] {
        let dir = WeakFieldDirection::random(4, with_momentum, &mut rng);
        let fit = weak_field_expand(hamiltonian_hc, &dir, &log_schedule(1e-1, 1e-3, 12))?;
        println!(
            "momenta {with_momentum}: H ≈ {:.4} ε² + {:.4} ε³ + {:.4} ε⁴, remainder exponent {:.3}",
            fit.coefficients[0], fit.coefficients[1], fit.coefficients[2], fit.exponent
        );
    }
    Ok(())
}
