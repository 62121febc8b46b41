//! The symbolic Poisson-bracket engine: fundamental brackets, the bracket
//! of a momentum with B g_,k, and the Jacobi identity on random expressions.

use gravham::canonical::{bracket_pi_with_bg, bracket_pi_with_bg_engine, poisson_bracket, CanonicalExpr, FieldPoint, Symbol};
use gravham::cli::bracket_axioms;
use gravham::sampling::random_field_point;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gravham::Result<()> {
    let g12 = CanonicalExpr::symbol(Symbol::metric(1, 2));
    let pi12 = CanonicalExpr::symbol(Symbol::momentum(1, 2));
    let ginv11 = CanonicalExpr::symbol(Symbol::inverse_metric(1, 1));
    let pi11 = CanonicalExpr::symbol(Symbol::momentum(1, 1));
    println!("{{g_12, π^12}} = {}", poisson_bracket(&g12, &pi12)?);
    println!("{{π^11, g^11}} = {}", poisson_bracket(&pi11, &ginv11)?);
    println!("at flat: {}", poisson_bracket(&pi11, &ginv11)?.eval(&FieldPoint::flat(4))?);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_field_point(4, &mut rng);
    let direct = bracket_pi_with_bg(&p, 1, 2);
    let engine = bracket_pi_with_bg_engine(&p, 1, 2)?;
    println!("{{π^mn, B^(12 0|μνk) g_μν,k}}: closed form vs engine {:.2e}", direct.max_abs_diff(&engine)?);

    let [a, l, j] = bracket_axioms(4, 20, &mut rng)?;
    println!("antisymmetry {a:.1e}, Leibniz {l:.1e}, Jacobi {j:.1e}");
    Ok(())
}
