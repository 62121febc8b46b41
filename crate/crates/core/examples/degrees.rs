//! Polynomial-degree report of the potential terms, for d = 3, 4, 5.

use gravham::nonlinear::{classify_S_terms, poly_det};

fn main() -> gravham::Result<()> {
    let det = poly_det(4);
    println!("det g at d=4: {} monomials of degree {}", det.len(), det.degree());
    for d in [3, 4, 5] {
        let r = classify_S_terms(d)?;
        println!("d={d}: {}", r.degree_line);
    }
    println!();
    print!("{}", classify_S_terms(4)?.to_text());
    Ok(())
}
