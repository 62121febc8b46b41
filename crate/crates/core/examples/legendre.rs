//! Velocities → momenta → velocities on random field points, the flat
//! worked case, and the primary constraints on shell.

use gravham::canonical::{momentum_from_velocity, primary_constraint, velocity_from_momentum, FieldPoint};
use gravham::sampling::random_field_point;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gravham::Result<()> {
    let mut p = FieldPoint::flat(4);
    p.set_velocity(1, 1, 1.0);
    let pi = momentum_from_velocity(&p);
    println!("flat, g_11,0 = 1: π^11 = {}, π^22 = {}, π^33 = {}", pi.get(&[1, 1]), pi.get(&[2, 2]), pi.get(&[3, 3]));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [3, 4] {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let p = random_field_point(d, &mut rng);
            let mut q = p.clone();
            q.set_momentum_tensor(momentum_from_velocity(&p));
            let v = velocity_from_momentum(&q)?;
            for a in 1..d {
                for b in 1..d {
                    worst = worst.max((v.get(&[a, b]) - p.velocity(a, b)).abs());
                }
            }
            for s in 0..d {
                worst = worst.max(primary_constraint(&q, s).abs());
            }
        }
        println!("d={d}: round-trip and primary-constraint residual {worst:.2e}");
    }
    Ok(())
}
