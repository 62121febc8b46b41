//! Builds I, e and E on a random Lorentzian metric and checks the I·E
//! identity, then prints a few flat-space components.

use gravham::grav::{check_ie_inverse, spatial_block, tensor_b, tensor_big_e, tensor_i};
use gravham::sampling::random_metric;
use gravham::tensor::MetricState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gravham::Result<()> {
    let flat = MetricState::minkowski(4);
    let i = tensor_i(&flat)?;
    let e = spatial_block(&tensor_big_e(&flat)?);
    let b = tensor_b(&flat);
    println!("flat d=4: I_1111 = {}, I_1122 = {}", i.component(1, 1, 1, 1), i.component(1, 1, 2, 2));
    println!("flat d=4: E^1122 = {}, E^1212 = {}", e.get(&[0, 0, 1, 1]), e.get(&[0, 1, 0, 1]));
    println!("flat d=4: B^110000 = {}", b.get(&[1, 1, 0, 0, 0, 0]));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [3, 4, 5] {
        let worst = (0..20).map(|_| check_ie_inverse(&random_metric(d, &mut rng))).collect::<gravham::Result<Vec<_>>>()?;
        println!("d={d}: max |I E − δδ| over 20 metrics = {:.2e}", worst.iter().fold(0.0f64, |a, b| a.max(*b)));
    }
    Ok(())
}
