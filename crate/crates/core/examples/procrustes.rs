//! Orthogonal Procrustes: recover a hidden rotation from noisy
//! correspondences, and compare against random orthogonal candidates.

use delm::elm::solve_orthogonal_procrustes;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    g.qr().q()
}

fn main() -> delm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (n, d) = (200, 8);
    let rotation = random_orthogonal(d, &mut rng);
    let h = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
    let noise = DMatrix::from_fn(n, d, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        0.01 * z
    });
    let t = &h * &rotation + noise;

    let b = solve_orthogonal_procrustes(&h, &t)?;
    let gap = (b.matrix.tr_mul(&b.matrix) - DMatrix::identity(d, d)).amax();
    println!("orthogonality |BᵀB - I|_max = {gap:.1e}");
    println!(
        "distance to true rotation    = {:.2e}",
        (&b.matrix - &rotation).norm()
    );
    println!(
        "smallest singular value of HᵀT = {:.3e}",
        b.diagnostics.min_singular_value.unwrap()
    );

    let best = (&h * &b.matrix - &t).norm();
    let beaten = (0..1000)
        .filter(|_| (&h * random_orthogonal(d, &mut rng) - &t).norm() < best)
        .count();
    println!("residual {best:.4}; random orthogonal matrices that did better: {beaten} of 1000");
    Ok(())
}
