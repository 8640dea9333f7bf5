//! Deterministic fixtures for the criterion benchmarks.

use densig_core::{BipartiteDensityMatrix, Complex64, ComplexMatrix};
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

/// Random mixed state on `n⊗m` built from `terms` Gaussian pure states.
pub fn random_state(n: usize, m: usize, terms: usize, seed: u64) -> BipartiteDensityMatrix {
    let mut rng = StdRng::seed_from_u64(seed);
    let dim = n * m;
    let mut acc = ComplexMatrix::zeros(dim);
    for _ in 0..terms {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| {
                Complex64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        acc = &acc + &ComplexMatrix::outer(&v, &v).expect("non-empty vector");
    }
    let tr = acc.trace().re;
    BipartiteDensityMatrix::new(n, m, acc.scale_real(1.0 / tr)).expect("Gram sum is a valid state")
}
