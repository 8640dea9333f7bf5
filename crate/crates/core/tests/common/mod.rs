#![allow(dead_code)]

use densig_core::{
    BipartiteDensityMatrix, Complex64, ComplexMatrix, DensityMatrix, Dims, PureState,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut StdRng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn random_vector(rng: &mut StdRng, dim: usize) -> Vec<Complex64> {
    (0..dim).map(|_| gaussian(rng)).collect()
}

pub fn random_matrix(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_vec(dim, random_vector(rng, dim * dim)).unwrap()
}

pub fn random_hermitian(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    random_matrix(rng, dim).hermitian_part()
}

/// Haar-ish unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = random_vector(rng, dim);
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

pub fn random_pure(rng: &mut StdRng, dims: Dims) -> PureState {
    let v = random_vector(rng, dims.total());
    PureState::normalized(dims, v).unwrap()
}

pub fn random_single_density(rng: &mut StdRng, dim: usize, terms: usize) -> DensityMatrix {
    let mut acc = ComplexMatrix::zeros(dim);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let psi = random_pure(rng, Dims::single(dim).unwrap());
        acc = &acc + &psi.projector().scale_real(w / total);
    }
    DensityMatrix::single(acc).unwrap()
}

/// Mixture of `terms` random pure states on `n⊗m`.
pub fn random_bipartite(
    rng: &mut StdRng,
    n: usize,
    m: usize,
    terms: usize,
) -> BipartiteDensityMatrix {
    let mut acc = ComplexMatrix::zeros(n * m);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let psi = random_pure(rng, Dims::bipartite(n, m).unwrap());
        acc = &acc + &psi.projector().scale_real(w / total);
    }
    BipartiteDensityMatrix::new(n, m, acc).unwrap()
}

pub fn random_dims(rng: &mut StdRng, max: usize) -> (usize, usize) {
    (rng.random_range(2..=max), rng.random_range(2..=max))
}
