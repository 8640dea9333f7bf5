//! Block expansion of a bipartite state over an orthonormal basis of `A`,
//! the Hilbert–Schmidt Gram matrix of the blocks, and the rank verdict
//! derived from its spectrum.
//!
//! For `ρ = Σ_{ii'} |A_i⟩⟨A_i'| ⊗ ρ_{ii'}` the Gram matrix has entries
//! `X[(i₁,i₁'),(i₂,i₂')] = tr(ρ_{i₁i₁'} ρ_{i₂i₂'}†)`, with the pair
//! `(i, i')` flattened row-major to `i·n + i'`. Its rank counts the linearly
//! independent blocks; rank 1 means every block is proportional to a single
//! operator on `B`, i.e. `ρ = ρ_A ⊗ ρ_B`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::BipartiteDensityMatrix;
use crate::tensor::{hermitian_eig, hs_inner, kron, rank_by_eigs, ComplexMatrix, DEFAULT_RANK_TOL};

/// Default Frobenius threshold for [`product_test`].
pub const DEFAULT_PRODUCT_TOL: f64 = 1e-8;

const UNITARY_TOL: f64 = 1e-10;

/// How the `A` basis of an expansion was chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum BasisKind {
    Computational,
    Custom,
}

/// The `n×n` grid of `m×m` operators `ρ_{ii'}` on `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionBlocks {
    n: usize,
    m: usize,
    blocks: Vec<ComplexMatrix>,
    basis: ComplexMatrix,
    basis_kind: BasisKind,
}

impl ExpansionBlocks {
    /// Assembles blocks given row-major as `blocks[i·n + i']`, expressed in
    /// the computational basis of `A`.
    pub fn from_blocks(n: usize, m: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Dims("block grid dimensions must be positive".into()));
        }
        if blocks.len() != n * n {
            return Err(Error::Dims(format!(
                "expected {} blocks for n = {n}, got {}",
                n * n,
                blocks.len()
            )));
        }
        if let Some(b) = blocks.iter().find(|b| b.dim() != m) {
            return Err(Error::Dims(format!(
                "block of dimension {} in a grid of {m}x{m} blocks",
                b.dim()
            )));
        }
        Ok(Self {
            n,
            m,
            blocks,
            basis: ComplexMatrix::identity(n),
            basis_kind: BasisKind::Computational,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `ρ_{ii'}`.
    pub fn block(&self, i: usize, i_prime: usize) -> &ComplexMatrix {
        &self.blocks[i * self.n + i_prime]
    }

    /// Blocks in flattened order `i·n + i'`.
    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// Expansion coefficient `p_{ii',jj'}`, entry `(j, j')` of `ρ_{ii'}`.
    pub fn coefficient(&self, i: usize, i_prime: usize, j: usize, j_prime: usize) -> Complex64 {
        self.block(i, i_prime)[(j, j_prime)]
    }

    /// Columns are the `A` basis vectors `|A_i⟩`.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn basis_kind(&self) -> &BasisKind {
        &self.basis_kind
    }

    /// Largest entrywise violation of `ρ_{i'i} = ρ_{ii'}†`.
    pub fn pairing_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in 0..self.n {
                let d = self.block(k, i).max_abs_diff(&self.block(i, k).adjoint());
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `Σ_i tr(ρ_ii)`.
    pub fn total_trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.block(i, i).trace()).sum()
    }
}

fn check_unitary(u: &ComplexMatrix, n: usize) -> Result<()> {
    if u.dim() != n {
        return Err(Error::Basis(format!(
            "basis matrix is {0}x{0} but subsystem A has dimension {n}",
            u.dim()
        )));
    }
    let dev = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(n));
    if dev > UNITARY_TOL {
        return Err(Error::Basis(format!(
            "basis matrix is not unitary (max |U†U − I| = {dev:.3e})"
        )));
    }
    Ok(())
}

/// Splits `ρ` into blocks `ρ_{ii'} = (⟨A_i| ⊗ I) ρ (|A_i'⟩ ⊗ I)`, where
/// `|A_i⟩` is column `i` of `a_basis` (the computational basis when `None`).
pub fn expand(
    rho: &BipartiteDensityMatrix,
    a_basis: Option<&ComplexMatrix>,
) -> Result<ExpansionBlocks> {
    let (n, m) = (rho.n(), rho.m());
    let r = rho.matrix();
    let (basis, basis_kind) = match a_basis {
        Some(u) => {
            check_unitary(u, n)?;
            (u.clone(), BasisKind::Custom)
        }
        None => (ComplexMatrix::identity(n), BasisKind::Computational),
    };

    let mut blocks = Vec::with_capacity(n * n);
    for i in 0..n {
        for ip in 0..n {
            let mut block = ComplexMatrix::zeros(m);
            match basis_kind {
                BasisKind::Computational => {
                    for j in 0..m {
                        for jp in 0..m {
                            block[(j, jp)] = r[(i * m + j, ip * m + jp)];
                        }
                    }
                }
                BasisKind::Custom => {
                    for a in 0..n {
                        let left = basis[(a, i)].conj();
                        if left == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for ap in 0..n {
                            let w = left * basis[(ap, ip)];
                            if w == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            for j in 0..m {
                                for jp in 0..m {
                                    block[(j, jp)] += w * r[(a * m + j, ap * m + jp)];
                                }
                            }
                        }
                    }
                }
            }
            blocks.push(block);
        }
    }
    Ok(ExpansionBlocks {
        n,
        m,
        blocks,
        basis,
        basis_kind,
    })
}

/// `Σ_{ii'} |A_i⟩⟨A_i'| ⊗ ρ_{ii'}` in the basis the blocks were expanded in.
pub fn reconstruct(blocks: &ExpansionBlocks) -> Result<BipartiteDensityMatrix> {
    let (n, m) = (blocks.n, blocks.m);
    if blocks.blocks.len() != n * n || blocks.blocks.iter().any(|b| b.dim() != m) {
        return Err(Error::Dims("inconsistent block dimensions".into()));
    }
    let mut acc = ComplexMatrix::zeros(n * m);
    for i in 0..n {
        let col_i = blocks.basis.column(i);
        for ip in 0..n {
            let col_ip = blocks.basis.column(ip);
            let frame = ComplexMatrix::outer(&col_i, &col_ip)?;
            acc = &acc + &kron(&frame, blocks.block(i, ip));
        }
    }
    BipartiteDensityMatrix::new(n, m, acc)
}

/// Hilbert–Schmidt Gram matrix of the expansion blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct XMatrix {
    n: usize,
    mat: ComplexMatrix,
}

impl XMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }
}

/// Gram matrix from pairwise `tr(ρ_α ρ_β†)`.
pub fn x_matrix(blocks: &ExpansionBlocks) -> XMatrix {
    let nn = blocks.n * blocks.n;
    let mut mat = ComplexMatrix::zeros(nn);
    for alpha in 0..nn {
        for beta in alpha..nn {
            let v = hs_inner(&blocks.blocks[alpha], &blocks.blocks[beta])
                .expect("blocks share one dimension");
            mat[(alpha, beta)] = v;
            mat[(beta, alpha)] = v.conj();
        }
    }
    XMatrix { n: blocks.n, mat }
}

/// Gram matrix from the coefficient sum `Σ_{jj'} p_{α,jj'} p*_{β,jj'}`,
/// evaluated entry by entry without symmetrization.
pub fn x_matrix_coefficient_form(blocks: &ExpansionBlocks) -> XMatrix {
    let (n, m) = (blocks.n, blocks.m);
    let nn = n * n;
    let mut mat = ComplexMatrix::zeros(nn);
    for alpha in 0..nn {
        let (i1, i1p) = (alpha / n, alpha % n);
        for beta in 0..nn {
            let (i2, i2p) = (beta / n, beta % n);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                for jp in 0..m {
                    acc += blocks.coefficient(i1, i1p, j, jp)
                        * blocks.coefficient(i2, i2p, j, jp).conj();
                }
            }
            mat[(alpha, beta)] = acc;
        }
    }
    XMatrix { n, mat }
}

/// Spectrum, rank and product verdict of a bipartite state.
#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub is_product: bool,
    pub purity: f64,
    pub basis_label: String,
    pub rel_tol: f64,
}

/// Full analysis with intermediates, for callers that report them.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub blocks: ExpansionBlocks,
    pub x: XMatrix,
    pub signature: Signature,
}

pub fn analyze(
    rho: &BipartiteDensityMatrix,
    a_basis: Option<&ComplexMatrix>,
    rel_tol: f64,
) -> Result<Analysis> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::Numerical(format!(
            "rank tolerance must be positive, got {rel_tol}"
        )));
    }
    let blocks = expand(rho, a_basis)?;
    let x = x_matrix(&blocks);
    let eigenvalues = hermitian_eig(&x.mat)?.values;
    let rank = rank_by_eigs(&eigenvalues, rel_tol);
    let basis_label = match blocks.basis_kind {
        BasisKind::Computational => "computational".to_string(),
        BasisKind::Custom => "custom unitary".to_string(),
    };
    let signature = Signature {
        eigenvalues,
        rank,
        is_product: rank == 1,
        purity: rho.purity(),
        basis_label,
        rel_tol,
    };
    Ok(Analysis {
        blocks,
        x,
        signature,
    })
}

/// Eigenvalues of the Gram matrix, its numerical rank, and the verdict
/// `is_product = (rank == 1)`.
pub fn signature(
    rho: &BipartiteDensityMatrix,
    a_basis: Option<&ComplexMatrix>,
    rel_tol: f64,
) -> Result<Signature> {
    analyze(rho, a_basis, rel_tol).map(|a| a.signature)
}

/// [`signature`] in the computational basis at the default rank tolerance.
pub fn signature_default(rho: &BipartiteDensityMatrix) -> Result<Signature> {
    signature(rho, None, DEFAULT_RANK_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductTest {
    pub is_product: bool,
    /// `‖ρ − ρ_A ⊗ ρ_B‖_F`.
    pub deviation: f64,
}

/// Compares `ρ` against the product of its own marginals.
pub fn product_test(rho: &BipartiteDensityMatrix, tol: f64) -> Result<ProductTest> {
    let rho_a = rho.reduced_a()?;
    let rho_b = rho.reduced_b()?;
    let deviation = (rho.matrix() - &kron(rho_a.matrix(), rho_b.matrix())).frobenius_norm();
    Ok(ProductTest {
        is_product: deviation < tol,
        deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        bell_channel, classical_corr_channel, density_from_pure, product_state, DensityMatrix,
    };

    fn bell_rho() -> BipartiteDensityMatrix {
        BipartiteDensityMatrix::from_density(density_from_pure(&bell_channel()).unwrap()).unwrap()
    }

    fn e(j: usize, k: usize, v: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m[(j, k)] = Complex64::new(v, 0.0);
        m
    }

    #[test]
    fn expand_classical_channel() {
        let b = expand(&classical_corr_channel(), None).unwrap();
        assert_eq!(b.block(0, 0), &ComplexMatrix::diag_real(&[0.5, 0.0]));
        assert_eq!(b.block(1, 1), &ComplexMatrix::diag_real(&[0.0, 0.5]));
        assert_eq!(b.block(0, 1), &ComplexMatrix::zeros(2));
        assert_eq!(b.block(1, 0), &ComplexMatrix::zeros(2));
        assert!((b.total_trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expand_bell_channel() {
        let b = expand(&bell_rho(), None).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert!(
                    b.block(i, k).max_abs_diff(&e(i, k, 0.5)) < 1e-15,
                    "block ({i},{k})"
                );
            }
        }
        assert!(b.pairing_deviation() < 1e-12);
    }

    #[test]
    fn expand_product_gives_scaled_copies() {
        let ra = DensityMatrix::single(
            ComplexMatrix::from_rows(&[
                vec![Complex64::new(0.7, 0.0), Complex64::new(0.1, -0.3)],
                vec![Complex64::new(0.1, 0.3), Complex64::new(0.3, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let rb = DensityMatrix::single(ComplexMatrix::diag_real(&[0.1, 0.2, 0.7])).unwrap();
        let rho = product_state(&ra, &rb).unwrap();
        let b = expand(&rho, None).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let expected = rb.matrix().scale(ra.matrix()[(i, k)]);
                assert!(b.block(i, k).max_abs_diff(&expected) < 1e-15);
            }
        }
    }

    #[test]
    fn expand_rejects_non_unitary_basis() {
        let rho = classical_corr_channel();
        let bad = ComplexMatrix::diag_real(&[1.0, 2.0]);
        assert!(matches!(expand(&rho, Some(&bad)), Err(Error::Basis(_))));
        assert!(matches!(
            expand(&rho, Some(&ComplexMatrix::identity(3))),
            Err(Error::Basis(_))
        ));
    }

    #[test]
    fn reconstruct_round_trips() {
        let rho = classical_corr_channel();
        let back = reconstruct(&expand(&rho, None).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        let rho = bell_rho();
        let back = reconstruct(&expand(&rho, Some(&hadamard)).unwrap()).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn reconstruct_from_direct_blocks() {
        let blocks = ExpansionBlocks::from_blocks(
            2,
            2,
            vec![
                ComplexMatrix::diag_real(&[0.5, 0.0]),
                ComplexMatrix::zeros(2),
                ComplexMatrix::zeros(2),
                ComplexMatrix::diag_real(&[0.0, 0.5]),
            ],
        )
        .unwrap();
        let rho = reconstruct(&blocks).unwrap();
        assert_eq!(
            rho.matrix(),
            &ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5])
        );
        assert!(matches!(
            ExpansionBlocks::from_blocks(2, 2, vec![ComplexMatrix::zeros(2); 3]),
            Err(Error::Dims(_))
        ));
        assert!(matches!(
            ExpansionBlocks::from_blocks(2, 2, vec![ComplexMatrix::zeros(3); 4]),
            Err(Error::Dims(_))
        ));
    }

    #[test]
    fn x_matrix_examples() {
        let x = x_matrix(&expand(&classical_corr_channel(), None).unwrap());
        assert!(
            x.matrix()
                .max_abs_diff(&ComplexMatrix::diag_real(&[0.25, 0.0, 0.0, 0.25]))
                < 1e-15
        );

        let x = x_matrix(&expand(&bell_rho(), None).unwrap());
        assert!(
            x.matrix()
                .max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25))
                < 1e-15
        );
    }

    #[test]
    fn x_matrix_of_product_is_rank_one_outer() {
        let ra = DensityMatrix::single(
            ComplexMatrix::from_real_rows(&[&[0.6, 0.2], &[0.2, 0.4]]).unwrap(),
        )
        .unwrap();
        let rb = DensityMatrix::single(ComplexMatrix::diag_real(&[0.25, 0.75])).unwrap();
        let x = x_matrix(&expand(&product_state(&ra, &rb).unwrap(), None).unwrap());
        let rb_purity = rb.purity();
        for alpha in 0..4 {
            for beta in 0..4 {
                let g =
                    ra.matrix()[(alpha / 2, alpha % 2)] * ra.matrix()[(beta / 2, beta % 2)].conj();
                assert!((x.matrix()[(alpha, beta)] - g * rb_purity).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn x_matrix_tolerates_zero_blocks() {
        let blocks = ExpansionBlocks::from_blocks(2, 2, vec![ComplexMatrix::zeros(2); 4]).unwrap();
        let x = x_matrix(&blocks);
        let eig = hermitian_eig(x.matrix()).unwrap();
        assert_eq!(rank_by_eigs(&eig.values, DEFAULT_RANK_TOL), 0);
    }

    #[test]
    fn signature_examples() {
        let sig = signature_default(&bell_rho()).unwrap();
        for v in &sig.eigenvalues {
            assert!((v - 0.25).abs() < 1e-12);
        }
        assert_eq!(sig.rank, 4);
        assert!(!sig.is_product);
        assert!((sig.purity - 1.0).abs() < 1e-12);

        let sig = signature_default(&classical_corr_channel()).unwrap();
        let expected = [0.25, 0.25, 0.0, 0.0];
        for (v, e) in sig.eigenvalues.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(sig.rank, 2);
        assert!((sig.purity - 0.5).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let sig = signature_default(&product_state(&mixed, &mixed).unwrap()).unwrap();
        assert_eq!(sig.rank, 1);
        assert!(sig.is_product);
        assert!((sig.purity - 0.25).abs() < 1e-12);
        assert_eq!(sig.basis_label, "computational");
    }

    #[test]
    fn signature_rejects_bad_tolerance() {
        assert!(signature(&classical_corr_channel(), None, 0.0).is_err());
        assert!(signature(&classical_corr_channel(), None, f64::NAN).is_err());
    }

    #[test]
    fn product_test_examples() {
        let ra = DensityMatrix::single(
            ComplexMatrix::from_real_rows(&[&[0.6, 0.2], &[0.2, 0.4]]).unwrap(),
        )
        .unwrap();
        let rb = DensityMatrix::maximally_mixed(3).unwrap();
        let t = product_test(&product_state(&ra, &rb).unwrap(), DEFAULT_PRODUCT_TOL).unwrap();
        assert!(t.is_product && t.deviation < 1e-12);

        let t = product_test(&classical_corr_channel(), DEFAULT_PRODUCT_TOL).unwrap();
        assert!(!t.is_product);
        assert!((t.deviation - 0.5).abs() < 1e-12);

        let t = product_test(&bell_rho(), DEFAULT_PRODUCT_TOL).unwrap();
        assert!(!t.is_product);
        assert!((t.deviation - 0.75f64.sqrt()).abs() < 1e-12);
    }
}
