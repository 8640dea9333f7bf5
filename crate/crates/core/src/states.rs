//! Validated state types and the named constructors used throughout the crate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eig, kron, partial_trace, ComplexMatrix, Dims, HERMITIAN_TOL};

/// Absolute tolerance for normalization, unit trace and positivity checks.
pub const STATE_TOL: f64 = 1e-10;

/// Normalized state vector on a (possibly composite) space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Dims,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: Dims, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::Dims(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                dims.total()
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::State("amplitudes must be finite".into()));
        }
        let norm = norm2(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::State(format!(
                "state vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm; rejects the zero vector.
    pub fn normalized(dims: Dims, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm2(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::State(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(dims, amplitudes)
    }

    /// Computational basis vector with the given digits.
    pub fn basis(dims: Dims, digits: &[usize]) -> Result<Self> {
        let flat = dims.flat_index(digits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dims.total()];
        amplitudes[flat] = Complex64::new(1.0, 0.0);
        Self::new(dims, amplitudes)
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dims != other.dims {
            return Err(Error::Dims(
                "inner product of states on different spaces".into(),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
            .expect("amplitudes are non-empty and finite")
    }
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Dims,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `mat`. Anti-Hermitian noise below `1e-10·‖mat‖_F` is
    /// removed; anything larger is rejected.
    pub fn new(dims: Dims, mat: ComplexMatrix) -> Result<Self> {
        if dims.total() != mat.dim() {
            return Err(Error::Dims(format!(
                "subsystem dims {:?} do not match a {}x{} matrix",
                dims.as_slice(),
                mat.dim(),
                mat.dim()
            )));
        }
        if !mat.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::State(format!(
                "density matrix is not Hermitian (deviation {:.3e})",
                mat.hermitian_deviation()
            )));
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::State(format!(
                "density matrix has trace {tr}, expected 1"
            )));
        }
        let min_eig = hermitian_eig(&mat)?.values.last().copied().unwrap_or(0.0);
        if min_eig < -STATE_TOL {
            return Err(Error::State(format!(
                "density matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { dims, mat })
    }

    /// Single-system state of the matrix's own dimension.
    pub fn single(mat: ComplexMatrix) -> Result<Self> {
        Self::new(Dims::single(mat.dim())?, mat)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::single(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // ρ Hermitian ⇒ tr(ρ²) = ‖ρ‖_F²
        self.mat.frobenius_norm().powi(2)
    }

    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mat = partial_trace(&self.mat, &self.dims, keep)?;
        let kept: Vec<usize> = keep.iter().map(|&k| self.dims.as_slice()[k]).collect();
        DensityMatrix::new(Dims::new(kept)?, mat)
    }
}

/// Density matrix on `A⊗B` with subsystem dimensions `n` and `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteDensityMatrix {
    n: usize,
    m: usize,
    inner: DensityMatrix,
}

impl BipartiteDensityMatrix {
    pub fn new(n: usize, m: usize, mat: ComplexMatrix) -> Result<Self> {
        let inner = DensityMatrix::new(Dims::bipartite(n, m)?, mat)?;
        Ok(Self { n, m, inner })
    }

    pub fn from_density(rho: DensityMatrix) -> Result<Self> {
        match *rho.dims().as_slice() {
            [n, m] => Ok(Self { n, m, inner: rho }),
            _ => Err(Error::Dims(format!(
                "expected a two-factor state, got dims {:?}",
                rho.dims().as_slice()
            ))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.inner.matrix()
    }

    pub fn as_density(&self) -> &DensityMatrix {
        &self.inner
    }

    pub fn purity(&self) -> f64 {
        self.inner.purity()
    }

    /// `tr_B(ρ)`.
    pub fn reduced_a(&self) -> Result<DensityMatrix> {
        self.inner.reduce(&[0])
    }

    /// `tr_A(ρ)`.
    pub fn reduced_b(&self) -> Result<DensityMatrix> {
        self.inner.reduce(&[1])
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_from_pure(psi: &PureState) -> Result<DensityMatrix> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > STATE_TOL {
        return Err(Error::State(format!(
            "state vector has norm {norm}, expected 1"
        )));
    }
    DensityMatrix::new(psi.dims().clone(), psi.projector())
}

fn require_single(rho: &DensityMatrix, role: &str) -> Result<()> {
    if rho.dims().len() != 1 {
        return Err(Error::State(format!(
            "{role} factor must be a single-system state, got dims {:?}",
            rho.dims().as_slice()
        )));
    }
    Ok(())
}

/// `ρ_A ⊗ ρ_B`.
pub fn product_state(
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
) -> Result<BipartiteDensityMatrix> {
    require_single(rho_a, "A")?;
    require_single(rho_b, "B")?;
    BipartiteDensityMatrix::new(
        rho_a.dim(),
        rho_b.dim(),
        kron(rho_a.matrix(), rho_b.matrix()),
    )
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Weight("at least one weight is required".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::Weight(format!(
            "weight {w} is negative or non-finite"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > STATE_TOL {
        return Err(Error::Weight(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// `Σ_i p_i ρ_i^A ⊗ ρ_i^B`.
pub fn separable_mixture(
    weights: &[f64],
    pairs: &[(DensityMatrix, DensityMatrix)],
) -> Result<BipartiteDensityMatrix> {
    if weights.len() != pairs.len() {
        return Err(Error::Weight(format!(
            "{} weights for {} product terms",
            weights.len(),
            pairs.len()
        )));
    }
    check_weights(weights)?;
    let (n, m) = (pairs[0].0.dim(), pairs[0].1.dim());
    let mut acc = ComplexMatrix::zeros(n * m);
    for (&w, (ra, rb)) in weights.iter().zip(pairs) {
        require_single(ra, "A")?;
        require_single(rb, "B")?;
        if ra.dim() != n || rb.dim() != m {
            return Err(Error::Dims(format!(
                "mixture term has dims ({}, {}) but the first term has ({n}, {m})",
                ra.dim(),
                rb.dim()
            )));
        }
        acc = &acc + &kron(ra.matrix(), rb.matrix()).scale_real(w);
    }
    BipartiteDensityMatrix::new(n, m, acc)
}

/// Convex combination `Σ_i p_i ρ_i` of states on one space.
pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    if weights.len() != states.len() {
        return Err(Error::Weight(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    check_weights(weights)?;
    let dims = states[0].dims().clone();
    let mut acc = ComplexMatrix::zeros(dims.total());
    for (&w, rho) in weights.iter().zip(states) {
        if rho.dims() != &dims {
            return Err(Error::Dims(format!(
                "cannot mix states with dims {:?} and {:?}",
                dims.as_slice(),
                rho.dims().as_slice()
            )));
        }
        acc = &acc + &rho.matrix().scale_real(w);
    }
    DensityMatrix::new(dims, acc)
}

/// `½(|A₁B₁⟩⟨A₁B₁| + |A₂B₂⟩⟨A₂B₂|)`.
pub fn classical_corr_channel() -> BipartiteDensityMatrix {
    BipartiteDensityMatrix::new(2, 2, ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]))
        .expect("constant state is valid")
}

/// `(|A₁B₁⟩ + |A₂B₂⟩)/√2`.
pub fn bell_channel() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    PureState::new(
        Dims::bipartite(2, 2).expect("static dims"),
        vec![Complex64::new(s, 0.0), z, z, Complex64::new(s, 0.0)],
    )
    .expect("constant state is valid")
}

/// `Σ_i √p_i |A_i B_i C_i⟩` over the first `weights.len()` computational
/// basis vectors of each factor.
pub fn tripartite_pure(weights: &[f64], dims: &Dims) -> Result<PureState> {
    if dims.len() != 3 {
        return Err(Error::Dims(format!(
            "tripartite state needs three subsystem dims, got {}",
            dims.len()
        )));
    }
    check_weights(weights)?;
    let smallest = dims.as_slice().iter().copied().min().unwrap_or(0);
    if weights.len() > smallest {
        return Err(Error::Dims(format!(
            "{} Schmidt terms do not fit in subsystem dims {:?}",
            weights.len(),
            dims.as_slice()
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dims.total()];
    for (i, &p) in weights.iter().enumerate() {
        amplitudes[dims.flat_index(&[i, i, i])?] = Complex64::new(p.sqrt(), 0.0);
    }
    PureState::new(dims.clone(), amplitudes)
}

/// Which pair of a three-factor system survives a reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairSelector {
    AB,
    AC,
    BC,
}

impl PairSelector {
    pub fn indices(self) -> [usize; 2] {
        match self {
            PairSelector::AB => [0, 1],
            PairSelector::AC => [0, 2],
            PairSelector::BC => [1, 2],
        }
    }

    pub fn traced(self) -> usize {
        match self {
            PairSelector::AB => 2,
            PairSelector::AC => 1,
            PairSelector::BC => 0,
        }
    }
}

/// Reduced two-party state of a three-party pure state.
pub fn reduce_tripartite(psi: &PureState, keep: PairSelector) -> Result<BipartiteDensityMatrix> {
    if psi.dims().len() != 3 {
        return Err(Error::Dims(format!(
            "expected a three-factor state, got dims {:?}",
            psi.dims().as_slice()
        )));
    }
    let rho = density_from_pure(psi)?;
    BipartiteDensityMatrix::from_density(rho.reduce(&keep.indices())?)
}
