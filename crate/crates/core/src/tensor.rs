//! Dense complex linear algebra for small composite systems.
//!
//! Every composite index uses the A-major layout: for subsystems with
//! dimensions `[d0, d1, .., dk]` the flat index of the digit tuple
//! `(i0, i1, .., ik)` is `i0·(d1·..·dk) + i1·(d2·..·dk) + .. + ik`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative Hermiticity tolerance, scaled by the Frobenius norm of the input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default relative threshold for counting an eigenvalue as nonzero.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 100;

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dims("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Dims(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dims(
                "matrix rows must all have length equal to the row count".into(),
            ));
        }
        Self::from_vec(dim, rows.iter().flatten().copied().collect())
    }

    /// Real-valued matrix from row slices; convenient in tests and demos.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() || u.is_empty() {
            return Err(Error::Dims(format!(
                "outer product of vectors with lengths {} and {}",
                u.len(),
                v.len()
            )));
        }
        let dim = u.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in u {
            for b in v {
                data.push(a * b.conj());
            }
        }
        Self::from_vec(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `(h + h†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// `‖h − h†‖_F`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * self.frobenius_norm()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::Dims(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.dim, rhs.dim
            )));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::Dims(format!(
                "cannot apply a {0}x{0} matrix to a vector of length {1}",
                self.dim,
                v.len()
            )));
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix addition on mismatched dims");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix subtraction on mismatched dims");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on mismatched dims; use [`ComplexMatrix::matmul`] for a fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product on mismatched dims")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Ordered subsystem dimensions of a composite space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dims(format!(
                "subsystem dimensions must be a non-empty list of positive integers, got {dims:?}"
            )));
        }
        Ok(Self(dims))
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn bipartite(n: usize, m: usize) -> Result<Self> {
        Self::new(vec![n, m])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Flat-index weight of each subsystem digit.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for s in (0..self.0.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * self.0[s + 1];
        }
        strides
    }

    pub fn flat_index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.0.len() {
            return Err(Error::Dims(format!(
                "index has {} digits but the space has {} subsystems",
                digits.len(),
                self.0.len()
            )));
        }
        let mut flat = 0;
        for (&d, &size) in digits.iter().zip(&self.0) {
            if d >= size {
                return Err(Error::Dims(format!(
                    "digit {d} out of range for dimension {size}"
                )));
            }
            flat = flat * size + d;
        }
        Ok(flat)
    }

    fn check_matches(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::Dims(format!(
                "subsystem dims {:?} multiply to {} but matrix dimension is {dim}",
                self.0,
                self.total()
            )));
        }
        Ok(())
    }

    fn check_subset(&self, subset: &[usize], what: &str) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::Dims(format!("{what} set must be non-empty")));
        }
        for (k, &s) in subset.iter().enumerate() {
            if s >= self.0.len() {
                return Err(Error::Dims(format!(
                    "{what} index {s} out of range for {} subsystems",
                    self.0.len()
                )));
            }
            if subset[..k].contains(&s) {
                return Err(Error::Dims(format!("{what} index {s} repeated")));
            }
        }
        Ok(())
    }

    /// Flat-offset contribution of every multi-index over `subset`, in the digit
    /// order given by `subset`.
    fn offsets(&self, subset: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &s in subset {
            let mut next = Vec::with_capacity(offsets.len() * self.0[s]);
            for &base in &offsets {
                for d in 0..self.0[s] {
                    next.push(base + d * strides[s]);
                }
            }
            offsets = next;
        }
        offsets
    }

    fn complement(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.0.len()).filter(|s| !subset.contains(s)).collect()
    }
}

/// Kronecker product `a ⊗ b` in A-major layout.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.dim, b.dim);
    let mut out = ComplexMatrix::zeros(n * m);
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)];
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k, j * m + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors, A-major.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Traces out every subsystem not listed in `keep`. The kept factors appear
/// in the order given by `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &Dims, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check_matches(m.dim)?;
    dims.check_subset(keep, "keep")?;
    let traced = dims.complement(keep);
    let kept_off = dims.offsets(keep);
    let traced_off = dims.offsets(&traced);

    let kd = kept_off.len();
    let mut out = ComplexMatrix::zeros(kd);
    for (r, &ro) in kept_off.iter().enumerate() {
        for (c, &co) in kept_off.iter().enumerate() {
            out[(r, c)] = traced_off.iter().map(|&t| m[(ro + t, co + t)]).sum();
        }
    }
    Ok(out)
}

/// Lifts `op`, acting on the subsystems `targets` (in that factor order), to
/// the full space with identity on the rest.
pub fn embed_op(op: &ComplexMatrix, dims: &Dims, targets: &[usize]) -> Result<ComplexMatrix> {
    dims.check_subset(targets, "target")?;
    let target_dim: usize = targets.iter().map(|&t| dims.0[t]).product();
    if op.dim != target_dim {
        return Err(Error::Dims(format!(
            "operator dimension {} does not match target subsystems of total dimension {target_dim}",
            op.dim
        )));
    }
    let rest = dims.complement(targets);
    let target_off = dims.offsets(targets);
    let rest_off = dims.offsets(&rest);

    let mut out = ComplexMatrix::zeros(dims.total());
    for (r, &ro) in target_off.iter().enumerate() {
        for (c, &co) in target_off.iter().enumerate() {
            let v = op[(r, c)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &x in &rest_off {
                out[(ro + x, co + x)] = v;
            }
        }
    }
    Ok(out)
}

/// Hilbert–Schmidt inner product `tr(a·b†)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.dim != b.dim {
        return Err(Error::Dims(format!(
            "Hilbert-Schmidt product of {0}x{0} and {1}x{1} matrices",
            a.dim, b.dim
        )));
    }
    // tr(a b†) = Σ_ij a_ij conj(b_ij)
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y.conj()).sum())
}

/// Spectrum of a Hermitian matrix: eigenvalues in descending order and the
/// unitary whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// The input is symmetrized as `(h + h†)/2` first; inputs whose anti-Hermitian
/// part exceeds `1e-10·‖h‖_F` are rejected.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let norm = h.frobenius_norm();
    let deviation = h.hermitian_deviation();
    let allowed = HERMITIAN_TOL * norm;
    if deviation > allowed {
        return Err(Error::NotHermitian { deviation, allowed });
    }

    let n = h.dim;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let target = f64::EPSILON * norm;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > 1e-13 * norm {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge (off-diagonal norm {off:.3e})"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, dst)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation zeroing `a[p][q]`; accumulates the rotation into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // e^{-iφ} with a_pq = |a_pq| e^{iφ}
    let phase = apq.conj() / mag;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    } else {
        // |a_pq| negligible against the diagonal gap
        mag / (aqq - app)
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]] on the (p, q) plane.
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase * s;
    let jqq = phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Number of eigenvalues with `|λ| ≥ rel_tol·max|λ|`; zero for an all-zero list.
pub fn rank_by_eigs(eigenvalues: &[f64], rel_tol: f64) -> usize {
    let max = eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if max == 0.0 {
        return 0;
    }
    let threshold = rel_tol * max;
    eigenvalues.iter().filter(|x| x.abs() >= threshold).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let p0 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let p1 = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert_eq!(
            kron(&p0, &p1),
            ComplexMatrix::diag_real(&[0.0, 1.0, 0.0, 0.0])
        );
    }

    #[test]
    fn kron_sigma_x_with_diagonal() {
        let (a, b) = (c(0.3, 0.1), c(-2.0, 0.5));
        let mut d = ComplexMatrix::zeros(2);
        d[(0, 0)] = a;
        d[(1, 1)] = b;
        let k = kron(&sigma_x(), &d);
        let zero = c(0.0, 0.0);
        let expected = [
            [zero, zero, a, zero],
            [zero, zero, zero, b],
            [a, zero, zero, zero],
            [zero, b, zero, zero],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_eq!(k[(i, j)], e, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let ra = ComplexMatrix::from_real_rows(&[&[0.7, 0.2], &[0.2, 0.3]]).unwrap();
        let rb = ComplexMatrix::from_real_rows(&[
            &[0.5, 0.0, 0.1],
            &[0.0, 0.25, 0.0],
            &[0.1, 0.0, 0.25],
        ])
        .unwrap();
        let dims = Dims::bipartite(2, 3).unwrap();
        let k = kron(&ra, &rb);
        assert!(partial_trace(&k, &dims, &[0]).unwrap().max_abs_diff(&ra) < 1e-15);
        assert!(partial_trace(&k, &dims, &[1]).unwrap().max_abs_diff(&rb) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let rho = ComplexMatrix::outer(&psi, &psi).unwrap();
        let dims = Dims::bipartite(2, 2).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(
            partial_trace(&rho, &dims, &[1])
                .unwrap()
                .max_abs_diff(&half)
                < 1e-15
        );
        let classical = ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]);
        assert!(
            partial_trace(&classical, &dims, &[0])
                .unwrap()
                .max_abs_diff(&half)
                < 1e-15
        );
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &Dims::bipartite(2, 3).unwrap(), &[0]),
            Err(Error::Dims(_))
        ));
        assert!(partial_trace(&m, &Dims::bipartite(2, 2).unwrap(), &[]).is_err());
        assert!(partial_trace(&m, &Dims::bipartite(2, 2).unwrap(), &[2]).is_err());
        assert!(partial_trace(&m, &Dims::bipartite(2, 2).unwrap(), &[0, 0]).is_err());
    }

    #[test]
    fn embed_identity_and_projector() {
        let dims = Dims::bipartite(2, 2).unwrap();
        assert_eq!(
            embed_op(&ComplexMatrix::identity(2), &dims, &[1]).unwrap(),
            ComplexMatrix::identity(4)
        );
        assert_eq!(
            embed_op(&ComplexMatrix::diag_real(&[1.0, 0.0]), &dims, &[0]).unwrap(),
            ComplexMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0])
        );
        assert!(matches!(
            embed_op(&ComplexMatrix::identity(3), &dims, &[0]),
            Err(Error::Dims(_))
        ));
    }

    #[test]
    fn embed_non_contiguous_acts_on_outer_factors() {
        // Arbitrary 4x4 operator on (a, c); check every basis vector by index arithmetic.
        let mut op = ComplexMatrix::zeros(4);
        for r in 0..4 {
            for col in 0..4 {
                op[(r, col)] = c((r * 4 + col) as f64, (r as f64) - (col as f64));
            }
        }
        let dims = Dims::new(vec![2, 2, 2]).unwrap();
        let full = embed_op(&op, &dims, &[0, 2]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    let mut e = vec![c(0.0, 0.0); 8];
                    e[a * 4 + b * 2 + cc] = c(1.0, 0.0);
                    let out = full.mul_vec(&e).unwrap();
                    for a2 in 0..2 {
                        for b2 in 0..2 {
                            for c2 in 0..2 {
                                let expected = if b2 == b {
                                    op[(a2 * 2 + c2, a * 2 + cc)]
                                } else {
                                    c(0.0, 0.0)
                                };
                                assert_eq!(out[a2 * 4 + b2 * 2 + c2], expected);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hs_inner_examples() {
        let e11 = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let e22 = ComplexMatrix::diag_real(&[0.0, 1.0]);
        let mut e12 = ComplexMatrix::zeros(2);
        e12[(0, 1)] = c(1.0, 0.0);
        assert_eq!(hs_inner(&e11, &e11).unwrap(), c(1.0, 0.0));
        assert_eq!(hs_inner(&e11, &e22).unwrap(), c(0.0, 0.0));
        assert_eq!(hs_inner(&e12, &e12).unwrap(), c(1.0, 0.0));
        assert!(hs_inner(&e11, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn eig_of_diagonal_and_sigma_x() {
        let e = hermitian_eig(&ComplexMatrix::diag_real(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        let e = hermitian_eig(&sigma_x()).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn eig_of_complex_hermitian_reconstructs() {
        let h = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, -1.0), c(0.5, 0.5)],
            vec![c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, -0.5), c(0.0, 0.0), c(0.25, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eig(&h).unwrap();
        let lambda = ComplexMatrix::diag_real(&e.values);
        let recon = &(&e.vectors * &lambda) * &e.vectors.adjoint();
        assert!((&recon - &h).frobenius_norm() < 1e-12 * h.frobenius_norm());
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_tolerates_round_off_asymmetry() {
        let mut m = sigma_x();
        m[(0, 1)] += c(1e-14, 0.0);
        assert!(hermitian_eig(&m).is_ok());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_by_eigs(&[1.0, 0.0, 0.0, 0.0], 1e-9), 1);
        assert_eq!(rank_by_eigs(&[0.25; 4], 1e-9), 4);
        assert_eq!(rank_by_eigs(&[0.5, 1e-15, 0.0], 1e-9), 1);
        assert_eq!(rank_by_eigs(&[0.0, 0.0], 1e-9), 0);
        assert_eq!(rank_by_eigs(&[], 1e-9), 0);
        // ties at the threshold count as nonzero
        assert_eq!(rank_by_eigs(&[1.0, 0.5], 0.5), 2);
    }

    #[test]
    fn dims_validation_and_flat_index() {
        assert!(Dims::new(vec![]).is_err());
        assert!(Dims::new(vec![2, 0]).is_err());
        let d = Dims::new(vec![2, 3, 4]).unwrap();
        assert_eq!(d.total(), 24);
        assert_eq!(d.strides(), vec![12, 4, 1]);
        assert_eq!(d.flat_index(&[1, 2, 3]).unwrap(), 23);
        assert!(d.flat_index(&[2, 0, 0]).is_err());
    }

    #[test]
    fn from_vec_rejects_non_finite() {
        assert!(matches!(
            ComplexMatrix::from_vec(1, vec![c(f64::NAN, 0.0)]),
            Err(Error::Numerical(_))
        ));
        assert!(matches!(
            ComplexMatrix::from_vec(2, vec![c(1.0, 0.0)]),
            Err(Error::Dims(_))
        ));
    }
}
