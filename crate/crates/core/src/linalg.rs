//! Small dense complex linear algebra.
//!
//! Everything in this crate lives in spaces of dimension at most a few tens
//! (the largest object is the 6×6 joint output state), so a plain row-major
//! matrix and a cyclic Jacobi eigensolver are all that is needed.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Maximum allowed `‖M − M†‖_max` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Entries in `[−PROBABILITY_CLAMP, 0)` are treated as roundoff and clamped to zero.
pub const PROBABILITY_CLAMP: f64 = 1e-10;

/// Allowed deviation of a probability vector's sum from one.
pub const NORMALIZATION_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
    )]
    ConvergenceFailure { sweeps: usize, residual: f64 },
    #[error("probability {value:e} at index {index} is negative beyond roundoff")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("invalid matrix shape: {0}")]
    Shape(String),
    #[error("matrix contains a non-finite entry")]
    NonFinite,
}

/// Dense complex matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad shapes and NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Shape(format!(
                "{rows}x{cols} has an empty dimension"
            )));
        }
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience constructor from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        let data = rows.iter().flatten().copied().collect();
        Self::from_vec(nrows, ncols, data).expect("valid matrix")
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Complex64::conj).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − other‖_max`; panics if the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖M − M†‖_max`, or infinity for non-square input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Matrix product; panics on incompatible shapes.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes for matmul");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            self.cols,
            v.len(),
            "incompatible shapes for matrix-vector product"
        );
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Traces out the second factor of a `(dim_a·dim_b)`-dimensional operator.
    pub fn partial_trace_second(&self, dim_a: usize, dim_b: usize) -> Result<Self, LinalgError> {
        if self.rows != dim_a * dim_b || self.cols != dim_a * dim_b {
            return Err(LinalgError::Shape(format!(
                "{}x{} operator cannot be split as {dim_a}x{dim_b}",
                self.rows, self.cols
            )));
        }
        let mut out = Self::zeros(dim_a, dim_a);
        for i in 0..dim_a {
            for j in 0..dim_a {
                out[(i, j)] = (0..dim_b)
                    .map(|k| self[(i * dim_b + k, j * dim_b + k)])
                    .sum();
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
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
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
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

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending; column `k` of `eigenvectors` belongs
/// to `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V·diag(λ)·V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= self.eigenvalues[j];
            }
        }
        scaled.matmul(&self.eigenvectors.adjoint())
    }
}

/// Diagonalises a Hermitian matrix with cyclic complex Jacobi rotations.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Spectrum, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }

    let n = m.rows();
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let threshold = JACOBI_OFF_DIAGONAL_TOL * scale;

    let mut converged = scale == 0.0 || off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::ConvergenceFailure {
                sweeps,
                residual: off_diagonal_norm(&a),
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps first-occurrence order among ties.
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Applies `A ← G†AG`, `V ← VG` for the unitary that zeroes `A[p][q]`.
///
/// `G = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]` on the (p, q) plane, where
/// `A[p][q] = |b|·e^{iφ}` and `(c, s)` is the real Jacobi rotation for
/// `[[a_pp, |b|], [|b|, a_qq]]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_phase = phase * s; // s·e^{iφ}

    let n = a.rows();
    // A ← A·G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s_phase.conj();
        a[(k, q)] = akp * s_phase + akq * c;
    }
    // A ← G†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s_phase;
        a[(q, k)] = apk * s_phase.conj() + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V·G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s_phase.conj();
        v[(k, q)] = vkp * s_phase + vkq * c;
    }
}

/// Shannon/von Neumann entropy `−Σ pᵢ log₂ pᵢ` of a probability vector, in bits.
pub fn entropy_bits(probabilities: &[f64]) -> Result<f64, LinalgError> {
    let mut sum = 0.0;
    for (index, &p) in probabilities.iter().enumerate() {
        if !p.is_finite() || p < -PROBABILITY_CLAMP {
            return Err(LinalgError::NegativeProbability { index, value: p });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(LinalgError::NotNormalized { sum });
    }
    let h = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Kronecker product; row index of `A_ij·B_kl` is `i·rows(B) + k`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols)
            .map(|_| {
                c(
                    rng.random::<f64>() * 2.0 - 1.0,
                    rng.random::<f64>() * 2.0 - 1.0,
                )
            })
            .collect();
        ComplexMatrix::from_vec(rows, cols, data).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        let a = random_matrix(rng, n, n);
        &a + &a.adjoint()
    }

    #[test]
    fn identity_spectrum() {
        let s = hermitian_eigensystem(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
        let gram = s.eigenvectors.adjoint().matmul(&s.eigenvectors);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]);
        let s = hermitian_eigensystem(&x).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = s.eigenvectors.column(0);
        let v1 = s.eigenvectors.column(1);
        // Up to a global phase: |⟨(1,1)/√2 | v0⟩| = 1.
        assert!(((v0[0] + v0[1]) * r).norm() > 1.0 - 1e-12);
        assert!(((v1[0] - v1[1]) * r).norm() > 1.0 - 1e-12);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 6);
            let s = hermitian_eigensystem(&h).unwrap();
            assert!(s.reconstruct().max_abs_diff(&h) < 1e-10);
            let gram = s.eigenvectors.adjoint().matmul(&s.eigenvectors);
            assert!(gram.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            let norm = h.frobenius_norm();
            for k in 0..6 {
                let v = s.eigenvectors.column(k);
                let hv = h.mul_vec(&v);
                let res: f64 = hv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * s.eigenvalues[k]).norm())
                    .fold(0.0, f64::max);
                assert!(res < 1e-10 * norm.max(1.0));
            }
        }
    }

    #[test]
    fn eigenvalues_agree_with_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=9 {
            let h = random_hermitian(&mut rng, n);
            let ours = hermitian_eigensystem(&h).unwrap().eigenvalues;
            let na = nalgebra::DMatrix::from_fn(n, n, |i, j| h[(i, j)]);
            let mut theirs: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for (a, b) in ours.iter().zip(&theirs) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn eigensystem_errors() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eigensystem(&rect),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        ));
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_eigensystem(&m),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn zero_matrix_is_already_diagonal() {
        let s = hermitian_eigensystem(&ComplexMatrix::zeros(4, 4)).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 4]);
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy_bits(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(entropy_bits(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
        // −¾log₂¾ − ¼log₂¼ = 2 − ¾log₂3
        let expected = 2.0 - 0.75 * 3f64.log2();
        assert!((entropy_bits(&[0.75, 0.25]).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_clamps_roundoff_and_rejects_real_negatives() {
        let h = entropy_bits(&[1.0 + 5e-11, -5e-11]).unwrap();
        assert!(h.abs() < 1e-9);
        assert!(matches!(
            entropy_bits(&[1.1, -0.1]),
            Err(LinalgError::NegativeProbability { index: 1, .. })
        ));
        assert!(matches!(
            entropy_bits(&[0.5, 0.4]),
            Err(LinalgError::NotNormalized { .. })
        ));
    }

    #[test]
    fn kron_identity_and_shape() {
        let i6 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(i6, ComplexMatrix::identity(6));
        let k = kron(&ComplexMatrix::zeros(3, 2), &ComplexMatrix::zeros(2, 2));
        assert_eq!((k.rows(), k.cols()), (6, 4));
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 2, 2);
            let b = random_matrix(&mut rng, 2, 2);
            let cm = random_matrix(&mut rng, 2, 2);
            let d = random_matrix(&mut rng, 2, 2);
            let lhs = kron(&a, &b).matmul(&kron(&cm, &d));
            let rhs = kron(&a.matmul(&cm), &b.matmul(&d));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn kron_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 2, 3);
            let b = random_matrix(&mut rng, 3, 2);
            let cm = random_matrix(&mut rng, 2, 2);
            let lhs = kron(&kron(&a, &b), &cm);
            let rhs = kron(&a, &kron(&b, &cm));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        let b = ComplexMatrix::from_real_diagonal(&[0.5, 0.3, 0.2]);
        let pt = kron(&a, &b).partial_trace_second(2, 3).unwrap();
        assert!(pt.max_abs_diff(&a) < 1e-15);
    }

    fn arb_probabilities() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 1..8).prop_filter_map("nonzero mass", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| w.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #[test]
        fn entropy_permutation_invariant(p in arb_probabilities(), seed in any::<u64>()) {
            let mut q = p.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..q.len()).rev() {
                let j = rng.random_range(0..=i);
                q.swap(i, j);
            }
            let a = entropy_bits(&p).unwrap();
            let b = entropy_bits(&q).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn density_entropy_is_bounded(seed in any::<u64>(), n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_matrix(&mut rng, n, n);
            let mut rho = g.matmul(&g.adjoint());
            let tr = rho.trace().re;
            rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
            let spec = hermitian_eigensystem(&rho).unwrap();
            let s = entropy_bits(&spec.eigenvalues).unwrap();
            prop_assert!(s >= 0.0);
            prop_assert!(s <= (n as f64).log2() + 1e-10);
        }

        #[test]
        fn eigenvalues_are_real(seed in any::<u64>(), n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, n);
            let s = hermitian_eigensystem(&h).unwrap();
            // Rayleigh quotients of the eigenvectors carry no imaginary part.
            for k in 0..n {
                let v = s.eigenvectors.column(k);
                let hv = h.mul_vec(&v);
                let rq: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
                prop_assert!(rq.im.abs() < 1e-12 * h.frobenius_norm().max(1.0));
            }
        }
    }
}
