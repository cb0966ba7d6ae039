//! Generic finite-dimensional channel engine.
//!
//! A channel is stored as the family of output-space operators `ŝ_mn`,
//! one per pair of input basis states, acting as
//! `ρ_out = Σ_mn ⟨m|ρ|n⟩ ŝ_mn`. The entropy exchange is evaluated on the
//! channel applied to one half of the purification `Σ √pᵢ |i⟩|i*⟩`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    entropy_bits, hermitian_eigensystem, ComplexMatrix, LinalgError, HERMITIAN_TOL,
};

/// Trace and Hermiticity tolerance for density matrices and channel operators.
pub const STATE_TOL: f64 = 1e-10;
/// Minimum allowed Choi eigenvalue.
pub const CHOI_TOL: f64 = 1e-8;
/// Input eigenvalues below this are dropped from the purification.
pub const PURIFY_CUTOFF: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("not a density matrix: {0}")]
    InvalidDensity(String),
    #[error("channel output is not a density matrix: {0}")]
    OutputNotDensity(String),
    #[error("malformed channel map: {0}")]
    MalformedChannel(String),
    #[error("invalid probability table: {0}")]
    InvalidTable(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, ChannelError> {
        if !matrix.is_square() {
            return Err(ChannelError::InvalidDensity(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > HERMITIAN_TOL {
            return Err(ChannelError::InvalidDensity(format!(
                "Hermiticity deviation {herm:e}"
            )));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(ChannelError::InvalidDensity(format!("trace {trace}")));
        }
        let spectrum = hermitian_eigensystem(&matrix)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(ChannelError::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// The maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(&vec![1.0 / dim as f64; dim]),
        }
    }

    /// Projector onto a (normalised internally) state vector.
    pub fn pure(state: &[Complex64]) -> Result<Self, ChannelError> {
        let norm = state.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(ChannelError::InvalidDensity("zero state vector".into()));
        }
        let v: Vec<Complex64> = state.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> Result<Vec<f64>, ChannelError> {
        Ok(hermitian_eigensystem(&self.matrix)?.eigenvalues)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64, ChannelError> {
        Ok(entropy_bits(&self.spectrum()?)?)
    }
}

/// Channel superoperator in transfer-operator form.
///
/// `op(m, n)` is the `dim_out × dim_out` operator `ŝ_mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMap {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<ComplexMatrix>,
}

impl ChannelMap {
    /// Wraps `dim_in²` operators given in row-major `(m, n)` order.
    ///
    /// Only shapes are checked here; the physical invariants are reported by
    /// [`validate_channel`].
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        ops: Vec<ComplexMatrix>,
    ) -> Result<Self, ChannelError> {
        if dim_in == 0 || dim_out == 0 {
            return Err(ChannelError::MalformedChannel("empty dimension".into()));
        }
        if ops.len() != dim_in * dim_in {
            return Err(ChannelError::MalformedChannel(format!(
                "{} operators for input dimension {dim_in}",
                ops.len()
            )));
        }
        if let Some(bad) = ops
            .iter()
            .find(|s| s.rows() != dim_out || s.cols() != dim_out)
        {
            return Err(ChannelError::MalformedChannel(format!(
                "operator is {}x{}, expected {dim_out}x{dim_out}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            ops,
        })
    }

    /// The noiseless channel, `ŝ_mn = |m⟩⟨n|`.
    pub fn identity(dim: usize) -> Self {
        let mut ops = Vec::with_capacity(dim * dim);
        for m in 0..dim {
            for n in 0..dim {
                let mut s = ComplexMatrix::zeros(dim, dim);
                s[(m, n)] = Complex64::new(1.0, 0.0);
                ops.push(s);
            }
        }
        Self {
            dim_in: dim,
            dim_out: dim,
            ops,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn op(&self, m: usize, n: usize) -> &ComplexMatrix {
        &self.ops[m * self.dim_in + n]
    }

    pub fn op_mut(&mut self, m: usize, n: usize) -> &mut ComplexMatrix {
        &mut self.ops[m * self.dim_in + n]
    }

    /// Block matrix with block `(m, n)` equal to `ŝ_mn`.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let d = self.dim_out;
        let mut choi = ComplexMatrix::zeros(self.dim_in * d, self.dim_in * d);
        for m in 0..self.dim_in {
            for n in 0..self.dim_in {
                let s = self.op(m, n);
                for a in 0..d {
                    for b in 0..d {
                        choi[(m * d + a, n * d + b)] = s[(a, b)];
                    }
                }
            }
        }
        choi
    }

    /// Conjugates every operator, `ŝ_mn → U ŝ_mn U†`.
    pub fn conjugate_output(&self, unitary: &ComplexMatrix) -> Self {
        let adj = unitary.adjoint();
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            ops: self
                .ops
                .iter()
                .map(|s| unitary.matmul(s).matmul(&adj))
                .collect(),
        }
    }

    /// `C(X) = Σ_mn X_mn ŝ_mn` for an arbitrary input operator `X`.
    fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for m in 0..self.dim_in {
            for n in 0..self.dim_in {
                let w = x[(m, n)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                out = &out + &self.op(m, n).scale(w);
            }
        }
        out
    }
}

/// Pure state `Ψ_P = Σ √pᵢ |i⟩⊗|i*⟩` on the doubled space.
///
/// Amplitude index is `system · dim + mirror`.
#[derive(Debug, Clone)]
pub struct PurifiedState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl PurifiedState {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// `|Ψ_P⟩⟨Ψ_P|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

pub fn purify(rho: &DensityMatrix) -> Result<PurifiedState, ChannelError> {
    let dim = rho.dim();
    let spectrum = hermitian_eigensystem(rho.matrix())?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (k, &p) in spectrum.eigenvalues.iter().enumerate() {
        if p < PURIFY_CUTOFF {
            continue;
        }
        let weight = p.sqrt();
        let v = spectrum.eigenvectors.column(k);
        for (s, vs) in v.iter().enumerate() {
            for (m, vm) in v.iter().enumerate() {
                amplitudes[s * dim + m] += weight * vs * vm.conj();
            }
        }
    }
    Ok(PurifiedState { dim, amplitudes })
}

fn check_input_dim(s: &ChannelMap, rho: &DensityMatrix) -> Result<(), ChannelError> {
    if rho.dim() != s.dim_in() {
        return Err(ChannelError::DimensionMismatch {
            expected: s.dim_in(),
            actual: rho.dim(),
        });
    }
    Ok(())
}

fn as_output_density(m: ComplexMatrix) -> Result<DensityMatrix, ChannelError> {
    DensityMatrix::new(m).map_err(|e| match e {
        ChannelError::InvalidDensity(msg) => ChannelError::OutputNotDensity(msg),
        other => other,
    })
}

/// `ρ_out = Σ_mn ρ_mn ŝ_mn`.
pub fn apply_channel(s: &ChannelMap, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
    check_input_dim(s, rho)?;
    as_output_density(s.apply_operator(rho.matrix()))
}

/// `ρ_α = (C⊗I) |Ψ_P⟩⟨Ψ_P|`, ordered as output ⊗ mirror.
pub fn joint_output(s: &ChannelMap, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
    check_input_dim(s, rho)?;
    let purified = purify(rho)?;
    let d_in = s.dim_in();
    let d_out = s.dim_out();
    let psi = purified.amplitudes();
    let mut joint = ComplexMatrix::zeros(d_out * d_in, d_out * d_in);
    for a in 0..d_in {
        for b in 0..d_in {
            // Mirror block (a, b): Σ_mn Ψ[m,a] Ψ*[n,b] ŝ_mn
            let mut block = ComplexMatrix::zeros(d_in, d_in);
            for m in 0..d_in {
                for n in 0..d_in {
                    block[(m, n)] = psi[m * d_in + a] * psi[n * d_in + b].conj();
                }
            }
            let out = s.apply_operator(&block);
            for alpha in 0..d_out {
                for beta in 0..d_out {
                    joint[(alpha * d_in + a, beta * d_in + b)] = out[(alpha, beta)];
                }
            }
        }
    }
    as_output_density(joint)
}

/// Entropy exchange `S_e = S(ρ_α)` in bits.
pub fn entropy_exchange(s: &ChannelMap, rho: &DensityMatrix) -> Result<f64, ChannelError> {
    joint_output(s, rho)?.entropy()
}

/// Every quantity entering the coherent information, from one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentInfo {
    pub coherent_information: f64,
    pub output_entropy: f64,
    pub entropy_exchange: f64,
    pub output_spectrum: Vec<f64>,
    pub joint_spectrum: Vec<f64>,
}

pub fn analyze(s: &ChannelMap, rho: &DensityMatrix) -> Result<CoherentInfo, ChannelError> {
    let out = apply_channel(s, rho)?;
    let joint = joint_output(s, rho)?;
    let output_spectrum = out.spectrum()?;
    let joint_spectrum = joint.spectrum()?;
    let output_entropy = entropy_bits(&output_spectrum)?;
    let entropy_exchange = entropy_bits(&joint_spectrum)?;
    Ok(CoherentInfo {
        coherent_information: output_entropy - entropy_exchange,
        output_entropy,
        entropy_exchange,
        output_spectrum,
        joint_spectrum,
    })
}

/// `I_c = S(ρ_out) − S_e` in bits. Signed; negative values are meaningful.
pub fn coherent_information(s: &ChannelMap, rho: &DensityMatrix) -> Result<f64, ChannelError> {
    Ok(analyze(s, rho)?.coherent_information)
}

/// Joint distribution `P(x, y)` of a classical channel.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProbabilityTable {
    rows: usize,
    cols: usize,
    p: Vec<f64>,
}

impl JointProbabilityTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err(ChannelError::InvalidTable(
                "table must be a non-empty rectangle".into(),
            ));
        }
        let p: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(ChannelError::InvalidTable(format!(
                "entry {bad} is not a probability"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > STATE_TOL {
            return Err(LinalgError::NotNormalized { sum }.into());
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            p,
        })
    }

    /// Table for input distribution `p_x` through transition matrix `P(y|x)`.
    pub fn from_conditional(p_x: &[f64], p_y_given_x: &[Vec<f64>]) -> Result<Self, ChannelError> {
        if p_x.len() != p_y_given_x.len() {
            return Err(ChannelError::InvalidTable(
                "input/transition length mismatch".into(),
            ));
        }
        Self::new(
            p_x.iter()
                .zip(p_y_given_x)
                .map(|(px, row)| row.iter().map(|q| px * q).collect())
                .collect(),
        )
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.cols + y]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|x| (0..self.cols).map(|y| self.get(x, y)).sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.get(x, y)).sum())
            .collect()
    }
}

/// `I = S(P_x) + S(P_y) − S(P_xy)` in bits.
pub fn shannon_mutual_information(table: &JointProbabilityTable) -> Result<f64, ChannelError> {
    let hx = entropy_bits(&table.marginal_x())?;
    let hy = entropy_bits(&table.marginal_y())?;
    let hxy = entropy_bits(&table.p)?;
    Ok(hx + hy - hxy)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelViolation {
    TraceDeviation(f64),
    HermiticityDeviation(f64),
    NegativeChoiEigenvalue(f64),
}

/// Diagnostics for the channel invariants: trace condition,
/// `ŝ_nm = ŝ_mn†` pairing, and Choi positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDiagnostics {
    pub max_trace_deviation: f64,
    pub max_hermiticity_deviation: f64,
    pub min_choi_eigenvalue: f64,
    pub violations: Vec<ChannelViolation>,
}

impl ChannelDiagnostics {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_channel(s: &ChannelMap) -> ChannelDiagnostics {
    let d = s.dim_in();
    let mut max_trace_deviation = 0.0_f64;
    let mut max_hermiticity_deviation = 0.0_f64;
    for m in 0..d {
        for n in 0..d {
            let target = if m == n { 1.0 } else { 0.0 };
            let dev = (s.op(m, n).trace() - Complex64::new(target, 0.0)).norm();
            max_trace_deviation = max_trace_deviation.max(dev);
            let pair = s.op(n, m).max_abs_diff(&s.op(m, n).adjoint());
            max_hermiticity_deviation = max_hermiticity_deviation.max(pair);
        }
    }

    // Eigenvalues of the Hermitian part; a pairing failure is reported separately.
    let choi = s.choi_matrix();
    let herm_part = (&choi + &choi.adjoint()).scale(Complex64::new(0.5, 0.0));
    let min_choi_eigenvalue = match hermitian_eigensystem(&herm_part) {
        Ok(spec) => spec.eigenvalues.last().copied().unwrap_or(0.0),
        Err(_) => f64::NEG_INFINITY,
    };

    let mut violations = Vec::new();
    if max_trace_deviation > STATE_TOL {
        violations.push(ChannelViolation::TraceDeviation(max_trace_deviation));
    }
    if max_hermiticity_deviation > STATE_TOL {
        violations.push(ChannelViolation::HermiticityDeviation(
            max_hermiticity_deviation,
        ));
    }
    if min_choi_eigenvalue < -CHOI_TOL {
        violations.push(ChannelViolation::NegativeChoiEigenvalue(
            min_choi_eigenvalue,
        ));
    }
    ChannelDiagnostics {
        max_trace_deviation,
        max_hermiticity_deviation,
        min_choi_eigenvalue,
        violations,
    }
}
