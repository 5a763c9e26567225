//! Dense complex operator algebra for 2-, 4- and 16-dimensional Hilbert spaces.
//!
//! Qubit `site = 0` is the leftmost tensor factor, so the two-qubit product
//! basis is ordered |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with σ_z|↑⟩ = +|↑⟩.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative tolerance used for the Hermiticity check on inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Square complex matrix acting on a `dim`-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    m: DMatrix<C64>,
}

/// State vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    v: DVector<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub fn matrix(self) -> Operator {
        let (a, b, c, d) = match self {
            Axis::I => (ONE, ZERO, ZERO, ONE),
            Axis::X => (ZERO, ONE, ONE, ZERO),
            Axis::Y => (ZERO, -I, I, ZERO),
            Axis::Z => (ONE, ZERO, ZERO, -ONE),
        };
        Operator {
            m: DMatrix::from_row_slice(2, 2, &[a, b, c, d]),
        }
    }
}

impl Operator {
    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(invalid(format!(
                "operator must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { m })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            m: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Row-major construction; panics if `entries.len() != dim * dim`.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        Self {
            m: DMatrix::from_row_slice(dim, dim, entries),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// |a⟩⟨b|
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        Self {
            m: &a.v * b.v.adjoint(),
        }
    }

    /// Projector onto the span of orthonormal kets.
    pub fn projector(kets: &[&Ket]) -> Self {
        let dim = kets.first().map_or(0, |k| k.dim());
        kets.iter()
            .fold(Self::zeros(dim), |acc, k| acc + Self::outer(k, k))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: &self.m * C64::new(s, 0.0),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self { m: &self.m * s }
    }

    /// `self += s * other`, used in Hamiltonian assembly.
    pub fn add_scaled(&mut self, s: f64, other: &Operator) {
        debug_assert_eq!(self.dim(), other.dim());
        self.m.zip_apply(&other.m, |a, b| *a += b * s);
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        self * other - other * self
    }

    pub fn anticommutator(&self, other: &Operator) -> Self {
        self * other + other * self
    }

    /// U · self · U†
    pub fn conjugate_by(&self, u: &Operator) -> Self {
        Self {
            m: &u.m * &self.m * u.m.adjoint(),
        }
    }

    pub fn apply(&self, k: &Ket) -> Ket {
        Ket { v: &self.m * &k.v }
    }

    /// ⟨k|self|k⟩
    pub fn expectation(&self, k: &Ket) -> C64 {
        k.v.dotc(&(&self.m * &k.v))
    }

    /// ⟨a|self|b⟩
    pub fn element(&self, a: &Ket, b: &Ket) -> C64 {
        a.v.dotc(&(&self.m * &b.v))
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max|M − M†| ≤ tol·max|M|
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.max_abs();
        let n = self.dim();
        for i in 0..n {
            for j in i..n {
                if (self.m[(i, j)] - self.m[(j, i)].conj()).norm() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// ‖U†U − I‖_max
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Operator::identity(self.dim()))
    }

    /// Largest |eigenvalue| of a Hermitian operator.
    pub fn spectral_radius(&self) -> Result<f64> {
        let e = eig_hermitian(self)?;
        Ok(e.values.iter().map(|x| x.abs()).fold(0.0, f64::max))
    }

    /// Hilbert–Schmidt inner product Tr(self† · other).
    pub fn hs_inner(&self, other: &Operator) -> C64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Add for Operator {
    type Output = Operator;
    fn add(self, rhs: Operator) -> Operator {
        Operator { m: self.m + rhs.m }
    }
}

impl Add<&Operator> for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m + &rhs.m }
    }
}

impl Sub for Operator {
    type Output = Operator;
    fn sub(self, rhs: Operator) -> Operator {
        Operator { m: self.m - rhs.m }
    }
}

impl Sub<&Operator> for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m - &rhs.m }
    }
}

impl Mul for Operator {
    type Output = Operator;
    fn mul(self, rhs: Operator) -> Operator {
        Operator { m: self.m * rhs.m }
    }
}

impl Mul<&Operator> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator { m: &self.m * &rhs.m }
    }
}

impl Ket {
    pub fn from_vec(amplitudes: Vec<C64>) -> Self {
        Self {
            v: DVector::from_vec(amplitudes),
        }
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        Self::from_vec(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Self { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.v
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.v[i]
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    pub fn normalized(&self) -> Self {
        Self {
            v: &self.v / C64::new(self.v.norm(), 0.0),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self { v: &self.v * s }
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket) -> C64 {
        self.v.dotc(&other.v)
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket {
            v: self.v.kronecker(&other.v),
        }
    }

    /// |ψ⟩⟨ψ|
    pub fn density(&self) -> Operator {
        Operator::outer(self, self)
    }

    pub fn add_scaled(&self, s: C64, other: &Ket) -> Ket {
        Ket {
            v: &self.v + &other.v * s,
        }
    }
}

/// Pauli operator `axis` acting on `site` of an `n_qubits` register.
pub fn pauli(axis: Axis, site: usize, n_qubits: usize) -> Result<Operator> {
    if !matches!(n_qubits, 1 | 2 | 4) {
        return Err(invalid(format!("n_qubits must be 1, 2 or 4, got {n_qubits}")));
    }
    if site >= n_qubits {
        return Err(invalid(format!(
            "site {site} out of range for {n_qubits} qubits"
        )));
    }
    let local = axis.matrix();
    let id = Operator::identity(2);
    let mut out = if site == 0 { local.clone() } else { id.clone() };
    for s in 1..n_qubits {
        out = tensor(&out, if s == site { &local } else { &id });
    }
    Ok(out)
}

/// Kronecker product; `a` is the more significant factor.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator {
        m: a.m.kronecker(&b.m),
    }
}

/// Spectrum of a Hermitian operator, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

impl Eigen {
    /// Σ_k f(λ_k) |v_k⟩⟨v_k|
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> Operator {
        let n = self.values.len();
        let mut v = DMatrix::<C64>::zeros(n, n);
        let mut w = DMatrix::<C64>::zeros(n, n);
        for (k, (val, vec)) in self.values.iter().zip(&self.vectors).enumerate() {
            let fk = f(*val);
            v.set_column(k, &vec.v);
            w.set_column(k, &(&vec.v * fk));
        }
        Operator { m: w * v.adjoint() }
    }
}

/// Hermitian eigendecomposition.
///
/// Each eigenvector is rotated so that its largest-magnitude component is
/// real and positive (first such index on ties). Vectors inside a degenerate
/// cluster are an arbitrary orthonormal basis of that cluster.
pub fn eig_hermitian(h: &Operator) -> Result<Eigen> {
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(invalid("eig_hermitian requires a Hermitian operator"));
    }
    let n = h.dim();
    let se = SymmetricEigen::new(h.m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for k in order {
        values.push(se.eigenvalues[k]);
        let col: DVector<C64> = se.eigenvectors.column(k).into_owned();
        vectors.push(fix_phase(Ket { v: col }));
    }
    Ok(Eigen { values, vectors })
}

fn fix_phase(k: Ket) -> Ket {
    let max = k.v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return k;
    }
    let lead = k
        .v
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-9))
        .copied()
        .unwrap_or(ONE);
    let phase = lead.conj() / lead.norm();
    k.scale_c(phase)
}

/// exp(−i·h·t) for Hermitian `h` (rad/s) and time `t` (s).
pub fn expm_i(h: &Operator, t: f64) -> Result<Operator> {
    let e = eig_hermitian(h)?;
    Ok(e.reconstruct_with(|lam| C64::from_polar(1.0, -lam * t)))
}
