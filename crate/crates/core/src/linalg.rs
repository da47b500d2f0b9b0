//! Dense complex linear algebra for small square matrices.
//!
//! Everything in the crate that claims a closed form is checked against the
//! routines here: the Kronecker product, partial trace, partial transpose and
//! a cyclic Jacobi eigensolver for Hermitian matrices. Basis order is
//! lexicographic with the first tensor factor most significant, so for three
//! factors the amplitude of `|ijk>` sits at `(i * d_B + j) * d_C + k`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest number of matrix entries the solvers accept.
pub const MAX_ENTRIES: usize = 4096;

/// Default Jacobi stopping threshold on the off-diagonal Frobenius norm,
/// relative to the Frobenius norm of the input.
pub const DEFAULT_EIG_TOL: f64 = 1e-13;

/// Entrywise tolerance for treating an input as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Tolerance on `|<psi|psi> - 1|` before a state is rejected.
pub const NORM_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

static EIG_TOL: OnceLock<f64> = OnceLock::new();

/// Sets the Jacobi stopping threshold for the whole process.
///
/// Must be called before the first eigensolve; afterwards the value is frozen
/// and a conflicting call is rejected.
pub fn configure_eig_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParams(format!(
            "eigen tolerance must be positive, got {tol}"
        )));
    }
    let stored = *EIG_TOL.get_or_init(|| tol);
    if stored != tol {
        return Err(Error::InvalidParams(format!(
            "eigen tolerance already fixed at {stored:e}"
        )));
    }
    Ok(())
}

/// The Jacobi stopping threshold in effect.
pub fn eig_tol() -> f64 {
    *EIG_TOL.get_or_init(|| DEFAULT_EIG_TOL)
}

fn czero() -> C64 {
    C64::new(0.0, 0.0)
}

fn check_entries(entries: usize) -> Result<()> {
    if entries > MAX_ENTRIES {
        return Err(Error::TooLarge {
            entries,
            limit: MAX_ENTRIES,
        });
    }
    Ok(())
}

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows != cols {
            return Err(Error::DimensionMismatch(format!(
                "only square matrices are supported, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: vec![czero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(n, n, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "outer product of lengths {} and {}",
                u.len(),
                v.len()
            )));
        }
        let n = u.len();
        Ok(Self::from_fn(n, |i, j| u[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise `|M_ij - conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Largest entrywise `|A_ij - B_ij|`; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let n = self.rows;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == czero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.rows, rhs.rows, "matrix sum dimension mismatch");
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
        assert_eq!(self.rows, rhs.rows, "matrix difference dimension mismatch");
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

/// Kronecker product `a (x) b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    check_entries(n * n)?;
    Ok(ComplexMatrix::from_fn(n, |r, c| {
        let (i, k) = (r / nb, r % nb);
        let (j, l) = (c / nb, c % nb);
        a[(i, j)] * b[(k, l)]
    }))
}

/// `|psi><psi|` for a normalized pure state.
pub fn density_from_pure(psi: &PureState) -> Result<ComplexMatrix> {
    let norm_sq = psi.norm_sq();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    check_entries(psi.len() * psi.len())?;
    ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes())
}

/// Splits a flat index into per-factor digits (first factor most significant).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Maps every flat index of the full space to `(kept, traced)` flat indices.
fn split_indices(dims: &[usize], keep: &[usize]) -> Vec<(usize, usize)> {
    let total: usize = dims.iter().product();
    let mut buf = vec![0; dims.len()];
    (0..total)
        .map(|idx| {
            digits(idx, dims, &mut buf);
            let (mut kept, mut traced) = (0, 0);
            for (f, (&digit, &d)) in buf.iter().zip(dims).enumerate() {
                if keep.contains(&f) {
                    kept = kept * d + digit;
                } else {
                    traced = traced * d + digit;
                }
            }
            (kept, traced)
        })
        .collect()
}

fn validate_factors(dims: &[usize], keep: &[usize]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::DimensionMismatch(
            "factor dimensions must be positive".into(),
        ));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&f| f >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "kept factors {keep:?} must be strictly increasing indices below {}",
            dims.len()
        )));
    }
    Ok(())
}

/// Traces out every factor not listed in `keep`.
///
/// `dims` lists the factor dimensions in tensor order and `keep` the factor
/// indices to retain, in increasing order.
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    validate_factors(dims, keep)?;
    let total: usize = dims.iter().product();
    if rho.dim() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {} does not match factor dims {dims:?}",
            rho.dim()
        )));
    }
    let kept_dim: usize = keep.iter().map(|&f| dims[f]).product();
    let split = split_indices(dims, keep);
    let mut out = ComplexMatrix::zeros(kept_dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Transposes the first factor of a bipartite operator:
/// `<i,j| rho^{T_A} |k,l> = <k,j| rho |i,l>`.
pub fn partial_transpose(rho: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 || rho.dim() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {} does not match {da}x{db}",
            rho.dim()
        )));
    }
    Ok(ComplexMatrix::from_fn(da * db, |r, c| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (c / db, c % db);
        rho[(k * db + j, i * db + l)]
    }))
}

/// Real eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given values ascending.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    /// `sum |lambda|` over eigenvalues strictly below `-threshold`.
    pub fn negative_mass(&self, threshold: f64) -> f64 {
        self.values
            .iter()
            .take_while(|&&x| x < -threshold)
            .map(|x| -x)
            .sum()
    }

    /// Sum of the `k` smallest eigenvalues.
    pub fn smallest_sum(&self, k: usize) -> f64 {
        self.values.iter().take(k).sum()
    }
}

/// Eigen-decomposition `M = V diag(values) V^dagger`, eigenvectors in columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Spectrum,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.vectors;
        let lam = self.values.values();
        ComplexMatrix::from_fn(v.dim(), |i, j| {
            (0..lam.len())
                .map(|k| v[(i, k)] * lam[k] * v[(j, k)].conj())
                .sum()
        })
    }
}

/// Eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    jacobi(m, false).map(|(values, _)| Spectrum::from_unsorted(values))
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<Eigen> {
    let (values, vectors) = jacobi(m, true)?;
    let vectors = vectors.expect("vectors requested");
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted = ComplexMatrix::from_fn(n, |i, k| vectors[(i, order[k])]);
    Ok(Eigen {
        values: Spectrum {
            values: order.iter().map(|&k| values[k]).collect(),
        },
        vectors: sorted,
    })
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of the
/// pivot `a_pq` with `diag(1, e^{-i phi})`, then applies the real symmetric
/// rotation that zeroes it.
fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = m.dim();
    check_entries(n * n)?;
    let deviation = m.hermitian_deviation();
    if deviation.is_nan() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = ComplexMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let scale = a.frobenius_norm();
    let tol = eig_tol();

    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += a[(p, q)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    if scale > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_norm(&a) <= tol * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, v.as_mut(), p, q);
                }
            }
        }
        if !converged {
            let off = off_norm(&a);
            if off > tol * scale {
                return Err(Error::NoConvergence {
                    sweeps: MAX_SWEEPS,
                    off_norm: off,
                });
            }
        }
    }
    let values = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((values, v))
}

fn rotate(a: &mut ComplexMatrix, v: Option<&mut ComplexMatrix>, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let phase_c = phase.conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on the (p, q) plane.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_c * s;
        a[(k, q)] = akp * s + akq * phase_c * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = czero();
    a[(q, p)] = czero();
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * c - vkq * phase_c * s;
            v[(k, q)] = vkp * s + vkq * phase_c * c;
        }
    }
}

/// Determinant by LU factorisation with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<C64> {
    let n = m.dim();
    check_entries(n * n)?;
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .expect("non-empty range");
        let pv = a[(pivot, col)];
        if pv.norm() == 0.0 {
            return Ok(czero());
        }
        if pivot != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = tmp;
            }
            det = -det;
        }
        det *= pv;
        for r in (col + 1)..n {
            let f = a[(r, col)] / pv;
            if f == czero() {
                continue;
            }
            for k in col..n {
                let sub = f * a[(col, k)];
                a[(r, k)] -= sub;
            }
        }
    }
    Ok(det)
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// eigenvalues in `(-1e-12, 0)` are clamped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    if eig.values.min() < -1e-10 {
        return Err(Error::NotDensityMatrix(format!(
            "matrix square root of an indefinite matrix (min eigenvalue {:e})",
            eig.values.min()
        )));
    }
    let roots: Vec<f64> = eig
        .values
        .values()
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .collect();
    let v = &eig.vectors;
    Ok(ComplexMatrix::from_fn(v.dim(), |i, j| {
        (0..roots.len())
            .map(|k| v[(i, k)] * roots[k] * v[(j, k)].conj())
            .sum()
    }))
}

/// Normalized pure state on three tensor factors.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: [usize; 3],
    amps: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized (within [`NORM_TOL`]).
    pub fn new(dims: [usize; 3], amps: Vec<C64>) -> Result<Self> {
        Self::check_shape(dims, &amps)?;
        let state = Self { dims, amps };
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn from_unnormalized(dims: [usize; 3], mut amps: Vec<C64>) -> Result<Self> {
        Self::check_shape(dims, &amps)?;
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalizable(format!("amplitude norm is {norm}")));
        }
        for z in &mut amps {
            *z /= norm;
        }
        Ok(Self { dims, amps })
    }

    /// A computational basis state.
    pub fn basis(dims: [usize; 3], index: [usize; 3]) -> Result<Self> {
        let len = dims.iter().product();
        let mut amps = vec![czero(); len];
        if index.iter().zip(&dims).any(|(i, d)| i >= d) {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index:?} outside {dims:?}"
            )));
        }
        amps[(index[0] * dims[1] + index[1]) * dims[2] + index[2]] = C64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    fn check_shape(dims: [usize; 3], amps: &[C64]) -> Result<()> {
        if dims.contains(&0) {
            return Err(Error::DimensionMismatch(
                "factor dimensions must be positive".into(),
            ));
        }
        let len: usize = dims.iter().product();
        if amps.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need {len} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(())
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn amplitude(&self, i: usize, j: usize, k: usize) -> C64 {
        self.amps[self.index(i, j, k)]
    }

    /// Reduced density matrix on the listed factors, computed directly from
    /// the amplitudes as `M M^dagger` with `M` the kept-by-traced reshaping.
    pub fn reduced(&self, keep: &[usize]) -> Result<ComplexMatrix> {
        validate_factors(&self.dims, keep)?;
        let kept_dim: usize = keep.iter().map(|&f| self.dims[f]).product();
        check_entries(kept_dim * kept_dim)?;
        let traced_dim = self.amps.len() / kept_dim;
        let mut reshaped = vec![czero(); kept_dim * traced_dim];
        for (idx, &(k, t)) in split_indices(&self.dims, keep).iter().enumerate() {
            reshaped[k * traced_dim + t] = self.amps[idx];
        }
        Ok(ComplexMatrix::from_fn(kept_dim, |i, j| {
            let ri = &reshaped[i * traced_dim..(i + 1) * traced_dim];
            let rj = &reshaped[j * traced_dim..(j + 1) * traced_dim];
            ri.iter().zip(rj).map(|(x, y)| x * y.conj()).sum()
        }))
    }

    /// `(U_A (x) U_B (x) U_C) |psi>`.
    pub fn apply_local(&self, unitaries: [&ComplexMatrix; 3]) -> Result<Self> {
        for (f, u) in unitaries.iter().enumerate() {
            if u.dim() != self.dims[f] {
                return Err(Error::DimensionMismatch(format!(
                    "factor {f} has dimension {}, operator is {}x{}",
                    self.dims[f],
                    u.dim(),
                    u.dim()
                )));
            }
        }
        let [da, db, dc] = self.dims;
        let mut cur = self.amps.clone();
        let mut next = vec![czero(); cur.len()];
        for (f, u) in unitaries.iter().enumerate() {
            for i in 0..da {
                for j in 0..db {
                    for k in 0..dc {
                        let out = (i * db + j) * dc + k;
                        let mut acc = czero();
                        match f {
                            0 => {
                                (0..da).for_each(|m| acc += u[(i, m)] * cur[(m * db + j) * dc + k])
                            }
                            1 => {
                                (0..db).for_each(|m| acc += u[(j, m)] * cur[(i * db + m) * dc + k])
                            }
                            _ => {
                                (0..dc).for_each(|m| acc += u[(k, m)] * cur[(i * db + j) * dc + m])
                            }
                        }
                        next[out] = acc;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(Self {
            dims: self.dims,
            amps: cur,
        })
    }
}
