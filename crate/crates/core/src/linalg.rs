//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Matrices are stored row-major. Bipartite indices follow the composite
//! convention `row = i * dB + k` (subsystem A outer, B inner) everywhere in
//! the crate. The Hermitian eigensolver is a cyclic complex Jacobi iteration:
//! the target dimensions (≤ ~64) make robustness and accuracy worth more
//! than asymptotics.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Inputs within this max-norm distance of Hermitian are symmetrized
/// silently; anything farther is rejected.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// Which subsystem of a bipartite operator to keep under a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "entry count {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix contains a non-finite entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, k: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * k).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "trace of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.data[i * self.cols + i]).sum())
    }

    /// Trace of a Hermitian matrix; rejects a significant imaginary part.
    pub fn trace_real(&self) -> Result<f64> {
        let t = self.trace()?;
        if t.im.abs() > 1e-10 * t.re.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "trace has imaginary part {:.3e} on a supposedly Hermitian input",
                t.im
            )));
        }
        Ok(t.re)
    }

    /// Kronecker product; entry ((i*rows_b + k), (j*cols_b + l)) = a[i,j] * b[k,l].
    pub fn tensor(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + (j * other.cols + l)] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// Partial trace of a (dA*dB)x(dA*dB) operator, keeping one subsystem.
    pub fn partial_trace(&self, d_a: usize, d_b: usize, keep: Subsystem) -> Result<ComplexMatrix> {
        let n = d_a * d_b;
        if self.rows != n || self.cols != n {
            return Err(Error::Dimension(format!(
                "partial trace expects {n}x{n} for dA={d_a}, dB={d_b}, got {}x{}",
                self.rows, self.cols
            )));
        }
        match keep {
            Subsystem::A => {
                let mut out = ComplexMatrix::zeros(d_a, d_a);
                for i in 0..d_a {
                    for j in 0..d_a {
                        let mut s = Complex64::new(0.0, 0.0);
                        for k in 0..d_b {
                            s += self.get(i * d_b + k, j * d_b + k);
                        }
                        out.set(i, j, s);
                    }
                }
                Ok(out)
            }
            Subsystem::B => {
                let mut out = ComplexMatrix::zeros(d_b, d_b);
                for k in 0..d_b {
                    for l in 0..d_b {
                        let mut s = Complex64::new(0.0, 0.0);
                        for i in 0..d_a {
                            s += self.get(i * d_b + k, i * d_b + l);
                        }
                        out.set(k, l, s);
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm distance from the adjoint; 0 for exactly Hermitian input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }
}

/// Full spectrum of a Hermitian matrix, eigenvalues ascending, eigenvectors
/// as orthonormal columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// Symmetrize `m` as (m + m†)/2, rejecting inputs farther than
/// [`HERMITICITY_TOL`] from Hermitian.
fn symmetrized(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "Hermitian operation on non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let err = m.hermiticity_error();
    if err > HERMITICITY_TOL {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian: max deviation {err:.3e} exceeds {HERMITICITY_TOL:.1e}"
        )));
    }
    let n = m.rows();
    let mut out = m.clone();
    for i in 0..n {
        out.data[i * n + i] = Complex64::new(m.get(i, i).re, 0.0);
        for j in (i + 1)..n {
            let v = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
            out.data[i * n + j] = v;
            out.data[j * n + i] = v.conj();
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. The input is symmetrized before iterating.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<EigenSystem> {
    let mut a = symmetrized(m)?;
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    // Frobenius norm is invariant under the rotations, so the stopping
    // threshold can be fixed up front.
    let threshold = 1e-15 * scale.max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off_max: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off_max = off_max.max(a.get(p, q).norm());
            }
        }
        if off_max <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a.get(p, q);
                let babs = b.norm();
                if babs <= threshold {
                    continue;
                }
                let w = b / babs;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let zeta = (aqq - app) / (2.0 * babs);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column update (right-multiplication by the rotation).
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * w.conj() * akq);
                    a.set(k, q, s * w * akp + c * akq);
                }
                // Row update (left-multiplication by its adjoint).
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * w * aqk);
                    a.set(q, k, s * w.conj() * apk + c * aqk);
                }
                // The rotation is built to annihilate this pair exactly.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
                a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * w.conj() * vkq);
                    v.set(k, q, s * w * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Determinant of a Hermitian matrix as the product of its eigenvalues.
/// Near-singular values are reported as-is, without regularization.
pub fn det_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigensystem(m)?;
    Ok(eig.eigenvalues.iter().product())
}

/// In-place LU determinant with partial pivoting, for small square buffers.
/// Used on hot paths where the eigensolver would dominate.
pub(crate) fn det_lu_in_place(a: &mut [Complex64], n: usize) -> Complex64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].norm_sqr();
        for r in (col + 1)..n {
            let mag = a[r * n + col].norm_sqr();
            if mag > best {
                best = mag;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / d;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in (col + 1)..n {
                let v = a[col * n + j];
                a[r * n + j] -= factor * v;
            }
            a[r * n + col] = Complex64::new(0.0, 0.0);
        }
    }
    det
}
