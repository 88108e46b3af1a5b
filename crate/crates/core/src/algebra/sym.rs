//! Real symmetric matrices with the trace inner product.
//!
//! Eigendecomposition is a cyclic Jacobi sweep. It is slower than a
//! tridiagonal QR at large sizes but accurate to roundoff, and the blocks used
//! here are small.

use crate::dense::Mat;
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm, relative to `‖X‖_F`, at which Jacobi stops.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 64;

/// A square matrix that is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Mat);

impl SymMatrix {
    /// Symmetrizes `(M + Mᵀ)/2`.
    pub fn new(m: Mat) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let mut data = m.into_vec();
        let n = (data.len() as f64).sqrt() as usize;
        symmetrize_in_place(n, &mut data);
        Ok(SymMatrix(Mat::from_row_major(n, n, data)))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Mat::from_rows(rows))
    }

    pub fn diag(values: &[f64]) -> Self {
        SymMatrix(Mat::diag(values))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Mat::identity(n))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn trace_inner(&self, other: &SymMatrix) -> f64 {
        crate::dense::dot(self.0.as_slice(), other.0.as_slice())
    }
}

pub(crate) fn symmetrize_in_place(n: usize, data: &mut [f64]) {
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
            data[i * n + j] = avg;
            data[j * n + i] = avg;
        }
    }
}

/// Eigenpairs with `X = Uᵀ Diag(values) U`; row `i` of `vectors` is the
/// eigenvector for `values[i]`, and `values` is nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl SymEigen {
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut out = vec![0.0; n * n];
        synthesize_into(&self.vectors, &self.values, &mut out);
        SymMatrix(Mat::from_row_major(n, n, out))
    }
}

pub fn sym_eigen(x: &SymMatrix) -> Result<SymEigen> {
    jacobi_eigen(x.n(), x.0.as_slice())
}

/// Cyclic Jacobi on a row-major symmetric `n×n` buffer.
pub(crate) fn jacobi_eigen(n: usize, data: &[f64]) -> Result<SymEigen> {
    debug_assert_eq!(data.len(), n * n);
    let mut a = data.to_vec();
    // columns of v accumulate the eigenvectors
    let mut v = Mat::identity(n);
    let scale = crate::dense::norm2(&a);

    let mut converged = false;
    for _sweep in 0..=JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(n, &a);
        if off <= JACOBI_TOLERANCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (c, s) = rotation(a[p * n + p], a[q * n + q], apq);
                rotate(n, &mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(Error::EigSolverNoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (row, &col) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(row, k)] = v[(k, col)];
        }
    }
    Ok(SymEigen { values, vectors })
}

fn off_diagonal_norm(n: usize, a: &[f64]) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += a[p * n + q] * a[p * n + q];
        }
    }
    (2.0 * s).sqrt()
}

/// Symmetric Schur rotation annihilating `a_pq`.
fn rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

fn rotate(n: usize, a: &mut [f64], v: &mut Mat, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Writes `Uᵀ Diag(mu) U` (rows of `u` are frame vectors) into `out`,
/// computing the upper triangle and mirroring it so symmetry is exact.
pub(crate) fn synthesize_into(u: &Mat, mu: &[f64], out: &mut [f64]) {
    let n = u.cols();
    debug_assert_eq!(out.len(), n * n);
    out.iter_mut().for_each(|o| *o = 0.0);
    for (k, &m) in mu.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let row = u.row(k);
        for i in 0..n {
            let mi = m * row[i];
            for j in i..n {
                out[i * n + j] += mi * row[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[i * n + j] = out[j * n + i];
        }
    }
}

/// `Uᵀ Diag(μ) U` for an eigendecomposition `C = Uᵀ Diag(λ(C)) U`.
pub fn sym_u_element(c: &SymMatrix, mu: &[f64]) -> Result<SymMatrix> {
    let n = c.n();
    if mu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mu.len(),
        });
    }
    let mut mu = mu.to_vec();
    super::repair_nonincreasing(&mut mu)?;
    let eig = sym_eigen(c)?;
    let mut out = vec![0.0; n * n];
    synthesize_into(&eig.vectors, &mu, &mut out);
    Ok(SymMatrix(Mat::from_row_major(n, n, out)))
}
