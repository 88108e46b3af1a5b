//! Rectangular matrices with the singular-value map.
//!
//! Factorization convention: `X = Uᵀ Diag(σ) V` with `U` of size `m×m` and
//! `V` of size `n×n`; row `i` of `U` (resp. `V`) is the `i`-th left (resp.
//! right) singular vector and `Diag(σ)` is the `m×n` rectangular diagonal.

use crate::dense::{dot, norm2, Mat};
use crate::error::{Error, Result};

use super::sym::jacobi_eigen;

/// Singular values below this fraction of `σ₁` get a completed basis vector
/// instead of a normalized image.
const SMALL_SINGULAR_VALUE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix(Mat);

impl RectMatrix {
    pub fn new(m: Mat) -> Self {
        RectMatrix(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        RectMatrix(Mat::from_rows(rows))
    }

    pub fn m(&self) -> usize {
        self.0.rows()
    }

    pub fn n(&self) -> usize {
        self.0.cols()
    }

    pub fn rank_bound(&self) -> usize {
        self.m().min(self.n())
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn inner(&self, other: &RectMatrix) -> f64 {
        dot(self.0.as_slice(), other.0.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    /// `min(m, n)` nonnegative values, nonincreasing.
    pub values: Vec<f64>,
    pub u: Mat,
    pub v: Mat,
}

impl Svd {
    pub fn reconstruct(&self) -> RectMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut out = vec![0.0; m * n];
        synthesize_into(&self.u, &self.v, &self.values, &mut out);
        RectMatrix(Mat::from_row_major(m, n, out))
    }
}

pub fn svd(x: &RectMatrix) -> Result<Svd> {
    svd_slice(x.m(), x.n(), x.0.as_slice())
}

pub(crate) fn svd_slice(m: usize, n: usize, data: &[f64]) -> Result<Svd> {
    let x = Mat::from_row_major(m, n, data.to_vec());
    let (values, u, v) = if m >= n {
        let (s, left, right) = gram_svd(&x)?;
        (s, left, right)
    } else {
        let (s, left, right) = gram_svd(&x.transpose())?;
        (s, right, left)
    };
    let mut out = Svd { values, u, v };
    normalize_signs(&mut out);
    Ok(out)
}

/// SVD of a tall (`rows ≥ cols`) matrix through the eigendecomposition of its
/// Gram matrix. Returns `(σ, U, V)` in the module convention.
fn gram_svd(x: &Mat) -> Result<(Vec<f64>, Mat, Mat)> {
    let (m, n) = (x.rows(), x.cols());
    let gram = x.transpose().matmul(x);
    let eig = jacobi_eigen(n, gram.as_slice())?;

    // σᵢ = ‖X vᵢ‖ is more accurate than √λᵢ for small singular values.
    let mut triples: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..n)
        .map(|i| {
            let vi = eig.vectors.row(i).to_vec();
            let img = x.matvec(&vi);
            (norm2(&img), img, vi)
        })
        .collect();
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));

    let sigma_max = triples.first().map_or(0.0, |t| t.0);
    let mut values = Vec::with_capacity(n);
    let mut v = Mat::zeros(n, n);
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, (s, img, vi)) in triples.into_iter().enumerate() {
        v.row_mut(i).copy_from_slice(&vi);
        values.push(s);
        if sigma_max > 0.0 && s > SMALL_SINGULAR_VALUE * sigma_max {
            let mut ui: Vec<f64> = img.iter().map(|c| c / s).collect();
            if orthonormalize_against(&mut ui, &left) {
                left.push(ui);
                continue;
            }
        }
        left.push(complete_basis_vector(&left, m));
    }
    while left.len() < m {
        let next = complete_basis_vector(&left, m);
        left.push(next);
    }
    let u = Mat::from_rows(&left);
    Ok((values, u, v))
}

/// Two passes of modified Gram–Schmidt against `basis`, then normalization.
/// Returns false if the vector collapsed.
fn orthonormalize_against(w: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let before = norm2(w);
    for _ in 0..2 {
        for b in basis {
            let c = dot(w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    let after = norm2(w);
    if after <= 1e-8 * before || after == 0.0 {
        return false;
    }
    w.iter_mut().for_each(|wi| *wi /= after);
    true
}

/// First canonical direction not in the span of `basis`, orthonormalized.
fn complete_basis_vector(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        if orthonormalize_against(&mut e, basis) {
            return e;
        }
    }
    unreachable!("basis of size {} cannot span ℝ^{dim}", basis.len())
}

/// Flips each singular pair so the first nonzero entry of the `V` row is positive.
fn normalize_signs(s: &mut Svd) {
    for i in 0..s.values.len() {
        let flip = s
            .v
            .row(i)
            .iter()
            .find(|x| x.abs() > 1e-14)
            .is_some_and(|&x| x < 0.0);
        if flip {
            s.v.row_mut(i).iter_mut().for_each(|x| *x = -*x);
            s.u.row_mut(i).iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Writes `Uᵀ Diag(mu) V` into a row-major `m×n` buffer.
pub(crate) fn synthesize_into(u: &Mat, v: &Mat, mu: &[f64], out: &mut [f64]) {
    let (m, n) = (u.rows(), v.rows());
    debug_assert_eq!(out.len(), m * n);
    out.iter_mut().for_each(|o| *o = 0.0);
    for (k, &s) in mu.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let (uk, vk) = (u.row(k), v.row(k));
        for a in 0..m {
            let coef = s * uk[a];
            for (o, &vb) in out[a * n..(a + 1) * n].iter_mut().zip(vk) {
                *o += coef * vb;
            }
        }
    }
}

/// `Uᵀ Diag(μ) V` for an SVD `C = Uᵀ Diag(σ(C)) V`.
pub fn rect_u_element(c: &RectMatrix, mu: &[f64]) -> Result<RectMatrix> {
    let r = c.rank_bound();
    if mu.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: mu.len(),
        });
    }
    let mut mu = mu.to_vec();
    super::repair_nonincreasing(&mut mu)?;
    super::repair_nonnegative(&mut mu)?;
    let s = svd(c)?;
    let mut out = vec![0.0; c.m() * c.n()];
    synthesize_into(&s.u, &s.v, &mu, &mut out);
    Ok(RectMatrix(Mat::from_row_major(c.m(), c.n(), out)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let s = svd(&RectMatrix::new(Mat::zeros(3, 2))).unwrap();
        assert_eq!(s.values, vec![0.0, 0.0]);
        assert!(s.u.orthogonality_defect() < 1e-14 && s.v.orthogonality_defect() < 1e-14);

        let x = RectMatrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(svd(&x).unwrap().values, vec![3.0, 1.0]);

        let x = RectMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(svd(&x).unwrap().values, vec![2.0, 0.0]);

        // wide input goes through the transpose path
        let w = RectMatrix::from_rows(&[vec![0.0, 0.0, 5.0], vec![1.0, 0.0, 0.0]]);
        let s = svd(&w).unwrap();
        assert_eq!(s.values, vec![5.0, 1.0]);
        assert_eq!((s.u.rows(), s.v.rows()), (2, 3));
        assert!(s.reconstruct().as_mat().sub(w.as_mat()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn u_element_examples() {
        let c = RectMatrix::from_rows(&[vec![4.0, 0.0], vec![0.0, 2.0]]);
        let z = rect_u_element(&c, &[1.0, 0.0]).unwrap();
        let want = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(z.as_mat().sub(&want).frobenius_norm() < 1e-14);

        let z = rect_u_element(&c, &[4.0, 2.0]).unwrap();
        assert!(z.as_mat().sub(c.as_mat()).frobenius_norm() < 1e-14);

        assert!(matches!(rect_u_element(&c, &[1.0, -1.0]), Err(Error::InvalidSpectrum(_))));
        assert!(matches!(rect_u_element(&c, &[1.0, 2.0]), Err(Error::InvalidSpectrum(_))));
    }

    fn rect_strategy() -> impl Strategy<Value = RectMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(m, n)| {
            prop::collection::vec(-5.0f64..5.0, m * n)
                .prop_map(move |d| RectMatrix::new(Mat::from_row_major(m, n, d)))
        })
    }

    proptest! {
        #[test]
        fn factorization_contract(x in rect_strategy()) {
            let s = svd(&x).unwrap();
            let scale = x.as_mat().frobenius_norm();
            prop_assert!(s.reconstruct().as_mat().sub(x.as_mat()).frobenius_norm() <= 1e-9 * scale + 1e-300);
            prop_assert!(s.u.orthogonality_defect() <= 1e-10);
            prop_assert!(s.v.orthogonality_defect() <= 1e-10);
            prop_assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(s.values.iter().all(|&v| v >= 0.0));
            prop_assert!((norm2(&s.values) - scale).abs() <= 1e-9 * (1.0 + scale));
        }

        #[test]
        fn pairing_identity(x in rect_strategy(), scale in 0.1f64..3.0) {
            let s = svd(&x).unwrap();
            let mu: Vec<f64> = s.values.iter().enumerate().map(|(i, _)| scale * (s.values.len() - i) as f64).collect();
            let z = rect_u_element(&x, &mu).unwrap();
            let sz = svd(&z).unwrap();
            for (a, b) in sz.values.iter().zip(&mu) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b));
            }
            let bound = dot(&s.values, &mu);
            prop_assert!((x.inner(&z) - bound).abs() <= 1e-9 * (1.0 + bound.abs()));
        }
    }
}
