//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use eigprog::dense::Mat;
use eigprog::{Algebra, BlockKind, Element};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Householder reduction of a symmetric matrix to tridiagonal `(diag, offdiag)`.
pub fn tridiagonalize(a: &Mat) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for k in 0..n.saturating_sub(2) {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let sign = if a[k + 1][k] >= 0.0 { 1.0 } else { -1.0 };
        let alpha = -sign * alpha_sq.sqrt();
        let mut v = vec![0.0; n];
        v[k + 1] = a[k + 1][k] - alpha;
        for i in k + 2..n {
            v[i] = a[i][k];
        }
        let vn: f64 = v.iter().map(|x| x * x).sum();
        if vn == 0.0 {
            continue;
        }
        // A ← H A H with H = I − 2vvᵀ/‖v‖²
        let p: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum::<f64>() * 2.0 / vn).collect();
        let kk: f64 = (0..n).map(|i| v[i] * p[i]).sum::<f64>() / vn;
        let q: Vec<f64> = (0..n).map(|i| p[i] - kk * v[i]).collect();
        for i in 0..n {
            for j in 0..n {
                a[i][j] -= v[i] * q[j] + q[i] * v[j];
            }
        }
    }
    let d = (0..n).map(|i| a[i][i]).collect();
    let e = (0..n.saturating_sub(1)).map(|i| a[i + 1][i]).collect();
    (d, e)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs() + 1e-300);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues of a symmetric matrix, descending, by Sturm bisection.
pub fn oracle_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.rows();
    let (d, e) = tridiagonalize(a);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let pad = 1e-12 * (lo.abs().max(hi.abs()) + 1.0);
    lo -= pad;
    hi += pad;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        // k-th smallest: smallest x with count(x) > k
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(&d, &e, mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out.reverse();
    out
}

/// Singular values via the smaller Gram matrix.
pub fn oracle_singular_values(x: &Mat) -> Vec<f64> {
    let g = if x.rows() >= x.cols() {
        x.transpose().matmul(x)
    } else {
        x.matmul(&x.transpose())
    };
    oracle_eigenvalues(&g).into_iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Haar-distributed orthogonal matrix from Householder QR of a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Mat {
    let mut q = Mat::identity(n);
    for k in 0..n {
        let mut v: Vec<f64> = (0..n).map(|i| if i < k { 0.0 } else { gaussian(rng) }).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        v[k] += v[k].signum() * norm;
        let vn: f64 = v.iter().map(|x| x * x).sum();
        // Q ← Q H
        for r in 0..n {
            let s: f64 = (0..n).map(|c| q[(r, c)] * v[c]).sum::<f64>() * 2.0 / vn;
            for c in 0..n {
                q[(r, c)] -= s * v[c];
            }
        }
    }
    q
}

/// `Qᵀ diag(values) Q` padded to `rows × cols` for rectangular shapes.
pub fn conjugate(q_left: &Mat, values: &[f64], q_right: &Mat) -> Mat {
    let mut d = Mat::zeros(q_left.rows(), q_right.rows());
    for (i, &v) in values.iter().enumerate() {
        d[(i, i)] = v;
    }
    q_left.transpose().matmul(&d).matmul(q_right)
}

/// Gaussian element, with occasional structured degeneracies (repeated
/// eigenvalues, zero blocks, boundary SOC points).
pub fn random_element<R: Rng>(alg: &Arc<Algebra>, rng: &mut R) -> Element {
    let mut data = vec![0.0; alg.buffer_len()];
    for (i, block) in alg.blocks().iter().enumerate() {
        let out = &mut data[alg.block_range(i)];
        let style = rng.random_range(0..8);
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        match *block {
            _ if style == 0 => {}
            BlockKind::Soc { n } if style == 1 => {
                // boundary point ‖x‖ = t
                let x: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
                let t = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                out[..n].copy_from_slice(&x);
                out[n] = t;
                out.iter_mut().for_each(|v| *v *= scale);
            }
            BlockKind::Sym { n } if style == 1 => {
                // repeated eigenvalues
                let q = random_orthogonal(n, rng);
                let vals: Vec<f64> = (0..n).map(|k| scale * (k / 2) as f64).collect();
                out.copy_from_slice(conjugate(&q, &vals, &q).as_slice());
            }
            BlockKind::Rect { m, n } if style == 1 => {
                // rank one
                let u: Vec<f64> = (0..m).map(|_| gaussian(rng)).collect();
                let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
                for r in 0..m {
                    for c in 0..n {
                        out[r * n + c] = scale * u[r] * v[c];
                    }
                }
            }
            _ => out.iter_mut().for_each(|v| *v = scale * gaussian(rng)),
        }
    }
    alg.element(data).unwrap()
}

/// A random member of `λ(𝓔)`: sorted Gaussian values per block (blockwise)
/// or globally (ordered); singular-value blocks are nonnegative.
pub fn random_spectrum<R: Rng>(alg: &Algebra, rng: &mut R) -> Vec<f64> {
    let mut mu: Vec<f64> = (0..alg.rank()).map(|_| gaussian(rng)).collect();
    match alg.ordering() {
        eigprog::MapOrdering::GloballyOrdered => mu.sort_by(|a, b| b.total_cmp(a)),
        eigprog::MapOrdering::BlockWise => {
            for (i, b) in alg.blocks().iter().enumerate() {
                let seg = &mut mu[alg.spectral_range(i)];
                if matches!(b, BlockKind::Rect { .. }) {
                    seg.iter_mut().for_each(|v| *v = v.abs());
                }
                seg.sort_by(|a, b| b.total_cmp(a));
            }
        }
    }
    mu
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn elimination_rank(a: &Mat, rel_tol: f64) -> usize {
    let mut rows: Vec<Vec<f64>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let scale = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = rel_tol * scale.max(1e-300);
    let mut rank = 0;
    for col in 0..a.cols() {
        let Some(p) = (rank..rows.len()).max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs())) else {
            break;
        };
        if rows[p][col].abs() <= tol {
            continue;
        }
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col] / pivot[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
        }
        rank += 1;
    }
    rank
}
