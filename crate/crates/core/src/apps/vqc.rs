//! Vanishing quadratic constraints and intersections of ellipsoids.
//!
//! A system `‖Aᵢx + bᵢ‖ ≤ ⟨cᵢ, x⟩ + dᵢ` with at least `ℓ` tight inequalities
//! lifts to `y = Ax + b` in a product of second-order cones, where tightness
//! becomes a rank bound `rank(y) ≤ 2m − ℓ`.

use std::sync::Arc;

use crate::algebra::sym::{sym_eigen, SymMatrix};
use crate::dense::{dot, norm2, Mat};
use crate::error::{Error, Result};
use crate::ftvn::{eigen_map, rank, Algebra, BlockKind, Element, MapOrdering};
use crate::solver::{solve_feasibility, AffineSet, SolveReport, SolverConfig};
use crate::spectral_sets::SpectralConstraint;

/// Eigenvalue floor for matrix square roots.
const SQRT_FLOOR: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive definite.
const PD_THRESHOLD: f64 = 1e-10;

/// `‖Ax + b‖ ≤ ⟨c, x⟩ + d` with `A` of size `k × n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticConstraint {
    pub a: Mat,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: f64,
}

impl QuadraticConstraint {
    /// `⟨c, x⟩ + d − ‖Ax + b‖`; nonnegative iff satisfied, zero iff tight.
    pub fn slack(&self, x: &[f64]) -> f64 {
        dot(&self.c, x) + self.d - norm2(&self.affine_part(x))
    }

    fn affine_part(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.a.matvec(x);
        z.iter_mut().zip(&self.b).for_each(|(zi, bi)| *zi += bi);
        z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqcInstance {
    n: usize,
    constraints: Vec<QuadraticConstraint>,
    tight: usize,
}

impl VqcInstance {
    pub fn new(n: usize, constraints: Vec<QuadraticConstraint>, tight: usize) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::InvalidConfig("at least one constraint is required".into()));
        }
        if tight > constraints.len() {
            return Err(Error::InvalidConfig(format!(
                "ℓ = {tight} exceeds the number of constraints {}",
                constraints.len()
            )));
        }
        for q in &constraints {
            if q.a.cols() != n || q.c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if q.a.cols() != n { q.a.cols() } else { q.c.len() },
                });
            }
            if q.b.len() != q.a.rows() {
                return Err(Error::DimensionMismatch {
                    expected: q.a.rows(),
                    found: q.b.len(),
                });
            }
            if q.a.rows() == 0 {
                return Err(Error::InvalidConfig("constraint matrices need at least one row".into()));
            }
        }
        Ok(VqcInstance { n, constraints, tight })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn tight(&self) -> usize {
        self.tight
    }

    pub fn constraints(&self) -> &[QuadraticConstraint] {
        &self.constraints
    }

    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        self.constraints.iter().map(|q| q.slack(x)).collect()
    }

    /// Every slack `≥ −feas_tol` and at least `ℓ` with `|slack| ≤ tight_tol`.
    pub fn is_solution(&self, x: &[f64], feas_tol: f64, tight_tol: f64) -> bool {
        let s = self.slacks(x);
        s.iter().all(|&v| v >= -feas_tol) && s.iter().filter(|v| v.abs() <= tight_tol).count() >= self.tight
    }
}

/// `x ↦ Ax + b` into the lifted cone product.
#[derive(Debug, Clone)]
pub struct LinearLift {
    offset: Element,
    columns: Vec<Element>,
}

impl LinearLift {
    pub fn algebra(&self) -> &Arc<Algebra> {
        self.offset.algebra()
    }

    /// `b = (b₁, d₁, …, b_m, d_m)`.
    pub fn offset(&self) -> &Element {
        &self.offset
    }

    /// `A e_j` for each coordinate `j`.
    pub fn columns(&self) -> &[Element] {
        &self.columns
    }

    pub fn apply(&self, x: &[f64]) -> Result<Element> {
        if x.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                found: x.len(),
            });
        }
        let mut y = self.offset.clone();
        for (xj, col) in x.iter().zip(&self.columns) {
            y.axpy(*xj, col)?;
        }
        Ok(y)
    }

    /// `Ax + b` lies in the cone product with `rank ≤ 2m − ℓ`, using a
    /// relative threshold for both cone membership and rank.
    pub fn certifies(&self, x: &[f64], tight: usize, rel_threshold: f64) -> Result<bool> {
        let y = self.apply(x)?;
        let cut = rel_threshold * y.norm();
        let in_cone = eigen_map(&y)?.iter().all(|&v| v >= -cut);
        let bound = self.algebra().rank().saturating_sub(tight);
        Ok(in_cone && rank(&y, rel_threshold)? <= bound)
    }

    /// Every lifted block `(Aᵢx + bᵢ, ⟨cᵢ, x⟩ + dᵢ)` is nonzero.
    pub fn is_nondegenerate(&self, x: &[f64]) -> Result<bool> {
        let y = self.apply(x)?;
        Ok((0..self.algebra().blocks().len()).all(|i| y.block(i).iter().any(|&v| v != 0.0)))
    }
}

/// `𝓒̄ = Range(A) + b` and `𝓒 = {u ≥ 0 : u_{2m−ℓ+1} = ⋯ = u_{2m} = 0}` under
/// the globally ordered map.
pub fn build_vqc_feasibility(inst: &VqcInstance) -> Result<(AffineSet, SpectralConstraint, LinearLift)> {
    let blocks: Vec<BlockKind> = inst.constraints.iter().map(|q| BlockKind::Soc { n: q.a.rows() }).collect();
    let alg = Algebra::new(blocks, MapOrdering::GloballyOrdered)?;

    let mut offset = Vec::with_capacity(alg.buffer_len());
    for q in &inst.constraints {
        offset.extend_from_slice(&q.b);
        offset.push(q.d);
    }
    let columns = (0..inst.n)
        .map(|j| {
            let mut col = Vec::with_capacity(alg.buffer_len());
            for q in &inst.constraints {
                col.extend((0..q.a.rows()).map(|r| q.a[(r, j)]));
                col.push(q.c[j]);
            }
            alg.element(col)
        })
        .collect::<Result<Vec<_>>>()?;
    let lift = LinearLift {
        offset: alg.element(offset)?,
        columns,
    };
    let affine = AffineSet::new(lift.offset.clone(), lift.columns.clone())?;
    let constraint = SpectralConstraint::vanishing_tail(&alg, inst.tight)?;
    Ok((affine, constraint, lift))
}

/// `(x − pᵢ)ᵀQᵢ(x − pᵢ) ≤ 1` for `i = 1..m`, at least `ℓ` tight.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidInstance {
    pub q: Vec<SymMatrix>,
    pub centers: Vec<Vec<f64>>,
    pub tight: usize,
}

impl EllipsoidInstance {
    pub fn new(q: Vec<SymMatrix>, centers: Vec<Vec<f64>>, tight: usize) -> Result<Self> {
        if q.is_empty() || q.len() != centers.len() {
            return Err(Error::InvalidConfig(format!(
                "{} shape matrices and {} centers",
                q.len(),
                centers.len()
            )));
        }
        let n = q[0].n();
        for (qi, pi) in q.iter().zip(&centers) {
            if qi.n() != n || pi.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if qi.n() != n { qi.n() } else { pi.len() },
                });
            }
        }
        if tight > q.len() {
            return Err(Error::InvalidConfig(format!("ℓ = {tight} exceeds m = {}", q.len())));
        }
        Ok(EllipsoidInstance { q, centers, tight })
    }

    /// `m` balls of the given radius.
    pub fn balls(centers: Vec<Vec<f64>>, radius: f64, tight: usize) -> Result<Self> {
        let n = centers.first().map_or(0, Vec::len);
        let s = 1.0 / (radius * radius);
        let q = centers.iter().map(|_| SymMatrix::diag(&vec![s; n])).collect();
        EllipsoidInstance::new(q, centers, tight)
    }

    pub fn n(&self) -> usize {
        self.centers[0].len()
    }

    pub fn m(&self) -> usize {
        self.q.len()
    }

    /// `(x − pᵢ)ᵀQᵢ(x − pᵢ) − 1`; nonpositive iff inside, zero on the boundary.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.q
            .iter()
            .zip(&self.centers)
            .map(|(q, p)| {
                let z: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
                dot(&z, &q.as_mat().matvec(&z)) - 1.0
            })
            .collect()
    }

    /// All residuals `≤ feas_tol` and at least `ℓ` with `|residual| ≤ tight_tol`.
    pub fn is_solution(&self, x: &[f64], feas_tol: f64, tight_tol: f64) -> bool {
        let r = self.residuals(x);
        r.iter().all(|&v| v <= feas_tol) && r.iter().filter(|v| v.abs() <= tight_tol).count() >= self.tight
    }
}

/// Lifted ellipsoid feasibility problem with cached square roots.
#[derive(Debug, Clone)]
pub struct EllipsoidProblem {
    instance: EllipsoidInstance,
    sqrt: Vec<Mat>,
    inv_sqrt: Vec<Mat>,
    vqc: VqcInstance,
    affine: AffineSet,
    constraint: SpectralConstraint,
    lift: LinearLift,
}

/// Result of one ellipsoid solve with the recovered trajectory.
#[derive(Debug, Clone)]
pub struct EllipsoidRun {
    pub report: SolveReport,
    /// `x_k` recovered from every lifted iterate `y_k`, starting with `x₀`.
    pub trajectory: Vec<Vec<f64>>,
    pub final_x: Vec<f64>,
}

/// `Q^{1/2}` and `Q^{−1/2}` from one eigendecomposition.
fn sqrt_pair(q: &SymMatrix, index: usize) -> Result<(Mat, Mat)> {
    let eig = sym_eigen(q)?;
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min.is_nan() || min <= PD_THRESHOLD {
        return Err(Error::NotPositiveDefinite {
            index,
            min_eigenvalue: min,
        });
    }
    let n = q.n();
    let u = &eig.vectors;
    let mut s = Mat::zeros(n, n);
    let mut si = Mat::zeros(n, n);
    for (k, &lam) in eig.values.iter().enumerate() {
        let r = lam.max(SQRT_FLOOR).sqrt();
        for i in 0..n {
            for j in 0..n {
                let p = u[(k, i)] * u[(k, j)];
                s[(i, j)] += r * p;
                si[(i, j)] += p / r;
            }
        }
    }
    Ok((s, si))
}

/// Lift with `Aᵢ = Qᵢ^{1/2}`, `bᵢ = −Qᵢ^{1/2}pᵢ`, `cᵢ = 0`, `dᵢ = 1`.
pub fn build_ellipsoid_feasibility(inst: &EllipsoidInstance) -> Result<EllipsoidProblem> {
    let mut sqrt = Vec::with_capacity(inst.m());
    let mut inv_sqrt = Vec::with_capacity(inst.m());
    let mut constraints = Vec::with_capacity(inst.m());
    for (i, (q, p)) in inst.q.iter().zip(&inst.centers).enumerate() {
        let (s, si) = sqrt_pair(q, i)?;
        let b = s.matvec(p).into_iter().map(|v| -v).collect();
        constraints.push(QuadraticConstraint {
            a: s.clone(),
            b,
            c: vec![0.0; inst.n()],
            d: 1.0,
        });
        sqrt.push(s);
        inv_sqrt.push(si);
    }
    let vqc = VqcInstance::new(inst.n(), constraints, inst.tight)?;
    let (affine, constraint, lift) = build_vqc_feasibility(&vqc)?;
    Ok(EllipsoidProblem {
        instance: inst.clone(),
        sqrt,
        inv_sqrt,
        vqc,
        affine,
        constraint,
        lift,
    })
}

impl EllipsoidProblem {
    pub fn instance(&self) -> &EllipsoidInstance {
        &self.instance
    }

    pub fn sqrt(&self, i: usize) -> &Mat {
        &self.sqrt[i]
    }

    pub fn inv_sqrt(&self, i: usize) -> &Mat {
        &self.inv_sqrt[i]
    }

    pub fn vqc(&self) -> &VqcInstance {
        &self.vqc
    }

    pub fn affine(&self) -> &AffineSet {
        &self.affine
    }

    pub fn constraint(&self) -> &SpectralConstraint {
        &self.constraint
    }

    pub fn lift(&self) -> &LinearLift {
        &self.lift
    }

    /// Per-block preimages `Qᵢ^{−1/2}ȳᵢ + pᵢ`.
    pub fn block_preimages(&self, y: &Element) -> Result<Vec<Vec<f64>>> {
        if y.algebra() != self.lift.algebra() {
            return Err(Error::AlgebraMismatch);
        }
        let n = self.instance.n();
        Ok((0..self.instance.m())
            .map(|i| {
                let ybar = &y.block(i)[..n];
                let mut x = self.inv_sqrt[i].matvec(ybar);
                x.iter_mut().zip(&self.instance.centers[i]).for_each(|(a, b)| *a += b);
                x
            })
            .collect())
    }

    /// `x = (1/m) Σ (Qᵢ^{−1/2}ȳᵢ + pᵢ)`.
    pub fn recover_x(&self, y: &Element) -> Result<Vec<f64>> {
        let parts = self.block_preimages(y)?;
        let m = parts.len() as f64;
        let mut x = vec![0.0; self.instance.n()];
        for p in &parts {
            x.iter_mut().zip(p).for_each(|(a, b)| *a += b / m);
        }
        Ok(x)
    }

    /// Solves from the lift of `x0`, recording the recovered trajectory.
    pub fn solve_from(&self, x0: &[f64], cfg: &SolverConfig) -> Result<EllipsoidRun> {
        let y0 = self.lift.apply(x0)?;
        let cfg = cfg.clone().recording();
        let mut report = solve_feasibility(&self.affine, &self.constraint, &y0, &cfg)?;
        let mut trajectory = vec![x0.to_vec()];
        for y in &report.iterates[1..] {
            trajectory.push(self.recover_x(y)?);
        }
        report.iterates.clear();
        let final_x = self.recover_x(&report.final_point)?;
        Ok(EllipsoidRun {
            report,
            trajectory,
            final_x,
        })
    }
}
