//! Product FTvN systems: block layout, the eigenvalue map under both
//! orderings, and frame-aligned synthesis of elements of `U(c, μ)`.

use std::sync::Arc;

use crate::algebra::{rect, repair_nonincreasing, repair_nonnegative, soc, sym};
use crate::dense::{dot, norm2, Mat};
use crate::error::{Error, Result};

/// One factor of a product system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Second-order cone algebra on `ℝⁿ × ℝ`; stored as `(x, t)`, `t` last.
    Soc { n: usize },
    /// Symmetric `n×n` matrices, stored as the full row-major matrix.
    Sym { n: usize },
    /// `m×n` matrices under singular values, stored row-major.
    Rect { m: usize, n: usize },
}

impl BlockKind {
    /// Length of the block in the flat element buffer.
    pub fn buffer_len(&self) -> usize {
        match *self {
            BlockKind::Soc { n } => n + 1,
            BlockKind::Sym { n } => n * n,
            BlockKind::Rect { m, n } => m * n,
        }
    }

    /// Dimension of the block as a real vector space.
    pub fn dim(&self) -> usize {
        match *self {
            BlockKind::Soc { n } => n + 1,
            BlockKind::Sym { n } => n * (n + 1) / 2,
            BlockKind::Rect { m, n } => m * n,
        }
    }

    /// Number of eigenvalues the block contributes.
    pub fn rank(&self) -> usize {
        match *self {
            BlockKind::Soc { .. } => 2,
            BlockKind::Sym { n } => n,
            BlockKind::Rect { m, n } => m.min(n),
        }
    }

    pub fn is_jordan(&self) -> bool {
        !matches!(self, BlockKind::Rect { .. })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            BlockKind::Soc { n } | BlockKind::Sym { n } => n >= 1,
            BlockKind::Rect { m, n } => m >= 1 && n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidAlgebra(format!("degenerate block {self:?}")))
        }
    }
}

/// How the eigenvalues of a product are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapOrdering {
    /// Per-block nonincreasing segments, concatenated in block order.
    BlockWise,
    /// All eigenvalues merged into one nonincreasing vector.
    GloballyOrdered,
}

/// Descriptor of a product FTvN system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    blocks: Vec<BlockKind>,
    ordering: MapOrdering,
    offsets: Vec<usize>,
    spectral_offsets: Vec<usize>,
}

impl Algebra {
    pub fn new(blocks: Vec<BlockKind>, ordering: MapOrdering) -> Result<Arc<Algebra>> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        for b in &blocks {
            b.validate()?;
        }
        if ordering == MapOrdering::GloballyOrdered && !blocks.iter().all(BlockKind::is_jordan) {
            return Err(Error::InvalidAlgebra(
                "a globally ordered map requires every block to be a Jordan algebra".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut spectral_offsets = Vec::with_capacity(blocks.len() + 1);
        let (mut off, mut soff) = (0, 0);
        for b in &blocks {
            offsets.push(off);
            spectral_offsets.push(soff);
            off += b.buffer_len();
            soff += b.rank();
        }
        offsets.push(off);
        spectral_offsets.push(soff);
        Ok(Arc::new(Algebra {
            blocks,
            ordering,
            offsets,
            spectral_offsets,
        }))
    }

    pub fn single(block: BlockKind) -> Result<Arc<Algebra>> {
        Algebra::new(vec![block], MapOrdering::BlockWise)
    }

    pub fn blocks(&self) -> &[BlockKind] {
        &self.blocks
    }

    pub fn ordering(&self) -> MapOrdering {
        self.ordering
    }

    /// Length of the flat element buffer.
    pub fn buffer_len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Dimension as a real vector space (symmetric blocks count `n(n+1)/2`).
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(BlockKind::dim).sum()
    }

    /// Total number of eigenvalues `r`.
    pub fn rank(&self) -> usize {
        *self.spectral_offsets.last().unwrap()
    }

    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn spectral_range(&self, i: usize) -> std::ops::Range<usize> {
        self.spectral_offsets[i]..self.spectral_offsets[i + 1]
    }

    pub fn zeros(self: &Arc<Self>) -> Element {
        Element {
            algebra: Arc::clone(self),
            data: vec![0.0; self.buffer_len()],
        }
    }

    pub fn element(self: &Arc<Self>, data: Vec<f64>) -> Result<Element> {
        Element::new(Arc::clone(self), data)
    }

    /// Checks that `mu` lies in `λ(𝓔)`, repairing rounding-level violations.
    pub fn validate_spectrum(&self, mu: &[f64]) -> Result<Vec<f64>> {
        if mu.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: mu.len(),
            });
        }
        let mut mu = mu.to_vec();
        match self.ordering {
            MapOrdering::GloballyOrdered => repair_nonincreasing(&mut mu)?,
            MapOrdering::BlockWise => {
                for (i, b) in self.blocks.iter().enumerate() {
                    let seg = &mut mu[self.spectral_range(i)];
                    repair_nonincreasing(seg)?;
                    if matches!(b, BlockKind::Rect { .. }) {
                        repair_nonnegative(seg)?;
                    }
                }
            }
        }
        Ok(mu)
    }
}

/// A point of a product system, stored as one flat buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    algebra: Arc<Algebra>,
    data: Vec<f64>,
}

impl Element {
    /// Wraps `data`, symmetrizing every symmetric-matrix block.
    pub fn new(algebra: Arc<Algebra>, mut data: Vec<f64>) -> Result<Element> {
        if data.len() != algebra.buffer_len() {
            return Err(Error::DimensionMismatch {
                expected: algebra.buffer_len(),
                found: data.len(),
            });
        }
        for (i, b) in algebra.blocks().iter().enumerate() {
            if let BlockKind::Sym { n } = *b {
                sym::symmetrize_in_place(n, &mut data[algebra.block_range(i)]);
            }
        }
        Ok(Element { algebra, data })
    }

    pub(crate) fn from_raw(algebra: Arc<Algebra>, data: Vec<f64>) -> Element {
        debug_assert_eq!(data.len(), algebra.buffer_len());
        Element { algebra, data }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.data[self.algebra.block_range(i)]
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn inner(&self, other: &Element) -> Result<f64> {
        self.check_same(other)?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Element::from_raw(Arc::clone(&self.algebra), data))
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Element::from_raw(Arc::clone(&self.algebra), data))
    }

    pub fn scale(&self, s: f64) -> Element {
        Element::from_raw(
            Arc::clone(&self.algebra),
            self.data.iter().map(|a| s * a).collect(),
        )
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: f64, x: &Element) -> Result<()> {
        self.check_same(x)?;
        for (s, v) in self.data.iter_mut().zip(&x.data) {
            *s += a * v;
        }
        Ok(())
    }

    pub fn distance(&self, other: &Element) -> Result<f64> {
        self.check_same(other)?;
        let diff: Vec<f64> = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(norm2(&diff))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Frame data of one block, enough to place new eigenvalues on it.
#[derive(Debug, Clone, PartialEq)]
pub enum Frame {
    Soc { direction: Vec<f64> },
    /// Rows are eigenvectors.
    Sym { vectors: Mat },
    /// `X = Uᵀ Diag(σ) V`.
    Rect { u: Mat, v: Mat },
}

/// Eigenvalues of an element plus its per-block frames.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    algebra: Arc<Algebra>,
    blockwise: Vec<f64>,
    order: Vec<usize>,
    frames: Vec<Frame>,
}

impl SpectralDecomposition {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    /// Per-block nonincreasing segments concatenated in block order.
    pub fn blockwise_eigenvalues(&self) -> &[f64] {
        &self.blockwise
    }

    /// `order[k]` is the block-wise index of the `k`-th largest eigenvalue.
    /// Ties keep block-wise order. Identity for block-wise maps.
    pub fn global_order(&self) -> &[usize] {
        &self.order
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// `λ(x)` under the algebra's ordering.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.algebra.ordering() {
            MapOrdering::BlockWise => self.blockwise.clone(),
            MapOrdering::GloballyOrdered => self.order.iter().map(|&i| self.blockwise[i]).collect(),
        }
    }

    /// An element of `U(x, μ)` for the decomposed `x`.
    ///
    /// Under the global ordering the `k`-th largest entry of `μ` is placed on
    /// the frame vector carrying the `k`-th largest eigenvalue of `x`.
    pub fn u_element(&self, mu: &[f64]) -> Result<Element> {
        let mu = self.algebra.validate_spectrum(mu)?;
        let blockwise = match self.algebra.ordering() {
            MapOrdering::BlockWise => mu,
            MapOrdering::GloballyOrdered => {
                let mut bw = vec![0.0; mu.len()];
                for (k, &idx) in self.order.iter().enumerate() {
                    bw[idx] = mu[k];
                }
                bw
            }
        };
        Ok(self.synthesize_blockwise(&blockwise))
    }

    /// Synthesizes the decomposed element back from its own spectrum.
    pub fn reconstruct(&self) -> Element {
        self.synthesize_blockwise(&self.blockwise)
    }

    fn synthesize_blockwise(&self, values: &[f64]) -> Element {
        let alg = &self.algebra;
        let mut data = vec![0.0; alg.buffer_len()];
        for (i, frame) in self.frames.iter().enumerate() {
            let out = &mut data[alg.block_range(i)];
            let mu = &values[alg.spectral_range(i)];
            match frame {
                Frame::Soc { direction } => soc::soc_synthesize_into(direction, mu[0], mu[1], out),
                Frame::Sym { vectors } => sym::synthesize_into(vectors, mu, out),
                Frame::Rect { u, v } => rect::synthesize_into(u, v, mu, out),
            }
        }
        Element::from_raw(Arc::clone(alg), data)
    }
}

pub fn spectral_decompose(x: &Element) -> Result<SpectralDecomposition> {
    let alg = x.algebra();
    let mut blockwise = Vec::with_capacity(alg.rank());
    let mut frames = Vec::with_capacity(alg.blocks().len());
    for (i, b) in alg.blocks().iter().enumerate() {
        let data = x.block(i);
        match *b {
            BlockKind::Soc { n } => {
                let s = soc::soc_spectral_parts(&data[..n], data[n]);
                blockwise.push(s.plus);
                blockwise.push(s.minus);
                frames.push(Frame::Soc {
                    direction: s.direction,
                });
            }
            BlockKind::Sym { n } => {
                let e = sym::jacobi_eigen(n, data)?;
                blockwise.extend_from_slice(&e.values);
                frames.push(Frame::Sym { vectors: e.vectors });
            }
            BlockKind::Rect { m, n } => {
                let s = rect::svd_slice(m, n, data)?;
                blockwise.extend_from_slice(&s.values);
                frames.push(Frame::Rect { u: s.u, v: s.v });
            }
        }
    }
    let mut order: Vec<usize> = (0..blockwise.len()).collect();
    if alg.ordering() == MapOrdering::GloballyOrdered {
        // stable: ties stay in (block, within-block) order
        order.sort_by(|&i, &j| blockwise[j].total_cmp(&blockwise[i]));
    }
    Ok(SpectralDecomposition {
        algebra: Arc::clone(alg),
        blockwise,
        order,
        frames,
    })
}

/// `λ(x)` (block-wise) or `λ↓(x)` (globally ordered).
pub fn eigen_map(x: &Element) -> Result<Vec<f64>> {
    Ok(spectral_decompose(x)?.eigenvalues())
}

/// One deterministic member of `U(c, μ)`.
pub fn u_element(c: &Element, mu: &[f64]) -> Result<Element> {
    spectral_decompose(c)?.u_element(mu)
}

/// Number of eigenvalues with magnitude above `rel_threshold · ‖x‖`.
pub fn rank(x: &Element, rel_threshold: f64) -> Result<usize> {
    let cut = rel_threshold * x.norm();
    Ok(eigen_map(x)?.iter().filter(|v| v.abs() > cut).count())
}
