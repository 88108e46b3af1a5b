//! Seeded random streams and sampling helpers.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ftvn::{Algebra, BlockKind, Element};
use std::sync::Arc;

/// Stream of the instance data; restart `r` draws from stream `r + 1`.
pub const DATA_STREAM: u64 = 0;

/// Independent generator for `(master seed, instance index, stream)`.
pub fn stream_rng(master: u64, instance: u64, stream: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&instance.to_le_bytes());
    seed[16..24].copy_from_slice(&stream.to_le_bytes());
    seed[24..].copy_from_slice(b"eigprog\0");
    ChaCha8Rng::from_seed(seed)
}

/// Element with every independent coordinate uniform on `[0, 1)`.
///
/// Symmetric blocks draw the upper triangle and mirror it.
pub fn uniform_element<R: Rng + ?Sized>(algebra: &Arc<Algebra>, rng: &mut R) -> Element {
    fill_element(algebra, rng, |r| r.random::<f64>(), 1.0)
}

/// Uniform point on the unit sphere of `𝓔`.
///
/// Gaussian coordinates in an orthonormal basis, normalized. Off-diagonal
/// entries of symmetric blocks carry `1/√2` so the distribution is isotropic
/// for the trace inner product.
pub fn unit_sphere_element<R: Rng + ?Sized>(algebra: &Arc<Algebra>, rng: &mut R) -> Element {
    loop {
        let g = fill_element(algebra, rng, |r| r.sample::<f64, _>(StandardNormal), std::f64::consts::FRAC_1_SQRT_2);
        let norm = g.norm();
        if norm > 1e-300 {
            return g.scale(1.0 / norm);
        }
    }
}

fn fill_element<R, F>(algebra: &Arc<Algebra>, rng: &mut R, mut draw: F, off_diag: f64) -> Element
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> f64,
{
    let mut data = vec![0.0; algebra.buffer_len()];
    for (i, block) in algebra.blocks().iter().enumerate() {
        let out = &mut data[algebra.block_range(i)];
        match *block {
            BlockKind::Sym { n } => {
                for r in 0..n {
                    out[r * n + r] = draw(rng);
                    for c in r + 1..n {
                        let v = off_diag * draw(rng);
                        out[r * n + c] = v;
                        out[c * n + r] = v;
                    }
                }
            }
            BlockKind::Soc { .. } | BlockKind::Rect { .. } => {
                out.iter_mut().for_each(|v| *v = draw(rng));
            }
        }
    }
    algebra.element(data).expect("buffer sized from the algebra")
}
