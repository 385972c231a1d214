//! Seeded generators for channels and covariance pairs. Everything is
//! driven by a caller-provided 64-bit seed through a fixed-algorithm stream
//! cipher, so identical seeds reproduce identical draws on every platform.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{AlignedChannelSpec, ChannelSpec};
use crate::linalg::{sqrt_psd, PsdMatrix, RectMatrix, SymMatrix};
use crate::rates::CovariancePair;

/// The deterministic generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_ish(rng: &mut ChaCha8Rng) -> f64 {
    // Sum of uniforms, centered: cheap, bounded, smooth enough for test
    // matrices; no tail behavior is relied on anywhere.
    (0..4).map(|_| rng.random::<f64>()).sum::<f64>() - 2.0
}

/// Random PSD matrix `G G^T` scaled so its trace is roughly `scale * dim`.
pub fn random_psd(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> PsdMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_ish(rng));
    let mut m = SymMatrix::force_symmetric(&g * g.transpose());
    let tr = m.trace();
    if tr > 0.0 {
        m = &m * (scale * dim as f64 / tr);
    }
    PsdMatrix::new(m).expect("gram matrix is PSD")
}

/// Random strictly PD matrix: a PSD draw plus `0.1 * scale` on the diagonal.
pub fn random_spd(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> PsdMatrix {
    let base = random_psd(rng, dim, scale);
    let bumped = base.sym() + &(&SymMatrix::identity(dim) * (0.1 * scale));
    PsdMatrix::new(bumped).expect("PSD plus positive diagonal")
}

/// Random aligned channel with O(1) noise and input-cap scales.
pub fn random_aligned_channel(rng: &mut ChaCha8Rng, t: usize) -> AlignedChannelSpec {
    let u1 = 0.5 + 1.5 * rng.random::<f64>();
    let u2 = 0.5 + 1.5 * rng.random::<f64>();
    let us = 0.5 + 2.5 * rng.random::<f64>();
    let sigma1 = random_spd(rng, t, u1);
    let sigma2 = random_spd(rng, t, u2);
    let s = random_spd(rng, t, us);
    AlignedChannelSpec::new(sigma1, sigma2, s).expect("generated dims match")
}

/// Random general channel with the given antenna counts.
pub fn random_general_channel(
    rng: &mut ChaCha8Rng,
    t: usize,
    r1: usize,
    r2: usize,
) -> ChannelSpec {
    let h = |rng: &mut ChaCha8Rng, rows: usize| {
        RectMatrix::new(DMatrix::from_fn(rows, t, |_, _| gaussian_ish(rng)))
            .expect("finite entries")
    };
    let h1 = h(rng, r1);
    let h2 = h(rng, r2);
    let u1 = 0.5 + 1.5 * rng.random::<f64>();
    let sigma1 = random_spd(rng, r1, u1);
    let u2 = 0.5 + 1.5 * rng.random::<f64>();
    let sigma2 = random_spd(rng, r2, u2);
    let us = 0.5 + 2.5 * rng.random::<f64>();
    let s = random_spd(rng, t, us);
    ChannelSpec::new(h1, h2, sigma1, sigma2, s).expect("generated dims match")
}

/// Random feasible pair for the cap `s`: `K_i = c S^{1/2} W_i S^{1/2}` with
/// Wishart-style draws `W_i` and `c` chosen so `K1 + K2 ⪯ u·S` for a random
/// fill factor `u` in the given range. Works for singular `s` too, since
/// the draws are supported on range(`s`).
pub fn random_feasible_pair(
    rng: &mut ChaCha8Rng,
    s: &PsdMatrix,
    fill_range: (f64, f64),
) -> CovariancePair {
    let dim = s.dim();
    let root = sqrt_psd(s);
    let wish = |rng: &mut ChaCha8Rng| {
        let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_ish(rng));
        SymMatrix::force_symmetric(&g * g.transpose())
    };
    let w1 = wish(rng);
    let w2 = wish(rng);
    let u = fill_range.0 + (fill_range.1 - fill_range.0) * rng.random::<f64>();
    let lam_max = (&w1 + &w2).eigen().max().max(1e-300);
    let c = u / lam_max;
    let lift = |w: &SymMatrix| {
        PsdMatrix::new(&w.congruence(root.as_dmatrix()) * c).expect("congruence of PSD")
    };
    CovariancePair::new(lift(&w1), lift(&w2)).expect("matching dims")
}
