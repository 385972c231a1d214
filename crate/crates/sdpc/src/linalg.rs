//! Symmetric/PSD matrix kernel: eigendecompositions, log-determinants,
//! Loewner comparisons, and the feasibility projection for covariance pairs.
//!
//! Eigendecomposition is the single numeric primitive. There is no Cholesky
//! fast path, so singular-but-PSD matrices flow through the same code as
//! strictly definite ones.

use nalgebra::DMatrix;

use crate::rates::CovariancePair;
use crate::{Error, Result};

/// Relative PSD tolerance: eigenvalues down to `-EPS_PSD * max(1, spectral
/// norm)` are treated as zero and clipped on construction; anything more
/// negative is rejected.
pub const EPS_PSD: f64 = 1e-9;

/// Relative asymmetry accepted on ingest (averaged away); larger asymmetry
/// is an error rather than a silent repair.
pub const ASYMMETRY_TOL: f64 = 1e-12;

/// Cycle cap for the alternating feasibility projection.
pub const PROJECTION_MAX_CYCLES: usize = 500;

/// Successive-change threshold (Frobenius) that stops the projection.
pub const PROJECTION_TOL: f64 = 1e-10;

/// Eigendecomposition of a symmetric matrix: `values[i]` pairs with column
/// `i` of `vectors`, sorted ascending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest absolute eigenvalue (the spectral norm of the source matrix).
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Rebuilds a symmetric matrix with each eigenvalue mapped through `f`.
    pub fn rebuild(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let dim = self.values.len();
        let mut scaled = self.vectors.clone();
        for (i, v) in self.values.iter().enumerate() {
            let fv = f(*v);
            for r in 0..dim {
                scaled[(r, i)] *= fv;
            }
        }
        let m = &scaled * self.vectors.transpose();
        SymMatrix::force_symmetric(m)
    }
}

/// Real symmetric matrix; entries are exactly symmetric after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    pub(crate) m: DMatrix<f64>,
}

impl SymMatrix {
    /// Ingests a square matrix, averaging asymmetry up to [`ASYMMETRY_TOL`]
    /// (relative to the largest entry) and rejecting anything larger.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut asym: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
                scale = scale.max(m[(i, j)].abs());
            }
        }
        let tol = ASYMMETRY_TOL * scale;
        if asym > tol {
            return Err(Error::Asymmetric {
                asymmetry: asym,
                tol,
            });
        }
        Ok(Self::force_symmetric(m))
    }

    /// Builds from a row-major slice of `dim * dim` entries.
    pub fn from_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Symmetrizes unconditionally; internal use where symmetry is known up
    /// to rounding (congruences, eigen rebuilds).
    pub(crate) fn force_symmetric(m: DMatrix<f64>) -> Self {
        let mut s = m;
        for i in 0..s.nrows() {
            for j in (i + 1)..s.ncols() {
                let v = 0.5 * (s[(i, j)] + s[(j, i)]);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        SymMatrix { m: s }
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        SymMatrix {
            m: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(entries)),
        }
    }

    pub fn scalar(x: f64) -> Self {
        SymMatrix {
            m: DMatrix::from_element(1, 1, x),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// The single scalar entry of a 1x1 matrix.
    pub fn as_scalar(&self) -> f64 {
        debug_assert_eq!(self.dim(), 1);
        self.m[(0, 0)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn fro_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let mut off: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                if i != j {
                    off = off.max(self.m[(i, j)].abs());
                }
            }
        }
        off <= tol
    }

    /// Eigendecomposition, sorted ascending. Deterministic for fixed input.
    pub fn eigen(&self) -> Eigen {
        let se = self.m.clone().symmetric_eigen();
        let dim = self.dim();
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let values: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(dim, dim);
        for (col, &i) in idx.iter().enumerate() {
            vectors.set_column(col, &se.eigenvectors.column(i));
        }
        Eigen { values, vectors }
    }

    pub fn min_eig(&self) -> f64 {
        self.eigen().min()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.eigen().spectral_norm()
    }

    /// `h * self * h^T` for a rectangular map `h`, re-symmetrized.
    pub fn congruence(&self, h: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::force_symmetric(h * &self.m * h.transpose())
    }

    /// Block-diagonal assembly of two symmetric matrices.
    pub fn block_diag(&self, other: &SymMatrix) -> SymMatrix {
        let (n, k) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(n + k, n + k);
        m.view_mut((0, 0), (n, n)).copy_from(&self.m);
        m.view_mut((n, n), (k, k)).copy_from(&other.m);
        SymMatrix { m }
    }
}

impl std::ops::Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { m: &self.m + &rhs.m }
    }
}

impl std::ops::Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { m: &self.m - &rhs.m }
    }
}

impl std::ops::Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        SymMatrix { m: &self.m * rhs }
    }
}

/// Real rectangular matrix (channel gains, precoders, linear maps).
#[derive(Clone, Debug, PartialEq)]
pub struct RectMatrix {
    pub(crate) m: DMatrix<f64>,
}

impl RectMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(RectMatrix { m })
    }

    /// Builds from a row-major slice of `rows * cols` entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimMismatch {
                left: rows * cols,
                right: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn identity(dim: usize) -> Self {
        RectMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RectMatrix {
            m: DMatrix::zeros(rows, cols),
        }
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }
}

/// Positive-semidefinite matrix. Construction clips eigenvalues in
/// `[-EPS_PSD * max(1, spectral norm), 0)` to zero and rejects anything more
/// negative.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdMatrix {
    base: SymMatrix,
}

impl PsdMatrix {
    pub fn new(base: SymMatrix) -> Result<Self> {
        let e = base.eigen();
        let tol = EPS_PSD * e.spectral_norm().max(1.0);
        if e.min() < -tol {
            return Err(Error::NotPsd {
                min_eig: e.min(),
                tol,
            });
        }
        if e.min() >= 0.0 {
            return Ok(PsdMatrix { base });
        }
        Ok(PsdMatrix {
            base: e.rebuild(|v| v.max(0.0)),
        })
    }

    pub fn from_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_rows(dim, entries)?)
    }

    pub fn zeros(dim: usize) -> Self {
        PsdMatrix {
            base: SymMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        PsdMatrix {
            base: SymMatrix::identity(dim),
        }
    }

    /// Diagonal PSD matrix; panics in debug builds on negative entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        debug_assert!(entries.iter().all(|v| *v >= 0.0));
        PsdMatrix {
            base: SymMatrix::diagonal(entries),
        }
    }

    pub fn scalar(x: f64) -> Self {
        debug_assert!(x >= 0.0);
        PsdMatrix {
            base: SymMatrix::scalar(x),
        }
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    pub fn as_scalar(&self) -> f64 {
        self.base.as_scalar()
    }

    /// True when the smallest eigenvalue clears the singularity threshold
    /// `EPS_PSD * max(1, spectral norm)`.
    pub fn is_strictly_pd(&self) -> bool {
        let e = self.base.eigen();
        e.min() > EPS_PSD * e.spectral_norm().max(1.0)
    }
}

/// Sum of natural logs of the eigenvalues of `m + jitter*I`.
///
/// Errors with [`Error::SingularMatrix`] when any jittered eigenvalue is at
/// or below `EPS_PSD * spectral_norm(m)`.
pub fn logdet(m: &PsdMatrix, jitter: f64) -> Result<f64> {
    let e = m.sym().eigen();
    let threshold = EPS_PSD * e.spectral_norm();
    let mut sum = 0.0;
    for v in &e.values {
        let vj = v + jitter;
        if vj <= threshold {
            return Err(Error::SingularMatrix {
                min_eig: vj,
                threshold,
            });
        }
        sum += vj.ln();
    }
    Ok(sum)
}

/// Loewner comparison: true iff the smallest eigenvalue of `b - a` is at
/// least `-tol * max(1, spectral_norm(b - a))`.
pub fn loewner_leq(a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let e = (b - a).eigen();
    Ok(e.min() >= -tol * e.spectral_norm().max(1.0))
}

/// Inverse of a strictly positive-definite matrix via eigendecomposition.
pub fn inverse_spd(m: &SymMatrix) -> Result<SymMatrix> {
    let e = m.eigen();
    let threshold = EPS_PSD * e.spectral_norm();
    if e.min() <= threshold {
        return Err(Error::SingularMatrix {
            min_eig: e.min(),
            threshold,
        });
    }
    Ok(e.rebuild(|v| 1.0 / v))
}

/// Symmetric PSD square root.
pub fn sqrt_psd(m: &PsdMatrix) -> SymMatrix {
    m.sym().eigen().rebuild(|v| v.max(0.0).sqrt())
}

/// Inverse square root of a strictly positive-definite matrix.
pub fn inv_sqrt_spd(m: &SymMatrix) -> Result<SymMatrix> {
    let e = m.eigen();
    let threshold = EPS_PSD * e.spectral_norm();
    if e.min() <= threshold {
        return Err(Error::SingularMatrix {
            min_eig: e.min(),
            threshold,
        });
    }
    Ok(e.rebuild(|v| 1.0 / v.sqrt()))
}

/// Positive part: eigenvalues clipped from below at zero.
pub(crate) fn positive_part(m: &SymMatrix) -> SymMatrix {
    let e = m.eigen();
    if e.min() >= 0.0 {
        return m.clone();
    }
    if e.max() <= 0.0 {
        return SymMatrix::zeros(m.dim());
    }
    e.rebuild(|v| v.max(0.0))
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
pub(crate) fn psd_clip(m: &SymMatrix) -> SymMatrix {
    positive_part(m)
}

/// Log-determinant of a matrix expected to be strictly PD, with only a
/// positivity guard instead of the relative singularity threshold of
/// [`logdet`]. Hot-loop helper for quantities like `K + Σ` whose smallest
/// eigenvalue is bounded below by construction.
pub(crate) fn ld_spd(m: &SymMatrix) -> Result<f64> {
    let e = m.eigen();
    let mut acc = 0.0;
    for v in &e.values {
        if *v <= 0.0 {
            return Err(Error::SingularMatrix {
                min_eig: *v,
                threshold: 0.0,
            });
        }
        acc += v.ln();
    }
    Ok(acc)
}

/// Repairs `(k1, k2)` into a pair with `k1 >= 0`, `k2 >= 0`, and
/// `k1 + k2 <= s` (Loewner). Exactly feasible input is returned unchanged.
///
/// The scheme runs in the frame that whitens `s`: components outside the
/// numerical range of `s` are forced to zero (any feasible pair vanishes
/// there), and inside it the sum cap becomes the identity, so the iteration
/// cannot stall along near-null directions of `s`. Dykstra's alternating
/// projections between the PSD pair cone (eigenvalue clip) and the sum cap
/// (subtract half the positive part of the whitened `k1 + k2 - I` from
/// each, which is that set's exact projection) converge to the metric
/// projection in the whitened norm. When `s` is nonsingular that norm is
/// the Frobenius norm weighted by `s^{-1}` on both blocks, so ascent steps
/// preconditioned by `s . s` pair correctly with raw gradients. Inputs too
/// far outside the feasible set to finish the correction scheme within the
/// cycle budget are repaired by plain alternation instead, trading the
/// exact-projection property (which only near-feasible callers rely on)
/// for guaranteed feasibility.
///
/// Runs until the combined Frobenius change of a cycle falls below
/// [`PROJECTION_TOL`] or [`PROJECTION_MAX_CYCLES`] is reached, then clips
/// and validates the iterate; [`Error::NoConvergence`] (carrying the last
/// iterate) is returned only if that output still exceeds the sum cap by
/// more than the relative [`EPS_PSD`] slack.
pub fn project_pair(k1: &SymMatrix, k2: &SymMatrix, s: &PsdMatrix) -> Result<CovariancePair> {
    if k1.dim() != k2.dim() {
        return Err(Error::DimMismatch {
            left: k1.dim(),
            right: k2.dim(),
        });
    }
    if k1.dim() != s.dim() {
        return Err(Error::DimMismatch {
            left: k1.dim(),
            right: s.dim(),
        });
    }
    let exactly_feasible = k1.eigen().min() >= 0.0
        && k2.eigen().min() >= 0.0
        && (&(k1 + k2) - s.sym()).eigen().max() <= 0.0;
    if exactly_feasible {
        return CovariancePair::new(PsdMatrix::new(k1.clone())?, PsdMatrix::new(k2.clone())?);
    }

    let dim = s.dim();
    let es = s.sym().eigen();
    let floor = EPS_PSD * es.spectral_norm().max(1.0);
    let kept: Vec<usize> = (0..dim).filter(|&i| es.values[i] > floor).collect();
    if kept.is_empty() {
        return CovariancePair::new(PsdMatrix::zeros(dim), PsdMatrix::zeros(dim));
    }
    let r = kept.len();
    let mut white = DMatrix::zeros(dim, r);
    let mut color = DMatrix::zeros(dim, r);
    for (j, &i) in kept.iter().enumerate() {
        let root = es.values[i].sqrt();
        white.set_column(j, &(es.vectors.column(i) / root));
        color.set_column(j, &(es.vectors.column(i) * root));
    }

    let identity = SymMatrix::identity(r);
    let mut a = SymMatrix::force_symmetric(white.transpose() * &k1.m * &white);
    let mut b = SymMatrix::force_symmetric(white.transpose() * &k2.m * &white);
    // Dykstra corrections: one pair for the PSD cone, one (equal-block)
    // matrix for the sum cap. Both elementary projections are exact, so
    // with the corrections the limit is the metric projection onto the
    // intersection, not merely some feasible point. Plain alternation
    // without corrections can return points that move against the input
    // displacement, which silently breaks ascent line searches built on
    // this routine.
    let mut cone_a = SymMatrix::zeros(r);
    let mut cone_b = SymMatrix::zeros(r);
    let mut cap = SymMatrix::zeros(r);
    let mut change = f64::INFINITY;
    let mut cycles = 0;
    for c in 0..PROJECTION_MAX_CYCLES {
        let (pa, pb) = (a.clone(), b.clone());
        let ya = psd_clip(&(&a + &cone_a));
        let yb = psd_clip(&(&b + &cone_b));
        cone_a = &(&a + &cone_a) - &ya;
        cone_b = &(&b + &cone_b) - &yb;
        let za = &ya + &cap;
        let zb = &yb + &cap;
        let half = &positive_part(&(&(&za + &zb) - &identity)) * 0.5;
        a = &za - &half;
        b = &zb - &half;
        let cap_change = (&half - &cap).fro_norm();
        cap = half;
        change = (&a - &pa).fro_norm() + (&b - &pb).fro_norm() + cap_change;
        cycles = c + 1;
        if change < PROJECTION_TOL {
            break;
        }
    }
    // Inputs far outside the feasible set (whitened norm orders of
    // magnitude above the cap) can exhaust the correction scheme's cycle
    // budget. They only need a feasible repair, not the exact projection,
    // so fall back to plain alternation, which restores feasibility fast.
    if change >= PROJECTION_TOL {
        for _ in 0..PROJECTION_MAX_CYCLES {
            let (pa, pb) = (a.clone(), b.clone());
            a = psd_clip(&a);
            b = psd_clip(&b);
            let half = &positive_part(&(&(&a + &b) - &identity)) * 0.5;
            a = &a - &half;
            b = &b - &half;
            change = (&a - &pa).fro_norm() + (&b - &pb).fro_norm();
            cycles += 1;
            if change < PROJECTION_TOL {
                break;
            }
        }
    }
    let out1 = SymMatrix::force_symmetric(&color * &psd_clip(&a).m * color.transpose());
    let out2 = SymMatrix::force_symmetric(&color * &psd_clip(&b).m * color.transpose());
    if !loewner_leq(&(&out1 + &out2), s.sym(), EPS_PSD)? {
        return Err(Error::NoConvergence {
            cycles,
            residual: change,
            last: Box::new((out1, out2)),
        });
    }
    CovariancePair::new(PsdMatrix::new(out1)?, PsdMatrix::new(out2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cyclic Jacobi eigenvalue iteration, independent of the nalgebra path
    /// used by `SymMatrix::eigen`. Rotation-based, rows/cols in place.
    fn jacobi_eigenvalues(a: &SymMatrix) -> Vec<f64> {
        let n = a.dim();
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| a.entry(i, j)).collect())
            .collect();
        for _ in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += m[i][j] * m[i][j];
                }
            }
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if m[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (mkp, mkq) = (m[k][p], m[k][q]);
                        m[k][p] = c * mkp - s * mkq;
                        m[k][q] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let (mpk, mqk) = (m[p][k], m[q][k]);
                        m[p][k] = c * mpk - s * mqk;
                        m[q][k] = s * mpk + c * mqk;
                    }
                }
            }
        }
        let mut vals: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    fn random_psd(rng: &mut ChaCha8Rng, dim: usize) -> PsdMatrix {
        let g = DMatrix::from_fn(dim, dim, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let m = &g * g.transpose();
        PsdMatrix::new(SymMatrix::force_symmetric(m)).unwrap()
    }

    fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> PsdMatrix {
        let p = random_psd(rng, dim);
        PsdMatrix::new(&(p.sym() + &SymMatrix::identity(dim)) * 1.0).unwrap()
    }

    #[test]
    fn symmetrize_on_ingest_within_tolerance() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 1e-13;
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.entry(0, 1), s.entry(1, 0));
        assert!((s.entry(0, 1) - 5e-14).abs() < 1e-20);
    }

    #[test]
    fn reject_large_asymmetry() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 1e-6;
        assert!(matches!(
            SymMatrix::new(m),
            Err(Error::Asymmetric { .. })
        ));
    }

    #[test]
    fn psd_rejects_negative_definite() {
        let m = SymMatrix::diagonal(&[1.0, -0.5]);
        assert!(matches!(PsdMatrix::new(m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn psd_clips_dust_negative() {
        let m = SymMatrix::diagonal(&[1.0, -1e-12]);
        let p = PsdMatrix::new(m).unwrap();
        assert!(p.sym().min_eig() >= 0.0);
    }

    #[test]
    fn logdet_identity_is_zero() {
        assert_eq!(logdet(&PsdMatrix::identity(2), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn logdet_diagonal_is_product_log() {
        let v = logdet(&PsdMatrix::diagonal(&[2.0, 3.0]), 0.0).unwrap();
        assert!((v - 6.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn logdet_known_two_by_two() {
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let p = PsdMatrix::from_rows(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!((logdet(&p, 0.0).unwrap() - 3.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn logdet_singular_errors() {
        let p = PsdMatrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(
            logdet(&p, 0.0),
            Err(Error::SingularMatrix { .. })
        ));
        // Jitter rescues the zero mode.
        assert!(logdet(&p, 1e-3).is_ok());
    }

    #[test]
    fn logdet_matches_independent_jacobi_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = random_spd(&mut rng, 4);
            let ours = logdet(&p, 0.0).unwrap();
            let oracle: f64 = jacobi_eigenvalues(p.sym()).iter().map(|v| v.ln()).sum();
            assert!(
                (ours - oracle).abs() < 1e-10,
                "logdet {ours} vs jacobi {oracle}"
            );
        }
    }

    #[test]
    fn loewner_trivial_cases() {
        let s = PsdMatrix::diagonal(&[1.0, 2.0]);
        let z = SymMatrix::zeros(2);
        assert!(loewner_leq(&z, s.sym(), 0.0).unwrap());
        assert!(loewner_leq(s.sym(), s.sym(), 1e-12).unwrap());
        let a = SymMatrix::diagonal(&[1.0, 3.0]);
        let b = SymMatrix::diagonal(&[2.0, 2.0]);
        assert!(!loewner_leq(&a, &b, 1e-9).unwrap());
    }

    #[test]
    fn loewner_dim_mismatch() {
        let a = SymMatrix::zeros(2);
        let b = SymMatrix::zeros(3);
        assert!(matches!(
            loewner_leq(&a, &b, 0.0),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn logdet_block_diag_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let a = random_spd(&mut rng, 2);
            let b = random_spd(&mut rng, 3);
            let block = PsdMatrix::new(a.sym().block_diag(b.sym())).unwrap();
            let lhs = logdet(&a, 0.0).unwrap() + logdet(&b, 0.0).unwrap();
            let rhs = logdet(&block, 0.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn logdet_monotone_under_loewner() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..40 {
            let a = random_spd(&mut rng, 3);
            let bump = random_psd(&mut rng, 3);
            let b = PsdMatrix::new(a.sym() + bump.sym()).unwrap();
            assert!(logdet(&a, 0.0).unwrap() <= logdet(&b, 0.0).unwrap() + 1e-12);
        }
    }

    #[test]
    fn inverse_spd_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let a = random_spd(&mut rng, 3);
            let inv = inverse_spd(a.sym()).unwrap();
            let prod = a.sym().as_dmatrix() * inv.as_dmatrix();
            let err = (&prod - DMatrix::<f64>::identity(3, 3)).norm();
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn projection_feasible_input_unchanged() {
        let s = PsdMatrix::diagonal(&[2.0, 2.0]);
        let k1 = SymMatrix::diagonal(&[0.5, 0.25]);
        let k2 = SymMatrix::diagonal(&[0.25, 0.5]);
        let pair = project_pair(&k1, &k2, &s).unwrap();
        assert!((pair.k1.sym() - &k1).max_abs() < 1e-12);
        assert!((pair.k2.sym() - &k2).max_abs() < 1e-12);
    }

    #[test]
    fn projection_negative_definite_to_zero() {
        let s = PsdMatrix::identity(2);
        let n = &SymMatrix::identity(2) * -1.0;
        let pair = project_pair(&n, &n, &s).unwrap();
        assert!(pair.k1.sym().max_abs() < 1e-12);
        assert!(pair.k2.sym().max_abs() < 1e-12);
    }

    #[test]
    fn projection_overshoot_splits_to_cap() {
        // (2S, 0) with S = I lands on (I, 0).
        let s = PsdMatrix::identity(2);
        let k1 = &SymMatrix::identity(2) * 2.0;
        let pair = project_pair(&k1, &SymMatrix::zeros(2), &s).unwrap();
        assert!((pair.k1.sym() - &SymMatrix::identity(2)).max_abs() < 1e-9);
        assert!(pair.k2.sym().max_abs() < 1e-9);
    }

    /// Dense grid solve of min ||(K1,K2) - (A1,A2)||_F over the feasible set
    /// at dim 1, used as the metric-projection reference.
    fn grid_metric_projection_1d(a1: f64, a2: f64, s: f64) -> (f64, f64) {
        let res = 400;
        let mut best = (0.0, 0.0);
        let mut best_d = f64::INFINITY;
        for i in 0..=res {
            let k1 = s * i as f64 / res as f64;
            for j in 0..=res {
                let k2 = s * j as f64 / res as f64;
                if k1 + k2 > s * (1.0 + 1e-12) {
                    continue;
                }
                let d = (k1 - a1).powi(2) + (k2 - a2).powi(2);
                if d < best_d {
                    best_d = d;
                    best = (k1, k2);
                }
            }
        }
        best
    }

    #[test]
    fn projection_matches_dense_solve_dim1() {
        let s = PsdMatrix::scalar(1.0);
        for (a1, a2) in [(2.0, 0.0), (2.0, 0.5), (-1.0, 3.0), (0.9, 0.8), (0.2, 0.1)] {
            let pair = project_pair(&SymMatrix::scalar(a1), &SymMatrix::scalar(a2), &s).unwrap();
            let (g1, g2) = grid_metric_projection_1d(a1, a2, 1.0);
            assert!(
                (pair.k1.as_scalar() - g1).abs() < 5e-3 && (pair.k2.as_scalar() - g2).abs() < 5e-3,
                "projection ({}, {}) vs grid ({g1}, {g2})",
                pair.k1.as_scalar(),
                pair.k2.as_scalar()
            );
        }
    }

    #[test]
    fn projection_output_always_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..60 {
            let dim = rng.random_range(1..=3);
            let s = random_psd(&mut rng, dim);
            let raw1 = DMatrix::from_fn(dim, dim, |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let raw2 = DMatrix::from_fn(dim, dim, |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let k1 = SymMatrix::force_symmetric(raw1);
            let k2 = SymMatrix::force_symmetric(raw2);
            let pair = project_pair(&k1, &k2, &s).unwrap();
            assert!(pair.k1.sym().min_eig() >= -1e-8);
            assert!(pair.k2.sym().min_eig() >= -1e-8);
            let sum = pair.k1.sym() + pair.k2.sym();
            assert!(loewner_leq(&sum, s.sym(), 1e-8).unwrap());
        }
    }

    #[test]
    fn projection_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..20 {
            let dim = rng.random_range(1..=3);
            let s = random_psd(&mut rng, dim);
            let k1 = SymMatrix::force_symmetric(DMatrix::from_fn(dim, dim, |_, _| {
                rng.random::<f64>() * 4.0 - 2.0
            }));
            let k2 = SymMatrix::force_symmetric(DMatrix::from_fn(dim, dim, |_, _| {
                rng.random::<f64>() * 4.0 - 2.0
            }));
            let p1 = project_pair(&k1, &k2, &s).unwrap();
            let p2 = project_pair(p1.k1.sym(), p1.k2.sym(), &s).unwrap();
            assert!((p2.k1.sym() - p1.k1.sym()).max_abs() < 1e-9);
            assert!((p2.k2.sym() - p1.k2.sym()).max_abs() < 1e-9);
        }
    }
}
