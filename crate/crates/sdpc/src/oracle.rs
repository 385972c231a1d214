//! Brute-force boundary oracles: exhaustive covariance grids, a Pareto
//! filter, and weighted maxima over the surviving points. Independent of
//! the gradient solver; shares only the closed-form rate expressions, so it
//! can confirm solver output without a shared optimization path.

use crate::channel::{AlignedChannelSpec, ChannelSpec};
use crate::linalg::PsdMatrix;
use crate::rates::{ns_rate_triple, rate_triple, CovariancePair, Order, RateTriple};
use crate::{Error, Result};

/// Points dropped by the Pareto filter are dominated coordinatewise up to
/// this slack, so a weighted maximum taken over the filtered set is below
/// the true grid maximum by at most `3 * PARETO_SLACK` for simplex weights.
pub const PARETO_SLACK: f64 = 1e-12;

/// Smallest permitted grid resolution.
pub const MIN_RESOLUTION: usize = 16;

/// Uniform grid with `resolution` points per scalar axis, endpoints
/// included.
#[derive(Copy, Clone, Debug)]
pub struct GridSpec {
    resolution: usize,
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::Parse(format!(
                "grid resolution must be at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        Ok(GridSpec { resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Grid points spanning `[0, cap]` inclusive.
    pub fn axis(&self, cap: f64) -> Vec<f64> {
        let n = self.resolution;
        (0..n)
            .map(|i| cap * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Axis spacing for the given cap: the within-one-grid-cell metric used
    /// when comparing argmax locations.
    pub fn cell(&self, cap: f64) -> f64 {
        cap / (self.resolution - 1) as f64
    }
}

/// One surviving grid point: the covariance pair and its rates.
#[derive(Clone, Debug)]
pub struct OraclePoint {
    pub pair: CovariancePair,
    pub rates: RateTriple,
}

/// Pareto filter on rate triples: sorts by `r0` descending and sweeps a
/// staircase of `(r1, r2)` maxima, keeping a point only if no earlier point
/// weakly dominates it within [`PARETO_SLACK`]. `O(n log n)`.
fn pareto_filter<P>(mut points: Vec<(RateTriple, P)>) -> Vec<(RateTriple, P)> {
    points.sort_unstable_by(|(a, _), (b, _)| {
        b.r0.total_cmp(&a.r0)
            .then(b.r1.total_cmp(&a.r1))
            .then(b.r2.total_cmp(&a.r2))
    });

    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    struct Key(u64);
    // Monotone order-preserving map for nonnegative finite floats.
    let key = |x: f64| Key(f64::to_bits(x.max(0.0)));

    // staircase: r1 -> r2, values strictly decreasing as keys increase.
    let mut staircase = std::collections::BTreeMap::<Key, f64>::new();
    let mut kept = Vec::new();
    for (t, payload) in points {
        let dominated = staircase
            .range((
                std::ops::Bound::Included(key(t.r1 - PARETO_SLACK)),
                std::ops::Bound::Unbounded,
            ))
            .next()
            .is_some_and(|(_, r2)| *r2 >= t.r2 - PARETO_SLACK);
        if dominated {
            continue;
        }
        let shadowed: Vec<u64> = staircase
            .range((
                std::ops::Bound::Unbounded,
                std::ops::Bound::Included(key(t.r1)),
            ))
            .rev()
            .take_while(|(_, r2)| **r2 <= t.r2)
            .map(|(k, _)| k.0)
            .collect();
        for k in shadowed {
            staircase.remove(&Key(k));
        }
        staircase.insert(key(t.r1), t.r2);
        kept.push((t, payload));
    }
    kept
}

fn boundary_points<P, F>(pairs: Vec<P>, eval: F) -> Result<Vec<(RateTriple, P)>>
where
    F: Fn(&P) -> Result<RateTriple>,
{
    let mut rated = Vec::with_capacity(pairs.len());
    for p in pairs {
        let t = eval(&p)?;
        rated.push((t, p));
    }
    Ok(pareto_filter(rated))
}

fn require_scalar(t: usize) -> Result<()> {
    if t != 1 {
        return Err(Error::NotScalar { t });
    }
    Ok(())
}

fn scalar_grid_pairs(s: f64, grid: &GridSpec) -> Vec<(f64, f64)> {
    let axis = grid.axis(s);
    let mut out = Vec::new();
    for &k1 in &axis {
        for &k2 in &axis {
            if k1 + k2 <= s * (1.0 + 1e-12) {
                out.push((k1, k2));
            }
        }
    }
    out
}

fn scalar_point((k1, k2): (f64, f64), rates: RateTriple) -> OraclePoint {
    OraclePoint {
        pair: CovariancePair::new(PsdMatrix::scalar(k1), PsdMatrix::scalar(k2))
            .expect("scalar dims match"),
        rates,
    }
}

/// Pareto frontier of the scalar (t = 1) aligned channel over the full
/// covariance grid.
pub fn scalar_boundary(
    c: &AlignedChannelSpec,
    grid: &GridSpec,
    order: Order,
) -> Result<Vec<OraclePoint>> {
    require_scalar(c.t())?;
    let ch = c.to_channel();
    let kept = boundary_points(scalar_grid_pairs(c.s.as_scalar(), grid), |&(k1, k2)| {
        rate_triple(
            &CovariancePair::new(PsdMatrix::scalar(k1), PsdMatrix::scalar(k2))?,
            &ch,
            order,
        )
    })?;
    Ok(kept
        .into_iter()
        .map(|(rates, ks)| scalar_point(ks, rates))
        .collect())
}

/// Pareto frontier of a scalar general channel (t = r1 = r2 = 1), evaluated
/// directly on the gain matrices with no alignment step.
pub fn scalar_general_boundary(
    c: &ChannelSpec,
    grid: &GridSpec,
    order: Order,
) -> Result<Vec<OraclePoint>> {
    require_scalar(c.t())?;
    if c.r1() != 1 || c.r2() != 1 {
        return Err(Error::NotScalar {
            t: c.r1().max(c.r2()),
        });
    }
    let kept = boundary_points(scalar_grid_pairs(c.s.as_scalar(), grid), |&(k1, k2)| {
        rate_triple(
            &CovariancePair::new(PsdMatrix::scalar(k1), PsdMatrix::scalar(k2))?,
            c,
            order,
        )
    })?;
    Ok(kept
        .into_iter()
        .map(|(rates, ks)| scalar_point(ks, rates))
        .collect())
}

/// Pareto frontier of the same scalar grid without the secrecy penalty.
pub fn ns_scalar_boundary(
    c: &AlignedChannelSpec,
    grid: &GridSpec,
    order: Order,
) -> Result<Vec<OraclePoint>> {
    require_scalar(c.t())?;
    let kept = boundary_points(scalar_grid_pairs(c.s.as_scalar(), grid), |&(k1, k2)| {
        ns_rate_triple(
            &CovariancePair::new(PsdMatrix::scalar(k1), PsdMatrix::scalar(k2))?,
            c,
            order,
        )
    })?;
    Ok(kept
        .into_iter()
        .map(|(rates, ks)| scalar_point(ks, rates))
        .collect())
}

/// Pareto frontier of a diagonal 2x2 aligned channel over the grid of
/// diagonal covariance pairs (four free axes).
pub fn diagonal_boundary(
    c: &AlignedChannelSpec,
    grid: &GridSpec,
    order: Order,
) -> Result<Vec<OraclePoint>> {
    if c.t() != 2 {
        return Err(Error::DimMismatch {
            left: c.t(),
            right: 2,
        });
    }
    for m in [&c.sigma1, &c.sigma2, &c.s] {
        if !m.sym().is_diagonal(1e-12) {
            let mut worst = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    if i != j {
                        worst = worst.max(m.sym().entry(i, j).abs());
                    }
                }
            }
            return Err(Error::NotDiagonal { max_offdiag: worst });
        }
    }
    let ch = c.to_channel();
    let (s0, s1) = (c.s.sym().entry(0, 0), c.s.sym().entry(1, 1));
    let (a0, a1) = (grid.axis(s0), grid.axis(s1));
    let mut pairs = Vec::new();
    for &x0 in &a0 {
        for &x1 in &a1 {
            for &y0 in &a0 {
                if x0 + y0 > s0 * (1.0 + 1e-12) {
                    continue;
                }
                for &y1 in &a1 {
                    if x1 + y1 > s1 * (1.0 + 1e-12) {
                        continue;
                    }
                    pairs.push(([x0, x1], [y0, y1]));
                }
            }
        }
    }
    let kept = boundary_points(pairs, |(d1, d2)| {
        rate_triple(
            &CovariancePair::new(PsdMatrix::diagonal(d1), PsdMatrix::diagonal(d2))?,
            &ch,
            order,
        )
    })?;
    Ok(kept
        .into_iter()
        .map(|(rates, (d1, d2))| OraclePoint {
            pair: CovariancePair::new(PsdMatrix::diagonal(&d1), PsdMatrix::diagonal(&d2))
                .expect("diagonal dims match"),
            rates,
        })
        .collect())
}

/// Best point under simplex weights, by exhaustive comparison.
pub fn weighted_max<'a>(
    points: &'a [OraclePoint],
    mu0: f64,
    mu1: f64,
    mu2: f64,
) -> Option<&'a OraclePoint> {
    points.iter().max_by(|a, b| {
        a.rates
            .weighted(mu0, mu1, mu2)
            .total_cmp(&b.rates.weighted(mu0, mu1, mu2))
    })
}

/// Result of a split-common non-secret grid scan.
#[derive(Clone, Debug)]
pub struct NsSplitScan {
    /// Grid maximum of `nu0 (gamma R01 + (1-gamma) R02) + mu_sum (R1+R2)`.
    pub max: f64,
    pub argmax: CovariancePair,
    /// Chebyshev distance from the supplied target to the nearest grid pair
    /// whose split objective is within `1e-9 * max(1, |max|)` of the
    /// maximum; `None` when no target was supplied.
    pub near_optimal_distance: Option<f64>,
    /// Grid maximum of the min-form objective
    /// `nu0 min(R01, R02) + mu_sum (R1 + R2)` over the same grid.
    pub min_form_max: f64,
}

/// Exhaustive scan of the split-common non-secret objective over the scalar
/// covariance grid. The common rates are shared with the secret problem; the
/// confidential rates carry no secrecy penalty. All log terms live on three
/// shared axes (`k1`, `k2`, `t = k1 + k2`), so per-axis log tables make the
/// scan allocation-free over the triangular index set.
pub fn ns_split_scan(
    c: &AlignedChannelSpec,
    grid: &GridSpec,
    order: Order,
    nu0: f64,
    gamma: f64,
    mu_sum: f64,
    target: Option<(f64, f64)>,
) -> Result<NsSplitScan> {
    require_scalar(c.t())?;
    let (s, sig1, sig2) = (
        c.s.as_scalar(),
        c.sigma1.as_scalar(),
        c.sigma2.as_scalar(),
    );
    let n = grid.resolution();
    let step = s / (n - 1) as f64;
    // lt*[m] = ln(m * step + sigma); index m covers k1, k2, and t = k1 + k2
    // since feasibility is exactly i + j <= n - 1.
    let lt1: Vec<f64> = (0..n).map(|m| (m as f64 * step + sig1).ln()).collect();
    let lt2: Vec<f64> = (0..n).map(|m| (m as f64 * step + sig2).ln()).collect();
    let (lcap1, lcap2) = ((s + sig1).ln(), (s + sig2).ln());
    let (lsig1, lsig2) = (sig1.ln(), sig2.ln());

    let objective = |i: usize, j: usize| -> (f64, f64) {
        let m = i + j;
        let r01 = 0.5 * (lcap1 - lt1[m]);
        let r02 = 0.5 * (lcap2 - lt2[m]);
        let sum = match order {
            Order::Order12 => 0.5 * (lt1[m] - lt1[j]) + 0.5 * (lt2[j] - lsig2),
            Order::Order21 => 0.5 * (lt1[i] - lsig1) + 0.5 * (lt2[m] - lt2[i]),
        };
        (
            nu0 * (gamma * r01 + (1.0 - gamma) * r02) + mu_sum * sum,
            nu0 * r01.min(r02) + mu_sum * sum,
        )
    };

    let mut max = f64::NEG_INFINITY;
    let mut min_form_max = f64::NEG_INFINITY;
    let mut arg = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n - i {
            let (split, min_form) = objective(i, j);
            if split > max {
                max = split;
                arg = (i, j);
            }
            if min_form > min_form_max {
                min_form_max = min_form;
            }
        }
    }

    let near_optimal_distance = target.map(|(t1, t2)| {
        let tol = 1e-9 * max.abs().max(1.0);
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..n - i {
                let (split, _) = objective(i, j);
                if split >= max - tol {
                    let d = (i as f64 * step - t1)
                        .abs()
                        .max((j as f64 * step - t2).abs());
                    best = best.min(d);
                }
            }
        }
        best
    });

    Ok(NsSplitScan {
        max,
        argmax: CovariancePair::new(
            PsdMatrix::scalar(arg.0 as f64 * step),
            PsdMatrix::scalar(arg.1 as f64 * step),
        )?,
        near_optimal_distance,
        min_form_max,
    })
}
