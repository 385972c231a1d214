//! Weighted-boundary solver: projected supergradient ascent on
//! `μ0 min(R01, R02) + μ1 R1 + μ2 R2` over feasible covariance pairs, with
//! deterministic and randomized restarts. Each returned point carries the
//! stationarity residual of its fitted multiplier certificate.

use rand_chacha::ChaCha8Rng;

use crate::channel::{align, perturb, square_up, AlignedChannelSpec, ChannelSpec, RangeReduction};
use crate::kkt::fit_certificate;
use crate::linalg::{inverse_spd, project_pair, PsdMatrix, SymMatrix};
use crate::random::{random_feasible_pair, rng_from_seed};
use crate::rates::{rate_triple, CovariancePair, Order, RateTriple};
use crate::{Error, Result};

const MAX_ITERS: usize = 5000;
const STATIONARY_TOL: f64 = 1e-9;
const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;
/// Relative half-width of the band around a kink (common-rate tie, or a
/// confidential clamp at zero) inside which its blend weight is fitted.
const KINK_BAND: f64 = 1e-6;
/// Wider band engaged when the plain search finds no uphill step: a kink
/// this close to the iterate is then assumed to pin the optimum.
const ESCALATION_BAND: f64 = 1e-2;
/// Gauss–Seidel passes refining interior blend weights per iteration.
const BLEND_SWEEPS: usize = 2;
/// Post-step kink gap below which a blend weight is left alone.
const GAP_TOL: f64 = 1e-12;
/// Safeguarded root-find iterations per blend weight per pass.
const ROOT_ITERS: usize = 24;

/// Boundary weights. Not all zero; the optional `lambda_hint` pins the
/// common-rate branch weight used by certificate fitting when the two
/// common rates tie.
#[derive(Copy, Clone, Debug)]
pub struct Weights {
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub lambda_hint: Option<f64>,
}

impl Weights {
    pub fn new(mu0: f64, mu1: f64, mu2: f64) -> Result<Self> {
        Self::with_hint(mu0, mu1, mu2, None)
    }

    pub fn with_hint(mu0: f64, mu1: f64, mu2: f64, lambda_hint: Option<f64>) -> Result<Self> {
        for v in [mu0, mu1, mu2] {
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            if v < 0.0 {
                return Err(Error::DegenerateWeights {
                    reason: "weights must be nonnegative",
                });
            }
        }
        if mu0 + mu1 + mu2 == 0.0 {
            return Err(Error::ZeroWeights);
        }
        if let Some(h) = lambda_hint {
            if !(0.0..=1.0).contains(&h) || !h.is_finite() {
                return Err(Error::DegenerateWeights {
                    reason: "lambda hint outside [0, 1]",
                });
            }
        }
        Ok(Weights {
            mu0,
            mu1,
            mu2,
            lambda_hint,
        })
    }

    pub fn sum(&self) -> f64 {
        self.mu0 + self.mu1 + self.mu2
    }
}

/// One solved point on the weighted boundary.
#[derive(Clone, Debug)]
pub struct BoundaryPoint {
    pub weights: Weights,
    pub pair: CovariancePair,
    pub triple: RateTriple,
    /// Equals `triple.weighted(mu0, mu1, mu2)` exactly.
    pub objective: f64,
    pub restarts_used: usize,
    /// Stationarity residual of the fitted certificate at `pair`.
    pub kkt_residual: f64,
}

/// Precomputed per-channel constants for the canonical (order 12) ascent.
struct Objective<'a> {
    c: &'a AlignedChannelSpec,
    mu: (f64, f64, f64),
    ld_cap1: f64,
    ld_cap2: f64,
    ld_sig1: f64,
    ld_sig2: f64,
}

struct Gradient {
    g1: SymMatrix,
    g2: SymMatrix,
}

/// Resolvent blocks `P_j = (T+Σ_j)^{-1}`, `Q_j = (K2+Σ_j)^{-1}` and the raw
/// branch rates at one pair.
struct Blocks {
    p1: SymMatrix,
    p2: SymMatrix,
    q1: SymMatrix,
    q2: SymMatrix,
    r01: f64,
    r02: f64,
    raw1: f64,
    raw2: f64,
}

/// Supergradient blend weights: `lambda` splits the common-rate weight
/// between the receiver branches, `nu1`/`nu2` are the effective weights of
/// the clamped confidential branches, each within `[0, mu_i]`.
#[derive(Copy, Clone)]
struct Blend {
    lambda: f64,
    nu1: f64,
    nu2: f64,
}

fn dot(a: &SymMatrix, b: &SymMatrix) -> f64 {
    a.as_dmatrix().dot(b.as_dmatrix())
}

impl<'a> Objective<'a> {
    fn new(c: &'a AlignedChannelSpec, mu: (f64, f64, f64)) -> Result<Self> {
        Ok(Objective {
            c,
            mu,
            ld_cap1: crate::linalg::ld_spd(&(c.s.sym() + c.sigma1.sym()))?,
            ld_cap2: crate::linalg::ld_spd(&(c.s.sym() + c.sigma2.sym()))?,
            ld_sig1: crate::linalg::ld_spd(c.sigma1.sym())?,
            ld_sig2: crate::linalg::ld_spd(c.sigma2.sym())?,
        })
    }

    /// Raw branch rates at a pair: `(r01, r02, raw1, raw2)`, secrecy
    /// penalties included, clamps not applied.
    fn branches(&self, pair: &CovariancePair) -> Result<(f64, f64, f64, f64)> {
        let t = pair.sum();
        let ld_t1 = crate::linalg::ld_spd(&(&t + self.c.sigma1.sym()))?;
        let ld_t2 = crate::linalg::ld_spd(&(&t + self.c.sigma2.sym()))?;
        let ld_k1 = crate::linalg::ld_spd(&(pair.k2.sym() + self.c.sigma1.sym()))?;
        let ld_k2 = crate::linalg::ld_spd(&(pair.k2.sym() + self.c.sigma2.sym()))?;
        let r01 = 0.5 * (self.ld_cap1 - ld_t1);
        let r02 = 0.5 * (self.ld_cap2 - ld_t2);
        let raw1 = 0.5 * (ld_t1 - ld_k1) - 0.5 * (ld_t2 - ld_k2);
        let raw2 = 0.5 * (ld_k2 - self.ld_sig2) - 0.5 * (ld_k1 - self.ld_sig1);
        Ok((r01, r02, raw1, raw2))
    }

    /// Clamped weighted objective, the value the region actually attains.
    fn value(&self, pair: &CovariancePair) -> Result<f64> {
        let (r01, r02, raw1, raw2) = self.branches(pair)?;
        let (mu0, mu1, mu2) = self.mu;
        Ok(mu0 * r01.min(r02) + mu1 * raw1.max(0.0) + mu2 * raw2.max(0.0))
    }

    /// Resolvent blocks and branch rates at a pair, the inputs every
    /// supergradient shares.
    fn blocks(&self, pair: &CovariancePair) -> Result<Blocks> {
        let (r01, r02, raw1, raw2) = self.branches(pair)?;
        let t = pair.sum();
        Ok(Blocks {
            p1: inverse_spd(&(&t + self.c.sigma1.sym()))?,
            p2: inverse_spd(&(&t + self.c.sigma2.sym()))?,
            q1: inverse_spd(&(pair.k2.sym() + self.c.sigma1.sym()))?,
            q2: inverse_spd(&(pair.k2.sym() + self.c.sigma2.sym()))?,
            r01,
            r02,
            raw1,
            raw2,
        })
    }

    /// Supergradient for one blend:
    /// g1 = -μ0/2 (λ P1 + (1-λ) P2) + ν1/2 (P1 - P2)
    /// g2 = g1 + (ν1 + ν2)/2 (Q2 - Q1)
    fn gradient(&self, b: &Blocks, bl: Blend) -> Gradient {
        let common = &(&b.p1 * bl.lambda) + &(&b.p2 * (1.0 - bl.lambda));
        let g1 = &(&(&b.p1 - &b.p2) * (0.5 * bl.nu1)) + &(&common * (-0.5 * self.mu.0));
        let g2 = &g1 + &(&(&b.q2 - &b.q1) * (0.5 * (bl.nu1 + bl.nu2)));
        Gradient { g1, g2 }
    }

    /// Flags the blend weights sitting on a kink of the clamped objective:
    /// the common-rate tie and each confidential clamp at zero, within
    /// `band` relative to the overall rate scale. Only those weights are
    /// fitted; the rest follow the sign cases.
    fn kink_active(&self, b: &Blocks, band: f64) -> [bool; 3] {
        let (mu0, mu1, mu2) = self.mu;
        let scale = 1.0f64
            .max(b.r01.abs())
            .max(b.r02.abs())
            .max(b.raw1.abs())
            .max(b.raw2.abs());
        [
            mu0 > 0.0 && (b.r01 - b.r02).abs() <= band * scale,
            mu1 > 0.0 && b.raw1.abs() <= band * scale,
            mu2 > 0.0 && b.raw2.abs() <= band * scale,
        ]
    }

    /// Sign-case blend away from kinks; on a kink the previous accepted
    /// value seeds the fit.
    fn case_blend(&self, b: &Blocks, active: [bool; 3], prev: Blend) -> Blend {
        let (_, mu1, mu2) = self.mu;
        let lambda = if active[0] {
            prev.lambda.clamp(0.0, 1.0)
        } else if b.r01 > b.r02 {
            0.0
        } else {
            1.0
        };
        let nu1 = if active[1] {
            prev.nu1.clamp(0.0, mu1)
        } else if b.raw1 >= 0.0 {
            mu1
        } else {
            0.0
        };
        let nu2 = if active[2] {
            prev.nu2.clamp(0.0, mu2)
        } else if b.raw2 >= 0.0 {
            mu2
        } else {
            0.0
        };
        Blend { lambda, nu1, nu2 }
    }
}

fn deterministic_inits(s: &PsdMatrix) -> Vec<CovariancePair> {
    let half = &(s.sym() * 0.5);
    let zero = PsdMatrix::zeros(s.dim());
    let half = PsdMatrix::new(crate::linalg::psd_clip(half)).expect("half cap is psd");
    vec![
        CovariancePair::new(zero.clone(), zero.clone()).expect("dims match"),
        CovariancePair::new(half.clone(), half).expect("dims match"),
        CovariancePair::new(s.clone(), zero.clone()).expect("dims match"),
        CovariancePair::new(zero, s.clone()).expect("dims match"),
    ]
}

/// `s g s`: the ascent direction paired with the whitened-metric projection.
fn precondition(s: &SymMatrix, g: &SymMatrix) -> SymMatrix {
    SymMatrix::force_symmetric(&s.m * &g.m * &s.m)
}

/// Gradient with its preconditioned step blocks, fixed for one line search.
struct Direction {
    g: Gradient,
    d1: SymMatrix,
    d2: SymMatrix,
}

fn direction(obj: &Objective, b: &Blocks, bl: Blend) -> Direction {
    let g = obj.gradient(b, bl);
    let s = obj.c.s.sym();
    let d1 = precondition(s, &g.g1);
    let d2 = precondition(s, &g.g2);
    Direction { g, d1, d2 }
}

fn trial(obj: &Objective, pair: &CovariancePair, dir: &Direction, step: f64) -> Result<CovariancePair> {
    project_pair(
        &(pair.k1.sym() + &(&dir.d1 * step)),
        &(pair.k2.sym() + &(&dir.d2 * step)),
        &obj.c.s,
    )
}

/// Gap vector at the unit-step candidate for blend `bl`, one entry per
/// active kink. Zero exactly when the step lands back on that kink.
fn kink_gaps(
    obj: &Objective,
    b: &Blocks,
    pair: &CovariancePair,
    bl: Blend,
    active: [bool; 3],
) -> Result<Vec<f64>> {
    let dir = direction(obj, b, bl);
    let cand = trial(obj, pair, &dir, 1.0)?;
    let (r01, r02, raw1, raw2) = obj.branches(&cand)?;
    let mut gaps = Vec::new();
    if active[0] {
        gaps.push(r01 - r02);
    }
    if active[1] {
        gaps.push(raw1);
    }
    if active[2] {
        gaps.push(raw2);
    }
    Ok(gaps)
}

/// Fits the active blend weights so the unit step lands on its kinks. Each
/// weight is solved against its own post-step gap by a safeguarded scalar
/// root find (the gap can be strongly nonlinear across the weight's box, so
/// endpoint bracketing with regula falsi and bisection fallback is used
/// instead of a local Newton step), Gauss–Seidel over the active weights.
/// A weight whose gap never changes sign over its box takes the endpoint
/// the sign cases demand; a weight whose gap is already flat at zero (e.g.
/// a clamp pinned by the positivity face) is left alone. The blend is
/// returned as-is when an evaluation fails numerically.
fn refine_blend(
    obj: &Objective,
    b: &Blocks,
    pair: &CovariancePair,
    mut bl: Blend,
    active: [bool; 3],
) -> Blend {
    let (_, mu1, mu2) = obj.mu;
    let vars: Vec<usize> = (0..3).filter(|&v| active[v]).collect();
    if vars.is_empty() {
        return bl;
    }
    let read = |bl: &Blend, v: usize| match v {
        0 => bl.lambda,
        1 => bl.nu1,
        _ => bl.nu2,
    };
    let eval = |mut probe: Blend, v: usize, x: f64| -> Option<Vec<f64>> {
        match v {
            0 => probe.lambda = x,
            1 => probe.nu1 = x,
            _ => probe.nu2 = x,
        }
        kink_gaps(obj, b, pair, probe, active).ok()
    };
    let Ok(mut gaps) = kink_gaps(obj, b, pair, bl, active) else {
        return bl;
    };
    for _ in 0..BLEND_SWEEPS {
        for (row, &v) in vars.iter().enumerate() {
            if gaps[row].abs() <= GAP_TOL {
                continue;
            }
            let (lo, hi) = match v {
                0 => (0.0, 1.0),
                1 => (0.0, mu1),
                _ => (0.0, mu2),
            };
            if hi - lo <= 0.0 {
                continue;
            }
            let xc = read(&bl, v);
            let solved = (|| -> Option<(f64, Vec<f64>)> {
                let g_lo = if xc == lo { gaps.clone() } else { eval(bl, v, lo)? };
                let g_hi = if xc == hi { gaps.clone() } else { eval(bl, v, hi)? };
                let (f_lo, f_hi) = (g_lo[row], g_hi[row]);
                if f_lo == 0.0 {
                    return Some((lo, g_lo));
                }
                if f_hi == 0.0 {
                    return Some((hi, g_hi));
                }
                if (f_lo < 0.0) == (f_hi < 0.0) {
                    // No root inside the box: the kink does not pin this
                    // weight after all; take the sign-consistent endpoint.
                    // λ: persistent r01 > r02 means the min rides branch 2
                    // (λ = 0); a clamp gap persistently positive means the
                    // branch is strictly active (ν = μ).
                    let positive = f_lo > 0.0;
                    let pick_hi = match v {
                        0 => !positive,
                        _ => positive,
                    };
                    return Some(if pick_hi { (hi, g_hi) } else { (lo, g_lo) });
                }
                let (mut a, mut ga) = (lo, g_lo);
                let (mut c, mut gc) = (hi, g_hi);
                for it in 0..ROOT_ITERS {
                    let (fa, fc) = (ga[row], gc[row]);
                    let mut x = c - fc * (c - a) / (fc - fa);
                    let (inside_lo, inside_hi) = (a.min(c), a.max(c));
                    if it % 3 == 2 || !x.is_finite() || x <= inside_lo || x >= inside_hi {
                        x = 0.5 * (a + c);
                    }
                    let gx = eval(bl, v, x)?;
                    let fx = gx[row];
                    if fx == 0.0 {
                        return Some((x, gx));
                    }
                    if (fx < 0.0) == (fa < 0.0) {
                        a = x;
                        ga = gx;
                    } else {
                        c = x;
                        gc = gx;
                    }
                    if (a - c).abs() < 1e-13 || fx.abs() <= GAP_TOL {
                        break;
                    }
                }
                Some(if ga[row].abs() <= gc[row].abs() {
                    (a, ga)
                } else {
                    (c, gc)
                })
            })();
            let Some((x, gx)) = solved else {
                return bl;
            };
            match v {
                0 => bl.lambda = x,
                1 => bl.nu1 = x,
                _ => bl.nu2 = x,
            }
            gaps = gx;
        }
    }
    bl
}

enum Search {
    Stationary,
    Accepted(CovariancePair, f64),
    Exhausted,
}

/// Backtracking Armijo search along one blend direction. The unit-step move
/// doubles as the stationarity test: [`project_pair`] being the metric
/// projection in the `s`-whitened norm and steps preconditioned by
/// `s g s`, the projected move pairs positively with the raw supergradient
/// until the iterate is a fixed point of the projected-step map.
fn line_search(
    obj: &Objective,
    pair: &CovariancePair,
    value: f64,
    b: &Blocks,
    bl: Blend,
) -> Result<Search> {
    let dir = direction(obj, b, bl);
    let mut step = 1.0f64;
    while step >= MIN_STEP {
        let cand = trial(obj, pair, &dir, step)?;
        let move1 = cand.k1.sym() - pair.k1.sym();
        let move2 = cand.k2.sym() - pair.k2.sym();
        if step == 1.0 {
            let scale = (pair.k1.sym().fro_norm().powi(2) + pair.k2.sym().fro_norm().powi(2))
                .sqrt()
                .max(1.0);
            let moved = (move1.fro_norm().powi(2) + move2.fro_norm().powi(2)).sqrt();
            if moved <= STATIONARY_TOL * scale {
                return Ok(Search::Stationary);
            }
        }
        let delta = dot(&dir.g.g1, &move1) + dot(&dir.g.g2, &move2);
        match obj.value(&cand) {
            Ok(v) if delta > 0.0 && v >= value + ARMIJO_C1 * delta && v.is_finite() => {
                return Ok(Search::Accepted(cand, v));
            }
            _ => step *= 0.5,
        }
    }
    Ok(Search::Exhausted)
}

/// Projected ascent from one initial pair. Returns the final pair and its
/// objective.
///
/// Away from kinks this is plain preconditioned supergradient ascent with
/// backtracking. On a kink of the clamped objective (common rates tied, or
/// a confidential branch clamped at zero) the pure supergradients on either
/// side need not admit an uphill step, so the affected blend weights are
/// fitted each iteration to land the step back on the kink, which is the
/// direction that tracks it. Stopping at a unit-step move below
/// [`STATIONARY_TOL`] (relative) is the KKT stationarity test; exhausting
/// the backtracking even through the kink fit (e.g. at the rounding floor)
/// is also normal termination. Only numerical failures are errors.
fn ascend(obj: &Objective, init: CovariancePair) -> Result<(CovariancePair, f64)> {
    let mut pair = init;
    let mut value = obj.value(&pair)?;
    let mut memory = Blend {
        lambda: 0.5,
        nu1: obj.mu.1,
        nu2: obj.mu.2,
    };

    for _ in 0..MAX_ITERS {
        let b = obj.blocks(&pair)?;
        let mut active = obj.kink_active(&b, KINK_BAND);
        let mut bl = obj.case_blend(&b, active, memory);
        if active.iter().any(|&a| a) {
            bl = refine_blend(obj, &b, &pair, bl, active);
        }
        let mut escalated = false;
        loop {
            match line_search(obj, &pair, value, &b, bl)? {
                Search::Stationary => return Ok((pair, value)),
                Search::Accepted(cand, v) => {
                    pair = cand;
                    value = v;
                    memory = bl;
                    break;
                }
                Search::Exhausted => {
                    if escalated {
                        return Ok((pair, value));
                    }
                    escalated = true;
                    let wide = obj.kink_active(&b, ESCALATION_BAND);
                    if wide == active {
                        return Ok((pair, value));
                    }
                    active = wide;
                    bl = obj.case_blend(&b, active, memory);
                    bl = refine_blend(obj, &b, &pair, bl, active);
                }
            }
        }
    }
    Ok((pair, value))
}

/// Best pair over all restarts in the canonical (order 12) frame.
///
/// A restart that fails numerically (e.g. a projection that cannot be made
/// feasible) is skipped; `NoProgress` is returned only when every restart
/// failed that way, leaving no usable iterate at all.
fn canonical_solve(
    c: &AlignedChannelSpec,
    mu: (f64, f64, f64),
    restarts: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CovariancePair> {
    let obj = Objective::new(c, mu)?;
    let fixed = deterministic_inits(&c.s);
    let mut best: Option<(CovariancePair, f64)> = None;
    for r in 0..restarts {
        let init = if r < fixed.len() {
            fixed[r].clone()
        } else {
            random_feasible_pair(rng, &c.s, (0.5, 1.0))
        };
        match ascend(&obj, init) {
            Ok((pair, value)) => {
                if best.as_ref().is_none_or(|(_, b)| value > *b) {
                    best = Some((pair, value));
                }
            }
            Err(_) => {}
        }
    }
    match best {
        Some((pair, _)) => Ok(pair),
        None => Err(Error::NoProgress),
    }
}

/// Maximizes the weighted secrecy objective for one encoding order.
///
/// Restarts begin from `(0, 0)`, the half-split `(S/2, S/2)`, the two
/// single-user corners, then scaled random feasible pairs; the best result
/// wins. An objective that admits no uphill step anywhere (e.g. pure
/// confidential weight on a channel where that user's rate is always
/// clamped at zero) converges at an initializer with the flat value rather
/// than erroring; `NoProgress` is returned only when every restart failed
/// numerically, which signals a spec or scaling pathology. A rank-deficient
/// input cap is handled by restricting to its range, solving there, and
/// lifting back.
pub fn maximize_weighted(
    w: &Weights,
    c: &AlignedChannelSpec,
    order: Order,
    restarts: usize,
    seed: u64,
) -> Result<BoundaryPoint> {
    if restarts == 0 {
        return Err(Error::Parse("restarts must be at least 1".into()));
    }
    let reduction = c.restrict_to_range_s()?;
    let pair = match &reduction {
        RangeReduction::Zero => CovariancePair::zeros(c.t()),
        RangeReduction::Full => solve_in_frame(c, w, order, restarts, seed)?,
        RangeReduction::Project { reduced, .. } => {
            let inner = solve_in_frame(reduced, w, order, restarts, seed)?;
            CovariancePair::new(
                reduction.lift(&inner.k1, c.t()),
                reduction.lift(&inner.k2, c.t()),
            )?
        }
    };
    finish(w, c, order, restarts, pair)
}

fn solve_in_frame(
    c: &AlignedChannelSpec,
    w: &Weights,
    order: Order,
    restarts: usize,
    seed: u64,
) -> Result<CovariancePair> {
    let mut rng = rng_from_seed(seed);
    match order {
        Order::Order12 => canonical_solve(c, (w.mu0, w.mu1, w.mu2), restarts, &mut rng),
        Order::Order21 => Ok(canonical_solve(
            &c.swapped(),
            (w.mu0, w.mu2, w.mu1),
            restarts,
            &mut rng,
        )?
        .swapped()),
    }
}

fn finish(
    w: &Weights,
    c: &AlignedChannelSpec,
    order: Order,
    restarts: usize,
    pair: CovariancePair,
) -> Result<BoundaryPoint> {
    let triple = rate_triple(&pair, &c.to_channel(), order)?;
    let objective = triple.weighted(w.mu0, w.mu1, w.mu2);
    let cert = fit_certificate(&pair, w, c, order)?;
    Ok(BoundaryPoint {
        weights: *w,
        pair,
        triple,
        objective,
        restarts_used: restarts,
        kkt_residual: cert.residual_stationarity,
    })
}

/// Solves both orders and reports `|obj12 − obj21| / max(1, |obj12|)`. The
/// capacity region does not depend on the encoding order, so this gap
/// measures solver consistency.
pub fn order_invariance_gap(
    w: &Weights,
    c: &AlignedChannelSpec,
    restarts: usize,
    seed: u64,
) -> Result<f64> {
    let a = maximize_weighted(w, c, Order::Order12, restarts, seed)?;
    let b = maximize_weighted(w, c, Order::Order21, restarts, seed)?;
    Ok((a.objective - b.objective).abs() / a.objective.abs().max(1.0))
}

/// Sweeps a weight grid in order, solving each point and continuing past
/// per-point failures.
pub fn trace_region(
    c: &AlignedChannelSpec,
    weights: &[Weights],
    order: Order,
    restarts: usize,
    seed: u64,
) -> Vec<Result<BoundaryPoint>> {
    weights
        .iter()
        .map(|w| maximize_weighted(w, c, order, restarts, seed))
        .collect()
}

/// Simplex weight grid with the given step: all `(i, j, n-i-j) / n` with
/// `n = round(1/step)`. Step 0.1 yields 66 weights.
pub fn simplex_weights(step: f64) -> Result<Vec<Weights>> {
    if !(step > 0.0 && step <= 1.0) || !step.is_finite() {
        return Err(Error::Parse(format!(
            "weight step must lie in (0, 1], got {step}"
        )));
    }
    let n = (1.0 / step).round() as usize;
    if n == 0 {
        return Err(Error::Parse("weight step too large".into()));
    }
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            out.push(Weights::new(
                i as f64 / n as f64,
                j as f64 / n as f64,
                k as f64 / n as f64,
            )?);
        }
    }
    Ok(out)
}

/// Result of solving a general (non-square or non-invertible) channel:
/// the aligned solve plus the secrecy cost of the alignment perturbation.
#[derive(Clone, Debug)]
pub struct GeneralSolve {
    pub point: BoundaryPoint,
    /// Upper bound on the extra leakage introduced by perturbing the
    /// squared-up gains before alignment.
    pub leakage_gap: f64,
    pub aligned: AlignedChannelSpec,
}

/// Solves a general channel by squaring up the gains, perturbing singular
/// values by `alpha`, aligning, and solving the aligned problem. The
/// reported rates are exact for the perturbed channel and within the
/// leakage gap of the original.
pub fn solve_general(
    ch: &ChannelSpec,
    w: &Weights,
    order: Order,
    restarts: usize,
    seed: u64,
    alpha: f64,
) -> Result<GeneralSolve> {
    let squared = square_up(ch);
    let perturbed = perturb(&squared, alpha)?;
    let aligned = align(&perturbed)?;
    let point = maximize_weighted(w, &aligned, order, restarts, seed)?;
    Ok(GeneralSolve {
        point,
        leakage_gap: crate::channel::leakage_gap(&squared, alpha)?,
        aligned,
    })
}
