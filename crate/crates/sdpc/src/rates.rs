//! Closed-form rate expressions for the two-user broadcast channel with a
//! common message and two confidential messages, together with the layered
//! Gaussian coding scheme and a checker that re-derives every rate from raw
//! mutual-information chains.
//!
//! All rates are in nats. Raw kernels (`common_rate`, `conf_rate_1`,
//! `conf_rate_2`) return unclamped values, which can be negative for
//! unhelpful covariance choices; the triple constructors clamp at zero,
//! since a user can always be silenced.

use nalgebra::DMatrix;

use crate::channel::{AlignedChannelSpec, ChannelSpec};
use crate::linalg::{
    inverse_spd, logdet, loewner_leq, psd_clip, PsdMatrix, RectMatrix, SymMatrix,
};
use crate::{Error, Result};

/// Tolerance for the covariance-cap feasibility check `K1 + K2 ⪯ S`,
/// relative to `max(1, ‖S - K1 - K2‖)`.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Relative tolerance for an auxiliary scheme's covariance bookkeeping.
pub const SCHEME_CONSISTENCY_TOL: f64 = 1e-9;

/// Dirty-paper encoding order for the two confidential messages.
///
/// `Order12`: user 1's signal is encoded first, user 2's codeword is
/// precoded against it, so user 2's rate sees no interference and depends
/// only on `K2`. `Order21` exchanges the roles.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Order12,
    Order21,
}

impl Order {
    pub fn swapped(self) -> Order {
        match self {
            Order::Order12 => Order::Order21,
            Order::Order21 => Order::Order12,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Order::Order12 => "12",
            Order::Order21 => "21",
        }
    }
}

impl std::str::FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Order> {
        match s {
            "12" => Ok(Order::Order12),
            "21" => Ok(Order::Order21),
            other => Err(Error::Parse(format!(
                "encoding order must be \"12\" or \"21\", got {other:?}"
            ))),
        }
    }
}

/// Per-user transmit covariances. `kc` is the optional dedicated
/// common-message layer used only by the power-constrained rate functions;
/// under the covariance cap the common layer is the leftover `S - K1 - K2`.
#[derive(Clone, Debug)]
pub struct CovariancePair {
    pub k1: PsdMatrix,
    pub k2: PsdMatrix,
    pub kc: Option<PsdMatrix>,
}

impl CovariancePair {
    pub fn new(k1: PsdMatrix, k2: PsdMatrix) -> Result<Self> {
        if k1.dim() != k2.dim() {
            return Err(Error::DimMismatch {
                left: k1.dim(),
                right: k2.dim(),
            });
        }
        Ok(CovariancePair { k1, k2, kc: None })
    }

    pub fn with_common(k1: PsdMatrix, k2: PsdMatrix, kc: PsdMatrix) -> Result<Self> {
        let mut pair = CovariancePair::new(k1, k2)?;
        if kc.dim() != pair.dim() {
            return Err(Error::DimMismatch {
                left: kc.dim(),
                right: pair.dim(),
            });
        }
        pair.kc = Some(kc);
        Ok(pair)
    }

    pub fn zeros(dim: usize) -> Self {
        CovariancePair {
            k1: PsdMatrix::zeros(dim),
            k2: PsdMatrix::zeros(dim),
            kc: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.k1.dim()
    }

    /// `K1 + K2`.
    pub fn sum(&self) -> SymMatrix {
        self.k1.sym() + self.k2.sym()
    }

    /// The pair with the user roles exchanged.
    pub fn swapped(&self) -> CovariancePair {
        CovariancePair {
            k1: self.k2.clone(),
            k2: self.k1.clone(),
            kc: self.kc.clone(),
        }
    }
}

/// One boundary-candidate rate triple, clamped to the nonnegative orthant.
#[derive(Copy, Clone, Debug)]
pub struct RateTriple {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub order: Order,
}

impl RateTriple {
    pub fn weighted(&self, mu0: f64, mu1: f64, mu2: f64) -> f64 {
        mu0 * self.r0 + mu1 * self.r1 + mu2 * self.r2
    }

    pub fn max_abs_diff(&self, other: &RateTriple) -> f64 {
        (self.r0 - other.r0)
            .abs()
            .max((self.r1 - other.r1).abs())
            .max((self.r2 - other.r2).abs())
    }
}

fn require_dim(pair: &CovariancePair, c: &ChannelSpec) -> Result<()> {
    if pair.dim() != c.t() {
        return Err(Error::DimMismatch {
            left: pair.dim(),
            right: c.t(),
        });
    }
    Ok(())
}

/// Checks `K1 + K2 ⪯ S` up to `FEASIBILITY_TOL`.
pub fn check_feasible(pair: &CovariancePair, s: &PsdMatrix) -> Result<()> {
    if pair.dim() != s.dim() {
        return Err(Error::DimMismatch {
            left: pair.dim(),
            right: s.dim(),
        });
    }
    if !loewner_leq(&pair.sum(), s.sym(), FEASIBILITY_TOL)? {
        return Err(Error::InfeasiblePair {
            reason: "k1 + k2 exceeds the input covariance cap s",
        });
    }
    Ok(())
}

fn ld(c: &ChannelSpec, j: usize, k: &SymMatrix) -> Result<f64> {
    logdet(&c.received_cov(j, k), 0.0)
}

fn ld_noise(c: &ChannelSpec, j: usize) -> Result<f64> {
    let sigma = if j == 1 { &c.sigma1 } else { &c.sigma2 };
    logdet(sigma, 0.0)
}

/// Common-message rate seen by user `j` under the covariance cap:
/// `½ ln(|H_j S H_j^T + Σ_j| / |H_j (K1+K2) H_j^T + Σ_j|)`. Unclamped;
/// nonnegative up to rounding whenever the pair is feasible.
pub fn common_rate(j: usize, pair: &CovariancePair, c: &ChannelSpec) -> Result<f64> {
    require_dim(pair, c)?;
    Ok(0.5 * (ld(c, j, c.s.sym())? - ld(c, j, &pair.sum())?))
}

/// Raw confidential rate of the first-encoded user (user 1 under order 12):
/// the gap between what user 1's receiver resolves above the interference
/// floor `K2` and what user 2's receiver resolves above the same floor.
pub fn conf_rate_1(pair: &CovariancePair, c: &ChannelSpec) -> Result<f64> {
    require_dim(pair, c)?;
    let t = pair.sum();
    let own = ld(c, 1, &t)? - ld(c, 1, pair.k2.sym())?;
    let leaked = ld(c, 2, &t)? - ld(c, 2, pair.k2.sym())?;
    Ok(0.5 * (own - leaked))
}

/// Raw confidential rate of the precoded user (user 2 under order 12):
/// interference-free at its own receiver, penalized by what user 1's
/// receiver learns about `K2`.
pub fn conf_rate_2(k2: &PsdMatrix, c: &ChannelSpec) -> Result<f64> {
    if k2.dim() != c.t() {
        return Err(Error::DimMismatch {
            left: k2.dim(),
            right: c.t(),
        });
    }
    let own = ld(c, 2, k2.sym())? - ld_noise(c, 2)?;
    let leaked = ld(c, 1, k2.sym())? - ld_noise(c, 1)?;
    Ok(0.5 * (own - leaked))
}

/// Boundary-candidate triple for a feasible pair under the covariance cap.
/// `r0` takes the weaker user's common rate; the confidential rates follow
/// the encoding order. Order 21 evaluates the order-12 expressions on the
/// role-swapped channel, so the swap symmetry is exact in floating point.
pub fn rate_triple(pair: &CovariancePair, c: &ChannelSpec, order: Order) -> Result<RateTriple> {
    require_dim(pair, c)?;
    if pair.kc.is_some() {
        return Err(Error::InfeasiblePair {
            reason: "dedicated common layer kc requires the power-constrained rate functions",
        });
    }
    check_feasible(pair, &c.s)?;
    let r0 = common_rate(1, pair, c)?.min(common_rate(2, pair, c)?);
    let (r1, r2) = match order {
        Order::Order12 => (conf_rate_1(pair, c)?, conf_rate_2(&pair.k2, c)?),
        Order::Order21 => {
            let cs = c.swapped();
            let ps = pair.swapped();
            (conf_rate_2(&pair.k1, &cs)?, conf_rate_1(&ps, &cs)?)
        }
    };
    Ok(RateTriple {
        r0: r0.max(0.0),
        r1: r1.max(0.0),
        r2: r2.max(0.0),
        order,
    })
}

/// Power-constrained variant: the common message rides on a dedicated layer
/// `kc` and the constraint is `tr(K1 + K2 + Kc) ≤ power` instead of a
/// covariance cap. Confidential rates are unchanged; the common rate is
/// `½ ln(|H_j (K1+K2+Kc) H_j^T + Σ_j| / |H_j (K1+K2) H_j^T + Σ_j|)`.
pub fn power_rate_triple(
    pair: &CovariancePair,
    c: &ChannelSpec,
    order: Order,
    power: f64,
) -> Result<RateTriple> {
    require_dim(pair, c)?;
    let kc = pair
        .kc
        .clone()
        .unwrap_or_else(|| PsdMatrix::zeros(pair.dim()));
    let total = &pair.sum() + kc.sym();
    let trace = total.trace();
    if trace > power + 1e-9 * power.max(1.0) {
        return Err(Error::PowerExceeded {
            trace,
            budget: power,
        });
    }
    let t = pair.sum();
    let r0 = [1, 2]
        .into_iter()
        .map(|j| -> Result<f64> { Ok(0.5 * (ld(c, j, &total)? - ld(c, j, &t)?)) })
        .try_fold(f64::INFINITY, |acc, r| Ok(acc.min(r?)))?;
    let (r1, r2) = match order {
        Order::Order12 => (conf_rate_1(pair, c)?, conf_rate_2(&pair.k2, c)?),
        Order::Order21 => {
            let cs = c.swapped();
            let ps = pair.swapped();
            (conf_rate_2(&pair.k1, &cs)?, conf_rate_1(&ps, &cs)?)
        }
    };
    Ok(RateTriple {
        r0: r0.max(0.0),
        r1: r1.max(0.0),
        r2: r2.max(0.0),
        order,
    })
}

/// Rates of the same layered scheme without the secrecy penalties, on an
/// aligned channel. The first-encoded user decodes with the other layer as
/// interference; the precoded user is interference-free.
pub fn ns_rate_triple(
    pair: &CovariancePair,
    c: &AlignedChannelSpec,
    order: Order,
) -> Result<RateTriple> {
    if pair.dim() != c.t() {
        return Err(Error::DimMismatch {
            left: pair.dim(),
            right: c.t(),
        });
    }
    check_feasible(pair, &c.s)?;
    let t = pair.sum();
    let ld_plus = |sigma: &PsdMatrix, k: &SymMatrix| -> Result<f64> {
        logdet(&PsdMatrix::new(k + sigma.sym())?, 0.0)
    };
    let r0 = [&c.sigma1, &c.sigma2]
        .into_iter()
        .map(|sigma| -> Result<f64> {
            Ok(0.5 * (ld_plus(sigma, c.s.sym())? - ld_plus(sigma, &t)?))
        })
        .try_fold(f64::INFINITY, |acc, r| Ok(acc.min(r?)))?;
    let (r1, r2) = match order {
        Order::Order12 => (
            0.5 * (ld_plus(&c.sigma1, &t)? - ld_plus(&c.sigma1, pair.k2.sym())?),
            0.5 * (ld_plus(&c.sigma2, pair.k2.sym())? - logdet(&c.sigma2, 0.0)?),
        ),
        Order::Order21 => (
            0.5 * (ld_plus(&c.sigma1, pair.k1.sym())? - logdet(&c.sigma1, 0.0)?),
            0.5 * (ld_plus(&c.sigma2, &t)? - ld_plus(&c.sigma2, pair.k1.sym())?),
        ),
    };
    Ok(RateTriple {
        r0: r0.max(0.0),
        r1: r1.max(0.0),
        r2: r2.max(0.0),
        order,
    })
}

/// Dirty-paper precoding matrix for the interference-free user under order
/// 12: `A = K2 H2^T (Σ2 + H2 K2 H2^T)^{-1} H2`. For order 21 call with the
/// role-swapped channel and `k1`.
pub fn precoder(k2: &PsdMatrix, c: &ChannelSpec) -> Result<RectMatrix> {
    if k2.dim() != c.t() {
        return Err(Error::DimMismatch {
            left: k2.dim(),
            right: c.t(),
        });
    }
    let recv = c.received_cov(2, k2.sym());
    let inv = inverse_spd(recv.sym())?;
    let h2 = c.h2.as_dmatrix();
    let a = k2.sym().as_dmatrix() * h2.transpose() * inv.as_dmatrix() * h2;
    RectMatrix::new(a)
}

/// The layered Gaussian coding scheme behind `rate_triple`: independent
/// layers `U0` (common), `U1`, `U2` (confidential), transmit signal
/// `X = U0 + U1 + U2`, and a dirty-paper precoder folding the first-encoded
/// layer into the other user's auxiliary.
#[derive(Clone, Debug)]
pub struct AuxiliaryScheme {
    pub cov_u0: PsdMatrix,
    pub cov_u1: PsdMatrix,
    pub cov_u2: PsdMatrix,
    pub precoder_a: RectMatrix,
    pub order: Order,
}

impl AuxiliaryScheme {
    /// Builds the scheme realizing `rate_triple(pair, c, order)`: the common
    /// layer takes the leftover `S - K1 - K2` and the precoder is matched to
    /// the interference floor.
    pub fn for_pair(pair: &CovariancePair, c: &ChannelSpec, order: Order) -> Result<Self> {
        require_dim(pair, c)?;
        check_feasible(pair, &c.s)?;
        let leftover = c.s.sym() - &pair.sum();
        let cov_u0 = PsdMatrix::new(psd_clip(&leftover))?;
        let precoder_a = match order {
            Order::Order12 => precoder(&pair.k2, c)?,
            Order::Order21 => precoder(&pair.k1, &c.swapped())?,
        };
        Ok(AuxiliaryScheme {
            cov_u0,
            cov_u1: pair.k1.clone(),
            cov_u2: pair.k2.clone(),
            precoder_a,
            order,
        })
    }

    pub fn pair(&self) -> Result<CovariancePair> {
        CovariancePair::new(self.cov_u1.clone(), self.cov_u2.clone())
    }
}

/// Side-by-side comparison of the closed-form rates and the rates recovered
/// from Gaussian mutual-information chains for the same scheme.
#[derive(Clone, Debug)]
pub struct AchievabilityReport {
    pub mi_rates: RateTriple,
    pub closed_form: RateTriple,
    pub max_abs_gap: f64,
}

/// Joint Gaussian source over the base vector `Z = (U0, U1, U2, N1, N2)`;
/// every signal of interest is a linear map of `Z`. A small diagonal jitter
/// on the layer blocks keeps every joint covariance invertible without
/// moving any mutual information by more than ~1e-11.
struct JointGaussian {
    cov: DMatrix<f64>,
}

impl JointGaussian {
    fn logdet_cov(&self, map: &DMatrix<f64>) -> Result<f64> {
        let cov = SymMatrix::force_symmetric(map * &self.cov * map.transpose());
        crate::linalg::ld_spd(&cov)
    }

    /// `I(P; Q | R)` with `R` possibly empty (zero-row map).
    fn conditional_mi(
        &self,
        p: &DMatrix<f64>,
        q: &DMatrix<f64>,
        r: &DMatrix<f64>,
    ) -> Result<f64> {
        let pr = vstack(&[p, r]);
        let qr = vstack(&[q, r]);
        let pqr = vstack(&[p, q, r]);
        let mut v = self.logdet_cov(&pr)? + self.logdet_cov(&qr)? - self.logdet_cov(&pqr)?;
        if r.nrows() > 0 {
            v -= self.logdet_cov(r)?;
        }
        Ok(0.5 * v)
    }
}

fn vstack(mats: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let cols = mats.iter().map(|m| m.ncols()).max().unwrap_or(0);
    let rows: usize = mats.iter().map(|m| m.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for m in mats {
        out.view_mut((at, 0), (m.nrows(), cols)).copy_from(*m);
        at += m.nrows();
    }
    out
}

/// Re-derives the scheme's rate triple from first principles and compares
/// it with the closed forms.
///
/// The common rate is `min_j I(U0; Y_j)`; each confidential rate is the
/// coding rate minus the secrecy penalty,
/// `I(V_i; Y_i | U0) - I(V_i; Y_j, V_j | U0)`, where `V_i` are the
/// dirty-paper auxiliaries (`V_first = U_first + U0`,
/// `V_clean = U_clean + A U_first + U0`). No precoding identity is assumed:
/// every term is evaluated directly on the joint Gaussian law.
pub fn achievability_check(
    scheme: &AuxiliaryScheme,
    c: &ChannelSpec,
) -> Result<AchievabilityReport> {
    let t = c.t();
    for cov in [&scheme.cov_u0, &scheme.cov_u1, &scheme.cov_u2] {
        if cov.dim() != t {
            return Err(Error::DimMismatch {
                left: cov.dim(),
                right: t,
            });
        }
    }
    if scheme.precoder_a.rows() != t || scheme.precoder_a.cols() != t {
        return Err(Error::DimMismatch {
            left: scheme.precoder_a.rows(),
            right: t,
        });
    }
    let total = &(scheme.cov_u0.sym() + scheme.cov_u1.sym()) + scheme.cov_u2.sym();
    let deviation = (&total - c.s.sym()).max_abs();
    if deviation > SCHEME_CONSISTENCY_TOL * c.s.sym().max_abs().max(1.0) {
        return Err(Error::InconsistentScheme { deviation });
    }

    let closed_form = rate_triple(&scheme.pair()?, c, scheme.order)?;

    let (r1, r2) = (c.r1(), c.r2());
    let dim = 3 * t + r1 + r2;
    let mut cov = DMatrix::zeros(dim, dim);
    let trace_scale = (scheme.cov_u0.trace() + scheme.cov_u1.trace() + scheme.cov_u2.trace())
        / (3.0 * t as f64);
    let jitter = 1e-12 * trace_scale.max(1.0);
    let layers = [&scheme.cov_u0, &scheme.cov_u1, &scheme.cov_u2];
    for (b, layer) in layers.iter().enumerate() {
        let mut block = layer.sym().as_dmatrix().clone();
        for i in 0..t {
            block[(i, i)] += jitter;
        }
        cov.view_mut((b * t, b * t), (t, t)).copy_from(&block);
    }
    cov.view_mut((3 * t, 3 * t), (r1, r1))
        .copy_from(c.sigma1.sym().as_dmatrix());
    cov.view_mut((3 * t + r1, 3 * t + r1), (r2, r2))
        .copy_from(c.sigma2.sym().as_dmatrix());
    let joint = JointGaussian { cov };

    // Linear maps of Z = (U0, U1, U2, N1, N2).
    let block_map = |blocks: &[(usize, &DMatrix<f64>)], rows: usize| -> DMatrix<f64> {
        let starts = [0, t, 2 * t, 3 * t, 3 * t + r1];
        let mut m = DMatrix::zeros(rows, dim);
        for (b, part) in blocks {
            m.view_mut((0, starts[*b]), (rows, part.ncols()))
                .copy_from(*part);
        }
        m
    };
    let eye_t = DMatrix::<f64>::identity(t, t);
    let eye_r1 = DMatrix::<f64>::identity(r1, r1);
    let eye_r2 = DMatrix::<f64>::identity(r2, r2);
    let a = scheme.precoder_a.as_dmatrix();

    let map_u = block_map(&[(0, &eye_t)], t);
    let map_y1 = block_map(
        &[
            (0, c.h1.as_dmatrix()),
            (1, c.h1.as_dmatrix()),
            (2, c.h1.as_dmatrix()),
            (3, &eye_r1),
        ],
        r1,
    );
    let map_y2 = block_map(
        &[
            (0, c.h2.as_dmatrix()),
            (1, c.h2.as_dmatrix()),
            (2, c.h2.as_dmatrix()),
            (4, &eye_r2),
        ],
        r2,
    );
    let (map_v1, map_v2) = match scheme.order {
        Order::Order12 => (
            block_map(&[(0, &eye_t), (1, &eye_t)], t),
            block_map(&[(0, &eye_t), (1, a), (2, &eye_t)], t),
        ),
        Order::Order21 => (
            block_map(&[(0, &eye_t), (1, &eye_t), (2, a)], t),
            block_map(&[(0, &eye_t), (2, &eye_t)], t),
        ),
    };

    let empty = DMatrix::<f64>::zeros(0, dim);
    let r0_mi = joint
        .conditional_mi(&map_u, &map_y1, &empty)?
        .min(joint.conditional_mi(&map_u, &map_y2, &empty)?);
    let y2_v2 = vstack(&[&map_y2, &map_v2]);
    let y1_v1 = vstack(&[&map_y1, &map_v1]);
    let r1_mi = joint.conditional_mi(&map_v1, &map_y1, &map_u)?
        - joint.conditional_mi(&map_v1, &y2_v2, &map_u)?;
    let r2_mi = joint.conditional_mi(&map_v2, &map_y2, &map_u)?
        - joint.conditional_mi(&map_v2, &y1_v1, &map_u)?;
    let mi_rates = RateTriple {
        r0: r0_mi.max(0.0),
        r1: r1_mi.max(0.0),
        r2: r2_mi.max(0.0),
        order: scheme.order,
    };

    Ok(AchievabilityReport {
        max_abs_gap: mi_rates.max_abs_diff(&closed_form),
        mi_rates,
        closed_form,
    })
}
