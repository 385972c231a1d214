//! Channel enhancement: constructs the enhanced noise covariance implied by
//! a stationarity certificate, verifies the identities that make it a valid
//! converse device, and evaluates the matching upper bound and extremal
//! inequality gap.

use crate::channel::AlignedChannelSpec;
use crate::kkt::KktCertificate;
use crate::linalg::{inverse_spd, ld_spd, loewner_leq, PsdMatrix, SymMatrix};
use crate::rates::{CovariancePair, Order};
use crate::solver::Weights;
use crate::{Error, Result};

/// Enhanced channel built at a certified boundary pair. All stored objects
/// live in the canonical frame where the first-encoded user is user 1; an
/// order-21 input is swapped on construction and swapped back on reporting.
#[derive(Clone, Debug)]
pub struct Enhancement {
    /// Enhanced noise: `[(K2 + Σ2)^{-1} + M2/(μ1+μ2)]^{-1} − K2`.
    pub sigma_tilde: PsdMatrix,
    /// Encoding order of the certified point, in the caller's frame.
    pub order: Order,
    /// Branch weight of the certificate, canonical frame.
    pub lambda: f64,
    mu: (f64, f64, f64),
    m1: SymMatrix,
    c: AlignedChannelSpec,
    pair: CovariancePair,
}

/// Frobenius residuals of the four enhancement identities. All are zero at
/// an exact certificate; at a fitted one they inherit its residuals.
#[derive(Copy, Clone, Debug)]
pub struct EnhancementResiduals {
    /// Positive part of the largest eigenvalue of `Σ̃ − Σj`, worst user:
    /// the enhanced noise must be dominated by both true noises.
    pub dominance: f64,
    /// `‖μ'(T+Σ̃)^{-1} − μ'(T+Σ1)^{-1} − M1‖_F / (μ0+μ1+μ2)`: the
    /// certificate's first equation collapses onto the enhanced noise.
    pub stationarity: f64,
    /// `‖(K2+Σ̃)^{-1}Σ̃ − (K2+Σ2)^{-1}Σ2‖_F`: the clean user's
    /// signal-to-total ratio is preserved.
    pub clean_invariance: f64,
    /// `‖(T+Σ̃)^{-1}(K2+Σ̃) − (T+Σ1)^{-1}(K2+Σ1)‖_F`: the interfered
    /// user's layer ratio is preserved.
    pub interference_invariance: f64,
}

impl EnhancementResiduals {
    pub fn max(&self) -> f64 {
        self.dominance
            .max(self.stationarity)
            .max(self.clean_invariance)
            .max(self.interference_invariance)
    }
}

/// Builds the enhancement at a certified pair. Requires `μ1 + μ2 > 0`: with
/// no confidential weight the enhanced noise is undefined.
pub fn construct_enhanced(
    pair: &CovariancePair,
    cert: &KktCertificate,
    w: &Weights,
    c: &AlignedChannelSpec,
) -> Result<Enhancement> {
    if w.mu1 + w.mu2 == 0.0 {
        return Err(Error::DegenerateWeights {
            reason: "enhancement needs a nonzero confidential weight",
        });
    }
    if pair.dim() != c.t() {
        return Err(Error::DimMismatch {
            left: pair.dim(),
            right: c.t(),
        });
    }
    // Canonicalize: order 21 swaps users, multipliers, and the branch weight.
    let (mu, cc, cp, m1, m2, lambda) = match cert.order {
        Order::Order12 => (
            (w.mu0, w.mu1, w.mu2),
            c.clone(),
            pair.clone(),
            cert.m1.sym().clone(),
            cert.m2.sym().clone(),
            cert.lambda,
        ),
        Order::Order21 => (
            (w.mu0, w.mu2, w.mu1),
            c.swapped(),
            pair.swapped(),
            cert.m2.sym().clone(),
            cert.m1.sym().clone(),
            1.0 - cert.lambda,
        ),
    };
    let mup = mu.1 + mu.2;
    let q2 = inverse_spd(&(cp.k2.sym() + cc.sigma2.sym()))?;
    let inner = &q2 + &(&m2 * (1.0 / mup));
    let sigma_tilde = &inverse_spd(&inner)? - cp.k2.sym();
    let sigma_tilde = PsdMatrix::new(crate::linalg::psd_clip(&sigma_tilde))?;
    Ok(Enhancement {
        sigma_tilde,
        order: cert.order,
        lambda,
        mu,
        m1,
        c: cc,
        pair: cp,
    })
}

impl Enhancement {
    /// Checks the four identities the enhanced noise must satisfy.
    pub fn verify(&self) -> Result<EnhancementResiduals> {
        let (mu0, mu1, mu2) = self.mu;
        let mup = mu1 + mu2;
        let st = self.sigma_tilde.sym();
        let t = self.pair.sum();
        let k2 = self.pair.k2.sym();

        let dominance = [&self.c.sigma1, &self.c.sigma2]
            .iter()
            .map(|sig| (st - sig.sym()).eigen().max().max(0.0))
            .fold(0.0f64, f64::max);

        let it_tilde = inverse_spd(&(&t + st))?;
        let it1 = inverse_spd(&(&t + self.c.sigma1.sym()))?;
        let stationarity = (&(&(&it_tilde - &it1) * mup) - &self.m1).fro_norm()
            / (mu0 + mu1 + mu2);

        let ik_tilde = inverse_spd(&(k2 + st))?;
        let ik2 = inverse_spd(&(k2 + self.c.sigma2.sym()))?;
        let clean_invariance = (ik_tilde.as_dmatrix() * st.as_dmatrix()
            - ik2.as_dmatrix() * self.c.sigma2.sym().as_dmatrix())
        .norm();

        let k2s1 = k2 + self.c.sigma1.sym();
        let interference_invariance = (it_tilde.as_dmatrix() * (k2 + st).as_dmatrix()
            - it1.as_dmatrix() * k2s1.as_dmatrix())
        .norm();

        Ok(EnhancementResiduals {
            dominance,
            stationarity,
            clean_invariance,
            interference_invariance,
        })
    }

    /// Weighted upper bound certified by the enhancement: the common term
    /// on the true noises plus the enhanced-channel secrecy bounds. At an
    /// exact certificate this equals the achieved weighted objective.
    pub fn converse_value(&self) -> Result<f64> {
        let (mu0, mu1, mu2) = self.mu;
        let st = self.sigma_tilde.sym();
        let t = self.pair.sum();
        let ld_t_tilde = ld_spd(&(&t + st))?;
        let ld_tilde = ld_spd(st)?;
        let ld_t1 = ld_spd(&(&t + self.c.sigma1.sym()))?;
        let ld_t2 = ld_spd(&(&t + self.c.sigma2.sym()))?;
        let ld_s1 = ld_spd(&(self.c.s.sym() + self.c.sigma1.sym()))?;
        let ld_s2 = ld_spd(&(self.c.s.sym() + self.c.sigma2.sym()))?;
        let ld_sig1 = ld_spd(self.c.sigma1.sym())?;
        let ld_sig2 = ld_spd(self.c.sigma2.sym())?;

        let r01 = 0.5 * (ld_s1 - ld_t1);
        let r02 = 0.5 * (ld_s2 - ld_t2);
        let bound1 = 0.5 * (ld_t_tilde + ld_sig2 - ld_t2 - ld_tilde);
        let bound2 = 0.5 * (ld_t_tilde + ld_sig1 - ld_t1 - ld_tilde);
        Ok(mu0 * r01.min(r02) + mu1 * bound1 + mu2 * bound2)
    }

    /// Gap of the extremal inequality at auxiliary covariance `q`:
    /// `LHS(T) − LHS(Q)` with
    /// `LHS(Q) = β h(Q, Σ̃) − γ1 h(Q, Σ1) − γ2 h(Q, Σ2)`,
    /// `β = μ1+μ2`, `γ1 = μ0λ+μ2`, `γ2 = μ0λ̄+μ1`, and `h` the Gaussian
    /// entropy with that noise added. Nonnegative for every `0 ⪯ Q ⪯ S`
    /// exactly when the certified pair maximizes the weighted objective.
    pub fn extremal_gap(&self, q: &PsdMatrix) -> Result<f64> {
        if q.dim() != self.c.t() {
            return Err(Error::DimMismatch {
                left: q.dim(),
                right: self.c.t(),
            });
        }
        if !loewner_leq(q.sym(), self.c.s.sym(), 1e-8)? {
            return Err(Error::InvalidAux);
        }
        let lhs = |x: &SymMatrix| -> Result<f64> {
            let (mu0, mu1, mu2) = self.mu;
            let beta = mu1 + mu2;
            let gamma1 = mu0 * self.lambda + mu2;
            let gamma2 = mu0 * (1.0 - self.lambda) + mu1;
            let tdim = self.c.t() as f64;
            let h = |sigma: &SymMatrix| -> Result<f64> {
                let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
                Ok(0.5 * tdim * two_pi_e.ln() + 0.5 * ld_spd(&(x + sigma))?)
            };
            Ok(beta * h(self.sigma_tilde.sym())?
                - gamma1 * h(self.c.sigma1.sym())?
                - gamma2 * h(self.c.sigma2.sym())?)
        };
        Ok(lhs(&self.pair.sum())? - lhs(q.sym())?)
    }

    /// Outer-bound rate triple at auxiliary covariance `q`, reported in the
    /// caller's user order: the common rate from the true noises and the
    /// confidential rates from the enhanced noise, clamped at zero.
    pub fn gaussian_outer_bound_value(&self, q: &PsdMatrix) -> Result<(f64, f64, f64)> {
        if q.dim() != self.c.t() {
            return Err(Error::DimMismatch {
                left: q.dim(),
                right: self.c.t(),
            });
        }
        if !loewner_leq(q.sym(), self.c.s.sym(), 1e-8)? {
            return Err(Error::InvalidAux);
        }
        let st = self.sigma_tilde.sym();
        let ld_q_tilde = ld_spd(&(q.sym() + st))?;
        let ld_tilde = ld_spd(st)?;
        let ld_q1 = ld_spd(&(q.sym() + self.c.sigma1.sym()))?;
        let ld_q2 = ld_spd(&(q.sym() + self.c.sigma2.sym()))?;
        let r0 = (0.5 * (ld_spd(&(self.c.s.sym() + self.c.sigma1.sym()))? - ld_q1)).min(
            0.5 * (ld_spd(&(self.c.s.sym() + self.c.sigma2.sym()))? - ld_q2),
        );
        let r1 = (0.5 * (ld_q_tilde - ld_tilde - ld_q2 + ld_spd(self.c.sigma2.sym())?)).max(0.0);
        let r2 = (0.5 * (ld_q_tilde - ld_tilde - ld_q1 + ld_spd(self.c.sigma1.sym())?)).max(0.0);
        let r0 = r0.max(0.0);
        Ok(match self.order {
            Order::Order12 => (r0, r1, r2),
            Order::Order21 => (r0, r2, r1),
        })
    }
}
