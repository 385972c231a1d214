//! Channel specifications, the aligned sub-class, the square-up / perturb /
//! align reduction to equal antenna counts, and the residual-leakage bound
//! for the perturbed channel.
//!
//! # Channel-spec document format
//!
//! A spec is a plain-text document of `key = numbers` fields. `#` starts a
//! comment that runs to the end of the line. A field's numbers may continue
//! over following lines until the next `key =`. Numbers are decimal with an
//! optional exponent (`1.5`, `2e-3`); matrices are written row-major.
//!
//! ```text
//! # 2x2 aligned channel
//! t      = 2
//! sigma1 = 1.0 0.0
//!          0.0 1.0
//! sigma2 = 2.0 0.0  0.0 2.0
//! s      = 3.0 0.0  0.0 3.0
//! ```
//!
//! Required fields: `t`, `sigma1`, `sigma2`, `s`. General channels add `h1`
//! and `h2` (both or neither) and optionally `r1`, `r2` (receive dimensions,
//! default `t`). `sigma_j` is `r_j x r_j`, `h_j` is `r_j x t`, `s` is
//! `t x t`. Aligned specs omit `h1`/`h2` and require `r1 = r2 = t`.

use nalgebra::DMatrix;

use crate::linalg::{self, inv_sqrt_spd, inverse_spd, PsdMatrix, RectMatrix, SymMatrix, EPS_PSD};
use crate::{Error, Result};

/// Geometric grid of perturbation sizes used by leakage sweeps.
pub const ALPHA_GRID: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Two-user broadcast channel: `Y_j = H_j X + N_j` with `N_j ~ N(0, Σ_j)`
/// and input covariance capped by `S`.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    pub h1: RectMatrix,
    pub h2: RectMatrix,
    pub sigma1: PsdMatrix,
    pub sigma2: PsdMatrix,
    pub s: PsdMatrix,
}

fn require_strictly_pd(sigma: &PsdMatrix) -> Result<()> {
    if !sigma.is_strictly_pd() {
        let e = sigma.sym().eigen();
        return Err(Error::SingularMatrix {
            min_eig: e.min(),
            threshold: EPS_PSD * e.spectral_norm().max(1.0),
        });
    }
    Ok(())
}

impl ChannelSpec {
    pub fn new(
        h1: RectMatrix,
        h2: RectMatrix,
        sigma1: PsdMatrix,
        sigma2: PsdMatrix,
        s: PsdMatrix,
    ) -> Result<Self> {
        let t = s.dim();
        for h in [&h1, &h2] {
            if h.cols() != t {
                return Err(Error::DimMismatch {
                    left: h.cols(),
                    right: t,
                });
            }
        }
        if sigma1.dim() != h1.rows() {
            return Err(Error::DimMismatch {
                left: sigma1.dim(),
                right: h1.rows(),
            });
        }
        if sigma2.dim() != h2.rows() {
            return Err(Error::DimMismatch {
                left: sigma2.dim(),
                right: h2.rows(),
            });
        }
        require_strictly_pd(&sigma1)?;
        require_strictly_pd(&sigma2)?;
        Ok(ChannelSpec {
            h1,
            h2,
            sigma1,
            sigma2,
            s,
        })
    }

    /// Transmit dimension.
    pub fn t(&self) -> usize {
        self.s.dim()
    }

    pub fn r1(&self) -> usize {
        self.h1.rows()
    }

    pub fn r2(&self) -> usize {
        self.h2.rows()
    }

    pub fn is_square(&self) -> bool {
        self.r1() == self.t() && self.r2() == self.t()
    }

    /// The same channel with the user roles exchanged.
    pub fn swapped(&self) -> ChannelSpec {
        ChannelSpec {
            h1: self.h2.clone(),
            h2: self.h1.clone(),
            sigma1: self.sigma2.clone(),
            sigma2: self.sigma1.clone(),
            s: self.s.clone(),
        }
    }

    /// Received covariance `H_j K H_j^T + Σ_j` for user `j` (1 or 2).
    pub fn received_cov(&self, j: usize, k: &SymMatrix) -> PsdMatrix {
        let (h, sigma) = match j {
            1 => (&self.h1, &self.sigma1),
            2 => (&self.h2, &self.sigma2),
            _ => panic!("user index must be 1 or 2"),
        };
        let m = &k.congruence(h.as_dmatrix()) + sigma.sym();
        PsdMatrix::new(m).expect("congruence of PSD plus strictly PD noise is PSD")
    }
}

/// Aligned channel: both gains are the identity, so receivers differ only in
/// noise covariance.
#[derive(Clone, Debug)]
pub struct AlignedChannelSpec {
    pub sigma1: PsdMatrix,
    pub sigma2: PsdMatrix,
    pub s: PsdMatrix,
}

impl AlignedChannelSpec {
    pub fn new(sigma1: PsdMatrix, sigma2: PsdMatrix, s: PsdMatrix) -> Result<Self> {
        let t = s.dim();
        if sigma1.dim() != t {
            return Err(Error::DimMismatch {
                left: sigma1.dim(),
                right: t,
            });
        }
        if sigma2.dim() != t {
            return Err(Error::DimMismatch {
                left: sigma2.dim(),
                right: t,
            });
        }
        require_strictly_pd(&sigma1)?;
        require_strictly_pd(&sigma2)?;
        Ok(AlignedChannelSpec { sigma1, sigma2, s })
    }

    pub fn scalar(sigma1: f64, sigma2: f64, s: f64) -> Result<Self> {
        Self::new(
            PsdMatrix::scalar(sigma1),
            PsdMatrix::scalar(sigma2),
            PsdMatrix::scalar(s),
        )
    }

    pub fn t(&self) -> usize {
        self.s.dim()
    }

    pub fn swapped(&self) -> AlignedChannelSpec {
        AlignedChannelSpec {
            sigma1: self.sigma2.clone(),
            sigma2: self.sigma1.clone(),
            s: self.s.clone(),
        }
    }

    /// View as a general channel with identity gains.
    pub fn to_channel(&self) -> ChannelSpec {
        ChannelSpec {
            h1: RectMatrix::identity(self.t()),
            h2: RectMatrix::identity(self.t()),
            sigma1: self.sigma1.clone(),
            sigma2: self.sigma2.clone(),
            s: self.s.clone(),
        }
    }

    /// Restricts the problem to the range of `s` when `s` is singular.
    ///
    /// Feasible covariances live in range(`s`), and for any `K = Q K' Q^T`
    /// supported there, every rate determinant ratio satisfies
    /// `|K + Σ| / |Σ| = |K' + Σ'| / |Σ'|` with `Σ' = (Q^T Σ^{-1} Q)^{-1}`,
    /// so the reduced problem reproduces original-coordinate rates exactly.
    pub fn restrict_to_range_s(&self) -> Result<RangeReduction> {
        let e = self.s.sym().eigen();
        let threshold = EPS_PSD * e.spectral_norm().max(1.0);
        let kept: Vec<usize> = (0..e.values.len())
            .filter(|&i| e.values[i] > threshold)
            .collect();
        let t = self.t();
        if kept.len() == t {
            return Ok(RangeReduction::Full);
        }
        if kept.is_empty() {
            return Ok(RangeReduction::Zero);
        }
        let mut basis = DMatrix::zeros(t, kept.len());
        for (col, &i) in kept.iter().enumerate() {
            basis.set_column(col, &e.vectors.column(i));
        }
        let bt = basis.transpose();
        let s_red = SymMatrix::force_symmetric(&bt * self.s.sym().as_dmatrix() * &basis);
        let sig = |sigma: &PsdMatrix| -> Result<PsdMatrix> {
            let inv = inverse_spd(sigma.sym())?;
            let proj = SymMatrix::force_symmetric(&bt * inv.as_dmatrix() * &basis);
            PsdMatrix::new(inverse_spd(&proj)?)
        };
        let reduced = AlignedChannelSpec::new(sig(&self.sigma1)?, sig(&self.sigma2)?, PsdMatrix::new(s_red)?)?;
        Ok(RangeReduction::Project { basis, reduced })
    }
}

/// Outcome of restricting an aligned channel to range(`s`).
#[derive(Clone, Debug)]
pub enum RangeReduction {
    /// `s` has full rank; solve in place.
    Full,
    /// `s` is singular but nonzero; solve `reduced` and lift covariances
    /// back as `K = basis * K' * basis^T`.
    Project {
        basis: DMatrix<f64>,
        reduced: AlignedChannelSpec,
    },
    /// `s = 0`; the only feasible pair is `(0, 0)`.
    Zero,
}

impl RangeReduction {
    /// Lifts a reduced-space PSD matrix back to original coordinates.
    pub fn lift(&self, k: &PsdMatrix, original_dim: usize) -> PsdMatrix {
        match self {
            RangeReduction::Full => k.clone(),
            RangeReduction::Zero => PsdMatrix::zeros(original_dim),
            RangeReduction::Project { basis, .. } => {
                PsdMatrix::new(k.sym().congruence(basis)).expect("congruence preserves PSD")
            }
        }
    }
}

/// A channel whose gain matrices have been lifted away from singularity:
/// every singular value of the base gains is shifted up by `alpha`.
#[derive(Clone, Debug)]
pub struct PerturbedChannel {
    pub base: ChannelSpec,
    pub alpha: f64,
    pub h1_bar: RectMatrix,
    pub h2_bar: RectMatrix,
}

fn shift_singular_values(h: &RectMatrix, alpha: f64) -> RectMatrix {
    let svd = h.as_dmatrix().clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with vectors");
    let vt = svd.v_t.as_ref().expect("svd with vectors");
    let mut lam = DMatrix::zeros(u.ncols(), vt.nrows());
    for i in 0..svd.singular_values.len() {
        lam[(i, i)] = svd.singular_values[i] + alpha;
    }
    RectMatrix {
        m: u * lam * vt,
    }
}

/// Equalizes antenna counts: `r_j < t` pads the gain with zero rows and the
/// noise with an identity block (new outputs are input-independent noise);
/// `r_j > t` whitens the noise, rotates outputs onto the gain's left
/// singular basis, and drops the all-zero rows beyond `t` (pure noise,
/// independent of the retained coordinates). Rates are unchanged for every
/// feasible pair.
pub fn square_up(c: &ChannelSpec) -> ChannelSpec {
    let t = c.t();
    let fix = |h: &RectMatrix, sigma: &PsdMatrix| -> (RectMatrix, PsdMatrix) {
        let r = h.rows();
        if r == t {
            return (h.clone(), sigma.clone());
        }
        if r < t {
            let mut padded = DMatrix::zeros(t, t);
            padded.view_mut((0, 0), (r, t)).copy_from(h.as_dmatrix());
            let ext = sigma.sym().block_diag(&SymMatrix::identity(t - r));
            return (
                RectMatrix { m: padded },
                PsdMatrix::new(ext).expect("block diag of PSD and identity"),
            );
        }
        // r > t: whiten, rotate, truncate.
        let w = inv_sqrt_spd(sigma.sym()).expect("noise is strictly PD");
        let whitened = w.as_dmatrix() * h.as_dmatrix();
        let svd = whitened.svd(false, true);
        let vt = svd.v_t.as_ref().expect("svd with vectors");
        let mut lam = DMatrix::zeros(t, t);
        for i in 0..svd.singular_values.len().min(t) {
            lam[(i, i)] = svd.singular_values[i];
        }
        (RectMatrix { m: lam * vt }, PsdMatrix::identity(t))
    };
    let (h1, sigma1) = fix(&c.h1, &c.sigma1);
    let (h2, sigma2) = fix(&c.h2, &c.sigma2);
    ChannelSpec {
        h1,
        h2,
        sigma1,
        sigma2,
        s: c.s.clone(),
    }
}

/// Shifts every singular value of both (square) gains up by `alpha`, making
/// them invertible. `alpha = 0` is allowed and reproduces the base gains.
pub fn perturb(c: &ChannelSpec, alpha: f64) -> Result<PerturbedChannel> {
    if !c.is_square() {
        let bad = if c.r1() != c.t() { &c.h1 } else { &c.h2 };
        return Err(Error::NotSquare {
            rows: bad.rows(),
            cols: bad.cols(),
        });
    }
    Ok(PerturbedChannel {
        base: c.clone(),
        alpha,
        h1_bar: shift_singular_values(&c.h1, alpha),
        h2_bar: shift_singular_values(&c.h2, alpha),
    })
}

/// Inverts the perturbed gains: the equivalent aligned channel has noise
/// covariances `H̄_j^{-1} Σ_j H̄_j^{-T}` and the same input cap.
pub fn align(p: &PerturbedChannel) -> Result<AlignedChannelSpec> {
    let invert = |h: &RectMatrix| -> Result<DMatrix<f64>> {
        let svd = h.as_dmatrix().clone().svd(true, true);
        let min_sv = svd
            .singular_values
            .iter()
            .fold(f64::INFINITY, |a, v| a.min(*v));
        if min_sv < EPS_PSD {
            return Err(Error::SingularGain { value: min_sv });
        }
        let u = svd.u.as_ref().expect("svd with vectors");
        let vt = svd.v_t.as_ref().expect("svd with vectors");
        let mut inv_lam = DMatrix::zeros(vt.nrows(), u.ncols());
        for i in 0..svd.singular_values.len() {
            inv_lam[(i, i)] = 1.0 / svd.singular_values[i];
        }
        Ok(vt.transpose() * inv_lam * u.transpose())
    };
    let map = |h: &RectMatrix, sigma: &PsdMatrix| -> Result<PsdMatrix> {
        let inv = invert(h)?;
        PsdMatrix::new(sigma.sym().congruence(&inv))
    };
    AlignedChannelSpec::new(
        map(&p.h1_bar, &p.base.sigma1)?,
        map(&p.h2_bar, &p.base.sigma2)?,
        p.base.s.clone(),
    )
}

/// Upper bound on the residual information about user 1's confidential
/// message leaked to user 2 when the perturbed channel stands in for the
/// original: `½ ln(|H̄2 S H̄2^T + Σ2| / |H2 S H2^T + Σ2|)`. Nonnegative,
/// and shrinking `alpha` tightens it toward zero.
pub fn leakage_gap(c: &ChannelSpec, alpha: f64) -> Result<f64> {
    if !c.is_square() {
        return Err(Error::NotSquare {
            rows: c.r1().max(c.r2()),
            cols: c.t(),
        });
    }
    let p = perturb(c, alpha)?;
    let num = &c.s.sym().congruence(p.h2_bar.as_dmatrix()) + c.sigma2.sym();
    let den = &c.s.sym().congruence(c.h2.as_dmatrix()) + c.sigma2.sym();
    let ld = |m: SymMatrix| linalg::logdet(&PsdMatrix::new(m)?, 0.0);
    Ok((0.5 * (ld(num)? - ld(den)?)).max(0.0))
}

/// A parsed channel-spec document.
#[derive(Clone, Debug)]
pub enum ParsedChannel {
    General(ChannelSpec),
    Aligned(AlignedChannelSpec),
}

impl ParsedChannel {
    pub fn t(&self) -> usize {
        match self {
            ParsedChannel::General(c) => c.t(),
            ParsedChannel::Aligned(c) => c.t(),
        }
    }
}

/// Parses the channel-spec document format described in the module docs.
pub fn parse_document(text: &str) -> Result<ParsedChannel> {
    let mut fields: Vec<(String, Vec<f64>, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (head, numbers) = match trimmed.find('=') {
            Some(eq) => {
                let key = trimmed[..eq].trim();
                if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(Error::Parse(format!(
                        "line {}: bad field name {:?}",
                        lineno + 1,
                        key
                    )));
                }
                fields.push((key.to_ascii_lowercase(), Vec::new(), lineno + 1));
                (true, trimmed[eq + 1..].trim())
            }
            None => (false, trimmed),
        };
        if !head && fields.is_empty() {
            return Err(Error::Parse(format!(
                "line {}: numbers before any field",
                lineno + 1
            )));
        }
        if !numbers.is_empty() {
            let bucket = &mut fields.last_mut().expect("checked nonempty").1;
            for tok in numbers.split([' ', '\t', ',']).filter(|s| !s.is_empty()) {
                let v: f64 = tok.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad number {:?}", lineno + 1, tok))
                })?;
                bucket.push(v);
            }
        }
    }

    let mut by_name = std::collections::BTreeMap::new();
    for (k, v, line) in fields {
        if by_name.insert(k.clone(), v).is_some() {
            return Err(Error::Parse(format!("line {line}: duplicate field {k:?}")));
        }
    }
    let mut lookup = |name: &str| -> Option<Vec<f64>> { by_name.remove(name) };
    let scalar_usize = |name: &str, v: &[f64]| -> Result<usize> {
        if v.len() != 1 || v[0].fract() != 0.0 || v[0] < 1.0 {
            return Err(Error::Parse(format!("field {name} must be a positive integer")));
        }
        Ok(v[0] as usize)
    };

    let t_field = lookup("t").ok_or_else(|| Error::Parse("missing field t".into()))?;
    let t = scalar_usize("t", &t_field)?;
    let r1 = match lookup("r1") {
        Some(v) => scalar_usize("r1", &v)?,
        None => t,
    };
    let r2 = match lookup("r2") {
        Some(v) => scalar_usize("r2", &v)?,
        None => t,
    };

    let matrix = |name: &str, rows: usize, cols: usize, v: Option<Vec<f64>>| -> Result<Vec<f64>> {
        let v = v.ok_or_else(|| Error::Parse(format!("missing field {name}")))?;
        if v.len() != rows * cols {
            return Err(Error::Parse(format!(
                "field {name}: expected {} numbers ({rows}x{cols}), got {}",
                rows * cols,
                v.len()
            )));
        }
        Ok(v)
    };

    let sigma1 = matrix("sigma1", r1, r1, lookup("sigma1"))?;
    let sigma2 = matrix("sigma2", r2, r2, lookup("sigma2"))?;
    let s = matrix("s", t, t, lookup("s"))?;
    let h1 = lookup("h1");
    let h2 = lookup("h2");
    if let Some(name) = by_name.keys().next() {
        return Err(Error::Parse(format!("unknown field {name:?}")));
    }

    let sigma1 = PsdMatrix::from_rows(r1, &sigma1)?;
    let sigma2 = PsdMatrix::from_rows(r2, &sigma2)?;
    let s = PsdMatrix::from_rows(t, &s)?;

    match (h1, h2) {
        (None, None) => {
            if r1 != t || r2 != t {
                return Err(Error::Parse(
                    "aligned spec (no h1/h2) requires r1 = r2 = t".into(),
                ));
            }
            Ok(ParsedChannel::Aligned(AlignedChannelSpec::new(
                sigma1, sigma2, s,
            )?))
        }
        (Some(h1), Some(h2)) => {
            let h1 = RectMatrix::from_rows(r1, t, &matrix("h1", r1, t, Some(h1))?)?;
            let h2 = RectMatrix::from_rows(r2, t, &matrix("h2", r2, t, Some(h2))?)?;
            Ok(ParsedChannel::General(ChannelSpec::new(
                h1, h2, sigma1, sigma2, s,
            )?))
        }
        _ => Err(Error::Parse(
            "fields h1 and h2 must be given together or not at all".into(),
        )),
    }
}
