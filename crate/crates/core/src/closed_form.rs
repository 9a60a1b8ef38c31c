//! Closed-form performance metrics: outage probability of both devices, the
//! ergodic-rate upper bounds, and the high-SNR rate asymptote.
//!
//! Everything rests on three moment-matched approximations: X1^2 as Gamma,
//! the harvested power as Gamma, and the self-interference power
//! `|h_SI|^2 P_H` as exponential with the matched mean. Exponential factors
//! that can overflow are assembled in log space before the final `exp`.

use core::fmt;

use crate::channel::{x1_approximations, ChannelError};
use crate::harvest::{mean_harvested_power, validity_zeta, EhParams, HarvestError};
use crate::link::{thresholds, Thresholds};
use crate::params::{ParamError, SystemParams};
use crate::special::{
    exp_scaled_e1, exp_scaled_gamma_neg1, ln_reg_upper_gamma, reg_inc_gamma, SpecialError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticError {
    Param(ParamError),
    Channel(ChannelError),
    Harvest(HarvestError),
    Special(SpecialError),
    /// The high-SNR asymptote needs a saturation power; the linear harvester
    /// has none.
    LinearModelUnsupported,
}

impl fmt::Display for AnalyticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticError::Param(e) => write!(f, "{e}"),
            AnalyticError::Channel(e) => write!(f, "{e}"),
            AnalyticError::Harvest(e) => write!(f, "{e}"),
            AnalyticError::Special(e) => write!(f, "{e}"),
            AnalyticError::LinearModelUnsupported => {
                write!(f, "linear harvester has no saturation power")
            }
        }
    }
}

impl core::error::Error for AnalyticError {}

impl From<ParamError> for AnalyticError {
    fn from(e: ParamError) -> Self {
        AnalyticError::Param(e)
    }
}
impl From<ChannelError> for AnalyticError {
    fn from(e: ChannelError) -> Self {
        AnalyticError::Channel(e)
    }
}
impl From<HarvestError> for AnalyticError {
    fn from(e: HarvestError) -> Self {
        AnalyticError::Harvest(e)
    }
}
impl From<SpecialError> for AnalyticError {
    fn from(e: SpecialError) -> Self {
        AnalyticError::Special(e)
    }
}

/// Which expression produced the reported value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// NOMA split cannot deliver the cell-edge rate: OP = 1 identically.
    DegenerateOne,
    /// Mean useful power below the mean self-interference requirement.
    DegenerateSelfInterference,
    /// No harvested self-interference (rho = 0 or omega = 0).
    Rho0,
    /// General expression, own-stream threshold dominating.
    GeneralXi1,
    /// General expression, cell-edge SIC threshold dominating.
    GeneralXi2,
    /// Rate expressions (single branch).
    General,
}

/// Where the harvested-power approximation sits relative to its trusted
/// small-perturbation region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub zeta: f64,
    pub in_region_i: bool,
}

/// One closed-form metric value plus how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticReport {
    pub value: f64,
    pub branch: Branch,
    pub validity: Validity,
}

fn clamp_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Shared per-call context for the outage expressions.
struct OutageCtx {
    t: Thresholds,
    k1: f64,
    /// Scale of the Gamma model of beta_ss beta_s1 X1^2 [W/W].
    theta_b: f64,
    sigma2: f64,
    validity: Validity,
    x1sq: crate::params::GammaParams,
}

impl OutageCtx {
    /// Mean harvested power [W]; deferred so the degenerate-split branches
    /// can return before the moment match is required to exist.
    fn mean_ph(&self, p: &SystemParams, eh: &EhParams) -> Result<f64, AnalyticError> {
        Ok(mean_harvested_power(p, eh, &self.x1sq)?)
    }
}

fn outage_ctx(p: &SystemParams, eh: &EhParams) -> Result<OutageCtx, AnalyticError> {
    p.validate()?;
    let (_, x1sq) = x1_approximations(p)?;
    let (zeta, in_region_i) = validity_zeta(p, eh, &x1sq);
    Ok(OutageCtx {
        t: thresholds(p),
        k1: x1sq.shape,
        theta_b: x1sq.scale * p.beta_ss * p.beta_s1,
        sigma2: p.noise_power_w(),
        validity: Validity { zeta, in_region_i },
        x1sq,
    })
}

/// The D1 outage expression at abscissa `xi`, for a given mean
/// self-interference power `mu_v = omega * E[P_H]`.
///
/// `Pr[Z < xi (V + sigma^2)]` with `Z ~ Gamma(k1, theta_b)` and
/// `V ~ Exp(mu_v)`:
/// `P(k1, u0) + exp(s) (w/(w+theta_b))^{k1} Q(k1, u0 + s)`,
/// `u0 = xi sigma^2 / theta_b`, `w = xi mu_v`, `s = sigma^2 / mu_v`.
fn d1_outage_at(ctx: &OutageCtx, xi: f64, mu_v: f64) -> Result<f64, AnalyticError> {
    let u0 = xi * ctx.sigma2 / ctx.theta_b;
    let (p_lower, _) = reg_inc_gamma(ctx.k1, u0)?;
    if mu_v == 0.0 {
        return Ok(clamp_unit(p_lower));
    }
    let w = xi * mu_v;
    let s = ctx.sigma2 / mu_v;
    let ln_t = s + ctx.k1 * (libm::log(w) - libm::log(w + ctx.theta_b))
        + ln_reg_upper_gamma(ctx.k1, u0 + s)?;
    Ok(clamp_unit(p_lower + libm::exp(ln_t)))
}

/// Outage probability of the cell-center device D1.
pub fn op_d1(p: &SystemParams, eh: &EhParams) -> Result<AnalyticReport, AnalyticError> {
    let ctx = outage_ctx(p, eh)?;
    if ctx.t.degenerate() || !ctx.t.xi1.is_finite() {
        return Ok(AnalyticReport {
            value: 1.0,
            branch: Branch::DegenerateOne,
            validity: ctx.validity,
        });
    }
    if p.omega == 0.0 || p.rho == 0.0 {
        let value = d1_outage_at(&ctx, ctx.t.xi_max(), 0.0)?;
        return Ok(AnalyticReport { value, branch: Branch::Rho0, validity: ctx.validity });
    }
    let mu_v = p.omega * ctx.mean_ph(p, eh)?;
    if ctx.k1 * ctx.theta_b / ctx.t.xi1 < mu_v {
        return Ok(AnalyticReport {
            value: 1.0,
            branch: Branch::DegenerateSelfInterference,
            validity: ctx.validity,
        });
    }
    let value = d1_outage_at(&ctx, ctx.t.xi_max(), mu_v)?;
    let branch = if ctx.t.xi1 >= ctx.t.xi2 { Branch::GeneralXi1 } else { Branch::GeneralXi2 };
    Ok(AnalyticReport { value, branch, validity: ctx.validity })
}

/// Probability that the MRC sum of a direct branch with failure rate `c`
/// and a relay branch with failure rate `d` stays below threshold `gamma`:
/// the CDF of the sum of the two exponentials.
///
/// Near `c = d` the difference of exponentials cancels, so this switches to
/// the series of `phi(z) = (1 - e^{-z}) / z`; elsewhere both `e^{-c gamma}`
/// and `e^{-d gamma}` lie in (0, 1] and the direct difference is safe.
pub fn mrc_both_path_failure(c: f64, d: f64, gamma: f64) -> f64 {
    let z = (c - d) * gamma;
    let cross = if libm::fabs(z) < 1e-6 {
        d * gamma * libm::exp(-d * gamma) * (1.0 - z * (0.5 - z / 6.0))
    } else {
        d / (c - d) * (libm::exp(-d * gamma) - libm::exp(-c * gamma))
    };
    clamp_unit(-libm::expm1(-d * gamma) - cross)
}

/// Outage probability of the cell-edge device D2.
pub fn op_d2(p: &SystemParams, eh: &EhParams) -> Result<AnalyticReport, AnalyticError> {
    let ctx = outage_ctx(p, eh)?;
    if ctx.t.degenerate() {
        return Ok(AnalyticReport {
            value: 1.0,
            branch: Branch::DegenerateOne,
            validity: ctx.validity,
        });
    }
    let gamma = ctx.t.gamma_th2;
    let margin = p.alpha2 - p.alpha1 * gamma;
    // Direct-link failure rate: beta_ss beta_s2 X2^2 ~ Exp(N beta_ss beta_s2).
    let c = ctx.sigma2 / (p.pt_w() * p.beta_ss * p.beta_s2 * p.n_elements as f64 * margin);
    let direct_fail = -libm::expm1(-c * gamma);

    let mean_ph = if p.rho == 0.0 { 0.0 } else { ctx.mean_ph(p, eh)? };
    if mean_ph == 0.0 {
        // No harvested power: the cooperative hop carries nothing, so D2
        // lives or dies on the direct path alone.
        return Ok(AnalyticReport {
            value: clamp_unit(direct_fail),
            branch: Branch::Rho0,
            validity: ctx.validity,
        });
    }

    // Relay-hop failure rate: W ~ Exp(E[P_H] beta_12 / sigma^2).
    let d = ctx.sigma2 / (mean_ph * p.beta_12);
    let i_both = mrc_both_path_failure(c, d, gamma);

    // chi: probability D1 fails to decode the cell-edge stream (the xi2
    // abscissa of the D1 expression).
    let mu_v = p.omega * mean_ph;
    let chi = d1_outage_at(&ctx, ctx.t.xi2, mu_v)?;

    let value = clamp_unit(chi * clamp_unit(direct_fail) + (1.0 - chi) * i_both);
    let branch = if ctx.t.xi1 >= ctx.t.xi2 { Branch::GeneralXi1 } else { Branch::GeneralXi2 };
    Ok(AnalyticReport { value, branch, validity: ctx.validity })
}

/// Ergodic-rate upper bound for D1 (Jensen on the post-SIC SINR).
pub fn er_d1_upper(p: &SystemParams, eh: &EhParams) -> Result<AnalyticReport, AnalyticError> {
    p.validate()?;
    let (_, x1sq) = x1_approximations(p)?;
    let (zeta, in_region_i) = validity_zeta(p, eh, &x1sq);
    let mean_ph = mean_harvested_power(p, eh, &x1sq)?;
    let sigma2 = p.noise_power_w();
    let mu_v = p.omega * mean_ph;
    // E[1/(V + sigma^2)] for V ~ Exp(mu_v): e^{sigma^2/mu_v} E1(sigma^2/mu_v) / mu_v,
    // degenerating to 1/sigma^2 as mu_v -> 0.
    let inv_denom = if mu_v == 0.0 {
        1.0 / sigma2
    } else {
        exp_scaled_e1(sigma2 / mu_v)? / mu_v
    };
    let signal = p.beta_ss * p.beta_s1 * x1sq.mean() * (1.0 - p.rho) * p.pt_w() * p.alpha1;
    let value = libm::log2(1.0 + signal * inv_denom);
    Ok(AnalyticReport {
        value,
        branch: Branch::General,
        validity: Validity { zeta, in_region_i },
    })
}

/// Ergodic-rate upper bound for D2 (Jensen on the MRC SINR).
pub fn er_d2_upper(p: &SystemParams, eh: &EhParams) -> Result<AnalyticReport, AnalyticError> {
    p.validate()?;
    let (_, x1sq) = x1_approximations(p)?;
    let (zeta, in_region_i) = validity_zeta(p, eh, &x1sq);
    let mean_ph = mean_harvested_power(p, eh, &x1sq)?;
    let sigma2 = p.noise_power_w();
    // E[direct SINR] for beta_ss beta_s2 X2^2 ~ Exp(N beta_ss beta_s2):
    // (alpha2/alpha1) x e^{x} Gamma(-1, x), x = sigma^2/(N b P_t alpha1).
    let x = sigma2 / (p.n_elements as f64 * p.beta_ss * p.beta_s2 * p.pt_w() * p.alpha1);
    let t1 = p.alpha2 / p.alpha1 * x * exp_scaled_gamma_neg1(x)?;
    let t2 = mean_ph * p.beta_12 / sigma2;
    let value = libm::log2(1.0 + t1 + t2);
    Ok(AnalyticReport {
        value,
        branch: Branch::General,
        validity: Validity { zeta, in_region_i },
    })
}

/// High-SNR rate asymptote for D2. With power splitting active, the
/// cooperative hop saturates at the harvester ceiling, which only the
/// sigmoid model has.
pub fn er_d2_asymptotic(p: &SystemParams, eh: &EhParams) -> Result<AnalyticReport, AnalyticError> {
    p.validate()?;
    let floor = libm::log2(1.0 + p.alpha2 / p.alpha1);
    let (_, x1sq) = x1_approximations(p)?;
    let (zeta, in_region_i) = validity_zeta(p, eh, &x1sq);
    let validity = Validity { zeta, in_region_i };
    if p.rho == 0.0 {
        return Ok(AnalyticReport { value: floor, branch: Branch::Rho0, validity });
    }
    let p_th = match *eh {
        EhParams::NonLinear { p_th, .. } => p_th,
        EhParams::Linear { .. } => return Err(AnalyticError::LinearModelUnsupported),
    };
    let x = p.noise_power_w() * (1.0 + p.alpha2 / p.alpha1) / (p_th * p.beta_12);
    let value = floor + exp_scaled_e1(x)? / core::f64::consts::LN_2;
    Ok(AnalyticReport { value, branch: Branch::General, validity })
}
