//! Energy harvesting at D1: the non-linear sigmoidal harvester, its linear
//! benchmark, and the moment-matched Gamma approximation of the harvested
//! power driven by the cascade approximation of X1^2.

use core::fmt;

use crate::params::{GammaParams, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarvestError {
    Param(&'static str),
    /// zeta = 0 (no power split or no transmit power): the harvested power
    /// is identically zero and has no Gamma description.
    ZeroInput,
    /// The Gamma-MGF step of the moment match requires r*zeta < 1/2; outside
    /// this the matched moments do not exist.
    DegenerateMoments,
}

impl fmt::Display for HarvestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarvestError::Param(msg) => write!(f, "invalid harvester parameter: {msg}"),
            HarvestError::ZeroInput => write!(f, "harvested power is identically zero"),
            HarvestError::DegenerateMoments => {
                write!(f, "harvested-power moment matching degenerates (r*zeta >= 1/2)")
            }
        }
    }
}

impl core::error::Error for HarvestError {}

/// Harvester transfer characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EhParams {
    /// Saturating sigmoid: `P_H = p_th * (s(P_in) - s0) / (1 - s0)` with
    /// `s(x) = 1 / (1 + e^{-a(x - b)})` and `s0 = s(0)`.
    NonLinear { a: f64, b: f64, p_th: f64 },
    /// Constant-efficiency benchmark: `P_H = eta * P_in`.
    Linear { eta: f64 },
}

impl EhParams {
    /// The measured circuit fit used throughout: a = 150, b = 14 mW,
    /// saturation 24 mW.
    pub fn table1() -> Self {
        EhParams::NonLinear { a: 150.0, b: 0.014, p_th: 0.024 }
    }

    pub fn validate(&self) -> Result<(), HarvestError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            EhParams::NonLinear { a, b, p_th } => {
                if !pos(a) || !pos(b) || !pos(p_th) {
                    return Err(HarvestError::Param("a, b, p_th must be finite and > 0"));
                }
            }
            EhParams::Linear { eta } => {
                if !(eta > 0.0 && eta <= 1.0) {
                    return Err(HarvestError::Param("eta must lie in (0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Maximum harvestable power; unbounded for the linear model.
    pub fn saturation(&self) -> f64 {
        match *self {
            EhParams::NonLinear { p_th, .. } => p_th,
            EhParams::Linear { .. } => f64::INFINITY,
        }
    }
}

/// Instantaneous harvested power for input power `p_in` (already including
/// the power-splitting fraction). Exactly 0 at `p_in = 0`; for the sigmoid,
/// bounded by the saturation power `p_th`.
pub fn harvested_power(eh: &EhParams, p_in: f64) -> f64 {
    debug_assert!(p_in >= 0.0);
    match *eh {
        EhParams::NonLinear { a, b, p_th } => {
            // (s(x) - s0) / (1 - s0) rearranged to avoid subtracting two
            // sigmoids: -expm1(-a x) / (1 + e^{a(b - x)}).
            p_th * (-libm::expm1(-a * p_in)) / (1.0 + libm::exp(a * (b - p_in)))
        }
        EhParams::Linear { eta } => eta * p_in,
    }
}

/// The dimensionless expansion parameter of the harvested-power moment
/// match, `zeta = a * rho * Pt * beta_ss * beta_s1 * theta1`, paired with
/// whether it sits inside the small-zeta region where the match is trusted.
/// The linear model has no such restriction.
pub fn validity_zeta(p: &SystemParams, eh: &EhParams, x1sq: &GammaParams) -> (f64, bool) {
    match *eh {
        EhParams::NonLinear { a, .. } => {
            let zeta = a * p.rho * p.pt_w() * p.beta_ss * p.beta_s1 * x1sq.scale;
            (zeta, zeta <= p.zeta_threshold)
        }
        EhParams::Linear { .. } => (0.0, true),
    }
}

/// Gamma approximation of the harvested power `P_H` at D1, given the Gamma
/// description of X1^2.
///
/// For the sigmoid the first two moments of `s(c X) - s0` are taken through
/// the Gamma MGF of X ~ Gamma(k1, theta1) after linearizing the sigmoid's
/// exponent, then matched to a Gamma shape/scale. All exponentials are kept
/// in log space (`ln_1p` / `expm1`) so the near-linear small-zeta regime
/// does not cancel.
pub fn ph_gamma_approx(
    p: &SystemParams,
    eh: &EhParams,
    x1sq: &GammaParams,
) -> Result<GammaParams, HarvestError> {
    eh.validate()?;
    let drive = p.rho * p.pt_w() * p.beta_ss * p.beta_s1;
    match *eh {
        EhParams::NonLinear { a, b, p_th } => {
            let zeta = a * drive * x1sq.scale;
            if zeta <= 0.0 {
                return Err(HarvestError::ZeroInput);
            }
            let k1 = x1sq.shape;
            let eab = libm::exp(a * b);
            let s0 = 1.0 / (1.0 + eab);
            let r = eab / (1.0 + eab);
            if 2.0 * r * zeta >= 1.0 {
                return Err(HarvestError::DegenerateMoments);
            }
            // E[Y] = s0 (1 - r zeta)^{-k1}, E[Y^2] = s0^2 (1 - 2 r zeta)^{-k1}
            let l1 = -k1 * libm::log1p(-r * zeta);
            let l2 = -k1 * libm::log1p(-2.0 * r * zeta);
            let e1 = libm::expm1(l1);
            let var_ratio = libm::exp(2.0 * l1) * libm::expm1(l2 - 2.0 * l1);
            let shape = e1 * e1 / var_ratio;
            let scale_y = s0 * var_ratio / e1;
            GammaParams::new(shape, p_th / r * scale_y)
                .map_err(|_| HarvestError::DegenerateMoments)
        }
        EhParams::Linear { eta } => {
            if drive <= 0.0 {
                return Err(HarvestError::ZeroInput);
            }
            GammaParams::new(x1sq.shape, eta * drive * x1sq.scale)
                .map_err(|_| HarvestError::DegenerateMoments)
        }
    }
}

/// Mean harvested power under the Gamma approximation; exactly 0 when the
/// drive power is zero (where [`ph_gamma_approx`] refuses to produce a
/// distribution).
pub fn mean_harvested_power(
    p: &SystemParams,
    eh: &EhParams,
    x1sq: &GammaParams,
) -> Result<f64, HarvestError> {
    eh.validate()?;
    let drive = p.rho * p.pt_w() * p.beta_ss * p.beta_s1;
    match *eh {
        EhParams::NonLinear { a, b, p_th } => {
            let zeta = a * drive * x1sq.scale;
            if zeta == 0.0 {
                return Ok(0.0);
            }
            let eab = libm::exp(a * b);
            let s0 = 1.0 / (1.0 + eab);
            let r = eab / (1.0 + eab);
            if r * zeta >= 1.0 {
                return Err(HarvestError::DegenerateMoments);
            }
            let l1 = -x1sq.shape * libm::log1p(-r * zeta);
            Ok(p_th / r * s0 * libm::expm1(l1))
        }
        EhParams::Linear { eta } => Ok(eta * drive * x1sq.mean()),
    }
}
