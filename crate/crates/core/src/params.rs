//! Scenario description and shared domain types.

use core::fmt;

/// Convert dBm to watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// Convert watts to dBm.
#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * libm::log10(w) + 30.0
}

/// Convert a dB ratio to linear scale.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Convert a linear ratio to dB.
#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// Default boundary for the small-perturbation region of the harvested-power
/// approximation; see [`crate::harvest::validity_zeta`].
pub const DEFAULT_ZETA_THRESHOLD: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamError(pub &'static str);

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameter: {}", self.0)
    }
}

impl core::error::Error for ParamError {}

/// Full scenario description for the downlink: powers, NOMA split, RIS size,
/// fading shapes, path losses, self-interference and the energy-harvesting
/// power split.
///
/// Power and path-loss fields are stored in the units they are quoted in
/// (dBm for transmit power and noise density, linear scale for everything
/// else); `pt_w` / `noise_power_w` derive the linear-watt values used by all
/// computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Transmit power [dBm].
    pub pt_dbm: f64,
    /// Noise power spectral density [dBm/Hz].
    pub noise_density_dbm_hz: f64,
    /// Bandwidth [Hz].
    pub bandwidth_hz: f64,
    /// Direct override of the total noise power [W]; when set it replaces
    /// density * bandwidth.
    pub sigma2_w: Option<f64>,
    /// Number of RIS elements.
    pub n_elements: u32,
    /// Power-allocation fraction for the cell-center device D1.
    pub alpha1: f64,
    /// Power-allocation fraction for the cell-edge device D2.
    pub alpha2: f64,
    /// Target rate of D1 [bits/s/Hz].
    pub r1_target: f64,
    /// Target rate of D2 [bits/s/Hz].
    pub r2_target: f64,
    /// Residual self-interference power (mean of |h_SI|^2), linear scale.
    pub omega: f64,
    /// Power-splitting fraction devoted to energy harvesting.
    pub rho: f64,
    /// Nakagami shape, source -> RIS link.
    pub m_ss: f64,
    /// Nakagami shape, RIS -> D1 link.
    pub m_s1: f64,
    /// Nakagami shape, RIS -> D2 link.
    pub m_s2: f64,
    /// Nakagami spread, source -> RIS link.
    pub omega_ss: f64,
    /// Nakagami spread, RIS -> D1 link.
    pub omega_s1: f64,
    /// Nakagami spread, RIS -> D2 link.
    pub omega_s2: f64,
    /// Path loss source -> RIS, linear scale.
    pub beta_ss: f64,
    /// Path loss RIS -> D1, linear scale.
    pub beta_s1: f64,
    /// Path loss RIS -> D2, linear scale.
    pub beta_s2: f64,
    /// Path loss of the D1 -> D2 device-to-device link, linear scale.
    pub beta_12: f64,
    /// Region-I boundary for the harvested-power approximation.
    pub zeta_threshold: f64,
}

impl SystemParams {
    /// Baseline scenario: the standard simulation parameter set with the
    /// NOMA coefficients ordered so the cell-edge device gets the larger
    /// share (alpha1 = 0.1, alpha2 = 0.9).
    pub fn defaults(n_elements: u32) -> Self {
        SystemParams {
            pt_dbm: 15.0,
            noise_density_dbm_hz: -96.0,
            bandwidth_hz: 1e6,
            sigma2_w: None,
            n_elements,
            alpha1: 0.1,
            alpha2: 0.9,
            r1_target: 1.5,
            r2_target: 0.5,
            omega: db_to_linear(-30.0),
            rho: 0.2,
            m_ss: 3.5,
            m_s1: 2.0,
            m_s2: 1.0,
            omega_ss: 1.0,
            omega_s1: 1.0,
            omega_s2: 1.0,
            beta_ss: db_to_linear(-30.0),
            beta_s1: db_to_linear(-30.0),
            beta_s2: db_to_linear(-40.0),
            beta_12: db_to_linear(-15.0),
            zeta_threshold: DEFAULT_ZETA_THRESHOLD,
        }
    }

    /// Same scenario with the literal tabulated power-allocation pair
    /// (alpha1 = 0.9, alpha2 = 0.1). At the default target rates this makes
    /// alpha2 < alpha1 * gamma_th2, so both outage probabilities degenerate
    /// to 1.
    pub fn table1_literal(n_elements: u32) -> Self {
        SystemParams { alpha1: 0.9, alpha2: 0.1, ..Self::defaults(n_elements) }
    }

    /// Transmit power in watts.
    #[inline]
    pub fn pt_w(&self) -> f64 {
        dbm_to_watts(self.pt_dbm)
    }

    /// Total noise power sigma^2 in watts.
    #[inline]
    pub fn noise_power_w(&self) -> f64 {
        match self.sigma2_w {
            Some(s) => s,
            None => dbm_to_watts(self.noise_density_dbm_hz) * self.bandwidth_hz,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !self.pt_dbm.is_finite() {
            return Err(ParamError("pt_dbm must be finite"));
        }
        if !pos(self.bandwidth_hz) {
            return Err(ParamError("bandwidth_hz must be > 0"));
        }
        if !pos(self.noise_power_w()) {
            return Err(ParamError("derived noise power must be > 0"));
        }
        if self.n_elements == 0 {
            return Err(ParamError("n_elements must be >= 1"));
        }
        for a in [self.alpha1, self.alpha2] {
            if !(a > 0.0 && a < 1.0) {
                return Err(ParamError("alpha coefficients must lie in (0, 1)"));
            }
        }
        if libm::fabs(self.alpha1 + self.alpha2 - 1.0) > 1e-12 {
            return Err(ParamError("alpha1 + alpha2 must equal 1"));
        }
        if !pos(self.r1_target) || !pos(self.r2_target) {
            return Err(ParamError("target rates must be > 0"));
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(ParamError("omega must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(ParamError("rho must lie in [0, 1]"));
        }
        for m in [self.m_ss, self.m_s1, self.m_s2] {
            if !(m >= 0.5) || !m.is_finite() {
                return Err(ParamError("Nakagami shapes must be >= 0.5"));
            }
        }
        for w in [self.omega_ss, self.omega_s1, self.omega_s2] {
            if !pos(w) {
                return Err(ParamError("Nakagami spreads must be > 0"));
            }
        }
        for b in [self.beta_ss, self.beta_s1, self.beta_s2, self.beta_12] {
            if !pos(b) || b > 1.0 {
                return Err(ParamError("path losses must lie in (0, 1]"));
            }
        }
        if !pos(self.zeta_threshold) {
            return Err(ParamError("zeta_threshold must be > 0"));
        }
        Ok(())
    }
}

/// Shape/scale pair for a Gamma distribution; used for every moment-matched
/// approximation in the analysis (X1, X1^2, harvested power).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self, ParamError> {
        if !(shape > 0.0 && shape.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
            return Err(ParamError("Gamma shape and scale must be finite and > 0"));
        }
        Ok(GammaParams { shape, scale })
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    #[inline]
    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// CDF at `x` via the regularized lower incomplete gamma function.
    pub fn cdf(&self, x: f64) -> Result<f64, crate::special::SpecialError> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(crate::special::reg_inc_gamma(self.shape, x / self.scale)?.0)
    }
}

/// One joint fading realization of all four small-scale channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// Aligned cascade sum_n |h_ss,n| |h_s1,n| (before path loss).
    pub x1: f64,
    /// |sum_n e^{j phi_n} h_ss,n h_s2,n|^2 (before path loss).
    pub h2_sq: f64,
    /// |h_12|^2 (before path loss).
    pub h12_sq: f64,
    /// |h_SI|^2 residual self-interference gain.
    pub hsi_sq: f64,
}
