//! Per-realization SINR chain and the decoding thresholds shared by the
//! analytic and simulated paths.

use crate::params::{ChannelDraw, SystemParams};

/// Decoding thresholds and the two normalized outage abscissae.
///
/// `xi2` (and, at rho = 1, `xi1`) is `+inf` when the NOMA split cannot
/// support the cell-edge rate (`alpha2 <= alpha1 * gamma_th2`); the outage
/// expressions then degenerate to 1 rather than erroring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// SINR threshold of D1's own stream, `2^{R1} - 1`.
    pub gamma_th: f64,
    /// SINR threshold of the cell-edge stream, `2^{R2} - 1`.
    pub gamma_th2: f64,
    /// `gamma_th / (Pt (1 - rho) alpha1)`.
    pub xi1: f64,
    /// `gamma_th2 / (Pt (1 - rho) (alpha2 - alpha1 gamma_th2))`, or `+inf`.
    pub xi2: f64,
}

impl Thresholds {
    /// Larger of the two abscissae; drives the D1 outage event, which
    /// requires both SIC of the x2 stream and decoding of x1.
    #[inline]
    pub fn xi_max(&self) -> f64 {
        if self.xi1 > self.xi2 {
            self.xi1
        } else {
            self.xi2
        }
    }

    /// True when the NOMA split cannot deliver the cell-edge rate at any
    /// SNR (outage probability identically 1 on every path through D1).
    #[inline]
    pub fn degenerate(&self) -> bool {
        !self.xi2.is_finite()
    }
}

pub fn thresholds(p: &SystemParams) -> Thresholds {
    let gamma_th = libm::exp2(p.r1_target) - 1.0;
    let gamma_th2 = libm::exp2(p.r2_target) - 1.0;
    let pt_id = p.pt_w() * (1.0 - p.rho);
    let xi1 = if pt_id > 0.0 { gamma_th / (pt_id * p.alpha1) } else { f64::INFINITY };
    let margin = p.alpha2 - p.alpha1 * gamma_th2;
    let xi2 = if pt_id > 0.0 && margin > 0.0 {
        gamma_th2 / (pt_id * margin)
    } else {
        f64::INFINITY
    };
    Thresholds { gamma_th, gamma_th2, xi1, xi2 }
}

/// The five instantaneous SINRs of one fading realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBundle {
    /// D1 decoding the cell-edge stream x2 (pre-SIC).
    pub d1_x2: f64,
    /// D1 decoding its own stream x1 (post-SIC).
    pub d1_x1: f64,
    /// D2 on the direct S -> RIS -> D2 path.
    pub d2_direct: f64,
    /// D2 on the cooperative D1 -> D2 path, powered by the harvest.
    pub d2_coop: f64,
    /// MRC combination at D2.
    pub d2_mrc: f64,
}

/// Evaluate the SINR chain for one draw, given the instantaneous harvested
/// power `ph` (which feeds both D1's self-interference and the relay hop).
pub fn compute_sinrs(p: &SystemParams, d: &ChannelDraw, ph: f64) -> SinrBundle {
    debug_assert!(ph >= 0.0);
    let sigma2 = p.noise_power_w();
    let pt = p.pt_w();
    let h1_sq = p.beta_ss * p.beta_s1 * d.x1 * d.x1;
    let h2_sq = p.beta_ss * p.beta_s2 * d.h2_sq;
    let h12_sq = p.beta_12 * d.h12_sq;

    let id_power = (1.0 - p.rho) * pt * h1_sq;
    let si = d.hsi_sq * ph + sigma2;
    let d1_x2 = id_power * p.alpha2 / (id_power * p.alpha1 + si);
    let d1_x1 = id_power * p.alpha1 / si;
    let d2_direct = pt * h2_sq * p.alpha2 / (pt * h2_sq * p.alpha1 + sigma2);
    let d2_coop = ph * h12_sq / sigma2;
    SinrBundle { d1_x2, d1_x1, d2_direct, d2_coop, d2_mrc: d2_direct + d2_coop }
}
