//! Cascaded-channel statistics: the moment-matched Gamma/Rayleigh
//! approximations of the RIS cascade and exact sampling of joint fading
//! realizations.
//!
//! With the RIS phases aligned to D1, the D1 cascade is the real sum
//! `X1 = sum_n |h_ss,n| |h_s1,n|`, approximated as Gamma; the D2 cascade
//! keeps effectively random phases, so `X2^2` is approximately exponential
//! with mean N.

use core::fmt;

use crate::params::{ChannelDraw, GammaParams, SystemParams};
use crate::rng::TrialRng;
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelError {
    Domain(&'static str),
    /// The moment-matching expressions degenerate (mu_ss^2 mu_s1^2 >= 1).
    DegenerateMoments,
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::Domain(msg) => write!(f, "domain error: {msg}"),
            ChannelError::DegenerateMoments => {
                write!(f, "degenerate moment matching: mu_ss^2 mu_s1^2 >= 1")
            }
        }
    }
}

impl core::error::Error for ChannelError {}

/// Mean of a Nakagami-m random variable:
/// `Gamma(m + 1/2) / Gamma(m) * sqrt(omega / m)`.
pub fn nakagami_mean(m: f64, omega: f64) -> Result<f64, ChannelError> {
    if !(m >= 0.5) || !m.is_finite() {
        return Err(ChannelError::Domain("Nakagami shape must be >= 0.5"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(ChannelError::Domain("Nakagami spread must be > 0"));
    }
    Ok(libm::exp(ln_gamma(m + 0.5) - ln_gamma(m)) * libm::sqrt(omega / m))
}

/// m-th raw moment of a Gamma random variable:
/// `scale^m * Gamma(shape + m) / Gamma(shape)`.
pub fn gamma_moment(g: &GammaParams, m: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..m {
        acc *= (g.shape + i as f64) * g.scale;
    }
    acc
}

/// Gamma approximations of the aligned cascade X1 and of X1^2.
///
/// X1 is matched through the per-element product mean; X1^2 through the 2nd
/// and 4th moments of the X1 approximation. Returns
/// `(x1_gamma, x1sq_gamma)`.
pub fn x1_approximations(
    p: &SystemParams,
) -> Result<(GammaParams, GammaParams), ChannelError> {
    let mu_ss = nakagami_mean(p.m_ss, p.omega_ss)?;
    let mu_s1 = nakagami_mean(p.m_s1, p.omega_s1)?;
    let mu = mu_ss * mu_s1;
    let musq = mu * mu;
    if musq >= 1.0 {
        return Err(ChannelError::DegenerateMoments);
    }
    let n = p.n_elements as f64;
    let k = n * musq / (1.0 - musq);
    let theta = (1.0 - musq) / mu;
    let x1_gamma = GammaParams { shape: k, scale: theta };

    // 2nd and 4th moments of Gamma(k, theta), with the difference
    // m4 - m2^2 expanded in closed form to avoid cancellation.
    let m2 = theta * theta * k * (k + 1.0);
    let var = theta * theta * theta * theta * k * (k + 1.0) * (4.0 * k + 6.0);
    let k1 = m2 * m2 / var;
    let theta1 = var / m2;
    Ok((x1_gamma, GammaParams { shape: k1, scale: theta1 }))
}

/// Approximations for the misaligned cascade: X2 is Rayleigh with scale
/// `sqrt(N/2)` and X2^2 exponential with mean N. Returns
/// `(rayleigh_scale, exp_mean)`.
pub fn x2_approximations(n_elements: u32) -> (f64, f64) {
    let n = n_elements as f64;
    (libm::sqrt(n / 2.0), n)
}

/// Draw one joint realization of all channels.
///
/// Each Nakagami magnitude is sampled exactly as `sqrt(Gamma(m, omega/m))`.
/// The source->RIS magnitudes are shared between the two cascades; the D2
/// cascade keeps a residual uniform phase per element after the RIS aligns
/// itself to D1.
pub fn sample_channel_draw(p: &SystemParams, rng: &mut TrialRng) -> ChannelDraw {
    let mut x1 = 0.0;
    let mut re = 0.0;
    let mut im = 0.0;
    for _ in 0..p.n_elements {
        let g_ss = libm::sqrt(rng.gamma(p.m_ss, p.omega_ss / p.m_ss));
        let g_s1 = libm::sqrt(rng.gamma(p.m_s1, p.omega_s1 / p.m_s1));
        let g_s2 = libm::sqrt(rng.gamma(p.m_s2, p.omega_s2 / p.m_s2));
        x1 += g_ss * g_s1;
        let psi = rng.phase();
        re += g_ss * g_s2 * libm::cos(psi);
        im += g_ss * g_s2 * libm::sin(psi);
    }
    ChannelDraw {
        x1,
        h2_sq: re * re + im * im,
        h12_sq: rng.exponential(1.0),
        hsi_sq: rng.exponential(p.omega),
    }
}

/// Draw only the aligned cascade X1; marginally identical to the `x1` field
/// of [`sample_channel_draw`] but much cheaper for harvested-power
/// statistics, which depend on nothing else.
pub fn sample_x1(p: &SystemParams, rng: &mut TrialRng) -> f64 {
    let mut x1 = 0.0;
    for _ in 0..p.n_elements {
        let g_ss = libm::sqrt(rng.gamma(p.m_ss, p.omega_ss / p.m_ss));
        let g_s1 = libm::sqrt(rng.gamma(p.m_s1, p.omega_s1 / p.m_s1));
        x1 += g_ss * g_s1;
    }
    x1
}
