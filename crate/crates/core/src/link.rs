//! Link budget: from scenario parameters to the dimensionless per-link
//! quantities consumed by the capacity and CRB models.

use std::f64::consts::PI;

use crate::config::{EpsilonMode, SystemConfig};
use crate::error::{IlacError, Result};
use crate::units::{self, SPEED_OF_LIGHT};

/// Derived per-link quantities for one UE position.
///
/// Fields are public so audits can check (and tests can break) the
/// construction identities; use [`build_link`] to get a consistent value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub n_antennas: u32,
    pub distance: f64,
    /// Large-scale fading coefficient.
    pub beta: f64,
    pub rho_ul: f64,
    pub rho_dl: f64,
    /// Localization SNR.
    pub gamma: f64,
    /// Time of arrival, seconds.
    pub toa: f64,
    /// `1 + (N_T + 1) * rho_dl * beta`.
    pub alpha: f64,
    /// `rho_ul * beta`.
    pub delta: f64,
    pub epsilon: f64,
}

impl LinkState {
    /// `ln(alpha / (1 + delta))`, the per-symbol log-SNR of the capacity bound.
    pub fn log_snr(&self) -> f64 {
        (self.alpha / (1.0 + self.delta)).ln()
    }

    /// `N_T * epsilon / alpha`, the pilot-penalty coefficient of the capacity bound.
    pub fn pilot_penalty(&self) -> f64 {
        f64::from(self.n_antennas) * self.epsilon / self.alpha
    }
}

/// Free-space large-scale fading `(lambda / (4 pi d))^2`.
pub fn free_space_beta(config: &SystemConfig, distance: f64) -> Result<f64> {
    if !(config.carrier_freq > 0.0) {
        return Err(IlacError::domain(
            "carrier frequency",
            "> 0",
            config.carrier_freq,
        ));
    }
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(IlacError::domain(
            "distance",
            "positive and finite",
            distance,
        ));
    }
    Ok((config.wavelength() / (4.0 * PI * distance)).powi(2))
}

/// Nominal uplink and downlink SNRs `P * G_gNB * G_UE / N`, linear.
pub fn nominal_snrs(config: &SystemConfig) -> (f64, f64) {
    let noise = units::dbm_to_watts(config.noise_dbm);
    let gains = config.gain_gnb * config.gain_ue;
    let ul = units::dbm_to_watts(config.p_ue_dbm) * gains / noise;
    let dl = units::dbm_to_watts(config.p_gnb_dbm) * gains / noise;
    (ul, dl)
}

/// Free-space distance at which `rho_dl * beta` equals `snr_db`.
///
/// Used when a scenario is specified by its operating SNR rather than by
/// a distance, so that ToA and fading stay consistent with that SNR.
pub fn distance_for_snr(config: &SystemConfig, snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(IlacError::domain("snr_db", "finite", snr_db));
    }
    let (_, rho_dl) = nominal_snrs(config);
    let beta = units::db_to_linear(snr_db) / rho_dl;
    Ok(config.wavelength() / (4.0 * PI * beta.sqrt()))
}

pub fn build_link(config: &SystemConfig, distance: f64) -> Result<LinkState> {
    config.validate()?;
    let beta = free_space_beta(config, distance)?;
    if beta > 1.0 {
        return Err(IlacError::Domain {
            what: "large-scale fading beta (distance inside the free-space near field)",
            requirement: "<= 1",
            value: beta,
        });
    }
    let (rho_ul, rho_dl) = nominal_snrs(config);
    let gamma = match config.gamma_override_db {
        Some(db) => units::db_to_linear(db),
        None => rho_dl * beta,
    };
    let n = f64::from(config.n_antennas);
    let alpha = 1.0 + (n + 1.0) * rho_dl * beta;
    let delta = rho_ul * beta;
    let epsilon = match config.epsilon_mode {
        EpsilonMode::LiteralOne => 1.0,
        EpsilonMode::DlOverUl => rho_dl / rho_ul,
    };
    let link = LinkState {
        n_antennas: config.n_antennas,
        distance,
        beta,
        rho_ul,
        rho_dl,
        gamma,
        toa: distance / SPEED_OF_LIGHT,
        alpha,
        delta,
        epsilon,
    };
    let log_snr = link.log_snr();
    if !(log_snr > 0.0) {
        return Err(IlacError::NonPositiveLogSnr {
            alpha,
            delta,
            log_snr,
        });
    }
    Ok(link)
}

/// Builds the link for a scenario given by its operating SNR: the distance
/// is solved from the link budget and the localization SNR is pinned to
/// `snr_db`.
pub fn build_link_at_snr(config: &SystemConfig, snr_db: f64) -> Result<LinkState> {
    let distance = distance_for_snr(config, snr_db)?;
    let pinned = SystemConfig {
        gamma_override_db: Some(snr_db),
        ..config.clone()
    };
    build_link(&pinned, distance)
}
