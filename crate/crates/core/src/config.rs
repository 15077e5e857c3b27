//! Physical and radio parameters of one gNB/UE scenario.

use std::fmt;
use std::str::FromStr;

use crate::error::{IlacError, Result};
use crate::units;

/// Which reading of the capacity-model ratio `epsilon` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EpsilonMode {
    /// `epsilon = rho_dl / rho_dl = 1`.
    #[default]
    LiteralOne,
    /// `epsilon = rho_dl / rho_ul`.
    DlOverUl,
}

impl EpsilonMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EpsilonMode::LiteralOne => "literal_one",
            EpsilonMode::DlOverUl => "dl_over_ul",
        }
    }
}

impl fmt::Display for EpsilonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EpsilonMode {
    type Err = IlacError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal_one" => Ok(EpsilonMode::LiteralOne),
            "dl_over_ul" => Ok(EpsilonMode::DlOverUl),
            other => Err(IlacError::Config {
                key: "epsilon_mode",
                reason: format!("expected `literal_one` or `dl_over_ul`, got `{other}`"),
            }),
        }
    }
}

/// Scenario parameters. Powers and noise are in dBm, everything else SI.
///
/// The defaults are the 2.6 GHz / 20 MHz / 200-symbol single-gNB setting
/// with an omnidirectional 8-element ULA at half-wavelength spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub carrier_freq: f64,
    /// Total bandwidth `B`, Hz.
    pub total_bandwidth: f64,
    /// Width of one resource element in frequency, Hz.
    pub subcarrier_bandwidth: f64,
    /// Symbols per coherence interval, `tau_T`.
    pub symbols_total: u32,
    pub n_antennas: u32,
    /// ULA element spacing in meters; `None` means half a wavelength.
    pub antenna_spacing: Option<f64>,
    /// Angle between the UE direction and the array orientation, radians.
    pub theta: f64,
    pub p_gnb_dbm: f64,
    pub p_ue_dbm: f64,
    /// Linear gain, not dB.
    pub gain_gnb: f64,
    /// Linear gain, not dB.
    pub gain_ue: f64,
    /// Noise power over the full bandwidth, dBm.
    pub noise_dbm: f64,
    /// Waveform-dependent ToA coefficient.
    pub waveform_coeff: f64,
    pub epsilon_mode: EpsilonMode,
    /// Sets the localization SNR directly instead of `rho_dl * beta`.
    pub gamma_override_db: Option<f64>,
    pub anchor: (f64, f64),
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            carrier_freq: 2.6e9,
            total_bandwidth: 20e6,
            subcarrier_bandwidth: 180e3,
            symbols_total: 200,
            n_antennas: 8,
            antenna_spacing: None,
            theta: 0.0,
            p_gnb_dbm: 13.0,
            p_ue_dbm: 13.0,
            gain_gnb: 1.0,
            gain_ue: 1.0,
            noise_dbm: -101.0,
            waveform_coeff: 1.0,
            epsilon_mode: EpsilonMode::LiteralOne,
            gamma_override_db: None,
            anchor: (0.0, 0.0),
        }
    }
}

impl SystemConfig {
    pub fn wavelength(&self) -> f64 {
        units::wavelength(self.carrier_freq)
    }

    pub fn antenna_spacing(&self) -> f64 {
        self.antenna_spacing
            .unwrap_or_else(|| self.wavelength() / 2.0)
    }

    /// Number of whole resource elements that fit in the total bandwidth.
    pub fn resource_elements(&self) -> u32 {
        // Tolerate representation error in e.g. 20e6 / 200e3.
        (self.total_bandwidth / self.subcarrier_bandwidth + 1e-9).floor() as u32
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(IlacError::Config {
                    key,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        }
        fn finite(key: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(IlacError::Config {
                    key,
                    reason: format!("must be finite, got {v}"),
                })
            }
        }

        positive("carrier_freq_hz", self.carrier_freq)?;
        positive("total_bandwidth_hz", self.total_bandwidth)?;
        positive("subcarrier_bandwidth_hz", self.subcarrier_bandwidth)?;
        if self.resource_elements() < 2 {
            return Err(IlacError::Config {
                key: "subcarrier_bandwidth_hz",
                reason: format!(
                    "total bandwidth {} Hz holds fewer than two {} Hz resource elements",
                    self.total_bandwidth, self.subcarrier_bandwidth
                ),
            });
        }
        if self.symbols_total < 2 {
            return Err(IlacError::Config {
                key: "symbols_total",
                reason: format!("need at least 2 symbols, got {}", self.symbols_total),
            });
        }
        if self.n_antennas < 2 {
            return Err(IlacError::Config {
                key: "n_antennas",
                reason: format!("a ULA needs at least 2 elements, got {}", self.n_antennas),
            });
        }
        if let Some(d) = self.antenna_spacing {
            positive("antenna_spacing_m", d)?;
        }
        if !(self.theta.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(IlacError::Config {
                key: "theta_deg",
                reason: format!("|theta| must be below 90 degrees, got {} rad", self.theta),
            });
        }
        finite("p_gnb_dbm", self.p_gnb_dbm)?;
        finite("p_ue_dbm", self.p_ue_dbm)?;
        positive("gain_gnb", self.gain_gnb)?;
        positive("gain_ue", self.gain_ue)?;
        finite("noise_dbm", self.noise_dbm)?;
        if !(self.waveform_coeff >= 0.0 && self.waveform_coeff.is_finite()) {
            return Err(IlacError::Config {
                key: "waveform_coeff",
                reason: format!("must be >= 0, got {}", self.waveform_coeff),
            });
        }
        if let Some(g) = self.gamma_override_db {
            finite("snr_db", g)?;
        }
        finite("anchor_x_m", self.anchor.0)?;
        finite("anchor_y_m", self.anchor.1)?;
        Ok(())
    }
}
