//! Joint ToA/AoA localization bound for a single ULA anchor.
//!
//! The position estimate is `anchor + c t (cos theta, sin theta)`, so the
//! position CRB is the range-weighted AoA bound plus the ToA bound, both
//! scaled by `c^2`.

use std::f64::consts::PI;

use crate::config::SystemConfig;
use crate::error::{IlacError, Result};
use crate::link::LinkState;
use crate::units::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Copy)]
pub struct CrbInputs<'a> {
    /// Localization bandwidth `B_L`, Hz.
    pub bandwidth: f64,
    /// Localization symbols `tau_L`; may be fractional.
    pub symbols: f64,
    pub link: &'a LinkState,
    pub config: &'a SystemConfig,
}

impl<'a> CrbInputs<'a> {
    pub fn new(
        config: &'a SystemConfig,
        link: &'a LinkState,
        bandwidth: f64,
        symbols: f64,
    ) -> Self {
        CrbInputs {
            bandwidth,
            symbols,
            link,
            config,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.symbols > 0.0) {
            return Err(IlacError::domain(
                "localization symbols",
                "> 0",
                self.symbols,
            ));
        }
        if self.config.n_antennas < 2 {
            return Err(IlacError::domain(
                "antenna count",
                ">= 2",
                f64::from(self.config.n_antennas),
            ));
        }
        Ok(())
    }
}

/// AoA bound, rad^2.
pub fn crb_aoa(inputs: &CrbInputs<'_>) -> Result<f64> {
    inputs.check()?;
    let cfg = inputs.config;
    let cos_sq = cfg.theta.cos().powi(2);
    if !(cos_sq > 1e-15) {
        return Err(IlacError::SingularGeometry {
            theta: cfg.theta,
            cos_sq,
        });
    }
    let n = f64::from(cfg.n_antennas);
    let lambda = cfg.wavelength();
    let d = cfg.antenna_spacing();
    let denom = 4.0
        * PI
        * PI
        * d
        * d
        * inputs.link.gamma
        * cos_sq
        * n
        * (n - 1.0)
        * (2.0 * n - 1.0)
        * inputs.symbols;
    Ok(3.0 * lambda * lambda / denom)
}

/// ToA bound, s^2.
pub fn crb_toa(inputs: &CrbInputs<'_>) -> Result<f64> {
    inputs.check()?;
    if !(inputs.bandwidth > 0.0) {
        return Err(IlacError::domain(
            "localization bandwidth",
            "> 0",
            inputs.bandwidth,
        ));
    }
    let cfg = inputs.config;
    let denom = 8.0
        * PI
        * PI
        * inputs.bandwidth.powi(2)
        * (1.0 + cfg.waveform_coeff)
        * inputs.link.gamma
        * f64::from(cfg.n_antennas)
        * inputs.symbols;
    Ok(3.0 / denom)
}

/// Position bound, m^2, evaluated at the link's true ToA.
pub fn crb_position(inputs: &CrbInputs<'_>) -> Result<f64> {
    let c2 = SPEED_OF_LIGHT * SPEED_OF_LIGHT;
    let t = inputs.link.toa;
    Ok(c2 * t * t * crb_aoa(inputs)? + c2 * crb_toa(inputs)?)
}

/// Position from an anchor, an AoA estimate and a ToA estimate.
pub fn estimate_position(anchor: (f64, f64), theta_hat: f64, t_hat: f64) -> (f64, f64) {
    let range = SPEED_OF_LIGHT * t_hat;
    (
        anchor.0 + theta_hat.cos() * range,
        anchor.1 + theta_hat.sin() * range,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::build_link;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fixture() -> (SystemConfig, LinkState) {
        let cfg = SystemConfig {
            gamma_override_db: Some(20.0),
            ..SystemConfig::default()
        };
        let link = build_link(&cfg, 100.0).unwrap();
        (cfg, link)
    }

    // 40-digit hand evaluations: N_T = 8, d_A = lambda/2, theta = 0,
    // gamma = 100, tau_L = 200, B_L = 20 MHz, waveform coefficient 1.
    const AOA_HAND: f64 = 1.809_306_850_756_031_6e-8;
    const TOA_HAND: f64 = 2.968_394_052_021_614_4e-22;
    const POS_HAND_100M: f64 = 2.076_092_803_434_630_9e-4;

    #[test]
    fn aoa_hand_value() {
        let (cfg, link) = fixture();
        let v = crb_aoa(&CrbInputs::new(&cfg, &link, 20e6, 200.0)).unwrap();
        assert_relative_eq!(v, AOA_HAND, max_relative = 1e-13);
    }

    #[test]
    fn toa_hand_value() {
        let (cfg, link) = fixture();
        let v = crb_toa(&CrbInputs::new(&cfg, &link, 20e6, 200.0)).unwrap();
        assert_relative_eq!(v, TOA_HAND, max_relative = 1e-13);
    }

    #[test]
    fn position_hand_value() {
        let (cfg, link) = fixture();
        let v = crb_position(&CrbInputs::new(&cfg, &link, 20e6, 200.0)).unwrap();
        assert_relative_eq!(v, POS_HAND_100M, max_relative = 1e-13);
    }

    #[test]
    fn aoa_scales_inverse_in_symbols_and_snr() {
        let (cfg, link) = fixture();
        let base = crb_aoa(&CrbInputs::new(&cfg, &link, 20e6, 100.0)).unwrap();
        let doubled = crb_aoa(&CrbInputs::new(&cfg, &link, 20e6, 200.0)).unwrap();
        assert_relative_eq!(base / doubled, 2.0, max_relative = 1e-14);
        let louder = LinkState {
            gamma: 2.0 * link.gamma,
            ..link
        };
        let v = crb_aoa(&CrbInputs::new(&cfg, &louder, 20e6, 100.0)).unwrap();
        assert_relative_eq!(base / v, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn toa_scales_with_bandwidth_and_waveform() {
        let (cfg, link) = fixture();
        let narrow = crb_toa(&CrbInputs::new(&cfg, &link, 5e6, 50.0)).unwrap();
        let wide = crb_toa(&CrbInputs::new(&cfg, &link, 10e6, 50.0)).unwrap();
        assert_relative_eq!(narrow / wide, 4.0, max_relative = 1e-14);
        let plain = SystemConfig {
            waveform_coeff: 0.0,
            ..cfg.clone()
        };
        let p = crb_toa(&CrbInputs::new(&plain, &link, 10e6, 50.0)).unwrap();
        assert_relative_eq!(wide / p, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn zero_range_leaves_toa_term_only() {
        let (cfg, link) = fixture();
        let at_anchor = LinkState { toa: 0.0, ..link };
        let inputs = CrbInputs::new(&cfg, &at_anchor, 20e6, 10.0);
        assert_eq!(
            crb_position(&inputs).unwrap(),
            SPEED_OF_LIGHT * SPEED_OF_LIGHT * crb_toa(&inputs).unwrap()
        );
    }

    #[test]
    fn singular_geometry_reported() {
        let (cfg, link) = fixture();
        let bad = SystemConfig {
            theta: std::f64::consts::FRAC_PI_2,
            ..cfg
        };
        assert!(matches!(
            crb_aoa(&CrbInputs::new(&bad, &link, 20e6, 10.0)),
            Err(IlacError::SingularGeometry { .. })
        ));
    }

    #[test]
    fn non_positive_inputs_rejected() {
        let (cfg, link) = fixture();
        assert!(crb_toa(&CrbInputs::new(&cfg, &link, 0.0, 10.0)).is_err());
        assert!(crb_position(&CrbInputs::new(&cfg, &link, 20e6, 0.0)).is_err());
    }

    #[test]
    fn position_estimates_on_axes() {
        let d = 250.0;
        let t = d / SPEED_OF_LIGHT;
        let (x, y) = estimate_position((3.0, -4.0), 0.0, t);
        assert_relative_eq!(x, 253.0, max_relative = 1e-14);
        assert_eq!(y, -4.0);
        assert_eq!(estimate_position((3.0, -4.0), 1.1, 0.0), (3.0, -4.0));
        let (x, y) = estimate_position((0.0, 0.0), std::f64::consts::FRAC_PI_2, t);
        assert!(x.abs() <= 1e-9 * d);
        assert_relative_eq!(y, d, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn position_ratio_is_symbol_ratio(tau in 1.0f64..200.0, snr in -10.0f64..40.0, dist in 10.0f64..5000.0) {
            let cfg = SystemConfig { gamma_override_db: Some(snr), ..SystemConfig::default() };
            let link = build_link(&cfg, dist).unwrap();
            let part = crb_position(&CrbInputs::new(&cfg, &link, cfg.total_bandwidth, tau)).unwrap();
            let full = crb_position(&CrbInputs::new(&cfg, &link, cfg.total_bandwidth, 200.0)).unwrap();
            prop_assert!(((part / full) / (200.0 / tau) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn position_crb_decreases_in_each_resource(tau in 1.0f64..199.0, bw in 1e5f64..2e7, n in 2u32..64) {
            let cfg = SystemConfig { n_antennas: n, gamma_override_db: Some(10.0), ..SystemConfig::default() };
            let link = build_link(&cfg, 800.0).unwrap();
            let at = |cfg: &SystemConfig, link: &LinkState, b: f64, t: f64| {
                crb_position(&CrbInputs::new(cfg, link, b, t)).unwrap()
            };
            let base = at(&cfg, &link, bw, tau);
            prop_assert!(at(&cfg, &link, bw, tau + 1.0) < base);
            prop_assert!(at(&cfg, &link, bw * 1.1, tau) < base);
            let louder = LinkState { gamma: link.gamma * 1.1, ..link };
            prop_assert!(at(&cfg, &louder, bw, tau) < base);
            let bigger = SystemConfig { n_antennas: n + 1, ..cfg.clone() };
            prop_assert!(at(&bigger, &link, bw, tau) < base);
        }

        #[test]
        fn estimate_lies_at_range(x0 in -1e3f64..1e3, y0 in -1e3f64..1e3, th in -3.1f64..3.1, t in 1e-9f64..1e-4) {
            let (x, y) = estimate_position((x0, y0), th, t);
            let r = ((x - x0).powi(2) + (y - y0).powi(2)).sqrt();
            prop_assert!((r / (SPEED_OF_LIGHT * t) - 1.0).abs() < 1e-9);
        }
    }
}
