//! Downlink maximum-ratio capacity with uplink-pilot channel estimation.
//!
//! All capacities are in nats/s (natural log). The exact form follows the
//! massive-MIMO expression with mean-square channel estimate
//! `nu = tau_P rho_ul beta^2 / (1 + tau_P rho_ul beta)`; the approximate
//! form comes from lower-bounding `ln(1 + x)` around an expansion point,
//! which turns the pilot trade-off into `-(a / tau_P) - b tau_P` and gives
//! a closed-form optimal pilot length.

use crate::error::{IlacError, Result};
use crate::link::LinkState;

/// Inputs of the exact capacity. Symbol counts are whole symbols.
#[derive(Debug, Clone, Copy)]
pub struct CapacityInputs<'a> {
    /// Communication bandwidth `B_C`, Hz.
    pub bandwidth: f64,
    /// Symbols given to communication, `tau'_T`.
    pub symbols_comm: u32,
    /// Pilot symbols `tau_P`.
    pub pilot: u32,
    pub symbols_total: u32,
    pub link: &'a LinkState,
}

impl CapacityInputs<'_> {
    fn check(&self) -> Result<()> {
        if !(self.bandwidth > 0.0) {
            return Err(IlacError::domain(
                "communication bandwidth",
                "> 0",
                self.bandwidth,
            ));
        }
        if self.symbols_comm > self.symbols_total {
            return Err(IlacError::Range {
                what: "communication symbols",
                value: f64::from(self.symbols_comm),
                lo: 1.0,
                hi: f64::from(self.symbols_total) + 1.0,
            });
        }
        if self.pilot == 0 {
            return Err(IlacError::domain("pilot length", ">= 1", 0.0));
        }
        if self.pilot >= self.symbols_comm {
            return Err(IlacError::NoAirtime {
                pilot: f64::from(self.pilot),
                symbols: f64::from(self.symbols_comm),
            });
        }
        Ok(())
    }
}

/// Mean square of the channel estimate, `nu`.
pub fn channel_estimate_power(link: &LinkState, pilot: f64) -> f64 {
    let p = pilot * link.rho_ul * link.beta;
    p * link.beta / (1.0 + p)
}

/// Effective downlink SINR `N_T rho_dl nu / (rho_dl beta)` of the exact capacity.
pub fn exact_sinr(link: &LinkState, pilot: f64) -> f64 {
    let nu = channel_estimate_power(link, pilot);
    f64::from(link.n_antennas) * link.rho_dl * nu / (link.rho_dl * link.beta)
}

pub fn capacity_exact(inputs: &CapacityInputs<'_>) -> Result<f64> {
    inputs.check()?;
    let pilot = f64::from(inputs.pilot);
    let data_fraction = (f64::from(inputs.symbols_comm) - pilot) / f64::from(inputs.symbols_total);
    Ok(inputs.bandwidth * data_fraction * exact_sinr(inputs.link, pilot).ln_1p())
}

/// Tangent-style lower bound on `ln(1 + x)` expanded at `x_bar`:
/// `ln(1 + x_bar) + x_bar / (1 + x_bar) * (1 - x_bar / x)`.
pub fn log_lower_bound(x: f64, x_bar: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(IlacError::domain("x", "> 0", x));
    }
    if !(x_bar > 0.0) {
        return Err(IlacError::domain("x_bar", "> 0", x_bar));
    }
    Ok(x_bar.ln_1p() + x_bar / (1.0 + x_bar) * (1.0 - x_bar / x))
}

/// Approximate capacity with a continuous pilot length:
/// `(B_C / tau_T) (tau' L - tau' K / tau_P - tau_P L + K)`
/// where `L = ln(alpha / (1 + delta))` and `K = N_T epsilon / alpha`.
pub fn capacity_approx(
    bandwidth: f64,
    symbols_comm: f64,
    pilot: f64,
    link: &LinkState,
    symbols_total: f64,
) -> Result<f64> {
    if !(pilot > 0.0 && pilot < symbols_comm) {
        return Err(IlacError::Range {
            what: "pilot length",
            value: pilot,
            lo: 0.0,
            hi: symbols_comm,
        });
    }
    let l = link.log_snr();
    let k = link.pilot_penalty();
    let bracket = symbols_comm * l - symbols_comm * k / pilot - pilot * l + k;
    Ok(bandwidth / symbols_total * bracket)
}

/// Pilot length maximizing [`capacity_approx`], `sqrt(tau' N_T eps / (alpha L))`.
///
/// Not rounded or clamped.
pub fn optimal_pilot(symbols_comm: f64, link: &LinkState) -> f64 {
    (symbols_comm * link.pilot_penalty() / link.log_snr()).sqrt()
}

/// Share of the communication block spent on the optimal pilot.
pub fn pilot_overhead(symbols_comm: f64, link: &LinkState) -> f64 {
    optimal_pilot(symbols_comm, link) / symbols_comm
}

/// [`capacity_approx`] evaluated at [`optimal_pilot`].
pub fn optimal_capacity(
    bandwidth: f64,
    symbols_comm: f64,
    link: &LinkState,
    symbols_total: f64,
) -> Result<f64> {
    let pilot = optimal_pilot(symbols_comm, link);
    capacity_approx(bandwidth, symbols_comm, pilot, link, symbols_total)
}

/// Closed form of [`optimal_capacity`]:
/// `(B_C / tau_T) (tau' L - 2 sqrt(tau' K L) + K)`.
pub fn optimal_capacity_closed_form(
    bandwidth: f64,
    symbols_comm: f64,
    link: &LinkState,
    symbols_total: f64,
) -> f64 {
    let l = link.log_snr();
    let k = link.pilot_penalty();
    bandwidth / symbols_total * (symbols_comm * l - 2.0 * (symbols_comm * k * l).sqrt() + k)
}

/// Integer pilot length maximizing `capacity(pilot)` over `1..symbols_comm`.
/// Ties go to the smallest pilot. Returns `None` when `symbols_comm < 2`.
pub fn integer_argmax<F>(symbols_comm: u32, mut capacity: F) -> Result<Option<(u32, f64)>>
where
    F: FnMut(u32) -> Result<f64>,
{
    let mut best: Option<(u32, f64)> = None;
    for pilot in 1..symbols_comm {
        let c = capacity(pilot)?;
        match best {
            Some((_, b)) if c <= b => {}
            _ => best = Some((pilot, c)),
        }
    }
    Ok(best)
}

/// Best integer pilot for [`capacity_approx`].
pub fn best_integer_pilot_approx(
    bandwidth: f64,
    symbols_comm: u32,
    link: &LinkState,
    symbols_total: u32,
) -> Result<Option<(u32, f64)>> {
    integer_argmax(symbols_comm, |p| {
        capacity_approx(
            bandwidth,
            f64::from(symbols_comm),
            f64::from(p),
            link,
            f64::from(symbols_total),
        )
    })
}

/// Best integer pilot for [`capacity_exact`].
pub fn best_integer_pilot_exact(
    bandwidth: f64,
    symbols_comm: u32,
    link: &LinkState,
    symbols_total: u32,
) -> Result<Option<(u32, f64)>> {
    integer_argmax(symbols_comm, |pilot| {
        capacity_exact(&CapacityInputs {
            bandwidth,
            symbols_comm,
            pilot,
            symbols_total,
            link,
        })
    })
}
