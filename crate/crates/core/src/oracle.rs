//! Brute-force audits of the closed forms.
//!
//! Each audit evaluates one relationship on an explicit grid and returns an
//! [`OracleReport`]. The exhaustive sweeps here never call the closed-form
//! optimum or inversion they are checking.

use std::fmt;

use rayon::prelude::*;

use crate::capacity::{self, capacity_approx, log_lower_bound, optimal_pilot};
use crate::config::{EpsilonMode, SystemConfig};
use crate::crb::{crb_position, crb_toa, CrbInputs};
use crate::error::Result;
use crate::link::{free_space_beta, nominal_snrs, LinkState};
use crate::tradeoff::{self, DominanceSummary};
use crate::units::SPEED_OF_LIGHT;

/// Floor of the relative-error denominator.
pub const REL_FLOOR: f64 = 1e-30;

pub const TIME_ROUNDTRIP_TOL: f64 = 1e-9;
pub const FREQ_ROUNDTRIP_TOL: f64 = 1e-12;
pub const EXACTNESS_TOL: f64 = 1e-12;
pub const INEQUALITY_SLACK: f64 = 1e-12;
pub const PILOT_DERIVATIVE_TOL: f64 = 1e-6;
pub const SCALING_TOL: f64 = 1e-12;
pub const LINK_TOL: f64 = 1e-12;
pub const DOMINANCE_SHARE: f64 = 0.9;

pub fn relative_error(got: f64, expected: f64) -> f64 {
    (got - expected).abs() / expected.abs().max(REL_FLOOR)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub samples: usize,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub violations: usize,
    pub tolerance: f64,
}

impl OracleReport {
    fn new(name: &str, tolerance: f64) -> Self {
        OracleReport {
            name: name.to_owned(),
            samples: 0,
            max_abs_error: 0.0,
            max_rel_error: 0.0,
            violations: 0,
            tolerance,
        }
    }

    /// Records a comparison against a relative tolerance.
    fn compare(&mut self, got: f64, expected: f64) {
        let abs = (got - expected).abs();
        let rel = relative_error(got, expected);
        self.record(abs, rel, !(rel <= self.tolerance));
    }

    fn record(&mut self, abs: f64, rel: f64, violated: bool) {
        self.samples += 1;
        self.max_abs_error = self.max_abs_error.max(abs);
        self.max_rel_error = self.max_rel_error.max(rel);
        if violated {
            self.violations += 1;
        }
    }

    fn merge(mut self, other: OracleReport) -> Self {
        self.samples += other.samples;
        self.max_abs_error = self.max_abs_error.max(other.max_abs_error);
        self.max_rel_error = self.max_rel_error.max(other.max_rel_error);
        self.violations += other.violations;
        self
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.samples > 0
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} samples={} max_abs_error={:e} max_rel_error={:e} violations={} tolerance={:e} verdict={}",
            self.name,
            self.samples,
            self.max_abs_error,
            self.max_rel_error,
            self.violations,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Grid sizes for the audits.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditGrid {
    /// Capacity-loss points for the trade-off round trips and dominance.
    pub loss_points: usize,
    /// Localization bandwidths for the frequency exactness check.
    pub bandwidth_points: usize,
    /// Points per axis of the log-spaced `(x, x_bar)` grid.
    pub inequality_per_axis: usize,
    pub inequality_log10_range: (f64, f64),
    /// Communication-block lengths for the pilot audit.
    pub pilot_symbols: Vec<u32>,
}

impl Default for AuditGrid {
    fn default() -> Self {
        AuditGrid {
            loss_points: 100,
            bandwidth_points: 50,
            inequality_per_axis: 100,
            inequality_log10_range: (-6.0, 6.0),
            pilot_symbols: vec![2, 20, 200],
        }
    }
}

/// Rebuilds every derived link quantity from the configuration and the
/// link's distance and compares.
pub fn audit_link_state(link: &LinkState, config: &SystemConfig) -> Result<OracleReport> {
    let mut report = OracleReport::new("link_state", LINK_TOL);
    let beta = free_space_beta(config, link.distance)?;
    let (rho_ul, rho_dl) = nominal_snrs(config);
    let gamma = match config.gamma_override_db {
        Some(db) => 10f64.powf(db / 10.0),
        None => rho_dl * beta,
    };
    let epsilon = match config.epsilon_mode {
        EpsilonMode::LiteralOne => 1.0,
        EpsilonMode::DlOverUl => rho_dl / rho_ul,
    };
    let n = f64::from(config.n_antennas);
    report.compare(link.beta, beta);
    report.compare(link.rho_ul, rho_ul);
    report.compare(link.rho_dl, rho_dl);
    report.compare(link.gamma, gamma);
    report.compare(link.toa, link.distance / SPEED_OF_LIGHT);
    report.compare(link.alpha, 1.0 + (n + 1.0) * rho_dl * beta);
    report.compare(link.delta, rho_ul * beta);
    report.compare(link.epsilon, epsilon);
    report.compare(f64::from(link.n_antennas), n);
    Ok(report)
}

/// Exhaustive integer pilot search against the continuous optimum, plus a
/// central-difference derivative at the continuous optimum.
pub fn audit_pilot_optimum(
    link: &LinkState,
    config: &SystemConfig,
    symbol_samples: &[u32],
) -> Result<OracleReport> {
    let mut report = OracleReport::new("pilot_optimum", PILOT_DERIVATIVE_TOL);
    let b = config.total_bandwidth;
    let tt = f64::from(config.symbols_total);
    for &symbols in symbol_samples
        .iter()
        .filter(|&&s| s >= 2 && s <= config.symbols_total)
    {
        let tc = f64::from(symbols);
        let mut best = (1u32, f64::NEG_INFINITY);
        for pilot in 1..symbols {
            let c = capacity_approx(b, tc, f64::from(pilot), link, tt)?;
            if c > best.1 {
                best = (pilot, c);
            }
        }
        let continuous = optimal_pilot(tc, link);
        let clamped = continuous.clamp(1.0, tc - 1.0);
        let neighbours = [clamped.floor() as u32, clamped.ceil() as u32];
        let miss = !neighbours.contains(&best.0);
        let gap = (f64::from(best.0) - clamped).abs();
        report.record(gap, 0.0, miss);

        // The derivative check needs the optimum strictly inside (0, tc).
        if continuous < tc {
            let h = 1e-4 * continuous.min(tc - continuous);
            let f = |p: f64| capacity_approx(b, tc, p, link, tt);
            let value = f(continuous)?;
            let slope = (f(continuous + h)? - f(continuous - h)?) / (2.0 * h);
            let rel = slope.abs() / value.abs().max(REL_FLOOR);
            report.record(slope.abs(), rel, !(rel < PILOT_DERIVATIVE_TOL));
        }
    }
    Ok(report)
}

/// `(x, x_bar)` log-spaced grid: the bound must not exceed `ln(1 + x)` by
/// more than the slack, and must equal it on the diagonal.
pub fn audit_log_lower_bound(grid: &AuditGrid) -> Result<OracleReport> {
    let n = grid.inequality_per_axis.max(2);
    let (lo, hi) = grid.inequality_log10_range;
    let axis: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect();
    let off_diagonal = axis
        .par_iter()
        .map(|&x| {
            let mut r = OracleReport::new("log_lower_bound", INEQUALITY_SLACK);
            for &x_bar in &axis {
                let bound = log_lower_bound(x, x_bar)?;
                let exact = x.ln_1p();
                let excess = (bound - exact).max(0.0);
                r.record(
                    excess,
                    excess / exact.max(REL_FLOOR),
                    bound > exact + INEQUALITY_SLACK,
                );
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = off_diagonal.into_iter().fold(
        OracleReport::new("log_lower_bound", INEQUALITY_SLACK),
        OracleReport::merge,
    );
    for &x in &axis {
        let gap = (log_lower_bound(x, x)? - x.ln_1p()).abs();
        report.record(gap, gap / x.ln_1p().max(REL_FLOOR), gap > INEQUALITY_SLACK);
    }
    Ok(report)
}

pub fn audit_time_tradeoff_roundtrip(
    link: &LinkState,
    config: &SystemConfig,
    points: usize,
) -> Result<OracleReport> {
    let mut report = OracleReport::new("time_tradeoff_roundtrip", TIME_ROUNDTRIP_TOL);
    let tt = f64::from(config.symbols_total);
    let mut losses = vec![0.0];
    losses.extend(tradeoff::capacity_loss_grid(points, link, config)?);
    for loss in losses {
        let closed = tradeoff::crb_loss_time_closed_form(loss, link, config)?;
        let composed = tt / tradeoff::tau_l_from_capacity_loss(loss, link, config)?;
        report.compare(closed, composed);
    }
    Ok(report)
}

pub fn audit_freq_tradeoff_roundtrip(
    link: &LinkState,
    config: &SystemConfig,
    points: usize,
) -> Result<OracleReport> {
    let mut report = OracleReport::new("freq_tradeoff_roundtrip", FREQ_ROUNDTRIP_TOL);
    for loss in tradeoff::capacity_loss_grid(points, link, config)? {
        let closed = tradeoff::crb_loss_freq_closed_form(loss, link, config)?;
        let bandwidth = tradeoff::bandwidth_from_capacity_loss(loss, link, config)?;
        let composed = tradeoff::crb_loss_freq(bandwidth, link, config)?;
        report.compare(closed, composed);
    }
    Ok(report)
}

/// Both closed-form composition identities.
pub fn audit_tradeoff_roundtrips(
    link: &LinkState,
    config: &SystemConfig,
    points: usize,
) -> Result<[OracleReport; 2]> {
    Ok([
        audit_time_tradeoff_roundtrip(link, config, points)?,
        audit_freq_tradeoff_roundtrip(link, config, points)?,
    ])
}

/// Frequency-domain closed-form loss against the direct difference of
/// optimal capacities.
pub fn audit_frequency_exactness(
    link: &LinkState,
    config: &SystemConfig,
    points: usize,
) -> Result<OracleReport> {
    let mut report = OracleReport::new("frequency_exactness", EXACTNESS_TOL);
    let b = config.total_bandwidth;
    let tt = f64::from(config.symbols_total);
    let full = capacity::optimal_capacity(b, tt, link, tt)?;
    for i in 1..=points {
        let loc = b * i as f64 / (points + 1) as f64;
        let direct = full - capacity::optimal_capacity(b - loc, tt, link, tt)?;
        report.compare(tradeoff::capacity_loss_freq(loc, link, config)?, direct);
    }
    Ok(report)
}

/// Closed-form time-domain loss never above the exact difference, for every
/// whole number of localization symbols.
pub fn audit_time_bound_ordering(link: &LinkState, config: &SystemConfig) -> Result<OracleReport> {
    let mut report = OracleReport::new("time_bound_ordering", 0.0);
    for tau in 1..config.symbols_total {
        let loss = tradeoff::capacity_loss_time(f64::from(tau), link, config)?;
        let excess = (loss.closed_form - loss.exact_form).max(0.0);
        report.record(
            excess,
            excess / loss.exact_form.abs().max(REL_FLOOR),
            loss.closed_form > loss.exact_form,
        );
    }
    Ok(report)
}

/// CRB scaling laws: the time-domain CRB loss is the symbol ratio, the
/// position CRB halves with doubled symbols or SNR, and the ToA bound falls
/// with the square of the bandwidth.
pub fn audit_crb_scaling(link: &LinkState, config: &SystemConfig) -> Result<OracleReport> {
    let mut report = OracleReport::new("crb_scaling", SCALING_TOL);
    let b = config.total_bandwidth;
    let tt = f64::from(config.symbols_total);
    let full = crb_position(&CrbInputs::new(config, link, b, tt))?;
    let louder = LinkState {
        gamma: 2.0 * link.gamma,
        ..*link
    };
    for tau in 1..config.symbols_total {
        let tau = f64::from(tau);
        let at = crb_position(&CrbInputs::new(config, link, b, tau))?;
        report.compare(tradeoff::crb_loss_time(tau, config)?, at / full);
        let doubled = crb_position(&CrbInputs::new(config, link, b, 2.0 * tau))?;
        report.compare(doubled, at / 2.0);
        let boosted = crb_position(&CrbInputs::new(config, &louder, b, tau))?;
        report.compare(boosted, at / 2.0);
    }
    for k in 1..=config.resource_elements() {
        let bl = f64::from(k) * config.subcarrier_bandwidth;
        let toa = crb_toa(&CrbInputs::new(config, link, bl, tt))?;
        let toa_full = crb_toa(&CrbInputs::new(config, link, b, tt))?;
        report.compare(toa / toa_full, (b / bl).powi(2));
    }
    Ok(report)
}

/// Dominance audit outcome with the per-scenario breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub report: OracleReport,
    pub a: DominanceSummary,
    pub b: DominanceSummary,
}

impl DominanceReport {
    /// Difference of the frequency-dominance shares of the two scenarios.
    pub fn dominance_difference(&self) -> f64 {
        self.a.frequency_fraction() - self.b.frequency_fraction()
    }
}

/// Compares time and frequency frontiers for two scenarios. Passes when
/// frequency-domain allocation wins on at least [`DOMINANCE_SHARE`] of the
/// grid in scenario `a` and time-domain allocation wins as often in `b`.
pub fn audit_frontier_dominance(
    a: (&SystemConfig, &LinkState),
    b: (&SystemConfig, &LinkState),
    points: usize,
) -> Result<DominanceReport> {
    let sa = tradeoff::compare_frontiers(points, a.1, a.0)?;
    let sb = tradeoff::compare_frontiers(points, b.1, b.0)?;
    let mut report = OracleReport::new("frontier_dominance", DOMINANCE_SHARE);
    for (share, summary) in [(sa.frequency_fraction(), &sa), (sb.time_fraction(), &sb)] {
        report.samples += summary.samples;
        let shortfall = (DOMINANCE_SHARE - share).max(0.0);
        report.max_abs_error = report.max_abs_error.max(shortfall);
        report.max_rel_error = report.max_rel_error.max(shortfall / DOMINANCE_SHARE);
        if share < DOMINANCE_SHARE {
            report.violations += 1;
        }
    }
    Ok(DominanceReport {
        report,
        a: sa,
        b: sb,
    })
}

/// Small-array/long-range and large-array/short-range scenarios derived
/// from `base`: 8 antennas at 10 dB and 32 antennas at 30 dB.
pub fn reference_dominance_scenarios(
    base: &SystemConfig,
) -> Result<[(SystemConfig, LinkState); 2]> {
    let make = |n: u32, snr: f64| -> Result<(SystemConfig, LinkState)> {
        let cfg = SystemConfig {
            n_antennas: n,
            gamma_override_db: None,
            ..base.clone()
        };
        let link = crate::link::build_link_at_snr(&cfg, snr)?;
        let pinned = SystemConfig {
            gamma_override_db: Some(snr),
            ..cfg
        };
        Ok((pinned, link))
    };
    Ok([make(8, 10.0)?, make(32, 30.0)?])
}

/// Every audit for one scenario, in a fixed order.
pub fn run_suite(
    link: &LinkState,
    config: &SystemConfig,
    grid: &AuditGrid,
) -> Result<Vec<OracleReport>> {
    let [t1, t2] = audit_tradeoff_roundtrips(link, config, grid.loss_points)?;
    let [a, b] = reference_dominance_scenarios(config)?;
    let dominance = audit_frontier_dominance((&a.0, &a.1), (&b.0, &b.1), grid.loss_points)?;
    Ok(vec![
        audit_link_state(link, config)?,
        audit_pilot_optimum(link, config, &grid.pilot_symbols)?,
        audit_log_lower_bound(grid)?,
        t1,
        t2,
        audit_frequency_exactness(link, config, grid.bandwidth_points)?,
        audit_time_bound_ordering(link, config)?,
        audit_crb_scaling(link, config)?,
        dominance.report,
    ])
}
