//! Capacity-loss versus CRB-loss trade-offs for splitting the resource
//! grid between communication and localization.
//!
//! Two splits are modelled. In the time domain, `tau_L` of the `tau_T`
//! symbols are reserved for localization and the whole bandwidth is used in
//! both blocks. In the frequency domain, `B_L` of the bandwidth is reserved
//! for localization over the whole coherence interval. Losses are measured
//! against the unsplit system: capacity loss is an absolute drop in nats/s,
//! CRB loss is the ratio of the split CRB to the CRB with every resource
//! given to localization.
//!
//! Every closed-form relationship is paired with a direct evaluation so the
//! two can be checked against each other (see [`crate::oracle`]).

use rayon::prelude::*;

use crate::capacity;
use crate::config::SystemConfig;
use crate::crb::{crb_position, CrbInputs};
use crate::error::{IlacError, Result};
use crate::link::LinkState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Time,
    Frequency,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Time => "time",
            Domain::Frequency => "frequency",
        }
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the communication block picks its pilot length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PilotPolicy {
    /// Continuous optimum of the approximate capacity, unclamped.
    #[default]
    ContinuousOptimal,
    /// Best whole number of pilot symbols for the approximate capacity.
    IntegerArgmax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Allocation {
    /// `loc_symbols` of `tau_T` go to localization.
    Time { loc_symbols: f64 },
    /// `loc_bandwidth` Hz of `B` go to localization.
    Frequency { loc_bandwidth: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceSplit {
    pub allocation: Allocation,
    pub pilot_policy: PilotPolicy,
}

impl ResourceSplit {
    pub fn time(loc_symbols: f64) -> Self {
        ResourceSplit {
            allocation: Allocation::Time { loc_symbols },
            pilot_policy: PilotPolicy::default(),
        }
    }

    pub fn frequency(loc_bandwidth: f64) -> Self {
        ResourceSplit {
            allocation: Allocation::Frequency { loc_bandwidth },
            pilot_policy: PilotPolicy::default(),
        }
    }

    pub fn with_policy(self, pilot_policy: PilotPolicy) -> Self {
        ResourceSplit {
            pilot_policy,
            ..self
        }
    }

    pub fn domain(&self) -> Domain {
        match self.allocation {
            Allocation::Time { .. } => Domain::Time,
            Allocation::Frequency { .. } => Domain::Frequency,
        }
    }

    /// Symbols used for localization (`tau_T` in the frequency domain).
    pub fn loc_symbols(&self, config: &SystemConfig) -> f64 {
        match self.allocation {
            Allocation::Time { loc_symbols } => loc_symbols,
            Allocation::Frequency { .. } => f64::from(config.symbols_total),
        }
    }

    /// Bandwidth used for localization (`B` in the time domain).
    pub fn loc_bandwidth(&self, config: &SystemConfig) -> f64 {
        match self.allocation {
            Allocation::Time { .. } => config.total_bandwidth,
            Allocation::Frequency { loc_bandwidth } => loc_bandwidth,
        }
    }

    pub fn comm_symbols(&self, config: &SystemConfig) -> f64 {
        match self.allocation {
            Allocation::Time { loc_symbols } => f64::from(config.symbols_total) - loc_symbols,
            Allocation::Frequency { .. } => f64::from(config.symbols_total),
        }
    }

    pub fn comm_bandwidth(&self, config: &SystemConfig) -> f64 {
        match self.allocation {
            Allocation::Time { .. } => config.total_bandwidth,
            Allocation::Frequency { loc_bandwidth } => config.total_bandwidth - loc_bandwidth,
        }
    }

    /// Share of the split-domain resource given to localization.
    pub fn alloc_fraction(&self, config: &SystemConfig) -> f64 {
        match self.allocation {
            Allocation::Time { loc_symbols } => loc_symbols / f64::from(config.symbols_total),
            Allocation::Frequency { loc_bandwidth } => loc_bandwidth / config.total_bandwidth,
        }
    }
}

/// Time-domain capacity loss in its two forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeCapacityLoss {
    /// `(B / tau_T) (tau_L L - 2 sqrt(tau_L N_T eps L / alpha))`.
    pub closed_form: f64,
    /// Difference of optimal approximate capacities, full minus reduced.
    pub exact_form: f64,
}

impl TimeCapacityLoss {
    /// The closed form goes negative for very small `tau_L`.
    pub fn is_negative(&self) -> bool {
        self.closed_form < 0.0
    }
}

/// One evaluated split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub split: ResourceSplit,
    /// Capacity of the communication block, nats/s.
    pub capacity: f64,
    /// Position CRB of the localization block, m^2.
    pub crb: f64,
    /// Closed-form capacity loss, nats/s.
    pub capacity_loss: f64,
    pub crb_loss: f64,
}

impl TradeoffPoint {
    pub fn negative_loss(&self) -> bool {
        self.capacity_loss < 0.0
    }
}

/// Frontier over one domain, ordered by allocation fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub domain: Domain,
    pub n_antennas: u32,
    pub gamma: f64,
    pub distance: f64,
    pub points: Vec<TradeoffPoint>,
}

fn full_symbols(config: &SystemConfig) -> f64 {
    f64::from(config.symbols_total)
}

/// `tau_T L - 2 sqrt(tau_T N_T eps L / alpha) + N_T eps / alpha`: the
/// per-hertz optimal capacity bracket of the full coherence interval.
fn full_interval_bracket(link: &LinkState, config: &SystemConfig) -> f64 {
    let l = link.log_snr();
    let k = link.pilot_penalty();
    let tt = full_symbols(config);
    tt * l - 2.0 * (tt * k * l).sqrt() + k
}

/// Optimal approximate capacity of the unsplit system, `C~(B, tau_T)`.
pub fn full_capacity(link: &LinkState, config: &SystemConfig) -> Result<f64> {
    let tt = full_symbols(config);
    capacity::optimal_capacity(config.total_bandwidth, tt, link, tt)
}

/// `points` capacity losses `C~(B, tau_T) i / points` for `i = 1..=points`.
pub fn capacity_loss_grid(
    points: usize,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<Vec<f64>> {
    let full = full_capacity(link, config)?;
    Ok((1..=points)
        .map(|i| full * i as f64 / points as f64)
        .collect())
}

pub fn capacity_loss_time(
    loc_symbols: f64,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<TimeCapacityLoss> {
    let tt = full_symbols(config);
    if !(0.0..tt).contains(&loc_symbols) {
        return Err(IlacError::Range {
            what: "localization symbols",
            value: loc_symbols,
            lo: 0.0,
            hi: tt,
        });
    }
    if loc_symbols == 0.0 {
        return Ok(TimeCapacityLoss {
            closed_form: 0.0,
            exact_form: 0.0,
        });
    }
    let l = link.log_snr();
    let k = link.pilot_penalty();
    let b = config.total_bandwidth;
    let closed_form = b / tt * (loc_symbols * l - 2.0 * (loc_symbols * k * l).sqrt());
    let full = capacity::optimal_capacity_closed_form(b, tt, link, tt);
    let reduced = capacity::optimal_capacity_closed_form(b, tt - loc_symbols, link, tt);
    Ok(TimeCapacityLoss {
        closed_form,
        exact_form: full - reduced,
    })
}

/// Inverts the closed-form time-domain capacity loss for `tau_L`, taking
/// the larger root.
pub fn tau_l_from_capacity_loss(loss: f64, link: &LinkState, config: &SystemConfig) -> Result<f64> {
    if !(loss >= 0.0) || !loss.is_finite() {
        return Err(IlacError::domain("capacity loss", ">= 0 and finite", loss));
    }
    let l = link.log_snr();
    let kl = link.pilot_penalty() * l;
    let tt = full_symbols(config);
    let root = (kl.sqrt() + (kl + loss * tt * l / config.total_bandwidth).sqrt()) / l;
    Ok(root * root)
}

/// `tau_T / tau_L`; infinite when nothing is given to localization.
pub fn crb_loss_time(loc_symbols: f64, config: &SystemConfig) -> Result<f64> {
    if loc_symbols == 0.0 {
        return Ok(f64::INFINITY);
    }
    if !(loc_symbols > 0.0) {
        return Err(IlacError::domain(
            "localization symbols",
            ">= 0",
            loc_symbols,
        ));
    }
    Ok(full_symbols(config) / loc_symbols)
}

/// Time-domain CRB loss as a closed-form function of capacity loss.
pub fn crb_loss_time_closed_form(
    loss: f64,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<f64> {
    if !(loss >= 0.0) || !loss.is_finite() {
        return Err(IlacError::domain("capacity loss", ">= 0 and finite", loss));
    }
    let l = link.log_snr();
    let k = link.pilot_penalty();
    let tt = full_symbols(config);
    let a = (k * l).sqrt();
    let b = (k * l + loss * tt * l / config.total_bandwidth).sqrt();
    Ok(tt * (l / (a + b)).powi(2))
}

pub fn capacity_loss_freq(
    loc_bandwidth: f64,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<f64> {
    let b = config.total_bandwidth;
    if !(0.0..b).contains(&loc_bandwidth) {
        return Err(IlacError::Range {
            what: "localization bandwidth",
            value: loc_bandwidth,
            lo: 0.0,
            hi: b,
        });
    }
    let comm = b - loc_bandwidth;
    Ok((b - comm) / full_symbols(config) * full_interval_bracket(link, config))
}

/// Inverse of [`capacity_loss_freq`]. Losses up to the full capacity are
/// accepted; the full capacity maps to `B_L = B`.
pub fn bandwidth_from_capacity_loss(
    loss: f64,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<f64> {
    if !(loss >= 0.0) || !loss.is_finite() {
        return Err(IlacError::domain("capacity loss", ">= 0 and finite", loss));
    }
    let bracket = full_interval_bracket(link, config);
    let tt = full_symbols(config);
    let capacity = config.total_bandwidth / tt * bracket;
    if loss > capacity * (1.0 + 1e-12) {
        return Err(IlacError::InfeasibleLoss { loss, capacity });
    }
    Ok((loss * tt / bracket).min(config.total_bandwidth))
}

/// `CRB(B_L, tau_T) / CRB(B, tau_T)` from the position CRB; infinite at `B_L = 0`.
pub fn crb_loss_freq(loc_bandwidth: f64, link: &LinkState, config: &SystemConfig) -> Result<f64> {
    if loc_bandwidth == 0.0 {
        return Ok(f64::INFINITY);
    }
    if !(loc_bandwidth > 0.0) {
        return Err(IlacError::domain(
            "localization bandwidth",
            ">= 0",
            loc_bandwidth,
        ));
    }
    let tt = full_symbols(config);
    let split = crb_position(&CrbInputs::new(config, link, loc_bandwidth, tt))?;
    let full = crb_position(&CrbInputs::new(config, link, config.total_bandwidth, tt))?;
    Ok(split / full)
}

/// AoA and ToA weights of the frequency-domain CRB ratio after cancelling
/// the common `c^2 / (4 pi^2 N_T gamma tau_T)` factor: the ratio is
/// `(aoa + toa / B_L^2) / (aoa + toa / B^2)`.
fn frequency_ratio_weights(link: &LinkState, config: &SystemConfig) -> Result<(f64, f64)> {
    let n = f64::from(config.n_antennas);
    let cos_sq = config.theta.cos().powi(2);
    if !(cos_sq > 1e-15) {
        return Err(IlacError::SingularGeometry {
            theta: config.theta,
            cos_sq,
        });
    }
    let lambda = config.wavelength();
    let d = config.antenna_spacing();
    let t = link.toa;
    let aoa = 3.0 * t * t * lambda * lambda / (d * d * cos_sq * (n - 1.0) * (2.0 * n - 1.0));
    let toa = 3.0 / (2.0 * (1.0 + config.waveform_coeff));
    Ok((aoa, toa))
}

/// Frequency-domain CRB loss as a closed-form function of capacity loss.
pub fn crb_loss_freq_closed_form(
    loss: f64,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<f64> {
    let loc_bandwidth = bandwidth_from_capacity_loss(loss, link, config)?;
    if loc_bandwidth == 0.0 {
        return Ok(f64::INFINITY);
    }
    let (aoa, toa) = frequency_ratio_weights(link, config)?;
    let b = config.total_bandwidth;
    Ok((aoa + toa / (loc_bandwidth * loc_bandwidth)) / (aoa + toa / (b * b)))
}

/// The frequency-domain ratio with the ToA weight written as
/// `12 / (2 B^2 (1 + waveform))`, four times the weight implied by the
/// ToA bound. Kept for comparison only.
pub fn crb_loss_freq_reference_constants(
    loc_bandwidth: f64,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<f64> {
    if !(loc_bandwidth > 0.0) {
        return Err(IlacError::domain(
            "localization bandwidth",
            "> 0",
            loc_bandwidth,
        ));
    }
    let (aoa, _) = frequency_ratio_weights(link, config)?;
    let toa = 12.0 / (2.0 * (1.0 + config.waveform_coeff));
    let b = config.total_bandwidth;
    Ok((aoa + toa / (loc_bandwidth * loc_bandwidth)) / (aoa + toa / (b * b)))
}

fn comm_capacity(split: &ResourceSplit, link: &LinkState, config: &SystemConfig) -> Result<f64> {
    let bandwidth = split.comm_bandwidth(config);
    let tt = full_symbols(config);
    match split.pilot_policy {
        PilotPolicy::ContinuousOptimal => {
            let symbols = split.comm_symbols(config);
            // Once the unconstrained optimum no longer fits, the bracket is
            // increasing on (0, tau') and tends to zero at the right end.
            if capacity::optimal_pilot(symbols, link) >= symbols {
                return Ok(0.0);
            }
            capacity::optimal_capacity(bandwidth, symbols, link, tt)
        }
        PilotPolicy::IntegerArgmax => {
            let symbols = split.comm_symbols(config).round() as u32;
            let best = capacity::best_integer_pilot_approx(
                bandwidth,
                symbols,
                link,
                config.symbols_total,
            )?;
            Ok(best.map_or(0.0, |(_, c)| c))
        }
    }
}

/// Evaluates capacity, CRB and both losses for one split.
pub fn evaluate_split(
    split: ResourceSplit,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<TradeoffPoint> {
    let capacity = comm_capacity(&split, link, config)?;
    let crb = crb_position(&CrbInputs::new(
        config,
        link,
        split.loc_bandwidth(config),
        split.loc_symbols(config),
    ))?;
    let (capacity_loss, crb_loss) = match split.allocation {
        Allocation::Time { loc_symbols } => (
            capacity_loss_time(loc_symbols, link, config)?.closed_form,
            crb_loss_time(loc_symbols, config)?,
        ),
        Allocation::Frequency { loc_bandwidth } => (
            capacity_loss_freq(loc_bandwidth, link, config)?,
            crb_loss_freq(loc_bandwidth, link, config)?,
        ),
    };
    Ok(TradeoffPoint {
        split,
        capacity,
        crb,
        capacity_loss,
        crb_loss,
    })
}

/// `n` evenly spread, strictly increasing integers from `1..=count`.
fn spread_indices(count: usize, n: usize) -> Result<Vec<usize>> {
    if n < 2 || n > count {
        return Err(IlacError::Grid {
            got: n,
            min: 2,
            max: count,
        });
    }
    Ok((0..n)
        .map(|i| 1 + ((i * (count - 1)) as f64 / (n - 1) as f64).round() as usize)
        .collect())
}

/// Largest grid [`sweep_frontier`] accepts for a domain: every whole symbol
/// or resource element strictly between none and all.
pub fn max_grid(domain: Domain, config: &SystemConfig) -> usize {
    match domain {
        Domain::Time => config.symbols_total as usize - 1,
        Domain::Frequency => config.resource_elements() as usize - 1,
    }
}

/// Sweeps the split over `grid` resource-element-aligned allocations,
/// excluding the all-or-nothing ends, in increasing allocation order.
pub fn sweep_frontier(
    domain: Domain,
    grid: usize,
    policy: PilotPolicy,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<SweepResult> {
    let indices = spread_indices(max_grid(domain, config), grid)?;
    let points = indices
        .par_iter()
        .map(|&i| {
            let split = match domain {
                Domain::Time => ResourceSplit::time(i as f64),
                Domain::Frequency => {
                    ResourceSplit::frequency(i as f64 * config.subcarrier_bandwidth)
                }
            };
            evaluate_split(split.with_policy(policy), link, config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        domain,
        n_antennas: config.n_antennas,
        gamma: link.gamma,
        distance: link.distance,
        points,
    })
}

/// Which domain gives the lower CRB loss across a shared capacity-loss grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceSummary {
    pub samples: usize,
    pub frequency_better: usize,
    pub time_better: usize,
    /// Capacity loss (nats/s) where the better domain first switches, if it does.
    pub crossover: Option<f64>,
    /// Upper end of the shared capacity-loss range, nats/s.
    pub max_loss: f64,
}

impl DominanceSummary {
    pub fn frequency_fraction(&self) -> f64 {
        self.frequency_better as f64 / self.samples as f64
    }

    pub fn time_fraction(&self) -> f64 {
        self.time_better as f64 / self.samples as f64
    }
}

/// Compares both closed-form CRB-loss curves on `points` capacity losses
/// spread over `(0, L_max)`, where `L_max` is the time-domain loss of
/// giving every symbol to localization (the frequency domain reaches
/// further, so this is the shared range).
pub fn compare_frontiers(
    points: usize,
    link: &LinkState,
    config: &SystemConfig,
) -> Result<DominanceSummary> {
    if points < 2 {
        return Err(IlacError::Grid {
            got: points,
            min: 2,
            max: usize::MAX,
        });
    }
    let tt = full_symbols(config);
    let l = link.log_snr();
    let k = link.pilot_penalty();
    let max_loss = config.total_bandwidth / tt * (tt * l - 2.0 * (tt * k * l).sqrt());
    let rows = (1..=points)
        .into_par_iter()
        .map(|i| {
            let loss = max_loss * i as f64 / (points + 1) as f64;
            let time = crb_loss_time_closed_form(loss, link, config)?;
            let freq = crb_loss_freq_closed_form(loss, link, config)?;
            Ok((loss, freq.partial_cmp(&time)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = DominanceSummary {
        samples: points,
        frequency_better: 0,
        time_better: 0,
        crossover: None,
        max_loss,
    };
    let mut previous = None;
    for (loss, ord) in rows {
        let winner = match ord {
            Some(std::cmp::Ordering::Less) => {
                summary.frequency_better += 1;
                Some(Domain::Frequency)
            }
            Some(std::cmp::Ordering::Greater) => {
                summary.time_better += 1;
                Some(Domain::Time)
            }
            _ => None,
        };
        if let (Some(prev), Some(now)) = (previous, winner) {
            if prev != now && summary.crossover.is_none() {
                summary.crossover = Some(loss);
            }
        }
        if winner.is_some() {
            previous = winner;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::{build_link, build_link_at_snr};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn scenario(n: u32, snr_db: f64) -> (SystemConfig, LinkState) {
        let cfg = SystemConfig {
            n_antennas: n,
            ..SystemConfig::default()
        };
        let link = build_link_at_snr(&cfg, snr_db).unwrap();
        (cfg, link)
    }

    #[test]
    fn no_localization_no_capacity_loss() {
        let (cfg, link) = scenario(8, 20.0);
        let loss = capacity_loss_time(0.0, &link, &cfg).unwrap();
        assert_eq!(loss.closed_form, 0.0);
        assert_eq!(loss.exact_form, 0.0);
        assert_eq!(capacity_loss_freq(0.0, &link, &cfg).unwrap(), 0.0);
        assert_eq!(bandwidth_from_capacity_loss(0.0, &link, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn infeasible_continuous_pilot_gives_zero_capacity() {
        let (cfg, link) = scenario(64, -10.0);
        let split = ResourceSplit::time(196.0);
        assert!(capacity::optimal_pilot(4.0, &link) >= 4.0);
        assert_eq!(evaluate_split(split, &link, &cfg).unwrap().capacity, 0.0);
        let sweep = sweep_frontier(
            Domain::Time,
            199,
            PilotPolicy::ContinuousOptimal,
            &link,
            &cfg,
        )
        .unwrap();
        assert!(sweep.points.iter().all(|p| p.capacity >= 0.0));
    }

    #[test]
    fn out_of_range_splits_rejected() {
        let (cfg, link) = scenario(8, 20.0);
        assert!(capacity_loss_time(200.0, &link, &cfg).is_err());
        assert!(capacity_loss_time(-1.0, &link, &cfg).is_err());
        assert!(capacity_loss_freq(20e6, &link, &cfg).is_err());
        assert!(tau_l_from_capacity_loss(-1.0, &link, &cfg).is_err());
    }

    #[test]
    fn closed_form_never_exceeds_exact_form() {
        for (n, snr) in [(8, 10.0), (8, 30.0), (32, 10.0), (32, 30.0)] {
            let (cfg, link) = scenario(n, snr);
            for tau in 1..200 {
                let loss = capacity_loss_time(f64::from(tau), &link, &cfg).unwrap();
                assert!(
                    loss.closed_form <= loss.exact_form,
                    "n {n} snr {snr} tau {tau}"
                );
            }
        }
    }

    #[test]
    fn closed_form_negative_at_one_symbol_is_flagged() {
        // Low SNR and a big array push the pilot penalty up enough that
        // one localization symbol costs less than the square-root term.
        let (cfg, link) = scenario(64, -10.0);
        let loss = capacity_loss_time(1.0, &link, &cfg).unwrap();
        let l = link.log_snr();
        let k = link.pilot_penalty();
        assert_eq!(loss.is_negative(), l < 4.0 * k);
        assert!(loss.is_negative());
        let point = evaluate_split(ResourceSplit::time(1.0), &link, &cfg).unwrap();
        assert!(point.negative_loss());
    }

    #[test]
    fn tau_l_zero_loss_root() {
        let (cfg, link) = scenario(8, 20.0);
        let tau = tau_l_from_capacity_loss(0.0, &link, &cfg).unwrap();
        let expected = 4.0 * 8.0 * link.epsilon / (link.alpha * link.log_snr());
        assert_relative_eq!(tau, expected, max_relative = 1e-12);
    }

    #[test]
    fn tau_l_roundtrip_past_minimum() {
        let (cfg, link) = scenario(32, 10.0);
        let minimum = link.pilot_penalty() / link.log_snr();
        for tau in [1.0, 5.0, 50.5, 120.0, 199.0] {
            assert!(tau > minimum);
            let loss = capacity_loss_time(tau, &link, &cfg).unwrap().closed_form;
            let back = tau_l_from_capacity_loss(loss, &link, &cfg).unwrap();
            assert_relative_eq!(back, tau, max_relative = 1e-9);
        }
    }

    #[test]
    fn tau_l_asymptotically_linear() {
        let (cfg, link) = scenario(8, 20.0);
        let l = link.log_snr();
        for loss in [1e12, 1e14] {
            let tau = tau_l_from_capacity_loss(loss, &link, &cfg).unwrap();
            let linear = loss * 200.0 / (cfg.total_bandwidth * l);
            assert_relative_eq!(tau / linear, 1.0, max_relative = 1e-3);
        }
    }

    #[test]
    fn crb_loss_time_values() {
        let cfg = SystemConfig::default();
        assert_eq!(crb_loss_time(200.0, &cfg).unwrap(), 1.0);
        assert_eq!(crb_loss_time(100.0, &cfg).unwrap(), 2.0);
        assert_eq!(crb_loss_time(0.0, &cfg).unwrap(), f64::INFINITY);
        assert!(crb_loss_time(-2.0, &cfg).is_err());
    }

    #[test]
    fn time_closed_form_at_zero_loss() {
        let (cfg, link) = scenario(8, 20.0);
        let tau = 4.0 * link.pilot_penalty() / link.log_snr();
        assert_relative_eq!(
            crb_loss_time_closed_form(0.0, &link, &cfg).unwrap(),
            200.0 / tau,
            max_relative = 1e-12
        );
    }

    #[test]
    fn time_closed_form_hand_value() {
        // 40-digit evaluation at N_T = 8, 20 dB, loss = 0.3 C~(B, tau_T):
        // tau_L = 60.451225348071197, CRB loss = 3.3084523737678272.
        let (cfg, link) = scenario(8, 20.0);
        let loss = 0.3 * full_capacity(&link, &cfg).unwrap();
        assert_relative_eq!(
            tau_l_from_capacity_loss(loss, &link, &cfg).unwrap(),
            60.451_225_348_071_2,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            crb_loss_time_closed_form(loss, &link, &cfg).unwrap(),
            3.308_452_373_767_827_2,
            max_relative = 1e-10
        );
    }

    #[test]
    fn freq_loss_half_bandwidth() {
        let (cfg, link) = scenario(8, 20.0);
        let full = full_capacity(&link, &cfg).unwrap();
        let half = capacity_loss_freq(10e6, &link, &cfg).unwrap();
        assert_relative_eq!(half, full / 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            bandwidth_from_capacity_loss(full / 2.0, &link, &cfg).unwrap(),
            10e6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn freq_loss_matches_capacity_difference() {
        let (cfg, link) = scenario(8, 20.0);
        let full = full_capacity(&link, &cfg).unwrap();
        for k in 1..111 {
            let bl = f64::from(k) * 180e3;
            let direct = full - capacity::optimal_capacity(20e6 - bl, 200.0, &link, 200.0).unwrap();
            let closed = capacity_loss_freq(bl, &link, &cfg).unwrap();
            assert_relative_eq!(closed, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn infeasible_loss_rejected() {
        let (cfg, link) = scenario(8, 20.0);
        let full = full_capacity(&link, &cfg).unwrap();
        assert!(matches!(
            bandwidth_from_capacity_loss(1.01 * full, &link, &cfg),
            Err(IlacError::InfeasibleLoss { .. })
        ));
        assert_relative_eq!(
            bandwidth_from_capacity_loss(full, &link, &cfg).unwrap(),
            20e6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn crb_loss_freq_limits() {
        let (cfg, link) = scenario(8, 20.0);
        assert_relative_eq!(
            crb_loss_freq(20e6, &link, &cfg).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert_eq!(crb_loss_freq(0.0, &link, &cfg).unwrap(), f64::INFINITY);
        let at_anchor = LinkState { toa: 0.0, ..link };
        assert_relative_eq!(
            crb_loss_freq(5e6, &at_anchor, &cfg).unwrap(),
            16.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn crb_loss_freq_hand_value_at_100m() {
        // 40-digit evaluation of CRB(B/2, tau_T) / CRB(B, tau_T) at 100 m,
        // N_T = 8, d_A = lambda/2, waveform coefficient 1.
        let cfg = SystemConfig {
            gamma_override_db: Some(20.0),
            ..SystemConfig::default()
        };
        let link = build_link(&cfg, 100.0).unwrap();
        assert_relative_eq!(
            crb_loss_freq(10e6, &link, &cfg).unwrap(),
            1.385_511_599_824_298_6,
            max_relative = 1e-12
        );
    }

    #[test]
    fn freq_closed_form_hand_value() {
        // 40-digit composition at N_T = 8, 20 dB (distance 459.87 m),
        // loss = 0.3 C~(B, tau_T): B_L = 6 MHz, ratio 1.0700095216184219.
        let (cfg, link) = scenario(8, 20.0);
        let loss = 0.3 * full_capacity(&link, &cfg).unwrap();
        assert_relative_eq!(
            bandwidth_from_capacity_loss(loss, &link, &cfg).unwrap(),
            6e6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            crb_loss_freq_closed_form(loss, &link, &cfg).unwrap(),
            1.070_009_521_618_422,
            max_relative = 1e-12
        );
    }

    #[test]
    fn freq_closed_form_limits() {
        let (cfg, link) = scenario(8, 20.0);
        assert_eq!(
            crb_loss_freq_closed_form(0.0, &link, &cfg).unwrap(),
            f64::INFINITY
        );
        let full = full_capacity(&link, &cfg).unwrap();
        let near = crb_loss_freq_closed_form(full * (1.0 - 1e-9), &link, &cfg).unwrap();
        assert!((near - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reference_constants_quarter_the_aoa_share() {
        let (cfg, link) = scenario(8, 20.0);
        let at_anchor = LinkState { toa: 0.0, ..link };
        // With no AoA term both readings reduce to (B / B_L)^2.
        assert_relative_eq!(
            crb_loss_freq_reference_constants(5e6, &at_anchor, &cfg).unwrap(),
            16.0,
            max_relative = 1e-12
        );
        let reference = crb_loss_freq_reference_constants(5e6, &link, &cfg).unwrap();
        let derived = crb_loss_freq(5e6, &link, &cfg).unwrap();
        assert!(reference > derived);
    }

    #[test]
    fn frontier_shapes() {
        let (cfg, link) = scenario(8, 20.0);
        for domain in [Domain::Time, Domain::Frequency] {
            for policy in [PilotPolicy::ContinuousOptimal, PilotPolicy::IntegerArgmax] {
                let sweep = sweep_frontier(domain, 60, policy, &link, &cfg).unwrap();
                assert_eq!(sweep.points.len(), 60);
                for w in sweep.points.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    assert!(b.split.alloc_fraction(&cfg) > a.split.alloc_fraction(&cfg));
                    assert!(b.capacity < a.capacity);
                    assert!(b.crb < a.crb);
                    assert!(b.capacity_loss > a.capacity_loss);
                    assert!(b.crb_loss < a.crb_loss);
                }
                let first = sweep.points[0].split.alloc_fraction(&cfg);
                let last = sweep.points[59].split.alloc_fraction(&cfg);
                assert!(first > 0.0 && last < 1.0);
            }
        }
    }

    #[test]
    fn frontier_grid_bounds() {
        let (cfg, link) = scenario(8, 20.0);
        let p = PilotPolicy::default();
        assert!(sweep_frontier(Domain::Time, 1, p, &link, &cfg).is_err());
        assert!(sweep_frontier(Domain::Time, 199, p, &link, &cfg).is_ok());
        assert!(sweep_frontier(Domain::Time, 200, p, &link, &cfg).is_err());
        assert!(sweep_frontier(Domain::Frequency, 110, p, &link, &cfg).is_ok());
        assert!(sweep_frontier(Domain::Frequency, 111, p, &link, &cfg).is_err());
    }

    #[test]
    fn dominance_follows_array_size_and_range() {
        let (cfg, link) = scenario(8, 10.0);
        let small = compare_frontiers(100, &link, &cfg).unwrap();
        assert!(small.frequency_fraction() >= 0.9);
        let (cfg, link) = scenario(32, 30.0);
        let large = compare_frontiers(100, &link, &cfg).unwrap();
        assert!(large.time_fraction() >= 0.9);
    }

    proptest! {
        #[test]
        fn time_closed_form_matches_inverse(frac in 0.0f64..1.5, n in prop::sample::select(vec![8u32, 32]), snr in 0.0f64..35.0) {
            let (cfg, link) = scenario(n, snr);
            let loss = frac * full_capacity(&link, &cfg).unwrap();
            let closed = crb_loss_time_closed_form(loss, &link, &cfg).unwrap();
            let composed = 200.0 / tau_l_from_capacity_loss(loss, &link, &cfg).unwrap();
            prop_assert!((closed / composed - 1.0).abs() < 1e-9);
        }

        #[test]
        fn freq_closed_form_matches_definition(frac in 0.001f64..1.0, n in prop::sample::select(vec![8u32, 32]), snr in 0.0f64..35.0) {
            let (cfg, link) = scenario(n, snr);
            let loss = frac * full_capacity(&link, &cfg).unwrap();
            let closed = crb_loss_freq_closed_form(loss, &link, &cfg).unwrap();
            let bl = bandwidth_from_capacity_loss(loss, &link, &cfg).unwrap();
            let composed = crb_loss_freq(bl, &link, &cfg).unwrap();
            prop_assert!((closed / composed - 1.0).abs() < 1e-12);
        }

        #[test]
        fn losses_monotone(a in 1.0f64..198.0, da in 0.01f64..1.0) {
            let (cfg, link) = scenario(8, 15.0);
            let la = capacity_loss_time(a, &link, &cfg).unwrap();
            let lb = capacity_loss_time(a + da, &link, &cfg).unwrap();
            prop_assert!(lb.exact_form > la.exact_form);
            prop_assert!(crb_loss_time(a + da, &cfg).unwrap() < crb_loss_time(a, &cfg).unwrap());
            let fa = a * 1e5;
            let fb = (a + da) * 1e5;
            prop_assert!(capacity_loss_freq(fb, &link, &cfg).unwrap() > capacity_loss_freq(fa, &link, &cfg).unwrap());
            prop_assert!(crb_loss_freq(fb, &link, &cfg).unwrap() < crb_loss_freq(fa, &link, &cfg).unwrap());
        }
    }
}
