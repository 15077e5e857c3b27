//! Scenario files: flat `key = value` lines, units carried in the key
//! suffix. The syntax is TOML restricted to top-level scalars.
//!
//! ```text
//! carrier_freq_hz = 2.6e9
//! n_antennas = 32
//! snr_db = 30
//! epsilon_mode = "literal_one"
//! ```
//!
//! Unknown keys are rejected. `--set key=value` overrides are applied on
//! top of the file before validation.

use std::path::Path;

use ilac_core::link::{build_link, distance_for_snr};
use ilac_core::{Domain, EpsilonMode, LinkState, PilotPolicy, SystemConfig};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    carrier_freq_hz: Option<f64>,
    total_bandwidth_hz: Option<f64>,
    subcarrier_bandwidth_hz: Option<f64>,
    symbols_total: Option<u32>,
    n_antennas: Option<u32>,
    antenna_spacing_m: Option<f64>,
    theta_deg: Option<f64>,
    p_gnb_dbm: Option<f64>,
    p_ue_dbm: Option<f64>,
    gain_gnb: Option<f64>,
    gain_ue: Option<f64>,
    noise_dbm: Option<f64>,
    waveform_coeff: Option<f64>,
    epsilon_mode: Option<String>,
    anchor_x_m: Option<f64>,
    anchor_y_m: Option<f64>,

    distance_m: Option<f64>,
    snr_db: Option<f64>,

    domain: Option<String>,
    grid: Option<usize>,
    pilot_policy: Option<String>,
    comm_bandwidth_hz: Option<f64>,
    comm_symbols: Option<u32>,
    loc_bandwidth_hz: Option<f64>,
    loc_symbols: Option<f64>,
    capacity_loss_nats: Option<f64>,
}

/// Where the UE sits: at a distance, or at whatever distance gives an SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Position {
    Distance(f64),
    SnrDb(f64),
}

/// Which domains the frontier command sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainSelection {
    Time,
    Frequency,
    Both,
}

impl DomainSelection {
    pub fn domains(self) -> &'static [Domain] {
        match self {
            DomainSelection::Time => &[Domain::Time],
            DomainSelection::Frequency => &[Domain::Frequency],
            DomainSelection::Both => &[Domain::Time, Domain::Frequency],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: SystemConfig,
    pub position: Position,
    pub domain: DomainSelection,
    pub grid: usize,
    pub pilot_policy: PilotPolicy,
    pub comm_bandwidth: f64,
    pub comm_symbols: u32,
    pub loc_bandwidth: f64,
    pub loc_symbols: f64,
    pub capacity_loss: Option<f64>,
}

pub const DEFAULT_SNR_DB: f64 = 20.0;
pub const DEFAULT_GRID: usize = 100;

fn config_error(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_owned(),
        reason: reason.into(),
    }
}

/// Parses the right-hand side of a `--set` override. Anything that is not
/// a TOML scalar is taken as a bare string.
fn parse_override_value(raw: &str) -> toml::Value {
    let raw = raw.trim();
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()))
}

const COUNT_KEYS: [&str; 4] = ["symbols_total", "n_antennas", "grid", "comm_symbols"];

/// Integral floats such as `8.0` are accepted where a count is expected.
fn normalise_counts(table: &mut toml::Table) {
    for key in COUNT_KEYS {
        if let Some(toml::Value::Float(f)) = table.get(key) {
            if f.fract() == 0.0 && *f >= 0.0 {
                let i = *f as i64;
                table.insert(key.to_owned(), toml::Value::Integer(i));
            }
        }
    }
}

pub fn load_table(path: Option<&Path>, overrides: &[String]) -> Result<toml::Table, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            toml::from_str::<toml::Table>(&text).map_err(|e| CliError::Parse {
                path: p.display().to_string(),
                message: e.to_string(),
            })?
        }
        None => toml::Table::new(),
    };
    for entry in overrides {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| config_error(entry, "expected --set key=value"))?;
        table.insert(key.trim().to_owned(), parse_override_value(value));
    }
    Ok(table)
}

/// Integers are fine where a float is expected.
fn float_keys_accept_integers(table: &mut toml::Table) {
    for (key, value) in table.iter_mut() {
        if COUNT_KEYS.contains(&key.as_str()) {
            continue;
        }
        if let toml::Value::Integer(i) = value {
            *value = toml::Value::Float(*i as f64);
        }
    }
}

impl Scenario {
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let table = load_table(path, overrides)?;
        Scenario::from_table(table)
    }

    pub fn from_table(mut table: toml::Table) -> Result<Self, CliError> {
        normalise_counts(&mut table);
        float_keys_accept_integers(&mut table);
        let file =
            ScenarioFile::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Config {
                key: offending_key(&e.to_string()).unwrap_or_else(|| "<scenario>".to_owned()),
                reason: e.to_string(),
            })?;
        Scenario::from_file(file)
    }

    fn from_file(f: ScenarioFile) -> Result<Self, CliError> {
        let defaults = SystemConfig::default();
        let epsilon_mode = match f.epsilon_mode.as_deref() {
            None => EpsilonMode::default(),
            Some(s) => s
                .parse::<EpsilonMode>()
                .map_err(|e| config_error("epsilon_mode", e.to_string()))?,
        };
        let position = match (f.distance_m, f.snr_db) {
            (Some(_), Some(_)) => {
                return Err(config_error(
                    "distance_m",
                    "set either distance_m or snr_db, not both",
                ))
            }
            (Some(d), None) => Position::Distance(d),
            (None, Some(s)) => Position::SnrDb(s),
            (None, None) => Position::SnrDb(DEFAULT_SNR_DB),
        };
        let mut config = SystemConfig {
            carrier_freq: f.carrier_freq_hz.unwrap_or(defaults.carrier_freq),
            total_bandwidth: f.total_bandwidth_hz.unwrap_or(defaults.total_bandwidth),
            subcarrier_bandwidth: f
                .subcarrier_bandwidth_hz
                .unwrap_or(defaults.subcarrier_bandwidth),
            symbols_total: f.symbols_total.unwrap_or(defaults.symbols_total),
            n_antennas: f.n_antennas.unwrap_or(defaults.n_antennas),
            antenna_spacing: f.antenna_spacing_m.or(defaults.antenna_spacing),
            theta: f.theta_deg.map_or(defaults.theta, f64::to_radians),
            p_gnb_dbm: f.p_gnb_dbm.unwrap_or(defaults.p_gnb_dbm),
            p_ue_dbm: f.p_ue_dbm.unwrap_or(defaults.p_ue_dbm),
            gain_gnb: f.gain_gnb.unwrap_or(defaults.gain_gnb),
            gain_ue: f.gain_ue.unwrap_or(defaults.gain_ue),
            noise_dbm: f.noise_dbm.unwrap_or(defaults.noise_dbm),
            waveform_coeff: f.waveform_coeff.unwrap_or(defaults.waveform_coeff),
            epsilon_mode,
            gamma_override_db: None,
            anchor: (
                f.anchor_x_m.unwrap_or(defaults.anchor.0),
                f.anchor_y_m.unwrap_or(defaults.anchor.1),
            ),
        };
        if let Position::SnrDb(s) = position {
            config.gamma_override_db = Some(s);
        }
        config.validate()?;

        let domain = match f.domain.as_deref() {
            None | Some("both") => DomainSelection::Both,
            Some("time") => DomainSelection::Time,
            Some("frequency") => DomainSelection::Frequency,
            Some(other) => {
                return Err(config_error(
                    "domain",
                    format!("expected time, frequency or both, got `{other}`"),
                ))
            }
        };
        let pilot_policy = match f.pilot_policy.as_deref() {
            None | Some("continuous_optimal") => PilotPolicy::ContinuousOptimal,
            Some("integer_argmax") => PilotPolicy::IntegerArgmax,
            Some(other) => {
                return Err(config_error(
                    "pilot_policy",
                    format!("expected continuous_optimal or integer_argmax, got `{other}`"),
                ))
            }
        };

        let b = config.total_bandwidth;
        let comm_bandwidth = f.comm_bandwidth_hz.unwrap_or(b);
        if !(comm_bandwidth > 0.0 && comm_bandwidth <= b) {
            return Err(config_error(
                "comm_bandwidth_hz",
                format!("must lie in (0, {b}], got {comm_bandwidth}"),
            ));
        }
        let comm_symbols = f.comm_symbols.unwrap_or(config.symbols_total);
        if comm_symbols < 2 || comm_symbols > config.symbols_total {
            return Err(config_error(
                "comm_symbols",
                format!(
                    "must lie in [2, {}] to leave room for a pilot, got {comm_symbols}",
                    config.symbols_total
                ),
            ));
        }
        let loc_bandwidth = f.loc_bandwidth_hz.unwrap_or(b);
        if !(loc_bandwidth > 0.0 && loc_bandwidth <= b) {
            return Err(config_error(
                "loc_bandwidth_hz",
                format!("must lie in (0, {b}], got {loc_bandwidth}"),
            ));
        }
        let total = f64::from(config.symbols_total);
        let loc_symbols = f.loc_symbols.unwrap_or(total);
        if !(loc_symbols > 0.0 && loc_symbols <= total) {
            return Err(config_error(
                "loc_symbols",
                format!("must lie in (0, {total}], got {loc_symbols}"),
            ));
        }
        if let Some(l) = f.capacity_loss_nats {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(config_error(
                    "capacity_loss_nats",
                    format!("must be >= 0, got {l}"),
                ));
            }
        }
        let grid = f.grid.unwrap_or(DEFAULT_GRID);
        if grid < 2 {
            return Err(config_error(
                "grid",
                format!("need at least 2 points, got {grid}"),
            ));
        }

        Ok(Scenario {
            config,
            position,
            domain,
            grid,
            pilot_policy,
            comm_bandwidth,
            comm_symbols,
            loc_bandwidth,
            loc_symbols,
            capacity_loss: f.capacity_loss_nats,
        })
    }

    pub fn distance(&self) -> Result<f64, CliError> {
        match self.position {
            Position::Distance(d) => Ok(d),
            Position::SnrDb(s) => Ok(distance_for_snr(&self.config, s)?),
        }
    }

    pub fn link(&self) -> Result<LinkState, CliError> {
        Ok(build_link(&self.config, self.distance()?)?)
    }

    /// File stem identifying the scenario, e.g. `frontier_nt8_snr10db`.
    pub fn frontier_stem(&self) -> String {
        let place = match self.position {
            Position::Distance(d) => format!("d{d}m"),
            Position::SnrDb(s) => format!("snr{s}db"),
        };
        format!("frontier_nt{}_{place}", self.config.n_antennas)
    }
}

/// Pulls the key name out of serde's "unknown field `x`" / "invalid type
/// ... for key `x`" messages.
fn offending_key(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    Some(message[start..end].to_owned())
}
