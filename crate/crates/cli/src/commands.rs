use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ilac_core::capacity;
use ilac_core::crb::{crb_aoa, crb_position, crb_toa, CrbInputs};
use ilac_core::oracle::{self, AuditGrid};
use ilac_core::tradeoff::{self, SweepResult};
use ilac_core::units::{linear_to_db, nats_to_bits};
use ilac_core::IlacError;

use crate::error::CliError;
use crate::scenario::Scenario;

pub const FRONTIER_HEADER: [&str; 10] = [
    "domain",
    "alloc_fraction",
    "tau_L",
    "B_L_hz",
    "capacity_nats",
    "capacity_bits",
    "crb_m2",
    "capacity_loss_nats",
    "crb_loss_ratio",
    "warn_negative_loss",
];

fn num(x: f64) -> String {
    format!("{x}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn flush<W: Write>(mut w: csv::Writer<W>, path: &str) -> Result<(), CliError> {
    w.flush().map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn csv_err(path: &str) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_owned(),
        source: std::io::Error::other(e.to_string()),
    }
}

fn missing_pilot(symbols: u32) -> CliError {
    CliError::Model(IlacError::NoAirtime {
        pilot: 1.0,
        symbols: f64::from(symbols),
    })
}

pub fn capacity<W: Write>(scenario: &Scenario, out: W) -> Result<(), CliError> {
    let link = scenario.link()?;
    let b = scenario.comm_bandwidth;
    let symbols = scenario.comm_symbols;
    let total = scenario.config.symbols_total;
    let tc = f64::from(symbols);

    let pilot = capacity::optimal_pilot(tc, &link);
    let cap = capacity::optimal_capacity(b, tc, &link, f64::from(total))?;
    let (pilot_int, cap_int) = capacity::best_integer_pilot_approx(b, symbols, &link, total)?
        .ok_or_else(|| missing_pilot(symbols))?;
    let (pilot_exact, cap_exact) = capacity::best_integer_pilot_exact(b, symbols, &link, total)?
        .ok_or_else(|| missing_pilot(symbols))?;

    let mut w = csv_writer(out);
    let e = csv_err("<stdout>");
    w.write_record([
        "comm_bandwidth_hz",
        "comm_symbols",
        "pilot_continuous",
        "pilot_overhead_fraction",
        "capacity_nats",
        "capacity_bits",
        "pilot_integer",
        "capacity_integer_nats",
        "capacity_integer_bits",
        "pilot_exact",
        "capacity_exact_nats",
        "capacity_exact_bits",
    ])
    .map_err(&e)?;
    w.write_record([
        num(b),
        symbols.to_string(),
        num(pilot),
        num(capacity::pilot_overhead(tc, &link)),
        num(cap),
        num(nats_to_bits(cap)),
        pilot_int.to_string(),
        num(cap_int),
        num(nats_to_bits(cap_int)),
        pilot_exact.to_string(),
        num(cap_exact),
        num(nats_to_bits(cap_exact)),
    ])
    .map_err(&e)?;
    flush(w, "<stdout>")
}

pub fn crb<W: Write>(scenario: &Scenario, out: W) -> Result<(), CliError> {
    let link = scenario.link()?;
    let inputs = CrbInputs::new(
        &scenario.config,
        &link,
        scenario.loc_bandwidth,
        scenario.loc_symbols,
    );
    let mut w = csv_writer(out);
    let e = csv_err("<stdout>");
    w.write_record([
        "distance_m",
        "snr_db",
        "loc_bandwidth_hz",
        "loc_symbols",
        "crb_aoa_rad2",
        "crb_toa_s2",
        "crb_position_m2",
    ])
    .map_err(&e)?;
    w.write_record([
        num(link.distance),
        num(linear_to_db(link.gamma)?),
        num(scenario.loc_bandwidth),
        num(scenario.loc_symbols),
        num(crb_aoa(&inputs)?),
        num(crb_toa(&inputs)?),
        num(crb_position(&inputs)?),
    ])
    .map_err(&e)?;
    flush(w, "<stdout>")
}

fn loss_points(scenario: &Scenario, link: &ilac_core::LinkState) -> Result<Vec<f64>, CliError> {
    Ok(match scenario.capacity_loss {
        Some(l) => vec![l],
        None => tradeoff::capacity_loss_grid(scenario.grid, link, &scenario.config)?,
    })
}

pub fn tradeoff_time<W: Write>(scenario: &Scenario, out: W) -> Result<(), CliError> {
    let link = scenario.link()?;
    let cfg = &scenario.config;
    let mut w = csv_writer(out);
    let e = csv_err("<stdout>");
    w.write_record([
        "capacity_loss_nats",
        "capacity_loss_bits",
        "tau_L",
        "crb_loss_closed_form",
        "crb_loss_composed",
    ])
    .map_err(&e)?;
    for loss in loss_points(scenario, &link)? {
        let tau = tradeoff::tau_l_from_capacity_loss(loss, &link, cfg)?;
        w.write_record([
            num(loss),
            num(nats_to_bits(loss)),
            num(tau),
            num(tradeoff::crb_loss_time_closed_form(loss, &link, cfg)?),
            num(tradeoff::crb_loss_time(tau, cfg)?),
        ])
        .map_err(&e)?;
    }
    flush(w, "<stdout>")
}

pub fn tradeoff_freq<W: Write>(scenario: &Scenario, out: W) -> Result<(), CliError> {
    let link = scenario.link()?;
    let cfg = &scenario.config;
    let mut w = csv_writer(out);
    let e = csv_err("<stdout>");
    w.write_record([
        "capacity_loss_nats",
        "capacity_loss_bits",
        "B_L_hz",
        "crb_loss_closed_form",
        "crb_loss_definitional",
        "crb_loss_reference_constants",
    ])
    .map_err(&e)?;
    for loss in loss_points(scenario, &link)? {
        let bl = tradeoff::bandwidth_from_capacity_loss(loss, &link, cfg)?;
        let reference = if bl > 0.0 {
            tradeoff::crb_loss_freq_reference_constants(bl, &link, cfg)?
        } else {
            f64::INFINITY
        };
        w.write_record([
            num(loss),
            num(nats_to_bits(loss)),
            num(bl),
            num(tradeoff::crb_loss_freq_closed_form(loss, &link, cfg)?),
            num(tradeoff::crb_loss_freq(bl, &link, cfg)?),
            num(reference),
        ])
        .map_err(&e)?;
    }
    flush(w, "<stdout>")
}

/// Frontier rows for every selected domain, each domain in increasing
/// allocation order.
pub fn frontier_sweeps(scenario: &Scenario) -> Result<Vec<SweepResult>, CliError> {
    let link = scenario.link()?;
    scenario
        .domain
        .domains()
        .iter()
        .map(|&d| {
            tradeoff::sweep_frontier(
                d,
                scenario.grid,
                scenario.pilot_policy,
                &link,
                &scenario.config,
            )
            .map_err(CliError::from)
        })
        .collect()
}

pub fn write_frontier_csv<W: Write>(
    scenario: &Scenario,
    sweeps: &[SweepResult],
    out: W,
    path: &str,
) -> Result<(), CliError> {
    let cfg = &scenario.config;
    let mut w = csv_writer(out);
    let e = csv_err(path);
    w.write_record(FRONTIER_HEADER).map_err(&e)?;
    for sweep in sweeps {
        for p in &sweep.points {
            w.write_record([
                sweep.domain.as_str().to_owned(),
                num(p.split.alloc_fraction(cfg)),
                num(p.split.loc_symbols(cfg)),
                num(p.split.loc_bandwidth(cfg)),
                num(p.capacity),
                num(nats_to_bits(p.capacity)),
                num(p.crb),
                num(p.capacity_loss),
                num(p.crb_loss),
                u8::from(p.negative_loss()).to_string(),
            ])
            .map_err(&e)?;
        }
    }
    flush(w, path)
}

/// Writes `<out>/<stem>.csv` and returns its path.
pub fn frontier(scenario: &Scenario, out_dir: &Path) -> Result<PathBuf, CliError> {
    let sweeps = frontier_sweeps(scenario)?;
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let path = out_dir.join(format!("{}.csv", scenario.frontier_stem()));
    let shown = path.display().to_string();
    let file = fs::File::create(&path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    write_frontier_csv(scenario, &sweeps, std::io::BufWriter::new(file), &shown)?;
    Ok(path)
}

/// Runs every audit, one line per audit. `alpha_scale` multiplies the
/// link's alpha before auditing (fault injection for testing the harness).
pub fn validate<W: Write>(
    scenario: &Scenario,
    alpha_scale: Option<f64>,
    mut out: W,
) -> Result<(), CliError> {
    let mut link = scenario.link()?;
    if let Some(scale) = alpha_scale {
        link.alpha *= scale;
    }
    let grid = AuditGrid {
        loss_points: scenario.grid,
        ..AuditGrid::default()
    };
    let reports = oracle::run_suite(&link, &scenario.config, &grid)?;
    let io = |source| CliError::Io {
        path: "<stdout>".to_owned(),
        source,
    };
    for r in &reports {
        writeln!(out, "{r}").map_err(io)?;
    }
    out.flush().map_err(io)?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.clone())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed))
    }
}
