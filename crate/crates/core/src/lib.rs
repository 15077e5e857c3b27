//! Analytical models for a single-gNB integrated localization and
//! communication (ILAC) system.
//!
//! A gNB with an `N_T`-element ULA serves a UE in the downlink and locates
//! it from joint ToA/AoA measurements. The time-frequency grid is split
//! between a communication block (uplink pilots plus downlink data) and a
//! localization block, either along time or along frequency. This crate
//! provides:
//!
//! * [`link`]: free-space link budget and the derived per-link constants,
//! * [`capacity`]: pilot-limited downlink capacity, its lower-bound
//!   approximation and the optimal pilot length,
//! * [`crb`]: AoA, ToA and position Cramer-Rao bounds,
//! * [`tradeoff`]: capacity loss versus CRB loss for both split domains,
//!   their closed-form relationships, and frontier sweeps,
//! * [`oracle`]: brute-force audits of every closed form.
//!
//! Capacities are in nats/s throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod config;
pub mod crb;
pub mod error;
pub mod link;
pub mod oracle;
pub mod tradeoff;
pub mod units;

pub use config::{EpsilonMode, SystemConfig};
pub use error::{IlacError, Result};
pub use link::{build_link, build_link_at_snr, LinkState};
pub use oracle::{AuditGrid, OracleReport};
pub use tradeoff::{
    Allocation, Domain, DominanceSummary, PilotPolicy, ResourceSplit, SweepResult, TradeoffPoint,
};
