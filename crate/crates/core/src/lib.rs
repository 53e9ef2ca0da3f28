//! Ad auctions where every ad is shown with its price.
//!
//! The click probability of an ad depends on its own price and on the lowest
//! price shown on the page, so prices are externalities. This crate provides
//! welfare-maximizing allocation with such externalities, the direct VCG
//! mechanism (which picks prices), indirect VCG and GSP (agents pick prices),
//! the VCG* variant that infers types from a standalone price, and an
//! exhaustive pure-Nash engine with price-of-anarchy and price-of-stability
//! reports.
//!
//! Start with [`model::AuctionInstance`], then see the runnable programs in
//! `examples/`.

pub mod allocation;
pub mod cli;
pub mod constructions;
pub mod equilibrium;
pub mod error;
pub mod io;
pub mod mechanisms;
pub mod model;
pub mod quality;
pub mod synth;

pub use error::{Error, Result};
pub use model::{AgentSpec, AgentType, Allocation, AuctionInstance, Bid, SlotProfile, StrategyProfile, TieBreak};
pub use quality::QualityModel;

/// Absolute tolerance when comparing welfare values during argmax.
pub const WELFARE_TOL: f64 = 1e-9;
/// A deviation must gain more than this to break a Nash equilibrium.
pub const NASH_TOL: f64 = 1e-9;
/// Step for central finite differences.
pub const FD_STEP: f64 = 1e-6;
