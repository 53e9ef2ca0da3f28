//! The four mechanisms as allocation plus payment pipelines.

mod gsp;
mod star;
mod vcg;

pub use gsp::run_indirect_gsp;
pub use star::{infer_type, run_indirect_vcg_star, standalone_price, InferredType};
pub use vcg::{run_direct_vcg, run_indirect_vcg};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{declared_value, true_value, Allocation, AuctionInstance, StrategyProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    DirectVcg,
    IndirectVcg,
    IndirectGsp,
    IndirectVcgStar,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 4] =
        [MechanismKind::DirectVcg, MechanismKind::IndirectVcg, MechanismKind::IndirectGsp, MechanismKind::IndirectVcgStar];

    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::DirectVcg => "direct-vcg",
            MechanismKind::IndirectVcg => "indirect-vcg",
            MechanismKind::IndirectGsp => "indirect-gsp",
            MechanismKind::IndirectVcgStar => "indirect-vcg-star",
        }
    }

    pub fn is_indirect(self) -> bool {
        self != MechanismKind::DirectVcg
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MechanismKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MechanismKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnsupportedMechanism(s.to_string()))
    }
}

/// Knobs that change a mechanism's behavior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Show agents that declare a gain of exactly zero in spare slots.
    /// `None` uses the mechanism default: on for GSP, off otherwise.
    pub zero_gain_allocable: Option<bool>,
    /// GSP last-slot payments only look at unassigned agents priced at or
    /// above the displayed minimum. Turning this off breaks individual
    /// rationality and exists to demonstrate that.
    pub gsp_min_price_filter: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { zero_gain_allocable: None, gsp_min_price_filter: true }
    }
}

impl RunOptions {
    pub(crate) fn zero_gain_for(&self, kind: MechanismKind) -> bool {
        self.zero_gain_allocable.unwrap_or(kind == MechanismKind::IndirectGsp)
    }
}

/// Extra information a run reports beyond the outcome itself.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Types inferred by VCG*, one per agent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inferred: Vec<InferredType>,
    /// Agents whose inferred conversion probability lies outside `[0, 1]`
    /// or whose inferred cost is negative. The raw values are used.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub infeasible_inference: Vec<usize>,
    /// Welfare of the re-optimization without each agent (VCG*).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub welfare_without: Vec<f64>,
    /// VCG* declined to allocate because payments would break individual
    /// rationality.
    #[serde(default)]
    pub fallback_empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub mechanism: MechanismKind,
    pub allocation: Allocation,
    pub payments: Vec<f64>,
    /// Declared gain each agent is evaluated with (reported-type gain at the
    /// chosen price for the direct mechanism).
    pub declared_gains: Vec<f64>,
    pub declared_values: Vec<f64>,
    pub true_values: Vec<f64>,
    pub declared_welfare: f64,
    pub true_welfare: f64,
    pub revenue: f64,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

impl Outcome {
    pub(crate) fn assemble(
        instance: &AuctionInstance,
        mechanism: MechanismKind,
        allocation: Allocation,
        declared_gains: Vec<f64>,
        payments: Vec<f64>,
        diagnostics: Diagnostics,
    ) -> Result<Outcome> {
        let n = instance.n();
        let declared_values = (0..n)
            .map(|i| declared_value(instance, &allocation, i, declared_gains[i]))
            .collect::<Result<Vec<_>>>()?;
        let true_values = (0..n).map(|i| true_value(instance, &allocation, i)).collect::<Result<Vec<_>>>()?;
        let payments: Vec<f64> = payments.into_iter().map(snap_zero).collect();
        Ok(Outcome {
            mechanism,
            declared_welfare: declared_values.iter().sum(),
            true_welfare: true_values.iter().sum(),
            revenue: payments.iter().sum(),
            allocation,
            payments,
            declared_gains,
            declared_values,
            true_values,
            diagnostics,
        })
    }

    /// True value minus payment.
    pub fn utility(&self, agent: usize) -> f64 {
        self.true_values[agent] - self.payments[agent]
    }
}

/// Rounds float noise around zero to an exact zero.
fn snap_zero(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

/// Runs an indirect mechanism on a strategy profile.
pub fn run_indirect(instance: &AuctionInstance, kind: MechanismKind, profile: &StrategyProfile, opts: &RunOptions) -> Result<Outcome> {
    match kind {
        MechanismKind::IndirectVcg => vcg::indirect_vcg_with(instance, profile, opts),
        MechanismKind::IndirectGsp => gsp::indirect_gsp_with(instance, profile, opts),
        MechanismKind::IndirectVcgStar => run_indirect_vcg_star(instance, profile),
        MechanismKind::DirectVcg => Err(Error::UnsupportedMechanism(
            "direct-vcg takes reported types, not a strategy profile".into(),
        )),
    }
}
