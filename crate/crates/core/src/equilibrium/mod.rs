//! Complete-information pure Nash analysis on finite strategy grids.

mod report;
mod space;

pub use report::{efficiency_report, ratio, EquilibriumReport, Ratio, REVENUE_BENCHMARK};
pub use space::{Overbidding, StrategySpace};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::direct_allocate;
use crate::error::{Error, Result};
use crate::mechanisms::{run_indirect, standalone_price, MechanismKind, RunOptions};
use crate::model::{AuctionInstance, Bid, StrategyProfile};
use crate::NASH_TOL;

/// Default cap on the number of joint profiles an enumeration may visit.
pub const DEFAULT_PROFILE_GUARD: u128 = 10_000_000;
/// Enumerations up to this size cache every profile's utilities.
const TABLE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumOptions {
    /// A deviation must gain strictly more than this to count.
    pub nash_tol: f64,
    pub guard: u128,
    pub run: RunOptions,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions { nash_tol: NASH_TOL, guard: DEFAULT_PROFILE_GUARD, run: RunOptions::default() }
    }
}

/// A strictly improving unilateral deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub agent: usize,
    pub bid: Bid,
    pub current_utility: f64,
    pub deviation_utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashCheck {
    pub is_nash: bool,
    pub witness: Option<Deviation>,
}

fn check_kind(kind: MechanismKind) -> Result<()> {
    match kind {
        MechanismKind::IndirectVcg | MechanismKind::IndirectGsp => Ok(()),
        other => Err(Error::UnsupportedMechanism(format!("equilibrium analysis supports indirect-vcg and indirect-gsp, not {other}"))),
    }
}

/// Every agent's utility (true value minus payment) under `profile`.
pub fn utilities(instance: &AuctionInstance, kind: MechanismKind, profile: &StrategyProfile, opts: &RunOptions) -> Result<Vec<f64>> {
    let out = run_indirect(instance, kind, profile, opts)?;
    Ok((0..instance.n()).map(|i| out.utility(i)).collect())
}

/// A utility-maximizing strategy for `agent` with the others fixed. Ties go
/// to the current strategy, then to the lexicographically smallest
/// `(price, gain)`.
pub fn best_response(
    instance: &AuctionInstance,
    kind: MechanismKind,
    space: &StrategySpace,
    profile: &StrategyProfile,
    agent: usize,
    opts: &EquilibriumOptions,
) -> Result<(Bid, f64)> {
    check_kind(kind)?;
    instance.check_agent(agent)?;
    let mut best = profile.bids[agent];
    let mut best_u = utilities(instance, kind, profile, &opts.run)?[agent];
    for &s in space.strategies(agent) {
        let u = utilities(instance, kind, &profile.with_bid(agent, s), &opts.run)?[agent];
        if u > best_u + opts.nash_tol {
            best = s;
            best_u = u;
        }
    }
    Ok((best, best_u))
}

/// Whether no agent gains more than the tolerance by a unilateral deviation
/// within `space`. On failure the witness is the first such agent's best
/// response.
pub fn is_nash(
    instance: &AuctionInstance,
    kind: MechanismKind,
    space: &StrategySpace,
    profile: &StrategyProfile,
    opts: &EquilibriumOptions,
) -> Result<NashCheck> {
    check_kind(kind)?;
    space.check(instance)?;
    let current = utilities(instance, kind, profile, &opts.run)?;
    for i in 0..instance.n() {
        let (bid, u) = best_response(instance, kind, space, profile, i, opts)?;
        if u > current[i] + opts.nash_tol {
            return Ok(NashCheck {
                is_nash: false,
                witness: Some(Deviation { agent: i, bid, current_utility: current[i], deviation_utility: u }),
            });
        }
    }
    Ok(NashCheck { is_nash: true, witness: None })
}

/// Mixed-radix indexing of joint profiles; agent 0 is the most significant
/// digit, so index order is lexicographic order.
struct Joint<'a> {
    space: &'a StrategySpace,
    strides: Vec<usize>,
    size: usize,
}

impl<'a> Joint<'a> {
    fn new(space: &'a StrategySpace) -> Self {
        let n = space.n();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * space.strategies(i + 1).len();
        }
        let size = strides.first().map_or(1, |s| s * space.strategies(0).len());
        Joint { space, strides, size }
    }

    fn digit(&self, idx: usize, i: usize) -> usize {
        (idx / self.strides[i]) % self.space.strategies(i).len()
    }

    fn profile(&self, idx: usize) -> StrategyProfile {
        StrategyProfile::new((0..self.space.n()).map(|i| self.space.strategies(i)[self.digit(idx, i)]).collect())
    }
}

/// All pure Nash equilibria in `space`, in lexicographic order.
///
/// Refuses spaces with more than `opts.guard` joint profiles. Profiles are
/// evaluated in parallel; the result does not depend on the thread count.
pub fn enumerate_pure_nash(
    instance: &AuctionInstance,
    kind: MechanismKind,
    space: &StrategySpace,
    opts: &EquilibriumOptions,
) -> Result<Vec<StrategyProfile>> {
    check_kind(kind)?;
    space.check(instance)?;
    let size = space.joint_size();
    if size > opts.guard {
        return Err(Error::GuardExceeded { what: "joint strategy profiles".into(), size, limit: opts.guard });
    }
    let joint = Joint::new(space);
    if size > TABLE_LIMIT {
        let found = (0..joint.size)
            .into_par_iter()
            .map(|idx| {
                let p = joint.profile(idx);
                is_nash(instance, kind, space, &p, opts).map(|c| c.is_nash.then_some(p))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(found.into_iter().flatten().collect());
    }

    let table = (0..joint.size)
        .into_par_iter()
        .map(|idx| utilities(instance, kind, &joint.profile(idx), &opts.run))
        .collect::<Result<Vec<_>>>()?;
    let nash: Vec<usize> = (0..joint.size)
        .into_par_iter()
        .filter(|&idx| {
            (0..space.n()).all(|i| {
                let own = joint.digit(idx, i);
                let base = idx - own * joint.strides[i];
                let cur = table[idx][i];
                (0..space.strategies(i).len()).all(|alt| table[base + alt * joint.strides[i]][i] <= cur + opts.nash_tol)
            })
        })
        .collect();
    Ok(nash.into_iter().map(|idx| joint.profile(idx)).collect())
}

/// Each agent bids its true gain at the price direct VCG would choose for
/// it under truthful reports; agents direct VCG hides bid `(0, 0)`.
pub fn truthful_direct_profile(instance: &AuctionInstance) -> Result<StrategyProfile> {
    let types = instance.types();
    let best = direct_allocate(instance, &types)?;
    Ok(StrategyProfile::new(
        (0..instance.n())
            .map(|i| match best.allocation.price_of(i) {
                Some(p) => Bid::new(p, types[i].gain_at(p)),
                None => Bid::new(0.0, 0.0),
            })
            .collect(),
    ))
}

/// The truthful VCG* profile: direct VCG prices with true gains plus each
/// agent's standalone price. Agents direct VCG hides bid price 0 with their
/// (non-positive) true gain there, which keeps them hidden while still
/// revealing their type.
pub fn truthful_star_profile(instance: &AuctionInstance) -> Result<StrategyProfile> {
    let types = instance.types();
    let best = direct_allocate(instance, &types)?;
    (0..instance.n())
        .map(|i| {
            let p = best.allocation.price_of(i).unwrap_or(0.0);
            let star = standalone_price(instance.quality(i), &types[i])?;
            Ok(Bid::new(p, types[i].gain_at(p)).with_standalone(star))
        })
        .collect::<Result<Vec<_>>>()
        .map(StrategyProfile::new)
}
