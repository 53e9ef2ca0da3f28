//! Domain types: agent types, slots, instances, bids, allocations, and the
//! value/welfare arithmetic shared by every mechanism.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quality::QualityModel;

/// Private type of an agent: conversion probability and unit supply cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentType {
    pub alpha: f64,
    pub cost: f64,
}

impl AgentType {
    pub fn new(alpha: f64, cost: f64) -> Result<Self> {
        let t = AgentType { alpha, cost };
        t.validate("type")?;
        Ok(t)
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("{path}.alpha"), format!("{} not in [0, 1]", self.alpha)));
        }
        if !(self.cost >= 0.0 && self.cost.is_finite()) {
            return Err(Error::invalid(format!("{path}.cost"), format!("{} must be finite and >= 0", self.cost)));
        }
        Ok(())
    }

    /// Expected gain per click at `price`: `alpha * (price - cost)`.
    pub fn gain_at(&self, price: f64) -> f64 {
        self.alpha * (price - self.cost)
    }
}

/// Slot prominences, non-increasing from the top slot down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlotProfile(Vec<f64>);

impl SlotProfile {
    pub fn new(prominences: Vec<f64>) -> Result<Self> {
        if prominences.is_empty() {
            return Err(Error::invalid("prominences", "at least one slot is required"));
        }
        for (j, l) in prominences.iter().enumerate() {
            if !(0.0..=1.0).contains(l) {
                return Err(Error::invalid(format!("prominences[{j}]"), format!("{l} not in [0, 1]")));
            }
        }
        for j in 1..prominences.len() {
            if prominences[j] > prominences[j - 1] {
                return Err(Error::invalid(
                    format!("prominences[{}..={j}]", j - 1),
                    format!(
                        "prominence increases from slot {} ({}) to slot {j} ({})",
                        j - 1,
                        prominences[j - 1],
                        prominences[j]
                    ),
                ));
            }
        }
        Ok(SlotProfile(prominences))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prominence(&self, slot: usize) -> f64 {
        self.0[slot]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Deterministic preference among agents for breaking welfare ties.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Lower agent index wins.
    #[default]
    LowestIndex,
    /// Agents listed earlier win; must be a permutation of `0..n`.
    Priority(Vec<usize>),
}

impl TieBreak {
    /// Position of `agent` in the preference order (lower is preferred).
    pub fn rank(&self, agent: usize) -> usize {
        match self {
            TieBreak::LowestIndex => agent,
            TieBreak::Priority(order) => order.iter().position(|&a| a == agent).unwrap_or(usize::MAX),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let TieBreak::Priority(order) = self {
            let mut seen = vec![false; n];
            for (k, &a) in order.iter().enumerate() {
                if a >= n || seen[a] {
                    return Err(Error::invalid(format!("tie_break.priority[{k}]"), "must be a permutation of the agents"));
                }
                seen[a] = true;
            }
            if order.len() != n {
                return Err(Error::invalid("tie_break.priority", "must list every agent exactly once"));
            }
        }
        Ok(())
    }
}

/// Serialized flat as `{alpha, cost, quality}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "AgentRecord", into = "AgentRecord")]
pub struct AgentSpec {
    pub agent_type: AgentType,
    pub quality: QualityModel,
}

// A plain struct rather than `flatten`, which would hide the failing field
// from path-reporting deserializers.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentRecord {
    alpha: f64,
    cost: f64,
    quality: QualityModel,
}

impl From<AgentRecord> for AgentSpec {
    fn from(r: AgentRecord) -> Self {
        AgentSpec { agent_type: AgentType { alpha: r.alpha, cost: r.cost }, quality: r.quality }
    }
}

impl From<AgentSpec> for AgentRecord {
    fn from(a: AgentSpec) -> Self {
        AgentRecord { alpha: a.agent_type.alpha, cost: a.agent_type.cost, quality: a.quality }
    }
}

/// Agents, slots, the finite price grid, and the tie-break rule. Immutable
/// once built.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionInstance {
    agents: Vec<AgentSpec>,
    slots: SlotProfile,
    price_grid: Vec<f64>,
    tie_break: TieBreak,
}

impl AuctionInstance {
    pub fn new(agents: Vec<AgentSpec>, slots: SlotProfile, price_grid: Vec<f64>, tie_break: TieBreak) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::invalid("agents", "at least one agent is required"));
        }
        for (i, a) in agents.iter().enumerate() {
            a.agent_type.validate(&format!("agents[{i}]"))?;
            a.quality.validate(&format!("agents[{i}].quality"))?;
        }
        if price_grid.is_empty() {
            return Err(Error::invalid("price_grid", "at least one price is required"));
        }
        for (k, p) in price_grid.iter().enumerate() {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::invalid(format!("price_grid[{k}]"), format!("{p} must be finite and >= 0")));
            }
            if k > 0 && !(price_grid[k - 1] < *p) {
                return Err(Error::invalid(format!("price_grid[{k}]"), "prices must be strictly ascending"));
            }
        }
        tie_break.validate(agents.len())?;
        Ok(AuctionInstance { agents, slots, price_grid, tie_break })
    }

    /// Same agents and grid with a different slot profile.
    pub fn with_slots(&self, slots: SlotProfile) -> Self {
        AuctionInstance { slots, ..self.clone() }
    }

    /// Same agents and slots with a different price grid.
    pub fn with_price_grid(&self, price_grid: Vec<f64>) -> Result<Self> {
        AuctionInstance::new(self.agents.clone(), self.slots.clone(), price_grid, self.tie_break.clone())
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn m(&self) -> usize {
        self.slots.len()
    }

    pub fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    pub fn agent_type(&self, i: usize) -> AgentType {
        self.agents[i].agent_type
    }

    pub fn types(&self) -> Vec<AgentType> {
        self.agents.iter().map(|a| a.agent_type).collect()
    }

    pub fn quality(&self, i: usize) -> &QualityModel {
        &self.agents[i].quality
    }

    pub fn slots(&self) -> &SlotProfile {
        &self.slots
    }

    pub fn prominence(&self, slot: usize) -> f64 {
        self.slots.prominence(slot)
    }

    pub fn price_grid(&self) -> &[f64] {
        &self.price_grid
    }

    pub fn tie_break(&self) -> &TieBreak {
        &self.tie_break
    }

    pub(crate) fn check_agent(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::AgentOutOfRange { index: i, n: self.n() });
        }
        Ok(())
    }
}

/// One agent's input to an indirect mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub price: f64,
    pub gain: f64,
    /// Price the agent would pick if shown alone; only read by VCG*.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standalone_price: Option<f64>,
}

impl Bid {
    pub fn new(price: f64, gain: f64) -> Self {
        Bid { price, gain, standalone_price: None }
    }

    pub fn with_standalone(mut self, standalone_price: f64) -> Self {
        self.standalone_price = Some(standalone_price);
        self
    }

    /// True iff `gain <= alpha (price - cost)`.
    pub fn is_non_overbidding(&self, t: &AgentType) -> bool {
        self.gain <= t.gain_at(self.price)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub bids: Vec<Bid>,
}

impl StrategyProfile {
    pub fn new(bids: Vec<Bid>) -> Self {
        StrategyProfile { bids }
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn gains(&self) -> Vec<f64> {
        self.bids.iter().map(|b| b.gain).collect()
    }

    pub fn with_bid(&self, agent: usize, bid: Bid) -> Self {
        let mut bids = self.bids.clone();
        bids[agent] = bid;
        StrategyProfile { bids }
    }

    pub fn validate(&self, instance: &AuctionInstance) -> Result<()> {
        if self.bids.len() != instance.n() {
            return Err(Error::invalid("bids", format!("expected {} bids, got {}", instance.n(), self.bids.len())));
        }
        for (i, b) in self.bids.iter().enumerate() {
            if !(b.price.is_finite() && b.price >= 0.0) {
                return Err(Error::invalid(format!("bids[{i}].price"), "must be finite and >= 0"));
            }
            if !b.gain.is_finite() {
                return Err(Error::invalid(format!("bids[{i}].gain"), "must be finite"));
            }
            if let Some(s) = b.standalone_price {
                if !(s.is_finite() && s >= 0.0) {
                    return Err(Error::invalid(format!("bids[{i}].standalone_price"), "must be finite and >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Slot assignment with the display price of every shown agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    slots: Vec<Option<usize>>,
    prices: Vec<Option<f64>>,
    min_price: Option<f64>,
}

impl Allocation {
    pub fn empty(n: usize) -> Self {
        Allocation { slots: vec![None; n], prices: vec![None; n], min_price: None }
    }

    /// Builds an allocation from per-agent slots and display prices; the
    /// displayed minimum is derived.
    pub fn new(m: usize, slots: Vec<Option<usize>>, prices: Vec<Option<f64>>) -> Result<Self> {
        if slots.len() != prices.len() {
            return Err(Error::InconsistentAllocation("slot and price vectors differ in length".into()));
        }
        let mut used = vec![false; m];
        let mut min_price: Option<f64> = None;
        for (i, (s, p)) in slots.iter().zip(&prices).enumerate() {
            match (s, p) {
                (Some(j), Some(price)) => {
                    if *j >= m {
                        return Err(Error::InconsistentAllocation(format!("agent {i} assigned to missing slot {j}")));
                    }
                    if used[*j] {
                        return Err(Error::InconsistentAllocation(format!("slot {j} holds more than one ad")));
                    }
                    used[*j] = true;
                    min_price = Some(min_price.map_or(*price, |mp| mp.min(*price)));
                }
                (None, None) => {}
                (Some(_), None) => {
                    return Err(Error::InconsistentAllocation(format!("assigned agent {i} has no display price")))
                }
                (None, Some(_)) => {
                    return Err(Error::InconsistentAllocation(format!("unassigned agent {i} has a display price")))
                }
            }
        }
        Ok(Allocation { slots, prices, min_price })
    }

    /// Like [`Allocation::new`] but also checks a claimed displayed minimum.
    pub fn with_claimed_min(m: usize, slots: Vec<Option<usize>>, prices: Vec<Option<f64>>, min_price: Option<f64>) -> Result<Self> {
        let a = Allocation::new(m, slots, prices)?;
        if a.min_price != min_price {
            return Err(Error::InconsistentAllocation(format!(
                "claimed p_min {:?} but displayed minimum is {:?}",
                min_price, a.min_price
            )));
        }
        Ok(a)
    }

    pub fn n(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_of(&self, agent: usize) -> Option<usize> {
        self.slots[agent]
    }

    pub fn price_of(&self, agent: usize) -> Option<f64> {
        self.prices[agent]
    }

    pub fn min_price(&self) -> Option<f64> {
        self.min_price
    }

    pub fn slots(&self) -> &[Option<usize>] {
        &self.slots
    }

    pub fn is_empty(&self) -> bool {
        self.min_price.is_none()
    }

    pub fn displayed_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Displayed agents ordered by slot.
    pub fn order(&self) -> Vec<usize> {
        let mut shown: Vec<(usize, usize)> =
            self.slots.iter().enumerate().filter_map(|(i, s)| s.map(|j| (j, i))).collect();
        shown.sort_unstable();
        shown.into_iter().map(|(_, i)| i).collect()
    }

    /// Agent shown in `slot`, if any.
    pub fn agent_in_slot(&self, slot: usize) -> Option<usize> {
        self.slots.iter().position(|s| *s == Some(slot))
    }

    /// Highest occupied slot plus one (the `ell` of canonical form).
    pub fn filled_prefix(&self) -> usize {
        self.slots.iter().filter_map(|s| *s).map(|j| j + 1).max().unwrap_or(0)
    }

    /// Assigned slots form a prefix and per-slot values are non-increasing.
    pub fn is_canonical(&self, instance: &AuctionInstance, gains: &[f64]) -> bool {
        let ell = self.filled_prefix();
        if ell != self.displayed_count() {
            return false;
        }
        let Some(pm) = self.min_price else { return true };
        let weights: Vec<f64> = self
            .order()
            .iter()
            .map(|&i| instance.quality(i).eval_unchecked(self.prices[i].unwrap(), pm) * gains[i])
            .collect();
        weights.windows(2).all(|w| w[0] + crate::WELFARE_TOL >= w[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WelfareMode {
    Declared,
    True,
}

fn slot_value(instance: &AuctionInstance, allocation: &Allocation, agent: usize, gain: f64) -> Result<f64> {
    instance.check_agent(agent)?;
    if allocation.n() != instance.n() {
        return Err(Error::InconsistentAllocation(format!(
            "allocation covers {} agents, instance has {}",
            allocation.n(),
            instance.n()
        )));
    }
    let Some(slot) = allocation.slot_of(agent) else { return Ok(0.0) };
    if slot >= instance.m() {
        return Err(Error::InconsistentAllocation(format!("slot {slot} does not exist")));
    }
    let price = allocation.price_of(agent).expect("assigned agents carry a price");
    let pm = allocation.min_price().expect("non-empty allocation has a minimum");
    let q = instance.quality(agent).evaluate(price, pm)?;
    Ok(instance.prominence(slot) * q * gain)
}

/// `lambda_{f(i)} q_i(p_i, p_min) b_i`, zero for unassigned agents.
pub fn declared_value(instance: &AuctionInstance, allocation: &Allocation, agent: usize, gain: f64) -> Result<f64> {
    slot_value(instance, allocation, agent, gain)
}

/// Value under the agent's true gain `alpha_i (p_i - c_i)` at its display price.
pub fn true_value(instance: &AuctionInstance, allocation: &Allocation, agent: usize) -> Result<f64> {
    instance.check_agent(agent)?;
    match allocation.price_of(agent) {
        None => Ok(0.0),
        Some(p) => slot_value(instance, allocation, agent, instance.agent_type(agent).gain_at(p)),
    }
}

/// Sum of declared values for the given per-agent gains.
pub fn declared_welfare(instance: &AuctionInstance, allocation: &Allocation, gains: &[f64]) -> Result<f64> {
    if gains.len() != instance.n() {
        return Err(Error::invalid("gains", format!("expected {} gains, got {}", instance.n(), gains.len())));
    }
    (0..instance.n()).map(|i| declared_value(instance, allocation, i, gains[i])).sum()
}

pub fn true_welfare(instance: &AuctionInstance, allocation: &Allocation) -> Result<f64> {
    (0..instance.n()).map(|i| true_value(instance, allocation, i)).sum()
}

pub fn social_welfare(instance: &AuctionInstance, allocation: &Allocation, profile: &StrategyProfile, mode: WelfareMode) -> Result<f64> {
    match mode {
        WelfareMode::Declared => declared_welfare(instance, allocation, &profile.gains()),
        WelfareMode::True => true_welfare(instance, allocation),
    }
}

/// Declared gains implied by reported types at the allocation's display
/// prices (zero for hidden agents).
pub fn gains_from_types(types: &[AgentType], allocation: &Allocation) -> Vec<f64> {
    types
        .iter()
        .enumerate()
        .map(|(i, t)| allocation.price_of(i).map_or(0.0, |p| t.gain_at(p)))
        .collect()
}
