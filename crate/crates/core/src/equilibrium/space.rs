use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AuctionInstance, Bid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Overbidding {
    Allowed,
    Forbidden,
}

/// Finite per-agent sets of `(price, gain)` strategies, sorted
/// lexicographically. Under [`Overbidding::Forbidden`] pairs with
/// `gain > alpha (price - cost)` are pruned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpace {
    strategies: Vec<Vec<Bid>>,
    overbidding: Overbidding,
}

/// Slack for the no-overbidding test, so that a gain computed as
/// `alpha (p - c)` elsewhere is never pruned by rounding.
const OVERBID_SLACK: f64 = 1e-12;

impl StrategySpace {
    /// Cartesian products of per-agent price and gain lists.
    pub fn new(instance: &AuctionInstance, prices: Vec<Vec<f64>>, gains: Vec<Vec<f64>>, overbidding: Overbidding) -> Result<Self> {
        if prices.len() != instance.n() || gains.len() != instance.n() {
            return Err(Error::invalid("space", format!("expected price and gain lists for {} agents", instance.n())));
        }
        let strategies = prices
            .iter()
            .zip(&gains)
            .map(|(ps, gs)| ps.iter().flat_map(|&p| gs.iter().map(move |&g| Bid::new(p, g))).collect())
            .collect();
        StrategySpace::from_bids(instance, strategies, overbidding)
    }

    /// Every agent may use every grid price with any of `gains`.
    pub fn uniform(instance: &AuctionInstance, gains: &[f64], overbidding: Overbidding) -> Result<Self> {
        let n = instance.n();
        StrategySpace::new(instance, vec![instance.price_grid().to_vec(); n], vec![gains.to_vec(); n], overbidding)
    }

    /// Every grid price, with gains drawn from zero and every agent's true
    /// gain at every grid price.
    pub fn truthful_grid(instance: &AuctionInstance, overbidding: Overbidding) -> Result<Self> {
        let mut gains = vec![0.0];
        for t in instance.types() {
            for &p in instance.price_grid() {
                let g = t.gain_at(p);
                if g > 0.0 {
                    gains.push(g);
                }
            }
        }
        StrategySpace::uniform(instance, &gains, overbidding)
    }

    /// Every grid price with either gain zero or the agent's own true gain
    /// there. Small enough to enumerate for four agents.
    pub fn own_truthful(instance: &AuctionInstance) -> Result<Self> {
        let strategies = instance
            .types()
            .iter()
            .map(|t| {
                instance
                    .price_grid()
                    .iter()
                    .flat_map(|&p| {
                        let g = t.gain_at(p);
                        std::iter::once(Bid::new(p, 0.0)).chain((g > 0.0).then(|| Bid::new(p, g)))
                    })
                    .collect()
            })
            .collect();
        StrategySpace::from_bids(instance, strategies, Overbidding::Forbidden)
    }

    /// Explicit strategy lists; sorted, deduplicated, and pruned.
    pub fn from_bids(instance: &AuctionInstance, strategies: Vec<Vec<Bid>>, overbidding: Overbidding) -> Result<Self> {
        if strategies.len() != instance.n() {
            return Err(Error::invalid("space", format!("expected strategies for {} agents", instance.n())));
        }
        let mut out = Vec::with_capacity(strategies.len());
        for (i, mut list) in strategies.into_iter().enumerate() {
            let t = instance.agent_type(i);
            for (k, b) in list.iter().enumerate() {
                if !(b.price.is_finite() && b.price >= 0.0 && b.gain.is_finite()) {
                    return Err(Error::invalid(format!("space[{i}][{k}]"), "prices must be finite and >= 0, gains finite"));
                }
            }
            if overbidding == Overbidding::Forbidden {
                list.retain(|b| b.gain <= t.gain_at(b.price) + OVERBID_SLACK);
            }
            list.sort_by(|a, b| a.price.total_cmp(&b.price).then(a.gain.total_cmp(&b.gain)));
            list.dedup_by(|a, b| a.price == b.price && a.gain == b.gain);
            if list.is_empty() {
                return Err(Error::invalid(format!("space[{i}]"), "agent has no admissible strategy"));
            }
            out.push(list);
        }
        Ok(StrategySpace { strategies: out, overbidding })
    }

    pub fn n(&self) -> usize {
        self.strategies.len()
    }

    pub fn strategies(&self, agent: usize) -> &[Bid] {
        &self.strategies[agent]
    }

    pub fn overbidding(&self) -> Overbidding {
        self.overbidding
    }

    pub fn contains(&self, agent: usize, bid: &Bid) -> bool {
        self.strategies[agent].iter().any(|b| b.price == bid.price && b.gain == bid.gain)
    }

    /// Number of joint profiles, saturating.
    pub fn joint_size(&self) -> u128 {
        self.strategies.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    /// Largest gap between consecutive allowed prices of any agent.
    pub fn grid_resolution(&self) -> f64 {
        let mut gap = 0.0f64;
        for list in &self.strategies {
            let mut prices: Vec<f64> = list.iter().map(|b| b.price).collect();
            prices.dedup();
            for w in prices.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
        }
        gap
    }

    pub(crate) fn check(&self, instance: &AuctionInstance) -> Result<()> {
        if self.n() != instance.n() {
            return Err(Error::invalid("space", format!("space covers {} agents, instance has {}", self.n(), instance.n())));
        }
        Ok(())
    }
}
