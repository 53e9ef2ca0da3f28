//! Welfare-maximizing allocation: the indirect allocator (prices fixed by the
//! agents), the direct allocator (prices chosen from the grid), and an
//! exhaustive oracle for testing both.

mod brute;
mod direct;
mod indirect;

pub use brute::{brute_force_allocate, BruteInput, BRUTE_MAX_AGENTS, BRUTE_MAX_PRICES, BRUTE_MAX_SLOTS};
pub use direct::{direct_allocate, direct_allocate_counted, direct_allocate_excluding, OpCount};
pub use indirect::{indirect_allocate, indirect_allocate_with};

use serde::{Deserialize, Serialize};

use crate::model::{Allocation, AuctionInstance, TieBreak};
use crate::WELFARE_TOL;

/// An allocation together with its declared social welfare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub allocation: Allocation,
    pub declared_welfare: f64,
}

pub type DirectAllocationResult = AllocationResult;

/// A candidate allocation in canonical slot order, ranked for argmax.
#[derive(Debug, Clone)]
pub(crate) struct Ranked {
    pub welfare: f64,
    /// Displayed agents, top slot first.
    pub order: Vec<usize>,
    /// Display prices aligned with `order`.
    pub prices: Vec<f64>,
}

impl Ranked {
    pub fn empty() -> Self {
        Ranked { welfare: 0.0, order: Vec::new(), prices: Vec::new() }
    }

    /// Strict preference of `self` over `other`: higher welfare beyond the
    /// tolerance; on a tie more displayed ads, then the tie-break order of
    /// the agents slot by slot, then lower prices.
    pub fn beats(&self, other: &Ranked, tie_break: &TieBreak) -> bool {
        if self.welfare > other.welfare + WELFARE_TOL {
            return true;
        }
        if self.welfare < other.welfare - WELFARE_TOL {
            return false;
        }
        if self.order.len() != other.order.len() {
            return self.order.len() > other.order.len();
        }
        let ranks = |r: &Ranked| r.order.iter().map(|&i| tie_break.rank(i)).collect::<Vec<_>>();
        match ranks(self).cmp(&ranks(other)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
        for (a, b) in self.prices.iter().zip(&other.prices) {
            if a < b {
                return true;
            }
            if a > b {
                return false;
            }
        }
        false
    }

    pub fn into_result(self, instance: &AuctionInstance) -> AllocationResult {
        let n = instance.n();
        let mut slots = vec![None; n];
        let mut prices = vec![None; n];
        for (slot, (&i, &p)) in self.order.iter().zip(&self.prices).enumerate() {
            slots[i] = Some(slot);
            prices[i] = Some(p);
        }
        let allocation = Allocation::new(instance.m(), slots, prices).expect("ranked candidates are injective");
        AllocationResult { allocation, declared_welfare: self.welfare }
    }
}

/// Sorts `(agent, weight, price)` entries by weight descending, tie-break
/// order ascending.
pub(crate) fn sort_by_weight(entries: &mut [(usize, f64, f64)], tie_break: &TieBreak) {
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| tie_break.rank(a.0).cmp(&tie_break.rank(b.0))));
}

/// `sum_j lambda_j * weight_j` over entries in slot order.
pub(crate) fn slot_welfare(instance: &AuctionInstance, entries: &[(usize, f64, f64)]) -> f64 {
    entries.iter().enumerate().map(|(j, e)| instance.prominence(j) * e.1).sum()
}
