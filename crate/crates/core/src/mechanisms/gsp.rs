use crate::allocation::indirect_allocate_with;
use crate::error::Result;
use crate::model::{AuctionInstance, StrategyProfile};

use super::{Diagnostics, MechanismKind, Outcome, RunOptions};

/// Indirect GSP with default options.
pub fn run_indirect_gsp(instance: &AuctionInstance, profile: &StrategyProfile) -> Result<Outcome> {
    indirect_gsp_with(instance, profile, &RunOptions::default())
}

/// Each shown agent pays its slot's prominence times the weighted declared
/// value of the agent one slot below. The agent in the last filled slot pays
/// against the best unassigned agent priced at or above the displayed
/// minimum, or nothing if there is none.
pub(crate) fn indirect_gsp_with(instance: &AuctionInstance, profile: &StrategyProfile, opts: &RunOptions) -> Result<Outcome> {
    let best = indirect_allocate_with(instance, profile, None, opts.zero_gain_for(MechanismKind::IndirectGsp))?;
    let alloc = best.allocation;
    let bids = &profile.bids;
    let mut payments = vec![0.0; instance.n()];
    if let Some(pm) = alloc.min_price() {
        let order = alloc.order();
        let weight = |j: usize, floor: f64| instance.quality(j).eval_unchecked(bids[j].price, floor) * bids[j].gain;
        for (slot, &i) in order.iter().enumerate() {
            let lambda = instance.prominence(slot);
            payments[i] = match order.get(slot + 1) {
                Some(&next) => lambda * weight(next, pm),
                None => {
                    let mut top = 0.0f64;
                    for j in (0..instance.n()).filter(|&j| alloc.slot_of(j).is_none()) {
                        let w = if bids[j].price >= pm {
                            weight(j, pm)
                        } else if opts.gsp_min_price_filter {
                            continue;
                        } else {
                            // Shown, agent j would become the new minimum.
                            weight(j, bids[j].price)
                        };
                        top = top.max(w);
                    }
                    lambda * top
                }
            };
        }
    }
    Outcome::assemble(instance, MechanismKind::IndirectGsp, alloc, profile.gains(), payments, Diagnostics::default())
}
