use crate::error::Result;
use crate::model::{AuctionInstance, StrategyProfile};

use super::{slot_welfare, sort_by_weight, AllocationResult, Ranked};

/// Welfare-maximizing assignment for fixed submitted prices and gains.
///
/// Every distinct submitted price is tried as the displayed minimum; for each
/// candidate the agents priced at or above it are ranked by
/// `q_i(p_i, p_min) b_i` and the top `m` with positive weight fill the slots.
/// The chosen set is then re-scored at its actual minimum price.
pub fn indirect_allocate(instance: &AuctionInstance, profile: &StrategyProfile) -> Result<AllocationResult> {
    indirect_allocate_with(instance, profile, None, false)
}

/// [`indirect_allocate`] with an optionally excluded agent. With
/// `zero_gain_allocable`, agents declaring a gain of exactly zero take any
/// slots left over, provided their price does not undercut the displayed
/// minimum.
pub fn indirect_allocate_with(
    instance: &AuctionInstance,
    profile: &StrategyProfile,
    excluded: Option<usize>,
    zero_gain_allocable: bool,
) -> Result<AllocationResult> {
    profile.validate(instance)?;
    let n = instance.n();
    let m = instance.m();
    let tb = instance.tie_break();
    let bids = &profile.bids;
    let active = |i: usize| excluded != Some(i);

    let mut candidates: Vec<f64> = (0..n).filter(|&i| active(i)).map(|i| bids[i].price).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut best = Ranked::empty();
    let mut entries: Vec<(usize, f64, f64)> = Vec::with_capacity(n);
    for &floor in &candidates {
        entries.clear();
        for i in (0..n).filter(|&i| active(i)) {
            let b = &bids[i];
            if b.price < floor {
                continue;
            }
            let w = instance.quality(i).eval_unchecked(b.price, floor) * b.gain;
            if w > 0.0 {
                entries.push((i, w, b.price));
            }
        }
        if entries.is_empty() {
            continue;
        }
        sort_by_weight(&mut entries, tb);
        entries.truncate(m);
        let actual_min = entries.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
        if actual_min > floor {
            for e in entries.iter_mut() {
                e.1 = instance.quality(e.0).eval_unchecked(e.2, actual_min) * bids[e.0].gain;
            }
            sort_by_weight(&mut entries, tb);
        }
        let cand = Ranked {
            welfare: slot_welfare(instance, &entries),
            order: entries.iter().map(|e| e.0).collect(),
            prices: entries.iter().map(|e| e.2).collect(),
        };
        if cand.beats(&best, tb) {
            best = cand;
        }
    }

    if zero_gain_allocable && !best.order.is_empty() && best.order.len() < m {
        let floor = best.prices.iter().copied().fold(f64::INFINITY, f64::min);
        let mut zeros: Vec<usize> = (0..n)
            .filter(|&i| active(i) && !best.order.contains(&i) && bids[i].gain == 0.0 && bids[i].price >= floor)
            .collect();
        zeros.sort_by_key(|&i| tb.rank(i));
        for i in zeros.into_iter().take(m - best.order.len()) {
            best.order.push(i);
            best.prices.push(bids[i].price);
        }
    }
    Ok(best.into_result(instance))
}
