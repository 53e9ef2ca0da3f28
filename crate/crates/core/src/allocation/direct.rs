use crate::error::{Error, Result};
use crate::model::{AgentType, AuctionInstance};

use super::{slot_welfare, sort_by_weight, AllocationResult, Ranked};

/// Work performed by one run of the direct allocator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    pub quality_evaluations: u64,
    /// Sum of `k * ceil(log2 k)` over every sort of `k` candidates.
    pub sort_work: u64,
}

/// Jointly optimizes the assignment and the grid prices for reported types.
pub fn direct_allocate(instance: &AuctionInstance, types: &[AgentType]) -> Result<AllocationResult> {
    direct_allocate_counted(instance, types, None).map(|(r, _)| r)
}

pub fn direct_allocate_excluding(instance: &AuctionInstance, types: &[AgentType], excluded: Option<usize>) -> Result<AllocationResult> {
    direct_allocate_counted(instance, types, excluded).map(|(r, _)| r)
}

/// The direct allocator with operation counts.
///
/// For every grid price `floor` and every agent `i` designated to show it,
/// each other agent takes its best grid price at or above `floor` (lowest
/// price among ties, dropped when no price yields positive weight), `i` is
/// forced in, and the slots are filled by weight.
pub fn direct_allocate_counted(
    instance: &AuctionInstance,
    types: &[AgentType],
    excluded: Option<usize>,
) -> Result<(AllocationResult, OpCount)> {
    if types.len() != instance.n() {
        return Err(Error::invalid("types", format!("expected {} reported types, got {}", instance.n(), types.len())));
    }
    let n = instance.n();
    let m = instance.m();
    let grid = instance.price_grid();
    let tb = instance.tie_break();
    let active = |i: usize| excluded != Some(i);
    let mut ops = OpCount::default();

    // best[h][k]: agent h's best (price, weight) when the displayed minimum
    // is grid[k].
    let mut best: Vec<Vec<Option<(f64, f64)>>> = vec![vec![None; grid.len()]; n];
    for h in (0..n).filter(|&h| active(h)) {
        let q = instance.quality(h);
        for (k, &floor) in grid.iter().enumerate() {
            let mut top: Option<(f64, f64)> = None;
            for &p in &grid[k..] {
                ops.quality_evaluations += 1;
                let w = q.eval_unchecked(p, floor) * types[h].gain_at(p);
                if w > 0.0 && top.map_or(true, |(_, tw)| w > tw) {
                    top = Some((p, w));
                }
            }
            best[h][k] = top;
        }
    }

    let mut winner = Ranked::empty();
    let mut entries: Vec<(usize, f64, f64)> = Vec::with_capacity(n);
    for (k, &floor) in grid.iter().enumerate() {
        for i in (0..n).filter(|&i| active(i)) {
            ops.quality_evaluations += 1;
            let own = instance.quality(i).eval_unchecked(floor, floor) * types[i].gain_at(floor);
            if own <= 0.0 {
                continue;
            }
            entries.clear();
            entries.push((i, own, floor));
            for h in (0..n).filter(|&h| h != i && active(h)) {
                if let Some((p, w)) = best[h][k] {
                    entries.push((h, w, p));
                }
            }
            sort_by_weight(&mut entries, tb);
            let len = entries.len() as u64;
            ops.sort_work += len * (64 - len.leading_zeros() as u64);
            if let Some(pos) = entries.iter().position(|e| e.0 == i) {
                if pos >= m {
                    let forced = entries[pos];
                    entries.truncate(m - 1);
                    entries.push(forced);
                }
            }
            entries.truncate(m);
            let cand = Ranked {
                welfare: slot_welfare(instance, &entries),
                order: entries.iter().map(|e| e.0).collect(),
                prices: entries.iter().map(|e| e.2).collect(),
            };
            if cand.beats(&winner, tb) {
                winner = cand;
            }
        }
    }
    Ok((winner.into_result(instance), ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{declared_welfare, gains_from_types, AgentSpec, SlotProfile, TieBreak};
    use crate::quality::QualityModel;

    #[test]
    fn zero_conversion_means_nothing_is_shown() {
        let agents = (0..3)
            .map(|_| AgentSpec { agent_type: AgentType { alpha: 0.0, cost: 0.1 }, quality: QualityModel::smooth_decay(1.0, 0.5, 0.0) })
            .collect();
        let inst = AuctionInstance::new(agents, SlotProfile::new(vec![1.0, 0.5]).unwrap(), vec![0.2, 0.6, 1.0], TieBreak::LowestIndex).unwrap();
        let r = direct_allocate(&inst, &inst.types()).unwrap();
        assert!(r.allocation.is_empty());
        assert_eq!(r.declared_welfare, 0.0);
    }

    #[test]
    fn reported_welfare_matches_recomputation() {
        let agents = vec![
            AgentSpec { agent_type: AgentType { alpha: 0.8, cost: 0.2 }, quality: QualityModel::smooth_decay(1.0, 0.6, 1.5) },
            AgentSpec { agent_type: AgentType { alpha: 0.5, cost: 0.1 }, quality: QualityModel::smooth_decay(0.9, 0.4, 0.5) },
            AgentSpec { agent_type: AgentType { alpha: 0.9, cost: 0.4 }, quality: QualityModel::smooth_decay(1.0, 0.3, 2.0) },
        ];
        let inst = AuctionInstance::new(agents, SlotProfile::new(vec![1.0, 0.7]).unwrap(), vec![0.3, 0.6, 0.9, 1.2], TieBreak::LowestIndex).unwrap();
        let types = inst.types();
        let r = direct_allocate(&inst, &types).unwrap();
        let gains = gains_from_types(&types, &r.allocation);
        let recomputed = declared_welfare(&inst, &r.allocation, &gains).unwrap();
        assert!((r.declared_welfare - recomputed).abs() < 1e-12);
        let pm = r.allocation.min_price().unwrap();
        for i in r.allocation.order() {
            assert!(r.allocation.price_of(i).unwrap() >= pm);
        }
    }

    #[test]
    fn excluding_the_only_agent_leaves_nothing() {
        let agents = vec![AgentSpec { agent_type: AgentType { alpha: 1.0, cost: 0.0 }, quality: QualityModel::only_min(None, 1.0) }];
        let inst = AuctionInstance::new(agents, SlotProfile::new(vec![1.0]).unwrap(), vec![1.0, 2.0], TieBreak::LowestIndex).unwrap();
        let r = direct_allocate_excluding(&inst, &inst.types(), Some(0)).unwrap();
        assert!(r.allocation.is_empty());
        let full = direct_allocate(&inst, &inst.types()).unwrap();
        assert_eq!(full.allocation.price_of(0), Some(2.0));
        assert_eq!(full.declared_welfare, 2.0);
    }
}
