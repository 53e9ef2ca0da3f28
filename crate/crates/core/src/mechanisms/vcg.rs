use crate::allocation::{direct_allocate, direct_allocate_excluding, indirect_allocate_with};
use crate::error::Result;
use crate::model::{gains_from_types, AgentType, AuctionInstance, StrategyProfile};

use super::{Diagnostics, MechanismKind, Outcome, RunOptions};

/// Direct VCG: prices and slots from [`direct_allocate`], Clarke payments
/// from re-optimizing without each shown agent.
pub fn run_direct_vcg(instance: &AuctionInstance, reported: &[AgentType]) -> Result<Outcome> {
    let best = direct_allocate(instance, reported)?;
    let gains = gains_from_types(reported, &best.allocation);
    let mut payments = vec![0.0; instance.n()];
    for i in best.allocation.order() {
        let without = direct_allocate_excluding(instance, reported, Some(i))?.declared_welfare;
        let own = instance.prominence(best.allocation.slot_of(i).unwrap())
            * instance.quality(i).eval_unchecked(best.allocation.price_of(i).unwrap(), best.allocation.min_price().unwrap())
            * gains[i];
        payments[i] = without - (best.declared_welfare - own);
    }
    Outcome::assemble(instance, MechanismKind::DirectVcg, best.allocation, gains, payments, Diagnostics::default())
}

/// Indirect VCG with default options.
pub fn run_indirect_vcg(instance: &AuctionInstance, profile: &StrategyProfile) -> Result<Outcome> {
    indirect_vcg_with(instance, profile, &RunOptions::default())
}

pub(crate) fn indirect_vcg_with(instance: &AuctionInstance, profile: &StrategyProfile, opts: &RunOptions) -> Result<Outcome> {
    let zero_gain = opts.zero_gain_for(MechanismKind::IndirectVcg);
    let best = indirect_allocate_with(instance, profile, None, zero_gain)?;
    let gains = profile.gains();
    let mut payments = vec![0.0; instance.n()];
    for i in best.allocation.order() {
        let without = indirect_allocate_with(instance, profile, Some(i), zero_gain)?.declared_welfare;
        let own = instance.prominence(best.allocation.slot_of(i).unwrap())
            * instance.quality(i).eval_unchecked(profile.bids[i].price, best.allocation.min_price().unwrap())
            * gains[i];
        payments[i] = without - (best.declared_welfare - own);
    }
    Outcome::assemble(instance, MechanismKind::IndirectVcg, best.allocation, gains, payments, Diagnostics::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentSpec, Bid, SlotProfile, TieBreak};
    use crate::quality::QualityModel;

    #[test]
    fn lone_agent_pays_nothing() {
        let agents = vec![AgentSpec { agent_type: AgentType { alpha: 0.7, cost: 0.1 }, quality: QualityModel::smooth_decay(1.0, 0.5, 1.0) }];
        let inst = AuctionInstance::new(agents, SlotProfile::new(vec![1.0]).unwrap(), vec![0.5, 1.0, 1.5], TieBreak::LowestIndex).unwrap();
        let out = run_direct_vcg(&inst, &inst.types()).unwrap();
        assert_eq!(out.payments, vec![0.0]);
        assert!(out.declared_welfare > 0.0);
        let prof = StrategyProfile::new(vec![Bid::new(1.0, 0.63)]);
        assert_eq!(run_indirect_vcg(&inst, &prof).unwrap().payments, vec![0.0]);
    }

    #[test]
    fn single_slot_is_a_second_price_auction() {
        let q = QualityModel::only_min(None, 1.0);
        let agents = (0..3).map(|_| AgentSpec { agent_type: AgentType { alpha: 1.0, cost: 0.0 }, quality: q.clone() }).collect();
        let inst = AuctionInstance::new(agents, SlotProfile::new(vec![0.8]).unwrap(), vec![1.0], TieBreak::LowestIndex).unwrap();
        let prof = StrategyProfile::new(vec![Bid::new(1.0, 3.0), Bid::new(1.0, 2.0), Bid::new(1.0, 1.0)]);
        let out = run_indirect_vcg(&inst, &prof).unwrap();
        assert_eq!(out.allocation.order(), vec![0]);
        assert!((out.payments[0] - 1.6).abs() < 1e-12);
        assert!((out.revenue - 1.6).abs() < 1e-12);
    }
}
