//! Agents pick their own prices; the mechanism picks who is shown.
//!
//! Every ad's click rate falls once a cheaper ad is on the page, so the best
//! page can leave out an ad with a high declared gain.

use adprice::allocation::indirect_allocate;
use adprice::{AgentSpec, AgentType, AuctionInstance, Bid, QualityModel, SlotProfile, StrategyProfile, TieBreak};

fn main() -> adprice::Result<()> {
    let q = QualityModel::smooth_decay(1.0, 0.3, 2.0);
    let agents = vec![
        AgentSpec { agent_type: AgentType::new(0.8, 0.2)?, quality: q.clone() },
        AgentSpec { agent_type: AgentType::new(0.6, 0.1)?, quality: q.clone() },
        AgentSpec { agent_type: AgentType::new(0.9, 0.5)?, quality: q },
    ];
    let inst = AuctionInstance::new(agents, SlotProfile::new(vec![1.0, 0.6])?, vec![0.5, 1.0, 1.5], TieBreak::LowestIndex)?;

    let profile = StrategyProfile::new(vec![Bid::new(1.5, 1.0), Bid::new(1.5, 0.8), Bid::new(0.5, 0.3)]);
    let best = indirect_allocate(&inst, &profile)?;
    for (slot, i) in best.allocation.order().into_iter().enumerate() {
        println!("slot {} -> agent {i} at {:?}", slot + 1, best.allocation.price_of(i).unwrap());
    }
    println!("p_min {:?}, declared welfare {:.4}", best.allocation.min_price(), best.declared_welfare);
    Ok(())
}
