//! Same bids, two payment rules. Then the GSP last-slot filter switched off,
//! which charges the last shown ad more than its declared value.

use adprice::mechanisms::{run_indirect, MechanismKind, RunOptions};
use adprice::{AgentSpec, AgentType, AuctionInstance, Bid, QualityModel, SlotProfile, StrategyProfile, TieBreak};

fn show(inst: &AuctionInstance, profile: &StrategyProfile, kind: MechanismKind, opts: &RunOptions) -> adprice::Result<()> {
    let out = run_indirect(inst, kind, profile, opts)?;
    println!("{kind}:");
    for i in 0..inst.n() {
        println!("  agent {i}: slot {:?}, declared value {:.3}, pays {:.3}", out.allocation.slot_of(i).map(|j| j + 1), out.declared_values[i], out.payments[i]);
    }
    Ok(())
}

fn main() -> adprice::Result<()> {
    let agents: Vec<AgentSpec> = (0..3)
        .map(|_| AgentSpec { agent_type: AgentType::new(1.0, 0.0).unwrap(), quality: QualityModel::only_min(None, 1.0) })
        .collect();
    let inst = AuctionInstance::new(agents, SlotProfile::new(vec![1.0, 0.7])?, vec![0.5, 1.0], TieBreak::LowestIndex)?;
    let profile = StrategyProfile::new(vec![Bid::new(1.0, 1.0), Bid::new(1.0, 0.8), Bid::new(0.5, 1.5)]);

    let opts = RunOptions::default();
    show(&inst, &profile, MechanismKind::IndirectVcg, &opts)?;
    show(&inst, &profile, MechanismKind::IndirectGsp, &opts)?;

    // Agent 2 is cheaper than the page minimum. Counting it anyway breaks IR.
    let unfiltered = RunOptions { gsp_min_price_filter: false, ..opts };
    println!("without the p_j >= p_min filter");
    show(&inst, &profile, MechanismKind::IndirectGsp, &unfiltered)
}
