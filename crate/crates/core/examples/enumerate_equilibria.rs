//! Every pure Nash equilibrium of a small random instance.

use adprice::equilibrium::{enumerate_pure_nash, EquilibriumOptions, StrategySpace};
use adprice::mechanisms::{run_indirect, MechanismKind};
use adprice::synth::{instance_from_seed, SynthConfig};

fn main() -> adprice::Result<()> {
    let inst = instance_from_seed(21, &SynthConfig { max_agents: 3, ..Default::default() });
    let space = StrategySpace::own_truthful(&inst)?;
    let opts = EquilibriumOptions::default();
    for kind in [MechanismKind::IndirectVcg, MechanismKind::IndirectGsp] {
        let found = enumerate_pure_nash(&inst, kind, &space, &opts)?;
        println!("{kind}: {} equilibria among {} profiles", found.len(), space.joint_size());
        for p in found.iter().take(5) {
            let out = run_indirect(&inst, kind, p, &opts.run)?;
            let bids: Vec<_> = p.bids.iter().map(|b| (b.price, (b.gain * 1e4).round() / 1e4)).collect();
            println!("  {bids:?} welfare {:.4} revenue {:.4}", out.true_welfare, out.revenue);
        }
    }
    Ok(())
}
