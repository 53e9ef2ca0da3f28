//! VCG* recovers each type from a standalone price and charges direct-VCG
//! payments on the inferred types.

use adprice::equilibrium::truthful_star_profile;
use adprice::mechanisms::{run_direct_vcg, run_indirect_vcg_star};
use adprice::synth::{instance_from_seed, QualityMix, SynthConfig};

fn main() -> adprice::Result<()> {
    let inst = instance_from_seed(3, &SynthConfig { qualities: QualityMix::Smooth, ..Default::default() });
    let profile = truthful_star_profile(&inst)?;
    let star = run_indirect_vcg_star(&inst, &profile)?;
    let direct = run_direct_vcg(&inst, &inst.types())?;
    for (i, t) in star.diagnostics.inferred.iter().enumerate() {
        let truth = inst.agent_type(i);
        println!(
            "agent {i}: alpha {:.4} (true {:.4}), cost {:.4} (true {:.4}), pays {:.6} vs direct {:.6}",
            t.alpha_hat, truth.alpha, t.c_hat, truth.cost, star.payments[i], direct.payments[i]
        );
    }
    Ok(())
}
