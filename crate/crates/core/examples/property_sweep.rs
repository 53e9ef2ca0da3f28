//! Seeded sweep: the truthful direct profile is an efficient equilibrium of
//! indirect VCG, and no equilibrium loses more than a factor m.

use adprice::allocation::direct_allocate;
use adprice::equilibrium::{enumerate_pure_nash, is_nash, truthful_direct_profile, EquilibriumOptions, Overbidding, StrategySpace};
use adprice::mechanisms::{run_indirect, MechanismKind};
use adprice::synth::{instance_from_seed, SynthConfig};

fn main() -> adprice::Result<()> {
    let seeds = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50u64);
    let opts = EquilibriumOptions::default();
    let kind = MechanismKind::IndirectVcg;
    let (mut stable, mut worst) = (0, 1.0f64);
    for seed in 0..seeds {
        let inst = instance_from_seed(seed, &SynthConfig::default());
        let bench = direct_allocate(&inst, &inst.types())?.declared_welfare;
        let truthful = truthful_direct_profile(&inst)?;
        if is_nash(&inst, kind, &StrategySpace::truthful_grid(&inst, Overbidding::Forbidden)?, &truthful, &opts)?.is_nash {
            stable += 1;
        }
        for p in enumerate_pure_nash(&inst, kind, &StrategySpace::own_truthful(&inst)?, &opts)? {
            let sw = run_indirect(&inst, kind, &p, &opts.run)?.true_welfare;
            if sw > 0.0 {
                worst = worst.max(bench / sw / inst.m() as f64);
            }
        }
    }
    println!("{stable}/{seeds} truthful profiles are equilibria");
    println!("worst equilibrium loss as a fraction of m: {worst:.4}");
    Ok(())
}
