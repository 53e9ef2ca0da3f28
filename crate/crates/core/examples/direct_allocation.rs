//! The direct mechanism knows the types and chooses prices itself.

use adprice::allocation::{direct_allocate, direct_allocate_counted};
use adprice::synth::{instance_from_seed, SynthConfig};

fn main() -> adprice::Result<()> {
    let inst = instance_from_seed(11, &SynthConfig::default());
    let types = inst.types();
    let best = direct_allocate(&inst, &types)?;
    println!("{} agents, {} slots, grid {:?}", inst.n(), inst.m(), inst.price_grid());
    for i in best.allocation.order() {
        let p = best.allocation.price_of(i).unwrap();
        println!("agent {i}: slot {}, price {p}, gain {:.4}", best.allocation.slot_of(i).unwrap() + 1, types[i].gain_at(p));
    }
    println!("optimal welfare {:.6}", best.declared_welfare);

    let (_, ops) = direct_allocate_counted(&inst, &types, None)?;
    println!("work: {} quality evaluations, {} sort steps", ops.quality_evaluations, ops.sort_work);
    Ok(())
}
