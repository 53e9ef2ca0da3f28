//! Differential check of the fast allocators against exhaustive search.

use adprice::allocation::{brute_force_allocate, direct_allocate, indirect_allocate, BruteInput};
use adprice::synth::{random_instance, random_profile, rng, SynthConfig};

fn main() -> adprice::Result<()> {
    let mut r = rng(42);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let inst = random_instance(&mut r, &SynthConfig::default());
        let types = inst.types();
        let profile = random_profile(&mut r, &inst);
        let d = direct_allocate(&inst, &types)?.declared_welfare;
        let db = brute_force_allocate(&inst, BruteInput::Direct(&types), None)?.declared_welfare;
        let i = indirect_allocate(&inst, &profile)?.declared_welfare;
        let ib = brute_force_allocate(&inst, BruteInput::Indirect(&profile), None)?.declared_welfare;
        worst = worst.max((d - db).abs()).max((i - ib).abs());
    }
    println!("100 instances, largest welfare gap {worst:.2e}");
    Ok(())
}
