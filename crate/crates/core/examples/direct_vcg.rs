//! Clarke payments for the direct mechanism, and why lying does not pay.

use adprice::mechanisms::run_direct_vcg;
use adprice::synth::{instance_from_seed, random_misreport, rng, SynthConfig};

fn main() -> adprice::Result<()> {
    let inst = instance_from_seed(5, &SynthConfig::default());
    let truth = inst.types();
    let out = run_direct_vcg(&inst, &truth)?;
    for i in 0..inst.n() {
        println!("agent {i}: value {:.4}, pays {:.4}, utility {:.4}", out.true_values[i], out.payments[i], out.utility(i));
    }
    println!("revenue {:.4}", out.revenue);

    let mut r = rng(1);
    let mut best_lie = f64::NEG_INFINITY;
    for _ in 0..200 {
        for i in 0..inst.n() {
            let mut lie = truth.clone();
            lie[i] = random_misreport(&mut r, &truth[i]);
            best_lie = best_lie.max(run_direct_vcg(&inst, &lie)?.utility(i) - out.utility(i));
        }
    }
    println!("best gain from 200 random lies per agent: {best_lie:.2e}");
    Ok(())
}
