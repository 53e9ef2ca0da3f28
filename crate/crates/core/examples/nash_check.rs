//! Verify a profile and print the deviation that breaks it, if any.

use adprice::constructions::{build, Params, TheoremId};
use adprice::equilibrium::{best_response, is_nash, EquilibriumOptions};
use adprice::mechanisms::MechanismKind;
use adprice::{Bid, StrategyProfile};

fn main() -> adprice::Result<()> {
    let t = build(TheoremId::T7, &Params::default())?;
    let opts = EquilibriumOptions::default();
    let kind = MechanismKind::IndirectVcg;

    let low = t.reference(kind).unwrap();
    println!("everyone at p_bar/m: {:?}", is_nash(&t.instance, kind, &t.space, low, &opts)?);

    let high = StrategyProfile::new(vec![Bid::new(1.0, 1.0), Bid::new(0.5, 0.5), Bid::new(0.5, 0.25)]);
    let check = is_nash(&t.instance, kind, &t.space, &high, &opts)?;
    println!("mixed prices: nash = {}", check.is_nash);
    if let Some(d) = check.witness {
        println!("  agent {} moves to ({}, {}): {:.3} -> {:.3}", d.agent, d.bid.price, d.bid.gain, d.current_utility, d.deviation_utility);
        let (bid, u) = best_response(&t.instance, kind, &t.space, &high, d.agent, &opts)?;
        println!("  best response ({}, {}) with utility {u:.3}", bid.price, bid.gain);
    }
    Ok(())
}
