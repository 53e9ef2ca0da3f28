//! Rebuild each lower-bound construction and check its claims.

use adprice::constructions::{reproduce, Params, TheoremId};
use adprice::equilibrium::EquilibriumOptions;

fn main() -> adprice::Result<()> {
    for id in TheoremId::ALL {
        let v = reproduce(id, &Params::default(), &EquilibriumOptions::default())?;
        println!("{id}: {}", if v.passed() { "PASS" } else { "FAIL" });
        for a in v.assertions.iter().filter(|a| !a.passed) {
            println!("  {} {}: {}", if a.asserted { "failed" } else { "note" }, a.name, a.detail);
        }
    }
    Ok(())
}
