//! Price of anarchy and stability on the two-slot revenue construction.

use adprice::constructions::{build, Params, TheoremId};
use adprice::equilibrium::{efficiency_report, EquilibriumOptions};

fn main() -> adprice::Result<()> {
    let t = build(TheoremId::T10, &Params::default())?;
    for kind in t.mechanisms() {
        let r = efficiency_report(&t.instance, kind, &t.space, &EquilibriumOptions::default())?;
        println!(
            "{kind}: {} equilibria, opt sw {}, opt rev {}, poa sw {}, pos sw {}, poa rev {}, pos rev {}",
            r.equilibria.len(),
            r.benchmark_sw,
            r.benchmark_rev,
            r.poa_sw,
            r.pos_sw,
            r.poa_rev,
            r.pos_rev
        );
    }
    Ok(())
}
