//! Export a construction, load it back, and see a bad file refused.

use adprice::allocation::direct_allocate;
use adprice::constructions::{build, Params, TheoremId};
use adprice::io::{instance_from_str, instance_to_string};

fn main() -> adprice::Result<()> {
    let t = build(TheoremId::T12, &Params::default())?;
    let text = instance_to_string(&t.instance);
    println!("{text}");
    let back = instance_from_str(&text)?;
    let a = direct_allocate(&t.instance, &t.instance.types())?;
    let b = direct_allocate(&back, &back.types())?;
    println!("same allocation after the round trip: {}", a.allocation == b.allocation);

    let bad = r#"{"agents":[{"alpha":1,"cost":0,"quality":{"kind":"only-min"}}],"prominences":[0.5,0.9],"price_grid":[1.0]}"#;
    println!("{}", instance_from_str(bad).unwrap_err());
    let typo = r#"{"agents":[{"alpha":1,"cost":"x","quality":{"kind":"only-min"}}],"prominences":[1.0],"price_grid":[1.0]}"#;
    println!("{}", instance_from_str(typo).unwrap_err());
    Ok(())
}
