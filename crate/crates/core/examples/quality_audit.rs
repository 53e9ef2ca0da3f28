//! Checks quality models for the two monotonicity directions.
//!
//! A smooth model passes; a hand-written table that rewards raising your own
//! price is caught, and the report names the offending cell.

use adprice::quality::{audit_on_grid, audit_quality, dense_probe_grid, QualityModel};

fn main() {
    let smooth = QualityModel::smooth_decay(0.9, 0.4, 1.5);
    let report = audit_quality(&smooth, &dense_probe_grid(0.2, 2.0, 25));
    println!("smooth-decay on 25 prices: clean = {}", report.is_clean());

    // Row a is the agent's price, column b the displayed minimum.
    let table = QualityModel::Tabulated {
        prices: vec![1.0, 1.5, 2.0],
        values: vec![vec![0.9], vec![0.7, 0.8], vec![0.75, 0.75, 0.6]],
    };
    let report = audit_on_grid(&table, &[]);
    println!("table: {} violations", report.violations.len());
    for v in &report.violations {
        println!("  {v}");
    }

    let q = QualityModel::smooth_decay(1.0, 0.5, 0.0);
    println!("q(p, p) = 1 - p/2 at 0.8: {:.3}, slope {:.3}", q.diagonal(0.8), q.diagonal_derivative(0.8).unwrap());
}
