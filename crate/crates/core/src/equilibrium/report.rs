use std::fmt;

use serde::{Serialize, Serializer};

use crate::allocation::direct_allocate;
use crate::error::Result;
use crate::mechanisms::{run_direct_vcg, run_indirect, MechanismKind, Outcome};
use crate::model::{AuctionInstance, StrategyProfile};
use crate::WELFARE_TOL;

use super::{enumerate_pure_nash, EquilibriumOptions, Overbidding, StrategySpace};

/// What the revenue ratios are measured against.
pub const REVENUE_BENCHMARK: &str = "direct-vcg revenue at truthful reports";

/// A benchmark-to-equilibrium ratio; may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Ratio(pub f64);

impl Ratio {
    pub const INFINITE: Ratio = Ratio(f64::INFINITY);

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{:.6}", self.0)
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

/// `benchmark / value`, with 0/0 = 1 and positive/0 = infinity. Values
/// within [`WELFARE_TOL`] of zero count as zero.
pub fn ratio(benchmark: f64, value: f64) -> Ratio {
    if value <= WELFARE_TOL {
        if benchmark <= WELFARE_TOL {
            Ratio(1.0)
        } else {
            Ratio::INFINITE
        }
    } else {
        Ratio(benchmark / value)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub mechanism: MechanismKind,
    pub overbidding: Overbidding,
    pub equilibria: Vec<StrategyProfile>,
    pub outcomes: Vec<Outcome>,
    /// Optimal true social welfare.
    pub benchmark_sw: f64,
    pub benchmark_rev: f64,
    pub revenue_benchmark: &'static str,
    pub poa_sw: Ratio,
    pub pos_sw: Ratio,
    pub poa_rev: Ratio,
    pub pos_rev: Ratio,
    pub profiles_examined: u128,
    /// Largest gap in the price grids; ratios hold on the grid only.
    pub grid_resolution: f64,
}

/// Enumerates the equilibria and compares their welfare and revenue against
/// the optimum and against direct VCG. Without equilibria every ratio is
/// infinite.
pub fn efficiency_report(
    instance: &AuctionInstance,
    kind: MechanismKind,
    space: &StrategySpace,
    opts: &EquilibriumOptions,
) -> Result<EquilibriumReport> {
    let equilibria = enumerate_pure_nash(instance, kind, space, opts)?;
    let outcomes = equilibria
        .iter()
        .map(|p| run_indirect(instance, kind, p, &opts.run))
        .collect::<Result<Vec<_>>>()?;
    let types = instance.types();
    let benchmark_sw = direct_allocate(instance, &types)?.declared_welfare;
    let benchmark_rev = run_direct_vcg(instance, &types)?.revenue;

    let fold = |f: &dyn Fn(&Outcome) -> Ratio, worst: bool| -> Ratio {
        let mut it = outcomes.iter().map(f);
        let Some(first) = it.next() else { return Ratio::INFINITE };
        it.fold(first, |a, b| if (b > a) == worst { b } else { a })
    };
    let sw = |o: &Outcome| ratio(benchmark_sw, o.true_welfare);
    let rev = |o: &Outcome| ratio(benchmark_rev, o.revenue);
    Ok(EquilibriumReport {
        mechanism: kind,
        overbidding: space.overbidding(),
        poa_sw: fold(&sw, true),
        pos_sw: fold(&sw, false),
        poa_rev: fold(&rev, true),
        pos_rev: fold(&rev, false),
        equilibria,
        outcomes,
        benchmark_sw,
        benchmark_rev,
        revenue_benchmark: REVENUE_BENCHMARK,
        profiles_examined: space.joint_size(),
        grid_resolution: space.grid_resolution(),
    })
}
