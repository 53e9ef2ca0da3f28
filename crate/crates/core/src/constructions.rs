//! Parametric lower-bound instances for the indirect mechanisms and one-call
//! checks of their conclusions.
//!
//! | id  | mechanism(s)  | claim                                                   |
//! |-----|---------------|---------------------------------------------------------|
//! | T5  | GSP           | price of stability for welfare approaches 2             |
//! | T7  | VCG, GSP      | price of anarchy for welfare is at least `m`            |
//! | T9  | VCG           | with overbidding, price of anarchy is `1 / delta`       |
//! | T10 | VCG, GSP      | every equilibrium earns zero while direct VCG does not  |
//! | T12 | GSP, one slot | every equilibrium earns zero while direct VCG does not  |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::allocation::direct_allocate;
use crate::equilibrium::{efficiency_report, is_nash, EquilibriumOptions, Overbidding, StrategySpace};
use crate::error::{Error, Result};
use crate::mechanisms::{run_direct_vcg, run_indirect, MechanismKind};
use crate::model::{AgentSpec, AgentType, AuctionInstance, Bid, SlotProfile, StrategyProfile, TieBreak};
use crate::quality::QualityModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "T5-gsp-pos-sw")]
    T5,
    #[serde(rename = "T7-poa-m")]
    T7,
    #[serde(rename = "T9-overbid")]
    T9,
    #[serde(rename = "T10-rev-pos")]
    T10,
    #[serde(rename = "T12-gsp-rev")]
    T12,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [TheoremId::T5, TheoremId::T7, TheoremId::T9, TheoremId::T10, TheoremId::T12];

    pub fn short(self) -> &'static str {
        match self {
            TheoremId::T5 => "T5",
            TheoremId::T7 => "T7",
            TheoremId::T9 => "T9",
            TheoremId::T10 => "T10",
            TheoremId::T12 => "T12",
        }
    }

    pub fn long(self) -> &'static str {
        match self {
            TheoremId::T5 => "T5-gsp-pos-sw",
            TheoremId::T7 => "T7-poa-m",
            TheoremId::T9 => "T9-overbid",
            TheoremId::T10 => "T10-rev-pos",
            TheoremId::T12 => "T12-gsp-rev",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.long())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    /// Accepts `T7`, `t7`, or `T7-poa-m`.
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.short().eq_ignore_ascii_case(s) || id.long().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid("theorem", format!("unknown construction {s:?}; expected one of T5, T7, T9, T10, T12")))
    }
}

/// Construction parameters; unset fields take per-construction defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_low: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Interior grid points added between the critical prices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Largest declared gain in the overbidding strategy space.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_cap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremInstance {
    pub id: TheoremId,
    /// Parameters with every default filled in.
    pub params: Params,
    pub instance: AuctionInstance,
    /// Equilibrium profiles from the constructions, per mechanism.
    pub reference_profiles: Vec<(MechanismKind, StrategyProfile)>,
    pub space: StrategySpace,
    /// Closed-form values the construction predicts.
    pub expected: Vec<(String, f64)>,
}

impl TheoremInstance {
    pub fn reference(&self, kind: MechanismKind) -> Option<&StrategyProfile> {
        self.reference_profiles.iter().find(|(k, _)| *k == kind).map(|(_, p)| p)
    }

    pub fn expected(&self, name: &str) -> Option<f64> {
        self.expected.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn mechanisms(&self) -> Vec<MechanismKind> {
        match self.id {
            TheoremId::T5 | TheoremId::T12 => vec![MechanismKind::IndirectGsp],
            TheoremId::T9 => vec![MechanismKind::IndirectVcg],
            TheoremId::T7 | TheoremId::T10 => vec![MechanismKind::IndirectVcg, MechanismKind::IndirectGsp],
        }
    }
}

fn constraint(id: TheoremId, ok: bool, text: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Constraint { construction: id.long().into(), constraint: text.into() })
    }
}

/// `lo`, `hi`, and `points` evenly spaced values strictly between them.
fn spread(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let mut v = vec![lo];
    for k in 1..=points {
        v.push(lo + (hi - lo) * k as f64 / (points + 1) as f64);
    }
    v.push(hi);
    v
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn agent(alpha: f64, cost: f64, quality: QualityModel) -> AgentSpec {
    AgentSpec { agent_type: AgentType { alpha, cost }, quality }
}

/// Builds a construction, checking its parameter constraints.
pub fn build(id: TheoremId, params: &Params) -> Result<TheoremInstance> {
    let mut p = *params;
    for (name, v) in [("epsilon", p.epsilon), ("delta", p.delta), ("p_low", p.p_low), ("p_bar", p.p_bar), ("gain_cap", p.gain_cap)] {
        if let Some(v) = v {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
    }
    match id {
        TheoremId::T5 => {
            let lo = *p.p_low.get_or_insert(1.0);
            let eps = *p.epsilon.get_or_insert(0.01);
            let points = *p.points.get_or_insert(3);
            constraint(id, eps > 0.0, "epsilon > 0")?;
            constraint(id, lo > eps, "p_low > epsilon")?;
            let hi = 1.5 * (lo - eps);
            p.p_bar = Some(hi);
            let grid = spread(lo, hi, points);
            let q = QualityModel::only_min(None, 1.0);
            let agents = vec![agent(1.0, 0.0, q.clone()), agent(1.0, lo - eps, q.clone()), agent(1.0, lo - eps, q)];
            let instance = AuctionInstance::new(agents, SlotProfile::new(vec![1.0, 1.0])?, grid.clone(), TieBreak::LowestIndex)?;
            // Gains around the pivotal value epsilon plus every true gain.
            let mut gains = vec![0.0, eps / 2.0, eps];
            for t in instance.types() {
                gains.extend(grid.iter().map(|&x| t.gain_at(x)).filter(|g| *g > 0.0));
            }
            let space = StrategySpace::uniform(&instance, &sorted_unique(gains), Overbidding::Forbidden)?;
            Ok(TheoremInstance {
                id,
                params: p,
                instance,
                reference_profiles: Vec::new(),
                space,
                expected: vec![
                    ("optimal_sw".into(), 2.0 * (lo - eps)),
                    ("equilibrium_sw_bound".into(), lo + eps),
                    ("pos_sw".into(), 2.0 * (lo - eps) / (lo + eps)),
                ],
            })
        }
        TheoremId::T7 => {
            let m = *p.m.get_or_insert(2);
            let hi = *p.p_bar.get_or_insert(1.0);
            constraint(id, m >= 1, "m >= 1")?;
            constraint(id, hi > 0.0, "p_bar > 0")?;
            let lo = hi / m as f64;
            p.p_low = Some(lo);
            let steps = *p.points.get_or_insert(2 * m);
            constraint(id, steps >= 1, "points >= 1")?;
            let mut grid: Vec<f64> = (1..=steps).map(|k| hi * k as f64 / steps as f64).collect();
            grid.extend([lo, hi]);
            let grid = sorted_unique(grid);
            let q = QualityModel::only_min(Some(hi), 1.0);
            let agents = (0..=m).map(|_| agent(1.0, 0.0, q.clone())).collect();
            let instance = AuctionInstance::new(agents, SlotProfile::new(vec![1.0; m])?, grid.clone(), TieBreak::LowestIndex)?;
            let mut gains = grid.clone();
            gains.push(0.0);
            let space = StrategySpace::uniform(&instance, &sorted_unique(gains), Overbidding::Forbidden)?;
            let reference = StrategyProfile::new(vec![Bid::new(lo, lo); m + 1]);
            Ok(TheoremInstance {
                id,
                params: p,
                instance,
                reference_profiles: vec![(MechanismKind::IndirectVcg, reference.clone()), (MechanismKind::IndirectGsp, reference)],
                space,
                expected: vec![
                    ("optimal_sw".into(), m as f64 * hi),
                    ("equilibrium_sw".into(), hi),
                    ("poa_sw".into(), m as f64),
                ],
            })
        }
        TheoremId::T9 => {
            let delta = *p.delta.get_or_insert(0.1);
            let hi = *p.p_bar.get_or_insert(1.0);
            constraint(id, delta > 0.0 && delta < 1.0, "0 < delta < 1")?;
            constraint(id, hi > 0.0, "p_bar > 0")?;
            let big = 2.0 * hi / delta;
            let cap = *p.gain_cap.get_or_insert(3.0 * hi / delta);
            constraint(id, cap >= big, "gain_cap >= 2 p_bar / delta")?;
            let points = *p.points.get_or_insert(1);
            let grid = spread(0.0, hi, points).into_iter().skip(1).collect::<Vec<_>>();
            let agents = vec![agent(1.0, 0.0, QualityModel::only_min(Some(hi), 1.0)), agent(1.0, 0.0, QualityModel::only_min(Some(hi), delta))];
            let instance = AuctionInstance::new(agents, SlotProfile::new(vec![1.0])?, grid, TieBreak::LowestIndex)?;
            let gains = sorted_unique(vec![0.0, delta * hi, hi, 2.0 * hi, 3.0 * hi, big, cap]);
            let space = StrategySpace::uniform(&instance, &gains, Overbidding::Allowed)?;
            let reference = StrategyProfile::new(vec![Bid::new(hi, 0.0), Bid::new(hi, big)]);
            Ok(TheoremInstance {
                id,
                params: p,
                instance,
                reference_profiles: vec![(MechanismKind::IndirectVcg, reference.clone()), (MechanismKind::IndirectGsp, reference)],
                space,
                expected: vec![("optimal_sw".into(), hi), ("equilibrium_sw".into(), delta * hi), ("poa_sw".into(), 1.0 / delta)],
            })
        }
        TheoremId::T10 => {
            let delta = *p.delta.get_or_insert(0.1);
            let lo = *p.p_low.get_or_insert(1.0);
            let hi = *p.p_bar.get_or_insert(2.5);
            let points = *p.points.get_or_insert(5);
            constraint(id, 1.0 <= lo, "1 <= p_low")?;
            constraint(id, lo < hi / 2.0, "p_low < p_bar / 2")?;
            constraint(id, delta > 0.0, "0 < delta")?;
            constraint(id, delta < lo / hi, "delta < p_low / p_bar")?;
            let grid = spread(lo, hi, points);
            let agents = vec![agent(1.0, 0.0, QualityModel::only_min(Some(hi), 1.0)), agent(1.0, 0.0, QualityModel::psi_hyperbola(lo, hi, delta))];
            let instance = AuctionInstance::new(agents, SlotProfile::new(vec![1.0, 1.0])?, grid.clone(), TieBreak::LowestIndex)?;
            let mut gains = grid;
            gains.push(0.0);
            let space = StrategySpace::uniform(&instance, &sorted_unique(gains), Overbidding::Forbidden)?;
            Ok(TheoremInstance {
                id,
                params: p,
                instance,
                reference_profiles: vec![
                    (MechanismKind::IndirectVcg, StrategyProfile::new(vec![Bid::new(hi, hi), Bid::new(hi, hi)])),
                    (MechanismKind::IndirectGsp, StrategyProfile::new(vec![Bid::new(hi, hi), Bid::new(hi, 0.0)])),
                ],
                space,
                expected: vec![
                    ("optimal_sw".into(), (1.0 + delta) * hi),
                    ("direct_payment_0".into(), lo - delta * hi),
                    ("direct_payment_1".into(), 0.0),
                    ("direct_revenue".into(), lo - delta * hi),
                    ("equilibrium_revenue".into(), 0.0),
                ],
            })
        }
        TheoremId::T12 => {
            let lo = *p.p_low.get_or_insert(1.0);
            let hi = *p.p_bar.get_or_insert(2.5);
            let points = *p.points.get_or_insert(2);
            constraint(id, lo > 0.0, "0 < p_low")?;
            constraint(id, lo < 0.5 * hi, "p_low < 0.5 p_bar")?;
            let mut grid = spread(lo, hi, points);
            grid.push(lo / 2.0);
            let grid = sorted_unique(grid);
            let agents = vec![agent(1.0, 0.0, QualityModel::only_min(Some(hi), 1.0)), agent(1.0, 0.0, QualityModel::price_threshold(lo, 1.0))];
            let instance = AuctionInstance::new(agents, SlotProfile::new(vec![1.0])?, grid.clone(), TieBreak::LowestIndex)?;
            let mut gains = grid;
            gains.push(0.0);
            let space = StrategySpace::uniform(&instance, &sorted_unique(gains), Overbidding::Forbidden)?;
            Ok(TheoremInstance {
                id,
                params: p,
                instance,
                reference_profiles: vec![(MechanismKind::IndirectGsp, StrategyProfile::new(vec![Bid::new(hi, hi), Bid::new(lo, lo)]))],
                space,
                expected: vec![("optimal_sw".into(), hi), ("direct_revenue".into(), lo), ("equilibrium_revenue".into(), 0.0)],
            })
        }
    }
}

/// One checked claim. Informational lines do not affect the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub asserted: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub id: TheoremId,
    pub params: Params,
    pub assertions: Vec<Assertion>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed || !a.asserted)
    }

    pub fn get(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }
}

struct Checks(Vec<Assertion>);

impl Checks {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.0.push(Assertion { name: name.into(), passed, asserted: true, detail });
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.check(name, (got - want).abs() <= tol, format!("got {got:.9}, expected {want:.9}"));
    }

    fn note(&mut self, name: &str, passed: bool, detail: String) {
        self.0.push(Assertion { name: name.into(), passed, asserted: false, detail });
    }
}

/// Builds the construction, runs the mechanisms and the equilibrium engine,
/// and checks each claim of the construction.
pub fn reproduce(id: TheoremId, params: &Params, opts: &EquilibriumOptions) -> Result<Verdict> {
    let t = build(id, params)?;
    let inst = &t.instance;
    let mut c = Checks(Vec::new());
    let want = |name: &str| t.expected(name).expect("construction lists its expectations");
    let types = inst.types();
    let optimal = direct_allocate(inst, &types)?.declared_welfare;

    match id {
        TheoremId::T7 | TheoremId::T9 => {
            c.close("optimal welfare", optimal, want("optimal_sw"), 1e-9);
            for kind in t.mechanisms() {
                let reference = t.reference(kind).unwrap();
                let check = is_nash(inst, kind, &t.space, reference, opts)?;
                c.check(&format!("reference profile is Nash under {kind}"), check.is_nash, witness_text(&check));
                let out = run_indirect(inst, kind, reference, &opts.run)?;
                c.close(&format!("equilibrium welfare under {kind}"), out.true_welfare, want("equilibrium_sw"), 1e-9);
                let r = crate::equilibrium::ratio(optimal, out.true_welfare);
                let tol = if id == TheoremId::T7 { 1e-9 } else { 1e-6 };
                c.close(&format!("anarchy witness ratio under {kind}"), r.value(), want("poa_sw"), tol);
            }
            if id == TheoremId::T9 {
                let reference = t.reference(MechanismKind::IndirectGsp).unwrap();
                let check = is_nash(inst, MechanismKind::IndirectGsp, &t.space, reference, opts)?;
                c.note("reference profile under indirect-gsp", check.is_nash, witness_text(&check));
            }
        }
        TheoremId::T10 | TheoremId::T12 => {
            c.close("optimal welfare", optimal, want("optimal_sw"), 1e-9);
            let direct = run_direct_vcg(inst, &types)?;
            c.close("direct-vcg revenue", direct.revenue, want("direct_revenue"), 1e-9);
            if id == TheoremId::T10 {
                c.close("direct-vcg payment of agent 0", direct.payments[0], want("direct_payment_0"), 1e-9);
                c.close("direct-vcg payment of agent 1", direct.payments[1], want("direct_payment_1"), 1e-9);
            }
            for kind in t.mechanisms() {
                let reference = t.reference(kind).unwrap();
                let check = is_nash(inst, kind, &t.space, reference, opts)?;
                c.check(&format!("reference profile is Nash under {kind}"), check.is_nash, witness_text(&check));
                let report = efficiency_report(inst, kind, &t.space, opts)?;
                let count = report.equilibria.len();
                c.check(&format!("equilibria exist under {kind}"), count > 0, format!("{count} equilibria in {} profiles", report.profiles_examined));
                let max_rev = report.outcomes.iter().map(|o| o.revenue).fold(0.0f64, f64::max);
                c.check(
                    &format!("every equilibrium earns zero under {kind}"),
                    report.outcomes.iter().all(|o| o.revenue.abs() <= 1e-9),
                    format!("largest equilibrium revenue {max_rev:.9}"),
                );
                if id == TheoremId::T10 {
                    let equal = report.equilibria.iter().all(|p| p.bids[0].price == p.bids[1].price);
                    c.check(&format!("every equilibrium has equal prices under {kind}"), equal, format!("{count} equilibria checked"));
                }
                c.check(&format!("revenue price of stability under {kind}"), report.pos_rev.is_infinite(), format!("pos_rev = {}", report.pos_rev));
            }
        }
        TheoremId::T5 => {
            c.close("optimal welfare", optimal, want("optimal_sw"), 1e-9);
            let kind = MechanismKind::IndirectGsp;
            let report = efficiency_report(inst, kind, &t.space, opts)?;
            let count = report.equilibria.len();
            c.check("equilibria exist under indirect-gsp", count > 0, format!("{count} equilibria in {} profiles", report.profiles_examined));
            let best = report.outcomes.iter().map(|o| o.true_welfare).fold(f64::NEG_INFINITY, f64::max);
            c.check(
                "every equilibrium welfare is at most p_low + epsilon",
                count > 0 && best <= want("equilibrium_sw_bound") + 1e-9,
                format!("best equilibrium welfare {best:.9}, bound {:.9}", want("equilibrium_sw_bound")),
            );
            c.check(
                "welfare price of stability reaches the closed form",
                count > 0 && report.pos_sw.value() >= want("pos_sw") - 1e-6,
                format!("pos_sw = {}, closed form {:.9}", report.pos_sw, want("pos_sw")),
            );
        }
    }
    Ok(Verdict { id, params: t.params, assertions: c.0 })
}

fn witness_text(check: &crate::equilibrium::NashCheck) -> String {
    match &check.witness {
        None => "no improving deviation".into(),
        Some(d) => format!(
            "agent {} improves from {:.6} to {:.6} with price {}, gain {}",
            d.agent, d.current_utility, d.deviation_utility, d.bid.price, d.bid.gain
        ),
    }
}
