use serde::{Deserialize, Serialize};

use crate::allocation::{direct_allocate_excluding, indirect_allocate_with};
use crate::error::{Error, Result};
use crate::model::{AgentType, Allocation, AuctionInstance, Bid, StrategyProfile};
use crate::quality::QualityModel;
use crate::WELFARE_TOL;

use super::{Diagnostics, MechanismKind, Outcome};

/// Type recovered by VCG* from a bid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferredType {
    pub c_hat: f64,
    pub alpha_hat: f64,
}

impl InferredType {
    pub fn as_type(&self) -> AgentType {
        AgentType { alpha: self.alpha_hat, cost: self.c_hat }
    }

    pub fn is_feasible(&self) -> bool {
        (0.0..=1.0).contains(&self.alpha_hat) && self.c_hat >= 0.0
    }
}

/// Inverts the first-order condition of the standalone pricing problem:
/// `c = q(p*, p*) / q'(p*) + p*` with `q'` the derivative of the diagonal,
/// then `alpha = b / (p - c)` (zero when `p == c`).
pub fn infer_type(quality: &QualityModel, bid: &Bid) -> Result<InferredType> {
    let star = bid.standalone_price.ok_or_else(|| Error::Inference { agent: 0, reason: "no standalone price".into() })?;
    let slope = quality.diagonal_derivative(star).map_err(|e| Error::Inference { agent: 0, reason: e.to_string() })?;
    if slope == 0.0 {
        return Err(Error::Inference { agent: 0, reason: format!("diagonal derivative is zero at {star}") });
    }
    let c_hat = quality.diagonal(star) / slope + star;
    // Equality is judged up to float noise in the inverted cost.
    let alpha_hat = if (bid.price - c_hat).abs() <= 1e-12 { 0.0 } else { bid.gain / (bid.price - c_hat) };
    Ok(InferredType { c_hat, alpha_hat })
}

/// The price maximizing `alpha q(p, p) (p - c)` when the ad is shown alone.
///
/// Closed form for smooth-decay models; the cap or threshold for the
/// piecewise kinds; a bracketed golden-section search for psi; the best
/// sample for tabulated models.
pub fn standalone_price(quality: &QualityModel, t: &AgentType) -> Result<f64> {
    let objective = |p: f64| quality.diagonal(p) * (p - t.cost);
    match *quality {
        QualityModel::SmoothDecay { intercept, slope, .. } => {
            if slope <= 0.0 {
                return Err(Error::invalid("quality.slope", "standalone price is unbounded without a positive slope"));
            }
            let mut candidates = vec![((intercept - 1.0) / slope).max(0.0)];
            let interior = (intercept / slope + t.cost) / 2.0;
            let base = intercept - slope * interior;
            if base > 0.0 && base < 1.0 {
                candidates.push(interior);
            }
            Ok(argmax(&candidates, objective))
        }
        QualityModel::OnlyMin { cap: Some(cap), .. } => Ok(cap),
        QualityModel::OnlyMin { cap: None, .. } => Err(Error::invalid("quality.cap", "standalone price is unbounded without a cap")),
        QualityModel::PriceThreshold { threshold, .. } => Ok(threshold),
        QualityModel::PsiHyperbola { floor, cap, .. } => {
            let inner = golden_section(floor, cap, objective);
            Ok(argmax(&[floor, inner, cap], objective))
        }
        QualityModel::Tabulated { ref prices, .. } => Ok(argmax(prices, objective)),
    }
}

fn argmax(candidates: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if f(c) > f(best) {
            best = c;
        }
    }
    best
}

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - r * (hi - lo);
        let b = lo + r * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    (lo + hi) / 2.0
}

/// VCG* on bids carrying standalone prices.
///
/// Allocates like indirect VCG, infers every type, and charges each shown
/// agent the direct-VCG externality computed on the inferred types. If the
/// declared welfare falls short of some re-optimization, nothing is shown and
/// nobody pays. Unassigned agents pay nothing.
pub fn run_indirect_vcg_star(instance: &AuctionInstance, profile: &StrategyProfile) -> Result<Outcome> {
    profile.validate(instance)?;
    let n = instance.n();
    let inferred = (0..n)
        .map(|i| {
            infer_type(instance.quality(i), &profile.bids[i]).map_err(|e| match e {
                Error::Inference { reason, .. } => Error::Inference { agent: i, reason },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let types: Vec<AgentType> = inferred.iter().map(InferredType::as_type).collect();

    let best = indirect_allocate_with(instance, profile, None, false)?;
    let welfare_without = (0..n)
        .map(|i| direct_allocate_excluding(instance, &types, Some(i)).map(|r| r.declared_welfare))
        .collect::<Result<Vec<_>>>()?;
    let worst = welfare_without.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut diagnostics = Diagnostics {
        infeasible_inference: (0..n).filter(|&i| !inferred[i].is_feasible()).collect(),
        inferred,
        welfare_without,
        fallback_empty: false,
    };
    let gains = profile.gains();
    let mut payments = vec![0.0; n];
    let allocation = if best.declared_welfare + WELFARE_TOL >= worst {
        let alloc = best.allocation;
        for i in alloc.order() {
            let own = instance.prominence(alloc.slot_of(i).unwrap())
                * instance.quality(i).eval_unchecked(profile.bids[i].price, alloc.min_price().unwrap())
                * gains[i];
            payments[i] = diagnostics.welfare_without[i] - (best.declared_welfare - own);
        }
        alloc
    } else {
        diagnostics.fallback_empty = true;
        Allocation::empty(n)
    };
    Outcome::assemble(instance, MechanismKind::IndirectVcgStar, allocation, gains, payments, diagnostics)
}
