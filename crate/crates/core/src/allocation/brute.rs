use crate::error::{Error, Result};
use crate::model::{AgentType, AuctionInstance, StrategyProfile};

use super::{slot_welfare, sort_by_weight, AllocationResult, Ranked};

pub const BRUTE_MAX_AGENTS: usize = 6;
pub const BRUTE_MAX_SLOTS: usize = 4;
pub const BRUTE_MAX_PRICES: usize = 6;

/// What the oracle optimizes over: fixed bids, or reported types with prices
/// drawn from the grid.
#[derive(Debug, Clone, Copy)]
pub enum BruteInput<'a> {
    Indirect(&'a StrategyProfile),
    Direct(&'a [AgentType]),
}

/// Exhaustive search over every injective assignment (and, for direct input,
/// every grid price per shown agent). Refuses instances beyond
/// [`BRUTE_MAX_AGENTS`], [`BRUTE_MAX_SLOTS`] and [`BRUTE_MAX_PRICES`].
pub fn brute_force_allocate(instance: &AuctionInstance, input: BruteInput<'_>, excluded: Option<usize>) -> Result<AllocationResult> {
    let guard = |what: &str, size: usize, limit: usize| -> Result<()> {
        if size > limit {
            Err(Error::GuardExceeded { what: what.into(), size: size as u128, limit: limit as u128 })
        } else {
            Ok(())
        }
    };
    guard("agents", instance.n(), BRUTE_MAX_AGENTS)?;
    guard("slots", instance.m(), BRUTE_MAX_SLOTS)?;
    let prices: Vec<Vec<f64>> = match input {
        BruteInput::Indirect(profile) => {
            profile.validate(instance)?;
            profile.bids.iter().map(|b| vec![b.price]).collect()
        }
        BruteInput::Direct(types) => {
            if types.len() != instance.n() {
                return Err(Error::invalid("types", format!("expected {} reported types, got {}", instance.n(), types.len())));
            }
            guard("prices", instance.price_grid().len(), BRUTE_MAX_PRICES)?;
            vec![instance.price_grid().to_vec(); instance.n()]
        }
    };
    let gain = |i: usize, p: f64| match input {
        BruteInput::Indirect(profile) => profile.bids[i].gain,
        BruteInput::Direct(types) => types[i].gain_at(p),
    };

    let mut search = Search {
        instance,
        prices: &prices,
        gain: &gain,
        excluded,
        used: vec![false; instance.m()],
        chosen: Vec::new(),
        best: Ranked::empty(),
    };
    search.visit(0);
    Ok(search.best.into_result(instance))
}

struct Search<'a, G: Fn(usize, f64) -> f64> {
    instance: &'a AuctionInstance,
    prices: &'a [Vec<f64>],
    gain: &'a G,
    excluded: Option<usize>,
    used: Vec<bool>,
    /// (agent, slot, price) for every shown agent so far.
    chosen: Vec<(usize, usize, f64)>,
    best: Ranked,
}

impl<G: Fn(usize, f64) -> f64> Search<'_, G> {
    fn visit(&mut self, agent: usize) {
        if agent == self.instance.n() {
            self.score();
            return;
        }
        self.visit(agent + 1);
        if self.excluded == Some(agent) {
            return;
        }
        for slot in 0..self.instance.m() {
            if self.used[slot] {
                continue;
            }
            self.used[slot] = true;
            for k in 0..self.prices[agent].len() {
                self.chosen.push((agent, slot, self.prices[agent][k]));
                self.visit(agent + 1);
                self.chosen.pop();
            }
            self.used[slot] = false;
        }
    }

    fn score(&mut self) {
        if self.chosen.is_empty() {
            return;
        }
        let pm = self.chosen.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        let mut welfare = 0.0;
        let mut entries = Vec::with_capacity(self.chosen.len());
        for &(i, slot, p) in &self.chosen {
            let w = self.instance.quality(i).eval_unchecked(p, pm) * (self.gain)(i, p);
            if w <= 0.0 {
                return;
            }
            welfare += self.instance.prominence(slot) * w;
            entries.push((i, w, p));
        }
        // Any optimum is matched by its canonical rearrangement, so compare
        // candidates in canonical form.
        sort_by_weight(&mut entries, self.instance.tie_break());
        let canonical = slot_welfare(self.instance, &entries);
        debug_assert!(canonical + 1e-12 >= welfare);
        let cand = Ranked {
            welfare: canonical,
            order: entries.iter().map(|e| e.0).collect(),
            prices: entries.iter().map(|e| e.2).collect(),
        };
        if cand.beats(&self.best, self.instance.tie_break()) {
            self.best = cand;
        }
    }
}
