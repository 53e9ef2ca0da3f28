use adprice::allocation::{brute_force_allocate, BruteInput};
use adprice::constructions::{build, Params, TheoremId};
use adprice::equilibrium::truthful_star_profile;
use adprice::mechanisms::{infer_type, run_direct_vcg, run_indirect, run_indirect_vcg, run_indirect_vcg_star, MechanismKind, RunOptions};
use adprice::quality::psi;
use adprice::synth::{instance_from_seed, random_misreport, random_profile, rng, QualityMix, SynthConfig};
use adprice::{AgentSpec, AgentType, AuctionInstance, Bid, QualityModel, SlotProfile, StrategyProfile, TieBreak, FD_STEP};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn only_min(n: usize, prominences: Vec<f64>, grid: Vec<f64>) -> AuctionInstance {
    let agents = (0..n).map(|_| AgentSpec { agent_type: AgentType { alpha: 1.0, cost: 0.0 }, quality: QualityModel::only_min(None, 1.0) }).collect();
    AuctionInstance::new(agents, SlotProfile::new(prominences).unwrap(), grid, TieBreak::LowestIndex).unwrap()
}

fn smooth_cfg() -> SynthConfig {
    SynthConfig { max_agents: 4, max_slots: 3, max_prices: 4, qualities: QualityMix::Smooth }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn indirect_vcg_charges_the_oracle_externality(seed in any::<u64>()) {
        let inst = instance_from_seed(seed, &SynthConfig::default());
        let profile = random_profile(&mut rng(seed), &inst);
        let out = run_indirect_vcg(&inst, &profile).unwrap();
        let total = brute_force_allocate(&inst, BruteInput::Indirect(&profile), None).unwrap().declared_welfare;
        for i in out.allocation.order() {
            let without = brute_force_allocate(&inst, BruteInput::Indirect(&profile), Some(i)).unwrap().declared_welfare;
            let want = without - (total - out.declared_values[i]);
            prop_assert!(close(out.payments[i], want, 1e-9), "agent {i}: {} vs {want}", out.payments[i]);
        }
    }

    #[test]
    fn direct_vcg_charges_the_oracle_externality(seed in any::<u64>()) {
        let inst = instance_from_seed(seed, &SynthConfig::default());
        let types = inst.types();
        let out = run_direct_vcg(&inst, &types).unwrap();
        let total = brute_force_allocate(&inst, BruteInput::Direct(&types), None).unwrap().declared_welfare;
        prop_assert!(close(out.true_welfare, total, 1e-9));
        for i in out.allocation.order() {
            let without = brute_force_allocate(&inst, BruteInput::Direct(&types), Some(i)).unwrap().declared_welfare;
            prop_assert!(close(out.payments[i], without - (total - out.declared_values[i]), 1e-9));
        }
    }

    #[test]
    fn indirect_mechanisms_are_rational_and_budget_balanced(seed in any::<u64>()) {
        let inst = instance_from_seed(seed, &SynthConfig::default());
        let profile = random_profile(&mut rng(seed), &inst);
        for kind in [MechanismKind::IndirectVcg, MechanismKind::IndirectGsp] {
            let out = run_indirect(&inst, kind, &profile, &RunOptions::default()).unwrap();
            for i in 0..inst.n() {
                prop_assert!(out.payments[i] >= 0.0);
                prop_assert!(out.payments[i] <= out.declared_values[i] + 1e-9, "{kind} agent {i}");
                prop_assert!(out.utility(i) >= -1e-9);
            }
        }
    }

    #[test]
    fn direct_vcg_is_truthful(seed in any::<u64>()) {
        let inst = instance_from_seed(seed, &SynthConfig::default());
        let types = inst.types();
        let mut r = rng(seed);
        let truthful = run_direct_vcg(&inst, &types).unwrap();
        for i in 0..inst.n() {
            let mut lie = types.clone();
            lie[i] = random_misreport(&mut r, &types[i]);
            let out = run_direct_vcg(&inst, &lie).unwrap();
            prop_assert!(truthful.utility(i) >= out.utility(i) - 1e-9, "agent {i}: {} < {}", truthful.utility(i), out.utility(i));
        }
    }

    #[test]
    fn truthful_star_bids_reproduce_direct_vcg(seed in any::<u64>()) {
        let inst = instance_from_seed(seed, &smooth_cfg());
        let profile = truthful_star_profile(&inst).unwrap();
        let star = run_indirect_vcg_star(&inst, &profile).unwrap();
        let direct = run_direct_vcg(&inst, &inst.types()).unwrap();
        for (i, t) in inst.types().iter().enumerate() {
            let inferred = star.diagnostics.inferred[i];
            prop_assert!(close(inferred.c_hat, t.cost, 1e-6), "cost {} vs {}", inferred.c_hat, t.cost);
            if profile.bids[i].gain > 0.0 {
                prop_assert!(close(inferred.alpha_hat, t.alpha, 1e-6));
            }
        }
        prop_assert!(!star.diagnostics.fallback_empty);
        prop_assert!(close(star.true_welfare, direct.true_welfare, 1e-9));
        for i in 0..inst.n() {
            prop_assert!(close(star.payments[i], direct.payments[i], 1e-9), "agent {i}: {} vs {}", star.payments[i], direct.payments[i]);
        }
    }
}

#[test]
fn single_slot_indirect_vcg_matches_direct_vcg() {
    // Every agent bids its true gain at its best standalone grid price.
    let cfg = SynthConfig { max_slots: 1, ..smooth_cfg() };
    for seed in 0..100 {
        let inst = instance_from_seed(seed, &cfg);
        let bids = inst
            .types()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let value = |p: f64| inst.quality(i).diagonal(p) * t.gain_at(p);
                let p = inst.price_grid().iter().copied().fold(inst.price_grid()[0], |a, b| if value(b) > value(a) { b } else { a });
                Bid::new(p, t.gain_at(p))
            })
            .collect();
        let indirect = run_indirect_vcg(&inst, &StrategyProfile::new(bids)).unwrap();
        let direct = run_direct_vcg(&inst, &inst.types()).unwrap();
        assert!(close(indirect.revenue, direct.revenue, 1e-9), "seed {seed}");
        for i in 0..inst.n() {
            assert!(close(indirect.payments[i], direct.payments[i], 1e-9), "seed {seed} agent {i}");
        }
    }
}

#[test]
fn a_lone_bidder_pays_nothing() {
    let inst = only_min(1, vec![1.0], vec![5.0]);
    let out = run_indirect_vcg(&inst, &StrategyProfile::new(vec![Bid::new(5.0, 2.0)])).unwrap();
    assert_eq!(out.allocation.slot_of(0), Some(0));
    assert_eq!(out.declared_welfare, 2.0);
    assert_eq!(out.payments, vec![0.0]);
}

#[test]
fn one_slot_gsp_is_a_second_price_auction() {
    let inst = only_min(2, vec![0.8], vec![1.0]);
    let out = run_indirect(&inst, MechanismKind::IndirectGsp, &StrategyProfile::new(vec![Bid::new(1.0, 3.0), Bid::new(1.0, 2.0)]), &RunOptions::default()).unwrap();
    assert_eq!(out.allocation.order(), vec![0]);
    assert!(close(out.payments[0], 0.8 * 2.0, 1e-12));
    assert_eq!(out.payments[1], 0.0);
}

#[test]
fn cheaper_losers_do_not_price_the_last_slot() {
    let inst = only_min(2, vec![1.0], vec![0.5, 1.0]);
    let profile = StrategyProfile::new(vec![Bid::new(1.0, 2.0), Bid::new(0.5, 1.5)]);
    let out = run_indirect(&inst, MechanismKind::IndirectGsp, &profile, &RunOptions::default()).unwrap();
    assert_eq!(out.allocation.order(), vec![0]);
    assert_eq!(out.payments, vec![0.0, 0.0]);
}

#[test]
fn dropping_the_min_price_filter_breaks_rationality() {
    let inst = only_min(3, vec![1.0, 1.0], vec![0.5, 1.0]);
    let profile = StrategyProfile::new(vec![Bid::new(1.0, 1.0), Bid::new(1.0, 1.0), Bid::new(0.5, 1.5)]);
    let ir_holds = |opts: RunOptions| {
        let out = run_indirect(&inst, MechanismKind::IndirectGsp, &profile, &opts).unwrap();
        (0..inst.n()).all(|i| out.payments[i] <= out.declared_values[i] + 1e-9)
    };
    assert!(ir_holds(RunOptions::default()));
    assert!(!ir_holds(RunOptions { gsp_min_price_filter: false, ..Default::default() }));
}

#[test]
fn t10_direct_payments_and_equal_price_profiles() {
    let t = build(TheoremId::T10, &Params::default()).unwrap();
    let inst = &t.instance;
    let direct = run_direct_vcg(inst, &inst.types()).unwrap();
    assert!(close(direct.payments[0], 0.75, 1e-9), "{:?}", direct.payments);
    assert!(close(direct.payments[1], 0.0, 1e-9));
    for &p in inst.price_grid() {
        let profile = StrategyProfile::new(vec![Bid::new(p, p), Bid::new(p, p * psi(1.0, 2.5, 0.1, p))]);
        let out = run_indirect_vcg(inst, &profile).unwrap();
        assert_eq!(out.revenue, 0.0, "price {p}");
    }
}

#[test]
fn t12_reference_profile_earns_nothing_under_gsp() {
    let t = build(TheoremId::T12, &Params::default()).unwrap();
    let profile = t.reference(MechanismKind::IndirectGsp).unwrap();
    let out = run_indirect(&t.instance, MechanismKind::IndirectGsp, profile, &RunOptions::default()).unwrap();
    assert_eq!(out.allocation.order(), vec![0]);
    assert_eq!(out.revenue, 0.0);
}

#[test]
fn inference_inverts_the_first_order_condition() {
    // Diagonal 1 - p, cost 0.2: the standalone optimum is 0.6.
    let q = QualityModel::smooth_decay(1.0, 1.0, 0.0);
    let t = AgentType { alpha: 0.7, cost: 0.2 };
    let star = adprice::mechanisms::standalone_price(&q, &t).unwrap();
    let numeric = (0..=100_000).map(|k| k as f64 / 100_000.0).fold(0.0, |a: f64, p| if q.diagonal(p) * (p - 0.2) > q.diagonal(a) * (a - 0.2) { p } else { a });
    assert!(close(star, numeric, 1e-5));
    assert!(close(star, 0.6, 1e-12));
    let got = infer_type(&q, &Bid::new(0.9, t.gain_at(0.9)).with_standalone(star)).unwrap();
    assert!(close(got.c_hat, 0.2, 1e-12));
    assert!(close(got.alpha_hat, 0.7, 1e-9));
    let at_cost = infer_type(&q, &Bid::new(0.2, 0.3).with_standalone(star)).unwrap();
    assert_eq!(at_cost.alpha_hat, 0.0);
}

#[test]
fn diagonal_derivatives_agree_with_finite_differences() {
    assert_eq!(QualityModel::price_threshold(2.0, 1.0).diagonal_derivative(1.0).unwrap(), 0.0);
    let line = QualityModel::smooth_decay(1.0, 1.0, 0.0);
    for p in [0.1, 0.35, 0.8] {
        assert!(close(line.diagonal_derivative(p).unwrap(), -1.0, 1e-6));
    }
    let hyper = QualityModel::psi_hyperbola(1.0, 2.5, 0.1);
    for p in [1.2, 1.75, 2.3] {
        let fd = (psi(1.0, 2.5, 0.1, p + FD_STEP) - psi(1.0, 2.5, 0.1, p - FD_STEP)) / (2.0 * FD_STEP);
        assert!(close(hyper.diagonal_derivative(p).unwrap(), fd, 1e-5), "p = {p}");
    }
}

#[test]
fn flat_diagonal_refuses_inference() {
    let q = QualityModel::price_threshold(2.0, 1.0);
    assert!(infer_type(&q, &Bid::new(1.0, 0.5).with_standalone(1.0)).is_err());
}

#[test]
fn vcg_star_declines_when_declared_welfare_falls_short() {
    // Both ads priced where their quality is zero, yet the inferred types are
    // worth showing at grid prices.
    let q = QualityModel::smooth_decay(1.0, 0.5, 0.0);
    let agents = (0..2).map(|_| AgentSpec { agent_type: AgentType { alpha: 1.0, cost: 0.2 }, quality: q.clone() }).collect();
    let inst = AuctionInstance::new(agents, SlotProfile::new(vec![1.0]).unwrap(), vec![0.5, 1.0, 2.0], TieBreak::LowestIndex).unwrap();
    let star = adprice::mechanisms::standalone_price(&q, &inst.agent_type(0)).unwrap();
    let profile = StrategyProfile::new(vec![Bid::new(2.0, 1.8).with_standalone(star); 2]);
    let out = run_indirect_vcg_star(&inst, &profile).unwrap();
    assert!(out.diagnostics.fallback_empty);
    assert!(out.allocation.is_empty());
    assert_eq!(out.revenue, 0.0);
}
