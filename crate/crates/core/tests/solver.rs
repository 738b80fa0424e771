mod common;

use approx::assert_abs_diff_eq;
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semctx::channel::{induced_joint, AuxiliaryScheme, ContextModel, SemanticChannel};
use semctx::oracle::{exhaustive_capacity, exhaustive_scheme_search, GridSpec};
use semctx::prob::Alphabet;
use semctx::solver::{capacity_full_csi, evaluate_rate, optimize_rate, RateTerms, SearchConfig};
use semctx::Scenario;

#[test]
fn capacity_matches_grid_oracle_on_random_binary_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (ch, ctx) = random_binary_full_shared(&mut rng);
        let c = capacity_full_csi(&ch, &ctx).unwrap().rate_bits;
        let o = exhaustive_capacity(&ch, &ctx, &GridSpec::new(201, 2)).unwrap();
        assert!((c - o.rate).abs() <= 2e-3, "solver {c} oracle {}", o.rate);
        // the lattice can only undershoot
        assert!(o.rate <= c + 1e-7);
    }
}

#[test]
fn optimizer_reaches_full_csi_capacity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let (ch, ctx) = random_binary_full_shared(&mut rng);
        let c = capacity_full_csi(&ch, &ctx).unwrap().rate_bits;
        let r = optimize_rate(&ch, &ctx, Scenario::FullShared, &SearchConfig::default().with_u_size(2)).unwrap();
        assert!((c - r.rate_bits).abs() <= 2e-3, "capacity {c} optimizer {}", r.rate_bits);
        assert_eq!(r.exhaustive, Some(true));
    }
}

#[test]
fn schemes_never_beat_full_csi_capacity() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let (ch, ctx) = random_binary_full_shared(&mut rng);
        let c = capacity_full_csi(&ch, &ctx).unwrap().rate_bits;
        for nu in 2..=4 {
            let sc = random_scheme(&mut rng, &ctx, nu, 2);
            let r = evaluate_rate(&ch, &ctx, &sc, Scenario::FullShared).unwrap().rate_bits;
            assert!(r <= c + 1e-6);
        }
    }
}

#[test]
fn scenario_formulas_reduce_on_partial_context() {
    let (ch, ctx) = partial_context();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let no_q2 = ctx.collapse_q2_extra();
    let no_q1 = ctx.collapse_q1_extra();
    let ch_no_q1 = ch.average_q1_extra(&ctx).unwrap();
    for _ in 0..25 {
        let sc = random_scheme(&mut rng, &no_q2, 3, 2);
        let a = evaluate_rate(&ch, &no_q2, &sc, Scenario::PartialShared).unwrap().rate_bits;
        let b = evaluate_rate(&ch, &no_q2, &sc, Scenario::SenderKnowsMore).unwrap().rate_bits;
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);

        let sc = random_scheme(&mut rng, &no_q1, 3, 2);
        let a = evaluate_rate(&ch_no_q1, &no_q1, &sc, Scenario::PartialShared).unwrap().rate_bits;
        let b = evaluate_rate(&ch_no_q1, &no_q1, &sc, Scenario::ReceiverKnowsMore).unwrap().rate_bits;
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);

        let sc = random_scheme(&mut rng, &ctx, 3, 2);
        let t = RateTerms::from_joint(&induced_joint(&ch, &ctx, &sc).unwrap()).unwrap();
        assert!(t.rate(Scenario::SenderKnowsMore) <= t.ux_given_q2 + 1e-12);
        assert!(t.ux_given_q2 <= t.rate(Scenario::ReceiverKnowsMore) + 1e-12);
    }
}

#[test]
fn scenario_mismatch_is_rejected() {
    let (ch, ctx) = partial_context();
    for s in [Scenario::FullShared, Scenario::SenderKnowsMore, Scenario::ReceiverKnowsMore] {
        assert!(matches!(optimize_rate(&ch, &ctx, s, &SearchConfig::default()), Err(semctx::Error::Scenario(_))));
    }
    assert!(capacity_full_csi(&ch, &ctx).is_err());
}

#[test]
fn stuck_at_optimum_matches_scheme_oracle() {
    let (ch, ctx) = stuck_at(0.5);
    let hand = evaluate_rate(&ch, &ctx, &stuck_at_scheme(&ctx), Scenario::SenderKnowsMore).unwrap();
    assert_abs_diff_eq!(hand.rate_bits, 0.5, epsilon = 1e-12);

    let opt = optimize_rate(&ch, &ctx, Scenario::SenderKnowsMore, &SearchConfig::default().with_u_size(3)).unwrap();
    assert!((opt.rate_bits - 0.5).abs() <= 0.02, "{}", opt.rate_bits);

    let oracle = exhaustive_scheme_search(&ch, &ctx, Scenario::SenderKnowsMore, &GridSpec::new(7, 3)).unwrap();
    assert!((oracle.report.rate_bits - 0.5).abs() <= 0.02);
    assert_abs_diff_eq!(oracle.plugin_rate, oracle.report.rate_bits, epsilon = 1e-9);
    assert!((opt.rate_bits - oracle.report.rate_bits).abs() <= oracle.gap);
    // dominance over the hand scheme
    assert!(oracle.report.rate_bits >= hand.rate_bits - oracle.gap);
}

#[test]
fn scheme_oracle_reduces_to_capacity_without_context() {
    let ctx = ContextModel::trivial();
    let ch = SemanticChannel::context_free(&ctx, bits("s"), bits("x"), &[bsc_row(0.1, 0), bsc_row(0.1, 1)]).unwrap();
    let g = GridSpec::new(41, 2);
    let cap = exhaustive_capacity(&ch, &ctx, &g).unwrap();
    let sch = exhaustive_scheme_search(&ch, &ctx, Scenario::FullShared, &g).unwrap();
    assert!((cap.rate - sch.plugin_rate).abs() <= cap.gap.min(sch.gap));
    assert!((cap.rate - sch.plugin_rate).abs() < 1e-9);
}

#[test]
fn scheme_oracle_is_zero_when_output_ignores_input() {
    let (_, ctx) = stuck_at(0.5);
    let ch = SemanticChannel::from_fn(
        Alphabet::degenerate("q0"),
        ctx.q1_extra().clone(),
        bits("s"),
        bits("x"),
        |_, b, _| if b == 0 { vec![0.3, 0.7] } else { vec![0.6, 0.4] },
    )
    .unwrap();
    let o = exhaustive_scheme_search(&ch, &ctx, Scenario::SenderKnowsMore, &GridSpec::new(5, 2)).unwrap();
    assert!(o.report.rate_bits.abs() < 1e-6, "{}", o.report.rate_bits);
}

#[test]
fn scheme_oracle_respects_budget() {
    let (ch, ctx) = stuck_at(0.5);
    let mut g = GridSpec::new(51, 3);
    assert!(matches!(
        exhaustive_scheme_search(&ch, &ctx, Scenario::SenderKnowsMore, &g),
        Err(semctx::Error::Resource(_))
    ));
    g.budget = 1;
    g.resolution = 2;
    assert!(exhaustive_scheme_search(&ch, &ctx, Scenario::SenderKnowsMore, &g).is_err());
}

#[test]
fn rate_report_serializes() {
    let (ch, ctx) = context_bsc();
    let r = capacity_full_csi(&ch, &ctx).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["scenario"], "FullShared");
    assert_eq!(v["kind"], "capacity");
    assert!((v["rate_bits"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    let _ = AuxiliaryScheme::direct(&ctx, bits("s"), &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
}
