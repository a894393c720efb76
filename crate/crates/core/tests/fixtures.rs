//! The two reference graphs are reconstructed from the quantities they must
//! produce; these checks pin every one of those quantities down.

mod common;

use common::*;
use qident::condid::{conditional_effect, partition, unconditional_effect, NotIdentifiedReason, Verdict};
use qident::expr::{evaluate, Expr, ExprRef};
use qident::fixtures;
use qident::identify::{identify, IdentifyOutcome};
use qident::oracle::{observed_joint, oracle_conditional, q_table, random_model, Cardinalities};
use qident::qcomp::{containing, q_observed, Provenance, QFactor};
use qident::{Admg, VarSet};

fn factor(g: &Admg, v: &str, given: &[&str]) -> ExprRef {
    Expr::factor(g.id(v).unwrap(), set(g, given))
}

fn expect_fail(outcome: IdentifyOutcome) {
    assert!(matches!(outcome, IdentifyOutcome::Fail { .. }), "{outcome:?}");
}

fn expect_success(outcome: IdentifyOutcome) -> QFactor {
    match outcome {
        IdentifyOutcome::Success(q) => q,
        other => panic!("{other:?}"),
    }
}

#[test]
fn data_files_match_library_fixtures() {
    assert_eq!(data("cancellation.graph"), fixtures::cancellation_graph());
    assert_eq!(data("partition.graph"), fixtures::partition_graph());
}

#[test]
fn cancellation_graph_constraints() {
    let g = data("cancellation.graph");
    let s1 = set(&g, &["A", "X", "W", "Y"]);
    assert_eq!(
        g.c_components(&g.all()),
        vec![s1.clone(), set(&g, &["B"]), set(&g, &["Z"])]
    );

    let qs = q_observed(&g);
    assert_eq!(
        factor_set(&g, qs[0].expr()),
        named(&[
            ("Y", &["Z", "W", "X", "B", "A"]),
            ("W", &["X", "B", "A"]),
            ("X", &["B", "A"]),
            ("A", &[]),
        ])
    );
    assert_eq!(factor_set(&g, qs[1].expr()), named(&[("B", &["A"])]));

    let no_x = g.all().difference(&set(&g, &["X"]));
    assert_eq!(g.ancestors(&no_x, &set(&g, &["Y", "W"])), set(&g, &["Y", "Z", "W"]));
    let d = g.ancestors(&no_x, &set(&g, &["Y", "W", "B"]));
    assert_eq!(d, set(&g, &["Y", "W", "Z", "B", "A"]));
    let mut blocks = g.c_components(&d);
    blocks.sort();
    let mut want = vec![set(&g, &["B"]), set(&g, &["Z"]), set(&g, &["W"]), set(&g, &["A", "Y"])];
    want.sort();
    assert_eq!(blocks, want);
    assert_eq!(g.pa_closure(&set(&g, &["W"])), set(&g, &["W", "X"]));

    let q1 = &qs[0];
    let qy = expect_success(identify(&g, &set(&g, &["Y"]), &s1, q1).unwrap());
    expect_fail(identify(&g, &set(&g, &["W"]), &s1, q1).unwrap());
    expect_fail(identify(&g, &set(&g, &["A", "Y"]), &s1, q1).unwrap());

    // Hand-built Q[{Y}] = Σ_a Q[S1] / Σ_{a,y} Q[S1] and the conditional
    // effect Σ_z P(z|x) Q[{Y}], compared with enumeration.
    let a = set(&g, &["A"]);
    let hand_qy = Expr::quotient(
        Expr::sum(a.clone(), q1.expr().clone()),
        Expr::sum(set(&g, &["A", "Y"]), q1.expr().clone()),
    );
    let hand_effect = Expr::sum(
        set(&g, &["Z"]),
        Expr::product(vec![factor(&g, "Z", &["X"]), hand_qy.clone()]),
    );
    let cards = Cardinalities::binary(g.len());
    for seed in 0..5 {
        let m = random_model(&g, &cards, seed).unwrap();
        let p = observed_joint(&m).unwrap();
        let truth_y = q_table(&m, &set(&g, &["Y"])).unwrap();
        let truth_z = q_table(&m, &set(&g, &["Z"])).unwrap();
        let truth_b = q_table(&m, &set(&g, &["B"])).unwrap();
        for x in full_assignments(m.cards()) {
            let want = truth_y.value_at(&x).unwrap();
            assert!((evaluate(qy.expr(), &p, &x).unwrap() - want).abs() < 1e-12);
            assert!((evaluate(&hand_qy, &p, &x).unwrap() - want).abs() < 1e-12);
            let pz = evaluate(&factor(&g, "Z", &["X"]), &p, &x).unwrap();
            assert!((pz - truth_z.value_at(&x).unwrap()).abs() < 1e-12);
            assert!((evaluate(qs[2].expr(), &p, &x).unwrap() - pz).abs() < 1e-12);
            let pb = evaluate(&factor(&g, "B", &["A"]), &p, &x).unwrap();
            assert!((pb - truth_b.value_at(&x).unwrap()).abs() < 1e-12);
        }
    }

    let m = random_model(&g, &cards, 1).unwrap();
    let p = observed_joint(&m).unwrap();
    let truth = oracle_conditional(&m, &asg(&g, &[("X", 0)]), &asg(&g, &[("Y", 1)]), &asg(&g, &[("W", 0)])).unwrap();
    let (t, s, c) = (set(&g, &["X"]), set(&g, &["Y"]), set(&g, &["W"]));
    let ours = conditional_effect(&g, &t, &s, &c).unwrap();
    let at = asg(&g, &[("X", 0), ("Y", 1), ("W", 0)]);
    assert!((evaluate(ours.expr().unwrap(), &p, &at).unwrap() - truth).abs() < 1e-12);
    for b in 0..2 {
        let mut at_b = at.clone();
        at_b.insert(g.id("B").unwrap(), b);
        assert!((evaluate(&hand_effect, &p, &at_b).unwrap() - truth).abs() < 1e-12);
    }
}

#[test]
fn partition_graph_constraints() {
    let g = data("partition.graph");
    let s1 = set(&g, &["X", "A", "W", "Y"]);
    let mut comps = g.c_components(&g.all());
    comps.sort();
    let mut want = vec![s1.clone(), set(&g, &["B"]), set(&g, &["Z"])];
    want.sort();
    assert_eq!(comps, want);

    let qs = q_observed(&g);
    let q1 = containing(&qs, g.id("X").unwrap()).unwrap();
    assert_eq!(
        factor_set(&g, q1.expr()),
        named(&[
            ("Y", &["Z", "W", "B", "A", "X"]),
            ("W", &["B", "A", "X"]),
            ("A", &["X"]),
            ("X", &[]),
        ])
    );

    let (t, s, c) = (set(&g, &["X"]), set(&g, &["Y"]), set(&g, &["A"]));
    let r = conditional_effect(&g, &t, &s, &c).unwrap();
    assert_eq!(r.diagnostics.d, set(&g, &["A", "B", "W", "Z", "Y"]));
    assert_eq!(r.diagnostics.f, set(&g, &["B", "W", "Z"]));
    let mut blocks: Vec<VarSet> = r.diagnostics.blocks.iter().map(|b| b.block.clone()).collect();
    blocks.sort();
    let mut want = vec![set(&g, &["A"]), set(&g, &["B"]), set(&g, &["Z"]), set(&g, &["W", "Y"])];
    want.sort();
    assert_eq!(blocks, want);

    let qwy = expect_success(identify(&g, &set(&g, &["W", "Y"]), &s1, q1).unwrap());
    assert_eq!(qwy.provenance(), Provenance::Marginalized);
    expect_fail(identify(&g, &set(&g, &["A"]), &s1, q1).unwrap());

    let state = r.diagnostics.partition.clone().unwrap();
    assert!(state.f0.is_empty());
    assert_eq!(state.f1, set(&g, &["B", "W", "Z"]));
    assert!(state.i0.is_empty());
    assert_eq!(state.i1.len(), 3);

    // The ratio with Q[{B}] = P(b|a), Q[{Z}] = P(z|x), Q[{W,Y}] = Σ_{x,a} Q[S1].
    let qwy_hand = Expr::sum(set(&g, &["X", "A"]), q1.expr().clone());
    let prod = Expr::product(vec![factor(&g, "B", &["A"]), factor(&g, "Z", &["X"]), qwy_hand]);
    let num = Expr::sum(set(&g, &["B", "W", "Z"]), prod);
    let hand = Expr::quotient(num.clone(), Expr::sum(set(&g, &["Y"]), num));
    let cards = Cardinalities::binary(g.len());
    for seed in 0..5 {
        let m = random_model(&g, &cards, 100 + seed).unwrap();
        let p = observed_joint(&m).unwrap();
        let truth_wy = q_table(&m, &set(&g, &["W", "Y"])).unwrap();
        for x in full_assignments(m.cards()) {
            let want = truth_wy.value_at(&x).unwrap();
            assert!((evaluate(qwy.expr(), &p, &x).unwrap() - want).abs() < 1e-12);
        }
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    let truth =
                        oracle_conditional(&m, &asg(&g, &[("X", x)]), &asg(&g, &[("Y", y)]), &asg(&g, &[("A", a)]))
                            .unwrap();
                    let at = asg(&g, &[("X", x), ("Y", y), ("A", a)]);
                    assert!((evaluate(r.expr().unwrap(), &p, &at).unwrap() - truth).abs() < 1e-12);
                    assert!((evaluate(&hand, &p, &at).unwrap() - truth).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn verdict_triple_on_cancellation_graph() {
    let g = data("cancellation.graph");
    let x = set(&g, &["X"]);
    let w_fails = Verdict::NotIdentified(NotIdentifiedReason::FailedBlocks {
        blocks: vec![set(&g, &["W"])],
    });
    assert_eq!(
        unconditional_effect(&g, &x, &set(&g, &["Y", "W"])).unwrap().verdict,
        w_fails
    );
    assert_eq!(unconditional_effect(&g, &x, &set(&g, &["W"])).unwrap().verdict, w_fails);
    assert!(conditional_effect(&g, &x, &set(&g, &["Y"]), &set(&g, &["W"]))
        .unwrap()
        .is_identifiable());
    let r = conditional_effect(&g, &x, &set(&g, &["Y"]), &set(&g, &["W", "B"])).unwrap();
    assert_eq!(
        r.verdict,
        Verdict::NotIdentified(NotIdentifiedReason::Overlap {
            witnesses: set(&g, &["Y"])
        })
    );
}

#[test]
fn computed_partition_is_least_fixpoint_on_fixtures() {
    let g = data("cancellation.graph");
    let r = conditional_effect(&g, &set(&g, &["X"]), &set(&g, &["Y"]), &set(&g, &["W", "B"])).unwrap();
    let st = r.diagnostics.partition.unwrap();
    let again = partition(&g, &st.f, &st.n_set, &st.i_set);
    assert_eq!(again, st);
    // F = {Z, A}; both are parents of unidentified blocks, so F0 = F.
    assert_eq!(st.f0, set(&g, &["Z", "A"]));
    assert!(st.f1.is_empty());
}
