//! Cross-module invariants: substitution and evaluation laws, exactness
//! round-trips, homomorphism theorems, prover/checker agreement.

mod common;

use proptest::prelude::*;
use rand::prelude::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ualg::eqlogic::{self, EntailmentVerdict};
use ualg::finalg::{self, FiniteAlgebra};
use ualg::ordalg::{self, OrderedAlgebra, Relation, StablePreorder};
use ualg::quantalg::{self, CParam};
use ualg::ratext::Ext;
use ualg::sigterm::{
    enumerate_terms, evaluate, parse_term, substitute, Signature, Substitution, Term, VarSet,
};
use ualg::variety::{self, HspOutcome, TermEquation};
use ualg::Limits;

// ---------------------------------------------------------------------------
// sigterm laws

/// Terms over Σ = {c/0, f/1, g/2} and variables {x, y, z}.
fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..3usize).prop_map(Term::Var),
        Just(Term::App(0, vec![])),
    ];
    leaf.prop_recursive(4, 32, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::App(1, vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::App(2, vec![a, b])),
        ]
    })
}

fn law_sig() -> Signature {
    Signature::of(&[("c", 0), ("f", 1), ("g", 2)])
}

/// An algebra over the law signature on {0,1,2}: c = 1, f = successor mod
/// 3, g = addition mod 3.
fn law_algebra() -> FiniteAlgebra {
    let mut g = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            g.push((a + b) % 3);
        }
    }
    FiniteAlgebra::new(
        law_sig(),
        3,
        vec![vec![1], vec![1, 2, 0], g],
    )
    .unwrap()
}

proptest! {
    #[test]
    fn substitution_identity_law(t in term_strategy()) {
        let id = Substitution::identity(3);
        prop_assert_eq!(substitute(&t, &id).unwrap(), t);
    }

    #[test]
    fn substitution_composition_law(
        t in term_strategy(),
        s1 in proptest::collection::vec(term_strategy(), 3),
        s2 in proptest::collection::vec(term_strategy(), 3),
    ) {
        let s1 = Substitution::new(s1);
        let s2 = Substitution::new(s2);
        let lhs = substitute(&substitute(&t, &s1).unwrap(), &s2).unwrap();
        let composed = s1.then(&s2).unwrap();
        prop_assert_eq!(lhs, substitute(&t, &composed).unwrap());
    }

    #[test]
    fn homomorphic_extension_law(
        t in term_strategy(),
        s in proptest::collection::vec(term_strategy(), 3),
        h in proptest::collection::vec(0..3usize, 3),
    ) {
        let a = law_algebra();
        let s = Substitution::new(s);
        let lhs = evaluate(&substitute(&t, &s).unwrap(), &a, &h).unwrap();
        let pushed: Vec<usize> = (0..3)
            .map(|i| evaluate(s.image(i).unwrap(), &a, &h).unwrap())
            .collect();
        prop_assert_eq!(lhs, evaluate(&t, &a, &pushed).unwrap());
    }
}

proptest! {
    #[test]
    fn display_parse_round_trip(t in term_strategy()) {
        let sig = law_sig();
        let vars = VarSet::of(&["x", "y", "z"]);
        let shown = t.display(&sig, &vars).to_string();
        prop_assert_eq!(parse_term(&shown, &sig, &vars).unwrap(), t);
    }
}

#[test]
fn enumeration_is_monotone_and_exactly_depth_bounded() {
    let sig = Signature::of(&[("c", 0), ("g", 2)]);
    let vars = VarSet::of(&["x"]);
    let mut prev: Vec<Term> = Vec::new();
    for depth in 0..=2 {
        let level = enumerate_terms(&sig, &vars, depth);
        for t in &prev {
            assert!(level.contains(t), "terms may not vanish at larger depth");
        }
        for t in &level {
            assert!(t.depth() <= depth);
        }
        // membership is exactly depth ≤ d: every depth ≤ d term built by
        // hand from smaller levels is present
        if depth > 0 {
            for t in &prev {
                assert!(level.contains(&Term::App(1, vec![t.clone(), t.clone()])));
            }
        }
        prev = level;
    }
}

// ---------------------------------------------------------------------------
// finalg: exactness and the homomorphism theorem

#[test]
fn kernel_of_quotient_recovers_congruence_corpus_wide() {
    let limits = Limits::default();
    for a in common::plain_corpus() {
        for cong in finalg::all_congruences(&a, &limits).unwrap() {
            let (_, e) = finalg::quotient(&a, &cong).unwrap();
            assert_eq!(finalg::kernel(&e), cong);
        }
    }
}

#[test]
fn kernel_of_quotient_recovers_congruence_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        let a = common::random_algebra(&mut rng, 5, 2);
        let n = a.size();
        let pairs: Vec<(usize, usize)> = (0..rng.gen_range(0..=2))
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let cong = finalg::congruence_generated(&a, &pairs).unwrap();
        let (_, e) = finalg::quotient(&a, &cong).unwrap();
        assert_eq!(finalg::kernel(&e), cong);
    }
}

#[test]
fn quant_proved_conclusions_hold_in_random_models() {
    let limits = Limits::default();
    let sig = Signature::of(&[("f", 1)]);
    let vs = VarSet::of(&["x", "y"]);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let qeq = |l: &str, r: &str, e: ualg::ratext::Ext| {
        ualg::quantalg::QuantEquation::new(
            vs.clone(),
            parse_term(l, &sig, &vs).unwrap(),
            parse_term(r, &sig, &vs).unwrap(),
            e,
        )
    };
    // deterministic pool of quantitative algebras with one unary symbol;
    // terms address symbols by id, so any single-unary-op algebra fits
    let mut pool = Vec::new();
    let mut attempts = 0;
    while pool.len() < 30 && attempts < 10_000 {
        attempts += 1;
        let a = common::random_quant_algebra(&mut rng, 3);
        if a.base().signature().len() == 1 && a.base().signature().arity(0) == 1 {
            pool.push(a);
        }
    }
    assert!(pool.len() >= 10, "generator starved the pool");
    let shapes = ["x", "y", "f(x)", "f(y)", "f(f(x))"];
    for _ in 0..40 {
        let gamma = vec![qeq(
            shapes[rng.gen_range(0..shapes.len())],
            shapes[rng.gen_range(0..shapes.len())],
            common::random_ext(&mut rng, false),
        )];
        let goal = qeq(
            shapes[rng.gen_range(0..shapes.len())],
            shapes[rng.gen_range(0..shapes.len())],
            common::random_ext(&mut rng, true),
        );
        if goal.lhs.depth().max(goal.rhs.depth()) > 2 {
            continue;
        }
        if let quantalg::QuantVerdict::Proved(proof) =
            quantalg::quant_entails(&sig, &gamma, &goal, 2, &limits).unwrap()
        {
            assert!(quantalg::check_quant_proof(&sig, &proof, &gamma).unwrap());
            for algebra in &pool {
                let models_gamma = gamma.iter().all(|ax| {
                    quantalg::satisfies_clustered_equation(algebra, &ax.clustered())
                        .unwrap()
                        .holds()
                });
                if models_gamma {
                    assert!(
                        quantalg::satisfies_clustered_equation(algebra, &goal.clustered())
                            .unwrap()
                            .holds(),
                        "proved bound violated in a model of the axioms"
                    );
                }
            }
        }
    }
}

#[test]
fn quotient_of_kernel_is_image() {
    // every surjection arises as a quotient; check across all congruences
    let limits = Limits::default();
    for a in common::binary_corpus() {
        for cong in finalg::all_congruences(&a, &limits).unwrap() {
            let (q, e) = finalg::quotient(&a, &cong).unwrap();
            let (q2, _) = finalg::quotient(&a, &finalg::kernel(&e)).unwrap();
            assert!(finalg::is_isomorphic(&q, &q2).unwrap());
        }
    }
}

#[test]
fn homomorphism_theorem_factorization() {
    let limits = Limits::default();
    for a in common::binary_corpus() {
        let congs = finalg::all_congruences(&a, &limits).unwrap();
        for c1 in &congs {
            let (_, e) = finalg::quotient(&a, c1).unwrap();
            for c2 in &congs {
                let (_, h) = finalg::quotient(&a, c2).unwrap();
                let factor = finalg::factor_through(&e, &h).unwrap();
                let kernel_contained = finalg::kernel(&e).refines(&finalg::kernel(&h));
                assert_eq!(factor.is_some(), kernel_contained);
                if let Some(g) = factor {
                    assert_eq!(e.then(&g).unwrap().map(), h.map());
                }
            }
        }
    }
}

#[test]
fn surjection_then_inclusion_composes() {
    let a = common::z(4);
    let cong = finalg::congruence_generated(&a, &[(0, 2)]).unwrap();
    let (q, e) = finalg::quotient(&a, &cong).unwrap();
    let (_, inclusion) = finalg::subalgebra_generated(&q, &[0, 1]).unwrap();
    // inclusion of the full carrier: compose backwards q -> q
    let composed = e.then(&inclusion.then(&finalg::Homomorphism::identity(&q)).unwrap());
    assert!(composed.is_ok());
}

// ---------------------------------------------------------------------------
// variety: closure, universal property, monotonicity

fn sample_equations(sig: &Signature) -> Vec<TermEquation> {
    let vs = VarSet::of(&["x", "y", "z"]);
    [
        ("*(x,y)", "*(y,x)"),
        ("*(x,x)", "x"),
        ("*(*(x,y),z)", "*(x,*(y,z))"),
        ("*(x,y)", "x"),
    ]
    .iter()
    .map(|(l, r)| {
        TermEquation::new(
            vs.clone(),
            parse_term(l, sig, &vs).unwrap(),
            parse_term(r, sig, &vs).unwrap(),
        )
    })
    .collect()
}

#[test]
fn satisfaction_is_preserved_by_h_s_p() {
    let limits = Limits::default();
    for a in common::binary_corpus() {
        for eq in sample_equations(a.signature()) {
            if !variety::satisfies_equation(&a, &eq).unwrap().holds() {
                continue;
            }
            for cong in finalg::all_congruences(&a, &limits).unwrap() {
                let (q, _) = finalg::quotient(&a, &cong).unwrap();
                assert!(variety::satisfies_equation(&q, &eq).unwrap().holds());
            }
            for seed in common::subsets_of_size(a.size(), 1.min(a.size())) {
                let (s, _) = finalg::subalgebra_generated(&a, &seed).unwrap();
                assert!(variety::satisfies_equation(&s, &eq).unwrap().holds());
            }
            let (p, _) = finalg::product(&[a.clone(), a.clone()], &limits).unwrap();
            assert!(variety::satisfies_equation(&p, &eq).unwrap().holds());
        }
    }
}

#[test]
fn free_algebra_universal_property() {
    let limits = Limits::default();
    let corpus = common::binary_corpus();
    let a = &corpus[1]; // Z2
    let free = variety::free_algebra_in_variety(a, 2, &limits).unwrap();
    for b in &corpus {
        if !variety::hsp_member(b, a, &limits).unwrap().is_member() {
            continue;
        }
        let mut images = vec![0usize; 2];
        for i in 0..b.size() {
            for j in 0..b.size() {
                images[0] = i;
                images[1] = j;
                let ext = variety::extend_from_generators(&free, b, &images).unwrap();
                assert!(finalg::is_homomorphism(&ext, &free.algebra, b).unwrap());
            }
        }
    }
}

#[test]
fn hsp_membership_is_transitive() {
    let limits = Limits::default();
    let corpus = common::binary_corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let a = corpus.choose(&mut rng).unwrap();
        let b = corpus.choose(&mut rng).unwrap();
        let c = corpus.choose(&mut rng).unwrap();
        let ba = variety::hsp_member(b, a, &limits).unwrap().is_member();
        let cb = variety::hsp_member(c, b, &limits).unwrap().is_member();
        if ba && cb {
            assert!(
                variety::hsp_member(c, a, &limits).unwrap().is_member(),
                "transitivity failed"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// eqlogic: soundness, agreement with congruence semantics

fn entail_sig() -> Signature {
    Signature::of(&[("*", 2)])
}

fn eq_of(sig: &Signature, vars: &[&str], l: &str, r: &str) -> TermEquation {
    let vs = VarSet::of(vars);
    TermEquation::new(
        vs.clone(),
        parse_term(l, sig, &vs).unwrap(),
        parse_term(r, sig, &vs).unwrap(),
    )
}

#[test]
fn derived_proofs_are_sound_in_small_models() {
    let limits = Limits::default();
    let sig = entail_sig();
    let gamma = vec![eq_of(&sig, &["x", "y"], "*(x,y)", "*(y,x)")];
    let goal = eq_of(&sig, &["u", "v"], "*(*(u,v),u)", "*(u,*(v,u))");
    if let Some(proof) = eqlogic::derive(&sig, &gamma, &goal, 2, &limits).unwrap() {
        assert!(eqlogic::check_proof(&sig, &proof, &gamma).unwrap());
        for size in 1..=3 {
            eqlogic::enumerate_models(&sig, size, &limits, |model| {
                let is_model = gamma
                    .iter()
                    .all(|ax| variety::satisfies_equation(model, ax).unwrap().holds());
                if is_model {
                    assert!(
                        variety::satisfies_equation(model, &goal).unwrap().holds(),
                        "derived goal fails in a model of Γ"
                    );
                }
                Ok(true)
            })
            .unwrap();
        }
    }
}

/// Naive saturation over the same universe: seed in-universe axiom
/// instances, then repeatedly merge same-symbol applications with
/// pairwise-merged children. Written independently of the proof-forest
/// closure.
fn naive_derivable(
    sig: &Signature,
    gamma: &[TermEquation],
    goal: &TermEquation,
    depth: usize,
) -> bool {
    let universe = enumerate_terms(sig, &goal.vars, depth);
    let index: std::collections::HashMap<Term, usize> = universe
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let n = universe.len();
    let mut cls: Vec<usize> = (0..n).collect();
    fn find(cls: &mut Vec<usize>, a: usize) -> usize {
        if cls[a] != a {
            let r = find(cls, cls[a]);
            cls[a] = r;
        }
        cls[a]
    }
    for ax in gamma {
        let arity = ax.vars.len();
        common::for_each_tuple::<()>(n, arity, |images| {
            let sub = Substitution::new(
                images.iter().map(|&i| universe[i].clone()).collect(),
            );
            let l = substitute(&ax.lhs, &sub).unwrap();
            let r = substitute(&ax.rhs, &sub).unwrap();
            if let (Some(&li), Some(&ri)) = (index.get(&l), index.get(&r)) {
                let (a, b) = (find(&mut cls, li), find(&mut cls, ri));
                if a != b {
                    cls[a.max(b)] = a.min(b);
                }
            }
            Ok(())
        })
        .ok();
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if find(&mut cls, i) == find(&mut cls, j) {
                    continue;
                }
                let (si, ci) = match &universe[i] {
                    Term::App(s, cs) => (s, cs),
                    _ => continue,
                };
                let (sj, cj) = match &universe[j] {
                    Term::App(s, cs) => (s, cs),
                    _ => continue,
                };
                if si == sj
                    && ci.iter().zip(cj.iter()).all(|(a, b)| {
                        find(&mut cls, index[a]) == find(&mut cls, index[b])
                    })
                {
                    let (a, b) = (find(&mut cls, i), find(&mut cls, j));
                    cls[a.max(b)] = a.min(b);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    find(&mut cls, index[&goal.lhs]) == find(&mut cls, index[&goal.rhs])
}

#[test]
fn derive_agrees_with_naive_congruence_closure() {
    let limits = Limits::default();
    let sig = entail_sig();
    let cases = vec![
        (vec![eq_of(&sig, &["x", "y"], "*(x,y)", "*(y,x)")],
         eq_of(&sig, &["u", "v"], "*(u,v)", "*(v,u)"), 1),
        (vec![eq_of(&sig, &["x", "y"], "*(x,y)", "*(y,x)")],
         eq_of(&sig, &["u", "v"], "*(u,v)", "u"), 1),
        (vec![eq_of(&sig, &["x"], "*(x,x)", "x")],
         eq_of(&sig, &["x"], "*(*(x,x),*(x,x))", "x"), 2),
        (vec![eq_of(&sig, &["x", "y"], "*(x,y)", "x")],
         eq_of(&sig, &["x", "y"], "*(*(x,y),y)", "x"), 2),
        (vec![], eq_of(&sig, &["x", "y"], "*(x,y)", "*(y,x)"), 2),
    ];
    for (gamma, goal, depth) in cases {
        let derived = eqlogic::derive(&sig, &gamma, &goal, depth, &limits)
            .unwrap()
            .is_some();
        assert_eq!(
            derived,
            naive_derivable(&sig, &gamma, &goal, depth),
            "disagreement on {goal:?} at depth {depth}"
        );
    }
}

#[test]
fn refutations_are_valid_and_exclusive() {
    let limits = Limits::default();
    let sig = entail_sig();
    let gamma = vec![eq_of(&sig, &["x"], "*(x,x)", "x")];
    let goal = eq_of(&sig, &["x", "y"], "*(x,y)", "*(y,x)");
    match eqlogic::semantic_entails(&sig, &gamma, &goal, 3, 2, &limits).unwrap() {
        EntailmentVerdict::Refuted { model, assignment } => {
            for ax in &gamma {
                assert!(variety::satisfies_equation(&model, ax).unwrap().holds());
            }
            let l = evaluate(&goal.lhs, &model, &assignment).unwrap();
            let r = evaluate(&goal.rhs, &model, &assignment).unwrap();
            assert_ne!(l, r);
        }
        other => panic!("idempotence does not force commutativity: {other:?}"),
    }
}

// ---------------------------------------------------------------------------
// ordalg: exactness round-trip and antisymmetry of satisfaction

fn ordered_corpus() -> Vec<OrderedAlgebra> {
    let sl2 = OrderedAlgebra::chain(
        FiniteAlgebra::new(Signature::of(&[("*", 2)]), 2, vec![vec![0, 0, 0, 1]]).unwrap(),
    )
    .unwrap();
    let sl3 = OrderedAlgebra::chain(
        FiniteAlgebra::new(
            Signature::of(&[("*", 2)]),
            3,
            vec![vec![0, 0, 0, 0, 1, 1, 0, 1, 2]],
        )
        .unwrap(),
    )
    .unwrap();
    let chain4 =
        OrderedAlgebra::chain(FiniteAlgebra::new(Signature::of(&[]), 4, vec![]).unwrap())
            .unwrap();
    let discrete = OrderedAlgebra::discrete(common::binary_corpus()[2].clone());
    vec![sl2, sl3, chain4, discrete]
}

#[test]
fn eq3_round_trip_over_generated_preorders() {
    for a in ordered_corpus() {
        let n = a.size();
        let mut pair_sets: Vec<Vec<(usize, usize)>> = vec![vec![]];
        for x in 0..n {
            for y in 0..n {
                if x != y {
                    pair_sets.push(vec![(x, y)]);
                }
            }
        }
        pair_sets.push(vec![(0, n - 1), (n - 1, 0)]);
        for pairs in pair_sets {
            let r = ordalg::stable_preorder_generated(&a, &pairs).unwrap();
            let (q, e) = ordalg::quotient_ordered(&a, &r).unwrap();
            let induced = ordalg::induced_preorder(&a, &q, e.map()).unwrap();
            assert_eq!(induced.rel(), r.rel(), "round-trip failed on {pairs:?}");
        }
    }
}

#[test]
fn inequation_satisfaction_is_preserved_by_ordered_h_s_p() {
    let limits = Limits::default();
    for a in ordered_corpus() {
        if a.base().signature().is_empty() {
            continue;
        }
        let sig = a.base().signature().clone();
        let vs = VarSet::of(&["x", "y"]);
        let ineqs = [
            ("*(x,y)", "x"),
            ("x", "*(x,y)"),
            ("*(x,y)", "*(y,x)"),
        ]
        .iter()
        .map(|(l, r)| {
            ordalg::TermInequation::new(TermEquation::new(
                vs.clone(),
                parse_term(l, &sig, &vs).unwrap(),
                parse_term(r, &sig, &vs).unwrap(),
            ))
        })
        .collect::<Vec<_>>();
        for ineq in &ineqs {
            if !ordalg::satisfies_inequation(&a, ineq).unwrap().holds() {
                continue;
            }
            // quotients from generated preorders
            for pairs in [vec![], vec![(0, a.size() - 1)]] {
                let r = ordalg::stable_preorder_generated(&a, &pairs).unwrap();
                let (q, _) = ordalg::quotient_ordered(&a, &r).unwrap();
                assert!(ordalg::satisfies_inequation(&q, ineq).unwrap().holds());
            }
            // subalgebras
            for seed in common::subsets_of_size(a.size(), 1) {
                let (s, _) = ordalg::subalgebra_ordered(&a, &seed).unwrap();
                assert!(ordalg::satisfies_inequation(&s, ineq).unwrap().holds());
            }
            // binary product
            let (p, _) = ordalg::product_ordered(&[a.clone(), a.clone()], &limits).unwrap();
            assert!(ordalg::satisfies_inequation(&p, ineq).unwrap().holds());
        }
    }
}

#[test]
fn order_antisymmetry_matches_equation_satisfaction() {
    for a in ordered_corpus() {
        if a.base().signature().is_empty() {
            continue;
        }
        let sig = a.base().signature().clone();
        let vs = VarSet::of(&["x", "y"]);
        let eq = TermEquation::new(
            vs.clone(),
            parse_term("*(x,y)", &sig, &vs).unwrap(),
            parse_term("*(y,x)", &sig, &vs).unwrap(),
        );
        let fwd = ordalg::TermInequation::new(eq.clone());
        let bwd = ordalg::TermInequation::new(TermEquation::new(
            vs.clone(),
            eq.rhs.clone(),
            eq.lhs.clone(),
        ));
        let both = ordalg::satisfies_inequation(&a, &fwd).unwrap().holds()
            && ordalg::satisfies_inequation(&a, &bwd).unwrap().holds();
        assert_eq!(
            both,
            variety::satisfies_equation(a.base(), &eq).unwrap().holds()
        );
    }
}

// ---------------------------------------------------------------------------
// quantalg: homomorphism theorem, c-reflexivity monotonicity

#[test]
fn quant_homomorphism_theorem_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let a = common::random_quant_algebra(&mut rng, 4);
        let c1 = random_constraints(&mut rng, a.size());
        let c2 = random_constraints(&mut rng, a.size());
        let p1 = quantalg::quant_congruence_generated(&a, &c1).unwrap();
        let p2 = quantalg::quant_congruence_generated(&a, &c2).unwrap();
        let (_, e) = quantalg::quotient_quant(&a, &p1).unwrap();
        let (_, f) = quantalg::quotient_quant(&a, &p2).unwrap();
        let factor = quantalg::factor_through_quant(&e, &f).unwrap();
        assert_eq!(factor.is_some(), p2.le(&p1));
        if let Some(g) = factor {
            for x in 0..a.size() {
                assert_eq!(g.apply(e.apply(x)), f.apply(x));
            }
        }
    }
}

fn random_constraints(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize, Ext)> {
    let count = rng.gen_range(0..=3);
    (0..count)
        .map(|_| {
            (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                common::random_ext(rng, true),
            )
        })
        .collect()
}

#[test]
fn c_reflexivity_is_monotone_in_c() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let a = common::random_quant_algebra(&mut rng, 4);
        let constraints = random_constraints(&mut rng, a.size());
        let p = quantalg::quant_congruence_generated(&a, &constraints).unwrap();
        let (_, e) = quantalg::quotient_quant(&a, &p).unwrap();
        let mut results = Vec::new();
        for c in 2..=a.size() + 1 {
            results.push(
                quantalg::is_c_reflexive(&e, CParam::finite(c).unwrap(), &limits)
                    .unwrap()
                    .0,
            );
        }
        let omega = quantalg::is_c_reflexive(&e, CParam::Omega, &limits).unwrap().0;
        // larger c means more subsets to satisfy: true at c' forces true below
        for w in results.windows(2) {
            assert!(w[1] <= w[0], "monotonicity violated: {results:?}");
        }
        if omega {
            assert!(results.iter().all(|&r| r));
        }
    }
}

// ---------------------------------------------------------------------------
// proof checkers accept everything the provers emit

#[test]
fn checkers_accept_prover_output() {
    let limits = Limits::default();
    let sig = Signature::of(&[("f", 1), ("*", 2)]);
    let gammas = vec![
        vec![eq_of(&sig, &["x"], "f(x)", "x")],
        vec![eq_of(&sig, &["x", "y"], "*(x,y)", "*(y,x)")],
        vec![
            eq_of(&sig, &["x"], "f(f(x))", "x"),
            eq_of(&sig, &["x", "y"], "*(x,y)", "x"),
        ],
    ];
    let goals = vec![
        (eq_of(&sig, &["x"], "f(f(x))", "x"), 2),
        (eq_of(&sig, &["u", "v"], "*(u,v)", "*(v,u)"), 1),
        (eq_of(&sig, &["x", "y"], "*(f(x),f(y))", "f(x)"), 2),
    ];
    for gamma in &gammas {
        for (goal, depth) in &goals {
            if let Some(proof) =
                eqlogic::derive(&sig, gamma, goal, *depth, &limits).unwrap()
            {
                assert!(eqlogic::check_proof(&sig, &proof, gamma).unwrap());
                assert_eq!(&proof.conclusion, goal);
            }
        }
    }
}

#[test]
fn quant_checker_accepts_prover_output() {
    let limits = Limits::default();
    let sig = Signature::of(&[("f", 1)]);
    let vs = VarSet::of(&["x", "y", "z"]);
    let qeq = |l: &str, r: &str, e: Ext| {
        quantalg::QuantEquation::new(
            vs.clone(),
            parse_term(l, &sig, &vs).unwrap(),
            parse_term(r, &sig, &vs).unwrap(),
            e,
        )
    };
    let gamma = vec![
        qeq("x", "y", Ext::ratio(1, 5).unwrap()),
        qeq("f(y)", "z", Ext::ratio(1, 10).unwrap()),
    ];
    let goals = vec![
        qeq("f(x)", "z", Ext::ratio(3, 10).unwrap()),
        qeq("f(x)", "f(y)", Ext::ratio(1, 5).unwrap()),
        qeq("x", "x", Ext::zero()),
        qeq("f(f(x))", "f(f(y))", Ext::ratio(1, 2).unwrap()),
    ];
    for goal in &goals {
        match quantalg::quant_entails(&sig, &gamma, goal, 2, &limits).unwrap() {
            quantalg::QuantVerdict::Proved(p) => {
                assert!(quantalg::check_quant_proof(&sig, &p, &gamma).unwrap());
                assert_eq!(&p.conclusion, goal);
            }
            quantalg::QuantVerdict::BoundWitness(b) => {
                assert!(b > goal.epsilon);
            }
            quantalg::QuantVerdict::Unknown => {}
        }
    }
}

// ---------------------------------------------------------------------------
// hsp certificates are checkable artifacts

#[test]
fn hsp_certificates_check_out() {
    let limits = Limits::default();
    let corpus = common::binary_corpus();
    for a in &corpus {
        for b in &corpus {
            match variety::hsp_member(b, a, &limits).unwrap() {
                HspOutcome::Member { free, surjection } => {
                    assert!(finalg::is_homomorphism(&surjection, &free.algebra, b).unwrap());
                    let mut hit = vec![false; b.size()];
                    for &v in &surjection {
                        hit[v] = true;
                    }
                    assert!(hit.into_iter().all(|h| h), "certificate not onto");
                }
                HspOutcome::NonMember { equation, witness } => {
                    assert!(variety::satisfies_equation(a, &equation).unwrap().holds());
                    let l = evaluate(&equation.lhs, b, &witness).unwrap();
                    let r = evaluate(&equation.rhs, b, &witness).unwrap();
                    assert_ne!(l, r);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// stable preorders from scratch

#[test]
fn stable_preorder_brute_force_on_two_points() {
    // 2-element meet semilattice: compare the generated preorder against
    // brute force over all 16 relations
    let a = ordered_corpus().remove(0);
    let generated = ordalg::stable_preorder_generated(&a, &[(1, 0)]).unwrap();
    let mut best: Option<Vec<(usize, usize)>> = None;
    for mask in 0..16u32 {
        let pairs: Vec<(usize, usize)> = (0..4)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| (i / 2, i % 2))
            .collect();
        let rel = match Relation::from_pairs(2, &pairs) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if !rel.holds(1, 0) || !rel.contains(a.leq()) {
            continue;
        }
        if StablePreorder::new(&a, rel.clone()).is_err() {
            continue;
        }
        let count = rel.pairs().len();
        if best.as_ref().is_none_or(|b| count < b.len()) {
            best = Some(rel.pairs());
        }
    }
    assert_eq!(generated.rel().pairs(), best.unwrap());
}
