mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use qfix::kripke::{random_model, truth_by_world, ModelGenSpec};
use qfix::syntax::{
    free_and_bound_vars, is_modalized, is_sigma, normalize_variables, occurrence_depths, parse_inferring,
    subst_at_depths, subst_prop, truncate, universal_closure, FixpointTarget, Formula, PredicateSignature,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn print_parse_round_trip(f in common::formula()) {
        let text = f.to_string();
        let (back, _) = parse_inferring(&text).unwrap();
        prop_assert_eq!(back, f, "{}", text);
    }

    #[test]
    fn truncation_bounds_depths(f in common::formula(), n in 0usize..5) {
        prop_assert!(occurrence_depths(&truncate(&f, n), "p").iter().all(|&d| d <= n));
    }

    #[test]
    fn truncation_is_monotone(f in common::formula(), n in 0usize..4, extra in 0usize..3) {
        let m = n + extra;
        prop_assert_eq!(truncate(&truncate(&f, m), n), truncate(&f, n));
    }

    #[test]
    fn truncation_commutes_with_box_free_substitution(
        f in common::formula(),
        n in 0usize..4,
        extra in 0usize..3,
        subs in prop::collection::vec(common::box_free_formula(), 7),
    ) {
        let m = n + extra;
        // closed substitutes cannot be captured
        let f = truncate(&f, m);
        let subs: Vec<Formula> = subs[..=m].iter().map(universal_closure).collect();
        let lhs = truncate(&subst_at_depths(&f, "p", &subs).unwrap(), n);
        let rhs = subst_at_depths(&truncate(&f, n), "p", &subs[..=n]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn modalized_iff_all_depths_positive(f in common::formula()) {
        let depths = occurrence_depths(&f, "p");
        prop_assert_eq!(is_modalized(&f, "p"), depths.iter().all(|&d| d >= 1));
    }

    #[test]
    fn sigma_closed_under_substitution(s in common::sigma_formula(), b in common::formula()) {
        prop_assert!(is_sigma(&s));
        let b = universal_closure(&b);
        prop_assert!(is_sigma(&subst_prop(&s, "p", &b).unwrap()));
    }

    #[test]
    fn normalization_separates_and_preserves_truth(f in common::plain_formula(), seed in 0u64..1000) {
        let t = normalize_variables(&FixpointTarget::new(f.clone(), "p"));
        prop_assert!(free_and_bound_vars(&t.formula).is_disjoint());
        prop_assert_eq!(free_and_bound_vars(&t.formula).free, free_and_bound_vars(&f).free);
        let sig = PredicateSignature::of_formula(&f).unwrap();
        let spec = ModelGenSpec { signature: sig, seed, ..ModelGenSpec::default() };
        let m = random_model(&spec).unwrap();
        prop_assert_eq!(truth_by_world(&m, &f).unwrap(), truth_by_world(&m, &t.formula).unwrap());
    }

    #[test]
    fn normalization_is_idempotent(f in common::formula()) {
        let once = normalize_variables(&FixpointTarget::new(f, "p"));
        prop_assert_eq!(normalize_variables(&once), once.clone());
    }
}

#[test]
fn boxed_substitutes_break_syntactic_commutation() {
    let a = Formula::boxed(Formula::prop("p"));
    let x = Formula::atom("S", Vec::<String>::new());
    let subs = [Formula::Top, Formula::box_n(2, x), Formula::Top];
    let lhs = truncate(&subst_at_depths(&a, "p", &subs).unwrap(), 2);
    let rhs = subst_at_depths(&truncate(&a, 2), "p", &subs).unwrap();
    assert_eq!(lhs, Formula::box_n(2, Formula::Top));
    assert_eq!(rhs, Formula::box_n(3, Formula::atom("S", Vec::<String>::new())));
    assert_ne!(lhs, rhs);
}

#[test]
fn reference_examples() {
    let f = |s: &str| parse_inferring(s).unwrap().0;
    let worked = f("box (#p -> forall u. (Q(u) -> box #p))");
    assert_eq!(occurrence_depths(&worked, "p"), vec![1, 2]);
    assert_eq!(truncate(&worked, 0), Formula::Top);
    assert_eq!(truncate(&worked, 1), f("box (#p -> forall u. (Q(u) -> true))"));
    assert_eq!(truncate(&worked, 2), worked);
    let b: Vec<Formula> = ["B0", "B1", "B2"].iter().map(|n| Formula::atom(*n, Vec::<String>::new())).collect();
    assert_eq!(subst_at_depths(&worked, "p", &b).unwrap(), f("box (B1 -> forall u. (Q(u) -> box B2))"));
    let vs = free_and_bound_vars(&f("forall u. Q(u) & Q(u)"));
    assert_eq!(vs.free, BTreeSet::from(["u".to_string()]));
    assert_eq!(vs.bound, BTreeSet::from(["u".to_string()]));
}
