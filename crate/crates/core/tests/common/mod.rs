#![allow(dead_code)]

use proptest::prelude::*;
use qfix::syntax::{Formula, Term};

const VARS: [&str; 3] = ["u", "v", "w"];

fn var() -> impl Strategy<Value = String> {
    prop::sample::select(&VARS[..]).prop_map(str::to_string)
}

fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        var().prop_map(|v| Formula::atom("P", [v])),
        var().prop_map(|v| Formula::atom("Q", [v])),
        (var(), var()).prop_map(|(a, b)| Formula::atom_terms("R", vec![Term::Var(a), Term::Var(b)])),
        Just(Formula::atom("S", Vec::<String>::new())),
    ]
}

/// Formulas over `P/1, Q/1, R/2, S/0`, with the props in `props` as extra
/// leaves.
pub fn formula_with(props: &'static [&'static str], depth: u32) -> BoxedStrategy<Formula> {
    let mut leaves: Vec<BoxedStrategy<Formula>> =
        vec![Just(Formula::Top).boxed(), Just(Formula::Bottom).boxed(), atom().boxed(), atom().boxed()];
    for p in props {
        leaves.push(Just(Formula::prop(*p)).boxed());
    }
    let leaf = prop::strategy::Union::new(leaves);
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (var(), inner.clone()).prop_map(|(v, a)| Formula::forall(v, a)),
            (var(), inner.clone()).prop_map(|(v, a)| Formula::exists(v, a)),
            inner.clone().prop_map(Formula::boxed),
            inner.prop_map(Formula::boxed),
        ]
    })
    .boxed()
}

pub fn formula() -> BoxedStrategy<Formula> {
    formula_with(&["p", "s"], 5)
}

pub fn plain_formula() -> BoxedStrategy<Formula> {
    formula_with(&[], 4)
}

/// Σ-formulas built from boxed formulas by `&`, `|` and `exists`.
pub fn sigma_formula() -> BoxedStrategy<Formula> {
    formula_with(&["p"], 3)
        .prop_map(Formula::boxed)
        .prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (var(), inner).prop_map(|(v, a)| Formula::exists(v, a)),
            ]
        })
        .boxed()
}

/// Box-free formulas, usable as substitutes that truncation cannot reach.
pub fn box_free_formula() -> BoxedStrategy<Formula> {
    atom()
        .prop_recursive(2, 8, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (var(), inner).prop_map(|(v, a)| Formula::forall(v, a)),
            ]
        })
        .boxed()
}
