use std::collections::{BTreeMap, BTreeSet};

use super::{FixpointTarget, Formula, Term};

/// Free and bound individual variables of a formula. A variable is bound
/// when some quantifier in the formula binds it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableSets {
    pub free: BTreeSet<String>,
    pub bound: BTreeSet<String>,
}

impl VariableSets {
    pub fn is_disjoint(&self) -> bool {
        self.free.is_disjoint(&self.bound)
    }
}

pub fn free_and_bound_vars(f: &Formula) -> VariableSets {
    fn go(f: &Formula, scope: &mut Vec<String>, out: &mut VariableSets) {
        match f {
            Formula::Top | Formula::Bottom | Formula::Prop(_) => {}
            Formula::Atom { args, .. } => {
                for a in args {
                    if let Term::Var(v) = a {
                        if !scope.contains(v) {
                            out.free.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Not(a) | Formula::Box(a) => go(a, scope, out),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                go(a, scope, out);
                go(b, scope, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                out.bound.insert(v.clone());
                scope.push(v.clone());
                go(a, scope, out);
                scope.pop();
            }
        }
    }
    let mut out = VariableSets::default();
    go(f, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn free_vars(f: &Formula) -> BTreeSet<String> {
    free_and_bound_vars(f).free
}

/// Renames every quantifier whose variable also occurs free, so that the
/// free and bound variable sets become disjoint. Each clashing variable
/// gets the first of `u0, u1, ...` that occurs nowhere in the formula.
pub fn normalize_variables(t: &FixpointTarget) -> FixpointTarget {
    let sets = free_and_bound_vars(&t.formula);
    let clashing: Vec<&String> = sets.free.intersection(&sets.bound).collect();
    if clashing.is_empty() {
        return t.clone();
    }
    let used = t.formula.all_vars();
    let mut fresh = (0..).map(|i| format!("u{i}")).filter(|n| !used.contains(n));
    let renames: BTreeMap<String, String> = clashing.into_iter().map(|v| (v.clone(), fresh.next().unwrap())).collect();
    FixpointTarget { formula: rename_binders(&t.formula, &renames, &BTreeMap::new()), hole: t.hole.clone() }
}

fn rename_binders(f: &Formula, renames: &BTreeMap<String, String>, active: &BTreeMap<String, String>) -> Formula {
    let rec = |a: &Formula| Box::new(rename_binders(a, renames, active));
    match f {
        Formula::Top | Formula::Bottom | Formula::Prop(_) => f.clone(),
        Formula::Atom { pred, args } => Formula::Atom {
            pred: pred.clone(),
            args: args
                .iter()
                .map(|a| match a {
                    Term::Var(v) => Term::Var(active.get(v).unwrap_or(v).clone()),
                    c => c.clone(),
                })
                .collect(),
        },
        Formula::Not(a) => Formula::Not(rec(a)),
        Formula::Box(a) => Formula::Box(rec(a)),
        Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
        Formula::And(a, b) => Formula::And(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let mut inner = active.clone();
            let name = match renames.get(v) {
                Some(new) => {
                    inner.insert(v.clone(), new.clone());
                    new.clone()
                }
                None => {
                    inner.remove(v);
                    v.clone()
                }
            };
            let body = Box::new(rename_binders(a, renames, &inner));
            if matches!(f, Formula::Forall(..)) {
                Formula::Forall(name, body)
            } else {
                Formula::Exists(name, body)
            }
        }
    }
}

/// Prefixes universal quantifiers over the free variables, outermost first
/// in name order.
pub fn universal_closure(f: &Formula) -> Formula {
    free_vars(f).into_iter().rev().fold(f.clone(), |acc, v| Formula::forall(v, acc))
}
