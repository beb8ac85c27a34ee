use std::collections::{BTreeMap, BTreeSet};

use super::vars::free_vars;
use super::{Formula, SyntaxError};

/// Depth of each occurrence of `#hole`, left to right. The depth of an
/// occurrence is the number of boxes enclosing it.
pub fn occurrence_depths(f: &Formula, hole: &str) -> Vec<usize> {
    fn go(f: &Formula, hole: &str, d: usize, out: &mut Vec<usize>) {
        match f {
            Formula::Prop(q) if q == hole => out.push(d),
            Formula::Top | Formula::Bottom | Formula::Atom { .. } | Formula::Prop(_) => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => go(a, hole, d, out),
            Formula::Box(a) => go(a, hole, d + 1, out),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                go(a, hole, d, out);
                go(b, hole, d, out);
            }
        }
    }
    let mut out = Vec::new();
    go(f, hole, 0, &mut out);
    out
}

/// Every occurrence of `#hole` lies under at least one box.
pub fn is_modalized(f: &Formula, hole: &str) -> bool {
    occurrence_depths(f, hole).iter().all(|&d| d >= 1)
}

/// Replaces each boxed subformula of depth `n` by `true`.
pub fn truncate(f: &Formula, n: usize) -> Formula {
    fn go(f: &Formula, n: usize, d: usize) -> Formula {
        match f {
            Formula::Box(_) if d == n => Formula::Top,
            Formula::Box(a) => Formula::boxed(go(a, n, d + 1)),
            Formula::Top | Formula::Bottom | Formula::Atom { .. } | Formula::Prop(_) => f.clone(),
            Formula::Not(a) => Formula::not(go(a, n, d)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), go(a, n, d)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), go(a, n, d)),
            Formula::Implies(a, b) => Formula::implies(go(a, n, d), go(b, n, d)),
            Formula::And(a, b) => Formula::and(go(a, n, d), go(b, n, d)),
            Formula::Or(a, b) => Formula::or(go(a, n, d), go(b, n, d)),
        }
    }
    go(f, n, 0)
}

type Substitute<'s> = Option<(&'s Formula, &'s BTreeSet<String>)>;

/// Generic substitution for propositional variables. `pick` chooses the
/// substitute (with its free variables) for an occurrence of the given name
/// at the given depth; `None` leaves the occurrence alone.
fn substitute<'s>(
    f: &Formula,
    pick: &mut dyn FnMut(&str, usize) -> Result<Substitute<'s>, SyntaxError>,
) -> Result<Formula, SyntaxError> {
    fn go<'s>(
        f: &Formula,
        d: usize,
        scope: &mut Vec<String>,
        pick: &mut dyn FnMut(&str, usize) -> Result<Substitute<'s>, SyntaxError>,
    ) -> Result<Formula, SyntaxError> {
        Ok(match f {
            Formula::Prop(q) => match pick(q, d)? {
                None => f.clone(),
                Some((b, free)) => {
                    if let Some(v) = free.iter().find(|v| scope.contains(v)) {
                        return Err(SyntaxError::Capture { var: v.clone() });
                    }
                    b.clone()
                }
            },
            Formula::Top | Formula::Bottom | Formula::Atom { .. } => f.clone(),
            Formula::Not(a) => Formula::not(go(a, d, scope, pick)?),
            Formula::Box(a) => Formula::boxed(go(a, d + 1, scope, pick)?),
            Formula::Implies(a, b) => Formula::implies(go(a, d, scope, pick)?, go(b, d, scope, pick)?),
            Formula::And(a, b) => Formula::and(go(a, d, scope, pick)?, go(b, d, scope, pick)?),
            Formula::Or(a, b) => Formula::or(go(a, d, scope, pick)?, go(b, d, scope, pick)?),
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                scope.push(v.clone());
                let body = go(a, d, scope, pick);
                scope.pop();
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v.clone(), body?)
                } else {
                    Formula::exists(v.clone(), body?)
                }
            }
        })
    }
    go(f, 0, &mut Vec::new(), pick)
}

/// `f[subs[0], ..., subs[n]]`: each occurrence of `#hole` at depth `i` is
/// replaced by `subs[i]`.
///
/// Errors with `DepthOverflow` if some occurrence is deeper than
/// `subs.len() - 1`, and with `Capture` if a substitute would land under a
/// quantifier binding one of its free variables.
pub fn subst_at_depths(f: &Formula, hole: &str, subs: &[Formula]) -> Result<Formula, SyntaxError> {
    let free: Vec<_> = subs.iter().map(free_vars).collect();
    substitute(f, &mut |q, d| {
        if q != hole {
            return Ok(None);
        }
        match subs.get(d) {
            Some(b) => Ok(Some((b, &free[d]))),
            None => Err(SyntaxError::DepthOverflow { hole: hole.to_string(), depth: d, available: subs.len() }),
        }
    })
}

/// Uniform substitution `f(b)` of `b` for every occurrence of `#hole`.
pub fn subst_prop(f: &Formula, hole: &str, b: &Formula) -> Result<Formula, SyntaxError> {
    let free = free_vars(b);
    substitute(f, &mut |q, _| Ok((q == hole).then_some((b, &free))))
}

/// Simultaneous uniform substitution for several propositional variables.
pub fn subst_props(f: &Formula, subs: &BTreeMap<String, Formula>) -> Result<Formula, SyntaxError> {
    let prepared: BTreeMap<&str, (&Formula, BTreeSet<String>)> =
        subs.iter().map(|(k, v)| (k.as_str(), (v, free_vars(v)))).collect();
    substitute(f, &mut |q, _| Ok(prepared.get(q).map(|(b, free)| (*b, free))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_inferring;

    fn p(s: &str) -> Formula {
        parse_inferring(s).unwrap().0
    }

    const WORKED: &str = "box (#p -> forall u. (Q(u) -> box #p))";

    #[test]
    fn depths() {
        assert_eq!(occurrence_depths(&p(WORKED), "p"), vec![1, 2]);
        assert_eq!(occurrence_depths(&p("#p"), "p"), vec![0]);
        assert_eq!(occurrence_depths(&p("forall u. box (#p -> P(u))"), "p"), vec![1]);
        assert_eq!(occurrence_depths(&p("box #q & #p"), "q"), vec![1]);
    }

    #[test]
    fn modalized() {
        assert!(is_modalized(&p("forall u. box (#p -> P(u))"), "p"));
        assert!(!is_modalized(&p("#p -> box #p"), "p"));
        assert!(is_modalized(&p("Q(u)"), "p"));
    }

    #[test]
    fn truncations_of_worked_example() {
        let a = p(WORKED);
        assert_eq!(truncate(&a, 0), Formula::Top);
        assert_eq!(truncate(&a, 1), p("box (#p -> forall u. (Q(u) -> true))"));
        assert_eq!(truncate(&a, 2), a);
        assert_eq!(truncate(&a, 7), a);
        assert_eq!(truncate(&p("~box #p & P(u)"), 0), p("~true & P(u)"));
    }

    #[test]
    fn depth_substitution() {
        let a = p(WORKED);
        let b = [p("B0"), p("B1"), p("B2")];
        assert_eq!(subst_at_depths(&a, "p", &b).unwrap(), p("box (B1 -> forall u. (Q(u) -> box B2))"));
        assert_eq!(subst_at_depths(&p("#p"), "p", &[Formula::Top]).unwrap(), Formula::Top);
        assert_eq!(subst_at_depths(&p("box #p"), "p", &[Formula::Bottom, Formula::Top]).unwrap(), p("box true"));
    }

    #[test]
    fn depth_overflow() {
        let err = subst_at_depths(&p(WORKED), "p", &[Formula::Top, Formula::Top]).unwrap_err();
        assert_eq!(err, SyntaxError::DepthOverflow { hole: "p".into(), depth: 2, available: 2 });
    }

    #[test]
    fn capture_detected() {
        let err = subst_at_depths(&p(WORKED), "p", &[p("Q(u)"), p("Q(u)"), p("Q(u)")]);
        assert_eq!(err, Err(SyntaxError::Capture { var: "u".into() }));
        // the depth-1 occurrence is outside the quantifier
        assert!(subst_at_depths(&p(WORKED), "p", &[Formula::Top, p("Q(u)"), Formula::Top]).is_ok());
        assert_eq!(
            subst_prop(&p("forall u. box (#p -> P(u))"), "p", &p("P(u)")),
            Err(SyntaxError::Capture { var: "u".into() })
        );
    }

    #[test]
    fn uniform_substitution() {
        assert_eq!(
            subst_prop(&p("forall u. box (#p -> P(u))"), "p", &Formula::Top).unwrap(),
            p("forall u. box (true -> P(u))")
        );
        assert_eq!(subst_prop(&p("#p"), "p", &p("box false")).unwrap(), p("box false"));
        assert_eq!(subst_prop(&p(WORKED), "p", &p("Q(v)")).unwrap(), p("box (Q(v) -> forall u. (Q(u) -> box Q(v)))"));
        assert_eq!(subst_prop(&p("#q & #p"), "p", &Formula::Top).unwrap(), p("#q & true"));
    }

    #[test]
    fn simultaneous_substitution() {
        let subs: BTreeMap<String, Formula> =
            [("p".to_string(), p("#q")), ("q".to_string(), p("box #p"))].into_iter().collect();
        assert_eq!(subst_props(&p("#p -> #q"), &subs).unwrap(), p("#q -> box #p"));
    }
}
