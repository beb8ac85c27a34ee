use std::collections::{BTreeMap, BTreeSet};

use super::{subst_props, FixpointTarget, Formula, SyntaxError};

/// Σ-formulas: boxed formulas closed under `&`, `|` and `exists`.
pub fn is_sigma(f: &Formula) -> bool {
    match f {
        Formula::Box(_) => true,
        Formula::And(a, b) | Formula::Or(a, b) => is_sigma(a) && is_sigma(b),
        Formula::Exists(_, a) => is_sigma(a),
        _ => false,
    }
}

/// `A(p) == skeleton[q_i := sigmas[i], r_j := rest[j]]`, where the skeleton
/// is built from `~ -> & |` over fresh propositional variables, every
/// `sigmas[i]` is a maximal Σ-subformula containing the hole and no
/// `rest[j]` contains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanSigmaDecomposition {
    pub skeleton: Formula,
    pub sigma_vars: Vec<String>,
    pub sigmas: Vec<Formula>,
    pub rest_vars: Vec<String>,
    pub rest: Vec<Formula>,
}

impl BooleanSigmaDecomposition {
    pub fn recompose(&self) -> Formula {
        subst_props(&self.skeleton, &self.assignment()).expect("skeleton binds no variables")
    }

    /// Skeleton variable to the formula it stands for.
    pub fn assignment(&self) -> BTreeMap<String, Formula> {
        self.sigma_vars
            .iter()
            .cloned()
            .zip(self.sigmas.iter().cloned())
            .chain(self.rest_vars.iter().cloned().zip(self.rest.iter().cloned()))
            .collect()
    }
}

struct FreshNames {
    used: BTreeSet<String>,
}

impl FreshNames {
    fn next(&mut self, prefix: &str) -> String {
        let name = (0..).map(|i| format!("{prefix}{i}")).find(|n| !self.used.contains(n)).unwrap();
        self.used.insert(name.clone());
        name
    }
}

/// Splits `t.formula` into a propositional skeleton over Σ-formulas that
/// contain the hole and hole-free formulas, scanning top-down and taking
/// the largest Σ-subformula available.
pub fn decompose_boolean_sigma(t: &FixpointTarget) -> Result<BooleanSigmaDecomposition, SyntaxError> {
    let mut used = t.formula.props();
    used.insert(t.hole.clone());
    let mut names = FreshNames { used };
    let mut out = BooleanSigmaDecomposition {
        skeleton: Formula::Top,
        sigma_vars: Vec::new(),
        sigmas: Vec::new(),
        rest_vars: Vec::new(),
        rest: Vec::new(),
    };
    out.skeleton = split(&t.formula, &t.hole, &mut names, &mut out)?;
    Ok(out)
}

fn split(
    f: &Formula,
    hole: &str,
    names: &mut FreshNames,
    out: &mut BooleanSigmaDecomposition,
) -> Result<Formula, SyntaxError> {
    if !f.contains_prop(hole) {
        let r = names.next("r");
        out.rest_vars.push(r.clone());
        out.rest.push(f.clone());
        return Ok(Formula::Prop(r));
    }
    if is_sigma(f) {
        let q = names.next("q");
        out.sigma_vars.push(q.clone());
        out.sigmas.push(f.clone());
        return Ok(Formula::Prop(q));
    }
    Ok(match f {
        Formula::Not(a) => Formula::not(split(a, hole, names, out)?),
        Formula::Implies(a, b) => {
            let a = split(a, hole, names, out)?;
            Formula::implies(a, split(b, hole, names, out)?)
        }
        Formula::And(a, b) => {
            let a = split(a, hole, names, out)?;
            Formula::and(a, split(b, hole, names, out)?)
        }
        Formula::Or(a, b) => {
            let a = split(a, hole, names, out)?;
            Formula::or(a, split(b, hole, names, out)?)
        }
        _ => return Err(SyntaxError::NotDecomposable { hole: hole.to_string(), subformula: f.to_string() }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_inferring;

    fn p(s: &str) -> Formula {
        parse_inferring(s).unwrap().0
    }

    #[test]
    fn sigma_recognition() {
        assert!(is_sigma(&p("box P(u)")));
        assert!(is_sigma(&p("exists u. (box P(u) & box Q(u))")));
        assert!(is_sigma(&p("box #p | exists v. box ~#p")));
        assert!(!is_sigma(&p("P(u)")));
        assert!(!is_sigma(&p("~box P(u)")));
        assert!(!is_sigma(&p("forall u. box P(u)")));
        assert!(!is_sigma(&p("box P(u) & P(u)")));
    }

    fn decomp(s: &str) -> Result<BooleanSigmaDecomposition, SyntaxError> {
        decompose_boolean_sigma(&FixpointTarget::new(p(s), "p"))
    }

    #[test]
    fn negated_box() {
        let d = decomp("~box #p").unwrap();
        assert_eq!(d.skeleton, p("~#q0"));
        assert_eq!(d.sigmas, vec![p("box #p")]);
        assert!(d.rest.is_empty());
    }

    #[test]
    fn implication_of_two_sigmas() {
        let d = decomp("box #p -> box ~#p").unwrap();
        assert_eq!(d.skeleton, p("#q0 -> #q1"));
        assert_eq!(d.sigmas, vec![p("box #p"), p("box ~#p")]);
    }

    #[test]
    fn maximal_sigma_and_rest() {
        let d = decomp("(box #p & box ~#p) | ~P(u) -> box Q(u)").unwrap();
        assert_eq!(d.skeleton, p("#q0 | #r0 -> #r1"));
        assert_eq!(d.sigmas, vec![p("box #p & box ~#p")]);
        assert_eq!(d.rest, vec![p("~P(u)"), p("box Q(u)")]);
        assert_eq!(d.recompose(), p("(box #p & box ~#p) | ~P(u) -> box Q(u)"));
    }

    #[test]
    fn fresh_names_avoid_existing_props() {
        let d = decomp("box (#p & #q0) -> #r0").unwrap();
        assert_eq!(d.skeleton, p("#q1 -> #r1"));
        assert_eq!(d.recompose(), p("box (#p & #q0) -> #r0"));
    }

    #[test]
    fn not_decomposable() {
        for bad in ["forall u. box (#p -> P(u))", "#p", "box #p & #p", "exists u. (box #p & P(u))"] {
            assert!(matches!(decomp(bad), Err(SyntaxError::NotDecomposable { .. })), "{bad}");
        }
    }
}
