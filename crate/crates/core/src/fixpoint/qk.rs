use super::{check_normalized, FixpointError};
use crate::report::Report;
use crate::syntax::{is_modalized, subst_at_depths, truncate, FixpointTarget, Formula, SyntaxError};

/// The stages `A_0, ..., A_n` and the truncations they were built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixpointTrace {
    pub target: FixpointTarget,
    pub n: usize,
    /// `truncations[k]` is `A^{⊤(k)}`.
    pub truncations: Vec<Formula>,
    pub stages: Vec<Formula>,
    /// `stages[n]`
    pub result: Formula,
    /// The hole does not occur, so the input is its own fixed point and
    /// every stage equals it.
    pub degenerate: bool,
}

impl FixpointTrace {
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.push("logic", "qk-bot")
            .push("target", &self.target.formula)
            .push("hole", &self.target.hole)
            .push("n", self.n);
        if self.degenerate {
            r.push("degenerate", "hole does not occur");
        }
        for (k, (t, s)) in self.truncations.iter().zip(&self.stages).enumerate() {
            r.push(format!("truncation.{k}"), t);
            r.push(format!("stage.{k}"), s);
        }
        r.push("result", &self.result);
        r
    }
}

/// Computes `A_0, ..., A_n` for a modalized, normalized target:
/// `A_0 = A^{⊤(0)}[⊤]` and `A_{k+1} = A^{⊤(k+1)}[⊤, A_k, ..., A_0]`.
pub fn fixpoint_qk(t: &FixpointTarget, n: usize) -> Result<FixpointTrace, FixpointError> {
    if !is_modalized(&t.formula, &t.hole) {
        return Err(FixpointError::NotModalized { hole: t.hole.clone() });
    }
    check_normalized(&t.formula)?;
    let truncations: Vec<Formula> = (0..=n).map(|k| truncate(&t.formula, k)).collect();
    if !t.formula.contains_prop(&t.hole) {
        let stages = vec![t.formula.clone(); n + 1];
        return Ok(FixpointTrace {
            target: t.clone(),
            n,
            truncations,
            result: t.formula.clone(),
            stages,
            degenerate: true,
        });
    }
    let mut stages: Vec<Formula> = Vec::with_capacity(n + 1);
    for trunc in &truncations {
        let subs: Vec<Formula> = std::iter::once(Formula::Top).chain(stages.iter().rev().cloned()).collect();
        stages.push(subst_at_depths(trunc, &t.hole, &subs)?);
    }
    Ok(FixpointTrace { target: t.clone(), n, truncations, result: stages[n].clone(), stages, degenerate: false })
}

/// `B^n = B^{⊤(n)}[A_n, ..., A_0]`, where `n + 1 == stages.len()`.
pub fn b_n_transform(b: &Formula, hole: &str, stages: &[Formula]) -> Result<Formula, SyntaxError> {
    let n = stages.len().checked_sub(1).expect("at least one stage");
    let subs: Vec<Formula> = stages.iter().rev().cloned().collect();
    subst_at_depths(&truncate(b, n), hole, &subs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_inferring;

    fn f(s: &str) -> Formula {
        parse_inferring(s).unwrap().0
    }

    fn target(s: &str) -> FixpointTarget {
        FixpointTarget::new(f(s), "p")
    }

    const WORKED: &str = "box (#p -> forall u. (Q(u) -> box #p))";

    #[test]
    fn worked_example_stages() {
        let tr = fixpoint_qk(&target(WORKED), 3).unwrap();
        assert_eq!(tr.stages[0], Formula::Top);
        assert_eq!(tr.stages[1], f("box (true -> forall u. (Q(u) -> true))"));
        assert_eq!(tr.truncations[2], f(WORKED));
        assert_eq!(tr.stages[2], f("box (box (true -> forall u. (Q(u) -> true)) -> forall u. (Q(u) -> box true))"));
        assert_eq!(tr.result, tr.stages[3]);
        assert!(!tr.result.contains_prop("p"));
        assert!(!tr.degenerate);
    }

    #[test]
    fn negated_box() {
        let tr = fixpoint_qk(&target("~box #p"), 1).unwrap();
        assert_eq!(tr.stages[0], f("~true"));
        assert_eq!(tr.result, f("~box ~true"));
    }

    #[test]
    fn preconditions() {
        assert_eq!(fixpoint_qk(&target("#p -> box #p"), 1).unwrap_err().code(), "not-modalized");
        let e = fixpoint_qk(&target("box #p & forall u. Q(u) & Q(u)"), 1).unwrap_err();
        assert_eq!(e.code(), "not-normalized");
    }

    #[test]
    fn degenerate_input() {
        let tr = fixpoint_qk(&target("box Q(u)"), 2).unwrap();
        assert!(tr.degenerate);
        assert_eq!(tr.result, f("box Q(u)"));
        assert!(tr.stages.iter().all(|s| *s == tr.result));
    }

    #[test]
    fn b_n_examples() {
        let stages = fixpoint_qk(&target(WORKED), 1).unwrap().stages;
        assert_eq!(b_n_transform(&f("#p"), "p", &stages).unwrap(), stages[1]);
        assert_eq!(b_n_transform(&f("box false"), "p", &stages).unwrap(), f("box false"));
        assert_eq!(b_n_transform(&f("box #p"), "p", &stages[..1]).unwrap(), Formula::Top);
        assert_eq!(b_n_transform(&f("box #p"), "p", &stages).unwrap(), f("box true"));
    }

    #[test]
    fn report_lines() {
        let r = fixpoint_qk(&target("~box #p"), 1).unwrap().report();
        assert_eq!(r.get("stage.1"), Some("~box ~true"));
        assert_eq!(r.get("result"), Some("~box ~true"));
        assert_eq!(r.get("truncation.0"), Some("~true"));
    }
}
