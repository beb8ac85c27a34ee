use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{check_normalized, FixpointError};
use crate::report::Report;
use crate::syntax::{decompose_boolean_sigma, is_sigma, subst_prop, subst_props, FixpointTarget, Formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `□B(p)` has the fixed point `□B(⊤)`.
    BoxBase,
    And,
    Or,
    Exists(String),
    /// Solving one equation of a system, the remaining holes as parameters.
    Solve {
        var: String,
    },
    /// A system of two or more equations, shown as `p_i <-> S_i` conjuncts.
    System {
        vars: Vec<String>,
    },
    /// Plugging the parametric solutions of the first equations into the last.
    Eliminate {
        var: String,
    },
    /// Replacing the last variable by its solution in an earlier one.
    BackSubstitute {
        var: String,
    },
    /// Building the Σ-system from a Boolean skeleton and reassembling.
    BooleanAssembly {
        skeleton: Formula,
    },
    /// The hole does not occur.
    Degenerate,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::BoxBase => f.write_str("box-base"),
            Rule::And => f.write_str("and"),
            Rule::Or => f.write_str("or"),
            Rule::Exists(v) => write!(f, "exists {v}"),
            Rule::Solve { var } => write!(f, "solve #{var}"),
            Rule::System { vars } => write!(f, "system #{}", vars.join(" #")),
            Rule::Eliminate { var } => write!(f, "eliminate into #{var}"),
            Rule::BackSubstitute { var } => write!(f, "back-substitute #{var}"),
            Rule::BooleanAssembly { skeleton } => write!(f, "boolean skeleton {skeleton}"),
            Rule::Degenerate => f.write_str("degenerate"),
        }
    }
}

/// One construction step: `input` was turned into `result` by `rule`, using
/// the sub-derivations in `children`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub input: Formula,
    pub result: Formula,
    pub children: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: Rule, input: Formula, result: Formula) -> Self {
        Self { rule, input, result, children: Vec::new() }
    }

    /// Steps in pre-order, keyed by their path (`step`, `step.0`, ...).
    pub fn report(&self, prefix: &str) -> Report {
        let mut r = Report::new();
        r.push(prefix, format!("{} | {} => {}", self.rule, self.input, self.result));
        for (i, c) in self.children.iter().enumerate() {
            r.extend(c.report(&format!("{prefix}.{i}")));
        }
        r
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Derivation::depth).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaFixpointResult {
    pub input: Formula,
    pub hole: String,
    pub result: Formula,
    pub derivation: Derivation,
}

impl SigmaFixpointResult {
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.push("logic", "qgl-sigma").push("target", &self.input).push("hole", &self.hole).push("result", &self.result);
        r.extend(self.derivation.report("step"));
        r
    }
}

/// Solutions `F_0, ..., F_n` of a system `p_i = S_i(p_0, ..., p_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimultaneousResult {
    pub vars: Vec<String>,
    pub fixpoints: Vec<Formula>,
    pub derivation: Derivation,
}

fn sigma_rec(f: &Formula, hole: &str) -> Result<Derivation, FixpointError> {
    Ok(match f {
        Formula::Box(_) => Derivation::leaf(Rule::BoxBase, f.clone(), subst_prop(f, hole, &Formula::Top)?),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (da, db) = (sigma_rec(a, hole)?, sigma_rec(b, hole)?);
            let (rule, result) = if matches!(f, Formula::And(..)) {
                (Rule::And, Formula::and(da.result.clone(), db.result.clone()))
            } else {
                (Rule::Or, Formula::or(da.result.clone(), db.result.clone()))
            };
            Derivation { rule, input: f.clone(), result, children: vec![da, db] }
        }
        Formula::Exists(v, a) => {
            let da = sigma_rec(a, hole)?;
            Derivation {
                rule: Rule::Exists(v.clone()),
                input: f.clone(),
                result: Formula::exists(v.clone(), da.result.clone()),
                children: vec![da],
            }
        }
        _ => return Err(FixpointError::NotSigma { formula: f.to_string() }),
    })
}

/// A fixed point of a Σ-formula, by structural recursion: `□B(p)` gives
/// `□B(⊤)`, and `∧`, `∨`, `∃u` combine the fixed points of their parts.
pub fn sigma_fixpoint(s: &FixpointTarget) -> Result<SigmaFixpointResult, FixpointError> {
    if !is_sigma(&s.formula) {
        return Err(FixpointError::NotSigma { formula: s.formula.to_string() });
    }
    check_normalized(&s.formula)?;
    let derivation = sigma_rec(&s.formula, &s.hole)?;
    Ok(SigmaFixpointResult {
        input: s.formula.clone(),
        hole: s.hole.clone(),
        result: derivation.result.clone(),
        derivation,
    })
}

/// Solves `p_i = S_i(p_0, ..., p_n)` for Σ-formulas `S_i`: the first `n`
/// equations are solved with `p_n` as a parameter, the results plugged into
/// `S_n`, which is then solved alone, and the solution substituted back.
pub fn simultaneous_sigma_fixpoints(vars: &[String], sigmas: &[Formula]) -> Result<SimultaneousResult, FixpointError> {
    if vars.len() != sigmas.len() {
        return Err(FixpointError::VariableClash(format!("{} variables for {} equations", vars.len(), sigmas.len())));
    }
    if vars.is_empty() {
        return Err(FixpointError::VariableClash("empty system".into()));
    }
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(FixpointError::VariableClash(format!("#{v} names two equations")));
        }
    }
    for s in sigmas {
        if !is_sigma(s) {
            return Err(FixpointError::NotSigma { formula: s.to_string() });
        }
    }
    solve_system(vars, sigmas)
}

fn solve_system(vars: &[String], sigmas: &[Formula]) -> Result<SimultaneousResult, FixpointError> {
    let n = vars.len() - 1;
    let last = &vars[n];
    if n == 0 {
        let d = sigma_rec(&sigmas[0], last)?;
        let derivation = Derivation {
            rule: Rule::Solve { var: last.clone() },
            input: sigmas[0].clone(),
            result: d.result.clone(),
            children: vec![d],
        };
        return Ok(SimultaneousResult { vars: vars.to_vec(), fixpoints: vec![derivation.result.clone()], derivation });
    }
    let head = solve_system(&vars[..n], &sigmas[..n])?;
    let plug: BTreeMap<String, Formula> = vars[..n].iter().cloned().zip(head.fixpoints.iter().cloned()).collect();
    let eliminated = subst_props(&sigmas[n], &plug)?;
    let last_step = sigma_rec(&eliminated, last)?;
    let f_last = last_step.result.clone();
    let mut children = vec![
        head.derivation,
        Derivation {
            rule: Rule::Eliminate { var: last.clone() },
            input: sigmas[n].clone(),
            result: eliminated.clone(),
            children: Vec::new(),
        },
        Derivation {
            rule: Rule::Solve { var: last.clone() },
            input: eliminated,
            result: f_last.clone(),
            children: vec![last_step],
        },
    ];
    let mut fixpoints = Vec::with_capacity(n + 1);
    for (v, parametric) in vars[..n].iter().zip(&head.fixpoints) {
        let solved = subst_prop(parametric, last, &f_last)?;
        children.push(Derivation::leaf(Rule::BackSubstitute { var: v.clone() }, parametric.clone(), solved.clone()));
        fixpoints.push(solved);
    }
    fixpoints.push(f_last);
    let derivation = Derivation {
        rule: Rule::System { vars: vars.to_vec() },
        input: equations(vars, sigmas),
        result: equations(vars, &fixpoints),
        children,
    };
    Ok(SimultaneousResult { vars: vars.to_vec(), fixpoints, derivation })
}

/// `(p_0 <-> X_0) & ... & (p_n <-> X_n)`
fn equations(vars: &[String], xs: &[Formula]) -> Formula {
    let mut eqs = vars.iter().zip(xs).map(|(v, x)| Formula::iff(Formula::prop(v.clone()), x.clone()));
    let first = eqs.next().expect("nonempty system");
    eqs.fold(first, Formula::and)
}

/// A fixed point of a Boolean combination `B(S_0(p), ..., R_0, ...)` of
/// Σ-formulas containing the hole and hole-free formulas: solve
/// `q_i = S_i(B(q_0, ..., R_0, ...))` simultaneously and reassemble.
pub fn boolean_sigma_fixpoint(t: &FixpointTarget) -> Result<SigmaFixpointResult, FixpointError> {
    check_normalized(&t.formula)?;
    if !t.formula.contains_prop(&t.hole) {
        return Ok(SigmaFixpointResult {
            input: t.formula.clone(),
            hole: t.hole.clone(),
            result: t.formula.clone(),
            derivation: Derivation::leaf(Rule::Degenerate, t.formula.clone(), t.formula.clone()),
        });
    }
    let d = decompose_boolean_sigma(t)?;
    let rest: BTreeMap<String, Formula> = d.rest_vars.iter().cloned().zip(d.rest.iter().cloned()).collect();
    let b_q = subst_props(&d.skeleton, &rest)?;
    let system: Vec<Formula> = d.sigmas.iter().map(|s| subst_prop(s, &t.hole, &b_q)).collect::<Result<_, _>>()?;
    let solved = simultaneous_sigma_fixpoints(&d.sigma_vars, &system)?;
    let mut all = rest;
    all.extend(d.sigma_vars.iter().cloned().zip(solved.fixpoints.iter().cloned()));
    let result = subst_props(&d.skeleton, &all)?;
    Ok(SigmaFixpointResult {
        input: t.formula.clone(),
        hole: t.hole.clone(),
        result: result.clone(),
        derivation: Derivation {
            rule: Rule::BooleanAssembly { skeleton: d.skeleton },
            input: t.formula.clone(),
            result,
            children: vec![solved.derivation],
        },
    })
}
