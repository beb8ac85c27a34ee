//! Smoryński's model `M_S` and its finitizations `M_k`, and the search for
//! a world refuting a candidate fixed point of `∀u□(p → P(u))`.
//!
//! In `M_S` the worlds are the naturals, `m ≺ n` iff `n < m`, `D_n` is
//! `{m : m ≥ n}` and `n ⊩ P(m)` iff `m ≠ n + 1`. Parameters are numerals,
//! written as constants `'0`, `'1`, ...

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::kripke::{CompiledFormula, EvalError, KripkeModel, ModelBuilder};
use crate::report::Report;
use crate::syntax::{subst_prop, Formula, Term};

/// The predicate of `M_S`.
pub const PRED: &str = "P";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmorynskiError {
    #[error("parameter {param} is not in the domain of world {world}")]
    ParameterOutsideDomain { param: u64, world: u64 },
    #[error("`{0}` is not a numeral")]
    NotANumeral(String),
    #[error("only the unary predicate {PRED} is interpreted, found {pred}/{arity}")]
    ForeignPredicate { pred: String, arity: usize },
    #[error("propositional variable #{0} has no truth value")]
    PropositionalVariable(String),
    #[error("variable `{0}` is free and unbound")]
    UnboundVariable(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl SmorynskiError {
    pub fn code(&self) -> &'static str {
        match self {
            SmorynskiError::ParameterOutsideDomain { .. } => "parameter-outside-domain",
            SmorynskiError::NotANumeral(_) => "not-a-numeral",
            SmorynskiError::ForeignPredicate { .. } => "foreign-predicate",
            SmorynskiError::PropositionalVariable(_) => "propositional-variable",
            SmorynskiError::UnboundVariable(_) => "unbound-variable",
            SmorynskiError::Eval(e) => e.code(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MkSpec {
    pub k: usize,
}

/// `M_k`: worlds `0..=k`, `m ≺ n` iff `n < m`, `D_n = {n, ..., k+2}`, and
/// `n ⊩ P(m)` iff `m ≠ n + 1`.
pub fn build_mk(spec: MkSpec) -> KripkeModel {
    let k = spec.k;
    let mut b = ModelBuilder::new(k + 1);
    b.declare(PRED, 1);
    for m in 0..=k {
        for n in 0..m {
            b.edge(m, n);
        }
    }
    for n in 0..=k {
        let names: Vec<String> = (n..=k + 2).map(|c| c.to_string()).collect();
        b.domain(n, names.iter().map(String::as_str));
        for c in names.iter().filter(|c| **c != (n + 1).to_string()) {
            b.fact(n, PRED, [c.as_str()]);
        }
    }
    b.build()
}

/// Replaces the free occurrences of `var` in `f` by the numeral `value`.
pub fn instantiate(f: &Formula, var: &str, value: u64) -> Formula {
    let rec = |g: &Formula| instantiate(g, var, value);
    match f {
        Formula::Atom { pred, args } => Formula::atom_terms(
            pred.clone(),
            args.iter()
                .map(|t| match t {
                    Term::Var(v) if v == var => Term::constant(value.to_string()),
                    t => t.clone(),
                })
                .collect(),
        ),
        Formula::Not(a) => Formula::not(rec(a)),
        Formula::Implies(a, b) => Formula::implies(rec(a), rec(b)),
        Formula::And(a, b) => Formula::and(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::or(rec(a), rec(b)),
        Formula::Forall(v, _) | Formula::Exists(v, _) if v == var => f.clone(),
        Formula::Forall(v, a) => Formula::forall(v.clone(), rec(a)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), rec(a)),
        Formula::Box(a) => Formula::boxed(rec(a)),
        Formula::Top | Formula::Bottom | Formula::Prop(_) => f.clone(),
    }
}

/// Truth of a closed `P`-formula at world `n` of `M_S`.
///
/// A quantifier at world `n` is decided by the instances `n`, `n+1` and
/// `n+2`; every parameter at least `n+2` behaves like `n+2` there. A box at
/// `n` looks at the worlds `0..n`.
pub fn eval_ms(n: u64, f: &Formula) -> Result<bool, SmorynskiError> {
    eval_ms_env(n, f, &mut BTreeMap::new())
}

fn eval_ms_env(n: u64, f: &Formula, env: &mut BTreeMap<String, u64>) -> Result<bool, SmorynskiError> {
    Ok(match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Prop(p) => return Err(SmorynskiError::PropositionalVariable(p.clone())),
        Formula::Atom { pred, args } => {
            if pred != PRED || args.len() != 1 {
                return Err(SmorynskiError::ForeignPredicate { pred: pred.clone(), arity: args.len() });
            }
            let m = match &args[0] {
                Term::Var(v) => *env.get(v).ok_or_else(|| SmorynskiError::UnboundVariable(v.clone()))?,
                Term::Const(c) => c.parse().map_err(|_| SmorynskiError::NotANumeral(c.clone()))?,
            };
            if m < n {
                return Err(SmorynskiError::ParameterOutsideDomain { param: m, world: n });
            }
            m != n + 1
        }
        Formula::Not(a) => !eval_ms_env(n, a, env)?,
        Formula::Implies(a, b) => !eval_ms_env(n, a, env)? || eval_ms_env(n, b, env)?,
        Formula::And(a, b) => eval_ms_env(n, a, env)? && eval_ms_env(n, b, env)?,
        Formula::Or(a, b) => eval_ms_env(n, a, env)? || eval_ms_env(n, b, env)?,
        Formula::Forall(v, a) | Formula::Exists(v, a) => {
            let universal = matches!(f, Formula::Forall(..));
            let saved = env.get(v).copied();
            let mut verdict = Ok(universal);
            for m in n..=n + 2 {
                env.insert(v.clone(), m);
                match eval_ms_env(n, a, env) {
                    Ok(t) if t == universal => {}
                    other => {
                        verdict = other;
                        break;
                    }
                }
            }
            restore(env, v, saved);
            verdict?
        }
        Formula::Box(a) => {
            for j in 0..n {
                if !eval_ms_env(j, a, env)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

fn restore(env: &mut BTreeMap<String, u64>, v: &str, saved: Option<u64>) {
    match saved {
        Some(m) => env.insert(v.to_string(), m),
        None => env.remove(v),
    };
}

/// `∀u□(p → P(u))`, the formula without fixed points over FIFD.
pub fn smorynski_target() -> Formula {
    Formula::forall("u", Formula::boxed(Formula::implies(Formula::prop("p"), Formula::atom(PRED, ["u"]))))
}

/// The verdict for one `M_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KVerdict {
    pub k: usize,
    /// Whether `b ↔ ∀u□(b → P(u))` is valid in `M_k`.
    pub valid: bool,
    /// Least world where the equivalence fails.
    pub failing_world: Option<usize>,
    /// When valid: whether `b` holds exactly at the even worlds.
    pub parity_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub candidate: Formula,
    pub k_max: usize,
    pub table: Vec<KVerdict>,
    /// Least `k` whose `M_k` refutes the candidate; `None` is inconclusive.
    pub refuted_at: Option<usize>,
}

impl Refutation {
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.push("candidate", &self.candidate).push("k_max", self.k_max);
        for v in &self.table {
            let world = v.failing_world.map_or("-".to_string(), |w| w.to_string());
            let parity = match v.parity_ok {
                Some(true) => "ok",
                Some(false) => "violated",
                None => "-",
            };
            r.push(format!("k.{}", v.k), format!("valid={} failing_world={world} parity={parity}", v.valid));
        }
        match self.refuted_at {
            Some(k) => r.push("refuted_at", k),
            None => r.push("refuted_at", "none (inconclusive)"),
        };
        r
    }
}

fn verdict(equivalence: &CompiledFormula, b: &CompiledFormula, k: usize) -> Result<KVerdict, SmorynskiError> {
    let m = build_mk(MkSpec { k });
    let truth = equivalence.truth_by_world(&m)?;
    let failing_world = truth.iter().position(|t| !t);
    let parity_ok = match failing_world {
        Some(_) => None,
        None => {
            let bt = b.truth_by_world(&m)?;
            Some(bt.iter().enumerate().all(|(n, &t)| t == (n % 2 == 0)))
        }
    };
    Ok(KVerdict { k, valid: failing_world.is_none(), failing_world, parity_ok })
}

/// Checks `b ↔ ∀u□(b → P(u))` in `M_0, ..., M_{k_max}`.
pub fn refute_fixpoint(b: &Formula, k_max: usize) -> Result<Refutation, SmorynskiError> {
    let mut bad = None;
    b.visit(&mut |g| match g {
        Formula::Prop(p) if bad.is_none() => bad = Some(SmorynskiError::PropositionalVariable(p.clone())),
        Formula::Atom { pred, args } if bad.is_none() && (pred != PRED || args.len() != 1) => {
            bad = Some(SmorynskiError::ForeignPredicate { pred: pred.clone(), arity: args.len() })
        }
        _ => {}
    });
    if let Some(e) = bad {
        return Err(e);
    }
    let compiled_b = CompiledFormula::new(b)?;
    if let Some(v) = compiled_b.free_vars().next() {
        return Err(SmorynskiError::UnboundVariable(v.to_string()));
    }
    let fixed = subst_prop(&smorynski_target(), "p", b).expect("a sentence cannot be captured");
    let equivalence = CompiledFormula::new(&Formula::iff(b.clone(), fixed))?;
    let table: Vec<KVerdict> =
        (0..=k_max).into_par_iter().map(|k| verdict(&equivalence, &compiled_b, k)).collect::<Result<_, _>>()?;
    let refuted_at = table.iter().find(|v| !v.valid).map(|v| v.k);
    Ok(Refutation { candidate: b.clone(), k_max, table, refuted_at })
}
