//! Formulas of the predicate modal language and the purely syntactic
//! operations on them: depth bookkeeping, truncation, depth-indexed and
//! uniform substitution, variable hygiene and Σ-formula recognition.

mod depth;
mod parse;
mod print;
mod sigma;
mod vars;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use depth::{is_modalized, occurrence_depths, subst_at_depths, subst_prop, subst_props, truncate};
pub use parse::{parse, parse_inferring};
pub use sigma::{decompose_boolean_sigma, is_sigma, BooleanSigmaDecomposition};
pub use vars::{free_and_bound_vars, normalize_variables, universal_closure, VariableSets};

/// An argument of an atomic formula.
///
/// `Const` never comes out of the parser. Constants name elements of a
/// world's domain and are introduced when evaluating against a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Bottom,
    Atom {
        pred: String,
        args: Vec<Term>,
    },
    /// Propositional variable. Formulas without these are plain predicate
    /// modal formulas and can be evaluated in a Kripke model.
    Prop(String),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn atom<I, T>(pred: impl Into<String>, args: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        Formula::Atom { pred: pred.into(), args: args.into_iter().map(|a| Term::Var(a.into())).collect() }
    }

    pub fn atom_terms(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Atom { pred: pred.into(), args }
    }

    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `(a -> b) & (b -> a)`; the biconditional has no node of its own.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(var.into(), Box::new(body))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Box(Box::new(f))
    }

    /// `~box ~f`
    pub fn dia(f: Formula) -> Self {
        Formula::not(Formula::boxed(Formula::not(f)))
    }

    /// `f` under `n` boxes.
    pub fn box_n(n: usize, f: Formula) -> Self {
        (0..n).fold(f, |acc, _| Formula::boxed(acc))
    }

    /// `box f & f`
    pub fn strong_box(f: Formula) -> Self {
        Formula::and(Formula::boxed(f.clone()), f)
    }

    pub fn contains_prop(&self, name: &str) -> bool {
        match self {
            Formula::Prop(q) => q == name,
            Formula::Top | Formula::Bottom | Formula::Atom { .. } => false,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Box(a) => a.contains_prop(name),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.contains_prop(name) || b.contains_prop(name)
            }
        }
    }

    pub fn has_props(&self) -> bool {
        !self.props().is_empty()
    }

    /// Names of all propositional variables, sorted.
    pub fn props(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Prop(q) = f {
                out.insert(q.clone());
            }
        });
        out
    }

    /// Predicate symbols with the arity of their first occurrence.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.visit(&mut |f| {
            if let Formula::Atom { pred, args } = f {
                out.entry(pred.clone()).or_insert(args.len());
            }
        });
        out
    }

    /// All variable names occurring anywhere, free, bound or as a binder.
    pub fn all_vars(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom { args, .. } => {
                for a in args {
                    if let Term::Var(v) = a {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    pub fn has_constants(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if let Formula::Atom { args, .. } = f {
                found |= args.iter().any(|a| matches!(a, Term::Const(_)));
            }
        });
        found
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Maximal nesting of boxes.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom { .. } | Formula::Prop(_) => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.modal_depth(),
            Formula::Box(a) => 1 + a.modal_depth(),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
        }
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom { .. } | Formula::Prop(_) => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Box(a) => a.visit(f),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }
}

/// Declared arities of predicate symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateSignature {
    arities: BTreeMap<String, usize>,
}

impl PredicateSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, arity: usize) -> Self {
        self.arities.insert(name.into(), arity);
        self
    }

    /// Declares `name`. Returns the previously declared arity if it differs.
    pub fn declare(&mut self, name: impl Into<String>, arity: usize) -> Result<(), usize> {
        let name = name.into();
        match self.arities.get(&name) {
            Some(&old) if old != arity => Err(old),
            _ => {
                self.arities.insert(name, arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// Signature of the predicates occurring in `f`; errors on the first
    /// symbol used with two different arities.
    pub fn of_formula(f: &Formula) -> Result<Self, SyntaxError> {
        let mut sig = Self::new();
        let mut err = None;
        f.visit(&mut |g| {
            if let Formula::Atom { pred, args } = g {
                if let Err(expected) = sig.declare(pred.clone(), args.len()) {
                    err.get_or_insert(SyntaxError::ArityMismatch {
                        pred: pred.clone(),
                        expected,
                        found: args.len(),
                        pos: 0,
                    });
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(sig),
        }
    }
}

impl<S: Into<String>> FromIterator<(S, usize)> for PredicateSignature {
    fn from_iter<I: IntoIterator<Item = (S, usize)>>(iter: I) -> Self {
        Self { arities: iter.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }
}

/// A formula together with its distinguished propositional variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixpointTarget {
    pub formula: Formula,
    pub hole: String,
}

impl FixpointTarget {
    pub fn new(formula: Formula, hole: impl Into<String>) -> Self {
        Self { formula, hole: hole.into() }
    }

    /// `A(b)`
    pub fn apply(&self, b: &Formula) -> Result<Formula, SyntaxError> {
        subst_prop(&self.formula, &self.hole, b)
    }

    pub fn is_normalized(&self) -> bool {
        free_and_bound_vars(&self.formula).is_disjoint()
    }
}

impl fmt::Display for FixpointTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [hole #{}]", self.formula, self.hole)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown predicate `{pred}` at {pos}")]
    UnknownPredicate { pred: String, pos: usize },
    #[error("predicate `{pred}` has arity {expected} but is applied to {found} arguments at {pos}")]
    ArityMismatch { pred: String, expected: usize, found: usize, pos: usize },
    #[error("occurrence of #{hole} at depth {depth} but only {available} substitutes given")]
    DepthOverflow { hole: String, depth: usize, available: usize },
    #[error("substituting would capture variable `{var}`")]
    Capture { var: String },
    #[error("not a Boolean combination of Σ-formulas and #{hole}-free formulas: `{subformula}`")]
    NotDecomposable { hole: String, subformula: String },
}

impl SyntaxError {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            SyntaxError::Parse { .. } => "parse-error",
            SyntaxError::UnknownPredicate { .. } => "unknown-predicate",
            SyntaxError::ArityMismatch { .. } => "arity-mismatch",
            SyntaxError::DepthOverflow { .. } => "depth-overflow",
            SyntaxError::Capture { .. } => "capture-violation",
            SyntaxError::NotDecomposable { .. } => "not-decomposable",
        }
    }
}
