use std::collections::HashMap;

use thiserror::Error;

use super::{Environment, KripkeModel, World};
use crate::syntax::{universal_closure, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("propositional variable #{0} has no truth value in a Kripke model")]
    PropositionalVariable(String),
    #[error("variable `{0}` is free and unbound")]
    UnboundVariable(String),
    #[error("constant {constant} is not in the domain of world {world}")]
    ConstantOutsideDomain { constant: String, world: World },
    #[error("world {0} does not exist")]
    NoSuchWorld(World),
    #[error("predicate {pred} has arity {model} in the model but is used with {formula} arguments")]
    ArityMismatch { pred: String, model: usize, formula: usize },
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::PropositionalVariable(_) => "propositional-variable",
            EvalError::UnboundVariable(_) => "unbound-variable",
            EvalError::ConstantOutsideDomain { .. } => "constant-outside-domain",
            EvalError::NoSuchWorld(_) => "no-such-world",
            EvalError::ArityMismatch { .. } => "arity-mismatch",
        }
    }
}

type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Arg {
    Slot(usize),
    Const(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bottom,
    Atom { pred: usize, args: Vec<Arg> },
    Not(NodeId),
    Implies(NodeId, NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Forall(usize, NodeId),
    Exists(usize, NodeId),
    Box(NodeId),
}

/// A formula prepared for repeated evaluation: structurally equal
/// subformulas share one node, and variables, predicates and constants are
/// numbered. Independent of any particular model.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    /// Free variable slots of each node, sorted.
    free: Vec<Vec<usize>>,
    root: NodeId,
    slots: Vec<String>,
    preds: Vec<(String, usize)>,
    consts: Vec<String>,
}

struct Compiler {
    nodes: Vec<Node>,
    free: Vec<Vec<usize>>,
    ids: HashMap<Node, NodeId>,
    slots: Vec<String>,
    preds: Vec<(String, usize)>,
    consts: Vec<String>,
}

fn index_of<T: PartialEq>(v: &mut Vec<T>, x: T) -> usize {
    match v.iter().position(|y| *y == x) {
        Some(i) => i,
        None => {
            v.push(x);
            v.len() - 1
        }
    }
}

impl Compiler {
    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let free = match &node {
            Node::Top | Node::Bottom => Vec::new(),
            Node::Atom { args, .. } => {
                let mut s: Vec<usize> = args
                    .iter()
                    .filter_map(|a| match a {
                        Arg::Slot(s) => Some(*s),
                        Arg::Const(_) => None,
                    })
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            }
            Node::Not(a) | Node::Box(a) => self.free[*a as usize].clone(),
            Node::Implies(a, b) | Node::And(a, b) | Node::Or(a, b) => {
                let mut s = self.free[*a as usize].clone();
                s.extend(&self.free[*b as usize]);
                s.sort_unstable();
                s.dedup();
                s
            }
            Node::Forall(v, a) | Node::Exists(v, a) => {
                self.free[*a as usize].iter().copied().filter(|s| s != v).collect()
            }
        };
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.free.push(free);
        self.ids.insert(node, id);
        id
    }

    fn compile(&mut self, f: &Formula) -> Result<NodeId, EvalError> {
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Bottom => Node::Bottom,
            Formula::Prop(p) => return Err(EvalError::PropositionalVariable(p.clone())),
            Formula::Atom { pred, args } => {
                let pred = index_of(&mut self.preds, (pred.clone(), args.len()));
                let args = args
                    .iter()
                    .map(|a| match a {
                        Term::Var(v) => Arg::Slot(index_of(&mut self.slots, v.clone())),
                        Term::Const(c) => Arg::Const(index_of(&mut self.consts, c.clone())),
                    })
                    .collect();
                Node::Atom { pred, args }
            }
            Formula::Not(a) => Node::Not(self.compile(a)?),
            Formula::Box(a) => Node::Box(self.compile(a)?),
            Formula::Implies(a, b) => Node::Implies(self.compile(a)?, self.compile(b)?),
            Formula::And(a, b) => Node::And(self.compile(a)?, self.compile(b)?),
            Formula::Or(a, b) => Node::Or(self.compile(a)?, self.compile(b)?),
            Formula::Forall(v, a) => {
                let s = index_of(&mut self.slots, v.clone());
                Node::Forall(s, self.compile(a)?)
            }
            Formula::Exists(v, a) => {
                let s = index_of(&mut self.slots, v.clone());
                Node::Exists(s, self.compile(a)?)
            }
        };
        Ok(self.intern(node))
    }
}

impl CompiledFormula {
    /// Errors if `f` contains a propositional variable.
    pub fn new(f: &Formula) -> Result<Self, EvalError> {
        let mut c = Compiler {
            nodes: Vec::new(),
            free: Vec::new(),
            ids: HashMap::new(),
            slots: Vec::new(),
            preds: Vec::new(),
            consts: Vec::new(),
        };
        let root = c.compile(f)?;
        Ok(Self { nodes: c.nodes, free: c.free, root, slots: c.slots, preds: c.preds, consts: c.consts })
    }

    pub fn free_vars(&self) -> impl Iterator<Item = &str> {
        self.free[self.root as usize].iter().map(|&s| self.slots[s].as_str())
    }

    pub fn is_closed(&self) -> bool {
        self.free[self.root as usize].is_empty()
    }

    /// Truth at `w` under `env`.
    pub fn eval(&self, m: &KripkeModel, w: World, env: &Environment) -> Result<bool, EvalError> {
        let mut ev = Evaluator::new(self, m)?;
        ev.check_world(w)?;
        for &s in &self.free[self.root as usize] {
            let name = &self.slots[s];
            let c = env.get(name).ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
            let idx = m.const_index.get(c).copied().filter(|&i| m.in_domain[w][i as usize]);
            match idx {
                Some(i) => ev.env[s] = i,
                None => return Err(EvalError::ConstantOutsideDomain { constant: c.to_string(), world: w }),
            }
        }
        ev.eval(self.root, w)
    }

    /// Truth of a closed formula at each world.
    pub fn truth_by_world(&self, m: &KripkeModel) -> Result<Vec<bool>, EvalError> {
        if let Some(v) = self.free_vars().next() {
            return Err(EvalError::UnboundVariable(v.to_string()));
        }
        let mut ev = Evaluator::new(self, m)?;
        m.worlds().map(|w| ev.eval(self.root, w)).collect()
    }

    /// Whether a closed formula holds at every world accepted by `at`.
    pub fn holds_at(&self, m: &KripkeModel, at: impl Fn(World) -> bool) -> Result<bool, EvalError> {
        if let Some(v) = self.free_vars().next() {
            return Err(EvalError::UnboundVariable(v.to_string()));
        }
        let mut ev = Evaluator::new(self, m)?;
        for w in m.worlds().filter(|&w| at(w)) {
            if !ev.eval(self.root, w)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

const UNBOUND: u32 = u32::MAX;

struct Evaluator<'a> {
    f: &'a CompiledFormula,
    m: &'a KripkeModel,
    /// Model predicate for each formula predicate; `None` when the model
    /// never mentions it, which makes the atom false everywhere.
    preds: Vec<Option<usize>>,
    consts: Vec<Option<u32>>,
    env: Vec<u32>,
    memo: HashMap<u128, bool>,
    args: Vec<u32>,
}

impl<'a> Evaluator<'a> {
    fn new(f: &'a CompiledFormula, m: &'a KripkeModel) -> Result<Self, EvalError> {
        let preds = f
            .preds
            .iter()
            .map(|(p, arity)| match m.signature.get(p) {
                Some(&a) if a != *arity => Err(EvalError::ArityMismatch { pred: p.clone(), model: a, formula: *arity }),
                Some(_) => Ok(Some(m.pred_index[p])),
                None => Ok(None),
            })
            .collect::<Result<_, _>>()?;
        let consts = f.consts.iter().map(|c| m.const_index.get(c).copied()).collect();
        Ok(Self { f, m, preds, consts, env: vec![UNBOUND; f.slots.len()], memo: HashMap::new(), args: Vec::new() })
    }

    fn check_world(&self, w: World) -> Result<(), EvalError> {
        if w < self.m.worlds {
            Ok(())
        } else {
            Err(EvalError::NoSuchWorld(w))
        }
    }

    /// Memo key: node, world and the values of the node's free variables,
    /// 16 bits each. `None` when that does not fit.
    fn key(&self, id: NodeId, w: World) -> Option<u128> {
        let free = &self.f.free[id as usize];
        if free.len() > 5 || w >= 1 << 16 {
            return None;
        }
        let mut k = (id as u128) << 96 | (w as u128) << 80;
        for (i, &s) in free.iter().enumerate() {
            let v = self.env[s];
            if v >= 1 << 16 {
                return None;
            }
            k |= (v as u128) << (16 * i);
        }
        Some(k)
    }

    fn eval(&mut self, id: NodeId, w: World) -> Result<bool, EvalError> {
        let f = self.f;
        match &f.nodes[id as usize] {
            Node::Top => Ok(true),
            Node::Bottom => Ok(false),
            Node::Atom { pred, args } => self.atom(*pred, args, w),
            Node::Not(a) => Ok(!self.eval(*a, w)?),
            Node::Implies(a, b) => Ok(!self.eval(*a, w)? || self.eval(*b, w)?),
            Node::And(a, b) => Ok(self.eval(*a, w)? && self.eval(*b, w)?),
            Node::Or(a, b) => Ok(self.eval(*a, w)? || self.eval(*b, w)?),
            node @ (Node::Forall(..) | Node::Exists(..) | Node::Box(_)) => {
                let key = self.key(id, w);
                if let Some(&v) = key.and_then(|k| self.memo.get(&k)) {
                    return Ok(v);
                }
                let v = match node {
                    Node::Box(a) => {
                        let mut all = true;
                        for &v in &self.m.succ[w] {
                            if !self.eval(*a, v)? {
                                all = false;
                                break;
                            }
                        }
                        all
                    }
                    Node::Forall(s, a) | Node::Exists(s, a) => {
                        let universal = matches!(node, Node::Forall(..));
                        let saved = self.env[*s];
                        let mut result = universal;
                        for &c in &self.m.domains[w] {
                            self.env[*s] = c;
                            let r = self.eval(*a, w);
                            match r {
                                Ok(b) if b != universal => {
                                    result = b;
                                    break;
                                }
                                Ok(_) => {}
                                Err(e) => {
                                    self.env[*s] = saved;
                                    return Err(e);
                                }
                            }
                        }
                        self.env[*s] = saved;
                        result
                    }
                    _ => unreachable!(),
                };
                if let Some(k) = key {
                    self.memo.insert(k, v);
                }
                Ok(v)
            }
        }
    }

    fn atom(&mut self, pred: usize, args: &[Arg], w: World) -> Result<bool, EvalError> {
        let m = self.m;
        self.args.clear();
        for a in args {
            let c = match a {
                Arg::Slot(s) => {
                    let c = self.env[*s];
                    if c == UNBOUND {
                        return Err(EvalError::UnboundVariable(self.f.slots[*s].clone()));
                    }
                    c
                }
                Arg::Const(i) => match self.consts[*i] {
                    Some(c) => c,
                    None => {
                        return Err(EvalError::ConstantOutsideDomain { constant: self.f.consts[*i].clone(), world: w })
                    }
                },
            };
            if !m.in_domain[w][c as usize] {
                return Err(EvalError::ConstantOutsideDomain { constant: m.constants[c as usize].clone(), world: w });
            }
            self.args.push(c);
        }
        Ok(match self.preds[pred] {
            Some(p) => m.relations[p][w].contains(m.constants.len(), &self.args),
            None => false,
        })
    }
}

/// Truth of `f` at world `w` of `m` under `env`.
pub fn eval(m: &KripkeModel, w: World, f: &Formula, env: &Environment) -> Result<bool, EvalError> {
    CompiledFormula::new(f)?.eval(m, w, env)
}

/// Truth of the universal closure of `f` at each world.
pub fn truth_by_world(m: &KripkeModel, f: &Formula) -> Result<Vec<bool>, EvalError> {
    CompiledFormula::new(&universal_closure(f))?.truth_by_world(m)
}

/// Validity in `m`: the universal closure of `f` holds at every world.
pub fn valid_in_model(m: &KripkeModel, f: &Formula) -> Result<bool, EvalError> {
    valid_at_worlds(m, f, |_| true)
}

/// The universal closure of `f` holds at every world accepted by `at`.
pub fn valid_at_worlds(m: &KripkeModel, f: &Formula, at: impl Fn(World) -> bool) -> Result<bool, EvalError> {
    CompiledFormula::new(&universal_closure(f))?.holds_at(m, at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::ModelBuilder;
    use crate::syntax::parse_inferring;

    fn p(s: &str) -> Formula {
        parse_inferring(s).unwrap().0
    }

    fn chain() -> KripkeModel {
        // 0 -> 1 -> 2, domains growing
        let mut b = ModelBuilder::new(3);
        b.edge(0, 1).edge(1, 2);
        b.domain(0, ["a"]).domain(1, ["a", "b"]).domain(2, ["a", "b"]);
        b.fact(1, "P", ["a"]).fact(2, "P", ["b"]).declare("Q", 1);
        b.build()
    }

    #[test]
    fn vacuous_box_at_dead_end() {
        let m = chain();
        assert!(eval(&m, 2, &p("box false"), &Environment::new()).unwrap());
        assert!(!eval(&m, 1, &p("box false"), &Environment::new()).unwrap());
    }

    #[test]
    fn quantifiers_range_over_local_domain() {
        let m = chain();
        let env = Environment::new();
        assert!(eval(&m, 1, &p("forall u. P(u)"), &env).is_ok_and(|b| !b));
        assert!(eval(&m, 0, &p("forall u. box P(u)"), &env).unwrap());
        assert!(eval(&m, 1, &p("exists u. ~P(u)"), &env).unwrap());
        assert!(!eval(&m, 0, &p("box forall u. P(u)"), &env).unwrap());
    }

    #[test]
    fn environments_and_constants() {
        let m = chain();
        let f = p("box P(u)");
        assert!(eval(&m, 0, &f, &Environment::new().bind("u", "a")).unwrap());
        assert_eq!(eval(&m, 0, &f, &Environment::new()), Err(EvalError::UnboundVariable("u".into())));
        assert_eq!(
            eval(&m, 0, &f, &Environment::new().bind("u", "b")),
            Err(EvalError::ConstantOutsideDomain { constant: "b".into(), world: 0 })
        );
        let with_const = Formula::atom_terms("P", vec![Term::constant("b")]);
        assert!(eval(&m, 2, &with_const, &Environment::new()).unwrap());
        assert!(eval(&m, 0, &with_const, &Environment::new()).is_err());
        assert_eq!(eval(&m, 0, &p("#p"), &Environment::new()), Err(EvalError::PropositionalVariable("p".into())));
        assert!(matches!(
            eval(&m, 0, &p("P(u, u)"), &Environment::new().bind("u", "a")),
            Err(EvalError::ArityMismatch { .. })
        ));
        // never mentioned by the model: empty extension
        assert!(!eval(&m, 0, &p("exists u. S(u)"), &Environment::new()).unwrap());
    }

    #[test]
    fn validity_uses_universal_closure() {
        let m = chain();
        assert!(valid_in_model(&m, &Formula::Top).unwrap());
        assert!(!valid_in_model(&m, &p("box false")).unwrap());
        assert!(!valid_in_model(&m, &p("P(u) -> box P(u)")).unwrap());
        assert_eq!(truth_by_world(&m, &p("box box false")).unwrap(), vec![false, true, true]);
    }

    #[test]
    fn shared_subformulas_are_compiled_once() {
        let f = p("box Q(u) & box Q(u) | box Q(u)");
        let c = CompiledFormula::new(&f).unwrap();
        // atom, box, and, or
        assert_eq!(c.nodes.len(), 4);
    }
}
