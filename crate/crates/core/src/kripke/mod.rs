//! Finite Kripke models with expanding domains: construction, validation,
//! truth evaluation, frame analysis, and random or exhaustive generation.

mod enumerate;
mod eval;
mod file;
mod frame;
mod generate;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

pub use enumerate::{enumerate_models, EnumBounds, EnumError, ModelEnumerator};
pub use eval::{eval, truth_by_world, valid_at_worlds, valid_in_model, CompiledFormula, EvalError};
pub use file::{parse_model_file, write_model_file, ModelFileError};
pub use frame::{frame_report, FrameClass, FrameReport};
pub use generate::{random_model, GenError, ModelGenSpec};

pub type World = usize;

/// Frame conditions a generator or enumerator must respect.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Requirements {
    pub transitive: bool,
    pub irreflexive: bool,
    /// Upper bound on the height of every world. Implies acyclicity.
    pub max_height: Option<usize>,
}

impl Requirements {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn transitive(mut self) -> Self {
        self.transitive = true;
        self
    }

    pub fn irreflexive(mut self) -> Self {
        self.irreflexive = true;
        self
    }

    pub fn max_height(mut self, h: usize) -> Self {
        self.max_height = Some(h);
        self
    }

    /// Finite, transitive, irreflexive.
    pub fn gl() -> Self {
        Self::none().transitive().irreflexive()
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Relation {
    /// Indexed by the mixed-radix code of the tuple over the constant pool.
    Dense(Vec<bool>),
    Sparse(HashSet<Box<[u32]>>),
}

const DENSE_LIMIT: usize = 1 << 12;

impl Relation {
    fn build(pool: usize, arity: usize, tuples: impl Iterator<Item = Vec<u32>>) -> Self {
        match pool.checked_pow(arity as u32).filter(|&n| n <= DENSE_LIMIT) {
            Some(n) => {
                let mut bits = vec![false; n];
                for t in tuples {
                    if t.len() == arity {
                        bits[dense_code(pool, &t)] = true;
                    }
                }
                Relation::Dense(bits)
            }
            None => Relation::Sparse(tuples.map(Vec::into_boxed_slice).collect()),
        }
    }

    pub(crate) fn contains(&self, pool: usize, tuple: &[u32]) -> bool {
        match self {
            Relation::Dense(bits) => bits[dense_code(pool, tuple)],
            Relation::Sparse(set) => set.contains(tuple),
        }
    }
}

fn dense_code(pool: usize, tuple: &[u32]) -> usize {
    tuple.iter().fold(0, |acc, &c| acc * pool + c as usize)
}

/// A finite Kripke model `<W, <, {D_w}, ||->`.
///
/// Worlds are `0..world_count()`. Constants are interned into a pool shared
/// by all worlds; each world's domain is a subset of the pool. Build with
/// [`ModelBuilder`]; check the model invariants with [`validate_model`].
#[derive(Clone, Debug)]
pub struct KripkeModel {
    pub(crate) worlds: usize,
    pub(crate) edges: BTreeSet<(World, World)>,
    pub(crate) succ: Vec<Vec<World>>,
    pub(crate) constants: Vec<String>,
    pub(crate) const_index: HashMap<String, u32>,
    pub(crate) domains: Vec<Vec<u32>>,
    pub(crate) in_domain: Vec<Vec<bool>>,
    pub(crate) signature: BTreeMap<String, usize>,
    pub(crate) pred_index: HashMap<String, usize>,
    /// `relations[pred][world]`
    pub(crate) relations: Vec<Vec<Relation>>,
    /// Facts as given, kept for validation and printing.
    pub(crate) facts: BTreeSet<(World, String, Vec<u32>)>,
}

impl KripkeModel {
    pub fn world_count(&self) -> usize {
        self.worlds
    }

    pub fn worlds(&self) -> std::ops::Range<World> {
        0..self.worlds
    }

    pub fn edges(&self) -> impl Iterator<Item = (World, World)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, w: World, v: World) -> bool {
        self.edges.contains(&(w, v))
    }

    pub fn successors(&self, w: World) -> &[World] {
        &self.succ[w]
    }

    pub fn domain(&self, w: World) -> impl Iterator<Item = &str> + '_ {
        self.domains[w].iter().map(|&c| self.constants[c as usize].as_str())
    }

    pub fn domain_size(&self, w: World) -> usize {
        self.domains[w].len()
    }

    pub fn in_domain(&self, w: World, constant: &str) -> bool {
        self.const_index.get(constant).is_some_and(|&c| self.in_domain[w][c as usize])
    }

    /// Arity of each predicate that has facts or was declared.
    pub fn signature(&self) -> &BTreeMap<String, usize> {
        &self.signature
    }

    pub fn holds(&self, w: World, pred: &str, args: &[&str]) -> bool {
        let Some(&p) = self.pred_index.get(pred) else { return false };
        if self.signature[pred] != args.len() {
            return false;
        }
        let mut tuple = Vec::with_capacity(args.len());
        for a in args {
            match self.const_index.get(*a) {
                Some(&c) => tuple.push(c),
                None => return false,
            }
        }
        self.relations[p][w].contains(self.constants.len(), &tuple)
    }

    /// True facts in a deterministic order.
    pub fn facts(&self) -> impl Iterator<Item = (World, &str, Vec<&str>)> + '_ {
        self.facts
            .iter()
            .map(|(w, p, t)| (*w, p.as_str(), t.iter().map(|&c| self.constants[c as usize].as_str()).collect()))
    }

    /// The submodel generated by `root`: worlds reachable from it, renumbered
    /// in increasing order of their old index.
    pub fn generated_submodel(&self, root: World) -> (KripkeModel, Vec<World>) {
        let mut keep = vec![false; self.worlds];
        let mut stack = vec![root];
        keep[root] = true;
        while let Some(w) = stack.pop() {
            for &v in &self.succ[w] {
                if !keep[v] {
                    keep[v] = true;
                    stack.push(v);
                }
            }
        }
        let old: Vec<World> = (0..self.worlds).filter(|&w| keep[w]).collect();
        let new_of: HashMap<World, World> = old.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let mut b = ModelBuilder::new(old.len());
        for (p, &a) in &self.signature {
            b.declare(p, a);
        }
        for &(w, v) in &self.edges {
            if let (Some(&w2), Some(&v2)) = (new_of.get(&w), new_of.get(&v)) {
                b.edge(w2, v2);
            }
        }
        for (i, &w) in old.iter().enumerate() {
            b.domain(i, self.domain(w));
        }
        for (w, p, t) in self.facts() {
            if let Some(&w2) = new_of.get(&w) {
                b.fact(w2, p, t);
            }
        }
        (b.build(), old)
    }
}

/// Incremental construction of a [`KripkeModel`].
#[derive(Clone, Debug, Default)]
pub struct ModelBuilder {
    worlds: usize,
    edges: BTreeSet<(World, World)>,
    constants: Vec<String>,
    const_index: HashMap<String, u32>,
    domains: Vec<BTreeSet<u32>>,
    signature: BTreeMap<String, usize>,
    facts: BTreeSet<(World, String, Vec<u32>)>,
}

impl ModelBuilder {
    pub fn new(worlds: usize) -> Self {
        Self { worlds, domains: vec![BTreeSet::new(); worlds], ..Self::default() }
    }

    fn intern(&mut self, c: &str) -> u32 {
        if let Some(&i) = self.const_index.get(c) {
            return i;
        }
        let i = self.constants.len() as u32;
        self.constants.push(c.to_string());
        self.const_index.insert(c.to_string(), i);
        i
    }

    /// Adds `w < v`: `v` is accessible from `w`.
    ///
    /// Panics if either world is out of range.
    pub fn edge(&mut self, w: World, v: World) -> &mut Self {
        assert!(w < self.worlds && v < self.worlds, "edge ({w}, {v}) out of range");
        self.edges.insert((w, v));
        self
    }

    /// Adds the given constants to the domain of `w`.
    pub fn domain<'a>(&mut self, w: World, constants: impl IntoIterator<Item = &'a str>) -> &mut Self {
        assert!(w < self.worlds, "world {w} out of range");
        for c in constants {
            let i = self.intern(c);
            self.domains[w].insert(i);
        }
        self
    }

    /// Records the arity of `pred` even if it has no true tuples. The first
    /// declaration or fact fixes the arity.
    pub fn declare(&mut self, pred: &str, arity: usize) -> &mut Self {
        self.signature.entry(pred.to_string()).or_insert(arity);
        self
    }

    /// Makes `pred(args)` true at `w`.
    pub fn fact<'a>(&mut self, w: World, pred: &str, args: impl IntoIterator<Item = &'a str>) -> &mut Self {
        assert!(w < self.worlds, "world {w} out of range");
        let tuple: Vec<u32> = args.into_iter().map(|c| self.intern(c)).collect();
        self.signature.entry(pred.to_string()).or_insert(tuple.len());
        self.facts.insert((w, pred.to_string(), tuple));
        self
    }

    pub fn build(self) -> KripkeModel {
        let pool = self.constants.len();
        let mut succ = vec![Vec::new(); self.worlds];
        for &(w, v) in &self.edges {
            succ[w].push(v);
        }
        let in_domain = self.domains.iter().map(|d| (0..pool as u32).map(|c| d.contains(&c)).collect()).collect();
        let pred_index: HashMap<String, usize> =
            self.signature.keys().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let relations = self
            .signature
            .iter()
            .map(|(p, &arity)| {
                (0..self.worlds)
                    .map(|w| {
                        let tuples =
                            self.facts.iter().filter(|(fw, fp, _)| *fw == w && fp == p).map(|(_, _, t)| t.clone());
                        Relation::build(pool, arity, tuples)
                    })
                    .collect()
            })
            .collect();
        KripkeModel {
            worlds: self.worlds,
            edges: self.edges,
            succ,
            constants: self.constants,
            const_index: self.const_index,
            domains: self.domains.into_iter().map(|d| d.into_iter().collect()).collect(),
            in_domain,
            signature: self.signature,
            pred_index,
            relations,
            facts: self.facts,
        }
    }
}

/// A broken model invariant, with its witness.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Violation {
    NoWorlds,
    EmptyDomain {
        world: World,
    },
    /// `from < to` but `constant` is in `D_from` and not in `D_to`.
    Monotonicity {
        from: World,
        to: World,
        constant: String,
    },
    TupleOutsideDomain {
        world: World,
        pred: String,
        tuple: Vec<String>,
        constant: String,
    },
    Arity {
        world: World,
        pred: String,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoWorlds => write!(f, "model has no worlds"),
            Violation::EmptyDomain { world } => write!(f, "domain of world {world} is empty"),
            Violation::Monotonicity { from, to, constant } => {
                write!(f, "edge {from} -> {to}: constant {constant} is in D_{from} but not in D_{to}")
            }
            Violation::TupleOutsideDomain { world, pred, tuple, constant } => {
                write!(f, "fact {pred}({}) at world {world}: constant {constant} is not in D_{world}", tuple.join(", "))
            }
            Violation::Arity { world, pred, expected, found } => {
                write!(f, "fact for {pred} at world {world} has {found} arguments, expected {expected}")
            }
        }
    }
}

/// Every broken invariant of `m`; empty iff `m` is a proper model.
pub fn validate_model(m: &KripkeModel) -> Vec<Violation> {
    let mut out = Vec::new();
    if m.worlds == 0 {
        out.push(Violation::NoWorlds);
    }
    for w in m.worlds() {
        if m.domains[w].is_empty() {
            out.push(Violation::EmptyDomain { world: w });
        }
    }
    for &(w, v) in &m.edges {
        for &c in &m.domains[w] {
            if !m.in_domain[v][c as usize] {
                out.push(Violation::Monotonicity { from: w, to: v, constant: m.constants[c as usize].clone() });
            }
        }
    }
    for (w, p, t) in &m.facts {
        let expected = m.signature[p];
        if t.len() != expected {
            out.push(Violation::Arity { world: *w, pred: p.clone(), expected, found: t.len() });
            continue;
        }
        if let Some(&c) = t.iter().find(|&&c| !m.in_domain[*w][c as usize]) {
            out.push(Violation::TupleOutsideDomain {
                world: *w,
                pred: p.clone(),
                tuple: t.iter().map(|&c| m.constants[c as usize].clone()).collect(),
                constant: m.constants[c as usize].clone(),
            });
        }
    }
    out
}

/// Assignment of domain constants to individual variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment {
    bindings: BTreeMap<String, String>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: impl Into<String>, constant: impl Into<String>) -> Self {
        self.bindings.insert(var.into(), constant.into());
        self
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.bindings.get(var).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
