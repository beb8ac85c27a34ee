use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{KripkeModel, ModelBuilder, Requirements, World};
use crate::syntax::PredicateSignature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unsatisfiable generator spec: {0}")]
    Unsatisfiable(String),
}

impl GenError {
    pub fn code(&self) -> &'static str {
        "unsatisfiable-spec"
    }
}

/// Parameters for [`random_model`].
#[derive(Clone, Debug, PartialEq)]
pub struct ModelGenSpec {
    pub world_count: RangeInclusive<usize>,
    /// Size of the domain of worlds without predecessors.
    pub domain_base_size: RangeInclusive<usize>,
    /// Fresh constants added at every other world.
    pub domain_growth: RangeInclusive<usize>,
    pub signature: PredicateSignature,
    /// Probability that a tuple is in a predicate's extension.
    pub truth_density: f64,
    /// Probability that an admissible edge is drawn.
    pub edge_density: f64,
    /// Edges to add, beyond the random ones, before closing under transitivity.
    pub min_edges: usize,
    /// Frame conditions; `max_height` is the height bound.
    pub require: Requirements,
    pub seed: u64,
}

impl Default for ModelGenSpec {
    fn default() -> Self {
        Self {
            world_count: 1..=4,
            domain_base_size: 1..=2,
            domain_growth: 0..=1,
            signature: PredicateSignature::new(),
            truth_density: 0.5,
            edge_density: 0.5,
            min_edges: 0,
            require: Requirements::none(),
            seed: 0,
        }
    }
}

impl ModelGenSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn acyclic(&self) -> bool {
        self.require.max_height.is_some() || (self.require.transitive && self.require.irreflexive)
    }

    /// Most edges a frame on `n` worlds can have under the requirements.
    fn max_edges(&self, n: usize) -> usize {
        if self.acyclic() {
            // complete multipartite DAG over balanced levels
            let parts = self.require.max_height.map_or(n, |h| (h + 1).min(n)).max(1);
            let sizes: Vec<usize> = (0..parts).map(|i| n / parts + usize::from(i < n % parts)).collect();
            let total: usize = sizes.iter().sum();
            sizes.iter().map(|s| s * (total - s)).sum::<usize>() / 2
        } else if self.require.irreflexive {
            n * (n - 1)
        } else {
            n * n
        }
    }

    fn check(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Unsatisfiable(m.to_string()));
        if self.world_count.is_empty() || *self.world_count.start() == 0 {
            return bad("world count range must be nonempty and start at 1 or more");
        }
        if self.domain_base_size.is_empty() || *self.domain_base_size.start() == 0 {
            return bad("base domain size range must be nonempty and start at 1 or more");
        }
        if self.domain_growth.is_empty() {
            return bad("domain growth range is empty");
        }
        if !(0.0..=1.0).contains(&self.truth_density) || !(0.0..=1.0).contains(&self.edge_density) {
            return bad("densities must lie in [0, 1]");
        }
        let n = *self.world_count.start();
        if self.min_edges > self.max_edges(n) {
            return Err(GenError::Unsatisfiable(format!(
                "{} edges requested but at most {} fit on {n} worlds under the frame requirements",
                self.min_edges,
                self.max_edges(n)
            )));
        }
        Ok(())
    }
}

/// Draws a model; the same spec and seed always give the same model.
///
/// Frames with a height bound, or transitive irreflexive frames, are drawn
/// as DAGs over random levels, so heights never exceed the bound. Domains
/// are unions of the constants introduced at every world that reaches the
/// current one, which makes them monotone.
pub fn random_model(spec: &ModelGenSpec) -> Result<KripkeModel, GenError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = rng.gen_range(spec.world_count.clone());

    let mut allowed: Vec<(World, World)> = Vec::new();
    if spec.acyclic() {
        let top = spec.require.max_height.unwrap_or(n - 1);
        let mut levels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=top)).collect();
        let pairs = |levels: &[usize]| -> Vec<(World, World)> {
            (0..n).flat_map(|w| (0..n).map(move |v| (w, v))).filter(|&(w, v)| levels[w] > levels[v]).collect()
        };
        allowed = pairs(&levels);
        if allowed.len() < spec.min_edges {
            levels = (0..n).map(|w| w % (top + 1)).collect();
            allowed = pairs(&levels);
        }
    } else {
        for w in 0..n {
            for v in 0..n {
                if !(spec.require.irreflexive && w == v) {
                    allowed.push((w, v));
                }
            }
        }
    }

    let mut edges: BTreeSet<(World, World)> = BTreeSet::new();
    let mut rest = Vec::new();
    for &e in &allowed {
        if rng.gen_bool(spec.edge_density) {
            edges.insert(e);
        } else {
            rest.push(e);
        }
    }
    rest.shuffle(&mut rng);
    for e in rest {
        if edges.len() >= spec.min_edges {
            break;
        }
        edges.insert(e);
    }
    if spec.require.transitive {
        edges = transitive_closure(n, &edges);
    }

    // reach[w][v]: v is reachable from w in zero or more steps
    let closure = transitive_closure(n, &edges);
    let reaches = |w: World, v: World| w == v || closure.contains(&(w, v));
    let mut own: Vec<usize> = (0..n)
        .map(|v| {
            let has_pred = (0..n).any(|w| w != v && edges.contains(&(w, v)));
            if has_pred {
                rng.gen_range(spec.domain_growth.clone())
            } else {
                rng.gen_range(spec.domain_base_size.clone())
            }
        })
        .collect();
    // a cycle whose worlds all drew zero growth would be left empty
    for v in 0..n {
        if (0..n).all(|w| !reaches(w, v) || own[w] == 0) {
            own[v] = 1;
        }
    }
    let mut names: Vec<Vec<String>> = Vec::with_capacity(n);
    let mut next = 0;
    for &k in &own {
        names.push((next..next + k).map(|i| format!("c{i}")).collect());
        next += k;
    }
    let domains: Vec<Vec<String>> =
        (0..n).map(|v| (0..n).filter(|&w| reaches(w, v)).flat_map(|w| names[w].iter().cloned()).collect()).collect();

    let mut b = ModelBuilder::new(n);
    for &(w, v) in &edges {
        b.edge(w, v);
    }
    for (w, d) in domains.iter().enumerate() {
        b.domain(w, d.iter().map(String::as_str));
    }
    for (pred, arity) in spec.signature.iter() {
        b.declare(pred, arity);
        for (w, d) in domains.iter().enumerate() {
            for tuple in tuples(d, arity) {
                if rng.gen_bool(spec.truth_density) {
                    b.fact(w, pred, tuple.iter().map(|s| s.as_str()));
                }
            }
        }
    }
    Ok(b.build())
}

pub(crate) fn transitive_closure(n: usize, edges: &BTreeSet<(World, World)>) -> BTreeSet<(World, World)> {
    let mut reach = vec![vec![false; n]; n];
    for &(w, v) in edges {
        reach[w][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let via = reach[k].clone();
                for (r, v) in reach[i].iter_mut().zip(via) {
                    *r |= v;
                }
            }
        }
    }
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| reach[i][j]).collect()
}

/// All `arity`-tuples over `d`, lexicographically.
fn tuples(d: &[String], arity: usize) -> Vec<Vec<&String>> {
    let mut out: Vec<Vec<&String>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                d.iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    out
}
