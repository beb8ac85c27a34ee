use std::collections::BTreeSet;

use thiserror::Error;

use super::generate::transitive_closure;
use super::{frame_report, KripkeModel, ModelBuilder, Requirements, World};
use crate::syntax::PredicateSignature;

/// Enumerations estimated to yield more models than this are refused.
pub const MAX_ENUMERATION: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("enumeration would yield about {estimate} models (limit {MAX_ENUMERATION})")]
    TooLarge { estimate: u128 },
    #[error("invalid enumeration bounds: {0}")]
    InvalidBounds(String),
}

impl EnumError {
    pub fn code(&self) -> &'static str {
        match self {
            EnumError::TooLarge { .. } => "enumeration-too-large",
            EnumError::InvalidBounds(_) => "invalid-bounds",
        }
    }
}

/// Which models to enumerate: every world count in
/// `min_worlds..=max_worlds`, with domains drawn from a fixed pool of
/// `max_domain` constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBounds {
    pub min_worlds: usize,
    pub max_worlds: usize,
    pub max_domain: usize,
}

impl EnumBounds {
    pub fn exactly(worlds: usize, max_domain: usize) -> Self {
        Self { min_worlds: worlds, max_worlds: worlds, max_domain }
    }

    pub fn up_to(max_worlds: usize, max_domain: usize) -> Self {
        Self { min_worlds: 1, max_worlds, max_domain }
    }
}

fn constant_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("c{i}")
    }
}

/// Every edge set on `n` worlds meeting `req`, in increasing bitmask order.
fn frames(n: usize, req: &Requirements) -> Vec<Vec<(World, World)>> {
    let pairs: Vec<(World, World)> = (0..n)
        .flat_map(|w| (0..n).map(move |v| (w, v)))
        .filter(|&(w, v)| !(req.irreflexive || req.max_height.is_some()) || w != v)
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let edges: BTreeSet<(World, World)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        if req.transitive && transitive_closure(n, &edges) != edges {
            continue;
        }
        if let Some(h) = req.max_height {
            let mut b = ModelBuilder::new(n);
            for &(w, v) in &edges {
                b.edge(w, v);
            }
            match frame_report(&b.build()).frame_height {
                Some(fh) if fh <= h => {}
                _ => continue,
            }
        }
        out.push(edges.into_iter().collect());
    }
    out
}

/// Monotone assignments of nonempty constant subsets (bitmasks over the
/// pool) to worlds.
fn domain_assignments(n: usize, pool: usize, edges: &[(World, World)]) -> Vec<Vec<u32>> {
    fn go(w: usize, n: usize, pool: usize, edges: &[(World, World)], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if w == n {
            out.push(cur.clone());
            return;
        }
        for mask in 1..(1u32 << pool) {
            // check edges between w and already-assigned worlds
            let ok = edges.iter().all(|&(a, b)| {
                if a == w && b < w {
                    mask & !cur[b] == 0
                } else if b == w && a < w {
                    cur[a] & !mask == 0
                } else {
                    true
                }
            });
            if ok {
                cur.push(mask);
                go(w + 1, n, pool, edges, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(0, n, pool, edges, &mut Vec::with_capacity(n), &mut out);
    out
}

fn estimate(bounds: &EnumBounds, sig: &PredicateSignature, req: &Requirements) -> u128 {
    let d = bounds.max_domain as u128;
    let mut total: u128 = 0;
    for n in bounds.min_worlds..=bounds.max_worlds {
        let frame_count: u128 = if n * n <= 16 {
            frames(n, req).len() as u128
        } else {
            1u128.checked_shl((n * n) as u32).unwrap_or(u128::MAX)
        };
        let domains = ((1u128 << bounds.max_domain.min(100)) - 1).saturating_pow(n as u32);
        let tuples_per_world: u128 = sig.iter().map(|(_, a)| d.saturating_pow(a as u32)).fold(0, u128::saturating_add);
        let interps =
            1u128.checked_shl(tuples_per_world.saturating_mul(n as u128).min(127) as u32).unwrap_or(u128::MAX);
        total = total.saturating_add(frame_count.saturating_mul(domains).saturating_mul(interps));
    }
    total
}

/// Streams every model within `bounds` whose frame meets `require`, each
/// exactly once. Worlds are `0..n` and constants `a, b, ...`; no
/// isomorphism reduction.
pub fn enumerate_models(
    bounds: EnumBounds,
    sig: &PredicateSignature,
    require: Requirements,
) -> Result<ModelEnumerator, EnumError> {
    if bounds.min_worlds == 0 || bounds.min_worlds > bounds.max_worlds || bounds.max_domain == 0 {
        return Err(EnumError::InvalidBounds(format!("{bounds:?}")));
    }
    let estimate = estimate(&bounds, sig, &require);
    if estimate > MAX_ENUMERATION {
        return Err(EnumError::TooLarge { estimate });
    }
    let pool: Vec<String> = (0..bounds.max_domain).map(constant_name).collect();
    let mut e = ModelEnumerator {
        bounds,
        require,
        sig: sig.iter().map(|(p, a)| (p.to_string(), a)).collect(),
        pool,
        n: bounds.min_worlds,
        frames: Vec::new(),
        frame: 0,
        domains: Vec::new(),
        domain: 0,
        slots: Vec::new(),
        interp: 0,
        done: false,
    };
    e.load_worlds();
    Ok(e)
}

/// Iterator returned by [`enumerate_models`].
pub struct ModelEnumerator {
    bounds: EnumBounds,
    require: Requirements,
    sig: Vec<(String, usize)>,
    pool: Vec<String>,
    n: usize,
    frames: Vec<Vec<(World, World)>>,
    frame: usize,
    domains: Vec<Vec<u32>>,
    domain: usize,
    /// One slot per (world, predicate, tuple) for the current domains.
    slots: Vec<(World, usize, Vec<usize>)>,
    interp: u64,
    done: bool,
}

impl ModelEnumerator {
    fn load_worlds(&mut self) {
        self.frames = frames(self.n, &self.require);
        self.frame = 0;
        self.load_frame();
    }

    fn load_frame(&mut self) {
        self.domains = match self.frames.get(self.frame) {
            Some(f) => domain_assignments(self.n, self.pool.len(), f),
            None => Vec::new(),
        };
        self.domain = 0;
        self.load_domain();
    }

    fn load_domain(&mut self) {
        self.slots.clear();
        self.interp = 0;
        let Some(doms) = self.domains.get(self.domain) else { return };
        for (w, &mask) in doms.iter().enumerate() {
            let members: Vec<usize> = (0..self.pool.len()).filter(|c| mask >> c & 1 == 1).collect();
            for (p, &(_, arity)) in self.sig.iter().enumerate() {
                let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
                for _ in 0..arity {
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| {
                            members.iter().map(move |&c| {
                                let mut t = t.clone();
                                t.push(c);
                                t
                            })
                        })
                        .collect();
                }
                self.slots.extend(tuples.into_iter().map(|t| (w, p, t)));
            }
        }
    }

    /// Moves to the next valid position; false when exhausted.
    fn advance(&mut self) -> bool {
        self.interp += 1;
        if self.interp < 1u64 << self.slots.len() {
            return true;
        }
        loop {
            self.domain += 1;
            if self.domain < self.domains.len() {
                self.load_domain();
                return true;
            }
            self.frame += 1;
            if self.frame < self.frames.len() {
                self.load_frame();
                if !self.domains.is_empty() {
                    return true;
                }
                continue;
            }
            self.n += 1;
            if self.n > self.bounds.max_worlds {
                return false;
            }
            self.load_worlds();
            if !self.domains.is_empty() {
                return true;
            }
        }
    }

    fn current(&self) -> KripkeModel {
        let mut b = ModelBuilder::new(self.n);
        for &(w, v) in &self.frames[self.frame] {
            b.edge(w, v);
        }
        for (w, &mask) in self.domains[self.domain].iter().enumerate() {
            b.domain(w, (0..self.pool.len()).filter(|c| mask >> c & 1 == 1).map(|c| self.pool[c].as_str()));
        }
        for (p, a) in &self.sig {
            b.declare(p, *a);
        }
        for (i, (w, p, t)) in self.slots.iter().enumerate() {
            if self.interp >> i & 1 == 1 {
                b.fact(*w, &self.sig[*p].0, t.iter().map(|&c| self.pool[c].as_str()));
            }
        }
        b.build()
    }
}

impl Iterator for ModelEnumerator {
    type Item = KripkeModel;

    fn next(&mut self) -> Option<KripkeModel> {
        if self.done || self.domains.is_empty() && !self.advance() {
            self.done = true;
            return None;
        }
        let m = self.current();
        if !self.advance() {
            self.done = true;
        }
        Some(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{validate_model, write_model_file};
    use std::collections::HashSet;

    fn unary() -> PredicateSignature {
        PredicateSignature::new().with("P", 1)
    }

    #[test]
    fn one_world_one_constant_one_predicate() {
        // the reflexive loop doubles the count unless excluded
        let all = enumerate_models(EnumBounds::exactly(1, 1), &unary(), Requirements::none()).unwrap();
        assert_eq!(all.count(), 4);
        let irr = enumerate_models(EnumBounds::exactly(1, 1), &unary(), Requirements::none().irreflexive()).unwrap();
        let models: Vec<_> = irr.collect();
        assert_eq!(models.len(), 2);
        assert_eq!(models.iter().filter(|m| m.holds(0, "P", &["a"])).count(), 1);
    }

    #[test]
    fn two_worlds_irreflexive_frames() {
        let sig = PredicateSignature::new();
        let n = enumerate_models(EnumBounds::exactly(2, 1), &sig, Requirements::none().irreflexive()).unwrap().count();
        assert_eq!(n, 4);
        let up_to =
            enumerate_models(EnumBounds::up_to(2, 1), &sig, Requirements::none().irreflexive()).unwrap().count();
        assert_eq!(up_to, 5);
    }

    /// Brute-force count: every frame on n worlds, every monotone domain
    /// assignment, every interpretation.
    fn brute_count(n: usize, d: usize, unary_preds: usize, req: Requirements) -> usize {
        let mut total = 0;
        for mask in 0u32..(1 << (n * n)) {
            let edges: Vec<(usize, usize)> =
                (0..n * n).filter(|i| mask >> i & 1 == 1).map(|i| (i / n, i % n)).collect();
            if (req.irreflexive || req.max_height.is_some()) && edges.iter().any(|&(a, b)| a == b) {
                continue;
            }
            if req.transitive
                && edges.iter().any(|&(a, b)| edges.iter().any(|&(c, e)| c == b && !edges.contains(&(a, e))))
            {
                continue;
            }
            if let Some(h) = req.max_height {
                // longest path by repeated relaxation
                let mut len = vec![0usize; n];
                for _ in 0..n + 1 {
                    for &(a, b) in &edges {
                        len[a] = len[a].max(len[b] + 1);
                    }
                }
                if len.iter().any(|&l| l > h.min(n)) || len.iter().any(|&l| l >= n) {
                    continue;
                }
            }
            let mut doms = 0;
            let total_assign = ((1 << d) - 1usize).pow(n as u32);
            for code in 0..total_assign {
                let masks: Vec<usize> =
                    (0..n).map(|w| code / ((1 << d) - 1usize).pow(w as u32) % ((1 << d) - 1) + 1).collect();
                if edges.iter().all(|&(a, b)| masks[a] & !masks[b] == 0) {
                    doms += 1 << (unary_preds * masks.iter().map(|m| m.count_ones() as usize).sum::<usize>());
                }
            }
            total += doms;
        }
        total
    }

    #[test]
    fn counts_match_brute_force() {
        let cases = [
            (2, 2, Requirements::none()),
            (2, 2, Requirements::gl()),
            (3, 2, Requirements::none().max_height(1)),
            (3, 1, Requirements::none().transitive()),
            (3, 2, Requirements::gl()),
        ];
        for (n, d, req) in cases {
            let got = enumerate_models(EnumBounds::exactly(n, d), &unary(), req).unwrap().count();
            assert_eq!(got, brute_count(n, d, 1, req), "n={n} d={d} {req:?}");
        }
    }

    #[test]
    fn yields_distinct_valid_models() {
        let models: Vec<_> =
            enumerate_models(EnumBounds::up_to(3, 2), &unary(), Requirements::none().max_height(2)).unwrap().collect();
        let mut seen = HashSet::new();
        for m in &models {
            assert!(validate_model(m).is_empty());
            assert!(frame_report(m).frame_height.unwrap() <= 2);
            assert!(seen.insert(write_model_file(m)));
        }
    }

    #[test]
    fn guard() {
        let sig = PredicateSignature::new().with("R", 2).with("P", 1);
        assert!(matches!(
            enumerate_models(EnumBounds::up_to(4, 3), &sig, Requirements::none()),
            Err(EnumError::TooLarge { .. })
        ));
        assert!(enumerate_models(EnumBounds::exactly(0, 1), &sig, Requirements::none()).is_err());
    }
}
