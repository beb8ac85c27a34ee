use std::collections::BTreeSet;
use std::fmt;

use super::{KripkeModel, World};

/// Frame classes that finite frames can belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameClass {
    /// Finite, transitive, irreflexive.
    FI,
    /// FI with finite domains.
    FIFD,
    /// Transitive, of finite height.
    FH,
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::FI => "FI",
            FrameClass::FIFD => "FIFD",
            FrameClass::FH => "FH",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameReport {
    pub transitive: bool,
    pub irreflexive: bool,
    /// For finite frames: no cycles.
    pub conversely_well_founded: bool,
    /// `None` when the frame has a cycle.
    pub heights: Option<Vec<usize>>,
    pub frame_height: Option<usize>,
    pub classes: BTreeSet<FrameClass>,
}

pub fn frame_report(m: &KripkeModel) -> FrameReport {
    let transitive = m.edges.iter().all(|&(a, b)| m.succ[b].iter().all(|&c| m.edges.contains(&(a, c))));
    let irreflexive = m.worlds().all(|w| !m.edges.contains(&(w, w)));
    let heights = heights(m);
    let frame_height = heights.as_ref().map(|h| h.iter().copied().max().unwrap_or(0));
    let mut classes = BTreeSet::new();
    if transitive && heights.is_some() {
        // every domain of a KripkeModel is finite, and on finite transitive
        // frames acyclicity and irreflexivity coincide
        classes.extend([FrameClass::FH, FrameClass::FI, FrameClass::FIFD]);
    }
    FrameReport { transitive, irreflexive, conversely_well_founded: heights.is_some(), heights, frame_height, classes }
}

/// `h(w) = sup { h(v) + 1 : w < v }`, or `None` if some world lies on a cycle.
fn heights(m: &KripkeModel) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = m.world_count();
    let mut mark = vec![Mark::New; n];
    let mut h = vec![0; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // iterative DFS: (world, next successor index)
        let mut stack: Vec<(World, usize)> = vec![(root, 0)];
        mark[root] = Mark::Active;
        while let Some(top) = stack.last_mut() {
            let (w, i) = *top;
            if let Some(&v) = m.succ[w].get(i) {
                top.1 += 1;
                match mark[v] {
                    Mark::Active => return None,
                    Mark::New => {
                        mark[v] = Mark::Active;
                        stack.push((v, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                h[w] = m.succ[w].iter().map(|&v| h[v] + 1).max().unwrap_or(0);
                mark[w] = Mark::Done;
                stack.pop();
            }
        }
    }
    Some(h)
}
