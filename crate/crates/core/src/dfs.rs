//! Depth-first exploration with active, sleeping and retired vertices.
//!
//! The walker sits on the last active vertex. If it has a sleeping neighbor
//! it steps forward to one (the smallest under [`Policy::MinIndex`]) and that
//! vertex wakes up; otherwise the walker steps back and the vertex retires.
//! The height `X_n = |A_n| - 1` is a Dyck path that starts at 0 and ends at
//! -1 after `2|C(start)| - 1` steps.

use std::borrow::Cow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SparseGraph;

/// How the walker picks among sleeping neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Policy {
    /// Smallest vertex id.
    MinIndex,
    /// Uniformly at random: each neighbor list is shuffled once up front.
    Uniform { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Forward(u32),
    Backtrack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    pub x_after: i32,
    /// Walker position after the step; `None` once the root is popped.
    pub vertex_after: Option<u32>,
}

/// Contour process of one exploration.
///
/// `heights[n]` is `X_n` for `n = 0..=2|C| - 1` and `walker[n]` is `a_n`
/// (0 encodes "no vertex" after the final pop, or an unknown vertex in a
/// trace built with [`DfsTrace::from_contour`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsTrace {
    start: u32,
    component_size: usize,
    heights: Vec<i32>,
    walker: Vec<u32>,
}

impl DfsTrace {
    /// Wraps a bare Dyck path (no vertex information).
    pub fn from_contour(heights: Vec<i32>) -> Result<Self> {
        let valid = heights.len() >= 2
            && heights.len().is_multiple_of(2)
            && heights[0] == 0
            && *heights.last().unwrap() == -1
            && heights.windows(2).all(|w| (w[1] - w[0]).abs() == 1)
            && heights[..heights.len() - 1].iter().all(|&x| x >= 0);
        if !valid {
            return Err(Error::invalid("contour must be a Dyck path from 0 ending at -1"));
        }
        let walker = vec![0; heights.len()];
        Ok(DfsTrace { start: 0, component_size: heights.len() / 2, heights, walker })
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    /// `|C(start)|`.
    pub fn component_size(&self) -> usize {
        self.component_size
    }

    /// Number of recorded heights, `X_0` included; always `2 |C(start)|`.
    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn heights(&self) -> &[i32] {
        &self.heights
    }

    pub fn height(&self, n: usize) -> i32 {
        self.heights[n]
    }

    pub fn walker(&self, n: usize) -> Option<u32> {
        match self.walker[n] {
            0 => None,
            v => Some(v),
        }
    }

    pub fn max_height(&self) -> i32 {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    /// Steps `1..len()`, each with the state it leads to.
    pub fn steps(&self) -> impl Iterator<Item = Step> + '_ {
        (1..self.heights.len()).map(move |n| {
            let vertex_after = self.walker(n);
            let kind = if self.heights[n] > self.heights[n - 1] {
                StepKind::Forward(self.walker[n])
            } else {
                StepKind::Backtrack
            };
            Step { kind, x_after: self.heights[n], vertex_after }
        })
    }

    /// Step at which each vertex left the sleeping set (`u32::MAX` if never).
    /// Vertex `v` is sleeping at time `n` exactly when `discovery[v - 1] > n`.
    pub fn discovery_times(&self, n_vertices: usize) -> Vec<u32> {
        let mut discovery = vec![u32::MAX; n_vertices];
        if self.start != 0 {
            discovery[self.start as usize - 1] = 0;
        }
        for n in 1..self.heights.len() {
            if self.heights[n] > self.heights[n - 1] && self.walker[n] != 0 {
                discovery[self.walker[n] as usize - 1] = n as u32;
            }
        }
        discovery
    }
}

/// Parent pointers of the exploration tree, rooted at the start vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: u32,
    parent: Vec<u32>,
}

impl SpanningTree {
    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        match self.parent[v as usize - 1] {
            0 => None,
            p => Some(p),
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        v == self.root || self.parent[v as usize - 1] != 0
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (1..=self.parent.len() as u32).filter(move |&v| self.contains(v))
    }

    /// `(parent, child)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (1..=self.parent.len() as u32).filter_map(move |v| self.parent(v).map(|p| (p, v)))
    }
}

/// Fixed-size membership bitset over vertex ids `1..=n`.
#[derive(Debug, Clone)]
struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; (n + 1).div_ceil(64)];
        // bit 0 (id 0) and ids past n stay clear
        words[0] &= !1;
        let tail = (n + 1) % 64;
        if tail != 0 {
            *words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        Bitset { words }
    }

    #[inline]
    fn contains(&self, v: u32) -> bool {
        self.words[v as usize >> 6] >> (v & 63) & 1 == 1
    }

    #[inline]
    fn remove(&mut self, v: u32) {
        self.words[v as usize >> 6] &= !(1u64 << (v & 63));
    }
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    vertex: u32,
    /// Index into the neighbor order of the next neighbor to test.
    cursor: usize,
}

/// Mutable exploration state: active list, sleeping set and retired count.
#[derive(Debug, Clone)]
pub struct DfsState<'g> {
    offsets: &'g [usize],
    order: Cow<'g, [u32]>,
    active: Vec<Frame>,
    sleeping: Bitset,
    sleeping_count: usize,
    retired_count: usize,
}

impl<'g> DfsState<'g> {
    pub fn new(g: &'g SparseGraph, start: u32, policy: Policy) -> Result<Self> {
        if start == 0 || start as usize > g.n() {
            return Err(Error::invalid(format!("start vertex {start} outside 1..={}", g.n())));
        }
        let order = match policy {
            Policy::MinIndex => Cow::Borrowed(g.adjacency()),
            Policy::Uniform { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut shuffled = g.adjacency().to_vec();
                for w in g.offsets().windows(2) {
                    shuffled[w[0]..w[1]].shuffle(&mut rng);
                }
                Cow::Owned(shuffled)
            }
        };
        let mut sleeping = Bitset::full(g.n());
        sleeping.remove(start);
        Ok(DfsState {
            offsets: g.offsets(),
            order,
            active: vec![Frame { vertex: start, cursor: g.offsets()[start as usize - 1] }],
            sleeping,
            sleeping_count: g.n() - 1,
            retired_count: 0,
        })
    }

    /// `a_n`, the walker position.
    pub fn current(&self) -> Option<u32> {
        self.active.last().map(|f| f.vertex)
    }

    pub fn height(&self) -> i32 {
        self.active.len() as i32 - 1
    }

    pub fn active(&self) -> impl Iterator<Item = u32> + '_ {
        self.active.iter().map(|f| f.vertex)
    }

    pub fn is_sleeping(&self, v: u32) -> bool {
        self.sleeping.contains(v)
    }

    pub fn sleeping_count(&self) -> usize {
        self.sleeping_count
    }

    pub fn retired_count(&self) -> usize {
        self.retired_count
    }

    pub fn is_finished(&self) -> bool {
        self.active.is_empty()
    }

    /// Applies one rule. Returns `None` once the active list is empty.
    pub fn step(&mut self) -> Option<StepKind> {
        let frame = self.active.last_mut()?;
        let end = self.offsets[frame.vertex as usize];
        let mut cursor = frame.cursor;
        // Neighbors before the cursor were tested and are no longer sleeping.
        while cursor < end && !self.sleeping.contains(self.order[cursor]) {
            cursor += 1;
        }
        if cursor < end {
            let next = self.order[cursor];
            frame.cursor = cursor + 1;
            self.sleeping.remove(next);
            self.sleeping_count -= 1;
            self.active.push(Frame { vertex: next, cursor: self.offsets[next as usize - 1] });
            Some(StepKind::Forward(next))
        } else {
            frame.cursor = cursor;
            self.active.pop();
            self.retired_count += 1;
            Some(StepKind::Backtrack)
        }
    }
}

/// Explores the component of `start` to completion.
pub fn run_dfs(g: &SparseGraph, start: u32, policy: Policy) -> Result<(DfsTrace, SpanningTree)> {
    let mut state = DfsState::new(g, start, policy)?;
    let mut heights = vec![0i32];
    let mut walker = vec![start];
    let mut parent = vec![0u32; g.n()];

    while let Some(kind) = state.step() {
        if let StepKind::Forward(v) = kind {
            let len = state.active.len();
            parent[v as usize - 1] = state.active[len - 2].vertex;
        }
        heights.push(state.height());
        walker.push(state.current().unwrap_or(0));
        debug_assert_eq!(
            state.active.len() + state.sleeping_count + state.retired_count,
            g.n(),
            "active, sleeping and retired must partition the vertices"
        );
    }

    let component_size = state.retired_count;
    let trace = DfsTrace { start, component_size, heights, walker };
    Ok((trace, SpanningTree { root: start, parent }))
}

#[derive(Debug, Clone)]
pub struct GiantRun {
    pub trace: DfsTrace,
    pub tree: SpanningTree,
    /// `|C(1)| >= threshold_fraction * n`.
    pub accepted: bool,
}

/// Explores from vertex 1 and reports whether its component is large enough
/// to stand in for the largest one.
pub fn find_giant_run(g: &SparseGraph, threshold_fraction: f64, policy: Policy) -> Result<GiantRun> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::invalid(format!("threshold fraction must lie in (0, 1), got {threshold_fraction}")));
    }
    let (trace, tree) = run_dfs(g, 1, policy)?;
    let accepted = trace.component_size() as f64 >= threshold_fraction * g.n() as f64;
    Ok(GiantRun { trace, tree, accepted })
}
