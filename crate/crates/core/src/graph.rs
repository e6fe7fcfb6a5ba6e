//! Sparse Erdős–Rényi graphs `G(n, c/n)` and component censuses.
//!
//! Vertices are numbered `1..=n`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSpec {
    pub n: usize,
    pub c: f64,
    pub seed: u64,
}

impl GraphSpec {
    pub fn new(n: usize, c: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        if !c.is_finite() || c < 0.0 {
            return Err(Error::invalid(format!("mean-degree parameter must be finite and >= 0, got {c}")));
        }
        Ok(GraphSpec { n, c, seed })
    }

    /// Edge probability `min(c / n, 1)`.
    pub fn p(&self) -> f64 {
        (self.c / self.n as f64).min(1.0)
    }
}

/// Immutable adjacency in compressed sparse row form. Every neighbor list is
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    m: usize,
}

impl SparseGraph {
    /// Builds a graph from undirected edges. Duplicates are merged; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph needs at least one vertex"));
        }
        if n > u32::MAX as usize {
            return Err(Error::invalid(format!("vertex count {n} does not fit 32-bit ids")));
        }
        for &(a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a as usize > n || b as usize > n {
                return Err(Error::invalid(format!("edge ({a}, {b}) outside 1..={n}")));
            }
        }
        let mut graph = Self::from_edges_unchecked(n, edges);
        graph.dedup();
        Ok(graph)
    }

    fn from_edges_unchecked(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(a, b) in edges {
            degree[a as usize - 1] += 1;
            degree[b as usize - 1] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        for &(a, b) in edges {
            let (ia, ib) = (a as usize - 1, b as usize - 1);
            neighbors[fill[ia]] = b;
            fill[ia] += 1;
            neighbors[fill[ib]] = a;
            fill[ib] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        SparseGraph { n, offsets, neighbors, m: edges.len() }
    }

    fn dedup(&mut self) {
        let mut offsets = Vec::with_capacity(self.n + 1);
        offsets.push(0);
        let mut neighbors = Vec::with_capacity(self.neighbors.len());
        for v in 0..self.n {
            let list = &self.neighbors[self.offsets[v]..self.offsets[v + 1]];
            for (i, &w) in list.iter().enumerate() {
                if i == 0 || list[i - 1] != w {
                    neighbors.push(w);
                }
            }
            offsets.push(neighbors.len());
        }
        self.m = neighbors.len() / 2;
        self.offsets = offsets;
        self.neighbors = neighbors;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Concatenated neighbor lists.
    pub fn adjacency(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let i = v as usize - 1;
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        let i = v as usize - 1;
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        1..=self.n as u32
    }

    /// Each undirected edge once, as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.vertices()
            .flat_map(move |v| self.neighbors(v).iter().filter(move |&&w| w > v).map(move |&w| (v, w)))
    }

    /// Checks symmetry, sortedness, absence of loops and the `2m` total.
    pub fn validate(&self) -> Result<()> {
        if self.neighbors.len() != 2 * self.m || self.offsets.len() != self.n + 1 {
            return Err(Error::invalid("adjacency length does not match edge count"));
        }
        for v in self.vertices() {
            let list = self.neighbors(v);
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("neighbors of {v} are not strictly increasing")));
            }
            for &w in list {
                if w == v {
                    return Err(Error::invalid(format!("self-loop at {v}")));
                }
                if self.neighbors(w).binary_search(&v).is_err() {
                    return Err(Error::invalid(format!("edge {v}-{w} is not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Writes one `i j` line per edge with `i < j`.
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        for (a, b) in self.edges() {
            writeln!(out, "{a} {b}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Samples `G(n, p)` by jumping over the lower-triangle pair index with
/// geometric skips, so the expected work is `O(n + p n^2)`.
pub fn sample_graph(spec: &GraphSpec) -> Result<SparseGraph> {
    let spec = GraphSpec::new(spec.n, spec.c, spec.seed)?;
    if spec.n > u32::MAX as usize {
        return Err(Error::invalid(format!("vertex count {} does not fit 32-bit ids", spec.n)));
    }
    let n = spec.n as u64;
    let p = spec.p();
    let mut edges = Vec::with_capacity((p * (n as f64) * (n as f64 - 1.0) / 2.0 * 1.05) as usize + 16);
    if p > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let log_q = (-p).ln_1p();
        // Pair (v, w) with 0 <= w < v < n; row v holds v pairs.
        let mut v: u64 = 1;
        let mut w: i64 = -1;
        while v < n {
            let skip = if p >= 1.0 {
                0
            } else {
                let r: f64 = rng.random();
                ((-r).ln_1p() / log_q).floor() as i64
            };
            w += 1 + skip;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as u32 + 1, v as u32 + 1));
            }
        }
    }
    Ok(SparseGraph::from_edges_unchecked(spec.n, &edges))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCensus {
    /// `histogram[d]` is the number of vertices of degree `d`.
    pub histogram: Vec<usize>,
    pub max_degree: usize,
}

pub fn degree_census(g: &SparseGraph) -> DegreeCensus {
    let max_degree = g.vertices().map(|v| g.degree(v)).max().unwrap_or(0);
    let mut histogram = vec![0; max_degree + 1];
    for v in g.vertices() {
        histogram[g.degree(v)] += 1;
    }
    DegreeCensus { histogram, max_degree }
}

/// Disjoint-set forest with union by size and path compression.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind { parent: (0..len as u32).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut x = x;
        while self.parent[x] as usize != root {
            let next = self.parent[x] as usize;
            self.parent[x] = root as u32;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
        true
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentCensus {
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    pub largest: usize,
    /// Largest degree inside the surveyed subgraph.
    pub max_degree: usize,
}

impl ComponentCensus {
    pub fn surveyed(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Number of components of exactly `k` vertices.
    pub fn count_of_size(&self, k: usize) -> usize {
        self.sizes.iter().filter(|&&s| s == k).count()
    }
}

/// Components of the subgraph induced on `{v : mask(v)}`.
pub fn component_census(g: &SparseGraph, mask: impl Fn(u32) -> bool) -> ComponentCensus {
    let mut uf = UnionFind::new(g.n());
    let mut max_degree = 0;
    let mut members = Vec::new();
    for v in g.vertices() {
        if !mask(v) {
            continue;
        }
        members.push(v);
        let mut degree = 0;
        for &w in g.neighbors(v) {
            if mask(w) {
                degree += 1;
                if w > v {
                    uf.union(v as usize - 1, w as usize - 1);
                }
            }
        }
        max_degree = max_degree.max(degree);
    }
    let mut sizes: Vec<usize> = members
        .iter()
        .filter_map(|&v| {
            let i = v as usize - 1;
            (uf.find(i) == i).then(|| uf.set_size(i))
        })
        .collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    ComponentCensus { largest: sizes.first().copied().unwrap_or(0), sizes, max_degree }
}

/// True when no component size lies in `[n^0.1, n^0.9]`.
pub fn mesoscopic_check(census: &ComponentCensus, n: usize) -> bool {
    let (lo, hi) = ((n as f64).powf(0.1), (n as f64).powf(0.9));
    !census.sizes.iter().any(|&s| (lo..=hi).contains(&(s as f64)))
}
