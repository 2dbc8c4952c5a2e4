//! Cayley graphs of `PSL_2(F_q)` and `PGL_2(F_q)` with respect to the images
//! of a generator set.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, primes_in};
use crate::error::{Error, Result};
use crate::matrix::{psl_member, BetaMap, ProjMatrix};
use crate::quat::AlgebraParams;
use crate::tree::GeneratorSet;

/// Primes `q` in `[lo, hi]` with `q != p`, `q` not dividing `2PQ`, and
/// `-P`, `Q`, `p` all squares mod `q`.
pub fn admissible_q(params: AlgebraParams, p: i64, lo: i64, hi: i64) -> Vec<i64> {
    primes_in(lo.max(3), hi).into_iter().filter(|&q| is_admissible(params, p, q)).collect()
}

pub fn is_admissible(params: AlgebraParams, p: i64, q: i64) -> bool {
    q > 2
        && is_prime(q)
        && q != p
        && (2 * params.ramified * params.aux) % q != 0
        && legendre(-params.ramified, q) == 1
        && legendre(params.aux, q) == 1
        && legendre(p, q) == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Psl,
    Pgl,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Psl => "psl",
            Mode::Pgl => "pgl",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psl" => Ok(Mode::Psl),
            "pgl" => Ok(Mode::Pgl),
            other => Err(Error::Parse(format!("unknown mode {other:?}, expected psl or pgl"))),
        }
    }
}

/// Undirected multigraph as weighted adjacency lists. A self-loop of weight
/// `w` adds `w` to the diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGraph {
    /// `adj[u]` lists `(v, w)` sorted by `v`.
    pub adj: Vec<Vec<(usize, u32)>>,
}

impl WeightedGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize, u32)]) -> Self {
        let mut rows: Vec<BTreeMap<usize, u32>> = vec![BTreeMap::new(); n];
        for &(u, v, w) in edges {
            *rows[u].entry(v).or_insert(0) += w;
            if u != v {
                *rows[v].entry(u).or_insert(0) += w;
            }
        }
        WeightedGraph { adj: rows.into_iter().map(|r| r.into_iter().collect()).collect() }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> u32 {
        match self.adj[u].binary_search_by_key(&v, |&(x, _)| x) {
            Ok(i) => self.adj[u][i].1,
            Err(_) => 0,
        }
    }

    pub fn row_sum(&self, u: usize) -> u32 {
        self.adj[u].iter().map(|&(_, w)| w).sum()
    }

    /// Common row sum, if every row has the same one.
    pub fn regular_degree(&self) -> Option<u32> {
        let d = self.adj.first().map_or(0, |_| self.row_sum(0));
        (0..self.n()).all(|u| self.row_sum(u) == d).then_some(d)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n()).all(|u| self.adj[u].iter().all(|&(v, w)| self.weight(v, u) == w))
    }

    /// Edges `(u, v, w)` with `u <= v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (u, row) in self.adj.iter().enumerate() {
            for &(v, w) in row {
                if u <= v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    /// Sum of self-loop weights, the trace of the adjacency matrix.
    pub fn trace(&self) -> u64 {
        (0..self.n()).map(|u| self.weight(u, u) as u64).sum()
    }

    /// Trace of the squared adjacency matrix.
    pub fn trace_of_square(&self) -> u64 {
        self.adj.iter().flatten().map(|&(_, w)| (w as u64).pow(2)).sum()
    }

    pub fn component_count(&self) -> usize {
        let mut comp = vec![usize::MAX; self.n()];
        let mut count = 0;
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// A proper 2-colouring, if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n()];
        for s in 0..self.n() {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &(v, _) in &self.adj[u] {
                    match side[v] {
                        None => {
                            side[v] = Some(!su);
                            queue.push_back(v);
                        }
                        Some(sv) if sv == su => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CayleyGraph {
    pub q: u32,
    pub p: i64,
    pub mode: Mode,
    pub beta: BetaMap,
    /// Canonical matrices, sorted.
    pub vertices: Vec<ProjMatrix>,
    /// Images of the generators, with repetition.
    pub generator_images: Vec<ProjMatrix>,
    pub graph: WeightedGraph,
}

impl CayleyGraph {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn degree(&self) -> usize {
        self.generator_images.len()
    }

    pub fn identity_index(&self) -> usize {
        self.vertices.binary_search(&ProjMatrix::identity(self.q)).expect("identity is a vertex")
    }
}

/// Every element of `PGL_2(F_q)` (or of `PSL_2(F_q)`) in canonical form, sorted.
pub fn projective_group(q: u32, mode: Mode) -> Vec<ProjMatrix> {
    let mut out = Vec::new();
    let mut push = |e: [u32; 4]| {
        let m = ProjMatrix { q, entries: e };
        if m.det() != 0 && (mode == Mode::Pgl || psl_member(&m)) {
            out.push(m);
        }
    };
    for c in 0..q {
        for d in 0..q {
            push([0, 1, c, d]);
        }
    }
    for b in 0..q {
        for c in 0..q {
            for d in 0..q {
                push([1, b, c, d]);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Expected vertex count: `q(q^2-1)/2` for PSL, `q(q^2-1)` for PGL.
pub fn expected_order(q: u32, mode: Mode) -> usize {
    let q = q as usize;
    let full = q * (q * q - 1);
    match mode {
        Mode::Psl => full / 2,
        Mode::Pgl => full,
    }
}

/// The Cayley graph `x -- x * beta(s)` over the generator multiset.
pub fn build_cayley(s: &GeneratorSet, beta: &BetaMap, mode: Mode) -> Result<CayleyGraph> {
    let q = beta.q;
    if !is_admissible(beta.params, s.p, q as i64) && !(mode == Mode::Pgl && legendre(s.p, q as i64) == -1) {
        return Err(Error::Parameter(format!("q={q} is not admissible for p={}", s.p)));
    }
    if mode == Mode::Psl && legendre(s.p, q as i64) != 1 {
        return Err(Error::Parameter(format!("PSL mode needs (p/q) = 1; (p/q) = -1 for p={}, q={q}", s.p)));
    }
    let generator_images: Vec<ProjMatrix> = s.elements.iter().map(|g| beta.apply(&g.representative)).collect();
    let vertices = projective_group(q, mode);
    if vertices.len() != expected_order(q, mode) {
        return Err(Error::Consistency(format!(
            "found {} group elements, expected {}",
            vertices.len(),
            expected_order(q, mode)
        )));
    }
    let index: HashMap<u64, usize> = vertices.iter().enumerate().map(|(i, v)| (v.key(), i)).collect();
    let mut edges = Vec::with_capacity(vertices.len() * generator_images.len());
    for (u, x) in vertices.iter().enumerate() {
        for g in &generator_images {
            let y = x.mul(g);
            let v = *index
                .get(&y.key())
                .ok_or_else(|| Error::Consistency(format!("{:?} * {:?} left the vertex set", x.entries, g.entries)))?;
            edges.push((u, v));
        }
    }
    // each undirected edge appears once from each end; loops once per generator
    let mut counts: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for (u, v) in edges {
        *counts.entry((u, v)).or_insert(0) += 1;
    }
    let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new(); vertices.len()];
    for ((u, v), w) in counts {
        adj[u].push((v, w));
    }
    let graph = WeightedGraph { adj };
    if !graph.is_symmetric() {
        return Err(Error::Consistency("generator images are not closed under inversion".into()));
    }
    Ok(CayleyGraph { q, p: s.p, mode, beta: *beta, vertices, generator_images, graph })
}
