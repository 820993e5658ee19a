//! Weighted undirected graphs and the set, metric, and walk primitives built on them.
//!
//! Distances are hop counts; edge weights only enter volumes, cuts, and the
//! random-walk kernel `p(u, v) = w_uv / ω_u`.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance sentinel for vertices that cannot be reached.
pub const UNREACHABLE: usize = usize::MAX;

/// Sorted, duplicate-free list of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    /// Every vertex `0..n`.
    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Position of `v` inside the sorted list.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().all(|v| !large.contains(v))
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    /// Membership mask of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in self.iter() {
            m[v] = true;
        }
        m
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        VertexSet::new(v)
    }
}

/// Undirected graph with strictly positive symmetric edge weights.
///
/// Immutable once built. Adjacency lists are sorted by neighbor id.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    omega: Vec<f64>,
    total: f64,
}

impl WeightedGraph {
    /// Build from an edge list over vertices `0..n`. Duplicate edges (in either
    /// orientation) are summed.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut summed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, (u, v, w)) in edges.into_iter().enumerate() {
            let line = i + 1;
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop { line, vertex: u });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight { line, weight: w });
            }
            *summed.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        Self::from_summed(n, summed)
    }

    fn from_summed(n: usize, summed: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adj = vec![Vec::new(); n];
        for (&(u, v), &w) in &summed {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        let omega: Vec<f64> = adj
            .iter()
            .map(|l| l.iter().map(|&(_, w)| w).sum())
            .collect();
        if let Some(u) = omega.iter().position(|&w| w <= 0.0) {
            return Err(Error::IsolatedVertex(u));
        }
        let total = omega.iter().sum();
        Ok(WeightedGraph { adj, omega, total })
    }

    /// Parse the `u v [w]` edge-list format. `#` starts a comment; weight
    /// defaults to 1; vertex count is the largest id plus one.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut summed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut max_id: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.len() < 2 || tokens.len() > 3 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected `u v [w]`, got {} fields", tokens.len()),
                });
            }
            let parse_id = |t: &str| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad vertex id `{t}`"),
                })
            };
            let u = parse_id(tokens[0])?;
            let v = parse_id(tokens[1])?;
            let w = match tokens.get(2) {
                Some(t) => t.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad weight `{t}`"),
                })?,
                None => 1.0,
            };
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight { line, weight: w });
            }
            if u == v {
                return Err(Error::SelfLoop { line, vertex: u });
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            *summed.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let n = max_id.map_or(0, |m| m + 1);
        Self::from_summed(n, summed)
    }

    /// Serialize back to the edge-list format, one `u v w` line per edge with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            if w == 1.0 {
                out.push_str(&format!("{u} {v}\n"));
            } else {
                out.push_str(&format!("{u} {v} {w}\n"));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Vertex weight ω_u, the sum of incident edge weights.
    pub fn omega(&self, u: usize) -> f64 {
        self.omega[u]
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }

    /// Sum of ω over all vertices (twice the total edge weight).
    pub fn total_volume(&self) -> f64 {
        self.total
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adj[u]
            .binary_search_by_key(&v, |&(x, _)| x)
            .map(|i| self.adj[u][i].1)
            .unwrap_or(0.0)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    pub fn check_set(&self, s: &VertexSet) -> Result<()> {
        match s.as_slice().last() {
            Some(&v) => self.check_vertex(v),
            None => Ok(()),
        }
    }

    pub fn volume(&self, s: &VertexSet) -> f64 {
        s.iter().map(|v| self.omega[v]).sum()
    }

    /// Total weight of edges with one endpoint in `a` and the other in `b`
    /// (sets assumed disjoint).
    pub fn cross_weight(&self, a: &VertexSet, b: &VertexSet) -> f64 {
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let in_large = large.mask(self.n());
        small
            .iter()
            .flat_map(|u| self.adj[u].iter())
            .filter(|&&(v, _)| in_large[v])
            .map(|&(_, w)| w)
            .sum()
    }

    /// Weight of edges leaving `s`.
    pub fn cut_weight(&self, s: &VertexSet) -> f64 {
        let inside = s.mask(self.n());
        s.iter()
            .flat_map(|u| self.adj[u].iter())
            .filter(|&&(v, _)| !inside[v])
            .map(|&(_, w)| w)
            .sum()
    }

    /// φ(S) = w(S, S̄) / min(vol S, vol S̄).
    pub fn conductance(&self, s: &VertexSet) -> Result<f64> {
        self.check_set(s)?;
        if s.is_empty() {
            return Err(Error::DegenerateSet("empty set"));
        }
        if s.len() == self.n() {
            return Err(Error::DegenerateSet("set equals the whole vertex set"));
        }
        let vol = self.volume(s);
        let denom = vol.min(self.total - vol);
        Ok(self.cut_weight(s) / denom)
    }

    /// φ(A, B) = w(A, B) / min(vol A, vol B) for disjoint nonempty `a`, `b`.
    pub fn mutual_conductance(&self, a: &VertexSet, b: &VertexSet) -> Result<f64> {
        self.check_set(a)?;
        self.check_set(b)?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::DegenerateSet("empty set"));
        }
        if !a.is_disjoint(b) {
            return Err(Error::OverlappingSets);
        }
        Ok(self.cross_weight(a, b) / self.volume(a).min(self.volume(b)))
    }

    /// Hop distances from `source`; [`UNREACHABLE`] where no path exists.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        self.distances_from_set(std::iter::once(source))
    }

    /// Multi-source hop distances, i.e. `d_G(v, S)` for every `v`.
    pub fn distances_from_set(&self, sources: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.n()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adj[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Vertices at hop distance exactly one from `b` and outside it.
    pub fn exterior_boundary(&self, b: &VertexSet) -> VertexSet {
        let inside = b.mask(self.n());
        b.iter()
            .flat_map(|u| self.adj[u].iter())
            .filter(|&&(v, _)| !inside[v])
            .map(|&(v, _)| v)
            .collect()
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        self.induced_components(&VertexSet::full(self.n()))
    }

    /// Connected components of the subgraph induced by `s`.
    pub fn induced_components(&self, s: &VertexSet) -> Vec<VertexSet> {
        let inside = s.mask(self.n());
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for start in s.iter() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if inside[v] && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            out.push(VertexSet::new(comp));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != UNREACHABLE)
    }

    pub fn induces_connected(&self, s: &VertexSet) -> bool {
        s.is_empty() || self.induced_components(s).len() == 1
    }

    /// Largest hop distance between two vertices; `None` when disconnected.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n() {
            for d in self.bfs_distances(s) {
                if d == UNREACHABLE {
                    return None;
                }
                best = best.max(d);
            }
        }
        Some(best)
    }

    /// Two-colourability of every component. A connected graph without
    /// self-loops has a periodic walk exactly when it is bipartite.
    pub fn is_bipartite(&self) -> bool {
        let mut colour: Vec<Option<bool>> = vec![None; self.n()];
        for start in 0..self.n() {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(false);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                let cu = colour[u].unwrap();
                for &(v, _) in &self.adj[u] {
                    match colour[v] {
                        None => {
                            colour[v] = Some(!cu);
                            stack.push(v);
                        }
                        Some(cv) if cv == cu => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    pub fn transition_kernel(&self) -> TransitionKernel {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for u in 0..n {
            for &(v, w) in &self.adj[u] {
                m[(u, v)] = w / self.omega[u];
            }
        }
        TransitionKernel { matrix: m }
    }

    /// Stationary distribution π(u) = ω_u / Σω.
    pub fn stationary(&self) -> Vec<f64> {
        self.omega.iter().map(|w| w / self.total).collect()
    }
}

/// Dense row-stochastic matrix of the simple weighted walk.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionKernel {
    matrix: DMatrix<f64>,
}

impl TransitionKernel {
    /// Wrap an arbitrary row-stochastic matrix.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidParameter("kernel must be square".into()));
        }
        for (i, row) in matrix.row_iter().enumerate() {
            if row.iter().any(|&p| !(p >= 0.0)) || (row.sum() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "row {i} is not a probability vector"
                )));
            }
        }
        Ok(TransitionKernel { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn p(&self, u: usize, v: usize) -> f64 {
        self.matrix[(u, v)]
    }

    /// Largest |row sum − 1|.
    pub fn row_sum_defect(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest |μ_u p(u,v) − μ_v p(v,u)|.
    pub fn detailed_balance_defect(&self, mu: &[f64]) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for u in 0..n {
            for v in 0..n {
                worst =
                    worst.max((mu[u] * self.matrix[(u, v)] - mu[v] * self.matrix[(v, u)]).abs());
            }
        }
        worst
    }
}
