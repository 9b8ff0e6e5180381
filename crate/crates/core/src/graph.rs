//! Construction, combination, and serialization of the graph families under
//! study, plus the structural predicates (connectivity, triangle presence)
//! the rest of the crate relies on.
//!
//! All graphs are simple, loopless, unweighted, and undirected, stored as a
//! dense 0/1 adjacency matrix. Every constructor validates symmetry, zero
//! diagonal, and 0/1 entries on its output.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Simple undirected graph with a construction provenance string.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<u8>, // row-major n*n
    provenance: String,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Graph({}, n={}, edges={})",
            self.provenance,
            self.n,
            self.edge_count()
        )
    }
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Graph", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("edges", &self.edges())?;
        st.serialize_field("provenance", &self.provenance)?;
        st.end()
    }
}

impl Graph {
    fn from_raw(n: usize, adj: Vec<u8>, provenance: String) -> Self {
        let g = Graph { n, adj, provenance };
        g.validate();
        g
    }

    /// Builds a graph from an explicit edge list. Self-loops and
    /// out-of-range endpoints are rejected; duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], provenance: &str) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph must have n >= 1".into()));
        }
        let mut adj = vec![0u8; n * n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at node {u}")));
            }
            adj[u * n + v] = 1;
            adj[v * n + u] = 1;
        }
        Ok(Self::from_raw(n, adj, provenance.to_string()))
    }

    /// Asserts the structural invariants: symmetric, zero diagonal, 0/1.
    fn validate(&self) {
        assert_eq!(self.adj.len(), self.n * self.n);
        for i in 0..self.n {
            assert_eq!(self.adj[i * self.n + i], 0, "nonzero diagonal at {i}");
            for j in 0..self.n {
                let a = self.adj[i * self.n + j];
                assert!(a <= 1, "entry ({i},{j}) = {a} is not 0/1");
                assert_eq!(a, self.adj[j * self.n + i], "asymmetry at ({i},{j})");
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v] != 0
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u * self.n..(u + 1) * self.n]
            .iter()
            .map(|&a| a as usize)
            .sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u * self.n..(u + 1) * self.n]
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(v, _)| v)
    }

    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|u| self.neighbors(u).collect()).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|&a| a as usize).sum::<usize>() / 2
    }

    /// Edges as (u, v) pairs with u < v, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Dense adjacency as f64, row-major.
    pub fn adjacency_f64(&self) -> Vec<f64> {
        self.adj.iter().map(|&a| a as f64).collect()
    }

    /// Text edge-list format: first line `n <count>`, then one `u v` pair
    /// per line with u < v, newline-terminated.
    pub fn to_edge_list_string(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Parses the text edge-list format produced by
    /// [`Graph::to_edge_list_string`].
    pub fn parse_edge_list(text: &str, provenance: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let mut parts = header.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some("n"), Some(count), None) => {
                let n: usize = count
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad node count {count:?}")))?;
                let mut edges = Vec::new();
                for line in lines {
                    let mut it = line.split_whitespace();
                    let (u, v) = match (it.next(), it.next(), it.next()) {
                        (Some(u), Some(v), None) => (u, v),
                        _ => return Err(Error::Parse(format!("bad edge line {line:?}"))),
                    };
                    let u: usize = u
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad endpoint {u:?}")))?;
                    let v: usize = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad endpoint {v:?}")))?;
                    if u >= v {
                        return Err(Error::Parse(format!(
                            "edge {u} {v} violates u < v ordering"
                        )));
                    }
                    edges.push((u, v));
                }
                Self::from_edges(n, &edges, provenance)
            }
            _ => Err(Error::Parse(format!(
                "bad header {header:?}; expected \"n <count>\""
            ))),
        }
    }
}

/// Complete graph `K_c`.
pub fn complete_graph(c: usize) -> Result<Graph> {
    if c < 1 {
        return Err(Error::InvalidParameter("complete(c) requires c >= 1".into()));
    }
    let mut adj = vec![1u8; c * c];
    for i in 0..c {
        adj[i * c + i] = 0;
    }
    Ok(Graph::from_raw(c, adj, format!("complete({c})")))
}

/// Cycle graph `C_k`, k >= 3.
pub fn cycle_graph(k: usize) -> Result<Graph> {
    if k < 3 {
        return Err(Error::InvalidParameter("cycle(k) requires k >= 3".into()));
    }
    let edges: Vec<(usize, usize)> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    let edges: Vec<(usize, usize)> = edges
        .into_iter()
        .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
        .collect();
    let mut g = Graph::from_edges(k, &edges, "")?;
    g.provenance = format!("cycle({k})");
    Ok(g)
}

/// Path graph `P_k` on k nodes (a convenience constructor used heavily by
/// the test fixtures; not part of the family-spec grammar).
pub fn path_graph(k: usize) -> Result<Graph> {
    if k < 1 {
        return Err(Error::InvalidParameter("path(k) requires k >= 1".into()));
    }
    let edges: Vec<(usize, usize)> = (0..k.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    let mut g = Graph::from_edges(k, &edges, "")?;
    g.provenance = format!("path({k})");
    Ok(g)
}

/// The matched-clique graph: `m` copies of `K_c`, each joined by a perfect
/// matching to one shared independent set of size `c`.
///
/// Layout: nodes `0..c` form the independent set; block `b` of clique nodes
/// occupies `c + b*c .. c + (b+1)*c`; independent node `i` is matched to
/// node `i` of every block.
pub fn kks_graph(c: usize, m: usize) -> Result<Graph> {
    if c < 2 {
        return Err(Error::InvalidParameter("kks(c, m) requires c >= 2".into()));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("kks(c, m) requires m >= 1".into()));
    }
    let n = c * (m + 1);
    let mut edges = Vec::with_capacity(m * c * (c - 1) / 2 + c * m);
    for b in 0..m {
        let off = c + b * c;
        for i in 0..c {
            for j in (i + 1)..c {
                edges.push((off + i, off + j));
            }
            edges.push((i, off + i));
        }
    }
    let mut g = Graph::from_edges(n, &edges, "")?;
    g.provenance = format!("kks({c},{m})");
    Ok(g)
}

fn spider_leg_node(leg: usize, dist: usize, l: usize) -> usize {
    // center is node 0; leg t holds nodes at distance 1..=l contiguously
    1 + leg * l + (dist - 1)
}

/// Spider: one center of degree `d`, each leg a path of `l` edges.
pub fn spider(d: usize, l: usize) -> Result<Graph> {
    if d < 1 || l < 1 {
        return Err(Error::InvalidParameter(
            "spider(d, l) requires d >= 1 and l >= 1".into(),
        ));
    }
    let n = 1 + d * l;
    let mut edges = Vec::with_capacity(d * l);
    for t in 0..d {
        let mut prev = 0;
        for s in 1..=l {
            let u = spider_leg_node(t, s, l);
            edges.push((prev.min(u), prev.max(u)));
            prev = u;
        }
    }
    let mut g = Graph::from_edges(n, &edges, "")?;
    g.provenance = format!("spider({d},{l})");
    Ok(g)
}

/// `k` disjoint spiders `S(d, l)` whose outermost nodes are wired leg-wise
/// into cycles `C_k`.
pub fn spider_cycle(d: usize, l: usize, k: usize) -> Result<Graph> {
    if d < 1 || l < 1 {
        return Err(Error::InvalidParameter(
            "spidercycle(d, l, k) requires d >= 1 and l >= 1".into(),
        ));
    }
    if k < 3 {
        return Err(Error::InvalidParameter(
            "spidercycle(d, l, k) requires k >= 3".into(),
        ));
    }
    let ns = 1 + d * l;
    let n = k * ns;
    let mut edges = Vec::new();
    let s = spider(d, l)?;
    for copy in 0..k {
        for (u, v) in s.edges() {
            edges.push((copy * ns + u, copy * ns + v));
        }
    }
    for t in 0..d {
        for copy in 0..k {
            let u = copy * ns + spider_leg_node(t, l, l);
            let v = ((copy + 1) % k) * ns + spider_leg_node(t, l, l);
            edges.push((u.min(v), u.max(v)));
        }
    }
    let mut g = Graph::from_edges(n, &edges, "")?;
    g.provenance = format!("spidercycle({d},{l},{k})");
    Ok(g)
}

/// `k1` disjoint spider cycles `SC(d, l, [k2])` whose inner nodes
/// (distance 1 from a center) are wired into cycles `C_{k1}` across copies,
/// one cycle per (spider position, leg) pair. Requires `l >= 2` so inner
/// and outer nodes are distinct.
pub fn spider_torus(d: usize, l: usize, k1: usize, k2: usize) -> Result<Graph> {
    if l < 2 {
        return Err(Error::InvalidParameter(
            "spidertorus(d, l, k1, k2) requires l >= 2 so inner nodes exist".into(),
        ));
    }
    if k1 < 3 || k2 < 3 {
        return Err(Error::InvalidParameter(
            "spidertorus(d, l, k1, k2) requires k1, k2 >= 3".into(),
        ));
    }
    let ns = 1 + d * l;
    let nsc = k2 * ns;
    let n = k1 * nsc;
    let sc = spider_cycle(d, l, k2)?;
    let mut edges = Vec::new();
    for copy in 0..k1 {
        for (u, v) in sc.edges() {
            edges.push((copy * nsc + u, copy * nsc + v));
        }
    }
    for pos in 0..k2 {
        for t in 0..d {
            for copy in 0..k1 {
                let u = copy * nsc + pos * ns + spider_leg_node(t, 1, l);
                let v = ((copy + 1) % k1) * nsc + pos * ns + spider_leg_node(t, 1, l);
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    let mut g = Graph::from_edges(n, &edges, "")?;
    g.provenance = format!("spidertorus({d},{l},{k1},{k2})");
    Ok(g)
}

/// Cartesian product `G □ H`; adjacency `A_G ⊗ I + I ⊗ A_H` with the
/// row-major node order `(i, j) -> i * |H| + j`.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Graph {
    let (ng, nh) = (g.n, h.n);
    let n = ng * nh;
    let mut adj = vec![0u8; n * n];
    for i in 0..ng {
        for ip in 0..ng {
            for j in 0..nh {
                for jp in 0..nh {
                    let a = (i == ip && h.has_edge(j, jp)) || (j == jp && g.has_edge(i, ip));
                    if a {
                        adj[(i * nh + j) * n + (ip * nh + jp)] = 1;
                    }
                }
            }
        }
    }
    Graph::from_raw(
        n,
        adj,
        format!("cartesian({},{})", g.provenance, h.provenance),
    )
}

/// Tensor (Kronecker) product `G ⊗ H`; adjacency `A_G ⊗ A_H` with the same
/// row-major node order as [`cartesian_product`].
pub fn tensor_product(g: &Graph, h: &Graph) -> Graph {
    let (ng, nh) = (g.n, h.n);
    let n = ng * nh;
    let mut adj = vec![0u8; n * n];
    for i in 0..ng {
        for ip in 0..ng {
            if !g.has_edge(i, ip) {
                continue;
            }
            for j in 0..nh {
                for jp in 0..nh {
                    if h.has_edge(j, jp) {
                        adj[(i * nh + j) * n + (ip * nh + jp)] = 1;
                    }
                }
            }
        }
    }
    Graph::from_raw(n, adj, format!("tensor({},{})", g.provenance, h.provenance))
}

/// Breadth-first connectivity.
pub fn is_connected(g: &Graph) -> bool {
    if g.n == 0 {
        return true;
    }
    let mut seen = vec![false; g.n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for v in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == g.n
}

/// Triangle presence via `trace(A^3) > 0`.
pub fn has_triangle(g: &Graph) -> bool {
    trace_a3(g) > 0
}

/// Exact `trace(A^3)` (six times the triangle count).
pub fn trace_a3(g: &Graph) -> u64 {
    let n = g.n;
    let mut tr = 0u64;
    for i in 0..n {
        for j in 0..n {
            if !g.has_edge(i, j) {
                continue;
            }
            for k in 0..n {
                if g.has_edge(j, k) && g.has_edge(k, i) {
                    tr += 1;
                }
            }
        }
    }
    tr
}
