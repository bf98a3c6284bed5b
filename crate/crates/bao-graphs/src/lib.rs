//! Undirected-graph utilities: exact chromatic number, girth, colourings,
//! short cycles, disjoint unions, and a seeded random generator.

use std::fmt;

use bao_core::{BitSet, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A natural number or a distinguished infinity, used for girth (forests)
/// and in reports that talk about chromatic numbers of infinite families.
/// Never encoded as a large sentinel integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extended {
    Fin(usize),
    Inf,
}

impl Extended {
    pub fn as_finite(self) -> Option<usize> {
        match self {
            Extended::Fin(k) => Some(k),
            Extended::Inf => None,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Extended::*;
        match (self, other) {
            (Fin(a), Fin(b)) => a.cmp(b),
            (Fin(_), Inf) => std::cmp::Ordering::Less,
            (Inf, Fin(_)) => std::cmp::Ordering::Greater,
            (Inf, Inf) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Fin(k) => write!(f, "{k}"),
            Extended::Inf => write!(f, "inf"),
        }
    }
}

/// A finite simple undirected graph: irreflexive, symmetric adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph { n, adj: vec![BitSet::empty(n); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidInput(format!(
                "edge ({u},{v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::InvalidInput(format!("loop at vertex {u} not allowed")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter()
    }

    pub fn neighbour_set(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::new(n);
        if n >= 3 {
            for u in 0..n {
                g.add_edge(u, (u + 1) % n).unwrap();
            }
        }
        g
    }

    pub fn petersen() -> Graph {
        let mut g = Graph::new(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5).unwrap();
            g.add_edge(5 + i, 5 + (i + 2) % 5).unwrap();
            g.add_edge(i, 5 + i).unwrap();
        }
        g
    }

    /// Vertices of the union are re-indexed part by part in the given order.
    pub fn disjoint_union(parts: &[Graph]) -> Graph {
        let n = parts.iter().map(|g| g.n).sum();
        let mut out = Graph::new(n);
        let mut base = 0;
        for g in parts {
            for (u, v) in g.edges() {
                out.add_edge(base + u, base + v).unwrap();
            }
            base += g.n;
        }
        out
    }
}

/// Erdős–Rényi style seeded generator: every unordered pair becomes an edge
/// independently with probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Does `f` assign every vertex a colour with no monochromatic edge?
pub fn is_colouring(g: &Graph, f: &[usize]) -> bool {
    if f.len() != g.vertex_count() {
        return false;
    }
    g.edges().iter().all(|&(u, v)| f[u] != f[v])
}

/// Greedy clique, grown from each vertex in degree order: a lower bound for
/// the chromatic number used to prune the exact search.
fn greedy_clique_bound(g: &Graph) -> usize {
    let n = g.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g.degree(v)));
    let mut best = usize::from(n > 0);
    for &start in order.iter().take(24) {
        let mut clique = vec![start];
        let mut cand = g.neighbour_set(start).clone();
        while let Some(v) = cand.iter().max_by_key(|&v| g.neighbour_set(v).intersect(&cand).count())
        {
            clique.push(v);
            cand = cand.intersect(g.neighbour_set(v));
        }
        best = best.max(clique.len());
    }
    best
}

/// Try to colour `g` with at most `k` colours; returns a witness colouring.
/// Backtracking on the most-saturated vertex, with the fresh-colour symmetry
/// break (a vertex may open at most one previously unused colour).
pub fn colour_with(g: &Graph, k: usize) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    if n == 0 {
        return Some(Vec::new());
    }
    if k == 0 {
        return None;
    }
    let mut colours: Vec<Option<usize>> = vec![None; n];

    fn solve(g: &Graph, k: usize, colours: &mut Vec<Option<usize>>, used: usize) -> bool {
        let n = g.vertex_count();
        // Most constrained next: uncoloured vertex with the most distinct
        // coloured neighbours, ties by degree.
        let mut next: Option<(usize, usize, usize)> = None;
        for v in 0..n {
            if colours[v].is_some() {
                continue;
            }
            let mut seen = BitSet::empty(k);
            for u in g.neighbours(v) {
                if let Some(c) = colours[u] {
                    seen.insert(c);
                }
            }
            let sat = seen.count();
            let key = (v, sat, g.degree(v));
            match next {
                None => next = Some(key),
                Some((_, s, d)) if (sat, g.degree(v)) > (s, d) => next = Some(key),
                _ => {}
            }
        }
        let Some((v, _, _)) = next else {
            return true;
        };
        let mut forbidden = BitSet::empty(k);
        for u in g.neighbours(v) {
            if let Some(c) = colours[u] {
                forbidden.insert(c);
            }
        }
        let limit = (used + 1).min(k);
        for c in 0..limit {
            if forbidden.contains(c) {
                continue;
            }
            colours[v] = Some(c);
            if solve(g, k, colours, used.max(c + 1)) {
                return true;
            }
            colours[v] = None;
        }
        false
    }

    if solve(g, k, &mut colours, 0) {
        Some(colours.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

/// Exact chromatic number.  Finite graphs always get a finite value; the
/// `Extended` range exists because callers compare against the infinite
/// chromatic number of graph families in reports.
pub fn chromatic_number(g: &Graph) -> Extended {
    let n = g.vertex_count();
    if n == 0 {
        return Extended::Fin(0);
    }
    if g.edge_count() == 0 {
        return Extended::Fin(1);
    }
    let lb = greedy_clique_bound(g).max(2);
    for k in lb..=n {
        if colour_with(g, k).is_some() {
            return Extended::Fin(k);
        }
    }
    unreachable!("a graph on n vertices is n-colourable")
}

/// Girth: length of a shortest cycle, `Inf` for forests.  One BFS per
/// vertex; a non-tree edge seen at depth d closes a cycle of length at most
/// `dist(u) + dist(w) + 1`, and scanning all roots makes the minimum exact.
pub fn girth(g: &Graph) -> Extended {
    let n = g.vertex_count();
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        let mut queue = std::collections::VecDeque::new();
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if let Some(b) = best {
                // Cycles through deeper layers cannot beat the current best.
                if 2 * dist[u] >= b {
                    continue;
                }
            }
            for w in g.neighbours(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    if best.is_none_or(|b| len < b) {
                        best = Some(len);
                    }
                }
            }
        }
    }
    match best {
        Some(b) => Extended::Fin(b),
        None => Extended::Inf,
    }
}

/// All simple cycles of length at most `max_len`, each reported once as a
/// vertex sequence starting at its smallest vertex, second element smaller
/// than the last (fixing direction).
pub fn find_cycles(g: &Graph, max_len: usize) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    if max_len < 3 {
        return out;
    }
    let mut path: Vec<usize> = Vec::with_capacity(max_len);

    fn dfs(
        g: &Graph,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut BitSet,
        max_len: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let u = *path.last().unwrap();
        for w in g.neighbours(u) {
            if w == start {
                if path.len() >= 3 && path[1] < *path.last().unwrap() {
                    out.push(path.clone());
                }
                continue;
            }
            if w < start || on_path.contains(w) || path.len() == max_len {
                continue;
            }
            path.push(w);
            on_path.insert(w);
            dfs(g, start, path, on_path, max_len, out);
            on_path.remove(w);
            path.pop();
        }
    }

    for start in 0..n {
        path.clear();
        path.push(start);
        let mut on_path = BitSet::empty(n);
        on_path.insert(start);
        dfs(g, start, &mut path, &mut on_path, max_len, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_needs_all_colours() {
        for n in 1..=6 {
            assert_eq!(chromatic_number(&Graph::complete(n)), Extended::Fin(n));
        }
    }

    #[test]
    fn odd_cycle_is_three_chromatic() {
        let c5 = Graph::cycle(5);
        assert_eq!(chromatic_number(&c5), Extended::Fin(3));
        assert_eq!(girth(&c5), Extended::Fin(5));
        assert!(find_cycles(&c5, 4).is_empty());
        assert_eq!(find_cycles(&c5, 5).len(), 1);
    }

    #[test]
    fn petersen_invariants() {
        let p = Graph::petersen();
        assert_eq!(p.edge_count(), 15);
        assert_eq!(chromatic_number(&p), Extended::Fin(3));
        assert_eq!(girth(&p), Extended::Fin(5));
    }

    #[test]
    fn trees_have_infinite_girth() {
        let tree = Graph::from_edges(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        assert_eq!(girth(&tree), Extended::Inf);
        assert_eq!(chromatic_number(&tree), Extended::Fin(2));
    }

    #[test]
    fn edgeless_graph_is_one_chromatic() {
        assert_eq!(chromatic_number(&Graph::new(4)), Extended::Fin(1));
    }

    #[test]
    fn union_takes_the_max() {
        let g = Graph::complete(4);
        let h = Graph::cycle(5);
        let u = Graph::disjoint_union(&[g.clone(), h.clone()]);
        assert_eq!(
            chromatic_number(&u),
            chromatic_number(&g).max(chromatic_number(&h))
        );
    }

    #[test]
    fn constant_map_is_no_colouring_of_a_triangle() {
        let k3 = Graph::complete(3);
        assert!(!is_colouring(&k3, &[0, 0, 0]));
        assert!(is_colouring(&k3, &[0, 1, 2]));
    }

    #[test]
    fn loops_rejected() {
        assert!(Graph::from_edges(2, &[(1, 1)]).is_err());
    }

    #[test]
    fn extended_ordering() {
        assert!(Extended::Fin(100) < Extended::Inf);
        assert_eq!(format!("{}", Extended::Inf), "inf");
    }
}
