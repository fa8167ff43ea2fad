//! Communication-topology construction and graph metrics.
//!
//! Generated graphs are bidirectional; the adjacency representation also
//! admits directed strongly-connected graphs supplied through the edge-list
//! loader. Connectivity here always means strong connectivity.

use thiserror::Error;

use crate::model::{AgentId, Point};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph is not strongly connected")]
    Disconnected,
    #[error("self-loops are not allowed (node {0})")]
    SelfLoop(usize),
    #[error("node id {0} out of range for {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("edge-list parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("range radius must be positive, got {0}")]
    BadRadius(f64),
}

/// A communication graph over `n` agents. Stores out- and in-adjacency so
/// directed graphs work; constructors for generated topologies always add
/// both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct CommGraph {
    n: usize,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl CommGraph {
    pub fn empty(n: usize) -> CommGraph {
        CommGraph {
            n,
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    /// Total number of directed edges (an undirected edge counts twice).
    pub fn n_directed_edges(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn add_directed_edge(&mut self, from: usize, to: usize) -> Result<(), GraphError> {
        if from == to {
            return Err(GraphError::SelfLoop(from));
        }
        if from >= self.n || to >= self.n {
            return Err(GraphError::NodeOutOfRange(from.max(to), self.n));
        }
        if !self.out[from].contains(&to) {
            self.out[from].push(to);
            self.inn[to].push(from);
        }
        Ok(())
    }

    pub fn add_undirected_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.add_directed_edge(a, b)?;
        self.add_directed_edge(b, a)
    }

    fn sort_adjacency(&mut self) {
        for l in &mut self.out {
            l.sort_unstable();
        }
        for l in &mut self.inn {
            l.sort_unstable();
        }
    }

    /// Complete graph: every pair of distinct agents adjacent.
    pub fn fully_connected(n: usize) -> CommGraph {
        let mut g = CommGraph::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.out[i].push(j);
                    g.inn[i].push(j);
                }
            }
        }
        g
    }

    /// The Euclidean minimum spanning tree of the given positions, as a
    /// bidirectional graph: the edge-minimal strongly-connected topology,
    /// which is the adversarial case for information propagation.
    ///
    /// Kruskal over all pairs; equal-weight ties broken by
    /// `(min index, max index)` lexicographic order so the tree is unique
    /// and reproducible even with duplicate positions.
    pub fn mst_graph(positions: &[Point]) -> CommGraph {
        let n = positions.len();
        let mut g = CommGraph::empty(n);
        if n <= 1 {
            return g;
        }
        let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                edges.push((positions[i].distance(positions[j]), i, j));
            }
        }
        edges.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite distances")
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });

        let mut dsu = DisjointSet::new(n);
        let mut added = 0;
        for (_, i, j) in edges {
            if dsu.union(i, j) {
                g.add_undirected_edge(i, j).expect("valid mst edge");
                added += 1;
                if added == n - 1 {
                    break;
                }
            }
        }
        g.sort_adjacency();
        g
    }

    /// Total Euclidean weight of this graph's undirected edges against the
    /// given positions. Each symmetric pair is counted once.
    pub fn undirected_weight(&self, positions: &[Point]) -> f64 {
        let mut total = 0.0;
        for (i, outs) in self.out.iter().enumerate() {
            for &j in outs {
                if i < j {
                    total += positions[i].distance(positions[j]);
                }
            }
        }
        total
    }

    /// Proximity graph: agents within `radius` of each other are adjacent.
    /// Connectivity is not guaranteed; callers must check.
    pub fn range_graph(positions: &[Point], radius: f64) -> Result<CommGraph, GraphError> {
        if !(radius > 0.0) {
            return Err(GraphError::BadRadius(radius));
        }
        let n = positions.len();
        let mut g = CommGraph::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if positions[i].distance(positions[j]) <= radius {
                    g.add_undirected_edge(i, j)?;
                }
            }
        }
        g.sort_adjacency();
        Ok(g)
    }

    /// Out-neighbors: the agents that receive this agent's broadcasts.
    pub fn neighbors(&self, a: AgentId) -> &[usize] {
        &self.out[a.0]
    }

    /// In-neighbors: the agents whose broadcasts this agent receives.
    pub fn in_neighbors(&self, a: AgentId) -> &[usize] {
        &self.inn[a.0]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.out[i].iter().all(|&j| self.out[j].contains(&i)))
    }

    fn bfs_dists(&self, start: usize, adj: &[Vec<usize>]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[start] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Strong connectivity: every node reaches node 0 and is reached by it.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let fwd = self.bfs_dists(0, &self.out);
        if fwd.iter().any(|&d| d == usize::MAX) {
            return false;
        }
        let bwd = self.bfs_dists(0, &self.inn);
        bwd.iter().all(|&d| d != usize::MAX)
    }

    /// Longest shortest path over all ordered pairs. Errors on a
    /// disconnected graph; a singleton graph has diameter 0.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        if self.n <= 1 {
            return Ok(0);
        }
        let mut best = 0;
        for s in 0..self.n {
            let dist = self.bfs_dists(s, &self.out);
            for &d in &dist {
                if d == usize::MAX {
                    return Err(GraphError::Disconnected);
                }
                best = best.max(d);
            }
        }
        Ok(best)
    }

    /// Serializes to the edge-list text format: a `nodes <n>` header then
    /// one directed `i j` pair per line (undirected edges appear in both
    /// directions).
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("nodes {}\n", self.n);
        for (i, outs) in self.out.iter().enumerate() {
            for &j in outs {
                s.push_str(&format!("{i} {j}\n"));
            }
        }
        s
    }

    /// Parses the edge-list text format. Blank lines and `#` comments are
    /// skipped; every `i j` line adds the directed edge `i -> j`.
    pub fn from_edge_list(text: &str) -> Result<CommGraph, GraphError> {
        let mut graph: Option<CommGraph> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match graph.as_mut() {
                None => {
                    let (kw, n) = (parts.next(), parts.next());
                    if kw != Some("nodes") {
                        return Err(GraphError::Parse {
                            line: line_no,
                            message: "expected header `nodes <count>`".into(),
                        });
                    }
                    let n: usize = n
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| GraphError::Parse {
                            line: line_no,
                            message: "invalid node count".into(),
                        })?;
                    graph = Some(CommGraph::empty(n));
                }
                Some(g) => {
                    let parse = |tok: Option<&str>| -> Result<usize, GraphError> {
                        tok.and_then(|v| v.parse().ok())
                            .ok_or_else(|| GraphError::Parse {
                                line: line_no,
                                message: "expected `i j` edge pair".into(),
                            })
                    };
                    let i = parse(parts.next())?;
                    let j = parse(parts.next())?;
                    g.add_directed_edge(i, j)
                        .map_err(|e| GraphError::Parse {
                            line: line_no,
                            message: e.to_string(),
                        })?;
                }
            }
        }
        let mut g = graph.ok_or(GraphError::Parse {
            line: 0,
            message: "empty edge-list file".into(),
        })?;
        g.sort_adjacency();
        Ok(g)
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            false
        } else {
            self.parent[ra] = rb;
            true
        }
    }
}
