//! Undirected simple graphs, the edge-list text format and seeded generators.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

use crate::net::{rng_stream, Entity, Purpose, StreamKey};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad graph spec `{0}`")]
    BadSpec(String),
    #[error("cannot generate graph: {0}")]
    Generator(String),
}

/// An undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    bits: Vec<u64>,
    row_words: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, repeated edges and bad ids.
    /// Edges are stored as `(min, max)` in input order.
    pub fn new<I>(n: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let row_words = n.div_ceil(64).max(1);
        let mut g = Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
            bits: vec![0; row_words * n],
            row_words,
        };
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if g.has_edge(u, v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            g.set_bit(u, v);
            g.set_bit(v, u);
            g.adj[u].push(v as u32);
            g.adj[v].push(u as u32);
            g.edges.push((u.min(v) as u32, u.max(v) as u32));
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    fn set_bit(&mut self, u: usize, v: usize) {
        self.bits[u * self.row_words + v / 64] |= 1 << (v % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Maximum degree; 0 for the empty graph.
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    /// Edges as `(min, max)` pairs.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.bits[u * self.row_words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn has_triangle(&self) -> bool {
        self.edges.iter().any(|&(u, v)| {
            self.adj[u as usize]
                .iter()
                .any(|&w| w != v && self.has_edge(v as usize, w as usize))
        })
    }

    /// Parses the edge-list format: a header line `n m`, then `m` lines `u v`
    /// with 0-indexed endpoints. Blank lines and `#` comments are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing `n m` header".into(),
        })?;
        let [n, m] = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, text) in lines {
            if edges.len() == m {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("more than the {m} declared edges"),
                });
            }
            let [u, v] = parse_pair(line, text)?;
            if u >= n || v >= n {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("vertex out of range for n = {n}"),
                });
            }
            edges.push((line, u, v));
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: text.lines().count().max(1),
                msg: format!("expected {m} edges, found {}", edges.len()),
            });
        }
        let mut seen = HashSet::new();
        for &(line, u, v) in &edges {
            if u == v {
                return Err(GraphError::Parse {
                    line,
                    msg: "self-loop".into(),
                });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::Parse {
                    line,
                    msg: "duplicate edge".into(),
                });
            }
        }
        Graph::new(n, edges.into_iter().map(|(_, u, v)| (u, v)))
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn empty(n: usize) -> Graph {
        Graph::new(n, std::iter::empty()).expect("edgeless graph")
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).expect("path")
    }

    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(GraphError::Generator(format!("cycle needs n >= 3, got {n}")));
        }
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("complete graph")
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star")
    }

    /// Uniform-ish random `d`-regular graph from the pairing model, retrying
    /// until the pairing is simple.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
        if d >= n.max(1) || (n * d) % 2 == 1 {
            return Err(GraphError::Generator(format!("no {d}-regular graph on {n} vertices")));
        }
        // Steger-Wormald: pair random free points, only ever forming simple
        // edges; restart when stuck.
        'attempt: for attempt in 0..1_000u64 {
            let mut rng = rng_stream(seed, StreamKey::new(Entity::Global, attempt, Purpose::Custom(1), 0));
            let mut free: Vec<usize> = (0..n * d).map(|p| p / d).collect();
            let mut seen = HashSet::new();
            let mut edges = Vec::with_capacity(n * d / 2);
            while !free.is_empty() {
                let mut placed = false;
                for _ in 0..100 {
                    let i = rng.gen_range(0..free.len());
                    let j = rng.gen_range(0..free.len());
                    let (u, v) = (free[i], free[j]);
                    if i != j && u != v && !seen.contains(&(u.min(v), u.max(v))) {
                        seen.insert((u.min(v), u.max(v)));
                        edges.push((u, v));
                        let (hi, lo) = (i.max(j), i.min(j));
                        free.swap_remove(hi);
                        free.swap_remove(lo);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    continue 'attempt;
                }
            }
            return Graph::new(n, edges);
        }
        Err(GraphError::Generator(format!(
            "pairing model failed for n = {n}, d = {d}"
        )))
    }

    /// Erdos-Renyi G(n, p).
    pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::Generator(format!("edge probability {p} not in [0, 1]")));
        }
        let mut rng = rng_stream(seed, StreamKey::new(Entity::Global, 0, Purpose::Custom(2), 0));
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges)
    }

    /// Builds a graph from an inline spec: `path:N`, `cycle:N`, `kN` or
    /// `complete:N`, `star:L`, `empty:N`, `reg:N:D:SEED`, `gnp:N:P:SEED`.
    pub fn from_spec(spec: &str) -> Result<Graph, GraphError> {
        let bad = || GraphError::BadSpec(spec.to_string());
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |i: usize| -> Result<usize, GraphError> {
            parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad)
        };
        let arity = |k: usize| if parts.len() == k { Ok(()) } else { Err(bad()) };
        match parts[0] {
            "path" => arity(2).and_then(|_| Ok(Graph::path(num(1)?))),
            "cycle" => arity(2).and_then(|_| Graph::cycle(num(1)?)),
            "complete" => arity(2).and_then(|_| Ok(Graph::complete(num(1)?))),
            "star" => arity(2).and_then(|_| Ok(Graph::star(num(1)?))),
            "empty" => arity(2).and_then(|_| Ok(Graph::empty(num(1)?))),
            "reg" => {
                arity(4)?;
                let seed = parts[3].parse().map_err(|_| bad())?;
                Graph::random_regular(num(1)?, num(2)?, seed)
            }
            "gnp" => {
                arity(4)?;
                let p: f64 = parts[2].parse().map_err(|_| bad())?;
                let seed = parts[3].parse().map_err(|_| bad())?;
                Graph::gnp(num(1)?, p, seed)
            }
            k if parts.len() == 1 && (k.starts_with('k') || k.starts_with('K')) => {
                k[1..].parse().map(Graph::complete).map_err(|_| bad())
            }
            _ => Err(bad()),
        }
    }
}

fn parse_pair(line: usize, text: &str) -> Result<[usize; 2], GraphError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(GraphError::Parse {
            line,
            msg: format!("expected two integers, got `{text}`"),
        });
    }
    let mut out = [0; 2];
    for (slot, f) in out.iter_mut().zip(&fields) {
        *slot = f.parse().map_err(|_| GraphError::Parse {
            line,
            msg: format!("`{f}` is not a non-negative integer"),
        })?;
    }
    Ok(out)
}
