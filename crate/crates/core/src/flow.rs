//! Dinic max-flow on small integer-capacity networks.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: i64,
}

/// Directed network; edge `2i` is the forward arc, `2i+1` its residual twin.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    original: Vec<i64>,
}

/// Handle to a forward arc, for reading its flow after solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcId(usize);

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
            original: Vec::new(),
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> ArcId {
        debug_assert!(cap >= 0);
        let id = self.edges.len();
        self.edges.push(Edge { to, cap });
        self.edges.push(Edge { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        self.original.push(cap);
        ArcId(id)
    }

    /// Flow currently routed through a forward arc.
    pub fn flow(&self, arc: ArcId) -> i64 {
        self.original[arc.0 / 2] - self.edges[arc.0].cap
    }

    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        let n = self.adj.len();
        let mut total = 0;
        let mut level = vec![-1i32; n];
        let mut cursor = vec![0usize; n];
        loop {
            level.iter_mut().for_each(|l| *l = -1);
            level[source] = 0;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let edge = &self.edges[e];
                    if edge.cap > 0 && level[edge.to] < 0 {
                        level[edge.to] = level[u] + 1;
                        queue.push_back(edge.to);
                    }
                }
            }
            if level[sink] < 0 {
                return total;
            }
            cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.augment(source, sink, i64::MAX, &level, &mut cursor);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn augment(&mut self, u: usize, sink: usize, limit: i64, level: &[i32], cursor: &mut [usize]) -> i64 {
        if u == sink {
            return limit;
        }
        while cursor[u] < self.adj[u].len() {
            let e = self.adj[u][cursor[u]];
            let (to, cap) = (self.edges[e].to, self.edges[e].cap);
            if cap > 0 && level[to] == level[u] + 1 {
                let pushed = self.augment(to, sink, limit.min(cap), level, cursor);
                if pushed > 0 {
                    self.edges[e].cap -= pushed;
                    self.edges[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
            cursor[u] += 1;
        }
        0
    }
}
