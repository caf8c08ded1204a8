//! Union-find with a parity bit on every parent link.
//!
//! `parity[v]` is `x_v ^ x_parent(v)` for the constraint system being built;
//! after [`ParityDsu::find`] the returned parity is `x_v ^ x_root`.

use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone)]
pub struct ParityDsu {
    parent: Vec<Vertex>,
    rank: Vec<u8>,
    parity: Vec<u8>,
    /// Vertex and edge counts, valid at roots only.
    vertices: Vec<u32>,
    edges: Vec<u32>,
}

/// What happened when an edge constraint was added.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    /// Joined two components.
    Merged,
    /// Closed a cycle whose parity agrees with the constraint.
    Consistent,
    /// Closed a cycle whose parity contradicts the constraint.
    Conflict,
}

impl ParityDsu {
    pub fn new(n: usize) -> Self {
        let mut dsu = Self {
            parent: Vec::new(),
            rank: Vec::new(),
            parity: Vec::new(),
            vertices: Vec::new(),
            edges: Vec::new(),
        };
        dsu.reset(n);
        dsu
    }

    /// Reinitializes to `n` singletons, reusing the allocations.
    pub fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n as Vertex);
        self.rank.clear();
        self.rank.resize(n, 0);
        self.parity.clear();
        self.parity.resize(n, 0);
        self.vertices.clear();
        self.vertices.resize(n, 1);
        self.edges.clear();
        self.edges.resize(n, 0);
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `v` and the parity of `v` relative to it, compressing the path.
    pub fn find(&mut self, v: Vertex) -> (Vertex, u8) {
        let mut root = v;
        let mut acc = 0u8;
        while self.parent[root as usize] != root {
            acc ^= self.parity[root as usize];
            root = self.parent[root as usize];
        }
        // second pass: point everything at the root, fixing parities as we go
        let mut cur = v;
        let mut cur_parity = acc;
        while self.parent[cur as usize] != root && cur != root {
            let next = self.parent[cur as usize];
            let next_parity = cur_parity ^ self.parity[cur as usize];
            self.parent[cur as usize] = root;
            self.parity[cur as usize] = cur_parity;
            cur = next;
            cur_parity = next_parity;
        }
        (root, acc)
    }

    /// Adds the constraint `x_u ^ x_v = bit`.
    pub fn union(&mut self, u: Vertex, v: Vertex, bit: u8) -> Link {
        let (ru, pu) = self.find(u);
        let (rv, pv) = self.find(v);
        if ru == rv {
            self.edges[ru as usize] += 1;
            return if pu ^ pv == bit { Link::Consistent } else { Link::Conflict };
        }
        let (hi, lo) = if self.rank[ru as usize] >= self.rank[rv as usize] { (ru, rv) } else { (rv, ru) };
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
        self.parent[lo as usize] = hi;
        self.parity[lo as usize] = pu ^ pv ^ bit;
        self.vertices[hi as usize] += self.vertices[lo as usize];
        self.edges[hi as usize] += self.edges[lo as usize] + 1;
        Link::Merged
    }

    pub fn is_root(&self, v: Vertex) -> bool {
        self.parent[v as usize] == v
    }

    /// `(vertices, edges)` of the component rooted at `root`.
    pub fn root_counts(&self, root: Vertex) -> (u32, u32) {
        (self.vertices[root as usize], self.edges[root as usize])
    }
}

/// Cycle statistics of a graph, obtained in one union-find pass with every
/// edge labeled 1 so that odd cycles show up as conflicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleStats {
    pub component_count: usize,
    pub cyclic_rank: usize,
    pub max_excess: i64,
    pub bipartite: bool,
}

/// Reusable workspace for [`CycleStats`] so simulation loops do not allocate.
#[derive(Debug, Default)]
pub struct CycleScanner {
    dsu: Option<ParityDsu>,
}

impl CycleScanner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scan(&mut self, g: &Graph) -> CycleStats {
        self.scan_edges(g.vertex_count(), g.edges())
    }

    pub fn scan_edges(&mut self, n: usize, edges: &[(Vertex, Vertex)]) -> CycleStats {
        let dsu = self.dsu.get_or_insert_with(|| ParityDsu::new(0));
        dsu.reset(n);
        let mut cyclic_rank = 0;
        let mut bipartite = true;
        for &(u, v) in edges {
            match dsu.union(u, v, 1) {
                Link::Merged => {}
                Link::Consistent => cyclic_rank += 1,
                Link::Conflict => {
                    cyclic_rank += 1;
                    bipartite = false;
                }
            }
        }
        let mut component_count = 0;
        let mut max_excess = -1i64;
        for v in 0..n as Vertex {
            if dsu.is_root(v) {
                component_count += 1;
                let (vs, es) = dsu.root_counts(v);
                max_excess = max_excess.max(es as i64 - vs as i64);
            }
        }
        CycleStats { component_count, cyclic_rank, max_excess, bipartite }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_propagates() {
        let mut d = ParityDsu::new(4);
        assert_eq!(d.union(0, 1, 1), Link::Merged);
        assert_eq!(d.union(1, 2, 1), Link::Merged);
        assert_eq!(d.union(2, 3, 0), Link::Merged);
        let (r0, p0) = d.find(0);
        let (r3, p3) = d.find(3);
        assert_eq!(r0, r3);
        assert_eq!(p0 ^ p3, 0); // 1 ^ 1 ^ 0
        assert_eq!(d.union(0, 3, 0), Link::Consistent);
        assert_eq!(d.union(0, 2, 1), Link::Conflict);
    }

    #[test]
    fn scan_triangle_and_square() {
        let mut s = CycleScanner::new();
        let tri = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let st = s.scan(&tri);
        assert_eq!(st, CycleStats { component_count: 1, cyclic_rank: 1, max_excess: 0, bipartite: false });
        let sq = Graph::new(5, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let st = s.scan(&sq);
        assert_eq!(st, CycleStats { component_count: 2, cyclic_rank: 1, max_excess: 0, bipartite: true });
    }
}
