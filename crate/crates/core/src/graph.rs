//! Simple labeled graphs on vertices `0..n` and their component structure.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Vertex identifier. Dense, 0-based.
pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("loop at vertex {0}")]
    Loop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex count {0} does not fit the vertex id type")]
    TooManyVertices(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("header announced {expected} edges but {found} were listed")]
    EdgeCount { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An immutable simple graph with a canonical (lexicographically sorted,
/// duplicate-free) edge list. Every edge `(u, v)` has `u < v < n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl Graph {
    /// Validates `edges` and brings them into canonical form. Pairs may be
    /// given in either orientation; the same unordered pair twice is an error.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, GraphError> {
        if n > Vertex::MAX as usize + 1 {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut canon = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v as usize >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::Loop(a));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self { n, edges: canon })
    }

    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let n32 = n as Vertex;
        let edges = (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))).collect();
        Self { n, edges }
    }

    /// Trusted constructor for generators that emit pairs already in
    /// canonical order.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| u < v && (v as usize) < n));
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Self { n, edges }
    }

    /// Graph whose edge set is the subset of the `n(n-1)/2` lexicographic
    /// pair slots selected by `mask`. Only meaningful for small `n`.
    pub fn from_pair_mask(n: usize, mask: u64) -> Self {
        let n32 = n as Vertex;
        let edges = (0..n32)
            .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        Self { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn contains_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Returns a copy with one extra edge, or an error if it is invalid or
    /// already present.
    pub fn with_edge(&self, u: Vertex, v: Vertex) -> Result<Self, GraphError> {
        Self::new(self.n, self.edges.iter().copied().chain([(u, v)]))
    }

    /// Compressed adjacency: `(offsets, targets)` with neighbours of `v` in
    /// `targets[offsets[v]..offsets[v + 1]]`.
    pub fn adjacency(&self) -> (Vec<usize>, Vec<Vertex>) {
        let mut offsets = vec![0usize; self.n + 1];
        for &(u, v) in &self.edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..self.n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; 2 * self.edges.len()];
        for &(u, v) in &self.edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        (offsets, targets)
    }

    /// Parses the fixture format: a header line `n m` followed by exactly `m`
    /// lines `u v`. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(ParseError::Syntax {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, m) = parse_pair::<usize>(hline, header)?;
        let mut edges = Vec::with_capacity(m.min(1 << 16));
        for (line, l) in lines {
            if edges.len() == m {
                return Err(ParseError::EdgeCount { expected: m, found: m + 1 });
            }
            edges.push(parse_pair::<Vertex>(line, l)?);
        }
        if edges.len() != m {
            return Err(ParseError::EdgeCount { expected: m, found: edges.len() });
        }
        let g = Graph::new(n, edges)?;
        Ok(g)
    }

    /// Renders the fixture format read by [`Graph::parse`].
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn parse_pair<T: std::str::FromStr>(line: usize, s: &str) -> Result<(T, T), ParseError> {
    let mut it = s.split_ascii_whitespace();
    let mut next = || -> Result<T, ParseError> {
        let tok = it.next().ok_or_else(|| ParseError::Syntax {
            line,
            msg: "expected two integers".into(),
        })?;
        tok.parse().map_err(|_| ParseError::Syntax {
            line,
            msg: format!("invalid integer {tok:?}"),
        })
    };
    let pair = (next()?, next()?);
    if it.next().is_some() {
        return Err(ParseError::Syntax { line, msg: "trailing tokens".into() });
    }
    Ok(pair)
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.edges.len())?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

/// One connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub vertices: usize,
    pub edges: usize,
}

impl Component {
    /// `edges - vertices`: -1 for trees, 0 for unicyclic components.
    pub fn excess(&self) -> i64 {
        self.edges as i64 - self.vertices as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    /// Components ordered by their smallest vertex.
    pub components: Vec<Component>,
    pub component_count: usize,
    /// `e(G) - n + c(G)`, the dimension of the cycle space.
    pub cyclic_rank: usize,
    /// Largest component excess, -1 iff the graph is a forest. For `n = 0`
    /// there are no components and this is also -1.
    pub max_excess: i64,
}

impl ComponentSummary {
    pub fn is_forest(&self) -> bool {
        self.cyclic_rank == 0
    }
}

/// Components by breadth-first search.
pub fn component_summary(g: &Graph) -> ComponentSummary {
    let n = g.vertex_count();
    let (offsets, targets) = g.adjacency();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let (mut vertices, mut degree_sum) = (0usize, 0usize);
        while let Some(v) = queue.pop_front() {
            vertices += 1;
            let nbrs = &targets[offsets[v]..offsets[v + 1]];
            degree_sum += nbrs.len();
            for &w in nbrs {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w as usize);
                }
            }
        }
        components.push(Component { vertices, edges: degree_sum / 2 });
    }
    let component_count = components.len();
    let max_excess = components.iter().map(Component::excess).max().unwrap_or(-1);
    ComponentSummary {
        cyclic_rank: g.edge_count() + component_count - n,
        components,
        component_count,
        max_excess,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn build_canonicalizes() {
        let g = Graph::new(3, [(2, 1), (0, 2), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g, triangle());
        assert_eq!(Graph::new(3, []).unwrap().edge_count(), 0);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert_eq!(Graph::new(2, [(0, 0)]), Err(GraphError::Loop(0)));
        assert_eq!(
            Graph::new(2, [(0, 2)]),
            Err(GraphError::VertexOutOfRange { vertex: 2, n: 2 })
        );
        assert_eq!(Graph::new(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1)));
    }

    #[test]
    fn summary_examples() {
        let s = component_summary(&Graph::empty(3));
        assert_eq!((s.component_count, s.cyclic_rank, s.max_excess), (3, 0, -1));

        let s = component_summary(&triangle());
        assert_eq!((s.component_count, s.cyclic_rank, s.max_excess), (1, 1, 0));

        let g = Graph::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = component_summary(&g);
        assert_eq!((s.component_count, s.cyclic_rank, s.max_excess), (2, 1, 0));
        assert_eq!(s.components, vec![Component { vertices: 3, edges: 3 }, Component { vertices: 1, edges: 0 }]);

        let s = component_summary(&Graph::complete(4));
        assert_eq!((s.component_count, s.cyclic_rank, s.max_excess), (1, 3, 2));
    }

    #[test]
    fn empty_vertex_set() {
        let s = component_summary(&Graph::empty(0));
        assert_eq!((s.component_count, s.cyclic_rank, s.max_excess), (0, 0, -1));
    }

    #[test]
    fn pair_mask_order() {
        // slots for n = 4: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
        let g = Graph::from_pair_mask(4, 0b101001);
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(Graph::from_pair_mask(4, 0b111111), Graph::complete(4));
    }

    #[test]
    fn text_format() {
        let g = triangle();
        assert_eq!(g.to_text(), "3 3\n0 1\n0 2\n1 2\n");
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
        assert_eq!(Graph::parse("2 0").unwrap(), Graph::empty(2));
        assert!(matches!(Graph::parse("3 2\n0 1\n"), Err(ParseError::EdgeCount { .. })));
        assert!(matches!(Graph::parse("3 1\n0 1\n1 2\n"), Err(ParseError::EdgeCount { .. })));
        assert!(matches!(Graph::parse("3 1\n0 x\n"), Err(ParseError::Syntax { line: 2, .. })));
        assert!(matches!(Graph::parse("3 1\n1 1\n"), Err(ParseError::Graph(GraphError::Loop(1)))));
        assert!(matches!(Graph::parse(""), Err(ParseError::Syntax { .. })));
        assert!(matches!(Graph::parse("3 1 7\n0 1"), Err(ParseError::Syntax { line: 1, .. })));
    }
}
