//! Exhaustive oracles on small vertex sets: exact solvability
//! probabilities, connected-graph counts, and even path counts in trees.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::dsu::{Link, ParityDsu};
use crate::graph::{Graph, Vertex};
use crate::sampler::pair_count;
use crate::xorsat::{conditional_solvability_probability_exact, XorsatError};

/// Largest `n` for exact solvability (`2^15` graphs).
pub const MAX_EXACT_N: usize = 6;
/// Largest `n` for the even-graph census (`2^21` graphs).
pub const MAX_EVEN_N: usize = 7;
/// Largest `n` for the tree census (`8^6` trees).
pub const MAX_TREE_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnumError {
    #[error("n = {n} exceeds the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("probability {0} outside [0, 1]")]
    Probability(Rational),
    #[error("{m} edges do not fit on {n} vertices")]
    EdgeCount { n: usize, m: u64 },
    #[error(transparent)]
    Xorsat(#[from] XorsatError),
}

fn check_n(n: usize, max: usize) -> Result<(), EnumError> {
    if n > max {
        Err(EnumError::TooLarge { n, max })
    } else {
        Ok(())
    }
}

/// The pair slots `(0,1), (0,2), …, (n-2,n-1)` in mask bit order.
fn pair_slots(n: usize) -> Vec<(Vertex, Vertex)> {
    let n = n as Vertex;
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Adjacency bitsets of the graph with edge-slot mask `mask`.
fn adjacency_bits(slots: &[(Vertex, Vertex)], mask: u64) -> [u32; 8] {
    let mut adj = [0u32; 8];
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let (u, v) = slots[i];
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    adj
}

fn bits_connected(adj: &[u32; 8], n: usize) -> bool {
    if n == 0 {
        return true;
    }
    let all = (1u32 << n) - 1;
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == all
}

/// Two-colouring by bitset BFS from every uncoloured vertex.
fn bits_bipartite(adj: &[u32; 8], n: usize) -> bool {
    let mut colour = [0u8; 8];
    let mut seen = 0u32;
    for s in 0..n {
        if seen >> s & 1 == 1 {
            continue;
        }
        seen |= 1 << s;
        colour[s] = 0;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let mut nb = adj[v];
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    colour[w] = colour[v] ^ 1;
                    stack.push(w);
                } else if colour[w] == colour[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Graph law for [`exact_solvability`].
#[derive(Debug, Clone, PartialEq)]
pub enum ExactModel {
    /// Each pair independently with probability `p`.
    Gnp(Rational),
    /// Uniform over graphs with exactly `m` edges.
    Gnm(u64),
}

/// Exact `P(solvable)` for labels i.i.d. Bernoulli(`phat`) on a random graph
/// with `n <= 6` vertices, summing over all graphs.
pub fn exact_solvability(n: usize, model: &ExactModel, phat: &Rational) -> Result<Rational, EnumError> {
    check_n(n, MAX_EXACT_N)?;
    check_probability(phat)?;
    let slots = pair_count(n);
    let mut total = Rational::new();
    match model {
        ExactModel::Gnp(p) => {
            check_probability(p)?;
            let q = Rational::from(1 - p);
            // weights p^e q^{N-e}, by edge count
            let weights: Vec<Rational> = (0..=slots as u32)
                .map(|e| Rational::from(p.clone().pow(e)) * Rational::from(q.clone().pow(slots as u32 - e)))
                .collect();
            for mask in 0..1u64 << slots {
                let w = &weights[mask.count_ones() as usize];
                if *w == 0 {
                    continue;
                }
                let g = Graph::from_pair_mask(n, mask);
                total += conditional_solvability_probability_exact(&g, phat)? * w;
            }
        }
        ExactModel::Gnm(m) => {
            if *m > slots {
                return Err(EnumError::EdgeCount { n, m: *m });
            }
            let mut count = 0u64;
            for mask in (0..1u64 << slots).filter(|x| u64::from(x.count_ones()) == *m) {
                let g = Graph::from_pair_mask(n, mask);
                total += conditional_solvability_probability_exact(&g, phat)?;
                count += 1;
            }
            total /= count;
        }
    }
    Ok(total)
}

fn check_probability(p: &Rational) -> Result<(), EnumError> {
    if *p < 0 || *p > 1 {
        Err(EnumError::Probability(p.clone()))
    } else {
        Ok(())
    }
}

/// `P(solvable)` for `G(n, p)` by running the solver on every (graph, label
/// vector) pair. No cycle-space reasoning is involved; `n <= 5`.
pub fn brute_force_solvability(n: usize, p: &Rational, phat: &Rational) -> Result<Rational, EnumError> {
    check_n(n, 5)?;
    check_probability(p)?;
    check_probability(phat)?;
    let slots = pair_count(n) as u32;
    let (q, qhat) = (Rational::from(1 - p), Rational::from(1 - phat));
    let mut dsu = ParityDsu::new(n);
    let mut total = Rational::new();
    for mask in 0..1u64 << slots {
        let g = Graph::from_pair_mask(n, mask);
        let e = g.edge_count() as u32;
        let graph_weight = Rational::from(p.clone().pow(e)) * Rational::from(q.clone().pow(slots - e));
        for labels in 0..1u64 << e {
            if solvable_with_mask(&mut dsu, &g, labels) {
                let ones = labels.count_ones();
                let w = Rational::from(phat.clone().pow(ones)) * Rational::from(qhat.clone().pow(e - ones));
                total += w * &graph_weight;
            }
        }
    }
    Ok(total)
}

/// Solvability of `g` with edge `i` labelled by bit `i` of `labels`.
fn solvable_with_mask(dsu: &mut ParityDsu, g: &Graph, labels: u64) -> bool {
    dsu.reset(g.vertex_count());
    g.edges().iter().enumerate().all(|(i, &(u, v))| dsu.union(u, v, (labels >> i & 1) as u8) != Link::Conflict)
}

/// Number of label vectors, out of `2^m`, that make `g` solvable; found by
/// trying every vector. Only for graphs with at most 20 edges.
pub fn solvable_label_count(g: &Graph) -> u64 {
    assert!(g.edge_count() <= 20, "too many edges for exhaustive labels");
    let mut dsu = ParityDsu::new(g.vertex_count());
    (0..1u64 << g.edge_count()).filter(|&b| solvable_with_mask(&mut dsu, g, b)).count() as u64
}

/// All graphs on `n` vertices, in edge-mask order.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    (0..1u64 << pair_count(n)).map(move |mask| Graph::from_pair_mask(n, mask))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountKind {
    Connected,
    ConnectedEvenOnly,
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountKind::Connected => "connected",
            CountKind::ConnectedEvenOnly => "connected_even",
        })
    }
}

/// Counts of labelled graphs by `(n, m)`. Entries are stored for
/// `1 <= n <= n_max` and `n-1 <= m <= n(n-1)/2`; every other count is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    kind: CountKind,
    n_max: usize,
    entries: BTreeMap<(usize, u64), Integer>,
}

impl CountTable {
    fn new(kind: CountKind, n_max: usize) -> Self {
        Self { kind, n_max, entries: BTreeMap::new() }
    }

    pub fn kind(&self) -> CountKind {
        self.kind
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: usize, m: u64) -> Integer {
        self.entries.get(&(n, m)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, u64, &Integer)> {
        self.entries.iter().map(|(&(n, m), c)| (n, m, c))
    }

    /// Overwrites one entry; used to exercise the verifiers with a bad table.
    pub fn set(&mut self, n: usize, m: u64, value: Integer) {
        self.entries.insert((n, m), value);
    }

    /// `n,m,count` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,m,count\n");
        for (n, m, c) in self.entries() {
            out.push_str(&format!("{n},{m},{c}\n"));
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// Connected labelled graph counts from
/// `m C(n,m) = (N-m+1) C(n,m-1) + ½ Σ binom(n,n₁) n₁ n₂ C(n₁,m₁) C(n₂,m₂)`,
/// the sum over `n₁+n₂ = n`, `m₁+m₂ = m-1`, with `C(1,0) = C(2,1) = 1`.
/// Panics if a division by `m` is inexact.
pub fn count_connected(n_max: usize) -> CountTable {
    assert!(n_max >= 1, "n_max must be at least 1");
    let mut t = CountTable::new(CountKind::Connected, n_max);
    t.set(1, 0, Integer::from(1));
    if n_max >= 2 {
        t.set(2, 1, Integer::from(1));
    }
    for n in 3..=n_max {
        let big_n = pair_count(n);
        for m in (n as u64 - 1)..=big_n {
            let mut acc = Integer::from(big_n - m + 1) * t.get(n, m - 1);
            let mut conv = Integer::new();
            for n1 in 1..n {
                let n2 = n - n1;
                let weight = binomial(n, n1) * (n1 * n2) as u64;
                for m1 in (n1 as u64 - 1)..=pair_count(n1).min(m - 1) {
                    let m2 = m - 1 - m1;
                    let c2 = t.get(n2, m2);
                    if c2 == 0 {
                        continue;
                    }
                    conv += Integer::from(&weight * &t.get(n1, m1)) * c2;
                }
            }
            assert!(conv.is_even(), "convolution at ({n},{m}) is odd");
            acc += conv / 2u32;
            assert!(acc.is_divisible_u(m as u32), "C({n},{m}) not an integer");
            acc /= m as u32;
            t.set(n, m, acc);
        }
    }
    t
}

/// Connected counts by checking every graph on up to 6 vertices.
pub fn count_connected_brute(n_max: usize) -> Result<CountTable, EnumError> {
    check_n(n_max, MAX_EXACT_N)?;
    census(n_max, CountKind::Connected)
}

/// Connected graphs without odd cycles, by checking every graph on up to 7
/// vertices.
pub fn count_connected_even(n_max: usize) -> Result<CountTable, EnumError> {
    check_n(n_max, MAX_EVEN_N)?;
    census(n_max, CountKind::ConnectedEvenOnly)
}

fn census(n_max: usize, kind: CountKind) -> Result<CountTable, EnumError> {
    let mut t = CountTable::new(kind, n_max);
    for n in 1..=n_max {
        let slots = pair_slots(n);
        let mut counts = vec![0u64; slots.len() + 1];
        for mask in 0..1u64 << slots.len() {
            let edges = mask.count_ones() as usize;
            if edges + 1 < n {
                continue;
            }
            let adj = adjacency_bits(&slots, mask);
            if bits_connected(&adj, n) && (kind == CountKind::Connected || bits_bipartite(&adj, n)) {
                counts[edges] += 1;
            }
        }
        for m in n - 1..=slots.len() {
            t.set(n, m as u64, Integer::from(counts[m]));
        }
    }
    Ok(t)
}

fn check_tree(t: &Graph) -> Result<(), EnumError> {
    let n = t.vertex_count();
    let summary = crate::graph::component_summary(t);
    if n == 0 || t.edge_count() + 1 != n || summary.component_count != 1 {
        return Err(EnumError::NotATree);
    }
    Ok(())
}

/// Number of vertex pairs of a tree joined by a path of even length, as
/// `binom(|V₀|,2) + binom(|V₁|,2)` over the bipartition.
pub fn even_path_count(tree: &Graph) -> Result<u64, EnumError> {
    check_tree(tree)?;
    let (offsets, targets) = tree.adjacency();
    let n = tree.vertex_count();
    let mut colour = vec![u8::MAX; n];
    colour[0] = 0;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for &w in &targets[offsets[v]..offsets[v + 1]] {
            if colour[w as usize] == u8::MAX {
                colour[w as usize] = colour[v] ^ 1;
                stack.push(w as usize);
            }
        }
    }
    let ones = colour.iter().filter(|&&c| c == 1).count() as u64;
    let zeros = n as u64 - ones;
    Ok(zeros * zeros.saturating_sub(1) / 2 + ones * ones.saturating_sub(1) / 2)
}

/// The same count by measuring every pairwise distance.
pub fn even_path_count_by_paths(tree: &Graph) -> Result<u64, EnumError> {
    check_tree(tree)?;
    let (offsets, targets) = tree.adjacency();
    let n = tree.vertex_count();
    let mut count = 0;
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        dist.fill(usize::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in &targets[offsets[v]..offsets[v + 1]] {
                if dist[w as usize] == usize::MAX {
                    dist[w as usize] = dist[v] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        count += dist[s + 1..].iter().filter(|&&d| d % 2 == 0).count() as u64;
    }
    Ok(count)
}

/// `⌈n(n-2)/4⌉`, the even path count of the path on `n` vertices.
pub fn path_even_count(n: usize) -> u64 {
    let n = n as u64;
    (n * n.saturating_sub(2)).div_ceil(4)
}

/// The labelled tree with Prüfer sequence `seq` (length `n - 2`, entries
/// below `n`).
pub fn prufer_to_tree(n: usize, seq: &[Vertex]) -> Graph {
    assert!(n >= 2 && seq.len() == n - 2, "Prüfer sequence of length {} for n = {n}", seq.len());
    let mut degree = vec![1u32; n];
    for &x in seq {
        degree[x as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<Vertex>> =
        (0..n as Vertex).filter(|&v| degree[v as usize] == 1).map(std::cmp::Reverse).collect();
    for &x in seq {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("a leaf always exists");
        edges.push((leaf, x));
        degree[x as usize] -= 1;
        if degree[x as usize] == 1 {
            leaves.push(std::cmp::Reverse(x));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().expect("two leaves remain");
    let std::cmp::Reverse(b) = leaves.pop().expect("two leaves remain");
    edges.push((a, b));
    Graph::new(n, edges).expect("Prüfer decoding yields a simple graph")
}

fn is_path(t: &Graph) -> bool {
    let mut degree = vec![0u32; t.vertex_count()];
    for &(u, v) in t.edges() {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    degree.iter().all(|&d| d <= 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeCensus {
    pub n: usize,
    pub trees: u64,
    pub min_even_paths: u64,
    /// Whether some path attains the minimum.
    pub attained_by_path: bool,
    /// Whether the minimum equals `⌈n(n-2)/4⌉`.
    pub bound_holds: bool,
}

/// Even path counts over all `n^{n-2}` labelled trees.
pub fn tree_census(n: usize) -> Result<TreeCensus, EnumError> {
    check_n(n, MAX_TREE_N)?;
    assert!(n >= 2, "trees need at least two vertices");
    let len = n - 2;
    let total = (n as u64).pow(len as u32);
    let mut seq = vec![0 as Vertex; len];
    let mut min = u64::MAX;
    let mut attained_by_path = false;
    for code in 0..total {
        let mut c = code;
        for x in seq.iter_mut() {
            *x = (c % n as u64) as Vertex;
            c /= n as u64;
        }
        let t = prufer_to_tree(n, &seq);
        let x = even_path_count(&t)?;
        if x < min {
            min = x;
            attained_by_path = false;
        }
        if x == min && !attained_by_path && is_path(&t) {
            attained_by_path = true;
        }
    }
    let expected = path_even_count(n);
    Ok(TreeCensus { n, trees: total, min_even_paths: min, attained_by_path, bound_holds: min == expected })
}

/// Whether the minimum even path count over all trees on `n` vertices is
/// `⌈n(n-2)/4⌉` and some path attains it.
pub fn verify_tree_minimizer(n: usize) -> Result<bool, EnumError> {
    let c = tree_census(n)?;
    Ok(c.bound_holds && c.attained_by_path)
}

/// Whether every graph on `n` vertices has exactly `2^{m - X}` solvable label
/// vectors, checked by trying all of them. Returns the number of graphs
/// checked, or the first counterexample.
pub fn check_solvable_fraction(n: usize) -> Result<u64, Graph> {
    let mut checked = 0;
    for g in all_graphs(n) {
        let x = crate::graph::component_summary(&g).cyclic_rank;
        let solvable = solvable_label_count(&g);
        if solvable != 1u64 << (g.edge_count() - x) {
            return Err(g);
        }
        checked += 1;
    }
    Ok(checked)
}

/// Whether the graph with edge mask `mask` on `n <= 8` vertices is connected
/// and bipartite, via bitsets. Exposed for cross-checks against the
/// general-purpose routines.
pub fn mask_connected_bipartite(n: usize, mask: u64) -> (bool, bool) {
    assert!(n <= 8);
    let slots = pair_slots(n);
    let adj = adjacency_bits(&slots, mask);
    (bits_connected(&adj, n), bits_bipartite(&adj, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    #[test]
    fn exact_solvability_examples() {
        for phat in [q(0, 1), q(1, 3), q(1, 2), q(1, 1)] {
            assert_eq!(exact_solvability(2, &ExactModel::Gnp(q(2, 7)), &phat).unwrap(), 1);
        }
        assert_eq!(exact_solvability(3, &ExactModel::Gnm(3), &q(1, 2)).unwrap(), q(1, 2));
        assert_eq!(exact_solvability(3, &ExactModel::Gnm(3), &q(1, 1)).unwrap(), 0);
        assert!(matches!(
            exact_solvability(7, &ExactModel::Gnm(3), &q(1, 2)),
            Err(EnumError::TooLarge { n: 7, max: 6 })
        ));
        assert!(exact_solvability(3, &ExactModel::Gnm(4), &q(1, 2)).is_err());
        assert!(exact_solvability(3, &ExactModel::Gnp(q(3, 2)), &q(1, 2)).is_err());
    }

    #[test]
    fn brute_force_agrees_with_cycle_space() {
        for n in 1..=4 {
            for (p, phat) in [(q(3, 10), q(1, 2)), (q(1, 2), q(1, 5)), (q(2, 3), q(1, 1))] {
                let exact = exact_solvability(n, &ExactModel::Gnp(p.clone()), &phat).unwrap();
                assert_eq!(exact, brute_force_solvability(n, &p, &phat).unwrap(), "n={n}");
            }
        }
    }

    #[test]
    fn small_connected_counts() {
        let rec = count_connected(4);
        assert_eq!(rec.get(3, 2), 3);
        assert_eq!(rec.get(3, 3), 1);
        for (m, c) in [(3, 16), (4, 15), (5, 6), (6, 1)] {
            assert_eq!(rec.get(4, m), c);
        }
        assert_eq!(rec.get(4, 2), 0);
        assert_eq!(rec.get(4, 7), 0);
        assert_eq!(rec, count_connected_brute(4).unwrap());
    }

    #[test]
    fn cayley() {
        let t = count_connected(9);
        for n in 1..=9usize {
            assert_eq!(t.get(n, n as u64 - 1), Integer::from(n).pow(n.saturating_sub(2) as u32), "n={n}");
        }
    }

    #[test]
    fn even_counts() {
        let e = count_connected_even(4).unwrap();
        assert_eq!(e.get(3, 2), 3);
        assert_eq!(e.get(3, 3), 0);
        assert_eq!(e.get(4, 4), 3);
        assert!(e.to_csv().starts_with("n,m,count\n1,0,1\n2,1,1\n"));
        assert!(count_connected_even(8).is_err());
    }

    #[test]
    fn tree_paths() {
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let p4 = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let star = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(even_path_count(&p3).unwrap(), 1);
        assert_eq!(even_path_count(&p4).unwrap(), 2);
        assert_eq!(even_path_count(&star).unwrap(), 3);
        for t in [&p3, &p4, &star] {
            assert_eq!(even_path_count(t).unwrap(), even_path_count_by_paths(t).unwrap());
        }
        assert_eq!(path_even_count(3), 1);
        assert_eq!(path_even_count(4), 2);
        assert_eq!(path_even_count(5), 4);
        let cycle = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(even_path_count(&cycle), Err(EnumError::NotATree));
        assert_eq!(even_path_count(&Graph::empty(3)), Err(EnumError::NotATree));
    }

    #[test]
    fn prufer() {
        // [3, 3, 3] on 5 vertices: leaves 0, 1, 2 hang off 3, then 3 - 4
        let t = prufer_to_tree(5, &[3, 3, 3]);
        assert_eq!(t.edges(), &[(0, 3), (1, 3), (2, 3), (3, 4)]);
        assert_eq!(prufer_to_tree(2, &[]).edges(), &[(0, 1)]);
        let c = tree_census(4).unwrap();
        assert_eq!((c.trees, c.min_even_paths), (16, 2));
        assert!(verify_tree_minimizer(4).unwrap());
        assert_eq!(tree_census(5).unwrap().min_even_paths, 4);
    }

    #[test]
    fn label_fraction_small() {
        assert_eq!(check_solvable_fraction(4).unwrap(), 64);
        let k4 = Graph::complete(4);
        assert_eq!(solvable_label_count(&k4), 8);
    }
}
