//! The random 2-linear system `x_i + x_j = b_{ij} (mod 2)`, one equation per
//! edge of a graph: solvability, solution counts, 2-colorability, and the
//! probability of solvability given the graph when labels are random.

use rug::Rational;
use thiserror::Error;

use crate::dsu::{CycleScanner, Link, ParityDsu};
use crate::gf2::BitMatrix;
use crate::graph::{Graph, Vertex};

/// Largest cycle-space dimension for which the general-bias probability is
/// computed by enumerating the cycle space.
pub const CYCLE_SPACE_CAPACITY: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum XorsatError {
    #[error("{labels} labels supplied for a graph with {edges} edges")]
    LengthMismatch { labels: usize, edges: usize },
    #[error("label bias {0} outside [0, 1]")]
    BiasOutOfRange(f64),
    #[error("cycle space of dimension {0} exceeds the enumeration capacity {CYCLE_SPACE_CAPACITY}")]
    CapacityExceeded(usize),
}

/// Right-hand sides `b_e`, aligned with the graph's canonical edge order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EdgeLabels(Vec<bool>);

impl EdgeLabels {
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().collect())
    }

    /// Bit `i` of `mask` labels edge `i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self((0..len).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![true; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub satisfiable: bool,
    /// `c(G)` when satisfiable: every component contributes a free global flip.
    pub log2_solution_count: Option<usize>,
    pub witness: Option<Vec<u8>>,
}

fn check_len(g: &Graph, labels: &EdgeLabels) -> Result<(), XorsatError> {
    if labels.len() != g.edge_count() {
        return Err(XorsatError::LengthMismatch { labels: labels.len(), edges: g.edge_count() });
    }
    Ok(())
}

fn run_dsu(g: &Graph, labels: &EdgeLabels) -> (ParityDsu, bool) {
    let mut dsu = ParityDsu::new(g.vertex_count());
    for (&(u, v), b) in g.edges().iter().zip(labels.iter()) {
        if dsu.union(u, v, b as u8) == Link::Conflict {
            return (dsu, false);
        }
    }
    (dsu, true)
}

/// Decides the system with a parity union-find. When satisfiable, the
/// witness fixes each component's root to 0.
pub fn solve(g: &Graph, labels: &EdgeLabels) -> Result<SolveOutcome, XorsatError> {
    check_len(g, labels)?;
    let (mut dsu, ok) = run_dsu(g, labels);
    if !ok {
        return Ok(SolveOutcome { satisfiable: false, log2_solution_count: None, witness: None });
    }
    let n = g.vertex_count();
    let mut witness = Vec::with_capacity(n);
    let mut components = 0;
    for v in 0..n as Vertex {
        let (root, parity) = dsu.find(v);
        components += (root == v) as usize;
        witness.push(parity);
    }
    Ok(SolveOutcome { satisfiable: true, log2_solution_count: Some(components), witness: Some(witness) })
}

/// Satisfiability only, without building a witness.
pub fn is_satisfiable(g: &Graph, labels: &EdgeLabels) -> Result<bool, XorsatError> {
    check_len(g, labels)?;
    Ok(run_dsu(g, labels).1)
}

/// Two-coloring by breadth-first search.
pub fn is_bipartite(g: &Graph) -> bool {
    let n = g.vertex_count();
    let (offsets, targets) = g.adjacency();
    let mut color = vec![u8::MAX; n];
    let mut stack = Vec::new();
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in &targets[offsets[v]..offsets[v + 1]] {
                let w = w as usize;
                if color[w] == u8::MAX {
                    color[w] = color[v] ^ 1;
                    stack.push(w);
                } else if color[w] == color[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Solvability by Gaussian elimination of the `e × (n+1)` augmented
/// incidence system over GF(2). Independent of the union-find route.
pub fn gf2_solvability_oracle(g: &Graph, labels: &EdgeLabels) -> Result<bool, XorsatError> {
    check_len(g, labels)?;
    let n = g.vertex_count();
    let mut m = BitMatrix::zeros(g.edge_count(), n + 1);
    for (r, (&(u, v), b)) in g.edges().iter().zip(labels.iter()).enumerate() {
        m.set(r, u as usize, true);
        m.set(r, v as usize, true);
        m.set(r, n, b);
    }
    Ok(m.augmented_is_consistent())
}

/// Number of cycle-space elements of each Hamming weight (as edge sets).
/// `counts[w]` for `w` in `0..=e`; the total is `2^X`.
pub fn cycle_space_weight_enumerator(g: &Graph) -> Result<Vec<u64>, XorsatError> {
    let basis = fundamental_cycles(g);
    let dim = basis.cycles.len();
    if dim > CYCLE_SPACE_CAPACITY {
        return Err(XorsatError::CapacityExceeded(dim));
    }
    let words = basis.support.div_ceil(64).max(1);
    let packed: Vec<Vec<u64>> = basis
        .cycles
        .iter()
        .map(|c| {
            let mut row = vec![0u64; words];
            for &i in c {
                row[i / 64] ^= 1 << (i % 64);
            }
            row
        })
        .collect();
    let mut counts = vec![0u64; g.edge_count() + 1];
    let mut cur = vec![0u64; words];
    counts[0] = 1;
    // Gray code walk: step i flips the basis vector at its lowest set bit
    for i in 1u64..(1u64 << dim) {
        let flip = &packed[i.trailing_zeros() as usize];
        let mut w = 0;
        for (c, f) in cur.iter_mut().zip(flip) {
            *c ^= f;
            w += c.count_ones() as usize;
        }
        counts[w] += 1;
    }
    Ok(counts)
}

struct CycleBasis {
    /// Each cycle as indices into the compressed edge support.
    cycles: Vec<Vec<usize>>,
    support: usize,
}

fn fundamental_cycles(g: &Graph) -> CycleBasis {
    let n = g.vertex_count();
    let (offsets, targets) = g.adjacency();
    // edge index of each adjacency slot
    let mut slot_edge = vec![0usize; targets.len()];
    {
        let mut fill = offsets.clone();
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            slot_edge[fill[u as usize]] = i;
            fill[u as usize] += 1;
            slot_edge[fill[v as usize]] = i;
            fill[v as usize] += 1;
        }
    }
    let mut depth = vec![usize::MAX; n];
    let mut parent = vec![(usize::MAX, usize::MAX); n]; // (vertex, edge)
    let mut tree_edge = vec![false; g.edge_count()];
    let mut stack = Vec::new();
    for s in 0..n {
        if depth[s] != usize::MAX {
            continue;
        }
        depth[s] = 0;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for slot in offsets[v]..offsets[v + 1] {
                let w = targets[slot] as usize;
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = (v, slot_edge[slot]);
                    tree_edge[slot_edge[slot]] = true;
                    stack.push(w);
                }
            }
        }
    }
    let mut raw = Vec::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        if tree_edge[i] {
            continue;
        }
        let mut cycle = vec![i];
        let (mut a, mut b) = (u as usize, v as usize);
        while a != b {
            if depth[a] < depth[b] {
                std::mem::swap(&mut a, &mut b);
            }
            let (p, e) = parent[a];
            cycle.push(e);
            a = p;
        }
        raw.push(cycle);
    }
    let mut index = vec![usize::MAX; g.edge_count()];
    let mut support = 0;
    for c in &mut raw {
        for e in c.iter_mut() {
            if index[*e] == usize::MAX {
                index[*e] = support;
                support += 1;
            }
            *e = index[*e];
        }
    }
    CycleBasis { cycles: raw, support }
}

/// Probability that the system on `g` is solvable when every label is 1
/// independently with probability `phat`.
///
/// Equals `2^{-X} Σ_z (1 - 2p̂)^{|z|}` over the cycle space; for p̂ = 1/2 this
/// is `2^{-X}`, for p̂ = 1 the bipartite indicator, for p̂ = 0 one. Other
/// biases enumerate the cycle space and are limited to
/// `X ≤ CYCLE_SPACE_CAPACITY`.
pub fn conditional_solvability_probability(g: &Graph, phat: f64) -> Result<f64, XorsatError> {
    if !(0.0..=1.0).contains(&phat) {
        return Err(XorsatError::BiasOutOfRange(phat));
    }
    let stats = CycleScanner::new().scan(g);
    let x = stats.cyclic_rank;
    if x == 0 || phat == 0.0 {
        return Ok(1.0);
    }
    if phat == 0.5 {
        return Ok(0.5f64.powi(x as i32));
    }
    if phat == 1.0 {
        return Ok(if stats.bipartite { 1.0 } else { 0.0 });
    }
    let counts = cycle_space_weight_enumerator(g)?;
    let q = 1.0 - 2.0 * phat;
    let sum: f64 = counts.iter().enumerate().rev().fold(0.0, |acc, (w, &c)| acc + c as f64 * q.powi(w as i32));
    Ok(sum / (1u64 << x) as f64)
}

/// Exact rational version of [`conditional_solvability_probability`].
pub fn conditional_solvability_probability_exact(g: &Graph, phat: &Rational) -> Result<Rational, XorsatError> {
    if *phat < 0 || *phat > 1 {
        return Err(XorsatError::BiasOutOfRange(phat.to_f64()));
    }
    let counts = cycle_space_weight_enumerator(g)?;
    let q = Rational::from(1) - Rational::from(2) * phat;
    let mut sum = Rational::new();
    let mut qpow = Rational::from(1);
    for &c in &counts {
        sum += Rational::from(c) * &qpow;
        qpow *= &q;
    }
    let dim = counts.iter().sum::<u64>().trailing_zeros();
    Ok(sum >> dim)
}
