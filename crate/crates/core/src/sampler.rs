//! Random graphs `G(n, p)`, `G(n, m)` and edge labels, parameterized around
//! the critical point `p = (1 + λ n^{-1/3}) / n`, `m = (n/2)(1 + λ n^{-1/3})`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::xorsat::EdgeLabels;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("edge probability {p} outside [0, 1] (n = {n}, lambda = {lambda})")]
    ProbabilityOutOfRange { n: usize, lambda: f64, p: f64 },
    #[error("edge count {m} outside [0, {max}] (n = {n}, lambda = {lambda})")]
    EdgeCountOutOfRange { n: usize, lambda: f64, m: f64, max: u64 },
    #[error("label bias {0} outside [0, 1]")]
    BiasOutOfRange(f64),
    #[error("n must be at least 1")]
    NoVertices,
    #[error("unknown model {0:?}, expected gnp or gnm")]
    UnknownModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Gnp,
    Gnm,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Gnp => "gnp",
            ModelKind::Gnm => "gnm",
        })
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gnp" => Ok(ModelKind::Gnp),
            "gnm" => Ok(ModelKind::Gnm),
            _ => Err(ModelError::UnknownModel(s.to_string())),
        }
    }
}

/// Number of vertex pairs, `n(n-1)/2`.
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// A validated random-system model: graph model, size, window parameter λ
/// and label bias p̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub model: ModelKind,
    pub n: usize,
    pub lambda: f64,
    pub phat: f64,
}

impl ModelSpec {
    pub fn new(model: ModelKind, n: usize, lambda: f64, phat: f64) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::NoVertices);
        }
        if !(0.0..=1.0).contains(&phat) {
            return Err(ModelError::BiasOutOfRange(phat));
        }
        let spec = Self { model, n, lambda, phat };
        match model {
            ModelKind::Gnp => {
                critical_p(n, lambda)?;
            }
            ModelKind::Gnm => {
                critical_m(n, lambda)?;
            }
        }
        Ok(spec)
    }

    /// Model with average degree `gamma`, i.e. `p = γ/n` or `m = γn/2`,
    /// expressed through `λ = (γ - 1) n^{1/3}`.
    pub fn with_average_degree(model: ModelKind, n: usize, gamma: f64, phat: f64) -> Result<Self, ModelError> {
        Self::new(model, n, (gamma - 1.0) * (n as f64).cbrt(), phat)
    }

    pub fn p(&self) -> f64 {
        critical_p(self.n, self.lambda).expect("validated at construction")
    }

    pub fn m(&self) -> u64 {
        critical_m(self.n, self.lambda).expect("validated at construction")
    }

    /// `γ = 2m/n`, the mean degree scale (`np` for G(n,p)).
    pub fn gamma(&self) -> f64 {
        1.0 + self.lambda * (self.n as f64).cbrt().recip()
    }

    /// Draws one graph from the model using `rng`.
    pub fn sample_graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        match self.model {
            ModelKind::Gnp => gnp_with(rng, self.n, self.p()),
            ModelKind::Gnm => gnm_with(rng, self.n, self.m()),
        }
    }
}

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    /// The generator for this stream. ChaCha8 with the stream index in the
    /// nonce, so streams never overlap.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    pub fn with_stream(&self, stream_index: u64) -> Self {
        Self { stream_index, ..*self }
    }
}

pub fn critical_p(n: usize, lambda: f64) -> Result<f64, ModelError> {
    let nf = n as f64;
    let p = (1.0 + lambda * nf.cbrt().recip()) / nf;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(ModelError::ProbabilityOutOfRange { n, lambda, p })
    }
}

/// `(n/2)(1 + λ n^{-1/3})` rounded half-to-even.
pub fn critical_m(n: usize, lambda: f64) -> Result<u64, ModelError> {
    let nf = n as f64;
    let m = nf / 2.0 * (1.0 + lambda * nf.cbrt().recip());
    let max = pair_count(n);
    let r = m.round_ties_even();
    if r.is_nan() || r < 0.0 || r > max as f64 {
        return Err(ModelError::EdgeCountOutOfRange { n, lambda, m, max });
    }
    Ok(r as u64)
}

pub fn sample_gnp(n: usize, p: f64, seed: SeedSpec) -> Graph {
    gnp_with(&mut seed.rng(), n, p)
}

pub fn sample_gnm(n: usize, m: u64, seed: SeedSpec) -> Graph {
    gnm_with(&mut seed.rng(), n, m)
}

pub fn sample_labels(edge_count: usize, phat: f64, seed: SeedSpec) -> EdgeLabels {
    labels_with(&mut seed.rng(), edge_count, phat)
}

/// G(n, p) by geometric skipping over the lexicographic pair order: the gap
/// to the next selected pair is `floor(ln U / ln(1 - p))`.
pub fn gnp_with<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Graph {
    assert!((0.0..=1.0).contains(&p), "edge probability {p} outside [0, 1]");
    if p == 0.0 || n < 2 {
        return Graph::empty(n);
    }
    if p == 1.0 {
        return Graph::complete(n);
    }
    let log_q = (-p).ln_1p();
    let n64 = n as u64;
    let mut edges = Vec::with_capacity((pair_count(n) as f64 * p * 1.1) as usize + 16);
    // (u, v) is the last visited slot; v = u means "before the row starts"
    let (mut u, mut v) = (0u64, 0u64);
    loop {
        let uniform: f64 = 1.0 - rng.gen::<f64>();
        let skip = (uniform.ln() / log_q).floor();
        // saturating: a gap beyond all remaining pairs just ends the scan
        let skip = if skip < 1e18 { skip as u64 } else { u64::MAX / 4 };
        v += skip + 1;
        while v >= n64 && u < n64 - 1 {
            v = v - n64 + u + 2;
            u += 1;
        }
        if u >= n64 - 1 {
            break;
        }
        edges.push((u as Vertex, v as Vertex));
    }
    Graph::from_canonical(n, edges)
}

/// Uniform m-subset of the pairs by rejection of repeats. When `m` exceeds
/// half of all pairs the complement is sampled instead.
pub fn gnm_with<R: Rng + ?Sized>(rng: &mut R, n: usize, m: u64) -> Graph {
    let total = pair_count(n);
    assert!(m <= total, "edge count {m} exceeds {total} pairs");
    let complement = m > total / 2;
    let want = if complement { total - m } else { m } as usize;
    let n64 = n as u64;
    let mut chosen: HashSet<u64> = HashSet::with_capacity(want);
    let mut keys = Vec::with_capacity(want);
    while keys.len() < want {
        let a = rng.gen_range(0..n64);
        let b = rng.gen_range(0..n64);
        if a == b {
            continue;
        }
        let key = a.min(b) * n64 + a.max(b);
        if chosen.insert(key) {
            keys.push(key);
        }
    }
    let edges = if complement {
        let n32 = n as Vertex;
        (0..n32)
            .flat_map(|u| (u + 1..n32).map(move |v| (u, v)))
            .filter(|&(u, v)| !chosen.contains(&(u as u64 * n64 + v as u64)))
            .collect()
    } else {
        keys.sort_unstable();
        keys.into_iter().map(|k| ((k / n64) as Vertex, (k % n64) as Vertex)).collect()
    };
    Graph::from_canonical(n, edges)
}

pub fn labels_with<R: Rng + ?Sized>(rng: &mut R, edge_count: usize, phat: f64) -> EdgeLabels {
    assert!((0.0..=1.0).contains(&phat), "label bias {phat} outside [0, 1]");
    EdgeLabels::from_bits((0..edge_count).map(|_| rng.gen_bool(phat)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_parameters() {
        assert_eq!(critical_p(1000, 0.0).unwrap(), 0.001);
        assert!((critical_p(1000, 1.0).unwrap() - 0.0011).abs() < 1e-18);
        assert!(matches!(critical_p(8, -10.0), Err(ModelError::ProbabilityOutOfRange { .. })));
        assert!(critical_p(1, 0.0).is_ok());

        assert_eq!(critical_m(1000, 0.0).unwrap(), 500);
        assert_eq!(critical_m(1000, 1.0).unwrap(), 550);
        assert_eq!(critical_m(1000, -1.0).unwrap(), 450);
        assert!(critical_m(8, -10.0).is_err());
        assert!(critical_m(8, 100.0).is_err());
        // 2.5 edges round to 2, 3.5 to 4
        assert_eq!(critical_m(5, 0.0).unwrap(), 2);
        assert_eq!(critical_m(7, 0.0).unwrap(), 4);
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::new(ModelKind::Gnp, 0, 0.0, 0.5).is_err());
        assert!(ModelSpec::new(ModelKind::Gnp, 10, 0.0, 1.5).is_err());
        let s = ModelSpec::with_average_degree(ModelKind::Gnp, 100_000, 0.5, 0.5).unwrap();
        assert!((s.p() * 100_000.0 - 0.5).abs() < 1e-12);
        assert!((s.gamma() - 0.5).abs() < 1e-12);
        assert_eq!("GNM".parse::<ModelKind>().unwrap(), ModelKind::Gnm);
        assert!("gnx".parse::<ModelKind>().is_err());
    }

    #[test]
    fn extremes() {
        let seed = SeedSpec::new(1, 0);
        assert_eq!(sample_gnp(7, 0.0, seed), Graph::empty(7));
        assert_eq!(sample_gnp(7, 1.0, seed), Graph::complete(7));
        assert_eq!(sample_gnm(7, 0, seed), Graph::empty(7));
        assert_eq!(sample_gnm(7, 21, seed), Graph::complete(7));
        assert_eq!(sample_gnm(7, 15, seed).edge_count(), 15);
        assert!(sample_labels(50, 0.0, seed).iter().all(|b| !b));
        assert!(sample_labels(50, 1.0, seed).iter().all(|b| b));
        assert_eq!(sample_gnp(1, 0.5, seed), Graph::empty(1));
    }

    #[test]
    fn gnp_near_one_stays_canonical() {
        for s in 0..50 {
            let g = sample_gnp(30, 0.97, SeedSpec::new(s, 3));
            assert!(Graph::new(30, g.edges().iter().copied()).is_ok());
        }
    }

    #[test]
    fn reproducible_streams() {
        let a = SeedSpec::new(42, 7);
        assert_eq!(sample_gnp(500, 0.01, a), sample_gnp(500, 0.01, a));
        assert_eq!(sample_gnm(500, 300, a), sample_gnm(500, 300, a));
        assert_eq!(sample_labels(100, 0.5, a), sample_labels(100, 0.5, a));
        assert_ne!(sample_gnp(500, 0.01, a), sample_gnp(500, 0.01, a.with_stream(8)));
    }
}
