//! Simulation estimates of solvability, bipartiteness and maximum excess.
//!
//! Samples are split into blocks of [`BLOCK_SIZE`]; block `k` draws from
//! stream `seed.stream_index + k`. Each estimate keeps its per-block sums,
//! and every reduction runs over the blocks sorted by stream, so a run split
//! into parts and merged afterwards is bit-identical to a single run.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::dsu::CycleScanner;
use crate::sampler::{labels_with, ModelSpec, SeedSpec};
use crate::theory::Prediction;
use crate::xorsat::is_satisfiable;

pub const BLOCK_SIZE: u64 = 1000;

/// What each sample records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Draw graph and labels; record whether the system is solvable.
    Indicator,
    /// Draw the graph only; record the conditional solvability probability
    /// given the graph: `2^{-X}` for p̂ = 1/2, the bipartite indicator for
    /// p̂ = 1.
    RaoBlackwell,
    /// Draw the graph only; record its maximum component excess.
    MaxExcess,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Indicator => "indicator",
            Method::RaoBlackwell => "rao_blackwell",
            Method::MaxExcess => "max_excess",
        })
    }
}

impl FromStr for Method {
    type Err = McError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "indicator" => Ok(Method::Indicator),
            "rao_blackwell" | "raoblackwell" | "rb" => Ok(Method::RaoBlackwell),
            "max_excess" => Ok(Method::MaxExcess),
            _ => Err(McError::UnknownMethod(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("unknown method {0:?} (expected indicator, rao_blackwell or max_excess)")]
    UnknownMethod(String),
    #[error("the Rao-Blackwell estimator needs phat = 1/2 or 1, got {0}")]
    UnsupportedBias(f64),
    #[error("at least one sample is required")]
    NoSamples,
    #[error("cannot merge estimates of different models or methods")]
    Mismatch,
    #[error("stream {stream} of seed {master_seed} appears in more than one part")]
    OverlappingStreams { master_seed: u64, stream: u64 },
}

/// Sums over one block of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockStat {
    pub seed: SeedSpec,
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation (divisor `samples - 1`) over `√samples`.
    pub stderr: f64,
    pub samples: u64,
    pub method: Method,
    /// Master seed and first stream.
    pub seed: SeedSpec,
    pub model: ModelSpec,
    blocks: Vec<BlockStat>,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn block_order(a: &BlockStat, b: &BlockStat) -> std::cmp::Ordering {
    a.seed.cmp(&b.seed)
}

impl Estimate {
    fn from_blocks(model: ModelSpec, method: Method, mut blocks: Vec<BlockStat>) -> Self {
        blocks.sort_by(block_order);
        let (mut s, mut s2) = (Compensated::default(), Compensated::default());
        let mut samples = 0;
        for b in &blocks {
            s.add(b.sum);
            s2.add(b.sum_sq);
            samples += b.count;
        }
        let (mean, stderr) = mean_and_stderr(s.value(), s2.value(), samples);
        let seed = blocks.first().map(|b| b.seed).unwrap_or_default();
        Self { mean, stderr, samples, method, seed, model, blocks }
    }

    pub fn blocks(&self) -> &[BlockStat] {
        &self.blocks
    }

    /// Wilson score interval at `z` standard normal quantiles, meaningful for
    /// 0/1 samples.
    pub fn wilson_interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.mean, self.samples, z)
    }
}

fn mean_and_stderr(sum: f64, sum_sq: f64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - sum * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

pub fn wilson_interval(mean: f64, samples: u64, z: f64) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let z2 = z * z;
    let centre = (mean + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (mean * (1.0 - mean) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Block `k` of a run: its seed and sample count.
fn block_plan(samples: u64, seed: SeedSpec) -> Vec<(SeedSpec, u64)> {
    let blocks = samples.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .map(|k| {
            let count = BLOCK_SIZE.min(samples - k * BLOCK_SIZE);
            (seed.with_stream(seed.stream_index + k), count)
        })
        .collect()
}

/// Runs `observe` once per sample, block by block in parallel, and returns
/// the block sums of every observable it reports.
fn run_blocks<const K: usize, F>(samples: u64, seed: SeedSpec, observe: F) -> Vec<[BlockStat; K]>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut CycleScanner) -> [f64; K] + Sync,
{
    block_plan(samples, seed)
        .into_par_iter()
        .map(|(bseed, count)| {
            let mut rng = bseed.rng();
            let mut scanner = CycleScanner::new();
            let mut sums = [(Compensated::default(), Compensated::default()); K];
            for _ in 0..count {
                let xs = observe(&mut rng, &mut scanner);
                for (acc, x) in sums.iter_mut().zip(xs) {
                    acc.0.add(x);
                    acc.1.add(x * x);
                }
            }
            sums.map(|(s, s2)| BlockStat { seed: bseed, count, sum: s.value(), sum_sq: s2.value() })
        })
        .collect()
}

fn check_samples(samples: u64) -> Result<(), McError> {
    if samples == 0 {
        Err(McError::NoSamples)
    } else {
        Ok(())
    }
}

/// Estimates `P(system solvable)` under `spec`.
pub fn estimate_solvability(spec: &ModelSpec, samples: u64, seed: SeedSpec, method: Method) -> Result<Estimate, McError> {
    check_samples(samples)?;
    let spec = *spec;
    let blocks = match method {
        Method::Indicator => run_blocks(samples, seed, |rng, _| {
            let g = spec.sample_graph(rng);
            let labels = labels_with(rng, g.edge_count(), spec.phat);
            let ok = is_satisfiable(&g, &labels).expect("labels match edges");
            [f64::from(u8::from(ok))]
        }),
        Method::RaoBlackwell => {
            let half = match spec.phat {
                p if p == 0.5 => true,
                p if p == 1.0 => false,
                p => return Err(McError::UnsupportedBias(p)),
            };
            run_blocks(samples, seed, move |rng, scanner| {
                let g = spec.sample_graph(rng);
                let st = scanner.scan(&g);
                if half {
                    [0.5f64.powi(st.cyclic_rank as i32)]
                } else {
                    [f64::from(u8::from(st.bipartite))]
                }
            })
        }
        Method::MaxExcess => return estimate_max_excess(&spec, samples, seed),
    };
    Ok(Estimate::from_blocks(spec, method, blocks.into_iter().map(|[b]| b).collect()))
}

/// Mean of the maximum component excess `max_C (edges(C) - vertices(C))`.
pub fn estimate_max_excess(spec: &ModelSpec, samples: u64, seed: SeedSpec) -> Result<Estimate, McError> {
    check_samples(samples)?;
    let spec = *spec;
    let blocks = run_blocks(samples, seed, |rng, scanner| {
        let g = spec.sample_graph(rng);
        [scanner.scan(&g).max_excess as f64]
    });
    Ok(Estimate::from_blocks(spec, Method::MaxExcess, blocks.into_iter().map(|[b]| b).collect()))
}

/// Pools estimates of the same model and method drawn from disjoint streams.
/// The result does not depend on the order or grouping of `parts`.
pub fn merge(parts: &[Estimate]) -> Result<Estimate, McError> {
    let first = parts.first().ok_or(McError::NoSamples)?;
    if parts.iter().any(|p| p.model != first.model || p.method != first.method) {
        return Err(McError::Mismatch);
    }
    let mut blocks: Vec<BlockStat> = parts.iter().flat_map(|p| p.blocks.iter().copied()).collect();
    blocks.sort_by(block_order);
    if let Some(w) = blocks.windows(2).find(|w| w[0].seed == w[1].seed) {
        return Err(McError::OverlappingStreams { master_seed: w[0].seed.master_seed, stream: w[0].seed.stream_index });
    }
    Ok(Estimate::from_blocks(first.model, first.method, blocks))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// `mean / prediction`.
    pub ratio: f64,
    /// `(mean - prediction) / stderr`; `None` when the stderr is zero.
    pub z: Option<f64>,
}

pub fn compare_to_theory(e: &Estimate, p: &Prediction) -> Comparison {
    let z = (e.stderr > 0.0).then(|| (e.mean - p.value) / e.stderr);
    Comparison { ratio: e.mean / p.value, z }
}

/// `P(bipartite)` and `E[2^{-X}]` from the same graphs, with their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteRatio {
    /// Rao-Blackwell estimate for p̂ = 1.
    pub bipartite: Estimate,
    /// Rao-Blackwell estimate for p̂ = 1/2.
    pub half: Estimate,
    pub ratio: f64,
    /// Delta-method standard error of `ratio`, including the covariance
    /// between the two sample means.
    pub ratio_stderr: f64,
}

/// Both Rao-Blackwell estimators on one set of graphs. `half` is identical
/// to `estimate_solvability` with p̂ = 1/2 and the same seed.
pub fn estimate_bipartite_ratio(spec: &ModelSpec, samples: u64, seed: SeedSpec) -> Result<BipartiteRatio, McError> {
    check_samples(samples)?;
    let spec = *spec;
    let blocks = run_blocks(samples, seed, |rng, scanner| {
        let g = spec.sample_graph(rng);
        let st = scanner.scan(&g);
        let b = f64::from(u8::from(st.bipartite));
        let h = 0.5f64.powi(st.cyclic_rank as i32);
        [b, h, b * h]
    });
    let mut sorted = blocks;
    sorted.sort_by(|a, b| block_order(&a[0], &b[0]));
    let column = |i: usize| sorted.iter().map(|b| b[i]).collect::<Vec<_>>();
    let bipartite = Estimate::from_blocks(ModelSpec { phat: 1.0, ..spec }, Method::RaoBlackwell, column(0));
    let half = Estimate::from_blocks(ModelSpec { phat: 0.5, ..spec }, Method::RaoBlackwell, column(1));
    let mut cross = Compensated::default();
    for b in column(2) {
        cross.add(b.sum);
    }
    let n = samples as f64;
    let (mb, mh) = (bipartite.mean, half.mean);
    let ratio = mb / mh;
    let cov = if samples > 1 { (cross.value() - n * mb * mh) / (n - 1.0) } else { 0.0 };
    let (vb, vh) = (bipartite.stderr.powi(2) * n, half.stderr.powi(2) * n);
    let var = (vb / (mh * mh) + mb * mb * vh / mh.powi(4) - 2.0 * mb * cov / mh.powi(3)) / n;
    Ok(BipartiteRatio { bipartite, half, ratio, ratio_stderr: var.max(0.0).sqrt() })
}

/// Solvability split by whether the maximum excess is at most `cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalSolvability {
    pub cap: i64,
    pub samples: u64,
    pub unconditional: f64,
    /// Samples with maximum excess `<= cap`, their mean and its stderr.
    pub within: (u64, f64, f64),
    /// The remaining samples.
    pub beyond: (u64, f64, f64),
    /// `(within - beyond) / combined stderr`; positive when conditioning on
    /// small excess raises solvability.
    pub z: f64,
}

/// Compares solvability among graphs with maximum excess `<= cap` to the
/// rest. Uses `method` per sample as in [`estimate_solvability`].
pub fn conditional_solvability(
    spec: &ModelSpec,
    samples: u64,
    seed: SeedSpec,
    method: Method,
    cap: i64,
) -> Result<ConditionalSolvability, McError> {
    check_samples(samples)?;
    let spec = *spec;
    let half = match (method, spec.phat) {
        (Method::RaoBlackwell, p) if p == 0.5 => true,
        (Method::RaoBlackwell, p) if p == 1.0 => false,
        (Method::RaoBlackwell, p) => return Err(McError::UnsupportedBias(p)),
        (Method::Indicator, _) => false,
        (Method::MaxExcess, _) => return Err(McError::UnknownMethod(method.to_string())),
    };
    let blocks = run_blocks(samples, seed, move |rng, scanner| {
        let g = spec.sample_graph(rng);
        let st = scanner.scan(&g);
        let x = match method {
            Method::Indicator => {
                let labels = labels_with(rng, g.edge_count(), spec.phat);
                f64::from(u8::from(is_satisfiable(&g, &labels).expect("labels match edges")))
            }
            _ if half => 0.5f64.powi(st.cyclic_rank as i32),
            _ => f64::from(u8::from(st.bipartite)),
        };
        let inside = f64::from(u8::from(st.max_excess <= cap));
        [inside, x * inside, x * (1.0 - inside)]
    });
    let mut sorted = blocks;
    sorted.sort_by(|a, b| block_order(&a[0], &b[0]));
    let total = |i: usize| {
        let (mut s, mut s2) = (Compensated::default(), Compensated::default());
        for b in &sorted {
            s.add(b[i].sum);
            s2.add(b[i].sum_sq);
        }
        (s.value(), s2.value())
    };
    let (inside, _) = total(0);
    let n_in = inside.round() as u64;
    let n_out = samples - n_in;
    let (s_in, s2_in) = total(1);
    let (s_out, s2_out) = total(2);
    let (m_in, e_in) = mean_and_stderr(s_in, s2_in, n_in);
    let (m_out, e_out) = mean_and_stderr(s_out, s2_out, n_out);
    let z = (m_in - m_out) / (e_in * e_in + e_out * e_out).sqrt();
    Ok(ConditionalSolvability {
        cap,
        samples,
        unconditional: (s_in + s_out) / samples as f64,
        within: (n_in, m_in, e_in),
        beyond: (n_out, m_out, e_out),
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::ModelKind;
    use crate::theory::Regime;

    fn spec(n: usize, lambda: f64, phat: f64) -> ModelSpec {
        ModelSpec::new(ModelKind::Gnp, n, lambda, phat).unwrap()
    }

    #[test]
    fn empty_graphs_are_always_solvable() {
        // λ = -n^{1/3} gives p = 0
        let s = spec(27, -3.0, 0.5);
        assert_eq!(s.p(), 0.0);
        for method in [Method::Indicator, Method::RaoBlackwell] {
            let e = estimate_solvability(&s, 500, SeedSpec::new(1, 0), method).unwrap();
            assert_eq!((e.mean, e.stderr, e.samples), (1.0, 0.0, 500));
        }
        let e = estimate_max_excess(&s, 10, SeedSpec::new(1, 0)).unwrap();
        assert_eq!(e.mean, -1.0);
    }

    #[test]
    fn unsupported_rao_blackwell() {
        let s = spec(100, 0.0, 0.3);
        assert_eq!(
            estimate_solvability(&s, 10, SeedSpec::new(1, 0), Method::RaoBlackwell),
            Err(McError::UnsupportedBias(0.3))
        );
        assert_eq!(estimate_solvability(&s, 0, SeedSpec::new(1, 0), Method::Indicator), Err(McError::NoSamples));
    }

    #[test]
    fn deterministic_and_mergeable() {
        let s = spec(200, 0.5, 0.5);
        let seed = SeedSpec::new(42, 0);
        let whole = estimate_solvability(&s, 8 * BLOCK_SIZE, seed, Method::RaoBlackwell).unwrap();
        assert_eq!(whole, estimate_solvability(&s, 8 * BLOCK_SIZE, seed, Method::RaoBlackwell).unwrap());
        let parts: Vec<Estimate> = (0..8)
            .map(|k| estimate_solvability(&s, BLOCK_SIZE, seed.with_stream(k), Method::RaoBlackwell).unwrap())
            .collect();
        let merged = merge(&parts).unwrap();
        assert_eq!(merged.mean, whole.mean);
        assert_eq!(merged.stderr, whole.stderr);
        let mut reversed = parts.clone();
        reversed.reverse();
        assert_eq!(merge(&reversed).unwrap(), merged);
        assert_eq!(merge(&parts[..1]).unwrap(), parts[0]);
        assert!(matches!(merge(&[parts[0].clone(), parts[0].clone()]), Err(McError::OverlappingStreams { .. })));
        let other = estimate_solvability(&s, 10, seed.with_stream(100), Method::Indicator).unwrap();
        assert_eq!(merge(&[parts[0].clone(), other]), Err(McError::Mismatch));
    }

    #[test]
    fn joint_ratio_shares_graphs() {
        let s = spec(300, 0.0, 0.5);
        let seed = SeedSpec::new(9, 3);
        let joint = estimate_bipartite_ratio(&s, 1500, seed).unwrap();
        let half = estimate_solvability(&s, 1500, seed, Method::RaoBlackwell).unwrap();
        assert_eq!(joint.half, half);
        let ones = estimate_solvability(&ModelSpec { phat: 1.0, ..s }, 1500, seed, Method::RaoBlackwell).unwrap();
        assert_eq!(joint.bipartite, ones);
        assert!(joint.ratio > 0.0 && joint.ratio <= 1.0);
        assert!(joint.ratio_stderr > 0.0);
    }

    #[test]
    fn comparison_record() {
        let s = spec(100, 0.0, 0.5);
        let mut e = estimate_solvability(&s, 100, SeedSpec::new(5, 0), Method::RaoBlackwell).unwrap();
        e.mean = 0.5;
        e.stderr = 0.01;
        let p = Prediction { value: 0.5, regime: Regime::CriticalHalf, n: Some(100), parameter: 0.0, phat: 0.5 };
        assert_eq!(compare_to_theory(&e, &p), Comparison { ratio: 1.0, z: Some(0.0) });
        let p = Prediction { value: 0.48, ..p };
        assert!((compare_to_theory(&e, &p).z.unwrap() - 2.0).abs() < 1e-12);
        e.stderr = 0.0;
        assert_eq!(compare_to_theory(&e, &p).z, None);
    }

    #[test]
    fn wilson() {
        let (lo, hi) = wilson_interval(0.0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(0.5, 100, 1.96);
        assert!((lo + hi - 1.0).abs() < 1e-12 && lo > 0.39);
    }

    #[test]
    fn method_names() {
        for m in [Method::Indicator, Method::RaoBlackwell, Method::MaxExcess] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert_eq!("RB".parse::<Method>().unwrap(), Method::RaoBlackwell);
        assert!("exact".parse::<Method>().is_err());
    }
}
