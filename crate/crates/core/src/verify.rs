//! Invariant suites: quick exact and numerical self-checks of every module,
//! reported as one result line per check.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::enumeration::{
    check_solvable_fraction, count_connected, count_connected_brute, count_connected_even, tree_census, CountTable,
};
use crate::graph::{component_summary, Graph};
use crate::montecarlo::{estimate_solvability, merge, Method};
use crate::sampler::{gnp_with, labels_with, ModelKind, ModelSpec, SeedSpec};
use crate::sequences::{epsilon_seq, f_seq, wright_c_seq, SequenceTable};
use crate::special::{a_contour, a_series, default_contour_abscissa, reciprocal_gamma};
use crate::theory::{bipartite_factor, c1_lambda, c_lambda, expected_bad_cycles, subcritical_graph};
use crate::xorsat::{gf2_solvability_oracle, is_bipartite, is_satisfiable, EdgeLabels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Graph,
    Xorsat,
    Sequences,
    Special,
    Theory,
    Enumeration,
    MonteCarlo,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Graph,
        Suite::Xorsat,
        Suite::Sequences,
        Suite::Special,
        Suite::Theory,
        Suite::Enumeration,
        Suite::MonteCarlo,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Graph => "graph",
            Suite::Xorsat => "xorsat",
            Suite::Sequences => "sequences",
            Suite::Special => "special",
            Suite::Theory => "theory",
            Suite::Enumeration => "enumeration",
            Suite::MonteCarlo => "montecarlo",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown suite {0:?}")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.to_string() == s).ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// Deliberate corruption of an input table, to exercise the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Bump one term of the `f_r` table before its identities are checked.
    SequenceTable,
    /// Bump one entry of the connected-count table.
    CountTable,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequence-table" => Ok(Fault::SequenceTable),
            "count-table" => Ok(Fault::CountTable),
            _ => Err(format!("unknown fault {s:?} (expected sequence-table or count-table)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: Suite,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "pass" } else { "fail" };
        write!(f, "result suite={} check={} status={status}", self.suite, self.check)?;
        if !self.detail.is_empty() {
            write!(f, " detail={:?}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| !r.passed).count()
    }

    /// One machine-readable line per check, then a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out.push_str(&format!("{} checks, {} failed\n", self.results.len(), self.failures()));
        out
    }
}

struct Recorder<'a> {
    suite: Suite,
    report: &'a mut Report,
}

impl Recorder<'_> {
    fn check(&mut self, check: &'static str, passed: bool, detail: impl Into<String>) {
        let detail = if passed { String::new() } else { detail.into() };
        self.report.results.push(CheckResult { suite: self.suite, check, passed, detail });
    }
}

/// Runs `suites` (all when empty), with an optional injected fault.
pub fn run(suites: &[Suite], fault: Option<Fault>) -> Report {
    let mut report = Report::default();
    let chosen: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    for suite in Suite::ALL.into_iter().filter(|s| chosen.contains(s)) {
        let mut rec = Recorder { suite, report: &mut report };
        match suite {
            Suite::Graph => graph_suite(&mut rec),
            Suite::Xorsat => xorsat_suite(&mut rec),
            Suite::Sequences => sequence_suite(&mut rec, fault),
            Suite::Special => special_suite(&mut rec),
            Suite::Theory => theory_suite(&mut rec),
            Suite::Enumeration => enumeration_suite(&mut rec, fault),
            Suite::MonteCarlo => montecarlo_suite(&mut rec),
        }
    }
    report
}

fn graph_suite(rec: &mut Recorder) {
    let g = Graph::new(5, [(0, 1), (1, 2), (0, 2), (3, 4)]).expect("valid");
    let s = component_summary(&g);
    rec.check(
        "triangle_plus_edge",
        s.component_count == 2 && s.cyclic_rank == 1 && s.max_excess == 0,
        format!("{s:?}"),
    );
    let k4 = component_summary(&Graph::complete(4));
    rec.check("k4_excess", k4.max_excess == 2 && k4.cyclic_rank == 3, format!("{k4:?}"));
    rec.check("empty_excess", component_summary(&Graph::empty(3)).max_excess == -1, "");
    let text = g.to_text();
    rec.check("text_round_trip", Graph::parse(&text).as_ref() == Ok(&g), text);
}

fn xorsat_suite(rec: &mut Recorder) {
    let fractions = (1..=4).map(check_solvable_fraction).collect::<Result<Vec<_>, _>>();
    rec.check("solvable_fraction_n_le_4", fractions.is_ok(), format!("{fractions:?}"));
    let mut rng = SeedSpec::new(0x5eed, 0).rng();
    let mut disagreements = 0;
    let mut bipartite_mismatch = 0;
    for _ in 0..300 {
        let n = rng.gen_range(1..=30);
        let p = rng.gen_range(0.0..0.2);
        let g = gnp_with(&mut rng, n, p);
        let labels = labels_with(&mut rng, g.edge_count(), 0.5);
        if is_satisfiable(&g, &labels) != gf2_solvability_oracle(&g, &labels) {
            disagreements += 1;
        }
        let ones = EdgeLabels::ones(g.edge_count());
        if is_satisfiable(&g, &ones).expect("lengths match") != is_bipartite(&g) {
            bipartite_mismatch += 1;
        }
    }
    rec.check("union_find_vs_gf2", disagreements == 0, format!("{disagreements} disagreements"));
    rec.check("bipartite_is_all_ones", bipartite_mismatch == 0, format!("{bipartite_mismatch} mismatches"));
}

/// `Σ_{k=0}^{r} f_k f_{r-k} = ε_r` for every stored `r`.
fn first_convolution_failure(f: &SequenceTable, eps: &SequenceTable) -> Option<usize> {
    (0..=f.last_index()).find(|&r| {
        let mut acc = Rational::new();
        for k in 0..=r {
            acc += Rational::from(f.at(k) * f.at(r - k));
        }
        acc != *eps.at(r)
    })
}

fn sequence_suite(rec: &mut Recorder, fault: Option<Fault>) {
    let q = |a: i64, b: i64| Rational::from((a, b));
    let eps = epsilon_seq(40);
    let c = wright_c_seq(2);
    let mut f = f_seq(40);
    if fault == Some(Fault::SequenceTable) {
        f.values_mut()[7] += 1;
    }
    let golden = eps.at(1) == &q(5, 24)
        && eps.at(2) == &q(385, 1152)
        && c.at(1) == &q(5, 24)
        && c.at(2) == &q(5, 16);
    rec.check("golden_values", golden, "epsilon or wright_c mismatch");
    rec.check("golden_f", f.at(1) == &q(5, 48) && f.at(2) == &q(745, 4608), "f_1 or f_2 mismatch");
    let bad = first_convolution_failure(&f, &eps);
    rec.check("square_root_convolution", bad.is_none(), format!("fails at r = {bad:?}"));
    let sandwich = (1..=f.last_index()).find(|&r| {
        let half = Rational::from(eps.at(r) / 2u32);
        let lower = Rational::from(&half * Rational::from((r as u64 - 1, r as u64)));
        !(lower <= *f.at(r) && *f.at(r) <= half)
    });
    rec.check("f_sandwich", sandwich.is_none(), format!("fails at r = {sandwich:?}"));
    rec.check("table_consistent", f.is_consistent(), "stored f table differs from a fresh computation");
}

fn special_suite(rec: &mut Recorder) {
    let mut worst: f64 = 0.0;
    for (y, mu) in [(0.25, -2.0), (3.25, 0.0), (6.25, 2.0), (0.25, 5.0)] {
        let s = a_series(y, mu).map(|r| r.value);
        let c = a_contour(y, mu, default_contour_abscissa(y, mu)).map(|r| r.value);
        worst = match (s, c) {
            (Ok(s), Ok(c)) => worst.max(((s - c) / c).abs()),
            _ => f64::INFINITY,
        };
    }
    rec.check("series_vs_contour", worst <= 1e-8, format!("worst relative difference {worst:e}"));
    let fact = (1..=10).all(|k| reciprocal_gamma(k as f64) * (1..k).product::<u64>() as f64 == 1.0);
    rec.check("reciprocal_gamma_integers", fact, "");
    rec.check("reciprocal_gamma_poles", (0..5).all(|k| reciprocal_gamma(-(k as f64)) == 0.0), "");
}

fn theory_suite(rec: &mut Recorder) {
    let c0 = c_lambda(0.0);
    rec.check(
        "c_zero_regression",
        matches!(c0, Ok(v) if (v - 1.140_293_527_958_280_6).abs() < 1e-12),
        format!("{c0:?}"),
    );
    let ratio = c1_lambda(-2.0).and_then(|a| c_lambda(-2.0).map(|b| a / b));
    rec.check(
        "c1_over_c",
        matches!(ratio, Ok(r) if (r - bipartite_factor()).abs() < 1e-14),
        format!("{ratio:?}"),
    );
    let mut worst: f64 = 0.0;
    for g in 1..=9 {
        for phat in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let gamma = g as f64 / 10.0;
            let lhs = (-expected_bad_cycles(gamma, phat).expect("in range")).exp();
            worst = worst.max((lhs - subcritical_graph(gamma, phat).expect("in range")).abs());
        }
    }
    rec.check("bad_cycle_identity", worst <= 1e-12, format!("worst {worst:e}"));
}

fn enumeration_suite(rec: &mut Recorder, fault: Option<Fault>) {
    let mut rec_table = count_connected(5);
    if fault == Some(Fault::CountTable) {
        let v = rec_table.get(5, 6) + 1;
        rec_table.set(5, 6, v);
    }
    let brute = count_connected_brute(5).expect("within limits");
    rec.check("recurrence_vs_brute_force", rec_table == brute, "tables differ");
    let cayley = count_connected(8);
    let cayley_ok =
        (1..=8usize).all(|n| cayley.get(n, n as u64 - 1) == Integer::from(n as u64).pow(n.saturating_sub(2) as u32));
    rec.check("cayley", cayley_ok, "");
    let even = count_connected_even(5).expect("within limits");
    rec.check("even_bound", even_bound_holds(&even, &rec_table), "C^e(n,m) 2^(m+1-n) > C(n,m) somewhere");
    let trees = (2..=6).map(tree_census).collect::<Result<Vec<_>, _>>().expect("within limits");
    let ok = trees.iter().all(|c| c.bound_holds && c.attained_by_path);
    rec.check("tree_minimizer", ok, format!("{trees:?}"));
}

/// `C^e(n,m) 2^{m+1-n} <= C(n,m)` on every entry of `even`.
pub fn even_bound_holds(even: &CountTable, all: &CountTable) -> bool {
    even.entries().all(|(n, m, ce)| Integer::from(ce << (m + 1 - n as u64) as u32) <= all.get(n, m))
}

fn montecarlo_suite(rec: &mut Recorder) {
    let spec = ModelSpec::new(ModelKind::Gnp, 500, 0.0, 0.5).expect("valid");
    let seed = SeedSpec::new(11, 0);
    let whole = estimate_solvability(&spec, 3000, seed, Method::RaoBlackwell);
    let parts: Result<Vec<_>, _> =
        (0..3).map(|k| estimate_solvability(&spec, 1000, seed.with_stream(k), Method::RaoBlackwell)).collect();
    let merged = parts.and_then(|p| merge(&p));
    let same = matches!((&whole, &merged), (Ok(a), Ok(b)) if a.mean == b.mean && a.stderr == b.stderr);
    rec.check("merge_matches_single_run", same, "");
    let again = estimate_solvability(&spec, 3000, seed, Method::RaoBlackwell);
    rec.check("deterministic", whole == again, "");
}
