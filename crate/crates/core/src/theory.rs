//! Closed-form predictions for the solvability probability.

use std::sync::OnceLock;

use rug::Float;
use thiserror::Error;

use crate::sequences::{f_seq, SequenceTable};
use crate::special::{a_series_float, float_pi, SpecialError};

/// `|λ|` beyond which the series for `c(λ)` is not attempted.
pub const LAMBDA_ENVELOPE: f64 = 30.0;

/// `2^{-1/4} e^{1/8}`, the bipartite-to-random-label ratio.
pub fn bipartite_factor() -> f64 {
    2f64.powf(-0.25) * (0.125f64).exp()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("lambda = {0} outside the accuracy envelope |lambda| <= {LAMBDA_ENVELOPE}")]
    Envelope(f64),
    #[error("gamma = {0} outside [0, 1)")]
    GammaRange(f64),
    #[error("label bias {0} outside [0, 1]")]
    BiasOutOfRange(f64),
    #[error("critical prediction is only available for phat = 1/2 or 1, got {0}")]
    UnsupportedBias(f64),
    #[error("critical prediction needs n >= 10, got {0}")]
    TooSmall(usize),
    #[error("c(lambda) series did not settle after {0} terms")]
    NoConvergence(usize),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    CriticalHalf,
    CriticalOnes,
    SubMultigraph,
    SubGraph,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub regime: Regime,
    pub n: Option<usize>,
    /// λ for the critical regimes, γ for the subcritical ones.
    pub parameter: f64,
    pub phat: f64,
}

/// Diagnostic details of one `c(λ)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CLambda {
    pub value: f64,
    pub terms: usize,
    /// Ratio of the last two series terms.
    pub last_term_ratio: f64,
}

const F_CACHE_LEN: usize = 160;
const MAX_C_TERMS: usize = 600;

fn f_cache() -> &'static SequenceTable {
    static CACHE: OnceLock<SequenceTable> = OnceLock::new();
    CACHE.get_or_init(|| f_seq(F_CACHE_LEN))
}

/// Only large positive λ reach this far.
fn f_cache_long() -> &'static SequenceTable {
    static CACHE: OnceLock<SequenceTable> = OnceLock::new();
    CACHE.get_or_init(|| f_seq(MAX_C_TERMS))
}

/// `c(λ) = e^{3/8} √(2π) Σ_r (f_r / 2^r) A(1/4 + 3r, λ)`.
pub fn c_lambda(lambda: f64) -> Result<f64, TheoryError> {
    c_lambda_detailed(lambda).map(|c| c.value)
}

/// As [`c_lambda`], reporting the number of terms and the final term ratio.
pub fn c_lambda_detailed(lambda: f64) -> Result<CLambda, TheoryError> {
    if !lambda.is_finite() || lambda.abs() > LAMBDA_ENVELOPE {
        return Err(TheoryError::Envelope(lambda));
    }
    // far right of the window the value is below the smallest subnormal
    if lambda > 0.0 && ln_c_lambda_asymptotic_pos(lambda) < -760.0 {
        return Ok(CLambda { value: 0.0, terms: 0, last_term_ratio: f64::NAN });
    }
    const PREC: u32 = 128;
    let mut sum = Float::with_val(PREC, 0);
    let mut prev = Float::with_val(PREC, 0);
    let mut last_ratio = f64::NAN;
    for r in 0..MAX_C_TERMS {
        let f_r = match f_cache().get(r) {
            Some(v) => v,
            None => f_cache_long().at(r),
        };
        let a = a_series_float(0.25 + 3.0 * r as f64, lambda)?.value;
        let term = Float::with_val(PREC, f_r) * a >> r as u32;
        sum += &term;
        if r > 0 && !prev.is_zero() {
            last_ratio = Float::with_val(PREC, &term / &prev).to_f64();
        }
        let small = Float::with_val(PREC, &term * 1e14f64) < sum;
        prev = term;
        if r >= 10 && small {
            let scale = Float::with_val(PREC, 0.375f64).exp() * (float_pi(PREC) * 2u32).sqrt();
            let value = Float::with_val(PREC, sum * scale).to_f64();
            return Ok(CLambda { value, terms: r + 1, last_term_ratio: last_ratio });
        }
    }
    Err(TheoryError::NoConvergence(MAX_C_TERMS))
}

/// `c₁(λ) = 2^{-1/4} e^{1/8} c(λ)`.
pub fn c1_lambda(lambda: f64) -> Result<f64, TheoryError> {
    Ok(bipartite_factor() * c_lambda(lambda)?)
}

/// The `λ → -∞` branch `e^{3/8} |λ|^{1/4}`.
pub fn c_lambda_asymptotic_neg(lambda: f64) -> f64 {
    0.375f64.exp() * lambda.abs().powf(0.25)
}

/// The `λ → +∞` branch `e^{3/8} / (2·3^{3/4}) λ^{1/4} exp(-4λ³/27)`.
///
/// The Laplace sum over `r` peaks at `r = 4λ³/81` with saddle `λ/3`, where
/// the exponent is `-4λ³/27` and its second derivative in `r` is
/// `-27/(4λ³)`.
pub fn c_lambda_asymptotic_pos(lambda: f64) -> f64 {
    ln_c_lambda_asymptotic_pos(lambda).exp()
}

fn ln_c_lambda_asymptotic_pos(lambda: f64) -> f64 {
    0.375 - (2.0 * 3f64.powf(0.75)).ln() + 0.25 * lambda.ln() - 4.0 * lambda.powi(3) / 27.0
}

/// `c(λ)` inside the envelope, the matching asymptotic branch outside it.
/// The flag is true when the asymptotic branch was used.
pub fn c_lambda_or_asymptotic(lambda: f64) -> Result<(f64, bool), TheoryError> {
    match c_lambda(lambda) {
        Ok(v) => Ok((v, false)),
        Err(TheoryError::Envelope(_)) if lambda.is_finite() => {
            let v = if lambda < 0.0 { c_lambda_asymptotic_neg(lambda) } else { c_lambda_asymptotic_pos(lambda) };
            Ok((v, true))
        }
        Err(e) => Err(e),
    }
}

/// `P(S_n > 0) ≈ n^{-1/12} c(λ)` (p̂ = 1/2) or `n^{-1/12} c₁(λ)` (p̂ = 1),
/// clipped to `[0, 1]`.
pub fn critical_prediction(n: usize, lambda: f64, phat: f64) -> Result<Prediction, TheoryError> {
    if n < 10 {
        return Err(TheoryError::TooSmall(n));
    }
    let (constant, regime) = if phat == 0.5 {
        (c_lambda(lambda)?, Regime::CriticalHalf)
    } else if phat == 1.0 {
        (c1_lambda(lambda)?, Regime::CriticalOnes)
    } else {
        return Err(TheoryError::UnsupportedBias(phat));
    };
    let value = (constant * (n as f64).powf(-1.0 / 12.0)).clamp(0.0, 1.0);
    Ok(Prediction { value, regime, n: Some(n), parameter: lambda, phat })
}

/// Conjectured factor relating general p̂ to p̂ = 1/2 at criticality:
/// `(2p̂)^{-1/4} exp(-(1-p̂)²/2 + 1/8)`. Not a theorem; for empirical
/// comparison only.
pub fn conjectured_bias_factor(phat: f64) -> Result<f64, TheoryError> {
    if !(0.0..=1.0).contains(&phat) || phat == 0.0 {
        return Err(TheoryError::BiasOutOfRange(phat));
    }
    Ok((2.0 * phat).powf(-0.25) * (-(1.0 - phat).powi(2) / 2.0 + 0.125).exp())
}

fn check_sub(gamma: f64, phat: f64) -> Result<(), TheoryError> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(TheoryError::GammaRange(gamma));
    }
    if !(0.0..=1.0).contains(&phat) {
        return Err(TheoryError::BiasOutOfRange(phat));
    }
    Ok(())
}

/// Subcritical multigraph limit `((1-γ) / (1-(1-2p̂)γ))^{1/4}`.
pub fn subcritical_multigraph(gamma: f64, phat: f64) -> Result<f64, TheoryError> {
    check_sub(gamma, phat)?;
    Ok(((1.0 - gamma) / (1.0 - (1.0 - 2.0 * phat) * gamma)).powf(0.25))
}

/// Subcritical simple-graph limit: the multigraph value times
/// `exp(γp̂/2 + γ²p̂(1-p̂)/2)`.
pub fn subcritical_graph(gamma: f64, phat: f64) -> Result<f64, TheoryError> {
    let multi = subcritical_multigraph(gamma, phat)?;
    Ok(multi * (gamma * phat / 2.0 + gamma * gamma * phat * (1.0 - phat) / 2.0).exp())
}

pub fn subcritical_prediction(gamma: f64, phat: f64, simple: bool) -> Result<Prediction, TheoryError> {
    let (value, regime) = if simple {
        (subcritical_graph(gamma, phat)?, Regime::SubGraph)
    } else {
        (subcritical_multigraph(gamma, phat)?, Regime::SubMultigraph)
    };
    Ok(Prediction { value, regime, n: None, parameter: gamma, phat })
}

/// Expected number of unsatisfied ("bad") cycles in the subcritical limit,
/// `Σ_{s≥3} π_s σ_s` with `π_s = (1-(1-2p̂)^s)/2`, `σ_s = γ^s/(2s)`, in closed
/// form `¼ ln((1-γ(1-2p̂))/(1-γ)) - γp̂/2 - γ²p̂(1-p̂)/2`.
pub fn expected_bad_cycles(gamma: f64, phat: f64) -> Result<f64, TheoryError> {
    check_sub(gamma, phat)?;
    let q = 1.0 - 2.0 * phat;
    Ok(0.25 * ((1.0 - gamma * q).ln() - (1.0 - gamma).ln())
        - gamma * phat / 2.0
        - gamma * gamma * phat * (1.0 - phat) / 2.0)
}

/// Partial sum `Σ_{s=3}^{max_len} π_s σ_s`.
pub fn bad_cycles_partial_sum(gamma: f64, phat: f64, max_len: usize) -> Result<f64, TheoryError> {
    check_sub(gamma, phat)?;
    let q = 1.0 - 2.0 * phat;
    let mut total = 0.0;
    for s in (3..=max_len).rev() {
        let pi_s = (1.0 - q.powi(s as i32)) / 2.0;
        let sigma_s = gamma.powi(s as i32) / (2.0 * s as f64);
        total += pi_s * sigma_s;
    }
    Ok(total)
}
