//! The entire function
//!
//! ```text
//! A(y, μ) = e^{-μ³/6} / 3^{(y+1)/3} · Σ_k (3^{2/3} μ / 2)^k / (k! Γ((y+1-2k)/3))
//!         = e^{-μ³/6} / (2πi) ∫_{a-i∞}^{a+i∞} s^{1-y} exp(μ s²/2 + s³/3) ds
//! ```
//!
//! evaluated three ways: by the power series (the production route), by
//! quadrature of the vertical-line integral (an independent oracle), and by
//! its leading asymptotics as `μ → ±∞` (diagnostics only).
//!
//! The series suffers cancellation of roughly `|μ|³/3` nats: its largest terms
//! are about `e^{|μ|³/6}` while the sum is `O(e^{-|μ|³/6})` (μ < 0) or `O(1)`
//! (μ > 0). It is therefore summed in MPFR arithmetic with a working precision
//! sized to the cancellation and checked a posteriori.

use std::f64::consts::PI;

use num_complex::Complex64;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float, Integer, Rational};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("non-finite argument y = {y}, mu = {mu}")]
    NonFinite { y: f64, mu: f64 },
    #[error("series did not settle within {0} terms")]
    NonConvergence(usize),
    #[error("integration line Re s = {a} is not admissible for mu = {mu} (need a > 0 and a > -mu/2)")]
    InadmissibleLine { a: f64, mu: f64 },
    #[error("quadrature did not converge (last relative change {0:e})")]
    QuadratureFailed(f64),
    #[error("asymptotic branch needs |mu| >= {ASYMPTOTIC_THRESHOLD}, got {0}")]
    AsymptoticRange(f64),
}

/// Branch threshold for [`a_asymptotic`].
pub const ASYMPTOTIC_THRESHOLD: f64 = 5.0;

/// Upper limit on series terms.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// Step halvings allowed in [`a_contour`].
const MAX_HALVINGS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AMethod {
    Series,
    Contour,
    AsymptoticNeg,
    AsymptoticPos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AEvalResult {
    pub value: f64,
    /// Series terms, quadrature nodes, or 1 for the asymptotic forms.
    pub terms_used: usize,
    pub method: AMethod,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x >= 0.5` (Lanczos, g = 7).
fn ln_gamma_pos(x: f64) -> f64 {
    let t = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (t + i as f64);
    }
    let base = t + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (t + 0.5) * base.ln() - base + acc.ln()
}

/// `sin(πx)` with the argument reduced to `[-1, 1]` first.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    (PI * r).sin()
}

/// `ln |Γ(x)|`, finite away from the poles.
pub fn ln_abs_gamma(x: f64) -> f64 {
    if x >= 0.5 {
        ln_gamma_pos(x)
    } else {
        (PI / sin_pi(x).abs()).ln() - ln_gamma_pos(1.0 - x)
    }
}

/// `1/Γ(x)`, an entire function: exactly zero at `0, -1, -2, ...`.
/// Uses the reflection formula below 1/2.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x >= 1.0 && x <= 21.0 && x == x.floor() {
        // 1/(x-1)! exactly representable up to 20!
        return 1.0 / (1..x as u64).product::<u64>() as f64;
    }
    if x >= 0.5 {
        if x < 20.0 {
            // direct form keeps full relative accuracy
            let t = x - 1.0;
            let mut acc = LANCZOS[0];
            for (i, c) in LANCZOS.iter().enumerate().skip(1) {
                acc += c / (t + i as f64);
            }
            let base = t + LANCZOS_G + 0.5;
            let gamma = (2.0 * PI).sqrt() * base.powf(t + 0.5) * (-base).exp() * acc;
            return 1.0 / gamma;
        }
        return (-ln_gamma_pos(x)).exp();
    }
    // 1/Γ(x) = sin(πx) Γ(1-x) / π
    let s = sin_pi(x);
    let one_minus = 1.0 - x;
    if one_minus < 20.0 {
        s / (PI * reciprocal_gamma(one_minus))
    } else {
        s * (ln_gamma_pos(one_minus) - PI.ln()).exp()
    }
}

/// `A(y, μ)` by its power series.
pub fn a_series(y: f64, mu: f64) -> Result<AEvalResult, SpecialError> {
    let s = a_series_float(y, mu)?;
    Ok(AEvalResult { value: s.value.to_f64(), terms_used: s.terms, method: AMethod::Series })
}

/// High-precision series value with the precision it was computed at.
#[derive(Debug, Clone)]
pub(crate) struct SeriesValue {
    pub value: Float,
    pub terms: usize,
}

/// Terms `k = j + 3m` are grouped into three chains `j ∈ {0,1,2}`:
///
/// ```text
/// term_k = K_j · u_{j,m},   K_j = z^j / Γ(x_j),   x_j = (y+1-2j)/3,   z = 3^{2/3} μ / 2,
/// u_{j,0} = 1/j!,  u_{j,m+1} = u_{j,m} · (μ³/8) (y+1-2j-3(2m+1)) (y+1-2j-3(2m+2)) / ((k+1)(k+2)(k+3))
/// ```
///
/// which follows from `1/Γ(x-2) = (x-1)(x-2)/Γ(x)` and `z³ = 9μ³/8`. Every
/// chain step multiplies by short exact operands, so the cost per term is
/// linear in the working precision.
pub(crate) fn a_series_float(y: f64, mu: f64) -> Result<SeriesValue, SpecialError> {
    if !y.is_finite() || !mu.is_finite() {
        return Err(SpecialError::NonFinite { y, mu });
    }
    let scan = LogScan::new(y, mu);
    if scan.truncated {
        return Err(SpecialError::NonConvergence(MAX_SERIES_TERMS));
    }
    let guess = (scan.max_ln_term + mu.abs().powi(3) / 6.0 + y.abs() * (2.0 + mu.abs()).ln()).max(0.0);
    let mut prec = (guess / std::f64::consts::LN_2) as u32 + 96;
    for _ in 0..6 {
        let out = series_at_precision(y, mu, prec)?;
        if out.good_bits >= 60 || out.sum.is_zero() && out.max_log2_term == i64::MIN {
            let value = finish_series(y, mu, out.sum, prec);
            return Ok(SeriesValue { value, terms: out.terms });
        }
        let deficit = if out.sum.is_zero() { prec as i64 } else { 60 - out.good_bits };
        prec += deficit as u32 + 64;
    }
    Err(SpecialError::NonConvergence(MAX_SERIES_TERMS))
}

/// Cheap floating-point pass over `ln |term_k|` used to size the precision.
struct LogScan {
    max_ln_term: f64,
    /// Whether the terms were still above the cutoff at `MAX_SERIES_TERMS`.
    truncated: bool,
}

impl LogScan {
    fn new(y: f64, mu: f64) -> Self {
        if mu == 0.0 {
            return Self { max_ln_term: ln_abs_gamma_or_zero((y + 1.0) / 3.0), truncated: false };
        }
        let ln_z = (3f64.powf(2.0 / 3.0) * mu.abs() / 2.0).ln();
        let mut max_ln_term = f64::NEG_INFINITY;
        let mut ln_fact = 0.0;
        let mut k = 0usize;
        loop {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            let x = (y + 1.0 - 2.0 * k as f64) / 3.0;
            let t = k as f64 * ln_z - ln_fact + ln_abs_gamma_or_zero(x);
            max_ln_term = max_ln_term.max(t);
            if t < max_ln_term - 800.0 && k > 16 {
                return Self { max_ln_term, truncated: false };
            }
            if k >= MAX_SERIES_TERMS {
                return Self { max_ln_term, truncated: true };
            }
            k += 1;
        }
    }
}

/// `ln |1/Γ(x)|`, with poles mapped to a finite floor.
fn ln_abs_gamma_or_zero(x: f64) -> f64 {
    if x <= 0.0 && (x - x.round()).abs() < 1e-9 {
        // at or next to a pole the neighbour chains dominate anyway
        return -ln_abs_gamma(x.round() + 0.5);
    }
    -ln_abs_gamma(x)
}

struct SeriesRun {
    sum: Float,
    terms: usize,
    max_log2_term: i64,
    /// Bits of the sum that survive the cancellation.
    good_bits: i64,
}

fn log2_abs(x: &Float) -> i64 {
    x.get_exp().map(i64::from).unwrap_or(i64::MIN)
}

fn series_at_precision(y: f64, mu: f64, prec: u32) -> Result<SeriesRun, SpecialError> {
    const SHORT: u32 = 512;
    let lam = Float::with_val(prec, mu);
    let z = Float::with_val(prec, 3u32).pow(Float::with_val(prec, 2) / 3u32) * &lam / 2u32;
    let cube8 = Float::with_val(SHORT, mu).pow(3u32) / 8u32;

    let mut chain_coef: Vec<Float> = Vec::with_capacity(3);
    let mut zpow = Float::with_val(prec, 1);
    for j in 0..3u32 {
        let x = (Rational::from_f64(y).expect("finite") + 1u32 - 2 * j) / 3u32;
        let recip = reciprocal_gamma_float(&x, prec);
        chain_coef.push(Float::with_val(prec, &zpow * &recip));
        zpow *= &z;
    }
    let coef_log2: Vec<i64> = chain_coef.iter().map(log2_abs).collect();

    // u_{j,m} for the current m of each chain
    let mut u: Vec<Float> = (0..3u32)
        .map(|j| Float::with_val(prec, 1) / Float::with_val(prec, Float::factorial(j)))
        .collect();
    let mut chain_sum: Vec<Float> = (0..3).map(|_| Float::with_val(prec, 0)).collect();

    let peak = (4.0 * (3f64.powf(2.0 / 3.0) * mu.abs() / 2.0).powi(3) / 9.0).ceil() as usize;
    let mut max_log2 = i64::MIN;
    let mut small_run = 0;
    // base[j] tracks y+1-2j-3(2m+2) for the current m of chain j
    let mut base: Vec<Float> = (0..3u32).map(|j| Float::with_val(SHORT, y) + 1u32 - 2 * j).collect();
    let mut step = Float::new(SHORT);
    let mut k = 0usize;
    loop {
        let j = k % 3;
        let m = (k / 3) as u64;
        let term_log2 = if coef_log2[j] == i64::MIN || u[j].is_zero() {
            i64::MIN
        } else {
            coef_log2[j] + log2_abs(&u[j])
        };
        chain_sum[j] += &u[j];
        max_log2 = max_log2.max(term_log2);
        // below the rounding floor of the largest term: cannot change the sum
        let floor = max_log2.saturating_sub(prec as i64 + 16);
        if term_log2 < floor || term_log2 == i64::MIN {
            small_run += 1;
        } else {
            small_run = 0;
        }
        k += 1;
        if small_run >= 8 && k > peak {
            break;
        }
        if k >= MAX_SERIES_TERMS {
            return Err(SpecialError::NonConvergence(MAX_SERIES_TERMS));
        }
        // past the peak the chains only shrink, so their relative error
        // needs to cover just the distance to the floor
        if k > peak && term_log2 != i64::MIN {
            let need = (term_log2 - floor + 64).clamp(64, prec as i64) as u32;
            if need + 64 < u[j].prec() {
                u[j].set_prec(need);
            }
        }
        // advance chain j from m to m + 1
        base[j] -= 6u32;
        let kk = (j as u64) + 3 * m;
        // exact in SHORT bits; the division has to happen at full precision
        step.assign(&cube8 * &base[j]);
        step *= Float::with_val(SHORT, &base[j] + 3u32);
        u[j] *= &step;
        u[j] /= (kk + 1) * (kk + 2) * (kk + 3);
    }
    let mut sum = Float::with_val(prec, 0);
    for (c, s) in chain_coef.iter().zip(&chain_sum) {
        sum += Float::with_val(prec, c * s);
    }
    let noise = max_log2.saturating_add((k as f64).log2().ceil() as i64 + 2) - prec as i64;
    let good_bits = if sum.is_zero() { i64::MIN } else { log2_abs(&sum) - noise };
    Ok(SeriesRun { sum, terms: k, max_log2_term: max_log2, good_bits })
}

/// `1/Γ(x)` for rational `x`, correctly rounded to about `prec` bits.
///
/// MPFR's own gamma fills a Bernoulli cache on first use, which costs
/// seconds at the ten-thousand-bit precisions the series needs for large
/// negative `μ`. Above a few hundred bits this uses
/// `Γ(x) = N^x e^{-N} Σ_k N^k / (x (x+1) ⋯ (x+k)) + Γ(x, N)` instead, with the
/// sum done exactly by binary splitting and `N` large enough that the
/// incomplete tail `Γ(x, N)` falls below the working precision.
pub(crate) fn reciprocal_gamma_float(x: &Rational, prec: u32) -> Float {
    if *x.denom() == 1 && *x <= 0 {
        return Float::with_val(prec, 0);
    }
    if prec <= 1024 {
        return Float::with_val(prec, Float::with_val(prec + 32, x).gamma().recip());
    }
    let work = prec + 64;
    let xf = x.to_f64();
    let n_f = (f64::from(work) * std::f64::consts::LN_2 + 2.0 * xf.abs() * f64::from(work).ln() + 16.0).ceil();
    let n = n_f as u64;
    // last k whose term still matters: terms fall like N^k / Γ(x+k+1)
    let ln_peak = n_f - xf * n_f.ln();
    let base = ln_abs_gamma(xf);
    let cutoff = ln_peak + base - f64::from(work) * std::f64::consts::LN_2;
    let mut k = n;
    while k as f64 * n_f.ln() - (ln_abs_gamma(xf + k as f64 + 1.0) - base) > cutoff {
        k += n / 8 + 1;
    }
    let (a, b) = (x.numer(), x.denom());
    let p = Integer::from(n) * b;
    let (_, q, t) = split_sum(a, b, &p, 1, k);
    // S = (b/a)(1 + T/Q)
    let mut sum = Float::with_val(work, &t) / Float::with_val(work, &q);
    sum += 1u32;
    sum *= Float::with_val(work, b) / Float::with_val(work, a);
    let ln_n = Float::with_val(work, n).ln();
    let scale = (Float::with_val(work, x) * ln_n - n).exp();
    Float::with_val(prec, (sum * scale).recip())
}

/// `(P, Q, T)` over `i ∈ [l, r]` with `p_i = p`, `q_i = a + i b`, so that
/// `Σ_{k=l}^{r} Π_{i=l}^{k} p_i / q_i = T / Q` and `P = Π p_i`.
fn split_sum(a: &Integer, b: &Integer, p: &Integer, l: u64, r: u64) -> (Integer, Integer, Integer) {
    if r - l < 8 {
        let mut pp = Integer::from(1);
        let mut q = Integer::from(1);
        let mut t = Integer::new();
        // T/Q accumulates left to right: T_k = T_{k-1} q_k + P_k
        for i in l..=r {
            let qi = Integer::from(b * i) + a;
            t *= &qi;
            pp *= p;
            t += &pp;
            q *= &qi;
        }
        return (pp, q, t);
    }
    let m = l + (r - l) / 2;
    let (p1, q1, t1) = split_sum(a, b, p, l, m);
    let (p2, q2, t2) = split_sum(a, b, p, m + 1, r);
    let t = t1 * &q2 + Integer::from(&p1 * &t2);
    (p1 * p2, q1 * q2, t)
}

fn finish_series(y: f64, mu: f64, sum: Float, prec: u32) -> Float {
    let lam = Float::with_val(prec, mu);
    let expo = Float::with_val(prec, -(lam.clone().pow(3u32)) / 6u32).exp();
    let three = Float::with_val(prec, 3u32);
    let scale = three.pow((Float::with_val(prec, y) + 1u32) / 3u32);
    sum * expo / scale
}

/// Default integration line: the real saddle of `s^{1-y} e^{μs²/2+s³/3}`
/// when it lies right of `max(1, 1 - μ/2)`, else that bound.
pub fn default_contour_abscissa(y: f64, mu: f64) -> f64 {
    let base = (1.0f64).max(1.0 - mu / 2.0);
    // largest positive root of s³ + μ s² + (1 - y) = 0, by bisection/Newton
    let g = |s: f64| s * s * s + mu * s * s + (1.0 - y);
    let hi0 = 2.0 * (mu.abs() + (y - 1.0).abs().cbrt() + 1.0);
    if g(hi0) <= 0.0 {
        return base;
    }
    let mut lo = base;
    if g(lo) >= 0.0 {
        return base;
    }
    let mut hi = hi0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `A(y, μ)` by trapezoidal quadrature along `s = a + it`, `t ∈ ℝ`.
///
/// The integrand is analytic in the strip `|Im t| < a` and decays like
/// `exp(-t²(μ/2 + a))`, so the trapezoid rule converges geometrically in the
/// step; the step is halved until successive sums agree to `1e-13`.
pub fn a_contour(y: f64, mu: f64, a: f64) -> Result<AEvalResult, SpecialError> {
    if !y.is_finite() || !mu.is_finite() {
        return Err(SpecialError::NonFinite { y, mu });
    }
    let width = mu / 2.0 + a;
    if !(a > 0.0 && width > 0.0 && a.is_finite()) {
        return Err(SpecialError::InadmissibleLine { a, mu });
    }
    let shift = -mu.powi(3) / 6.0;
    let integrand = |t: f64| -> Complex64 {
        let s = Complex64::new(a, t);
        let w = (1.0 - y) * s.ln() + mu * s * s / 2.0 + s * s * s / 3.0 + shift;
        w.exp()
    };
    // beyond t_max the Gaussian factor is below 1e-18 relative to the line's centre
    let t_max = contour_cutoff(y, a, width, 45.0);
    let mut h = (a.min(width.sqrt().recip()) / 4.0).min(t_max / 8.0);
    // running sums of f and |f| over the nodes
    let mut sum = integrand(0.0);
    let mut abs_sum = sum.norm();
    let add = |t: f64, sum: &mut Complex64, abs_sum: &mut f64| {
        let (p, q) = (integrand(t), integrand(-t));
        *sum += p + q;
        *abs_sum += p.norm() + q.norm();
    };
    let mut j = 1;
    while (j as f64) * h <= t_max {
        add(j as f64 * h, &mut sum, &mut abs_sum);
        j += 1;
    }
    // Far right lines make |f| much larger than the integral; double
    // precision then cannot resolve the cancellation.
    let condition = abs_sum / sum.norm().max(f64::MIN_POSITIVE);
    if !(condition <= MAX_DOUBLE_CONDITION) {
        return a_contour_mpfr(y, mu, a, width, condition.min(1e300));
    }
    let mut nodes = 2 * j - 1;
    let mut estimate = sum * h;
    let mut last_change = f64::INFINITY;
    for level in 0..MAX_HALVINGS {
        let half = h / 2.0;
        let mut i = 0usize;
        loop {
            let t = (2 * i + 1) as f64 * half;
            if t > t_max {
                break;
            }
            add(t, &mut sum, &mut abs_sum);
            i += 1;
        }
        nodes += 2 * i;
        h = half;
        let next = sum * h;
        // rounding noise of the sum itself; no step refinement can beat it
        let noise = 1e-15 * abs_sum * h;
        let change = (next - estimate).norm();
        last_change = change / next.norm().max(f64::MIN_POSITIVE);
        estimate = next;
        if level >= 1 && change <= 1e-13 * next.norm() + noise {
            let value = estimate / (2.0 * PI);
            if value.im.abs() > 1e-10 * value.re.abs() + noise {
                return Err(SpecialError::QuadratureFailed(value.im));
            }
            return Ok(AEvalResult { value: value.re, terms_used: nodes, method: AMethod::Contour });
        }
    }
    Err(SpecialError::QuadratureFailed(last_change))
}

/// Largest condition number `Σ|f| / |Σf|` the double-precision quadrature
/// accepts before switching to MPFR.
const MAX_DOUBLE_CONDITION: f64 = 1e4;

/// Half-length of the integration window: the integrand has dropped below
/// `e^{-log_eps}` of its value at `t = 0`.
fn contour_cutoff(y: f64, a: f64, width: f64, log_eps: f64) -> f64 {
    let poly_tail = |t: f64| (1.0 - y) * ((a * a + t * t).sqrt() / a).ln() - t * t * width;
    let mut t_max = (log_eps / width).sqrt();
    while poly_tail(t_max) > -log_eps {
        t_max *= 1.25;
    }
    t_max
}

/// Real part of the integrand at `s = a + it`, in MPFR.
struct MpfrLine {
    prec: u32,
    a: Float,
    a2: Float,
    one_minus_y: Float,
    mu: Float,
    shift: Float,
}

impl MpfrLine {
    fn new(y: f64, mu: f64, a: f64, prec: u32) -> Self {
        let a_f = Float::with_val(prec, a);
        let mu_f = Float::with_val(prec, mu);
        let shift = -Float::with_val(prec, mu_f.clone().pow(3u32)) / 6u32;
        Self {
            prec,
            a2: Float::with_val(prec, &a_f * &a_f),
            a: a_f,
            one_minus_y: 1u32 - Float::with_val(prec, y),
            mu: mu_f,
            shift,
        }
    }

    fn re(&self, t: &Float) -> Float {
        let p = self.prec;
        let t2 = Float::with_val(p, t * t);
        let ln_mod = Float::with_val(p, &self.a2 + &t2).ln() / 2u32;
        let arg = Float::with_val(p, t.atan2_ref(&self.a));
        // Re and Im of (1-y) ln s + μ s²/2 + s³/3 - μ³/6
        let diff = Float::with_val(p, &self.a2 - &t2);
        let re = Float::with_val(p, &self.one_minus_y * &ln_mod)
            + Float::with_val(p, &self.mu * &diff) / 2u32
            + Float::with_val(p, &self.a * (diff - Float::with_val(p, &t2 * 2u32))) / 3u32
            + &self.shift;
        let cubic = Float::with_val(p, Float::with_val(p, &self.a2 * 3u32) - &t2) * t / 3u32;
        let im = Float::with_val(p, &self.one_minus_y * &arg)
            + Float::with_val(p, &self.mu * &self.a) * t
            + cubic;
        re.exp() * im.cos()
    }
}

/// [`a_contour`] with the integrand and the sums in MPFR, for lines whose
/// condition number `condition` would swamp double precision.
fn a_contour_mpfr(y: f64, mu: f64, a: f64, width: f64, condition: f64) -> Result<AEvalResult, SpecialError> {
    let extra = condition.log2().ceil().max(0.0) as u32;
    let prec = 64 + extra;
    // the tail must also be small against the integral, not just the centre
    let t_max = contour_cutoff(y, a, width, 45.0 + condition.ln());
    let line = MpfrLine::new(y, mu, a, prec);
    let h0 = (a.min(width.sqrt().recip()) / 4.0).min(t_max / 8.0);
    let mut h = Float::with_val(prec, h0);
    // f(-t) is the conjugate of f(t), so each pair contributes 2 Re f(t)
    let mut sum = line.re(&Float::new(prec));
    let add = |t: &Float, sum: &mut Float| *sum += line.re(t) * 2u32;
    let mut j = 1u32;
    loop {
        let t = Float::with_val(prec, &h * j);
        if t > t_max {
            break;
        }
        add(&t, &mut sum);
        j += 1;
    }
    let mut nodes = 2 * j as usize - 1;
    let mut estimate = Float::with_val(prec, &sum * &h);
    let mut last_change = f64::INFINITY;
    for level in 0..MAX_HALVINGS {
        let half = Float::with_val(prec, &h / 2u32);
        let mut i = 0u32;
        loop {
            let t = Float::with_val(prec, &half * (2 * i + 1));
            if t > t_max {
                break;
            }
            add(&t, &mut sum);
            i += 1;
        }
        nodes += 2 * i as usize;
        h = half;
        let next = Float::with_val(prec, &sum * &h);
        let change = Float::with_val(prec, &next - &estimate).abs().to_f64();
        let scale = next.to_f64().abs();
        last_change = change / scale.max(f64::MIN_POSITIVE);
        estimate = next;
        if level >= 1 && change <= 1e-13 * scale {
            let value = estimate.to_f64() / (2.0 * PI);
            return Ok(AEvalResult { value, terms_used: nodes, method: AMethod::Contour });
        }
    }
    Err(SpecialError::QuadratureFailed(last_change))
}

/// Leading asymptotics: `(2π)^{-1/2} |μ|^{1/2-y}` as `μ → -∞` and
/// `e^{-μ³/6} / (2^{y/2} Γ(y/2) μ^{1-y/2})` as `μ → +∞`.
pub fn a_asymptotic(y: f64, mu: f64) -> Result<AEvalResult, SpecialError> {
    if !y.is_finite() || !mu.is_finite() {
        return Err(SpecialError::NonFinite { y, mu });
    }
    if mu.abs() < ASYMPTOTIC_THRESHOLD {
        return Err(SpecialError::AsymptoticRange(mu));
    }
    if mu < 0.0 {
        let value = (2.0 * PI).sqrt().recip() * (-mu).powf(0.5 - y);
        return Ok(AEvalResult { value, terms_used: 1, method: AMethod::AsymptoticNeg });
    }
    let log_mag = -mu.powi(3) / 6.0 - y / 2.0 * 2f64.ln() - (1.0 - y / 2.0) * mu.ln();
    let value = log_mag.exp() * reciprocal_gamma(y / 2.0);
    Ok(AEvalResult { value, terms_used: 1, method: AMethod::AsymptoticPos })
}

/// `√(2π)` and friends at a given precision, for callers that keep working
/// in MPFR.
pub(crate) fn float_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reciprocal_gamma_values() {
        assert_eq!(reciprocal_gamma(1.0), 1.0);
        assert_eq!(reciprocal_gamma(0.0), 0.0);
        assert_eq!(reciprocal_gamma(-3.0), 0.0);
        assert!(rel(reciprocal_gamma(0.5), 0.564_189_583_547_756_3) < 1e-14);
        assert!(rel(reciprocal_gamma(5.0), 1.0 / 24.0) < 1e-14);
        // 1/Γ(-1/2) = -1/(2√π)
        assert!(rel(reciprocal_gamma(-0.5), -0.282_094_791_773_878_14) < 1e-14);
        // 1/Γ(30) = 1/29!
        assert!(rel(reciprocal_gamma(30.0), 1.0 / 8.841_761_993_739_701e30) < 1e-13);
        assert!(rel(reciprocal_gamma(-20.5), -(ln_gamma_pos(21.5) - PI.ln()).exp()) < 1e-13);
    }

    #[test]
    fn reciprocal_gamma_matches_mpfr() {
        for i in -80..80 {
            let x = i as f64 * 0.37 + 0.013;
            let exact = Float::with_val(200, x).gamma().recip().to_f64();
            let got = reciprocal_gamma(x);
            assert!(rel(got, exact) < 5e-13, "x={x} got={got} exact={exact}");
        }
    }

    #[test]
    fn high_precision_reciprocal_gamma_matches_mpfr() {
        for (a, b) in [(5, 12), (-1, 4), (-11, 12), (37, 12), (1, 3), (-7, 2), (9, 1)] {
            let x = Rational::from((a, b));
            let ours = reciprocal_gamma_float(&x, 3000);
            let mpfr = Float::with_val(3000, Float::with_val(3100, &x).gamma().recip());
            let diff = Float::with_val(3000, &ours - &mpfr).abs() / mpfr.abs();
            assert!(diff < Float::with_val(64, Float::i_exp(1, -2990)), "x={a}/{b}");
        }
        assert!(reciprocal_gamma_float(&Rational::from(-3), 3000).is_zero());
    }

    #[test]
    fn series_at_zero_is_single_term() {
        for y in [0.25, 2.0, 3.25, 9.25] {
            let a = a_series(y, 0.0).unwrap();
            let want = 3f64.powf(-(y + 1.0) / 3.0) * reciprocal_gamma((y + 1.0) / 3.0);
            assert!(rel(a.value, want) < 1e-14, "y={y}");
            assert!(a.terms_used >= 1);
        }
    }

    #[test]
    fn series_handles_gamma_poles() {
        // y = 2: arguments (3-2k)/3 hit 0 at k = 3/2? no; y = 5 gives (6-2k)/3 = 0 at k = 3
        let a = a_series(5.0, 1.5).unwrap();
        let c = a_contour(5.0, 1.5, default_contour_abscissa(5.0, 1.5)).unwrap();
        assert!(rel(a.value, c.value) < 1e-9);
    }

    #[test]
    fn contour_rejects_bad_line() {
        assert!(matches!(a_contour(1.0, -4.0, 1.0), Err(SpecialError::InadmissibleLine { .. })));
        assert!(matches!(a_contour(1.0, 1.0, 0.0), Err(SpecialError::InadmissibleLine { .. })));
    }

    #[test]
    fn asymptotic_range() {
        assert!(matches!(a_asymptotic(0.25, 4.0), Err(SpecialError::AsymptoticRange(_))));
        assert_eq!(a_asymptotic(0.25, -5.0).unwrap().method, AMethod::AsymptoticNeg);
        assert_eq!(a_asymptotic(0.25, 5.0).unwrap().method, AMethod::AsymptoticPos);
    }

    #[test]
    fn default_line_is_admissible_and_near_saddle() {
        let a = default_contour_abscissa(0.25, -30.0);
        assert!((a - 30.0).abs() < 0.01, "{a}");
        assert_eq!(default_contour_abscissa(0.25, 2.0), 1.0);
        for mu in [-5.0, -2.0, 0.0, 2.0, 5.0] {
            let a = default_contour_abscissa(3.25, mu);
            assert!(a > 0.0 && a > -mu / 2.0);
        }
    }
}
