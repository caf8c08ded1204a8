//! Exact rational coefficient sequences.
//!
//! * `ε_r = (6r)! / (2^{5r} 3^{2r} (3r)! (2r)!)`
//! * `f_r`: the formal square root of `Σ ε_r x^r`, i.e. `f_0 = 1` and
//!   `Σ_{k=0}^{r} f_k f_{r-k} = ε_r`
//! * Wright's leading coefficients `c_ℓ`, defined by `r ε_r = Σ_{k=1}^{r} k c_k ε_{r-k}`
//!   (equivalently `Σ ε_r x^r = exp(Σ c_ℓ x^ℓ)`)
//! * the truncated sequence `f_r^L`: `r f_r^L = ½ Σ_{k=1}^{min(r,L)} k c_k f_{r-k}^L`
//!
//! Everything is computed with exact rationals; the terms grow factorially
//! and the recurrences lose all precision in floating point.

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    Epsilon,
    F,
    WrightC,
    FTruncated(usize),
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceKind::Epsilon => f.write_str("epsilon"),
            SequenceKind::F => f.write_str("f"),
            SequenceKind::WrightC => f.write_str("wright_c"),
            SequenceKind::FTruncated(l) => write!(f, "f_truncated_{l}"),
        }
    }
}

/// A computed prefix of one sequence. `values[i]` holds the term with index
/// `first_index() + i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTable {
    kind: SequenceKind,
    values: Vec<Rational>,
}

impl SequenceTable {
    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    /// 1 for Wright's coefficients, 0 otherwise.
    pub fn first_index(&self) -> usize {
        match self.kind {
            SequenceKind::WrightC => 1,
            _ => 0,
        }
    }

    pub fn last_index(&self) -> usize {
        self.first_index() + self.values.len() - 1
    }

    pub fn get(&self, index: usize) -> Option<&Rational> {
        index.checked_sub(self.first_index()).and_then(|i| self.values.get(i))
    }

    /// Term `index`; panics outside the computed range.
    pub fn at(&self, index: usize) -> &Rational {
        self.get(index).unwrap_or_else(|| panic!("{} has no term {index}", self.kind))
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Mutable access, for fault-injection tests of the verifiers.
    pub fn values_mut(&mut self) -> &mut [Rational] {
        &mut self.values
    }

    /// `index,num/den` lines.
    pub fn to_fraction_lines(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + self.first_index(), format_fraction(v)));
        }
        out
    }

    /// Recomputes the table from scratch and compares term by term.
    pub fn is_consistent(&self) -> bool {
        let fresh = match self.kind {
            SequenceKind::Epsilon => epsilon_seq(self.last_index()),
            SequenceKind::F => f_seq(self.last_index()),
            SequenceKind::WrightC => wright_c_seq(self.last_index().max(1)),
            SequenceKind::FTruncated(l) => f_truncated_seq(l, self.last_index()),
        };
        fresh.values == self.values
    }
}

pub fn epsilon_seq(max_index: usize) -> SequenceTable {
    let values = (0..=max_index as u32)
        .map(|r| {
            let num = Integer::from(Integer::factorial(6 * r));
            let den = Integer::from(Integer::factorial(3 * r))
                * Integer::from(Integer::factorial(2 * r))
                * (Integer::from(1) << (5 * r))
                * Integer::from(Integer::u_pow_u(3, 2 * r));
            Rational::from((num, den))
        })
        .collect();
    SequenceTable { kind: SequenceKind::Epsilon, values }
}

/// `f_r = (ε_r - Σ_{k=1}^{r-1} f_k f_{r-k}) / 2`. Each term is checked
/// against `(ε_r/2)(1 - 1/r) ≤ f_r ≤ ε_r/2`.
pub fn f_seq(max_index: usize) -> SequenceTable {
    let eps = epsilon_seq(max_index);
    let mut f: Vec<Rational> = Vec::with_capacity(max_index + 1);
    f.push(Rational::from(1));
    for r in 1..=max_index {
        let mut acc = eps.values[r].clone();
        for k in 1..r {
            acc -= Rational::from(&f[k] * &f[r - k]);
        }
        acc /= 2;
        let half_eps = Rational::from(&eps.values[r] / 2u32);
        let lower = Rational::from(&half_eps * Rational::from((r as u64 - 1, r as u64)));
        assert!(lower <= acc && acc <= half_eps, "f_{r} violates the (1.8) sandwich");
        f.push(acc);
    }
    SequenceTable { kind: SequenceKind::F, values: f }
}

/// Wright's `c_1..=c_R` from `r c_r = r ε_r - Σ_{k=1}^{r-1} k c_k ε_{r-k}`.
pub fn wright_c_seq(max_index: usize) -> SequenceTable {
    assert!(max_index >= 1, "Wright coefficients start at index 1");
    let eps = epsilon_seq(max_index);
    let mut c: Vec<Rational> = Vec::with_capacity(max_index);
    for r in 1..=max_index {
        let mut acc = Rational::from(&eps.values[r] * r as u64);
        for k in 1..r {
            acc -= Rational::from(&c[k - 1] * &eps.values[r - k]) * k as u64;
        }
        acc /= r as u64;
        c.push(acc);
    }
    SequenceTable { kind: SequenceKind::WrightC, values: c }
}

pub fn f_truncated_seq(cutoff: usize, max_index: usize) -> SequenceTable {
    assert!(cutoff >= 1, "truncation level must be at least 1");
    let c = wright_c_seq(cutoff.min(max_index).max(1));
    let mut f: Vec<Rational> = Vec::with_capacity(max_index + 1);
    f.push(Rational::from(1));
    for r in 1..=max_index {
        let mut acc = Rational::new();
        for k in 1..=r.min(cutoff) {
            acc += Rational::from(&c.values[k - 1] * &f[r - k]) * k as u64;
        }
        acc /= 2 * r as u64;
        f.push(acc);
    }
    SequenceTable { kind: SequenceKind::FTruncated(cutoff), values: f }
}

/// Renders `num/den`, always with an explicit denominator.
pub fn format_fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FractionError {
    #[error("expected num/den, got {0:?}")]
    Shape(String),
    #[error("invalid integer {0:?}")]
    Integer(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Parses the `num/den` form written by [`format_fraction`]. The numerator
/// may carry a leading `-`; the denominator must be a positive decimal
/// integer. The result is reduced.
pub fn parse_fraction(s: &str) -> Result<Rational, FractionError> {
    let (num, den) = s.split_once('/').ok_or_else(|| FractionError::Shape(s.to_string()))?;
    let digits = |t: &str, signed: bool| {
        let body = if signed { t.strip_prefix('-').unwrap_or(t) } else { t };
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits(num, true) {
        return Err(FractionError::Integer(num.to_string()));
    }
    if !digits(den, false) {
        return Err(FractionError::Integer(den.to_string()));
    }
    let num = Integer::from_str(num).map_err(|_| FractionError::Integer(num.to_string()))?;
    let den = Integer::from_str(den).map_err(|_| FractionError::Integer(den.to_string()))?;
    if den == 0 {
        return Err(FractionError::ZeroDenominator);
    }
    Ok(Rational::from((num, den)))
}
