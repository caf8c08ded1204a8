//! Grid lists for `--grid-n` and `--grid-lambda`.
//!
//! A grid is a comma-separated list of items, each either a single value or
//! an inclusive range `start:stop:step`. Whitespace around items is ignored.

use std::str::FromStr;

use thiserror::Error;

/// Upper bound on the number of points a grid may expand to.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("empty grid")]
    Empty,
    #[error("empty item in grid {0:?}")]
    EmptyItem(String),
    #[error("cannot parse {0:?}")]
    Value(String),
    #[error("range {0:?} needs start:stop:step with a positive step and start <= stop")]
    Range(String),
    #[error("grid expands to more than {MAX_GRID_POINTS} points")]
    TooLarge,
}

/// Numbers that can appear in a grid range.
pub trait GridValue: Copy + FromStr + PartialOrd {
    /// `start + k * step`, or `None` once past `stop`.
    fn nth(start: Self, step: Self, k: usize, stop: Self) -> Option<Self>;
    fn positive(self) -> bool;
    fn is_finite(self) -> bool;
}

impl GridValue for f64 {
    fn nth(start: f64, step: f64, k: usize, stop: f64) -> Option<f64> {
        let x = start + k as f64 * step;
        // tolerate rounding in the last point of decimal steps
        (x <= stop + step * 1e-9).then_some(x.min(stop))
    }

    fn positive(self) -> bool {
        self > 0.0 && self.is_finite()
    }

    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl GridValue for usize {
    fn nth(start: usize, step: usize, k: usize, stop: usize) -> Option<usize> {
        let x = start.checked_add(step.checked_mul(k)?)?;
        (x <= stop).then_some(x)
    }

    fn positive(self) -> bool {
        self > 0
    }

    fn is_finite(self) -> bool {
        true
    }
}

fn value<T: GridValue>(s: &str) -> Result<T, GridError> {
    s.parse().ok().filter(|v: &T| v.is_finite()).ok_or_else(|| GridError::Value(s.to_string()))
}

pub fn parse_grid<T: GridValue>(s: &str) -> Result<Vec<T>, GridError> {
    if s.trim().is_empty() {
        return Err(GridError::Empty);
    }
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(GridError::EmptyItem(s.to_string()));
        }
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [single] => out.push(value(single)?),
            [start, stop, step] => {
                let (start, stop, step): (T, T, T) = (value(start)?, value(stop)?, value(step)?);
                if !step.positive() || !(start <= stop) {
                    return Err(GridError::Range(item.to_string()));
                }
                let mut k = 0;
                while let Some(x) = T::nth(start, step, k, stop) {
                    if out.len() >= MAX_GRID_POINTS {
                        return Err(GridError::TooLarge);
                    }
                    out.push(x);
                    k += 1;
                }
            }
            _ => return Err(GridError::Range(item.to_string())),
        }
        if out.len() > MAX_GRID_POINTS {
            return Err(GridError::TooLarge);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_grid::<f64>("-2, 0,2").unwrap(), vec![-2.0, 0.0, 2.0]);
        assert_eq!(parse_grid::<usize>("10000,1000000").unwrap(), vec![10_000, 1_000_000]);
        let r = parse_grid::<f64>("-10:6:0.25").unwrap();
        assert_eq!(r.len(), 65);
        assert_eq!(*r.last().unwrap(), 6.0);
        assert_eq!(parse_grid::<f64>("0:0.3:0.1").unwrap().len(), 4);
        assert_eq!(parse_grid::<usize>("1:10:3,20").unwrap(), vec![1, 4, 7, 10, 20]);
    }

    #[test]
    fn rejects() {
        assert_eq!(parse_grid::<f64>(""), Err(GridError::Empty));
        assert!(matches!(parse_grid::<f64>("1,,2"), Err(GridError::EmptyItem(_))));
        assert!(matches!(parse_grid::<f64>("x"), Err(GridError::Value(_))));
        assert!(matches!(parse_grid::<f64>("1:0:1"), Err(GridError::Range(_))));
        assert!(matches!(parse_grid::<f64>("0:1:0"), Err(GridError::Range(_))));
        assert!(matches!(parse_grid::<f64>("0:1:nan"), Err(GridError::Value(_))));
        assert!(matches!(parse_grid::<f64>("-inf:0:1"), Err(GridError::Value(_))));
        assert!(matches!(parse_grid::<f64>("1,NaN"), Err(GridError::Value(_))));
        assert!(matches!(parse_grid::<f64>("0:1"), Err(GridError::Range(_))));
        assert!(matches!(parse_grid::<usize>("-1"), Err(GridError::Value(_))));
        assert_eq!(parse_grid::<f64>("0:1e9:1e-3"), Err(GridError::TooLarge));
    }
}
