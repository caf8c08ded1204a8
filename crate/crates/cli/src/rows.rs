//! CSV rows written by the `simulate` and `theory` commands.

use std::fmt::Write as _;

use thiserror::Error;
use xorsat2::montecarlo::Method;
use xorsat2::ModelKind;

pub const SIMULATE_HEADER: &str = "model,n,lambda,phat,method,samples,seed,mean,stderr,theory,ratio,z";
pub const THEORY_HEADER: &str = "lambda,c,c1,n,prediction_half,prediction_ones";

/// 17 significant digits; `nan` for unavailable values.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateRow {
    pub model: ModelKind,
    pub n: usize,
    pub lambda: f64,
    pub phat: f64,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub theory: f64,
    pub ratio: f64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RowError {
    #[error("expected 12 fields, found {0}")]
    FieldCount(usize),
    #[error("field {field}: cannot parse {value:?}")]
    Field { field: &'static str, value: String },
}

impl SimulateRow {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.n,
            float(self.lambda),
            float(self.phat),
            self.method,
            self.samples,
            self.seed,
            float(self.mean),
            float(self.stderr),
            float(self.theory),
            float(self.ratio),
            float(self.z)
        )
        .expect("writing to a String");
        s
    }

    /// Parses one data line (no trailing newline) of the `simulate` CSV.
    pub fn parse(line: &str) -> Result<Self, RowError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(RowError::FieldCount(fields.len()));
        }
        fn get<T: std::str::FromStr>(name: &'static str, v: &str) -> Result<T, RowError> {
            // no leading '+' or whitespace: only what `to_csv` writes
            if v.starts_with('+') || v.trim() != v {
                return Err(RowError::Field { field: name, value: v.to_string() });
            }
            v.parse().map_err(|_| RowError::Field { field: name, value: v.to_string() })
        }
        Ok(Self {
            model: get("model", fields[0])?,
            n: get("n", fields[1])?,
            lambda: get("lambda", fields[2])?,
            phat: get("phat", fields[3])?,
            method: get("method", fields[4])?,
            samples: get("samples", fields[5])?,
            seed: get("seed", fields[6])?,
            mean: get("mean", fields[7])?,
            stderr: get("stderr", fields[8])?,
            theory: get("theory", fields[9])?,
            ratio: get("ratio", fields[10])?,
            z: get("z", fields[11])?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRow {
    pub lambda: f64,
    pub c: f64,
    pub c1: f64,
    pub n: usize,
    pub prediction_half: f64,
    pub prediction_ones: f64,
}

impl TheoryRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            float(self.lambda),
            float(self.c),
            float(self.c1),
            self.n,
            float(self.prediction_half),
            float(self.prediction_ones)
        )
    }
}
