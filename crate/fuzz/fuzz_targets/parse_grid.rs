#![no_main]

use libfuzzer_sys::fuzz_target;
use xorsat2_cli::grid::{parse_grid, MAX_GRID_POINTS};

fuzz_target!(|text: &str| {
    if let Ok(xs) = parse_grid::<f64>(text) {
        assert!(xs.len() <= MAX_GRID_POINTS);
    }
    if let Ok(ns) = parse_grid::<usize>(text) {
        assert!(ns.len() <= MAX_GRID_POINTS);
    }
});
