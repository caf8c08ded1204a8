#![no_main]

use libfuzzer_sys::fuzz_target;
use xorsat2::sequences::{format_fraction, parse_fraction};

fuzz_target!(|text: &str| {
    if let Ok(q) = parse_fraction(text) {
        assert_eq!(parse_fraction(&format_fraction(&q)).expect("own output parses"), q);
    }
});
