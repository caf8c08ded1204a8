#![no_main]

use libfuzzer_sys::fuzz_target;
use xorsat2_cli::SimulateRow;

fuzz_target!(|text: &str| {
    if let Ok(row) = SimulateRow::parse(text) {
        // NaN fields defeat PartialEq; the rendered line is the fixed point
        let line = row.to_csv();
        let again = SimulateRow::parse(&line).expect("own output parses");
        assert_eq!(again.to_csv(), line);
    }
});
