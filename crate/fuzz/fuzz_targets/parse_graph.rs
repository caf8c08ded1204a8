#![no_main]

use libfuzzer_sys::fuzz_target;
use xorsat2::Graph;

fuzz_target!(|text: &str| {
    if let Ok(g) = Graph::parse(text) {
        let again = Graph::parse(&g.to_text()).expect("own output parses");
        assert_eq!(again, g);
    }
});
