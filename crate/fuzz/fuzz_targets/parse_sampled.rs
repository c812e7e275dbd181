#![no_main]

use bounded_approx::io::{parse_sampled, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_sampled(s) {
        assert_eq!(f.values().len(), f.grid().len());
        if let Some(b) = f.claimed_bound() {
            assert!(f.max_modulus() <= b * (1.0 + 1e-12));
        }
        let back = parse_sampled(&to_json(&f).unwrap()).unwrap();
        assert_eq!(back.grid(), f.grid());
    }
});
