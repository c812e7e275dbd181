#![no_main]

use bounded_approx::circle::CircleGrid;
use bounded_approx::io::parse_limit;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(limit) = parse_limit(s) {
        let _ = limit.to_samples(CircleGrid::new(64).unwrap());
    }
});
