#![no_main]

use bounded_approx::circle::CircleGrid;
use bounded_approx::io::parse_symbol;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(sym) = parse_symbol(s) {
        let _ = sym.to_samples(CircleGrid::new(64).ok());
    }
});
