#![no_main]

use bounded_approx::io::parse_coefficients;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_coefficients(s) {
        assert_eq!(c.as_slice().len(), 2 * c.half_width() + 1);
        let k = c.half_width() as i64;
        assert_eq!(c.get(k + 1).norm(), 0.0);
    }
});
