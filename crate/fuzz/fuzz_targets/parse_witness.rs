#![no_main]

use bounded_approx::io::parse_witness;
use bounded_approx::C64;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = parse_witness(s) {
        // Validated witnesses are bounded on the closed disk.
        for z in [C64::new(0.0, 0.0), C64::new(0.5, -0.5), C64::new(-1.0, 0.0)] {
            if let Ok(v) = w.eval(z) {
                assert!(!v.is_finite() || v.norm() <= w.bound() * (1.0 + 1e-6) + 1e-9);
            }
        }
        assert!(w.eval(C64::new(2.0, 0.0)).is_err());
    }
});
