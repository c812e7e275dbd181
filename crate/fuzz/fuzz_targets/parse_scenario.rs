#![no_main]

use bounded_approx::io::parse_scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_scenario(s) {
        if let Ok(target) = spec.target_set() {
            assert!(target.len() > 0);
            assert!(target.angles().iter().all(|t| (0.0..std::f64::consts::TAU).contains(t)));
        }
    }
});
