#![no_main]

use bounded_approx::circle::CircleGrid;
use bounded_approx::io::parse_provider;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_provider(s) else { return };
    let grid = CircleGrid::new(32).unwrap();
    if let Ok(seq) = spec.build(grid) {
        if seq.available() > 0 {
            if let Ok(f) = seq.member(1) {
                assert_eq!(f.grid().len(), 32);
            }
        }
        assert!(seq.member(0).is_err());
    }
});
