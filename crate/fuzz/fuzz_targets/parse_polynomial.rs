#![no_main]

use bounded_approx::io::{parse_polynomial, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_polynomial(s) {
        assert_eq!(p.coeffs().len(), p.degree() + 1);
        let back = parse_polynomial(&to_json(&p).unwrap()).unwrap();
        assert_eq!(back.degree(), p.degree());
    }
});
