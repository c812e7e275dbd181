//! Every checked-in fuzz seed is accepted by the parser its target drives.

use std::path::Path;

use bounded_approx::io;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

macro_rules! seeds_parse {
    ($name:ident, $target:literal, $parse:path) => {
        #[test]
        fn $name() {
            for (path, body) in seeds($target) {
                if let Err(e) = $parse(&body) {
                    panic!("{path}: {e}");
                }
            }
        }
    };
}

seeds_parse!(sampled_seeds, "parse_sampled", io::parse_sampled);
seeds_parse!(polynomial_seeds, "parse_polynomial", io::parse_polynomial);
seeds_parse!(coefficient_seeds, "parse_coefficients", io::parse_coefficients);
seeds_parse!(witness_seeds, "parse_witness", io::parse_witness);
seeds_parse!(symbol_seeds, "parse_symbol", io::parse_symbol);
seeds_parse!(limit_seeds, "parse_limit", io::parse_limit);
seeds_parse!(provider_seeds, "parse_provider", io::parse_provider);
seeds_parse!(scenario_seeds, "parse_scenario", io::parse_scenario);
