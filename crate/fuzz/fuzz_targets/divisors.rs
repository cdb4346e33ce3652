#![no_main]

use libfuzzer_sys::fuzz_target;

use num_traits::{One, Signed};
use toric_stab::io::{parse_divisors_inline, parse_divisors_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(divisors) = parse_divisors_json(text) {
        for d in &divisors {
            assert!(d.beta.denom().is_positive());
        }
    }
    if let Ok(divisors) = parse_divisors_inline(text) {
        for d in &divisors {
            // parsed angles are arbitrary rationals here; range checking
            // happens against a polytope, but canonical form must hold
            assert!(d.beta.denom() >= &One::one());
        }
    }
});
