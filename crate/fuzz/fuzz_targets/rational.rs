#![no_main]

use libfuzzer_sys::fuzz_target;

use num_traits::Signed;
use toric_stab::rational::{format_rat, parse_rat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(x) = parse_rat(text) else {
        return;
    };
    // canonical invariants and a stable round trip
    assert!(x.denom().is_positive());
    let rendered = format_rat(&x);
    let back = parse_rat(&rendered).expect("canonical form parses");
    assert_eq!(back, x);
    assert_eq!(format_rat(&back), rendered);
});
