#![no_main]

use libfuzzer_sys::fuzz_target;

use std::sync::OnceLock;
use toric_stab::envelope::concave_envelope;
use toric_stab::geometry::LatticePolytope;
use toric_stab::io::parse_pl_function_json;

fn interval() -> &'static LatticePolytope {
    static POLY: OnceLock<LatticePolytope> = OnceLock::new();
    POLY.get_or_init(|| {
        let (p, _) = toric_stab::fixtures::load_fixture("cp1-unit").unwrap();
        p
    })
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(function) = parse_pl_function_json(text, interval()) else {
        return;
    };
    // Bound the downstream work: huge scales mean huge lattices.
    if function.scale > 16 || function.values.iter().any(|v| v.numer().bits() > 64) {
        return;
    }
    let g = concave_envelope(&function);
    for (raw, env) in function.values.iter().zip(&g.values.values) {
        assert!(env >= raw, "envelope must dominate its data");
    }
});
