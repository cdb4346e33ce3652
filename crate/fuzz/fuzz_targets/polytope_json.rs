#![no_main]

use libfuzzer_sys::fuzz_target;

use num_traits::Signed;
use toric_stab::io::parse_polytope_document;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Parsing and construction must never panic; errors are fine.
    let Ok((polytope, divisors)) = parse_polytope_document(text) else {
        return;
    };
    // A successfully constructed polytope must satisfy its own contract.
    assert!(polytope.dim() >= 1);
    assert!(polytope.facet_count() > polytope.dim());
    for d in &divisors {
        assert!(d.beta.is_positive());
    }
    // Drive the cheap derived operations on small instances only.
    let small = polytope.dim() <= 2
        && polytope.vertices().len() <= 8
        && polytope
            .vertices()
            .iter()
            .all(|v| v.iter().all(|c| c.magnitude() <= &8u32.into()));
    if small {
        let _ = polytope.is_delzant();
        let points = polytope.lattice_points(1);
        assert!(points.len() >= polytope.vertices().len());
        let report = toric_stab::measures::measure_report(&polytope);
        assert!(report.volume.is_positive());
    }
});
