//! Three-tier retrieval must return exactly what a brute-force matcher
//! finds by aligning every stored variant against the window.

mod common;

use common::retrieval::check_seed;

#[test]
fn retrieval_matches_brute_force() {
    let (mut windows, mut nonempty) = (0, 0);
    for seed in 0..1200u64 {
        let (w, n) = check_seed(seed).unwrap_or_else(|e| panic!("{e}"));
        windows += w;
        nonempty += n;
    }
    assert!(windows >= 1000);
    assert!(
        nonempty >= 100,
        "generator too sparse: {nonempty} non-empty windows"
    );
}
