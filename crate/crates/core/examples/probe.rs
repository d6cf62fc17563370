//! Scratch probe for pipeline failures on generated maps.

use lipext_core::boundary::load_and_validate;
use lipext_core::generate::generate_boundary_map;
use lipext_core::pipeline::{run, PipelineOptions};
use lipext_core::tolerances::Tol;
use std::time::Instant;

fn main() {
    let tol = Tol::default();
    let opts = PipelineOptions {
        sample_pairs: 100_000,
        ..Default::default()
    };
    for (seed, n) in [(48u64, 48usize), (16, 16), (24, 24), (32, 32)] {
        let raw = generate_boundary_map(seed, n, 10.0, &tol).unwrap();
        let map = load_and_validate(&raw, None, false, &tol).unwrap();
        let deep = map.estimate_bilip_constant(6);
        let start = Instant::now();
        match run(&raw, None, false, &tol, &opts) {
            Ok(res) => println!(
                "seed={seed} n={n} L={:.4} deepL={:.4} case={} pieces={} global={:.1} {:?}",
                map.l,
                deep,
                res.extension.case.as_str(),
                res.extension.pieces.len(),
                res.distortion.global,
                start.elapsed()
            ),
            Err(e) => println!(
                "seed={seed} n={n} L={:.4} deepL={:.4} FAIL {:?}: {e}",
                map.l,
                deep,
                start.elapsed()
            ),
        }
    }
}
