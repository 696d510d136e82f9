//! The Rush Hour benchmark: guarded-list and sequential variants side by
//! side.
//!
//! cargo run --release --example rush_hour [CASES...]

use gbach::bench::{both_variants, run_benchmark, BenchOptions};

fn main() {
    let cases: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cases = if cases.is_empty() { vec![1, 2, 3] } else { cases };
    let report = run_benchmark(&both_variants(&cases), &BenchOptions::default()).unwrap();
    print!("{}", report.render());
}
