#![no_main]
use libfuzzer_sys::fuzz_target;

use cldsim::harness::{parse_grid, MAX_GRID_POINTS};

fuzz_target!(|s: &str| {
    if let Ok(g) = parse_grid(s) {
        assert!(!g.is_empty() && g.len() <= MAX_GRID_POINTS);
        assert!(g.points().iter().all(|p| p.is_finite()));
    }
});
