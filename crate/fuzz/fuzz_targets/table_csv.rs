#![no_main]
use libfuzzer_sys::fuzz_target;

use cldsim::harness::io::{read_impedance_csv, read_swim_metrics_csv, read_sweep_csv};

fuzz_target!(|data: &[u8]| {
    let _ = read_impedance_csv(data);
    let _ = read_sweep_csv(data);
    let _ = read_swim_metrics_csv(data);
});
