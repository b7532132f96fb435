#![no_main]
use libfuzzer_sys::fuzz_target;

use cldsim::harness::io::read_signal_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(cols) = read_signal_csv(data) {
        for i in 0..cols.names.len() {
            let _ = cols.series(i);
        }
    }
});
