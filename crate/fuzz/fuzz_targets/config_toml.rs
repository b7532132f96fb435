#![no_main]
use libfuzzer_sys::fuzz_target;

use cldsim::harness::ProtocolConfig;

fuzz_target!(|s: &str| {
    let _ = ProtocolConfig::from_toml_str(s, &[]);
});
