#![no_main]
use libfuzzer_sys::fuzz_target;

use cldsim::harness::ProtocolConfig;

// One override per line, applied over the default config.
fuzz_target!(|s: &str| {
    let overrides: Vec<String> = s.lines().map(str::to_owned).collect();
    if let Ok(cfg) = ProtocolConfig::from_toml_str("", &overrides) {
        let text = cfg.to_toml_string();
        assert_eq!(ProtocolConfig::from_toml_str(&text, &[]).unwrap(), cfg);
    }
});
