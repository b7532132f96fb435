use std::path::PathBuf;

use cldsim::harness::io::{read_impedance_csv, read_signal_csv, read_swim_metrics_csv, read_sweep_csv};
use cldsim::harness::{parse_grid, ProtocolConfig};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "{}", dir.display());
    out
}

fn text(b: &[u8]) -> &str {
    std::str::from_utf8(b).unwrap()
}

#[test]
fn config_seeds() {
    for (name, b) in seeds("config_toml") {
        let r = ProtocolConfig::from_toml_str(text(&b), &[]);
        assert_eq!(r.is_ok(), name != "bad_schema", "{name}: {r:?}");
    }
    for (name, b) in seeds("config_override") {
        let overrides: Vec<String> = text(&b).lines().map(str::to_owned).collect();
        let r = ProtocolConfig::from_toml_str("", &overrides);
        assert_eq!(r.is_ok(), name != "section", "{name}: {r:?}");
    }
}

#[test]
fn grid_seeds() {
    for (name, b) in seeds("grid") {
        let r = parse_grid(text(&b));
        assert_eq!(r.is_ok(), !matches!(name.as_str(), "huge" | "reverse"), "{name}: {r:?}");
    }
}

#[test]
fn signal_seeds() {
    for (name, b) in seeds("signal_csv") {
        let r = read_signal_csv(b.as_slice());
        assert_eq!(r.is_ok(), !matches!(name.as_str(), "nan" | "ragged"), "{name}");
    }
}

#[test]
fn table_seeds() {
    for (name, b) in seeds("table_csv") {
        let ok = [
            read_impedance_csv(b.as_slice()).is_ok(),
            read_sweep_csv(b.as_slice()).is_ok(),
            read_swim_metrics_csv(b.as_slice()).is_ok(),
        ];
        let expected = match name.as_str() {
            "impedance.csv" => [true, false, false],
            "sweep.csv" => [false, true, false],
            _ => [false, false, true],
        };
        assert_eq!(ok, expected, "{name}");
    }
}
