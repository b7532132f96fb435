use cldsim::harness::io::{read_impedance_csv, read_sweep_csv, write_impedance_csv, write_sweep_csv};
use cldsim::harness::{
    execute_freeswim, execute_sweep, run_bender_sweep, run_strouhal_sweep, ProtocolConfig, RunDir,
};

#[test]
fn full_coverage_loops_widen() {
    let cfg = ProtocolConfig::from_toml_str(
        "[[designs]]\nname = \"full\"\ncoverage_pct = 100\n[freeswim]\ndesigns = [\"full\"]\n",
        &[],
    )
    .unwrap();
    let table = run_bender_sweep(&cfg).unwrap();
    assert_eq!(table.rows.len(), cfg.bender.freq_grid_hz.len());
    let areas: Vec<f64> = table.rows.iter().map(|r| r.loop_area_j).collect();
    assert!(areas.windows(2).all(|w| w[1] > w[0]), "{areas:?}");
}

#[test]
fn tables_survive_csv() {
    let cfg = ProtocolConfig::from_toml_str("[sweep]\nheave_freq_grid_hz = \"0.5,2\"\n", &[]).unwrap();
    let imp = run_bender_sweep(&cfg).unwrap();
    let mut buf = Vec::new();
    write_impedance_csv(&mut buf, &imp).unwrap();
    assert_eq!(read_impedance_csv(buf.as_slice()).unwrap(), imp);

    let sweep = run_strouhal_sweep(&cfg).unwrap();
    assert_eq!(sweep.rows.len(), 4 * 2);
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &sweep).unwrap();
    assert_eq!(read_sweep_csv(buf.as_slice()).unwrap(), sweep);
}

#[test]
fn identical_configs_write_identical_files() {
    let cfg = ProtocolConfig::from_toml_str(
        "[sweep]\nheave_freq_grid_hz = \"1,2\"\ncycles = 3\nwarmup_cycles = 2\n[freeswim]\nduration_s = 0.5\n",
        &[],
    )
    .unwrap();
    let base = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for _ in 0..2 {
        let mut dir = RunDir::create(base.path(), "sweep", "stamp").unwrap();
        execute_sweep(&cfg, &mut dir).unwrap();
        execute_freeswim(&cfg, &cfg.freeswim.designs, &mut dir).unwrap();
        dirs.push(dir);
    }
    let names = |d: &RunDir| -> Vec<String> {
        d.files()
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect()
    };
    assert_eq!(names(&dirs[0]), names(&dirs[1]));
    assert!(names(&dirs[0]).contains(&"trace_c_2hz.csv".to_string()));
    assert!(names(&dirs[0]).contains(&"fig_trace_c.svg".to_string()));
    for (a, b) in dirs[0].files().iter().zip(dirs[1].files()) {
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), "{}", a.display());
    }
    let trace = std::fs::read_to_string(dirs[0].path().join("trace_baseline_1hz.csv")).unwrap();
    assert!(trace.starts_with("time_s,heave_m,pitch_rad,thrust_n,lateral_n,power_w\n"));
    let swim = std::fs::read_to_string(dirs[0].path().join("freeswim_c.csv")).unwrap();
    assert!(swim.starts_with("time_s,x_m,u_mps,a_mps2,a_cycavg_mps2,u_cycavg_mps\n"));
}

#[test]
fn shipped_config_is_the_default() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    assert_eq!(ProtocolConfig::load(&path, &[]).unwrap(), ProtocolConfig::default());
}
