mod common;

use common::*;

#[test]
fn solve_harmonic_noninteracting() {
    let t = ok_tables(&["solve", "--potential", "harmonic", "--g", "0", "--K", "20"]);
    let s = &t[0];
    assert!((s.col("energy")[0] - 1.0).abs() < 1e-12);
    assert!((s.col("lambda_0")[0] - 1.0).abs() < 1e-12);
    assert_eq!(s.meta["K"], "20");
    assert_eq!(s.meta["D"], "210");
    assert!((s.meta_f64("omega") - 1.0).abs() < 1e-6);
    assert_eq!(s.meta["version"], env!("CARGO_PKG_VERSION"));
    for key in ["omega_rel_tol", "residual_tolerance", "normalization_tolerance"] {
        assert!(s.meta.contains_key(key), "{key}");
    }
    let occ = &t[1];
    assert_eq!(occ.header, ["state", "l", "k", "lambda"]);
}

#[test]
fn solve_harmonic_interacting_matches_the_oracle_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = pairci(&["oracle", "--type", "exact-harmonic", "--g", "1", "--n-states", "1", "--out", out]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let oracle = tables(&std::fs::read(dir.path().join("spectrum.csv")).unwrap());
    let e_oracle = oracle[0].col("energy")[0];

    let t = ok_tables(&["solve", "--potential", "harmonic", "--g", "1", "--K", "40", "--omega", "auto"]);
    let e = t[0].col("energy")[0];
    println!("CI {e:.10}, oracle {e_oracle:.10}, difference {:.3e}", e - e_oracle);
    assert!((e - e_oracle).abs() < 1e-5);
}

#[test]
fn solve_double_well_noninteracting_is_unentangled() {
    let t = ok_tables(&["solve", "--potential", "double_well", "--a", "0.025", "--g", "0", "--K", "60", "--n-states", "1"]);
    assert!((t[0].col("lambda_0")[0] - 1.0).abs() < 1e-8);
}

#[test]
fn harmonic_sweep_is_monotone_and_condensed_at_weak_coupling() {
    let t = ok_tables(&["sweep", "--g-min", "0", "--g-max", "20", "--points", "41", "--K", "20", "--n-states", "1"]);
    let s = &t[0];
    assert_eq!(s.rows.len(), 41);
    assert!(s.text("status").iter().all(|x| x == "ok"));
    let l0 = s.col("lambda_0");
    assert!(l0.windows(2).all(|w| w[1] < w[0]), "{l0:?}");
    let g = s.col("g");
    assert!(g.windows(2).all(|w| w[0] < w[1]));

    let t = ok_tables(&["sweep", "--g-values", "0.1", "--K", "20", "--n-states", "1"]);
    assert!(t[0].col("lambda_0")[0] > 0.99);
}

#[test]
fn double_well_sweep_fragments() {
    let t = ok_tables(&[
        "sweep", "--potential", "double_well", "--a", "0.025", "--g-values", "0,2.5e-8,5e-8,1e-6", "--K", "60",
        "--n-states", "1",
    ]);
    let l1 = t[0].col("lambda_1");
    assert!(l1.windows(2).all(|w| w[0] < w[1]), "{l1:?}");
    assert!(l1[3] > 0.4 && l1[3] <= 0.5);
}

#[test]
fn log_sweep_hits_the_endpoints() {
    let t = ok_tables(&[
        "sweep", "--potential", "double_well", "--a", "0.025", "--g-min", "1e-9", "--g-max", "1e-6", "--points", "4",
        "--spacing", "log", "--K", "12", "--n-states", "1",
    ]);
    let g = t[0].col("g");
    assert_eq!((g[0], g[3]), (1e-9, 1e-6));
    assert!((g[1] / 1e-8 - 1.0).abs() < 1e-12);
    assert_eq!(t[0].meta["spacing"], "log");
}

#[test]
fn crossover_brackets_the_threshold() {
    let t = ok_tables(&[
        "crossover", "--potential", "double_well", "--a", "0.025", "--K", "40", "--g-min", "1e-9", "--g-max", "1e-4",
        "--rel-tol", "1e-3",
    ]);
    let s = &t[0];
    let (g, lo, hi) = (s.col("g_cr")[0], s.col("g_lo")[0], s.col("g_hi")[0]);
    assert!(lo <= g && g <= hi && (hi - lo) <= 1e-3 * hi);
    let ev = &t[1];
    assert_eq!(ev.header, ["g", "gap"]);
    assert_eq!(ev.rows.len(), s.col("evaluations")[0] as usize);
}

#[test]
fn crossover_without_sign_change_is_a_numerical_failure() {
    let r = binary(&["crossover", "--potential", "harmonic", "--K", "10", "--g-min", "0", "--g-max", "1e-3"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("bracket"), "{}", r.stderr);
}

#[test]
fn densities() {
    let t = ok_tables(&["density", "--potential", "harmonic", "--g", "0", "--K", "10", "--grid-half-width", "4", "--grid-points", "41"]);
    let rho = &t[0];
    let pair = &t[1];
    assert_eq!(rho.header, ["x", "value"]);
    assert_eq!(pair.header, ["x1", "x2", "value"]);
    assert_eq!(pair.rows.len(), 41 * 41);
    let v = pair.col("value");
    let peak = v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert_eq!((pair.col("x1")[peak], pair.col("x2")[peak]), (0.0, 0.0));
    assert!((rho.meta_f64("integral") - 1.0).abs() < 1e-6);

    let t = ok_tables(&["density", "--potential", "double_well", "--a", "0.025", "--g", "1e-6", "--K", "60"]);
    assert!(t[1].meta_f64("same_side_mass") < 0.5);

    let a = 0.025f64;
    let t = ok_tables(&["density", "--potential", "triple_well", "--a", "0.025", "--g", "1", "--K", "40"]);
    let rho = &t[0];
    let h = rho.col("x")[1] - rho.col("x")[0];
    let inner: f64 = rho.col("x").iter().zip(rho.col("value")).filter(|(x, _)| x.abs() < 1.0 / (3.0 * a).sqrt()).map(|(_, v)| v * h).sum();
    assert!(inner > 0.5, "{inner}");
}

#[test]
fn orbitals_dump() {
    let t = ok_tables(&["orbitals", "--potential", "harmonic", "--g", "1", "--K", "20", "--count", "3", "--grid-half-width", "10", "--grid-points", "401"]);
    let o = &t[0];
    assert_eq!(o.header, ["x", "v_0", "v_1", "v_2"]);
    let h = 0.05;
    for l in 0..3 {
        let n: f64 = o.col(&format!("v_{l}")).iter().map(|v| v * v * h).sum();
        assert!((n - 1.0).abs() < 1e-8);
    }
    let lam: f64 = (0..3).map(|l| o.meta_f64(&format!("lambda_{l}"))).sum();
    assert!(lam < 1.0 && lam > 0.99);
}

#[test]
fn oracle_examples() {
    let t = ok_tables(&["oracle", "--type", "tg", "--potential", "harmonic"]);
    assert!((t[0].col("lambda_0")[0] - 0.7745).abs() < 5e-4);

    let t = ok_tables(&["oracle", "--type", "exact-harmonic", "--g", "0"]);
    assert!((t[0].col("energy")[0] - 1.0).abs() < 1e-8);

    let t = ok_tables(&["oracle", "--type", "grid1d", "--potential", "harmonic", "--n-states", "2"]);
    assert_eq!(t[0].header, ["n", "energy"]);

    let r = binary(&["oracle", "--type", "exact-harmonic", "--potential", "triple_well", "--a", "0.025", "--g", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("unsupported"), "{}", r.stderr);
}

#[test]
fn grid2d_oracle_triple_well_is_fragmented_at_2_05() {
    let t = ok_tables(&["oracle", "--type", "grid2d", "--potential", "triple_well", "--a", "0.025", "--g", "2.05", "--n-states", "1"]);
    let (l0, l1) = (t[0].col("lambda_0")[0], t[0].col("lambda_1")[0]);
    println!("grid2d λ0 = {l0}, λ1 = {l1}");
    assert!((l0 - l1).abs() < 0.1);
}

#[test]
fn configuration_errors_exit_with_one() {
    for args in [
        vec!["solve", "--potential", "double_well", "--g", "0"],
        vec!["solve", "--potential", "harmonic"],
        vec!["solve", "--g", "0", "--K", "0"],
        vec!["solve", "--g", "0", "--omega", "-2"],
        vec!["sweep", "--g-min", "0", "--g-max", "1", "--spacing", "log"],
        vec!["oracle", "--potential", "harmonic"],
        vec!["solve", "--no-such-flag"],
        vec!["solve", "--g", "0", "--config", "/nonexistent/pairci.conf"],
    ] {
        let r = binary(&args);
        assert_eq!(r.code, 1, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
        assert!(r.stdout.is_empty());
    }
}

#[test]
fn failed_omega_search_exits_with_two() {
    let r = binary(&[
        "solve", "--potential", "double_well", "--a", "0.025", "--g", "0", "--K", "10", "--omega-lo", "5", "--omega-hi", "1000",
    ]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn sweep_records_failures_per_row() {
    let r = pairci(&[
        "sweep", "--potential", "double_well", "--a", "0.025", "--g-values", "0,1", "--K", "10", "--omega-lo", "5",
        "--omega-hi", "1000",
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.contains("2 of 2"));
    let t = tables(&r.stdout);
    assert!(t[0].text("status").iter().all(|s| s.starts_with("error:")));
    assert_eq!(t[0].meta["failed"], "2");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# harmonic benchmark\npotential = harmonic\ng = 5\nK = 12\nn_states = 1\n").unwrap();
    let p = path.to_str().unwrap();
    let from_file = ok_tables(&["solve", "--config", p]);
    assert_eq!(from_file[0].meta["g"], "5.0000000000000000e0");
    let overridden = ok_tables(&["solve", "--config", p, "--g", "0"]);
    assert_eq!(overridden[0].meta["g"], "0.0000000000000000e0");
    assert_eq!(overridden[0].meta["K"], "12");
    assert!((overridden[0].col("energy")[0] - 1.0).abs() < 1e-12);

    std::fs::write(&path, "potential = harmonic\nbogus = 1\n").unwrap();
    let r = binary(&["solve", "--config", p, "--g", "0"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("bogus"));
}

#[test]
fn out_directory_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let r = pairci(&["solve", "--g", "1", "--K", "10", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("spectrum.json")).unwrap()).unwrap();
    assert_eq!(v["metadata"]["K"], 10);
    assert_eq!(v["metadata"]["D"], 55);
    assert_eq!(v["columns"][1], "energy");
    assert!(v["rows"][0][1].as_f64().unwrap() > 1.0);
    assert!(out.join("occupancies.json").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["solve", "--potential", "triple_well", "--a", "0.025", "--g", "1", "--K", "16"];
    let a = binary(&args);
    let b = binary(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let json = ["oracle", "--type", "tg", "--potential", "double_well", "--a", "0.025", "--format", "json", "--grid-half-width", "13", "--grid-points", "201"];
    assert_eq!(pairci(&json).stdout, pairci(&json).stdout);
}

#[test]
fn parallel_sweep_equals_serial_sweep() {
    let base = ["sweep", "--potential", "triple_well", "--a", "0.025", "--g-min", "0", "--g-max", "3", "--points", "13", "--K", "14"];
    let serial = pairci(&[&base[..], &["--workers", "1"]].concat());
    let parallel = pairci(&[&base[..], &["--workers", "4"]].concat());
    let default = pairci(&base);
    assert_eq!(serial.code, 0);
    assert_eq!(serial.stdout, parallel.stdout);
    assert_eq!(serial.stdout, default.stdout);
}
