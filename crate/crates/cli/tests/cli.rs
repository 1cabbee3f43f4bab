//! End-to-end tests of the binary: flags, file formats, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn tscflp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tscflp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Hand-built single-route instance: lb 103, all-open objective 115.
const SINGLE_ROUTE: &str = r#"{"version":"1","class":"custom","seed":0,"n_plants":1,"n_depots":1,
"n_customers":1,"f":[10],"b":[100],"g":[5],"p":[100],"q":[20],"c":[[2]],"d":[[3]]}"#;

#[test]
fn gen_is_byte_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = tscflp(
        &["gen", "--class", "1", "--plants", "3", "--seed", "7", "--out", "a.json"],
        dir.path(),
    );
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = tscflp(
        &["gen", "--class", "1", "--plants", "3", "--seed", "7", "--out", "b.json"],
        dir.path(),
    );
    assert!(b.status.success());
    let bytes_a = std::fs::read(dir.path().join("a.json")).unwrap();
    let bytes_b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(bytes_a, bytes_b);

    let inst = tscflp::instance::Instance::load(&dir.path().join("a.json")).unwrap();
    assert!(inst.supply_cost.iter().all(|&c| (35..=45).contains(&c)));
    assert!(inst.delivery_cost.iter().all(|&d| (55..=65).contains(&d)));
}

#[test]
fn gen_rejects_out_of_range_class_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = tscflp(
        &["gen", "--class", "9", "--plants", "3", "--out", "x.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lb_prints_the_single_route_bound() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i.json"), SINGLE_ROUTE).unwrap();
    let out = tscflp(&["lb", "i.json"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "103.0");
}

#[test]
fn eval_reports_objective_and_its_parts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i.json"), SINGLE_ROUTE).unwrap();
    let out = tscflp(&["eval", "i.json", "--all-open"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("objective 115"));
    assert!(text.contains("fixed 15"));
    assert!(text.contains("transport 100"));
}

#[test]
fn eval_infeasible_mask_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i.json"), SINGLE_ROUTE).unwrap();
    let out = tscflp(
        &["eval", "i.json", "--plants-mask", "0", "--depots-mask", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("plant"));
}

#[test]
fn eval_without_masks_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i.json"), SINGLE_ROUTE).unwrap();
    let out = tscflp(&["eval", "i.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_row_is_internally_consistent() {
    // On the single-route instance the optimum is forced, so the row is
    // fully predictable: z = 115, lb = 103, rpd = 11.65.
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i.json"), SINGLE_ROUTE).unwrap();
    let out = tscflp(
        &[
            "solve", "i.json", "--runs", "1", "--seed", "5", "--t-max", "5", "--pop-size", "4",
            "--out-csv", "row.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("row.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "class,instance,lb,z_min,z_avg,rpd_min,rpd_avg,time_s"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "custom");
    assert_eq!(row[2], "103.0");
    assert_eq!(row[3], "115");
    assert_eq!(row[4], "115.0"); // one run: min == avg
    assert_eq!(row[5], "11.65"); // (115-103)*100/103 to 2 dp
    assert_eq!(row[6], "11.65");
}

#[test]
fn solve_rejects_corrupt_and_missing_instances() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"version\":").unwrap();
    let corrupt = tscflp(&["solve", "bad.json", "--runs", "1"], dir.path());
    assert_eq!(corrupt.status.code(), Some(2));
    let missing = tscflp(&["solve", "absent.json", "--runs", "1"], dir.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn config_file_applies_and_bad_keys_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("i.json"), SINGLE_ROUTE).unwrap();
    std::fs::write(dir.path().join("ok.cfg"), "population_size=6\nmax_iterations=4\n").unwrap();
    let ok = tscflp(
        &["solve", "i.json", "--runs", "1", "--config", "ok.cfg"],
        dir.path(),
    );
    assert!(ok.status.success());

    std::fs::write(dir.path().join("bad.cfg"), "warp_speed=9\n").unwrap();
    let bad = tscflp(
        &["solve", "i.json", "--runs", "1", "--config", "bad.cfg"],
        dir.path(),
    );
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("warp_speed"));
}

#[test]
fn bench_emits_rows_plus_average_with_consistent_means() {
    let dir = tempfile::tempdir().unwrap();
    let out = tscflp(
        &[
            "bench", "--classes", "1,2", "--plants", "2", "--instances-per-class", "2", "--runs",
            "1", "--seed", "3", "--t-max", "10", "--pop-size", "8", "--out", "bench.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 4 + 1); // header, 2x2 rows, average
    assert!(lines[0].starts_with("class,instance,"));
    assert!(lines[5].starts_with("avg,,"));

    // The average line is the column-wise mean of the data rows to 2 dp.
    let col = |line: &str, idx: usize| -> f64 { line.split(',').nth(idx).unwrap().parse().unwrap() };
    for idx in [5usize, 6] {
        let mean: f64 = lines[1..5].iter().map(|l| col(l, idx)).sum::<f64>() / 4.0;
        let reported = col(lines[5], idx);
        assert!((mean - reported).abs() < 0.005 + 1e-9);
    }
}

#[test]
fn sweep_emits_one_line_per_population_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = tscflp(
        &[
            "sweep", "--pop-sizes", "6,10", "--class", "1", "--plants", "2", "--instances", "1",
            "--runs", "1", "--t-max", "5", "--out", "sweep.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "pop_size,z_avg,rpd_avg,time_s");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("6,"));
    assert!(lines[2].starts_with("10,"));
}
