//! End-to-end checks of the binary: exit codes, report shape, file
//! round-trips, determinism, and golden snapshots.

use std::path::Path;
use std::process::{Command, Output};

use pvsubdiv_cli::formats;
use pvsubdiv_core::subdivide::Status;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvsubdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn report(o: &Output) -> Vec<(String, String)> {
    formats::parse_report(&stdout(o)).expect("report grammar")
}

fn get<'a>(rep: &'a [(String, String)], key: &str) -> &'a str {
    &rep.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("missing key {key}")).1
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(p).expect("golden file")
}

#[test]
fn run_circle_report() {
    let o = bin(&["run", "--poly", "x1^2+x2^2-1"]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "command"), "run");
    assert_eq!(get(&rep, "poly"), "x1^2 + x2^2 - 1");
    assert_eq!(get(&rep, "depth_capped"), "0");
    let regions: u64 = get(&rep, "regions").parse().unwrap();
    let c0: u64 = get(&rep, "c0_accepted").parse().unwrap();
    let c1: u64 = get(&rep, "c1_accepted").parse().unwrap();
    assert_eq!(regions, c0 + c1);
    assert!(regions > 0);
}

#[test]
fn run_three_dimensional() {
    let o = bin(&[
        "run",
        "--poly",
        "x1^2+x2^2+x3^2-1",
        "--center",
        "0,0,0",
        "--max-depth",
        "3",
    ]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "nvars"), "3");
    assert!(get(&rep, "regions").parse::<u64>().unwrap() > 0);
}

#[test]
fn zero_polynomial_is_usage_error() {
    let o = bin(&["run", "--poly", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = bin(&["run", "--poly", "x1", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn jobs_zero_is_usage_error() {
    let o = bin(&["run", "--poly", "x1^2+x2^2-1", "--jobs", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn strict_capped_exits_three_and_lists_regions() {
    let o = bin(&["run", "--poly", "x1^2-x2^2", "--max-depth", "6", "--strict"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    let capped: Vec<&str> =
        text.lines().filter(|l| l.starts_with("capped: ")).collect();
    assert!(!capped.is_empty());
    for line in &capped {
        assert!(line.contains("status=DEPTH_CAPPED"));
    }
    // without --strict the same run succeeds
    let o2 = bin(&["run", "--poly", "x1^2-x2^2", "--max-depth", "6"]);
    assert!(o2.status.success());
}

#[test]
fn records_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.txt");
    let o = bin(&[
        "run",
        "--poly",
        "x1^2+x2^2-1",
        "--max-depth",
        "4",
        "--records",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rep = report(&o);
    let text = std::fs::read_to_string(&path).unwrap();
    let recs = formats::parse_records(&text).unwrap();
    assert_eq!(recs.len(), get(&rep, "regions").parse::<usize>().unwrap());
    let c0 = recs.iter().filter(|r| r.status == Status::Accepted(0)).count();
    assert_eq!(c0, get(&rep, "c0_accepted").parse::<usize>().unwrap());
    // reserializing the parse reproduces the file byte for byte
    let mut again = String::new();
    for r in &recs {
        let center =
            r.center.iter().map(formats::dyadic_str).collect::<Vec<_>>().join(",");
        again.push_str(&format!(
            "path={} center={} hw={} status={}\n",
            formats::path_str(&r.path),
            center,
            formats::dyadic_str(&r.halfwidth),
            r.status
        ));
    }
    assert_eq!(again, text);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args =
        ["run", "--poly", "x1^4+2x1^2x2^2+x2^4-20x1^2+16x2^2+64", "--halfwidth", "4"];
    let a = bin(&args);
    let b = bin(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn jobs_do_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("r1.txt");
    let p4 = dir.path().join("r4.txt");
    let o1 = bin(&[
        "run",
        "--poly",
        "x1^2+x2^2-1",
        "--records",
        p1.to_str().unwrap(),
    ]);
    let o4 = bin(&[
        "run",
        "--poly",
        "x1^2+x2^2-1",
        "--jobs",
        "4",
        "--records",
        p4.to_str().unwrap(),
    ]);
    assert!(o1.status.success() && o4.status.success());
    assert_eq!(
        std::fs::read(&p1).unwrap(),
        std::fs::read(&p4).unwrap()
    );
}

#[test]
fn mesh_circle_is_one_loop() {
    let dir = tempfile::tempdir().unwrap();
    let mpath = dir.path().join("circle.mesh");
    let spath = dir.path().join("circle.svg");
    let o = bin(&[
        "mesh",
        "--poly",
        "x1^2+x2^2-1",
        "--records",
        mpath.to_str().unwrap(),
        "--svg",
        spath.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "closed_loops"), "1");
    assert_eq!(get(&rep, "vertices"), get(&rep, "segments"));
    let mesh = formats::parse_mesh(&std::fs::read_to_string(&mpath).unwrap()).unwrap();
    assert_eq!(mesh.vertices.len().to_string(), get(&rep, "vertices"));
    assert_eq!(formats::mesh_text(&mesh), std::fs::read_to_string(&mpath).unwrap());
    let svg = std::fs::read_to_string(&spath).unwrap();
    assert!(svg.starts_with("<svg ") && svg.ends_with("</svg>\n"));
}

#[test]
fn mesh_two_circles_are_two_loops() {
    let o = bin(&[
        "mesh",
        "--poly",
        "x1^4+2x1^2x2^2+x2^4-20x1^2+16x2^2+64",
        "--halfwidth",
        "4",
    ]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "closed_loops"), "2");
    assert_eq!(get(&rep, "vertices"), get(&rep, "segments"));
}

#[test]
fn mesh_refuses_capped_subdivision() {
    let o = bin(&["mesh", "--poly", "x1^2-x2^2", "--max-depth", "8"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn mesh_refuses_three_dimensions() {
    let o = bin(&["mesh", "--poly", "x1^2+x2^2+x3^2-1", "--center", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bound_oracle_circle_minus() {
    let o = bin(&[
        "bound",
        "--poly",
        "x1^2+x2^2-1/16",
        "--mode",
        "oracle",
        "--oracle",
        "circle-minus:1/4",
    ]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "delta"), "0.125");
    assert_eq!(get(&rep, "delta_certified"), "true");
    let log2: f64 = get(&rep, "region_bound_log2").parse().unwrap();
    assert!((log2 - 32.025191335368774).abs() < 1e-9);
}

#[test]
fn bound_oracle_generic_is_uncertified() {
    let o = bin(&[
        "bound",
        "--poly",
        "x1^2+x2^2-1/16",
        "--mode",
        "oracle",
        "--oracle",
        "generic:2",
    ]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "delta_certified"), "false");
    assert!(get(&rep, "delta").parse::<f64>().unwrap() > 0.0);
}

#[test]
fn bound_rigorous_matches_golden() {
    let o = bin(&["bound", "--poly", "x1^2+x2^2-1/16", "--mode", "rigorous"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden("bound_rigorous.txt"));
}

#[test]
fn bound_rigorous_needs_integer_corners() {
    let o = bin(&[
        "bound",
        "--poly",
        "x1^2+x2^2-1",
        "--halfwidth",
        "3*2^-1",
        "--mode",
        "rigorous",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bound_degree_one_is_vacuous() {
    let o = bin(&["bound", "--poly", "x1+x2-1", "--mode", "rigorous"]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "region_bound_log2"), "0");
}

#[test]
fn bad_oracle_specs_are_usage_errors() {
    for spec in ["bogus:1", "generic:0", "circle-plus:-1", "circle-plus"] {
        let o = bin(&[
            "ca",
            "--poly",
            "x1^2+x2^2-1",
            "--oracle",
            spec,
        ]);
        assert_eq!(o.status.code(), Some(2), "spec {spec:?}");
    }
}

#[test]
fn ca_circle_minus_with_run() {
    let o = bin(&[
        "ca",
        "--poly",
        "x1^2+x2^2-1/16",
        "--oracle",
        "circle-minus:1/4",
        "--with-run",
    ]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "region_diverged"), "false");
    assert_eq!(get(&rep, "count_within_region_estimate"), "true");
    let region: f64 = get(&rep, "region_estimate").parse().unwrap();
    let bit: f64 = get(&rep, "bit_estimate").parse().unwrap();
    assert!(region.is_finite() && bit.is_finite());
    assert!(bit >= region);
}

#[test]
fn ca_singular_input_diverges() {
    let o = bin(&["ca", "--poly", "x1^2-x2^2", "--oracle", "generic:2"]);
    assert!(o.status.success());
    let rep = report(&o);
    assert_eq!(get(&rep, "region_diverged"), "true");
    assert_eq!(get(&rep, "oracle_bracket_ok"), "true");
    assert!(rep.iter().any(|(k, _)| k == "divergence_hint"));
}

#[test]
fn bench_circle_minus_growth_is_tame() {
    let o = bin(&["bench", "circle_minus"]);
    assert!(o.status.success());
    let rep = report(&o);
    let rows: Vec<&(String, String)> = rep.iter().filter(|(k, _)| k == "row").collect();
    assert_eq!(rows.len(), 8);
    let r2: f64 = get(&rep, "fit_r2").parse().unwrap();
    let ratio: f64 = get(&rep, "growth_ratio").parse().unwrap();
    assert!(r2 >= 0.95);
    assert!(ratio < 50.0);
}

#[test]
fn bench_mignotte_counts_beat_floors() {
    let o = bin(&["bench", "mignotte"]);
    assert!(o.status.success());
    let rep = report(&o);
    for (k, v) in rep.iter().filter(|(k, _)| k == "row") {
        assert_eq!(k, "row");
        let cols: Vec<&str> = v.split(' ').collect();
        let count: f64 = cols[1].parse().unwrap();
        let floor: f64 = cols[2].parse().unwrap();
        assert!(count >= floor, "row {v}");
    }
}

#[test]
fn golden_run_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.txt");
    let o = bin(&[
        "run",
        "--poly",
        "x1^2+x2^2-1",
        "--max-depth",
        "3",
        "--records",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        golden("circle_run_records.txt")
    );
}

#[test]
fn golden_mesh_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mpath = dir.path().join("m.txt");
    let spath = dir.path().join("m.svg");
    let o = bin(&[
        "mesh",
        "--poly",
        "x1^2+x2^2-1",
        "--records",
        mpath.to_str().unwrap(),
        "--svg",
        spath.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(
        std::fs::read_to_string(&mpath).unwrap(),
        golden("circle_mesh_file.txt")
    );
    assert_eq!(std::fs::read_to_string(&spath).unwrap(), golden("circle_mesh.svg"));
}
