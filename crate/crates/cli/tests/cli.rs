use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn teq(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teq"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "[channel]\nlabel = \"b\"\n[sim]\nebn0_db = [4, 8]\nmin_bit_errors = 50\nmax_frames = 40\n";

#[test]
fn sweep_writes_csv_and_manifest_that_reproduces_it() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL).unwrap();
    let o = teq(&["sweep", "-c", "c.toml", "-o", "first", "--threads", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));

    let csv = fs::read_to_string(dir.path().join("first/results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "run_id,channel,algorithm,ebn0_db,iteration,frames,bits,bit_errors,ber"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 4);
    assert!(rows.iter().all(|r| r.len() == 9 && r[0].len() == 12 && r[1] == "b"));
    assert_eq!(rows[0][2], "cod-map");
    assert_eq!(rows[0][3], "4.000000000e0");
    assert_eq!(rows[15][2], "map-sbvp");
    assert_eq!(rows[15][4], "4");

    let o = teq(
        &["sweep", "-c", "first/manifest.toml", "-o", "second", "--threads", "1"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let again = fs::read_to_string(dir.path().join("second/results.csv")).unwrap();
    assert_eq!(csv, again);
}

#[test]
fn seed_and_set_change_the_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL).unwrap();
    let base = teq(&["sweep", "-c", "c.toml", "-o", "a"], dir.path());
    assert!(base.status.success());
    let seeded = teq(&["sweep", "-c", "c.toml", "-o", "b", "--seed", "9"], dir.path());
    assert!(seeded.status.success());
    let a = fs::read_to_string(dir.path().join("a/results.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("b/results.csv")).unwrap();
    assert_ne!(a[..90], b[..90], "run ids must differ");
    let manifest = fs::read_to_string(dir.path().join("b/manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 9"));

    let o = teq(
        &["sweep", "-c", "c.toml", "-o", "c", "--set", "sim.iterations=2", "--set", "sim.ebn0_db=[8]"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let c = fs::read_to_string(dir.path().join("c/results.csv")).unwrap();
    assert_eq!(c.lines().count(), 1 + 2 * 2);
}

#[test]
fn default_output_directory_is_cwd() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), "[sim]\nebn0_db = [6]\nmax_frames = 3\n").unwrap();
    let o = teq(&["sweep", "-c", "c.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("results.csv").exists());
    assert!(dir.path().join("manifest.toml").exists());
}

#[test]
fn unknown_channel_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), "[channel]\nlabel = \"d\"\n").unwrap();
    let o = teq(&["sweep", "-c", "c.toml"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("'d'"), "{}", stderr(&o));
    assert!(!dir.path().join("results.csv").exists());
}

#[test]
fn bad_config_and_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "[sim]\nunknown_key = 1\n").unwrap();
    let o = teq(&["sweep", "-c", "bad.toml"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("unknown_key"), "{}", stderr(&o));
    fs::write(dir.path().join("ok.toml"), "").unwrap();
    let o = teq(&["sweep", "-c", "ok.toml", "--threads", "0"], dir.path());
    assert!(!o.status.success());
    let o = teq(&["sweep", "-c", "missing.toml"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn plot_renders_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SMALL).unwrap();
    assert!(teq(&["sweep", "-c", "c.toml"], dir.path()).status.success());
    for name in ["one.svg", "two.svg"] {
        let o = teq(&["plot", "results.csv", "-o", name], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let one = fs::read_to_string(dir.path().join("one.svg")).unwrap();
    assert_eq!(one, fs::read_to_string(dir.path().join("two.svg")).unwrap());
    assert!(one.starts_with("<svg"));
    assert_eq!(one.matches("<polyline").count(), 2 * 4);
}

#[test]
fn plot_rejects_malformed_and_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let header = "run_id,channel,algorithm,ebn0_db,iteration,frames,bits,bit_errors,ber\n";
    fs::write(dir.path().join("empty.csv"), header).unwrap();
    let o = teq(&["plot", "empty.csv", "-o", "x.svg"], dir.path());
    assert!(!o.status.success());
    assert!(!dir.path().join("x.svg").exists());

    let bad = format!("{header}abc,b,cod-map,1,1,1,252,3,1e-2\nabc,b,cod-map,2,1,1,252,3,high\n");
    fs::write(dir.path().join("bad.csv"), bad).unwrap();
    let o = teq(&["plot", "bad.csv", "-o", "x.svg"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn calibrate_prints_table_and_enforces_bit_floor() {
    let dir = tempfile::tempdir().unwrap();
    let o = teq(&["calibrate", "--ebn0", "0,4", "--bits", "200000", "--seed", "5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1 + 2 + 1);
    assert!(out.contains("dev/sig"));

    let o = teq(&["calibrate", "--bits", "1000"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("100000"), "{}", stderr(&o));
}
