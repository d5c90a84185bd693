//! The `hippp` binary end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hippp::cli::{read_rows, DesignArtifact, CSV_HEADER};

const BIN: &str = env!("CARGO_BIN_EXE_hippp");

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn hippp(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, edit: impl Fn(String) -> String) -> PathBuf {
    let text = edit(fs::read_to_string(config_path("quick.toml")).unwrap());
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn design_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_path("experiment.toml");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        let o = hippp(&["design", "--config", s(&cfg), "--out", s(out), "--trials", "100"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (fs::read(a.join("design.toml")).unwrap(), fs::read(b.join("design.toml")).unwrap());
    assert_eq!(ta, tb);

    let artifact = DesignArtifact::from_toml_str(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(artifact.batteries, 9);
    assert_eq!(artifact.layer1.len(), 3);
    let mut ratings: Vec<f64> = artifact.layer1.iter().map(|e| e.rating).collect();
    ratings.sort_by(f64::total_cmp);
    ratings.dedup();
    assert!(ratings.len() <= 3);
    assert!(artifact.layer2_curve.windows(2).all(|w| w[1].utilization >= w[0].utilization - 1e-9));
}

#[test]
fn thread_count_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_path("quick.toml");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(hippp(&["--threads", "1", "design", "--config", s(&cfg), "--out", s(&a)]).status.success());
    assert!(hippp(&["design", "--config", s(&cfg), "--out", s(&b), "--threads", "3"]).status.success());
    assert_eq!(fs::read(a.join("design.toml")).unwrap(), fs::read(b.join("design.toml")).unwrap());
}

#[test]
fn homogeneous_design_has_zero_ratings() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), |t| t.replace("sigma = [0.2, 0.1]", "sigma = [0.0]"));
    let out = tmp.path().join("out");
    let o = hippp(&["design", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let artifact = DesignArtifact::load(&out.join("design.toml")).unwrap();
    assert!(artifact.layer1.iter().all(|e| e.rating == 0.0));
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), |t| t.replace("kinds = [\"fpp\", \"cppp\", \"lshippp\"]", "kinds = []"));
    let o = hippp(&["sweep", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("architectures.kinds"));

    let cfg = write_config(tmp.path(), |t| t.replace("mean = 1.0", "mean = \"one\""));
    let o = hippp(&["design", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mean"));

    let o = hippp(&["design", "--config", s(&tmp.path().join("missing.toml"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumeration_cap_exits_3_with_hint() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), |t| {
        t.replace("batteries = 5", "batteries = 30").replace("num_layer1 = 2", "num_layer1 = 8")
    });
    let o = hippp(&["design", "--config", s(&cfg), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reduce"));
}

#[test]
fn sweep_writes_round_trippable_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_path("quick.toml");
    let out = tmp.path().join("sweep");
    let o = hippp(&["sweep", "--config", s(&cfg), "--out", s(&out), "--seed", "3", "--trials", "30"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    for kind in ["fpp", "cppp", "lshippp"] {
        assert_eq!(stdout.lines().filter(|l| l.starts_with(kind)).count(), 1, "{stdout}");
    }

    for name in [
        "utilization_vs_rating.csv",
        "utilization_vs_heterogeneity.csv",
        "efficiency_vs_rating.csv",
        "frontier.csv",
    ] {
        let path = out.join(name);
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next(), Some(CSV_HEADER), "{name}");
        let rows = read_rows(&path).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.trials == 30 && r.seed == 3));
        // writing the parsed rows again reproduces the file exactly
        let again = tmp.path().join("again.csv");
        hippp::cli::write_rows(&again, &rows).unwrap();
        assert_eq!(fs::read_to_string(&again).unwrap(), text, "{name}");
    }

    let rerun = tmp.path().join("rerun");
    let o = hippp(&["sweep", "--config", s(&cfg), "--out", s(&rerun), "--seed", "3", "--trials", "30"]);
    assert!(o.status.success());
    assert_eq!(
        fs::read(out.join("frontier.csv")).unwrap(),
        fs::read(rerun.join("frontier.csv")).unwrap()
    );
}

#[test]
fn flow_reports_the_operating_point() {
    let tmp = tempfile::tempdir().unwrap();
    let design = tmp.path().join("design.toml");
    fs::write(
        &design,
        "batteries = 2\nexpected_set = [0.8, 1.2]\nlayer2_rating = 0.0\n\n[[layer1]]\nfrom = 0\nto = 1\nrating = 0.2\n",
    )
    .unwrap();
    let caps = tmp.path().join("caps.txt");
    fs::write(&caps, "0.8\n1.2\n").unwrap();
    let o = hippp(&["flow", s(&design), s(&caps)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("utilization     1.000000"), "{stdout}");
    assert!(stdout.contains("L1   1 -> 0     0.200000"), "{stdout}");

    fs::write(&caps, "0.8\n1.2\n1.0\n").unwrap();
    assert_eq!(hippp(&["flow", s(&design), s(&caps)]).status.code(), Some(2));
    fs::write(&caps, "0.8\n-1.2\n").unwrap();
    assert_eq!(hippp(&["flow", s(&design), s(&caps)]).status.code(), Some(2));
}
