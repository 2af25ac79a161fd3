use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nonmarkov(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonmarkov")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn gen_small(dir: &Path, name: &str, extra: &[&str]) {
    let mut args = vec!["gen", "--pairs", "0.8:1,0.9:1.5,1:1", "--pmfs", "60", "--seed", "4", "--out", name];
    args.extend_from_slice(extra);
    let o = nonmarkov(&args, dir);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn minimal_plan_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonmarkov(&["gen", "--pairs", "0.8:1", "--pmfs", "1", "--samples", "50", "--out", "one.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("one.csv")).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().next().unwrap().ends_with("s_k2_l3,label,exact_label"));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("one.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["rows"], 1);
    assert_eq!(meta["provenance"]["seeds"]["base_seed"], 0);
}

#[test]
fn measurement_set_changes_columns() {
    let dir = tempfile::tempdir().unwrap();
    gen_small(dir.path(), "ixy.csv", &["--measurements", "IXY", "--shots", "exact"]);
    let header = fs::read_to_string(dir.path().join("ixy.csv")).unwrap().lines().next().unwrap().to_owned();
    assert!(header.contains("s_k0_l0,s_k0_l1,s_k0_l2,s_k1_l0"));
}

#[test]
fn usage_and_config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&nonmarkov(&[], dir.path())), 1);
    assert_eq!(code(&nonmarkov(&["gen"], dir.path())), 1);
    assert_eq!(code(&nonmarkov(&["gen", "--pairs", "1.5:1", "--out", "x.csv"], dir.path())), 1);
    assert_eq!(code(&nonmarkov(&["gen", "--measurements", "XQ", "--out", "x.csv"], dir.path())), 1);
    fs::write(dir.path().join("plan.toml"), "[plan]\nunknown_key = 3\n").unwrap();
    let o = nonmarkov(&["gen", "--plan", "plan.toml", "--out", "x.csv"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown_key"), "{}", stderr(&o));
    assert!(!dir.path().join("x.csv").exists());
    assert_eq!(code(&nonmarkov(&["--version"], dir.path())), 0);
}

#[test]
fn plan_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plan.toml"), "[plan]\npairs = [[0.9, 1.25]]\npmfs_per_pair = 3\nseed = 11\n").unwrap();
    assert_eq!(code(&nonmarkov(&["gen", "--plan", "plan.toml", "--pmfs", "5", "--out", "p.csv"], dir.path())), 0);
    let text = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);
    let meta = fs::read_to_string(dir.path().join("p.csv.meta.json")).unwrap();
    assert!(meta.contains("\"base_seed\": 11"));
}

#[test]
fn input_errors_exit_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&nonmarkov(&["train", "missing.csv", "--out", "m.txt"], p)), 2);

    gen_small(p, "d.csv", &[]);
    let header = fs::read_to_string(p.join("d.csv")).unwrap().lines().next().unwrap().to_owned();
    fs::write(p.join("empty.csv"), format!("{header}\n")).unwrap();
    let o = nonmarkov(&["train", "empty.csv", "--out", "m.txt"], p);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no rows"));

    let mut lines: Vec<String> = fs::read_to_string(p.join("d.csv")).unwrap().lines().map(String::from).collect();
    lines[5] = lines[5].replacen(',', ",oops", 1);
    fs::write(p.join("bad.csv"), lines.join("\n")).unwrap();
    let o = nonmarkov(&["train", "bad.csv", "--out", "m.txt"], p);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("row 5"), "{}", stderr(&o));

    for f in ["m.txt", "m.txt.metrics.txt", "m.txt.metrics.json"] {
        assert!(!p.join(f).exists(), "{f} written on failure");
    }
}

#[test]
fn train_crossval_sweep_scatter_knn() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    gen_small(p, "d.csv", &[]);

    assert_eq!(code(&nonmarkov(&["train", "d.csv", "--degree", "2", "--out", "m.txt"], p)), 0);
    let model = fs::read_to_string(p.join("m.txt")).unwrap();
    assert!(model.starts_with("nonmarkov-polymodel v1\ndegree 2\nordering grlex\n"));
    let metrics: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("m.txt.metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["train"]["n"], 126);
    assert_eq!(metrics["test"]["n"], 54);
    assert_eq!(metrics["provenance"]["config_sha256"].as_str().unwrap().len(), 64);
    assert!(fs::read_to_string(p.join("m.txt.metrics.txt")).unwrap().contains("test   n=54"));
    assert_eq!(code(&nonmarkov(&["train", "d.csv", "--degree", "1,2", "--out", "m2.txt"], p)), 1);

    assert_eq!(code(&nonmarkov(&["crossval", "d.csv", "--out", "cv.txt"], p)), 0);
    let cv = fs::read_to_string(p.join("cv.txt")).unwrap();
    let table: Vec<&str> = cv.lines().skip_while(|l| !l.starts_with("degree")).skip(1).collect();
    assert_eq!(table.len(), 3);
    assert_eq!(code(&nonmarkov(&["crossval", "d.csv", "--out", "cv2.txt"], p)), 0);
    assert_eq!(fs::read(p.join("cv.txt.json")).unwrap(), fs::read(p.join("cv2.txt.json")).unwrap());
    assert_eq!(code(&nonmarkov(&["crossval", "d.csv", "--kfold", "181", "--out", "cv3.txt"], p)), 1);

    let o = nonmarkov(&["sweep", "d.csv", "--test-size", "50", "--train-sizes", "20,60,100,130", "--out", "sw.txt"], p);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let sw: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("sw.txt.json")).unwrap()).unwrap();
    assert_eq!(sw["sweep"]["entries"].as_array().unwrap().len(), 4);
    assert_eq!(code(&nonmarkov(&["sweep", "d.csv", "--out", "sw2.txt"], p)), 1);

    assert_eq!(code(&nonmarkov(&["scatter", "m.txt", "d.csv", "--out", "sc.csv"], p)), 0);
    let sc = fs::read_to_string(p.join("sc.csv")).unwrap();
    assert_eq!(sc.lines().next().unwrap(), "id,actual,predicted");
    assert_eq!(sc.lines().count(), 55);
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("sc.csv.fit.json")).unwrap()).unwrap();
    assert_eq!(fit["fit"]["degenerate"], false);
    assert!(fit["fit"]["slope"].as_f64().unwrap() > 0.0);

    assert_eq!(code(&nonmarkov(&["knn", "d.csv", "--neighbors", "3", "--out", "knn.txt"], p)), 0);
    assert!(fs::read_to_string(p.join("knn.txt")).unwrap().contains("k=3"));
    assert_eq!(code(&nonmarkov(&["knn", "d.csv", "--neighbors", "500", "--out", "knn2.txt"], p)), 1);
}

#[test]
fn scatter_rejects_mismatched_features() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    gen_small(p, "xyz.csv", &[]);
    gen_small(p, "ixy.csv", &["--measurements", "IXY"]);
    assert_eq!(code(&nonmarkov(&["train", "xyz.csv", "--degree", "1", "--out", "m.txt"], p)), 0);
    let o = nonmarkov(&["scatter", "m.txt", "ixy.csv", "--out", "sc.csv"], p);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("do not match"));
    assert!(!p.join("sc.csv").exists());
}

#[test]
fn gen_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    gen_small(dir.path(), "a.csv", &["--noise-eps", "0.05"]);
    gen_small(dir.path(), "b.csv", &["--noise-eps", "0.05"]);
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    let o = nonmarkov(&["gen", "--pairs", "0.8:1,0.9:1.5,1:1", "--pmfs", "60", "--seed", "5", "--noise-eps", "0.05", "--out", "c.csv"], dir.path());
    assert_eq!(code(&o), 0);
    assert_ne!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("c.csv")).unwrap());
}
