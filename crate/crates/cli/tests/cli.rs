use std::process::{Command, Output};

fn lcinterp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcinterp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().skip(1).filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn nodes_table() {
    let o = lcinterp(&["nodes", "--pair", "7,5"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("i,j,x,y,class,weight"));
    assert_eq!(data_rows(&csv).len(), 24);
    assert!(csv.lines().last().unwrap().starts_with("# lcinterp "));

    let o = lcinterp(&["nodes", "--pair", "3,2"]);
    let sum: f64 = data_rows(&stdout(&o))
        .iter()
        .map(|r| r.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn rejects_non_coprime_pair() {
    let o = lcinterp(&["nodes", "--pair", "4,2"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not relatively prime"));
}

#[test]
fn mz_is_rerun_identical_across_thread_counts() {
    let args = ["mz", "--pair", "7,5", "--p", "2", "--trials", "200", "--seed", "42"];
    let a = lcinterp(&[&args[..], &["--threads", "1"]].concat());
    let b = lcinterp(&[&args[..], &["--threads", "4"]].concat());
    let c = lcinterp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().next(), Some("m,n,p,ratio_min,ratio_max,trials,seed"));
}

#[test]
fn lebesgue_trend_passes() {
    let o = lcinterp(&["lebesgue", "--seq", "padua:4..64"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&stdout(&o)).len(), 5);
}

#[test]
fn vdv_check_passes() {
    let o = lcinterp(&["vdv", "--check-lemma56", "--n", "16"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\n16,"));
}

#[test]
fn converge_slope_gate() {
    let base = ["converge", "--id", "hbv_step", "--seq", "padua:8..128", "--p", "1"];
    let ok = lcinterp(&[&base[..], &["--max-slope", "-0.85"]].concat());
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let strict = lcinterp(&[&base[..], &["--max-slope", "-5"]].concat());
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(ok.stdout, strict.stdout);
}

#[test]
fn analytic_error_gate() {
    let o = lcinterp(&[
        "converge",
        "--id",
        "analytic_cos",
        "--seq",
        "padua:8..32",
        "--max-final-error",
        "1e-8",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn writes_to_file() {
    let dir = std::env::temp_dir().join(format!("lcinterp-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corpus.csv");
    let o = lcinterp(&["corpus", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("hbv_step,hbv,"));
    std::fs::remove_dir_all(&dir).unwrap();

    let bad = lcinterp(&["corpus", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn interp_coefficient_dump() {
    let o = lcinterp(&["interp", "--id", "cheb_1_1", "--pair", "3,2", "--coeffs"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("i,j,c"));
    assert_eq!(data_rows(&csv).len(), 6);
}
