use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spinboson"));
    for (k, _) in std::env::vars() {
        if k.starts_with("SPINBOSON_") {
            c.env_remove(k);
        }
    }
    c
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn figure1_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let st = bin().args(["figure1", "--steps", "50", "--tmax-prime", "20", "--output"]).arg(&path).status().unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# spinboson figure1 "));
    assert_eq!(text.lines().nth(1), Some("t_prime,W"));
    let r = rows(&text);
    assert_eq!(r.len(), 51);
    assert_eq!(r[0], vec![0.0, 1.0]);
    assert!(r.iter().all(|x| x[1].abs() <= 1.0));
    // 17 significant digits
    let cell = text.lines().nth(3).unwrap().split(',').nth(1).unwrap();
    assert_eq!(cell.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
}

#[test]
fn figure2_columns_agree() {
    let out = bin().args(["figure2", "--steps", "400"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("t_prime,abs_rho12_exact,abs_rho12_closed"));
    let worst = rows(&text).iter().map(|r| (r[1] - r[2]).abs()).fold(0.0, f64::max);
    assert!(worst < 0.03, "{worst}");
}

#[test]
fn pointer_demo_writes_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let st = bin().args(["pointer-demo", "--steps", "10", "--output"]).arg(&path).status().unwrap();
    assert!(st.success());
    assert!(path.exists());
    let coin = std::fs::read_to_string(dir.path().join("p_coincidences.csv")).unwrap();
    assert_eq!(coin.lines().nth(1), Some("k,t_prime,alpha_re,alpha_im,beta_re,beta_im"));
}

#[test]
fn environment_and_flag_precedence() {
    let out = bin().env("SPINBOSON_NBAR", "20").args(["figure1", "--steps", "1"]).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("nbar=20 "));
    let out = bin().env("SPINBOSON_NBAR", "20").args(["figure1", "--steps", "1", "--nbar", "30"]).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("nbar=30 "));
    let out = bin().env("SPINBOSON_RWA", "false").args(["figure1", "--steps", "1"]).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("rwa=false "));
}

#[test]
fn exit_codes() {
    assert_eq!(bin().args(["figure1", "--initial", "nope"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("nonsense").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["figure1", "--nmax", "30"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    // n_max passes the config rule but the coherent tail still reaches the edge
    let out = bin().args(["sweep", "--nbar", "0.5", "--nmax", "7", "--columns", "w", "--steps", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn repeated_runs_are_identical() {
    let a = bin().args(["figure3", "--steps", "200"]).output().unwrap().stdout;
    let b = bin().args(["figure3", "--steps", "200"]).output().unwrap().stdout;
    assert_eq!(a, b);
}
