//! End-to-end checks of the command-line interface, covering the documented
//! exit codes and file formats.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparse-polar"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sparse-polar-cli-{}-{}", tag, std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn kernel_report_for_g2() {
    let dir = tmpdir("kernel");
    let file = dir.join("g2.txt");
    fs::write(&file, "1 0\n1 1\n").unwrap();
    let out = bin().args(["kernel", "--file"]).arg(&file).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("rate_of_polarization=0.5"));
    assert!(text.contains("valid_kernel=true"));
    // CSV flavor
    let out = bin()
        .args(["kernel", "--csv", "--file"])
        .arg(&file)
        .output()
        .unwrap();
    assert!(stdout(&out).lines().count() == 2);
}

#[test]
fn gamma_csv_row() {
    let out = bin()
        .args(["gamma", "--n", "3", "--lambda-list", "0.667"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,lambda,w_ub,gamma\n"));
    assert!(text.contains("3,0.667,4,0.125"), "got: {}", text);
}

#[test]
fn construct_encode_decode_round_trip() {
    let dir = tmpdir("roundtrip");
    let code = dir.join("code.txt");
    let status = bin()
        .args([
            "construct", "--n", "4", "--lambda", "0.5", "--scheme", "drs", "--channel",
            "bec 0.3", "--k", "8", "--seed", "5", "--out",
        ])
        .arg(&code)
        .status()
        .unwrap();
    assert!(status.success());

    let msg = dir.join("msg.txt");
    fs::write(&msg, "10110010\n").unwrap();
    let x = dir.join("x.txt");
    let status = bin()
        .args(["encode", "--code"])
        .arg(&code)
        .args(["--in"])
        .arg(&msg)
        .args(["--out"])
        .arg(&x)
        .status()
        .unwrap();
    assert!(status.success());

    let est = dir.join("est.txt");
    let status = bin()
        .args(["decode", "--code"])
        .arg(&code)
        .args(["--in"])
        .arg(&x)
        .args(["--channel", "bec 0.3", "--out"])
        .arg(&est)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&est).unwrap();
    assert!(text.contains("info 10110010"), "got: {}", text);
    assert!(text.contains("status ok"));
}

#[test]
fn erased_symbols_decode() {
    let dir = tmpdir("erase");
    let code = dir.join("code.txt");
    bin()
        .args([
            "construct", "--n", "3", "--wub", "8", "--scheme", "standard", "--channel",
            "bec 0.5", "--k", "0", "--out",
        ])
        .arg(&code)
        .status()
        .unwrap();
    let y = dir.join("y.txt");
    fs::write(&y, "eeeeeeee\n").unwrap();
    let est = dir.join("est.txt");
    let status = bin()
        .args(["decode", "--code"])
        .arg(&code)
        .args(["--in"])
        .arg(&y)
        .args(["--channel", "bec 0.5", "--out"])
        .arg(&est)
        .status()
        .unwrap();
    assert!(status.success());
    // all-frozen code decodes to the frozen zeros even from nothing
    let text = fs::read_to_string(&est).unwrap();
    assert!(text.contains("estimates 00000000"));
}

#[test]
fn simulate_is_reproducible() {
    let run = || {
        let out = bin()
            .args([
                "simulate",
                "--n",
                "4",
                "--lambda-list",
                "0.6,1.0",
                "--channel",
                "bec 0.5",
                "--k-grid",
                "4,8",
                "--trials",
                "300",
                "--seed",
                "9",
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        stdout(&out)
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "identical seeds must give identical CSV bytes");
    assert!(a.starts_with("scheme,n,lambda,w_ub,channel,K,"));
    assert_eq!(a.lines().count(), 5, "header plus four rows");
}

#[test]
fn verify_suite_passes() {
    let out = bin().arg("verify").output().unwrap();
    assert!(out.status.success(), "verify failed:\n{}", stdout(&out));
    assert!(stdout(&out).matches("PASS").count() >= 7);
}

#[test]
fn exit_codes() {
    // usage error: 1
    let out = bin().args(["gamma", "--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // I/O error: 3
    let out = bin()
        .args(["kernel", "--file", "/nonexistent/kernel.txt"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // help goes to stdout with success
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
}
