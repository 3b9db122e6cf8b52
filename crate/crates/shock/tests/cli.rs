//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use conic_core::background::solve;
use conic_core::gas::GasModel;
use conic_shock::io::StationDump;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conic-shock"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_background() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--gamma", "1.4", "--b0", "0.1", "--q0", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let s0: f64 = stdout.lines().next().unwrap().trim_start_matches("s0 = ").parse().unwrap();
    let bg = solve(GasModel::new(1.0, 1.4).unwrap(), 50.0, 1.0, 0.1).unwrap();
    assert_eq!(s0, bg.s0);
    let v = json(&dir.path().join("background.json"));
    assert_eq!(v["s0"].as_f64(), Some(bg.s0));
    let csv = fs::read_to_string(dir.path().join("background.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("s,rho,u_r,u_z,c,mach_z"));
    assert_eq!(csv.lines().count(), bg.shock_index() + 2);
}

#[test]
fn detached_cone_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--b0", "2.0", "--gamma", "1.4", "--q0", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("no attached shock"));
}

#[test]
fn invalid_parameters_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--gamma", "3.5"][..],
        &["solve", "--q0", "0.5"],
        &["stability", "--mu", "-0.5"],
        &["asymptotics", "--quantity", "nope"],
    ] {
        assert_eq!(run(dir.path(), args).status.code(), Some(1), "{args:?}");
    }
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"gamma": 1.4, "bogus": 1}"#).unwrap();
    let out = run(dir.path(), &["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("bogus"));
}

#[test]
fn stability_passes_on_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["stability", "--mu", "-1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("stability.json"));
    assert_eq!(v["verdict"], serde_json::Value::Bool(true));
    let csv = fs::read_to_string(dir.path().join("multiplier.csv")).unwrap();
    assert!(csv.starts_with("s,k1,k2,k3,k4,discriminant,lambda_min\n"));
}

#[test]
fn hardy_exit_codes_follow_verdict() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["hardy"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["hardy", "--weight", "2"]).status.code(), Some(0));
    let v = json(&dir.path().join("hardy.json"));
    assert_eq!(v["outcome"]["ratios"].as_array().unwrap().len(), 202);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"b0": 0.15}"#).unwrap();
    let out = run(dir.path(), &["solve", "--b0", "0.2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&dir.path().join("background.json"));
    assert_eq!(v["problem"]["b0"].as_f64(), Some(0.15));
}

#[test]
fn march_is_deterministic_and_dumps_stations() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["march", "--z-end", "2", "--n-sigma", "32", "--n-theta", "8", "--seed", "3", "--dump-every", "20"];
    // Energies have not saturated by z = 2, so the verdict may fail; the run
    // itself must complete.
    let code = run(a.path(), &args).status.code();
    assert!(matches!(code, Some(0) | Some(2)), "{code:?}");
    assert_eq!(run(b.path(), &args).status.code(), code);
    let csv_a = fs::read(a.path().join("march.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.path().join("march.csv")).unwrap());
    let header = String::from_utf8(csv_a).unwrap();
    assert!(header.starts_with("z,sup_grad,sup_xi,E0,E1,shock_energy\n"));

    let first = a.path().join("stations/station_000000.bin");
    let d = StationDump::read(&mut fs::File::open(&first).unwrap()).unwrap();
    assert_eq!((d.n_theta, d.n_sigma), (8, 32));
    assert_eq!(d.z, 1.0);
    assert_eq!(d.phi.len(), 256);
    assert_eq!(d.xi.len(), 8);
    let len = fs::metadata(&first).unwrap().len();
    assert_eq!(len, 32 + 8 * (3 * 256 + 8));
    let mut buf = Vec::new();
    d.write(&mut buf).unwrap();
    assert_eq!(buf, fs::read(&first).unwrap());
}

#[test]
fn sweep_honours_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_conic-shock"))
            .args(["sweep", "--gammas", "1.4", "--b0s", "0.1,0.2", "--b0q0s", "25,100"])
            .arg("--out")
            .arg(dir.path())
            .env("CONIC_SHOCK_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(sweep("1").status.code(), Some(0));
    let one = fs::read(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep("2").status.code(), Some(0));
    assert_eq!(one, fs::read(dir.path().join("sweep.csv")).unwrap());
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 5);
    assert_eq!(sweep("many").status.code(), Some(1));
}
