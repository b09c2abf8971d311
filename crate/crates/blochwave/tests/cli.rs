use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blochwave"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out-dir").arg(out).output().expect("spawn blochwave")
}

fn stdout_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stdout);
    serde_json::from_str(text.lines().last().expect("summary line")).expect("json summary")
}

#[test]
fn regimes_sio2_at_750_nm() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["regimes", "--material", "SiO2", "--lambda0-nm", "750", "--F0", "1.0"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert!((v["gamma_DL"].as_f64().unwrap() - 2.96).abs() < 5e-3);
    assert!((v["gamma_DL"].as_f64().unwrap() - 4.9 / 1.6531).abs() < 1e-3);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("regimes.json")).unwrap()).unwrap();
    assert_eq!(file["gamma_DL"], v["gamma_DL"]);
}

#[test]
fn materials_gaas_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["materials", "--name", "GaAs"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["name"], "GaAs");
    assert_eq!(v["eg"].as_f64(), Some(1.43));
    assert_eq!(v["a"].as_f64(), Some(5.65));
    assert_eq!(v["xi_max"].as_f64(), Some(3.42));
}

#[test]
fn unknown_material_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["materials", "--name", "Unobtainium"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("GaAs"));
}

#[test]
fn negative_fwhm_exits_2_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"pulse": {"f0": 1.0, "hbar_omega0": 1.8, "envelope": "sine_square", "fwhm": -5.0}}"#).unwrap();
    let o = bin().args(["tdse", "--config"]).arg(&cfg).arg("--out-dir").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = run(&["tdse", "--F0", "1", "--fwhm", "-5"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_subcommand_and_keys_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["teleport"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"pulse": {"f0": 1.0, "wavelength": 800}}"#).unwrap();
    let o = bin().args(["tdse", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["berry", "--set", "colour=red"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_subcommand_must_match() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"subcommand": "rabi"}"#).unwrap();
    let o = bin().args(["berry", "--config"]).arg(&cfg).arg("--out-dir").arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gap_closure_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = run(&["berry", "--set", "model=\"ssh\"", "--set", "t1=1", "--set", "t2=1", "--set", "grid=64"], &out);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn outputs_are_bit_identical_and_stamped() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["tdse", "--F0", "0.8", "--fwhm", "4", "--set", "k_points=8", "--set", "snapshots=3"];
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&args, &a).status.code(), Some(0));
    let o = bin().args(args).arg("--out-dir").arg(&b).env("BLOCHWAVE_THREADS", "1").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    for n in &names {
        let (x, y) = (std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap());
        assert_eq!(x, y, "{n:?}");
        let text = String::from_utf8(x).unwrap();
        assert!(text.starts_with("# producer: blochwave tdse\n# config_sha256: "));
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"material": "SiO2", "pulse": {"f0": 0.5, "hbar_omega0": 1.8}}"#).unwrap();
    let o = bin().args(["regimes", "--config"]).arg(&cfg).args(["--F0", "1.0", "--out-dir"]).arg(dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["F0"].as_f64(), Some(1.0));
    assert!((v["gamma_DL"].as_f64().unwrap() - 4.9 / 1.8).abs() < 1e-12);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let cfg: blochwave::cli::config::RunConfig = serde_json::from_value(v).unwrap();
        assert!(cfg.subcommand.is_some());
        n += 1;
    }
    assert!(n >= 6);
}

#[test]
fn fast_subcommands_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["ladders", "--set", "mode=\"localization\""],
        &["ladders", "--set", "mode=\"kane\""],
        &["ladders", "--sweep-points", "11"],
        &["fke", "--F0", "0.01"],
        &["rabi", "--F0", "0.05", "--set", "samples=101"],
        &["area", "--F0", "0.5"],
        &["berry", "--set", "grid=40"],
        &["hhg", "--lambda0-nm", "750", "--F0", "0.5"],
        &["intraband", "--lambda0-nm", "750", "--F0", "0.05"],
        &["dephasing", "--F0", "1", "--set", "t2=2", "--set", "k_points=4"],
        &["energy", "--F0", "0.5", "--fwhm", "3", "--set", "k_points=4", "--set", "samples_per_cycle=64"],
        &["charge", "--F0", "0.5", "--fwhm", "3", "--set", "k_points=4", "--sweep-points", "5"],
        &["keldysh-scan", "--cycles", "10", "--sweep-points", "3", "--set", "k_points=8"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let out = dir.path().join(format!("c{i}"));
        let o = run(args, &out);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1, "{args:?}");
        assert!(std::fs::read_dir(&out).unwrap().count() > 0);
    }
}
