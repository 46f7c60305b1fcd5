use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use muskat_cli::output::{InterfaceRow, RtOutput, RunMetadata, SpectrumRow, SymbolRow};
use tempfile::TempDir;

const FLAT: &str = r#"{
  "schema": 1,
  "n_x": 16,
  "n_y": 8,
  "initial": {"f": {"constant": 0.0}, "h": {"constant": 1.0}},
  "t_end": 0.5
}"#;

fn muskat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muskat")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    csv::Reader::from_path(path)
        .unwrap()
        .deserialize()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn flat_equilibrium_simulation() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "flat.json", FLAT);
    let out = tmp.path().join("run");
    let o = muskat(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: RunMetadata = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(meta.termination, "t_end");
    assert!((meta.samples.last().unwrap().t - 0.5).abs() < 1e-12);
    for s in &meta.samples {
        let rows: Vec<InterfaceRow> = read_csv(&out.join(s.snapshot.as_ref().unwrap()));
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().all(|r| r.f.abs() < 1e-10 && (r.h - 1.0).abs() < 1e-10));
    }
}

#[test]
fn identical_configs_give_identical_files() {
    let tmp = TempDir::new().unwrap();
    let text = FLAT
        .replace("{\"constant\": 0.0}", "{\"modes\": [[1, 0.0, 0.05]]}")
        .replace("\"t_end\": 0.5", "\"t_end\": 0.2");
    let cfg = write_config(tmp.path(), "wave.json", &text);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        assert!(muskat(&["simulate", "--config", &cfg, "--out", dir.to_str().unwrap()])
            .status
            .success());
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 2);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap());
    }
}

#[test]
fn rt_violation_is_recorded_at_start() {
    let tmp = TempDir::new().unwrap();
    let text = FLAT.replace(
        "\"t_end\": 0.5",
        "\"t_end\": 0.5, \"stop_on_rt\": true, \"params\": {\"k\": 1, \"mu_minus\": 1, \"mu_plus\": 1, \"rho_minus\": 1, \"rho_plus\": 2, \"g\": 1, \"d\": -1}",
    );
    let cfg = write_config(tmp.path(), "rt.json", &text);
    let out = tmp.path().join("run");
    assert!(muskat(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status
        .success());
    let meta: RunMetadata = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(meta.termination, "rt_violated");
    assert_eq!(meta.samples.last().unwrap().t, 0.0);
}

#[test]
fn bad_configs_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    let broken = write_config(tmp.path(), "broken.json", "{\"schema\": 1, ");
    let o = muskat(&["simulate", "--config", &broken]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed"));
    let typo = write_config(tmp.path(), "typo.json", &FLAT.replace("\"t_end\"", "\"t_ned\""));
    assert_eq!(muskat(&["rtcheck", "--config", &typo]).status.code(), Some(1));
    assert_eq!(muskat(&["rtcheck"]).status.code(), Some(1));
    let crossed = write_config(
        tmp.path(),
        "crossed.json",
        &FLAT.replace("\"constant\": 1.0", "\"constant\": -2.0"),
    );
    assert_eq!(muskat(&["rtcheck", "--config", &crossed]).status.code(), Some(1));
}

#[test]
fn rtcheck_flat_example() {
    let tmp = TempDir::new().unwrap();
    let text = FLAT.replace("\"t_end\": 0.5", "\"b\": {\"constant\": 0.0}");
    let cfg = write_config(tmp.path(), "rt.json", &text);
    let o = muskat(&["rtcheck", "--config", &cfg]);
    assert!(o.status.success());
    let rep: RtOutput = serde_json::from_slice(&o.stdout).unwrap();
    assert!((rep.margin_f - 1.0).abs() < 1e-9 && (rep.margin_h - 0.5).abs() < 1e-9 && rep.satisfied);
}

#[test]
fn symbol_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "flat.json", FLAT);
    let out = tmp.path().join("sym");
    let o = muskat(&[
        "symbols",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--m-max",
        "8",
        "--oracle",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["symbols_lambda.csv", "symbols_phi.csv"] {
        let rows: Vec<SymbolRow> = read_csv(&out.join(name));
        assert_eq!(rows.len(), 8);
        for r in rows {
            assert!((r.re_formula - r.re_oracle.unwrap()).abs() < 1e-9);
            assert_eq!(r.im_formula, 0.0);
        }
    }
    assert_eq!(
        muskat(&["symbols", "--config", &cfg, "--m-max", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn spectrum_of_flat_state() {
    let tmp = TempDir::new().unwrap();
    let text = FLAT
        .replace("\"n_x\": 16", "\"n_x\": 64")
        .replace("\"n_y\": 8", "\"n_y\": 32");
    let cfg = write_config(tmp.path(), "flat.json", &text);
    let out = tmp.path().join("spectrum");
    let o = muskat(&[
        "spectrum",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--modes",
        "3..4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(muskat(&[
        "symbols",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--m-max",
        "4"
    ])
    .status
    .success());
    let rows: Vec<SpectrumRow> = read_csv(&out.join("spectrum.csv"));
    let lam: Vec<SymbolRow> = read_csv(&out.join("symbols_lambda.csv"));
    let phi: Vec<SymbolRow> = read_csv(&out.join("symbols_phi.csv"));
    for r in rows {
        assert_eq!((r.eig1_im, r.eig2_im), (0.0, 0.0));
        let (l, p) = (lam[r.m - 1].re_formula, phi[r.m - 1].re_formula);
        assert!(((r.j11 - l) / l).abs() < 0.02, "{r:?} {l}");
        assert!(((r.j22 - p) / p).abs() < 0.02, "{r:?} {p}");
    }
    let wavy = write_config(
        tmp.path(),
        "wavy.json",
        &FLAT.replace("{\"constant\": 0.0}", "{\"modes\": [[1, 0.1, 0.0]]}"),
    );
    assert_eq!(muskat(&["spectrum", "--config", &wavy]).status.code(), Some(1));
}

#[test]
fn quick_verify_passes() {
    let start = Instant::now();
    let o = muskat(&["verify", "--quick"]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{table}");
    assert!(!table.contains("FAIL"));
    assert!(start.elapsed().as_secs_f64() < 60.0);
}
