use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_darkstate"))
}

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_error(o: &Output) -> Value {
    serde_json::from_slice::<Value>(&o.stderr).unwrap()["error"].clone()
}

/// Walks two JSON trees; numbers must agree to `tol` relative.
fn assert_close(a: &Value, b: &Value, tol: f64, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            let scale = x.abs().max(y.abs()).max(1e-300);
            assert!((x - y).abs() <= tol * scale, "{path}: {x} vs {y}");
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(x.keys().collect::<Vec<_>>(), y.keys().collect::<Vec<_>>(), "{path}");
            for (k, v) in x {
                assert_close(v, &y[k], tol, &format!("{path}.{k}"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            assert_eq!(x.len(), y.len(), "{path}");
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                assert_close(u, v, tol, &format!("{path}[{i}]"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}

#[test]
fn validate_on_defaults_passes_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--task", "validate"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.matches("PASS").count(), 5, "{stdout}");
    let doc = read_json(&dir.path().join("validate.json"));
    assert_eq!(doc["result"]["all_pass"], true);
    assert_eq!(doc["darkstate_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["point"]["phonon_temperature"], 300.0);
}

#[test]
fn rates_match_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["--config", sample("homodimer_rates.toml").to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let got = read_json(&dir.path().join("rates.json"));
    let golden = read_json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/homodimer_rates.json"));
    assert_close(&got["result"], &golden["result"], 1e-9, "result");
    assert_close(&got["config"], &golden["config"], 0.0, "config");

    // Spot checks that do not rely on the golden file.
    let r = &got["result"];
    let sep = r["separation_nm"].as_f64().unwrap();
    assert!((sep - 0.61).abs() / 0.61 < 0.02, "separation {sep}");
    let eigen = &r["rates"]["eigen"];
    assert!((eigen["cprime"].as_f64().unwrap() - 0.0735).abs() < 1e-12);
    let delta_plus = eigen["delta_plus"].as_f64().unwrap();
    let kt = 8.617333e-5 * 6000.0;
    let n_plus = 1.0 / ((delta_plus / kt).exp() - 1.0);
    assert!((r["rates"]["n_plus"].as_f64().unwrap() / n_plus - 1.0).abs() < 1e-12);
}

#[test]
fn json_mirror_reproduces_toml_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(
        &["--config", sample("homodimer_rates.toml").to_str().unwrap()],
        a.path()
    )
    .status
    .success());
    assert!(run(
        &["--config", sample("homodimer_rates.json").to_str().unwrap()],
        b.path()
    )
    .status
    .success());
    assert_eq!(
        std::fs::read(a.path().join("rates.json")).unwrap(),
        std::fs::read(b.path().join("rates.json")).unwrap()
    );
}

#[test]
fn spectrum_task_writes_four_identical_grids_deterministically() {
    let cfg = tempfile::NamedTempFile::with_suffix(".toml").unwrap();
    std::fs::write(
        cfg.path(),
        "task = \"spectrum\"\n[dimer]\nz = 0.735\n[orientation]\ntheta12 = \"0.2 pi\"\n",
    )
    .unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for out in [a.path(), b.path()] {
        let o = run(
            &["--config", cfg.path().to_str().unwrap(), "--tolerance-profile", "fast"],
            out,
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for process in ["absorption", "emission"] {
        for variant in ["with-sideband", "without-sideband"] {
            let name = format!("spectrum_{process}_{variant}.csv");
            let text = std::fs::read_to_string(a.path().join(&name)).unwrap();
            assert_eq!(text, std::fs::read_to_string(b.path().join(&name)).unwrap(), "{name}");
            let lines: Vec<&str> = text.lines().collect();
            assert!(lines[0].starts_with("# darkstate "));
            assert!(lines[1].starts_with("# config {"));
            assert_eq!(lines[2], "omega_eV,intensity,variant,mu");
            assert_eq!(lines.len(), 3 + 1000);
            let mu = if process == "absorption" { "A" } else { "E" };
            assert!(lines[3].ends_with(&format!(",{variant},{mu}")));
        }
    }
    let summary = read_json(&a.path().join("spectrum_summary.json"));
    let p_d = summary["result"]["diagnostics"]["p_d"].as_array().unwrap();
    assert!(p_d.iter().all(|x| x.as_f64().unwrap() > 1.0));
}

#[test]
fn sweep_rows_follow_the_grid() {
    let cfg = tempfile::NamedTempFile::with_suffix(".toml").unwrap();
    std::fs::write(
        cfg.path(),
        r#"
task = "sweep"
[sweep]
z = [0.01, 0.1, 0.5]
detuning = ["0 meV", "200 meV"]
"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["--config", cfg.path().to_str().unwrap(), "--threads", "2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    assert_eq!(&reader.headers().unwrap()[0], "z");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    let z: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(z, [0.01, 0.1, 0.5, 0.01, 0.1, 0.5]);
    assert!(rows.iter().all(|r| r[5].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn config_errors_exit_with_code_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("task = \"rates\"\n[dimer]\nzz = 0.5\n", "zz"),
        ("task = \"rates\"\n[dimer]\ndetuning = 0.2\n", "unit suffix"),
        (
            "task = \"rates\"\n[phonons]\nreorganization = \"100 K\"\n",
            "unknown energy unit",
        ),
        ("task = \"rates\"\n[dimer]\ndetuning = \"2.9 eV\"\n", "dimer.detuning"),
        ("[dimer]\nz = 0.5\n", "task"),
        ("task = \"sweep\"\n", "[sweep]"),
    ];
    for (text, needle) in cases {
        let cfg = tempfile::NamedTempFile::with_suffix(".toml").unwrap();
        std::fs::write(cfg.path(), text).unwrap();
        let o = run(&["--config", cfg.path().to_str().unwrap()], dir.path());
        assert_eq!(o.status.code(), Some(2), "{text}");
        let err = stderr_error(&o);
        assert_eq!(err["kind"], "validation");
        assert!(err["message"].as_str().unwrap().contains(needle), "{text}: {err}");
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn numerical_failure_exits_with_code_three() {
    // Far-detuned dimer with weak phonon coupling: the isolated generator
    // loses positivity and the steady-state solve refuses it.
    let cfg = tempfile::NamedTempFile::with_suffix(".toml").unwrap();
    std::fs::write(
        cfg.path(),
        "task = \"spectrum\"\n[dimer]\nz = 0.743\ndetuning = \"2065 meV\"\n[phonons]\nreorganization = \"0.1 meV\"\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--config", cfg.path().to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stderr_error(&o)["kind"], "numerical");
}
