use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn srgg(args: &[&str], env: Option<(&str, &Path)>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_srgg"));
    cmd.args(args).env_remove("SRGG_OUTPUT_DIR");
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const FRECHET: &str =
    "experiment = \"frechet\"\nd = 1\nn = 300\nalpha = 4.0\nk = 3\nreplications = 20\nseed = 4\n";

#[test]
fn constants_prints_table_and_json() {
    let out = srgg(
        &[
            "constants",
            "--d",
            "1",
            "--alpha",
            "4",
            "--k",
            "3",
            "--n",
            "2000",
        ],
        None,
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("C_d "));
    assert!(text.contains("theta              7"));
    let json: serde_json::Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert_eq!(json["theta"], 7.0);
    assert!((json["w_prefactor"].as_f64().unwrap() - 0.700_238_115_694_387_3).abs() < 1e-12);
    assert!((json["frechet_scale"].as_f64().unwrap() - 0.355_248_323_274_531_1).abs() < 1e-12);
}

#[test]
fn constants_rejects_bad_model() {
    let out = srgg(
        &[
            "constants",
            "--d",
            "2",
            "--alpha",
            "1.5",
            "--k",
            "3",
            "--n",
            "10",
            "--json",
        ],
        None,
    );
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_params");
}

#[test]
fn simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        &format!("{FRECHET}output_dir = {:?}\n", out_dir.to_str().unwrap()),
    );
    let out = srgg(&["simulate", &cfg], None);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let ecdf = fs::read_to_string(out_dir.join("ecdf.csv")).unwrap();
    assert!(ecdf.starts_with("value,empirical_cdf,frechet_cdf\n"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["outcome"]["kind"], "frechet");
    assert_eq!(report["outcome"]["theta"], 7.0);
    assert!(out_dir.join("replications.csv").exists());
}

#[test]
fn output_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("{FRECHET}output_dir = \"/nonexistent/never\"\n"),
    );
    let target = dir.path().join("env");
    let out = srgg(&["simulate", &cfg], Some(("SRGG_OUTPUT_DIR", &target)));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(target.join("report.json").exists());
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FRECHET);
    let a = srgg(&["simulate", &cfg], None);
    let b = srgg(&["simulate", &cfg], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_rejections_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        format!("{FRECHET}colour = 3\n"),
        FRECHET.replace("replications = 20", "replications = 0"),
        "d = 1\n".into(),
    ] {
        let cfg = write_config(dir.path(), &bad);
        let out = srgg(&["simulate", &cfg], None);
        assert!(!out.status.success());
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], "config", "{bad}");
        assert!(err["message"].is_string());
    }
    let out = srgg(&["simulate", "/nonexistent.toml"], None);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn dump_graph_formats() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, cliques) = (dir.path().join("g.txt"), dir.path().join("c.csv"));
    let out = srgg(
        &[
            "dump-graph",
            "--d",
            "1",
            "--alpha",
            "4",
            "--k",
            "3",
            "--n",
            "100",
            "--seed",
            "5",
            "--out",
            edges.to_str().unwrap(),
            "--cliques",
            cliques.to_str().unwrap(),
            "--r",
            "1.5",
        ],
        None,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&edges).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "1 100 4 5");
    let first: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(first.len(), 3);
    let csv = fs::read_to_string(&cliques).unwrap();
    assert!(csv.starts_with("v1,v2,v3,max_len,long_edge_count\n"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            srgg_core::experiment::ExperimentConfig::from_path(&path).unwrap();
            seen += 1;
        }
    }
    assert_eq!(seen, 5);
}
