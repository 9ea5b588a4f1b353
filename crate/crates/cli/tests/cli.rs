//! End-to-end CLI behavior: exit codes, file outputs, config precedence.

use std::fs;
use std::path::Path;
use std::process::Command;

fn chatgraph(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_chatgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_fixture_log(path: &Path) {
    let log = "\
{\"id\":\"m0\",\"channel\":\"lobby\",\"seq\":0,\"author\":\"u1\",\"text\":\"hi\",\"abusive\":false}\n\
{\"id\":\"m1\",\"channel\":\"lobby\",\"seq\":1,\"author\":\"u2\",\"text\":\"hello\",\"abusive\":false}\n\
{\"id\":\"m2\",\"channel\":\"lobby\",\"seq\":2,\"author\":\"u1\",\"text\":\"how are you Alice\",\"abusive\":true}\n\
{\"id\":\"m3\",\"channel\":\"lobby\",\"seq\":3,\"author\":\"alice\",\"text\":\"what\",\"abusive\":false}\n";
    fs::write(path, log).unwrap();
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = chatgraph(&["pipeline", "--does-not-exist"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn pipeline_without_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = chatgraph(&["pipeline", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("--log") && stderr.contains("--synth"),
        "{stderr}"
    );
}

#[test]
fn pipeline_synth_conflicts_with_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("corpus.jsonl");
    write_fixture_log(&log);
    let out = chatgraph(&[
        "pipeline",
        "--synth",
        "--log",
        log.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_log_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = chatgraph(&[
        "extract",
        "--log",
        "/nonexistent/corpus.jsonl",
        "--channel",
        "lobby",
        "--target-seq",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_log_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("bad.jsonl");
    fs::write(&log, "not json at all\n").unwrap();
    let out = chatgraph(&[
        "extract",
        "--log",
        log.to_str().unwrap(),
        "--channel",
        "lobby",
        "--target-seq",
        "0",
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn extract_writes_three_graphs_and_run_config() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("corpus.jsonl");
    write_fixture_log(&log);
    let out_dir = dir.path().join("graphs");
    let out = chatgraph(&[
        "extract",
        "--log",
        log.to_str().unwrap(),
        "--channel",
        "lobby",
        "--target-seq",
        "2",
        "--context",
        "2",
        "--window",
        "10",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["before.csv", "after.csv", "full.csv", "run_config"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    let before = fs::read_to_string(out_dir.join("before.csv")).unwrap();
    assert!(before.contains("#vertex,u1,1"), "{before}");
    // exact rational weight, 17 significant digits
    assert!(before.contains("1.3333333333333333e0"), "{before}");
}

#[test]
fn measures_emits_one_row_per_measure() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("corpus.jsonl");
    write_fixture_log(&log);
    let out_dir = dir.path().join("graphs");
    chatgraph(&[
        "extract",
        "--log",
        log.to_str().unwrap(),
        "--channel",
        "lobby",
        "--target-seq",
        "2",
        "--context",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    let measures_csv = dir.path().join("measures.csv");
    let out = chatgraph(&[
        "measures",
        "--graph",
        out_dir.join("full.csv").to_str().unwrap(),
        "--out",
        measures_csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&measures_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 26); // header + 25 measures
    assert!(lines[0].starts_with("measure,value"));
    assert!(text.contains("degree_centrality,"));
    assert!(text.contains("avg_coreness,"));
}

#[test]
fn featurize_train_evaluate_chain_works() {
    let dir = tempfile::tempdir().unwrap();
    // a synthetic corpus big enough to train on
    let synth_dir = dir.path().join("synth");
    let out = chatgraph(&[
        "synth",
        "--users",
        "12",
        "--messages",
        "2000",
        "--abuse-rate",
        "0.01",
        "--pile-on",
        "2.0",
        "--seed",
        "3",
        "--out",
        synth_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let features = dir.path().join("features.csv");
    let out = chatgraph(&[
        "featurize",
        "--log",
        synth_dir.join("corpus.jsonl").to_str().unwrap(),
        "--targets",
        synth_dir.join("targets.csv").to_str().unwrap(),
        "--out",
        features.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let model = dir.path().join("model.json");
    let out = chatgraph(&[
        "train",
        "--features",
        features.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(fs::read_to_string(&model)
        .unwrap()
        .contains("support_vectors"));

    let eval_dir = dir.path().join("eval");
    let out = chatgraph(&[
        "evaluate",
        "--features",
        features.to_str().unwrap(),
        "--runs",
        "3",
        "--svg",
        "--out",
        eval_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["metrics.csv", "pr_curve.csv", "pr_curve.svg", "run_config"] {
        assert!(eval_dir.join(name).exists(), "{name} missing");
    }
    let metrics = fs::read_to_string(eval_dir.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("# protocol:"), "{metrics}");
    assert!(metrics.contains("mean,model,"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "users = 9\nmessages = 1200\nseed = 21\npile_on = 1.5\n",
    )
    .unwrap();

    // config file value used when the flag is absent
    let out_a = dir.path().join("a");
    let out = chatgraph(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run_config = fs::read_to_string(out_a.join("run_config")).unwrap();
    assert!(run_config.contains("users = 9"), "{run_config}");
    assert!(run_config.contains("seed = 21"), "{run_config}");

    // flag wins over the file
    let out_b = dir.path().join("b");
    let out = chatgraph(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--users",
        "14",
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let run_config = fs::read_to_string(out_b.join("run_config")).unwrap();
    assert!(run_config.contains("users = 14"), "{run_config}");
}

#[test]
fn infeasible_synth_config_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = chatgraph(&[
        "synth",
        "--users",
        "5",
        "--messages",
        "100",
        "--abuse-rate",
        "0.9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
