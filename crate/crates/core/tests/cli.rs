mod common;

use std::process::{Command, Output};

fn storygame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_storygame"))
        .args(args)
        .current_dir(common::fixtures_dir().join(".."))
        .env_remove(storygame::extraction::API_KEY_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_is_deterministic_and_quiet() {
    let a = storygame(&["solve", "fixtures/game2.efg", "--format", "json"]);
    let b = storygame(&["solve", "fixtures/game2.efg", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["verification"]["verified"], true);
    let text = stdout(&storygame(&["solve", "fixtures/game1.efg"]));
    assert!(text.contains("fake-death 1"), "{text}");
    assert!(text.contains("verified: true"), "{text}");
}

#[test]
fn solve_trace_csv_has_one_row_per_rung() {
    let o = storygame(&["solve", "fixtures/game1.json", "--out", "csv", "--full-ladder"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 61);
}

#[test]
fn convert_round_trips_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("g.json");
    let efg = dir.path().join("g.efg");
    let o = storygame(&["convert", "fixtures/game2.efg", "--to", "json", "-o", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = storygame(&["convert", json.to_str().unwrap(), "--to", "efg", "-o", efg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let a = std::fs::read_to_string(efg).unwrap();
    let b = common::fixture("game2.efg");
    // the EFG comment line is carried through JSON unchanged
    assert_eq!(a, b);
}

#[test]
fn rationalize_and_shape() {
    let o = storygame(&["rationalize", "fixtures/game2.efg", "--story", "fixtures/actual_path.json"]);
    assert!(stdout(&o).starts_with("rationalized: true, path probability 0.0525"));
    let o = storygame(&["rationalize", "fixtures/game1.efg", "--story", "fixtures/actual_path_game1.json"]);
    assert!(stdout(&o).starts_with("rationalized: false, path probability 0"));
    let o = storygame(&["shape", "fixtures/game2.efg", "--story", "fixtures/actual_path.json", "--format", "svg"]);
    assert!(stdout(&o).starts_with("<svg"));
    let o = storygame(&["shape", "fixtures/game2.efg", "--story", "fixtures/actual_path.json"]);
    let csv = stdout(&o);
    assert!(csv.lines().any(|l| l.starts_with("3,message-fails,") && l.contains(",57,57,")), "{csv}");
}

#[test]
fn analyze_reports_equilibria_and_monte_carlo() {
    let o = storygame(&["analyze", "fixtures/game2.efg", "--rollouts", "1000", "--seed", "3"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0));
    assert!(text.contains("pure Nash equilibria: 2"), "{text}");
    assert!(text.contains("monte carlo (1000 rollouts, seed 3)"), "{text}");
    assert_eq!(storygame(&["analyze", "fixtures/game2.efg", "--rollouts", "1000", "--seed", "3"]).stdout, o.stdout);
}

#[test]
fn extract_offline_reproduces_game2() {
    let o = storygame(&[
        "extract",
        "--story",
        "fixtures/story.txt",
        "--protocol",
        "fixtures/protocol.json",
        "--client",
        "fixture",
        "--fixtures-dir",
        "fixtures/transcripts",
        "--hints",
        "fixtures/game2_hints.json",
        "--format",
        "efg",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let g = storygame::format::parse_game(&stdout(&o), storygame::format::GameFormat::Efg).unwrap();
    assert_eq!(g.structural_diff(&storygame::narrative::romeo_juliet_game2(), true), None);
}

#[test]
fn exit_codes() {
    assert_eq!(storygame(&[]).status.code(), Some(2));
    assert_eq!(storygame(&["solve", "fixtures/game2.efg", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(storygame(&["extract", "--story", "fixtures/story.txt", "--client", "http"]).status.code(), Some(2));
    let o = storygame(&["solve", "fixtures/missing.efg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[io]"));
    let o = storygame(&["extract", "--story", "fixtures/story.txt", "--fixtures-dir", "fixtures/transcripts"]);
    assert_eq!(o.status.code(), Some(1), "default protocol asks prompts that were not recorded");
    assert_eq!(storygame(&["--version"]).status.code(), Some(0));
}
