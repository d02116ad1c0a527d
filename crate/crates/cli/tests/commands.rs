use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qdwitness::state_file::{preset, StateFile};
use qdwitness::sweep::SweepRow;
use qdwitness::StatePreset;
use qdwitness_core::info::StructureVerdict;
use qdwitness_core::protocol::{CostEstimate, WitnessReport};
use tempfile::TempDir;

fn qdwitness(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdwitness"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn crate_file(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel).display().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path: PathBuf = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn witness_config(p: f64, shots: u64, seed: Option<u64>) -> String {
    let seed = seed.map(|s| format!(r#", "seed": {s}"#)).unwrap_or_default();
    format!(
        r#"{{"framework": "sqd", "fragment": ["E1"], "noise": {{"p": {p}, "mode": "mix_global"}}, "shots": {shots}{seed}}}"#
    )
}

fn report(args: &[&str]) -> WitnessReport {
    serde_json::from_str(&stdout(&qdwitness(args))).unwrap()
}

#[test]
fn witness_measure_follows_noise() {
    let out = report(&["witness", "--config", &crate_file("configs/sqd_e1.json")]);
    assert!(out.measure.abs() < 1e-10);
    assert!(out.witness_max_subset.abs() < 1e-10);

    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "p04.json", &witness_config(0.4, 0, None));
    let out = report(&["witness", "--config", &cfg]);
    assert!((out.measure - 0.2).abs() < 1e-9);
}

#[test]
fn witness_json_round_trips() {
    let dir = TempDir::new().unwrap();
    for (name, shots) in [("exact.json", 0), ("mc.json", 600)] {
        let cfg = write(&dir, name, &witness_config(0.3, shots, Some(3)));
        let text = stdout(&qdwitness(&["witness", "--config", &cfg]));
        let parsed: WitnessReport = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(again, text);
        assert_eq!(serde_json::from_str::<WitnessReport>(&again).unwrap(), parsed);
    }
}

#[test]
fn monte_carlo_output_is_byte_identical_per_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "mc.json", &witness_config(0.0, 6000, Some(7)));
    let a = qdwitness(&["witness", "--config", &cfg]);
    let b = qdwitness(&["witness", "--config", &cfg]);
    assert_eq!(stdout(&a), stdout(&b));

    let out_path = dir.path().join("copy.json");
    let c = qdwitness(&["witness", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(std::fs::read(&out_path).unwrap(), c.stdout);
    assert_eq!(stdout(&a), stdout(&c));

    let d = qdwitness(&["witness", "--config", &cfg, "--seed", "8"]);
    assert_ne!(stdout(&a), stdout(&d));

    // no seed anywhere: a fixed default, not the clock
    let unseeded = write(&dir, "unseeded.json", &witness_config(0.0, 600, None));
    let e = qdwitness(&["witness", "--config", &unseeded]);
    let f = qdwitness(&["witness", "--config", &unseeded]);
    assert_eq!(stdout(&e), stdout(&f));
}

fn read_rows(text: &str) -> Vec<SweepRow> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

#[test]
fn sqd_sweep_has_closed_form_measure() {
    let text = stdout(&qdwitness(&["sweep", "--config", &crate_file("configs/sweep_sqd.json")]));
    assert!(text.lines().take_while(|l| l.starts_with('#')).any(|l| l.contains("witness_single_min")));
    let rows = read_rows(&text);
    assert_eq!(rows.len(), 22);
    for row in rows.iter().filter(|r| r.fragment == "E1") {
        assert!((row.measure - row.p / 2.0).abs() < 1e-9, "{row:?}");
        assert!(row.witness_max_subset <= row.measure + 1e-9);
        assert!(row.stderr.is_none());
        assert_eq!(row.successful_runs, 0);
    }
    let full: Vec<_> = rows.iter().filter(|r| r.fragment == "E1+E2").collect();
    assert_eq!(full.len(), 11);
    assert!((full[0].measure - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_csv_is_lossless() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("rows.csv");
    let json_path = dir.path().join("rows.json");
    let cfg = crate_file("configs/sweep_isbs.json");
    stdout(&qdwitness(&["sweep", "--config", &cfg, "--out", csv_path.to_str().unwrap()]));
    stdout(&qdwitness(&["sweep", "--config", &cfg, "--format", "json", "--out", json_path.to_str().unwrap()]));
    let from_csv = read_rows(&std::fs::read_to_string(csv_path).unwrap());
    let from_json: Vec<SweepRow> = serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(from_csv.len(), 44);
    assert_eq!(from_csv, from_json);

    let full: Vec<f64> = from_csv
        .iter()
        .filter(|r| r.fragment == "E1+E2+E3+E4")
        .map(|r| r.measure)
        .collect();
    assert!((full[0] - 1.0).abs() < 1e-9);
    assert!(full.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn monte_carlo_sweep_reports_errors_and_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "mc.json",
        r#"{"framework": "sqd", "noise_mode": "depolarize_local", "p_values": [0.0, 0.5],
            "fragments": [["E1"]], "shots": 2000, "seed": 5, "f": 0.733, "p_cnot": 0.5}"#,
    );
    let a = stdout(&qdwitness(&["sweep", "--config", &cfg]));
    assert_eq!(a, stdout(&qdwitness(&["sweep", "--config", &cfg])));
    for row in read_rows(&a) {
        assert_eq!(row.successful_runs, 2000);
        assert!(row.stderr.unwrap() > 0.0);
    }
}

#[test]
fn bad_sweeps_are_rejected_at_parse() {
    let dir = TempDir::new().unwrap();
    for (name, p_values, needle) in [
        ("empty.json", "[]", "p_values must not be empty"),
        ("unsorted.json", "[0.5, 0.1]", "sorted"),
        ("range.json", "[0.0, 1.5]", "outside"),
    ] {
        let cfg = write(
            &dir,
            name,
            &format!(r#"{{"framework": "sqd", "noise_mode": "mix_global", "p_values": {p_values}, "fragments": [["E1"]]}}"#),
        );
        let out = qdwitness(&["sweep", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle));
    }
}

#[test]
fn exit_codes_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"framework": "sqd", "fragment": ["E1"], "shots": "many"}"#, 2, "field `shots`"),
        (r#"{"framework": "sqd", "fragment": ["E1"], "noise": {"p": 0, "mode": "loud"}}"#, 2, "field `noise.mode`"),
        (r#"{"framework": "sqd", "fragment": ["E1"], "extra": 1}"#, 2, "unknown field `extra`"),
        (r#"{"framework": "sqd", "noise": {"p": 0, "mode": "mix_global"}}"#, 2, "missing field `fragment`"),
        (r#"{"framework": "sqd", "fragment": ["E1"], "noise": {"p": 1.5, "mode": "mix_global"}}"#, 2, "`p`"),
        (r#"{"framework": "sqd", "fragment": ["E9"]}"#, 2, "E9"),
        (
            r#"{"framework": "sqd", "fragment": ["E1"], "noise": {"p": 0, "mode": "mix_global", "p_cnot": 0.001}, "shots": 10}"#,
            4,
            "stalled",
        ),
    ];
    for (i, (text, code, needle)) in cases.iter().enumerate() {
        let cfg = write(&dir, &format!("c{i}.json"), text);
        let out = qdwitness(&["witness", "--config", &cfg]);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(*code), "{text}: {err}");
        assert!(err.contains(needle), "{text}: {err}");
    }

    let missing = qdwitness(&["witness"]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_state = write(
        &dir,
        "nonhermitian.json",
        r#"{"layout": [{"label": "S", "dim": 2}, {"label": "E", "dim": 2}],
            "matrix": [[[0.5,0],[0,0],[0,0],[0.3,0]], [[0,0],[0,0],[0,0],[0,0]],
                       [[0,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[0.5,0]]]}"#,
    );
    let out = qdwitness(&["check", &bad_state, "computational"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not Hermitian"));

    let unwritable = qdwitness(&["sweep", "--config", &crate_file("configs/sweep_sqd.json"), "--out", "/nonexistent/dir/rows.csv"]);
    assert!(!unwritable.status.success());
}

fn verdict(file: &str, spec: &str, fragment: Option<&str>) -> StructureVerdict {
    let path = crate_file(file);
    let mut args = vec!["check", path.as_str(), spec];
    if let Some(f) = fragment {
        args.extend(["--fragment", f]);
    }
    let text = stdout(&qdwitness(&args));
    let v: StructureVerdict = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    v
}

#[test]
fn check_reports_structure_of_shipped_states() {
    let v = verdict("data/sqd_initial_state.json", "parity", Some("E1"));
    assert!(v.qd && v.sqd && v.objective_in_spec);

    let v = verdict("data/sqd_initial_state.json", "parity", None);
    assert!(v.qd && !v.sqd);

    let v = verdict("data/ghz5.json", "computational", None);
    assert!(v.qd && !v.sqd);
    assert!((v.joint.mutual_information - 2.0 * v.system_entropy).abs() < 1e-6);

    let v = verdict("data/maximally_mixed5.json", "computational", None);
    assert!(!v.qd && !v.sqd);
}

#[test]
fn shipped_states_match_their_presets() {
    for (file, which) in [
        ("data/sqd_initial_state.json", StatePreset::SqdInitial),
        ("data/ghz5.json", StatePreset::Ghz5),
        ("data/maximally_mixed5.json", StatePreset::MaximallyMixed5),
    ] {
        let shipped: StateFile = serde_json::from_str(&std::fs::read_to_string(crate_file(file)).unwrap()).unwrap();
        assert_eq!(shipped, preset(which).unwrap(), "{file}");
        shipped.density().unwrap();
    }
}

fn cost(args: &[&str]) -> CostEstimate {
    let mut all = vec!["cost", "--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&qdwitness(&all))).unwrap()
}

#[test]
fn cost_examples() {
    let e = cost(&["--m", "1", "--c", "1000", "--p-cnot", "0.5"]);
    assert_eq!((e.tomography_runs, e.witness_runs), (27000.0, 5000.0));

    let e = cost(&["--m", "10", "--c", "1", "--p-cnot", "0.34"]);
    assert!(e.witness_wins);

    let e = cost(&["--m", "1", "--c", "1", "--p-cnot", "0.5", "--f-cnot", "0.79"]);
    assert!((e.crossover_p - 0.42).abs() < 0.005);

    let table = stdout(&qdwitness(&["cost", "--m", "1", "--c", "1000", "--p-cnot", "0.5"]));
    assert!(table.lines().any(|l| l.starts_with("tomography runs") && l.ends_with("27000")));
    assert!(table.lines().any(|l| l.starts_with("witness runs") && l.ends_with("5000")));

    let bad = qdwitness(&["cost", "--m", "0", "--c", "1", "--p-cnot", "0.5"]);
    assert_eq!(bad.status.code(), Some(2));
}
