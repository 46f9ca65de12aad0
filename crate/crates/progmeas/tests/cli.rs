use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_progmeas"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn progmeas")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn temp_file(name: &str, value: &Value) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn matrix(v: &Value) -> Vec<Vec<[f64; 2]>> {
    let cols = v["cols"].as_u64().unwrap() as usize;
    let data: Vec<[f64; 2]> = serde_json::from_value(v["data"].clone()).unwrap();
    data.chunks(cols).map(|r| r.to_vec()).collect()
}

fn assert_matrix(v: &Value, expected: &[[f64; 2]], tol: f64) {
    let m = matrix(v);
    let n = m.len();
    assert_eq!(n * n, expected.len());
    for (i, row) in m.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            let e = expected[i * n + j];
            assert!((z[0] - e[0]).abs() <= tol && (z[1] - e[1]).abs() <= tol, "entry ({i},{j}) {z:?} vs {e:?}");
        }
    }
}

fn program(alpha: [f64; 4]) -> Value {
    json!({ "alpha": alpha.map(|a| [a, 0.0]) })
}

fn sic_povm_file() -> String {
    let povm = run_json(&["qid-povm", "--sic"]);
    temp_file("sic_povm.json", &povm)
}

fn basis(dim: usize, amps: &[&[[f64; 2]]]) -> Value {
    json!({ "basis": amps.iter().map(|a| json!({ "dim": dim, "amp": a })).collect::<Vec<_>>() })
}

fn qubit_measurements() -> Value {
    let s = 1.0 / 2f64.sqrt();
    json!({
        "measurements": [
            basis(2, &[&[[1.0, 0.0], [0.0, 0.0]], &[[0.0, 0.0], [1.0, 0.0]]]),
            basis(2, &[&[[s, 0.0], [s, 0.0]], &[[s, 0.0], [-s, 0.0]]]),
        ]
    })
}

#[test]
fn qid_povm_manifest_and_labels() {
    let v = run_json(&["qid-povm", "--sic"]);
    assert_eq!(v["manifest"]["command"], "qid-povm");
    assert_eq!(v["manifest"]["tolerance"], 1e-10);
    assert_eq!(v["labels"], json!(["+0", "+1", "-1", "-0"]));
    assert_eq!(v["informationally_complete"], true);
    assert_eq!(v["elements"].as_array().unwrap().len(), 4);
}

#[test]
fn qid_povm_trivial_program_is_not_complete() {
    let path = temp_file("identity_program.json", &program([1.0, 0.0, 0.0, 0.0]));
    let v = run_json(&["qid-povm", "--program", &path]);
    assert_eq!(v["informationally_complete"], false);
    for e in v["elements"].as_array().unwrap() {
        assert_matrix(e, &[[0.25, 0.0], [0.0, 0.0], [0.0, 0.0], [0.25, 0.0]], 1e-12);
    }
}

#[test]
fn qid_povm_anchor_vector() {
    let s = 1.0 / 2f64.sqrt();
    let path = temp_file("x_program.json", &program([s, s, 0.0, 0.0]));
    let v = run_json(&["qid-povm", "--program", &path]);
    let r: Vec<f64> = serde_json::from_value(v["r_anchor"].clone()).unwrap();
    for (x, e) in r.iter().zip([1.0, 0.0, 0.0]) {
        assert!((x - e).abs() <= 1e-12, "{r:?}");
    }
}

#[test]
fn qid_povm_rejects_unnormalized_program() {
    let path = temp_file("bad_program.json", &program([1.0, 1.0, 0.0, 0.0]));
    let out = run(&["qid-povm", "--program", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_json_exits_two() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["qid-povm", "--program", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qid_program_output_feeds_qid_povm() {
    let program = run_json(&["qid-program", "--pauli", "3"]);
    assert!(program["partition"].is_array());
    let path = temp_file("pauli_z_program.json", &program);
    let v = run_json(&["qid-povm", "--program", &path]);
    let mut coarse = [[0.0; 2]; 4];
    let partition: Vec<Vec<usize>> = serde_json::from_value(program["partition"].clone()).unwrap();
    let elements = v["elements"].as_array().unwrap();
    for &k in &partition[0] {
        for (acc, z) in coarse.iter_mut().zip(matrix(&elements[k]).concat()) {
            acc[0] += z[0];
            acc[1] += z[1];
        }
    }
    let expected = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]];
    for (z, e) in coarse.iter().zip(expected) {
        assert!((z[0] - e[0]).abs() <= 1e-12 && (z[1] - e[1]).abs() <= 1e-12);
    }
}

#[test]
fn simulate_zero_shots() {
    let povm = sic_povm_file();
    let state = temp_file("zero_state.json", &json!({ "dim": 2, "amp": [[1, 0], [0, 0]] }));
    let v = run_json(&["--seed", "1", "simulate", "--state", &state, "--povm", &povm, "--n", "0"]);
    assert_eq!(v["counts"], json!([0, 0, 0, 0]));
    assert_eq!(v["manifest"]["seed"], 1);
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let povm = sic_povm_file();
    let state = temp_file("plus_state.json", &json!({ "dim": 2, "amp": [[std::f64::consts::FRAC_1_SQRT_2, 0], [std::f64::consts::FRAC_1_SQRT_2, 0]] }));
    let args = ["--seed", "5", "simulate", "--state", &state, "--povm", &povm, "--n", "1000000"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["--seed", "6", "simulate", "--state", &state, "--povm", &povm, "--n", "1000000"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn simulate_maximally_mixed_is_uniform() {
    let povm = sic_povm_file();
    let state = temp_file(
        "mixed_state.json",
        &json!({ "rows": 2, "cols": 2, "data": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]] }),
    );
    let v = run_json(&["--seed", "42", "simulate", "--state", &state, "--povm", &povm, "--n", "1000000"]);
    let counts: Vec<u64> = serde_json::from_value(v["counts"].clone()).unwrap();
    assert_eq!(counts.iter().sum::<u64>(), 1_000_000);
    for c in counts {
        assert!((245_000..=255_000).contains(&c), "{c}");
    }
}

#[test]
fn reconstruct_uniform_probabilities() {
    let povm = sic_povm_file();
    let data = temp_file("uniform.json", &json!({ "probabilities": [0.25, 0.25, 0.25, 0.25] }));
    let v = run_json(&["reconstruct", "--data", &data, "--povm", &povm]);
    assert_matrix(&v["state"], &[[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]], 1e-12);
}

#[test]
fn simulate_then_reconstruct() {
    let povm = sic_povm_file();
    let state = temp_file("ket0.json", &json!({ "dim": 2, "amp": [[1, 0], [0, 0]] }));
    let sim = run_json(&["--seed", "3", "simulate", "--state", &state, "--povm", &povm, "--n", "1000000"]);
    let data = temp_file("ket0_counts.json", &sim);
    let v = run_json(&["reconstruct", "--data", &data, "--povm", &povm, "--project"]);
    assert_matrix(&v["state"], &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]], 0.01);
}

#[test]
fn reconstruct_with_incomplete_povm_is_infeasible() {
    let povm = temp_file(
        "pvm.json",
        &json!({ "elements": [
            { "rows": 2, "cols": 2, "data": [[1, 0], [0, 0], [0, 0], [0, 0]] },
            { "rows": 2, "cols": 2, "data": [[0, 0], [0, 0], [0, 0], [1, 0]] }
        ] }),
    );
    let data = temp_file("pvm_data.json", &json!({ "probabilities": [0.5, 0.5] }));
    let out = run(&["reconstruct", "--data", &data, "--povm", &povm]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn vn_check_qid_slots() {
    let s = 1.0 / 2f64.sqrt();
    let mut set = qubit_measurements();
    set["measurements"][0] = basis(2, &[&[[s, 0.0], [s, 0.0]], &[[s, 0.0], [-s, 0.0]]]);
    set["measurements"][1] = basis(2, &[&[[1.0, 0.0], [0.0, 0.0]], &[[0.0, 0.0], [1.0, 0.0]]]);
    set["slots"] = json!([
        [[0, s], [0, s], [1, s], [1, s]],
        [[0, s], [1, s], [1, s], [0, s]]
    ]);
    let path = temp_file("qid_slots.json", &set);
    let v = run_json(&["vn-check", "--measurements", &path]);
    let k: [f64; 2] = serde_json::from_value(v["scalar"].clone()).unwrap();
    assert!((k[0] - 0.5).abs() <= 1e-12 && k[1].abs() <= 1e-12, "{k:?}");
    assert_eq!(v["orthogonal_programs_required"], false);
}

#[test]
fn vn_check_distinct_pair_needs_orthogonal_programs() {
    let path = temp_file("pair.json", &qubit_measurements());
    let v = run_json(&["vn-check", "--measurements", &path]);
    assert!(v["scalar"].is_null());
    assert_eq!(v["orthogonal_programs_required"], true);
}

#[test]
fn vn_synth_padding() {
    let path = temp_file("synth.json", &qubit_measurements());
    let v = run_json(&["vn-synth", "--measurements", &path]);
    assert_eq!(v["data_dim"], 2);
    assert_eq!(v["program_dim"], 4);
    assert_eq!(v["completion_used"], true);
    assert_eq!(v["gate"]["rows"], 8);
    assert_eq!(v["gate"]["cols"], 8);
    assert!(v["unitarity_residual"].as_f64().unwrap() < 1e-12);
    for m in v["verifications"].as_array().unwrap() {
        assert!(m["povm_error"].as_f64().unwrap() < 1e-12);
        assert_eq!(m["projection_postulate"], true);
    }
}

#[test]
fn vn_synth_infeasible_assignment_exits_three() {
    let mut set = qubit_measurements();
    set["slots"] = json!([[[0, 1.0], [1, 1.0], null], [null, [0, 1.0], [1, 1.0]]]);
    let path = temp_file("synth_bad.json", &set);
    let out = run(&["vn-synth", "--measurements", &path]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn vn_relaxed_uses_data_sized_programs() {
    let path = temp_file("relaxed.json", &qubit_measurements());
    let v = run_json(&["vn-relaxed", "--measurements", &path]);
    assert_eq!(v["program_dim"], 2);
    let postulate: Vec<bool> = v["verifications"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["projection_postulate"].as_bool().unwrap())
        .collect();
    assert_eq!(postulate, [true, false]);
}

#[test]
fn bloch_export_csv() {
    let out = run(&["bloch-export", "--sic"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    serde_json::from_str::<Value>(&lines[0][2..]).unwrap();
    assert_eq!(lines[1], "label,x,y,z");
    assert_eq!(lines.len(), 6);
    for line in &lines[2..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let r: Vec<f64> = fields[1..].iter().map(|f| f.parse().unwrap()).collect();
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12, "{line}");
    }
}

#[test]
fn reads_stdin_and_writes_output_file() {
    let out_path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("stdin_povm.json");
    let mut child = bin()
        .args(["--output", out_path.to_str().unwrap(), "qid-povm", "--program", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let s = 1.0 / 2f64.sqrt();
    let t = 1.0 / 6f64.sqrt();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(program([s, t, t, t]).to_string().as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let from_file: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let sic = run_json(&["qid-povm", "--sic"]);
    assert_eq!(from_file["elements"], sic["elements"]);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = run(&["qid-povm", "--sic"]);
    let b = run(&["qid-povm", "--sic"]);
    assert_eq!(a.stdout, b.stdout);
}
