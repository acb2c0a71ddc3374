use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toricghz"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn generate(dir: &Path, kind: &str, size: &str) -> PathBuf {
    let p = dir.join(format!("{kind}_{size}.json"));
    let o = run(&["generate", "--lattice", kind, "--size", size, "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn edges(doc: &Value) -> usize {
    doc["darts"].as_u64().unwrap() as usize / 2
}

#[test]
fn generate_edge_counts() {
    let dir = TempDir::new().unwrap();
    for (kind, size, e) in [("square", "2x2", 8), ("triangular", "4x4", 48), ("kagome", "2x2", 24)] {
        let p = generate(dir.path(), kind, size);
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        assert_eq!(edges(&doc), e, "{kind} {size}");
        assert_eq!(doc["schema_version"], 1);
    }
}

#[test]
fn bad_size_is_usage_error() {
    assert_eq!(code(&run(&["generate", "--lattice", "square", "--size", "0x3"])), 1);
    assert_eq!(code(&run(&["generate", "--lattice", "square", "--size", "three"])), 1);
    assert_eq!(code(&run(&["generate", "--lattice", "hexagonal", "--size", "2x2"])), 1);
    assert_eq!(code(&run(&["disentangle", "--in", "/nonexistent/graph.json"])), 1);
}

#[test]
fn cycles_on_lattices() {
    let tri = run(&["cycles", "--lattice", "triangular", "--size", "4x4"]);
    assert_eq!(code(&tri), 0);
    assert_eq!(json(&tri)["cycles"].as_array().unwrap().len(), 4);
    let sq = run(&["cycles", "--lattice", "square", "--size", "4x4"]);
    assert_eq!(code(&sq), 0);
    let cycles = json(&sq)["cycles"].as_array().unwrap().clone();
    assert_eq!(cycles.len(), 4);
    // staircases alternate horizontal and vertical steps
    assert!(cycles.iter().all(|c| c["edges"].as_array().unwrap().len() == 8));
}

#[test]
fn obstruction_exit_code() {
    let o = run(&["cycles", "--lattice", "kagome", "--size", "2x2"]);
    assert_eq!(code(&o), 2);
    let doc = json(&o);
    assert_eq!(doc["error"], "no_family");
    let obs = doc["obstructions"].as_array().unwrap();
    assert!(!obs.is_empty());
    assert!(obs.iter().all(|ob| !ob["vertices"].as_array().unwrap().is_empty()));
}

#[test]
fn disentangle_square_2x2_with_oracle() {
    let o = run(&["disentangle", "--lattice", "square", "--size", "2x2", "--oracle"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&o);
    assert_eq!(doc["verdicts"]["oracle"], true);
    assert_eq!(doc["oracle"]["tensor_product_equal"], true);
    assert_eq!(doc["oracle"]["basis_change_equal"], true);
}

#[test]
fn disentangle_triangular_4x4_all_true() {
    let o = run(&["disentangle", "--lattice", "triangular", "--size", "4x4"]);
    let doc = json(&o);
    assert_eq!(doc["components"].as_array().unwrap().len(), 4);
    let verdicts = doc["verdicts"].as_object().unwrap();
    let failed: Vec<&String> = verdicts.iter().filter(|(_, v)| **v != Value::Bool(true)).map(|(k, _)| k).collect();
    assert!(failed.is_empty(), "failed verdicts: {failed:?}");
    assert_eq!(code(&o), 0);
}

#[test]
fn oracle_refuses_large_instances() {
    assert_eq!(code(&run(&["disentangle", "--lattice", "square", "--size", "4x4", "--oracle"])), 1);
}

#[test]
fn kagome_falls_back_to_vertex_splits() {
    let o = run(&["disentangle", "--lattice", "kagome", "--size", "1x2", "--oracle"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&o);
    assert_eq!(doc["num_qubits"], 16);
    assert_eq!(doc["splits"].as_array().unwrap().len(), 4);
}

#[test]
fn tampered_cycle_file_rejected() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "square", "4x4");
    let o = run(&["cycles", "--in", g.to_str().unwrap()]);
    let mut fam = json(&o);
    let first = fam["cycles"][0]["edges"][0].as_u64().unwrap();
    fam["cycles"][0]["edges"][0] = Value::from((first + 1) % 32);
    let c = dir.path().join("cycles.json");
    std::fs::write(&c, serde_json::to_string(&fam).unwrap()).unwrap();
    let o = run(&["disentangle", "--in", g.to_str().unwrap(), "--cycles", c.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn straight_row_cycle_file_rejected() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "square", "4x4");
    // horizontal edges of row 0 are 0, 2, 4, 6
    let c = dir.path().join("row.json");
    std::fs::write(&c, r#"[[0, 2, 4, 6]]"#).unwrap();
    let o = run(&["disentangle", "--in", g.to_str().unwrap(), "--cycles", c.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dual cycle"));
}

#[test]
fn sign_tampered_state_fails_with_exit_3() {
    let dir = TempDir::new().unwrap();
    let g = toricghz::build_lattice(toricghz::LatticeKind::Square, 2, 2).unwrap();
    let p = toricghz::prepare(&g).unwrap();
    let mut doc = p.state.group.to_doc();
    let clean = dir.path().join("clean.json");
    std::fs::write(&clean, serde_json::to_string(&doc).unwrap()).unwrap();
    let first = doc.generators[0].clone();
    doc.generators[0] = match first.strip_prefix('+') {
        Some(rest) => format!("-{rest}"),
        None => format!("+{}", first.trim_start_matches('-')),
    };
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&doc).unwrap()).unwrap();
    let args = |s: &Path| {
        vec![
            "disentangle".to_string(),
            "--lattice".into(),
            "square".into(),
            "--size".into(),
            "2x2".into(),
            "--state".into(),
            s.to_str().unwrap().into(),
        ]
    };
    assert_eq!(code(&bin().args(args(&clean)).output().unwrap()), 0);
    assert_eq!(code(&bin().args(args(&tampered)).output().unwrap()), 3);
}

#[test]
fn entropy_examples() {
    let g = toricghz::build_lattice(toricghz::LatticeKind::Square, 3, 3).unwrap();
    let face: Vec<String> = g.face(0).iter().map(|&d| g.edge_of(d).to_string()).collect();
    let o = run(&["entropy", "--lattice", "square", "--size", "3x3", "--region", &face.join(",")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["entropies"][0], 3);

    let o = run(&["entropy", "--lattice", "square", "--size", "3x3", "--region", ""]);
    assert_eq!(json(&o)["entropies"][0], 0);
}

#[test]
fn ladder_blocks_have_zero_mutual_information() {
    let rep = json(&run(&["disentangle", "--lattice", "triangular", "--size", "2x2"]));
    let comps = rep["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    let region =
        |c: &Value| c["qubits"].as_array().unwrap().iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
    let (a, b) = (region(&comps[0]), region(&comps[1]));
    let after =
        run(&["entropy", "--lattice", "triangular", "--size", "2x2", "--disentangled", "--region", &a, "--region", &b]);
    assert_eq!(code(&after), 0);
    assert_eq!(json(&after)["mutual_information"], 0);
    let before = run(&["entropy", "--lattice", "triangular", "--size", "2x2", "--region", &a, "--region", &b]);
    assert!(json(&before)["mutual_information"].as_u64().unwrap() >= 1);
}

#[test]
fn dot_export_marks_cycles_and_dual() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "triangular", "2x2");
    let c = dir.path().join("c.json");
    let o = run(&["cycles", "--in", g.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let plain = run(&["export-dot", "--in", g.to_str().unwrap(), "--cycles", c.to_str().unwrap()]);
    let text = String::from_utf8(plain.stdout).unwrap();
    assert!(text.starts_with("graph primal {"));
    assert_eq!(text.matches(" -- ").count(), 12);
    assert_eq!(text.matches("class=\"cycle").count(), 8);
    assert_eq!(text.matches('{').count(), text.matches('}').count());
    assert!(!text.contains("graph dual"));

    let both = run(&["export-dot", "--in", g.to_str().unwrap(), "--cycles", c.to_str().unwrap(), "--dual"]);
    let text = String::from_utf8(both.stdout).unwrap();
    assert!(text.contains("graph dual {"));
    assert_eq!(text.matches(" -- ").count(), 24);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&["disentangle", "--lattice", "square", "--size", "2x2", "--oracle", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 2, "temporary files left behind");
}

#[test]
fn graph_from_stdin() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "square", "2x2");
    let mut child = bin().args(["cycles", "--in", "-"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    {
        use std::io::Write;
        let mut stdin = child.stdin.take().unwrap();
        stdin.write_all(&std::fs::read(g).unwrap()).unwrap();
    }
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["cycles"].as_array().unwrap().len(), 2);
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest", "--seed", "7", "--cases", "16"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["passed"], true);
}
