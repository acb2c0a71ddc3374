//! Seeded randomized checks runnable from the command line.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use toricghz::dense::{apply_pauli, max_abs_diff, Complex64};
use toricghz::graph::SCHEMA_VERSION;
use toricghz::pipeline::run_pipeline;
use toricghz::{build_lattice, entanglement_entropy, groups_equal, pauli_multiply, LatticeKind, Pauli, PauliWord};

#[derive(Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

#[derive(Serialize)]
pub struct SelftestReport {
    pub schema_version: u32,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn random_word(rng: &mut ChaCha8Rng, n: usize) -> PauliWord {
    let mut w = PauliWord::identity(n);
    for q in 0..n {
        w.set(q, *[Pauli::I, Pauli::X, Pauli::Y, Pauli::Z].choose(rng).unwrap());
    }
    w.with_sign(rng.gen_bool(0.5))
}

fn pauli_products(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    let mut failures = Vec::new();
    for _ in 0..cases {
        let n = rng.gen_range(1..=5);
        let (p, q) = (random_word(rng, n), random_word(rng, n));
        if p.anticommutes(&q) {
            continue;
        }
        let psi: Vec<_> =
            (0..1usize << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let pq = pauli_multiply(&p, &q).expect("commuting pair");
        if max_abs_diff(&apply_pauli(&pq, &psi), &apply_pauli(&p, &apply_pauli(&q, &psi))) > 1e-12 {
            failures.push(format!("{p} * {q} = {pq}"));
        }
    }
    CheckResult { name: "pauli_products", cases, failures }
}

fn pipelines(rng: &mut ChaCha8Rng, cases: usize) -> CheckResult {
    let mut failures = Vec::new();
    let kinds = [LatticeKind::Square, LatticeKind::Triangular, LatticeKind::SquareOctagon];
    for _ in 0..cases {
        let kind = *kinds.choose(rng).unwrap();
        let l = rng.gen_range(1..=2) * 2;
        let g = build_lattice(kind, l, l).expect("lattice");
        let run = match run_pipeline(&g, None, None, false) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{kind} {l}x{l}: {e}"));
                continue;
            }
        };
        let d = &run.disentangled;
        let v = &run.report.verdicts;
        if !groups_equal(&d.output, &d.exact) || !v.component_count || !v.mutual_information_zero || !v.ladders {
            failures.push(format!("{kind} {l}x{l}: {:?}", v.failures()));
        }
        let n = d.num_qubits();
        let a: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let b: Vec<usize> = (0..n).filter(|q| !a.contains(q)).collect();
        for group in [&d.input, &d.output] {
            if entanglement_entropy(group, &a).ok() != entanglement_entropy(group, &b).ok() {
                failures.push(format!("{kind} {l}x{l}: impure split"));
            }
        }
    }
    CheckResult { name: "pipelines", cases, failures }
}

pub fn run(seed: u64, cases: usize) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![pauli_products(&mut rng, cases), pipelines(&mut rng, cases.div_ceil(4))];
    let passed = checks.iter().all(|c| c.failures.is_empty());
    SelftestReport { schema_version: SCHEMA_VERSION, seed, checks, passed }
}
