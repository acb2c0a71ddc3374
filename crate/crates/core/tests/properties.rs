mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toricghz::dense::{apply_pauli, max_abs_diff};
use toricghz::topo::state_on_family;
use toricghz::*;

fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    (prop::collection::vec(0u8..4, n), any::<bool>()).prop_map(move |(ps, neg)| {
        let mut w = PauliWord::identity(n);
        for (q, p) in ps.into_iter().enumerate() {
            w.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][p as usize]);
        }
        w.with_sign(neg)
    })
}

fn probe_state(n: usize, seed: u64) -> Vec<Complex64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1usize << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn shifted(c: &TopoCycle, s: usize) -> TopoCycle {
    fn rot<T: Clone>(v: &[T], s: usize) -> Vec<T> {
        (0..v.len()).map(|i| v[(i + s) % v.len()].clone()).collect()
    }
    TopoCycle {
        edges: rot(&c.edges, s),
        vertices: rot(&c.vertices, s),
        sides: rot(&c.sides, s),
        darts: rot(&c.darts, s),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_dense((p, q) in (1usize..=6).prop_flat_map(|n| (word(n), word(n))), seed in any::<u64>()) {
        let n = p.n();
        let psi = probe_state(n, seed);
        if !p.anticommutes(&q) {
            let pq = pauli_multiply(&p, &q).unwrap();
            let lhs = apply_pauli(&pq, &psi);
            let rhs = apply_pauli(&p, &apply_pauli(&q, &psi));
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }
        let pq_psi = apply_pauli(&p, &apply_pauli(&q, &psi));
        let qp_psi = apply_pauli(&q, &apply_pauli(&p, &psi));
        let sign = if symplectic_product(&p, &q).unwrap() == 1 { -1.0 } else { 1.0 };
        let scaled: Vec<Complex64> = qp_psi.iter().map(|a| a * sign).collect();
        prop_assert!(max_abs_diff(&pq_psi, &scaled) < 1e-12);
    }

    #[test]
    fn rank_survives_row_operations(rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 12), 1..10),
                                     ops in prop::collection::vec((0usize..10, 0usize..10, any::<bool>()), 0..20)) {
        let m = BitMatrix::from_rows(12, rows.iter().map(|r| BitVec::from_bools(r)).collect());
        let mut r: Vec<BitVec> = m.rows().to_vec();
        let k = r.len();
        for (a, b, swap) in ops {
            let (a, b) = (a % k, b % k);
            if swap {
                r.swap(a, b);
            } else if a != b {
                let src = r[b].clone();
                r[a].xor_assign(&src);
            }
        }
        prop_assert_eq!(BitMatrix::from_rows(12, r).rank(), m.rank());
    }

    #[test]
    fn random_embeddings_keep_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = common::random_embedding(&mut rng);
        if let Err(msg) = common::check_invariants(&e, &mut rng) {
            prop_assert!(false, "{}: {}", e.label, msg);
        }
    }

    #[test]
    fn chain_offset_does_not_change_output(kind in prop::sample::select(vec![LatticeKind::Square, LatticeKind::Triangular, LatticeKind::SquareOctagon]),
                                           l in 2usize..=4, chain in 0usize..4, offset in 1usize..16) {
        let g = build_lattice(kind, l, l).unwrap();
        let Ok(fam) = find_family(&g) else { return Ok(()) };
        let state = state_on_family(&g, &fam).unwrap();
        let base = disentangle(&state, &fam).unwrap();
        let mut moved = fam.clone();
        let c = chain % moved.len();
        let s = offset % moved.cycles[c].len();
        moved.cycles[c] = shifted(&moved.cycles[c], s);
        let other = disentangle(&state, &moved).unwrap();
        prop_assert!(groups_equal(&base.output, &other.output));
    }

    #[test]
    fn family_faces_hold_zero_or_two_cycle_darts(kind in prop::sample::select(LatticeKind::ALL.to_vec()), l in 2usize..=4) {
        let g = build_lattice(kind, l, l).unwrap();
        let Ok(p) = prepare(&g) else { return Ok(()) };
        let h = &p.state.graph;
        for c in &p.family.cycles {
            prop_assert!(h.is_cycle(&c.edge_set(h)) && h.is_dual_cycle(&c.edge_set(h)));
            prop_assert!(!h.is_contractible(&c.edge_set(h)).unwrap());
            for f in 0..h.num_faces() {
                let k = h.face(f).iter().filter(|&&d| c.edges.contains(&h.edge_of(d))).count();
                prop_assert!(k == 0 || k == 2, "face {} holds {}", f, k);
            }
        }
    }
}
