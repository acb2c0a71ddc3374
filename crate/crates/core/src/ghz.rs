//! GHZ basis change along topological cycles, executed as a generator rewrite.
//!
//! For a cycle with edge qubits `e_0..e_{N-1}` the GHZ basis is fixed by
//! `g_i = Z_i Z_{i+1}` (i < N-1) and `g_{N-1} = Z_{N-1} Z_0 X_0..X_{N-1}`.
//! The change of basis maps `g_i` to `Z` on GHZ qubit `m_i`, which lives on
//! the same physical qubit as `e_i` and sits at the cycle vertex between
//! `e_i` and `e_{i+1}`. On single-qubit Paulis it acts as
//!
//! ```text
//! X_j     -> Xb_{j-1} Xb_j                  j < N-1
//! X_{N-1} -> Xb_{N-2} Xb_{N-1} Zb_0..Zb_{N-1}
//! Z_j     -> Xb_{N-1} Zb_j..Zb_{N-2}        j < N-1
//! Z_{N-1} -> Xb_{N-1}
//! ```
//!
//! with indices mod N. The dense oracle in `dense` checks these images
//! against the basis vectors directly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::gf2::IncrementalBasis;
use crate::pauli::{pauli_multiply, PauliError, PauliWord, PhasedPauli};
use crate::stabilizer::{groups_equal, make_group, StabilizerError, StabilizerGroup};
use crate::topo::{CycleFamily, Side, TopoCycle};
use crate::toric::{plaquette_operator, vertex_operator, ToricCodeState};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GhzError {
    #[error("generator {0} has odd Z weight on the chain")]
    OddChainZWeight(String),
    #[error("{kind} string of chain {chain} is not in the stabilizer group")]
    ChainStringMissing { chain: usize, kind: char },
    #[error("chains {0} and {1} share an edge")]
    OverlappingChains(usize, usize),
    #[error("rewritten generators have rank {found}, expected {expected}")]
    RankLoss { found: usize, expected: usize },
    #[error("normalized rewrite does not generate the conjugated group")]
    Mismatch,
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
}

/// Side of a GHZ qubit, inherited from the side of its cycle vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Green,
    Blue,
}

impl From<Side> for Color {
    fn from(s: Side) -> Self {
        match s {
            Side::Up => Color::Green,
            Side::Down => Color::Blue,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzChain {
    pub cycle: TopoCycle,
    n: usize,
    /// Position along the chain of each physical qubit, if on it.
    position: Vec<Option<usize>>,
}

impl GhzChain {
    pub fn new(cycle: TopoCycle, n: usize) -> Self {
        let mut position = vec![None; n];
        for (i, &e) in cycle.edges.iter().enumerate() {
            position[e] = Some(i);
        }
        GhzChain { cycle, n, position }
    }

    pub fn len(&self) -> usize {
        self.cycle.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.edges.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Physical qubit carrying chain position `i` (and GHZ qubit `m_i`).
    pub fn qubit(&self, i: usize) -> usize {
        self.cycle.edges[i]
    }

    pub fn qubits(&self) -> &[usize] {
        &self.cycle.edges
    }

    pub fn position(&self, q: usize) -> Option<usize> {
        self.position.get(q).copied().flatten()
    }

    pub fn color(&self, i: usize) -> Color {
        self.cycle.sides[i].into()
    }

    pub fn colors(&self) -> Vec<Color> {
        self.cycle.sides.iter().map(|&s| s.into()).collect()
    }

    pub fn x_string(&self) -> PauliWord {
        PauliWord::x_string(self.n, self.qubits().iter().copied())
    }

    pub fn z_string(&self) -> PauliWord {
        PauliWord::z_string(self.n, self.qubits().iter().copied())
    }

    /// `g_0..g_{N-1}` on the physical qubits, each as a literal operator
    /// product (for the last one the `Z` pair stands left of the `X` string).
    pub fn chain_stabilizers(&self) -> Vec<PauliWord> {
        let n_c = self.len();
        let mut out: Vec<PauliWord> =
            (0..n_c - 1).map(|i| PauliWord::z_string(self.n, [self.qubit(i), self.qubit(i + 1)])).collect();
        let zz = PauliWord::z_string(self.n, [self.qubit(n_c - 1), self.qubit(0)]);
        out.push(pauli_multiply(&zz, &self.x_string()).expect("Z pair and X string commute"));
        out
    }

    /// Word on GHZ qubits at chain positions `xs` (X part) and `zs` (Z part).
    pub fn ghz_word<I: IntoIterator<Item = usize>, J: IntoIterator<Item = usize>>(&self, xs: I, zs: J) -> PauliWord {
        let x = BitVec::from_indices(self.n, xs.into_iter().map(|i| self.qubit(i)));
        let z = BitVec::from_indices(self.n, zs.into_iter().map(|i| self.qubit(i)));
        PauliWord::new(x, z, false).expect("same length")
    }

    fn phased(&self, xs: &[usize], zs: &[usize]) -> PhasedPauli {
        PhasedPauli::from_word(&self.ghz_word(xs.iter().copied(), zs.iter().copied()))
    }

    fn x_image(&self, j: usize) -> PhasedPauli {
        let n_c = self.len();
        let pair = [(j + n_c - 1) % n_c, j];
        if j < n_c - 1 {
            self.phased(&pair, &[])
        } else {
            let all: Vec<usize> = (0..n_c).collect();
            self.phased(&pair, &[]).mul(&self.phased(&[], &all))
        }
    }

    fn z_image(&self, j: usize) -> PhasedPauli {
        let n_c = self.len();
        let run: Vec<usize> = (j..n_c - 1).collect();
        self.phased(&[n_c - 1], &run)
    }

    /// Exact conjugated image `U^dagger P U` of any word.
    pub fn image(&self, p: &PauliWord) -> PauliWord {
        let mut x_off = p.x_bits().clone();
        let mut z_off = p.z_bits().clone();
        for &q in self.qubits() {
            x_off.set(q, false);
            z_off.set(q, false);
        }
        let k = (2 * p.is_negative() as usize + p.x_bits().and_count(p.z_bits())) % 4;
        let mut acc = PhasedPauli { x: x_off, z: z_off, k: k as u8 };
        for (i, &q) in self.qubits().iter().enumerate() {
            if p.x_bits().get(q) {
                acc.mul_assign(&self.x_image(i));
            }
        }
        for (i, &q) in self.qubits().iter().enumerate() {
            if p.z_bits().get(q) {
                acc.mul_assign(&self.z_image(i));
            }
        }
        acc.to_word().expect("conjugation preserves Hermiticity")
    }

    fn chain_weight(&self, p: &PauliWord) -> usize {
        self.qubits().iter().filter(|&&q| p.x_bits().get(q) || p.z_bits().get(q)).count()
    }

    fn chain_z_weight(&self, p: &PauliWord) -> usize {
        self.qubits().iter().filter(|&&q| p.z_bits().get(q)).count()
    }
}

/// Rewrites `p` through one chain.
///
/// `x_member` is the chain's `X` string as an element of the ambient group
/// (with its actual sign). Of the images of `p` and `p * x_member`, the one
/// with smaller support on the chain is returned; ties keep the image of `p`.
/// The two differ by the image of `x_member`, a group element.
pub fn rewrite_generator(p: &PauliWord, chain: &GhzChain, x_member: &PauliWord) -> Result<PauliWord, GhzError> {
    if chain.chain_z_weight(p) % 2 == 1 {
        return Err(GhzError::OddChainZWeight(p.to_string()));
    }
    let plain = chain.image(p);
    let shifted = chain.image(&pauli_multiply(p, x_member)?);
    Ok(if chain.chain_weight(&shifted) < chain.chain_weight(&plain) { shifted } else { plain })
}

/// Role of a physical qubit after the basis change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum QubitRole {
    /// GHZ qubit `m_{position}` (0-based) of `chain`.
    Ghz {
        chain: usize,
        position: usize,
        color: Color,
    },
    Fixed,
}

#[derive(Clone, Debug)]
pub struct Disentangled {
    pub chains: Vec<GhzChain>,
    pub input: StabilizerGroup,
    /// Generators picked greedily from the normalized rewrites.
    pub output: StabilizerGroup,
    /// Conjugated input generators, one for one.
    pub exact: StabilizerGroup,
    pub roles: Vec<QubitRole>,
    /// Normalized images of every vertex and plaquette operator.
    pub vertex_images: Vec<PauliWord>,
    pub plaquette_images: Vec<PauliWord>,
    /// Normalized images of the `Z` string and `X Z` string of each chain.
    pub string_images: Vec<(PauliWord, PauliWord)>,
}

impl Disentangled {
    pub fn num_qubits(&self) -> usize {
        self.input.n()
    }

    pub fn signs_positive(&self) -> bool {
        self.output.generators().iter().all(|g| !g.is_negative())
    }
}

fn rewrite_all(p: &PauliWord, chains: &[GhzChain], x_members: &[PauliWord]) -> Result<PauliWord, GhzError> {
    let mut cur = p.clone();
    for (c, x) in chains.iter().zip(x_members) {
        cur = rewrite_generator(&cur, c, x)?;
    }
    Ok(cur)
}

/// Applies the GHZ basis change along every family cycle.
///
/// The chain strings `X_c` and `Z_c` must be group elements; their signs are
/// taken from the group. Output generators are picked greedily from the
/// images of `Z_c`, `X_c Z_c` (per chain), all vertex operators and all
/// plaquette operators, and must generate exactly the conjugated input group.
pub fn disentangle(state: &ToricCodeState, family: &CycleFamily) -> Result<Disentangled, GhzError> {
    let g = &state.graph;
    let n = g.num_edges();
    let chains: Vec<GhzChain> = family.cycles.iter().map(|c| GhzChain::new(c.clone(), n)).collect();
    let mut used = BitVec::zeros(n);
    for (i, c) in chains.iter().enumerate() {
        for &q in c.qubits() {
            if used.get(q) {
                let j = chains.iter().position(|o| o.position(q).is_some()).unwrap();
                return Err(GhzError::OverlappingChains(j, i));
            }
            used.set(q, true);
        }
    }
    let oracle = state.group.membership_oracle();
    let mut x_members = Vec::with_capacity(chains.len());
    let mut z_members = Vec::with_capacity(chains.len());
    for (i, c) in chains.iter().enumerate() {
        let x = oracle.element(&c.x_string()).ok_or(GhzError::ChainStringMissing { chain: i, kind: 'X' })?;
        let z = oracle.element(&c.z_string()).ok_or(GhzError::ChainStringMissing { chain: i, kind: 'Z' })?;
        x_members.push(x);
        z_members.push(z);
    }

    let exact_words: Vec<PauliWord> =
        state.group.generators().par_iter().map(|p| chains.iter().fold(p.clone(), |acc, c| c.image(&acc))).collect();
    let exact = make_group(n, exact_words)?;

    let rewrite = |words: Vec<PauliWord>| -> Result<Vec<PauliWord>, GhzError> {
        words.par_iter().map(|p| rewrite_all(p, &chains, &x_members)).collect()
    };
    let mut string_words = Vec::with_capacity(2 * chains.len());
    for (x, z) in x_members.iter().zip(&z_members) {
        string_words.push(z.clone());
        string_words.push(pauli_multiply(x, z)?);
    }
    let strings = rewrite(string_words)?;
    let vertex_images = rewrite((0..g.num_vertices()).map(|v| vertex_operator(g, v)).collect())?;
    let plaquette_images = rewrite((0..g.num_faces()).map(|f| plaquette_operator(g, f)).collect())?;

    let mut basis = IncrementalBasis::new(2 * n);
    let mut picked = Vec::with_capacity(n);
    for w in strings.iter().chain(&vertex_images).chain(&plaquette_images) {
        if basis.insert(&w.symplectic_row()) {
            picked.push(w.clone());
        }
    }
    if picked.len() != n {
        return Err(GhzError::RankLoss { found: picked.len(), expected: n });
    }
    let output = make_group(n, picked)?;
    if !groups_equal(&output, &exact) {
        return Err(GhzError::Mismatch);
    }

    let mut roles = vec![QubitRole::Fixed; n];
    for (ci, c) in chains.iter().enumerate() {
        for i in 0..c.len() {
            roles[c.qubit(i)] = QubitRole::Ghz { chain: ci, position: i, color: c.color(i) };
        }
    }
    let string_images = strings.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
    Ok(Disentangled {
        chains,
        input: state.group.clone(),
        output,
        exact,
        roles,
        vertex_images,
        plaquette_images,
        string_images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{apply_ghz_change, apply_pauli, max_abs_diff, StateVector};
    use crate::graph::TorusGraph;
    use crate::lattice::{build_lattice, LatticeKind};
    use crate::stabilizer::support_components;
    use crate::topo::find_family;
    use num_complex::Complex64;

    /// A bare chain on `n_c` qubits: the ring graph is not needed for the map.
    fn ring_chain(n_c: usize) -> GhzChain {
        let cycle = TopoCycle {
            edges: (0..n_c).collect(),
            vertices: (0..n_c).collect(),
            sides: vec![Side::Up; n_c],
            darts: vec![(0, 0); n_c],
        };
        GhzChain::new(cycle, n_c)
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut s = seed;
        (0..1usize << n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (s >> 33) as f64 / (1u64 << 31) as f64 - 0.5;
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = (s >> 33) as f64 / (1u64 << 31) as f64 - 0.5;
                Complex64::new(a, b)
            })
            .collect()
    }

    #[test]
    fn single_qubit_images_match_dense_basis_change() {
        for n_c in 2..=6 {
            let chain = ring_chain(n_c);
            let psi = random_state(n_c, n_c as u64);
            let all: Vec<usize> = (0..n_c).collect();
            for q in 0..n_c {
                for kind in ["X", "Z", "Y"] {
                    let p = PauliWord::parse(&format!("+{kind}{}", q + 1), n_c).unwrap();
                    // U^dag P psi == image(P) U^dag psi
                    let lhs = apply_ghz_change(&apply_pauli(&p, &psi), n_c, &all);
                    let rhs = apply_pauli(&chain.image(&p), &apply_ghz_change(&psi, n_c, &all));
                    assert!(max_abs_diff(&lhs, &rhs) < 1e-9, "N={n_c} {p}");
                }
            }
        }
    }

    #[test]
    fn chain_stabilizers_map_to_single_z() {
        for n_c in 2..=8 {
            let chain = ring_chain(n_c);
            for (i, g) in chain.chain_stabilizers().iter().enumerate() {
                assert_eq!(chain.image(g), chain.ghz_word([], [i]), "N={n_c} i={i}");
            }
        }
    }

    #[test]
    fn chain_stabilizers_commute() {
        let gs = ring_chain(6).chain_stabilizers();
        for a in &gs {
            for b in &gs {
                assert!(!a.anticommutes(b));
            }
        }
    }

    #[test]
    fn string_images() {
        for n_c in [2, 4, 6, 8] {
            let c = ring_chain(n_c);
            let all: Vec<usize> = (0..n_c).collect();
            let odd: Vec<usize> = (0..n_c).step_by(2).collect();
            let even: Vec<usize> = (1..n_c).step_by(2).collect();
            assert_eq!(c.image(&c.x_string()), c.ghz_word([], all.clone()));
            assert_eq!(c.image(&c.z_string()), c.ghz_word([], odd));
            let xz = pauli_multiply(&c.x_string(), &c.z_string()).unwrap();
            assert_eq!(c.image(&xz), c.ghz_word([], even));
        }
    }

    #[test]
    fn odd_z_weight_rejected() {
        let c = ring_chain(4);
        let p = PauliWord::parse("+Z1", 4).unwrap();
        assert!(matches!(rewrite_generator(&p, &c, &c.x_string()), Err(GhzError::OddChainZWeight(_))));
    }

    fn run(kind: LatticeKind, l: usize) -> (TorusGraph, Disentangled) {
        let g = build_lattice(kind, l, l).unwrap();
        let fam = find_family(&g).unwrap();
        let state = crate::topo::state_on_family(&g, &fam).unwrap();
        let d = disentangle(&state, &fam).unwrap();
        (g, d)
    }

    #[test]
    fn triangular_2x2_splits_in_two() {
        let (_, d) = run(LatticeKind::Triangular, 2);
        assert_eq!(support_components(&d.output).len(), 2);
        assert!(d.signs_positive());
    }

    #[test]
    fn square_4x4_splits_in_four() {
        let (_, d) = run(LatticeKind::Square, 4);
        assert_eq!(support_components(&d.output).len(), 4);
        assert!(d.signs_positive());
    }

    #[test]
    fn vertex_and_plaquette_images_are_one_colored() {
        for kind in [LatticeKind::Triangular, LatticeKind::Square, LatticeKind::SquareOctagon] {
            let (_, d) = run(kind, 4);
            for w in d.vertex_images.iter().chain(&d.plaquette_images) {
                for c in &d.chains {
                    let colors: std::collections::BTreeSet<Color> = (0..c.len())
                        .filter(|&i| w.get(c.qubit(i)) != crate::pauli::Pauli::I)
                        .map(|i| c.color(i))
                        .collect();
                    assert!(colors.len() <= 1, "{kind}: {w}");
                }
            }
        }
    }
}
