//! Kitaev ladder reference states.
//!
//! The square ladder with `r` rungs has `3r` qubits, laid out cell by cell:
//! rung `j` is qubit `3j`, the top leg link to its right is `3j + 1` and the
//! bottom leg link `3j + 2`. X-type cells sit on ladder vertices, Z-type
//! cells on plaquettes, and the non-local `T_z` runs along the top leg.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::IncrementalBasis;
use crate::pauli::PauliWord;
use crate::stabilizer::{make_group, StabilizerError, StabilizerGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LadderError {
    #[error("ladder needs at least 2 rungs, got {0}")]
    TooFewRungs(usize),
    #[error("cells span rank {rank} on {n} qubits")]
    RankDeficient { rank: usize, n: usize },
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderCell {
    pub kind: CellKind,
    pub qubits: Vec<usize>,
}

impl LadderCell {
    pub fn word(&self, n: usize) -> PauliWord {
        match self.kind {
            CellKind::X => PauliWord::x_string(n, self.qubits.iter().copied()),
            CellKind::Z => PauliWord::z_string(n, self.qubits.iter().copied()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LadderLayout {
    /// Rung count for the square ladder; `None` for ladders read off a graph.
    pub rungs: Option<usize>,
    pub cells: Vec<LadderCell>,
    pub top: Vec<usize>,
    pub group: StabilizerGroup,
    pub tz: PauliWord,
}

impl LadderLayout {
    /// Ladder state fixed by the given cells and `Z` along `top`, all with
    /// sign +. Cells are taken greedily in order, `T_z` last.
    pub fn from_cells(
        n: usize,
        cells: Vec<LadderCell>,
        top: Vec<usize>,
        rungs: Option<usize>,
    ) -> Result<Self, LadderError> {
        let tz = PauliWord::z_string(n, top.iter().copied());
        let mut basis = IncrementalBasis::new(2 * n);
        let mut gens = Vec::new();
        for w in cells.iter().map(|c| c.word(n)).chain([tz.clone()]) {
            if basis.insert(&w.symplectic_row()) {
                gens.push(w);
            }
        }
        if gens.len() != n {
            return Err(LadderError::RankDeficient { rank: gens.len(), n });
        }
        let group = make_group(n, gens)?;
        Ok(LadderLayout { rungs, cells, top, group, tz })
    }

    pub fn num_qubits(&self) -> usize {
        self.group.n()
    }
}

pub fn rung_qubit(j: usize) -> usize {
    3 * j
}

pub fn top_qubit(j: usize) -> usize {
    3 * j + 1
}

pub fn bottom_qubit(j: usize) -> usize {
    3 * j + 2
}

/// Periodic square ladder with `rungs` rungs.
pub fn ladder_group(rungs: usize) -> Result<LadderLayout, LadderError> {
    if rungs < 2 {
        return Err(LadderError::TooFewRungs(rungs));
    }
    let r = rungs;
    let prev = |j: usize| (j + r - 1) % r;
    let mut cells = Vec::with_capacity(3 * r);
    for j in 0..r {
        cells.push(LadderCell { kind: CellKind::X, qubits: sorted([rung_qubit(j), top_qubit(prev(j)), top_qubit(j)]) });
        cells.push(LadderCell {
            kind: CellKind::X,
            qubits: sorted([rung_qubit(j), bottom_qubit(prev(j)), bottom_qubit(j)]),
        });
        cells.push(LadderCell {
            kind: CellKind::Z,
            qubits: sorted([rung_qubit(j), rung_qubit((j + 1) % r), top_qubit(j), bottom_qubit(j)]),
        });
    }
    let top = (0..r).map(top_qubit).collect();
    LadderLayout::from_cells(3 * r, cells, top, Some(r))
}

fn sorted<const K: usize>(mut a: [usize; K]) -> Vec<usize> {
    a.sort_unstable();
    a.to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{entanglement_entropy, support_components, Membership};

    #[test]
    fn smallest_ladder_is_a_state() {
        let l = ladder_group(2).unwrap();
        assert_eq!(l.group.len(), l.group.n());
        assert_eq!(l.group.n(), 6);
    }

    #[test]
    fn one_rung_rejected() {
        assert!(matches!(ladder_group(1), Err(LadderError::TooFewRungs(1))));
    }

    #[test]
    fn tz_is_a_member() {
        for r in 2..7 {
            let l = ladder_group(r).unwrap();
            assert_eq!(l.group.is_member(&l.tz), Membership::Member);
        }
    }

    #[test]
    fn cells_are_local() {
        let l = ladder_group(5).unwrap();
        assert!(l.cells.iter().all(|c| c.qubits.len() <= 4));
        assert!(l.group.generators().iter().all(|g| g.weight() <= 5));
    }

    #[test]
    fn single_block() {
        let l = ladder_group(4).unwrap();
        assert_eq!(support_components(&l.group).len(), 1);
    }

    #[test]
    fn half_ladder_entropy_matches_dense() {
        let l = ladder_group(4).unwrap();
        let psi = crate::dense::dense_statevector(&l.group).unwrap();
        let half: Vec<usize> = (0..6).collect();
        let dense = crate::dense::reduced_entropy(&psi, 12, &half);
        assert!((dense - 3.0).abs() < 1e-9, "{dense}");
        assert_eq!(entanglement_entropy(&l.group, &half).unwrap(), 3);
    }

    #[test]
    fn contiguous_cell_blocks_carry_three_bits() {
        for r in [4, 6, 8] {
            let l = ladder_group(r).unwrap();
            for w in 1..r {
                let block: Vec<usize> = (0..3 * w).collect();
                assert_eq!(entanglement_entropy(&l.group, &block).unwrap(), 3, "r={r} w={w}");
            }
        }
    }
}
