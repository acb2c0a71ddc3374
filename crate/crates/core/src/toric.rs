//! Toric code ground state on a torus graph.
//!
//! Qubits live on edges. Vertex operators are Z-type stars, plaquette
//! operators are X-type face boundaries. The state |G00> is fixed by adding
//! `X` along a primal cycle and `Z` along a dual cycle, both with sign +.

use thiserror::Error;

use crate::graph::{EdgeSet, TorusGraph};
use crate::pauli::PauliWord;
use crate::stabilizer::{make_group, StabilizerError, StabilizerGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("primal edge set is not a cycle")]
    NotACycle,
    #[error("edge set is not a dual cycle")]
    NotADualCycle,
    #[error("primal cycle is contractible")]
    ContractiblePrimal,
    #[error("dual cycle is contractible")]
    ContractibleDual,
    #[error("primal and dual cycles overlap on an odd number of edges")]
    OddOverlap,
    #[error("wrong edge set length {found}, graph has {expected} edges")]
    WrongLength { found: usize, expected: usize },
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
}

/// The four string operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Logicals {
    pub tx1: PauliWord,
    pub tz1: PauliWord,
    pub tx2: PauliWord,
    pub tz2: PauliWord,
}

#[derive(Clone, Debug)]
pub struct ToricCodeState {
    pub graph: TorusGraph,
    pub group: StabilizerGroup,
    pub primal_cycle: EdgeSet,
    pub dual_cycle: EdgeSet,
    pub logicals: Logicals,
}

pub fn vertex_operator(g: &TorusGraph, v: usize) -> PauliWord {
    PauliWord::z_string(g.num_edges(), g.star(v).iter_ones())
}

pub fn plaquette_operator(g: &TorusGraph, f: usize) -> PauliWord {
    PauliWord::x_string(g.num_edges(), g.face_boundary(f).iter_ones())
}

/// Builds the validated generator set
/// `A_0..A_{V-2}, B_0..B_{F-2}, X(c_primal), Z(c_dual)`.
pub fn toric_code_state(g: &TorusGraph, c_primal: &EdgeSet, c_dual: &EdgeSet) -> Result<ToricCodeState, ToricError> {
    let n = g.num_edges();
    for s in [c_primal, c_dual] {
        if s.len() != n {
            return Err(ToricError::WrongLength { found: s.len(), expected: n });
        }
    }
    match g.is_contractible(c_primal) {
        Err(_) => return Err(ToricError::NotACycle),
        Ok(true) => return Err(ToricError::ContractiblePrimal),
        Ok(false) => {}
    }
    match g.is_dual_contractible(c_dual) {
        Err(_) => return Err(ToricError::NotADualCycle),
        Ok(true) => return Err(ToricError::ContractibleDual),
        Ok(false) => {}
    }
    if c_primal.dot(c_dual) {
        return Err(ToricError::OddOverlap);
    }
    let mut gens = Vec::with_capacity(n);
    gens.extend((0..g.num_vertices() - 1).map(|v| vertex_operator(g, v)));
    gens.extend((0..g.num_faces() - 1).map(|f| plaquette_operator(g, f)));
    let tx1 = PauliWord::x_string(n, c_primal.iter_ones());
    let tz1 = PauliWord::z_string(n, c_dual.iter_ones());
    gens.push(tx1.clone());
    gens.push(tz1.clone());
    let group = make_group(n, gens)?;
    if group.len() != n {
        return Err(StabilizerError::NotStateGroup { count: group.len(), n }.into());
    }
    let (tx2, tz2) = partner_strings(g, c_primal, c_dual);
    Ok(ToricCodeState {
        graph: g.clone(),
        group,
        primal_cycle: c_primal.clone(),
        dual_cycle: c_dual.clone(),
        logicals: Logicals { tx1, tz1, tx2, tz2 },
    })
}

fn partner_strings(g: &TorusGraph, c_primal: &EdgeSet, c_dual: &EdgeSet) -> (PauliWord, PauliWord) {
    let n = g.num_edges();
    let x_cycle = g.shortest_odd_cycle(c_dual).expect("a non-contractible dual cycle always has a crossing cycle");
    let z_cycle =
        g.dual_graph().shortest_odd_cycle(c_primal).expect("a non-contractible cycle always has a crossing dual cycle");
    (PauliWord::x_string(n, x_cycle), PauliWord::z_string(n, z_cycle))
}

/// `(T_x^2, T_z^2)`: the shortest cycle crossing the dual string an odd
/// number of times, and the shortest dual cycle crossing the primal string an
/// odd number of times. Ties break toward smaller edge ids.
pub fn logical_partners(state: &ToricCodeState) -> (PauliWord, PauliWord) {
    (state.logicals.tx2.clone(), state.logicals.tz2.clone())
}
