//! GHZ disentangling of toric code ground states on torus-embedded graphs.
//!
//! The pipeline builds a toric code stabilizer group on a combinatorial map,
//! finds a family of parallel cycles that can carry both string operators,
//! rewrites every generator through the GHZ basis change along each cycle and
//! checks that the result splits into independent ladder states.

pub mod bits;
pub mod dense;
pub mod gf2;
pub mod ghz;
pub mod graph;
pub mod ladder;
pub mod lattice;
pub mod pauli;
pub mod pipeline;
pub mod stabilizer;
pub mod topo;
pub mod toric;
pub mod verify;

pub use bits::BitVec;
pub use gf2::{BitMatrix, IncrementalBasis};
pub use ghz::{disentangle, rewrite_generator, Color, Disentangled, GhzChain, GhzError, QubitRole};
pub use graph::{EdgeSet, GraphDoc, GraphError, Legend, SplitRecord, TorusGraph};
pub use ladder::{ladder_group, CellKind, LadderCell, LadderError, LadderLayout};
pub use lattice::{build_lattice, LatticeKind};
pub use pauli::{pauli_multiply, symplectic_product, Pauli, PauliError, PauliWord};
pub use pipeline::{run_pipeline, Run, RunError};
pub use stabilizer::{
    conjugate_by_cnot, entanglement_entropy, groups_equal, make_group, mutual_information, support_components,
    Membership, StabilizerError, StabilizerGroup, SupportComponent,
};
pub use topo::{
    check_topological, find_family, make_topological, prepare, CycleFamily, FamilyDoc, Obstruction, Side, TopoCycle,
    TopoError,
};
pub use toric::{logical_partners, toric_code_state, Logicals, ToricCodeState, ToricError};
pub use verify::{oracle_check, verify_ladders, ComponentReport, DisentangleReport, OracleReport, Verdicts};
