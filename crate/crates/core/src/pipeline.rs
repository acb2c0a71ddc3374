//! End-to-end runs shared by the command line and the tests.

use thiserror::Error;

use crate::dense::MAX_DENSE_QUBITS;
use crate::ghz::{disentangle, Disentangled};
use crate::graph::TorusGraph;
use crate::stabilizer::StabilizerGroup;
use crate::topo::{parse_family, prepare, state_on_family, Obstruction, Prepared, TopoError};
use crate::verify::{verify_ladders, DisentangleReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_FAMILY: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("no topological cycle family found ({} obstruction cycles)", .0.len())]
    NoFamily(Vec<Obstruction>),
    #[error("invalid cycle file: {0}")]
    InvalidCycles(TopoError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::NoFamily(_) => EXIT_NO_FAMILY,
            RunError::InvalidCycles(_) | RunError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

pub struct Run {
    pub prepared: Prepared,
    pub disentangled: Disentangled,
    pub report: DisentangleReport,
}

impl Run {
    /// 0 when every verdict holds, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.verdicts.all() {
            EXIT_OK
        } else {
            EXIT_VERIFICATION
        }
    }
}

/// Family from a cycle document if given, otherwise searched (with the
/// vertex-split fallback).
pub fn prepare_family(g: &TorusGraph, cycles: Option<&str>) -> Result<Prepared, RunError> {
    match cycles {
        Some(json) => {
            let family = parse_family(g, json).map_err(RunError::InvalidCycles)?;
            let state = state_on_family(g, &family).map_err(RunError::InvalidCycles)?;
            Ok(Prepared { state, family, splits: Vec::new() })
        }
        None => match prepare(g) {
            Ok(p) => Ok(p),
            Err(TopoError::NoFamily { obstructions }) => Err(RunError::NoFamily(obstructions)),
            Err(e) => Err(RunError::Verification(e.to_string())),
        },
    }
}

/// Full pipeline. `state` replaces the toric code group of the prepared
/// graph; it must act on the same qubits.
pub fn run_pipeline(
    g: &TorusGraph,
    cycles: Option<&str>,
    state: Option<StabilizerGroup>,
    oracle: bool,
) -> Result<Run, RunError> {
    let mut prepared = prepare_family(g, cycles)?;
    let n = prepared.state.graph.num_edges();
    if oracle && n > MAX_DENSE_QUBITS {
        return Err(RunError::Usage(format!("--oracle refuses {n} qubits (limit {MAX_DENSE_QUBITS})")));
    }
    if let Some(group) = state {
        if group.n() != n {
            return Err(RunError::Usage(format!("state has {} qubits, graph has {n} edges", group.n())));
        }
        prepared.state.group = group;
    }
    let d = disentangle(&prepared.state, &prepared.family).map_err(|e| RunError::Verification(e.to_string()))?;
    let report = verify_ladders(&prepared.state.graph, &prepared.family, &d, oracle);
    Ok(Run { prepared, disentangled: d, report })
}
