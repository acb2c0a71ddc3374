//! Topological cycles, parallel families, and the vertex-split fallback.
//!
//! A topological cycle is a simple non-contractible cycle that is also a dual
//! cycle and whose vertices each keep all their other edges on one side.
//! Such a cycle carries both an `X` string and a `Z` string of the toric code.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::graph::{EdgeSet, GraphError, SplitRecord, TorusGraph, SCHEMA_VERSION};
use crate::lattice::{cell_edge, LatticeKind};
use crate::pauli::{Pauli, PauliWord};
use crate::stabilizer::{cnot_word, groups_equal, make_group, StabilizerGroup};
use crate::toric::{toric_code_state, ToricCodeState, ToricError};

/// Expansion budget for the general cycle searches.
pub const SEARCH_BUDGET: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Left of the direction of travel.
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    /// Closed walk, in order.
    pub edges: Vec<usize>,
    /// Two-sided vertices on the walk.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopoError {
    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("edges do not form a closed walk")]
    NotClosedWalk,
    #[error("cycle is not simple")]
    NotSimple,
    #[error("cycle is contractible")]
    Contractible,
    #[error("cycle is not a dual cycle")]
    NotDualCycle,
    #[error("cycle is contractible in the dual graph")]
    DualContractible,
    #[error("vertex {0} has off-cycle edges on both sides")]
    TwoSidedVertex(usize),
    #[error("cycle length {0} is odd")]
    OddLength(usize),
    #[error("sides in the cycle document disagree with the graph at position {0}")]
    SideMismatch(usize),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("no topological cycle family found ({} obstruction cycles)", .obstructions.len())]
    NoFamily { obstructions: Vec<Obstruction> },
    #[error("vertex {0} is not on the cycle")]
    NotOnCycle(usize),
    #[error("vertex {0} is not two-sided")]
    NotTwoSided(usize),
    #[error("no ancilla pattern reproduces the toric code after splitting vertex {0}")]
    Postcondition(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Toric(#[from] ToricError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopoCycle {
    pub edges: Vec<usize>,
    /// `vertices[i]` joins `edges[i]` and `edges[i + 1]` (cyclically).
    pub vertices: Vec<usize>,
    pub sides: Vec<Side>,
    /// `(incoming dart, outgoing dart)` at `vertices[i]`.
    pub darts: Vec<(usize, usize)>,
}

impl TopoCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self, g: &TorusGraph) -> EdgeSet {
        g.edge_set(self.edges.iter().copied())
    }

    /// Off-cycle darts at `vertices[i]` on the left (`Up`) and right side.
    pub fn arcs(&self, g: &TorusGraph, i: usize) -> (Vec<usize>, Vec<usize>) {
        let (d_in, d_out) = self.darts[i];
        side_arcs(g, d_in, d_out)
    }

    pub fn to_doc(&self) -> CycleDoc {
        CycleDoc { edges: self.edges.clone(), sides: Some(self.sides.clone()) }
    }
}

/// Darts strictly between `d_out` and `d_in` counterclockwise (left side),
/// and strictly between `d_in` and `d_out` (right side).
fn side_arcs(g: &TorusGraph, d_in: usize, d_out: usize) -> (Vec<usize>, Vec<usize>) {
    let sweep = |from: usize, to: usize| {
        let mut out = Vec::new();
        let mut d = g.sigma(from);
        while d != to {
            out.push(d);
            d = g.sigma(d);
        }
        out
    };
    (sweep(d_out, d_in), sweep(d_in, d_out))
}

/// Orients `edges` as a closed walk of distinct vertices.
fn walk(g: &TorusGraph, edges: &[usize]) -> Result<Vec<(usize, usize)>, TopoError> {
    if let Some(&e) = edges.iter().find(|&&e| e >= g.num_edges()) {
        return Err(TopoError::EdgeOutOfRange(e));
    }
    if edges.is_empty() {
        return Err(TopoError::NotClosedWalk);
    }
    if edges.iter().collect::<BTreeSet<_>>().len() != edges.len() {
        return Err(TopoError::NotSimple);
    }
    if edges.iter().any(|&e| {
        let (a, b) = g.edge_endpoints(e);
        a == b
    }) {
        return Err(TopoError::NotSimple);
    }
    let n = edges.len();
    'orient: for start in g.edge_darts(edges[0]) {
        let mut darts = Vec::with_capacity(n);
        let mut cur = g.alpha(start);
        for &e in &edges[1..] {
            let w = g.vertex_of(cur);
            let Some(next) = g.edge_darts(e).into_iter().find(|&d| g.vertex_of(d) == w) else {
                continue 'orient;
            };
            darts.push((cur, next));
            cur = g.alpha(next);
        }
        if g.vertex_of(cur) != g.vertex_of(start) {
            continue;
        }
        darts.push((cur, start));
        let verts: BTreeSet<usize> = darts.iter().map(|&(d, _)| g.vertex_of(d)).collect();
        if verts.len() != n {
            return Err(TopoError::NotSimple);
        }
        return Ok(darts);
    }
    Err(TopoError::NotClosedWalk)
}

/// Lowest edge id first, then toward the lower-id neighbour.
fn canonical_order(edges: &[usize]) -> Vec<usize> {
    let n = edges.len();
    let k = (0..n).min_by_key(|&i| edges[i]).unwrap();
    let fwd: Vec<usize> = (0..n).map(|i| edges[(k + i) % n]).collect();
    if n > 2 && fwd[n - 1] < fwd[1] {
        let mut rev = vec![fwd[0]];
        rev.extend(fwd[1..].iter().rev());
        rev
    } else {
        fwd
    }
}

/// Validates an ordered closed walk as a topological cycle.
///
/// Checks, in order: closed walk, simple, non-contractible, dual cycle,
/// non-contractible as a dual cycle, one-sided vertices, even length.
pub fn check_topological(g: &TorusGraph, edges: &[usize]) -> Result<TopoCycle, TopoError> {
    walk(g, edges)?;
    let edges = canonical_order(edges);
    let darts = walk(g, &edges)?;
    let set = g.edge_set(edges.iter().copied());
    if g.is_contractible(&set)? {
        return Err(TopoError::Contractible);
    }
    if !g.is_dual_cycle(&set) {
        return Err(TopoError::NotDualCycle);
    }
    // a product of vertex operators cannot carry the Z string
    if g.is_dual_contractible(&set)? {
        return Err(TopoError::DualContractible);
    }
    let mut sides = Vec::with_capacity(edges.len());
    let mut vertices = Vec::with_capacity(edges.len());
    for &(d_in, d_out) in &darts {
        let v = g.vertex_of(d_in);
        let (up, down) = side_arcs(g, d_in, d_out);
        if !up.is_empty() && !down.is_empty() {
            return Err(TopoError::TwoSidedVertex(v));
        }
        vertices.push(v);
        sides.push(if down.is_empty() { Side::Up } else { Side::Down });
    }
    if edges.len() % 2 == 1 {
        return Err(TopoError::OddLength(edges.len()));
    }
    Ok(TopoCycle { edges, vertices, sides, darts })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleFamily {
    pub cycles: Vec<TopoCycle>,
    /// Largest vertex degree left after deleting the family edges.
    pub residual_vertex_degree: usize,
    /// Largest face degree left after deleting the family edges.
    pub residual_face_degree: usize,
}

impl CycleFamily {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Both residual graphs are unions of paths and cycles.
    pub fn one_dimensional(&self) -> bool {
        self.residual_vertex_degree <= 2 && self.residual_face_degree <= 2
    }

    pub fn edge_set(&self, g: &TorusGraph) -> EdgeSet {
        g.edge_set(self.cycles.iter().flat_map(|c| c.edges.iter().copied()))
    }

    pub fn to_doc(&self) -> FamilyDoc {
        FamilyDoc {
            schema_version: SCHEMA_VERSION,
            cycles: self.cycles.iter().map(TopoCycle::to_doc).collect(),
            one_dimensional: Some(self.one_dimensional()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDoc {
    pub edges: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<Side>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub schema_version: u32,
    pub cycles: Vec<CycleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_dimensional: Option<bool>,
}

/// Accepts either a full family document or a bare array of cycles.
#[derive(Deserialize)]
#[serde(untagged)]
enum AnyFamilyDoc {
    Full(FamilyDoc),
    Cycles(Vec<CycleDoc>),
    Edges(Vec<Vec<usize>>),
}

pub fn parse_family(g: &TorusGraph, json: &str) -> Result<CycleFamily, TopoError> {
    let any: AnyFamilyDoc =
        serde_json::from_str(json).map_err(|e| TopoError::InvalidFamily(format!("bad cycle document: {e}")))?;
    let docs = match any {
        AnyFamilyDoc::Full(d) => d.cycles,
        AnyFamilyDoc::Cycles(c) => c,
        AnyFamilyDoc::Edges(e) => e.into_iter().map(|edges| CycleDoc { edges, sides: None }).collect(),
    };
    family_from_docs(g, &docs)
}

pub fn family_from_docs(g: &TorusGraph, docs: &[CycleDoc]) -> Result<CycleFamily, TopoError> {
    let mut cycles = Vec::with_capacity(docs.len());
    for doc in docs {
        // sides refer to the order given in the document
        let c = check_topological(g, &doc.edges)?;
        if let Some(sides) = &doc.sides {
            let given = walk_sides(g, &doc.edges)?;
            if sides.len() != given.len() {
                return Err(TopoError::SideMismatch(sides.len().min(given.len())));
            }
            if let Some(i) = (0..sides.len()).find(|&i| sides[i] != given[i]) {
                return Err(TopoError::SideMismatch(i));
            }
        }
        cycles.push(c);
    }
    validate_family(g, cycles)
}

fn walk_sides(g: &TorusGraph, edges: &[usize]) -> Result<Vec<Side>, TopoError> {
    Ok(walk(g, edges)?
        .into_iter()
        .map(|(d_in, d_out)| if side_arcs(g, d_in, d_out).1.is_empty() { Side::Up } else { Side::Down })
        .collect())
}

/// Checks edge-disjointness and homology, and measures the residual degrees.
pub fn validate_family(g: &TorusGraph, cycles: Vec<TopoCycle>) -> Result<CycleFamily, TopoError> {
    if cycles.is_empty() {
        return Err(TopoError::InvalidFamily("empty family".into()));
    }
    let mut used = g.empty_edge_set();
    for (i, c) in cycles.iter().enumerate() {
        let s = c.edge_set(g);
        if used.and_count(&s) > 0 {
            return Err(TopoError::InvalidFamily(format!("cycle {i} shares edges with an earlier cycle")));
        }
        used.xor_assign(&s);
        if i > 0 && !g.is_contractible(&s.xor(&cycles[0].edge_set(g)))? {
            return Err(TopoError::InvalidFamily(format!("cycle {i} is not homologous to cycle 0")));
        }
    }
    let residual_vertex_degree = (0..g.num_vertices())
        .map(|v| g.rotation(v).iter().filter(|&&d| !used.get(g.edge_of(d))).count())
        .max()
        .unwrap_or(0);
    let residual_face_degree =
        (0..g.num_faces()).map(|f| g.face(f).iter().filter(|&&d| !used.get(g.edge_of(d))).count()).max().unwrap_or(0);
    Ok(CycleFamily { cycles, residual_vertex_degree, residual_face_degree })
}

/// Edge walks of the translated families on the generated lattices.
fn constructive_walks(g: &TorusGraph) -> Option<Vec<Vec<usize>>> {
    let legend = g.legend()?;
    let kind: LatticeKind = legend.kind.parse().ok()?;
    let (lx, ly) = (legend.lx, legend.ly);
    if g.num_edges() != lx * ly * kind.edges_per_cell() {
        return None;
    }
    let e = |x: i64, y: i64, k: usize| cell_edge(kind, lx, x, ly, y, k);
    let (lxi, lyi) = (lx as i64, ly as i64);
    match kind {
        // zigzag between rows y and y+1
        LatticeKind::Triangular => {
            Some((0..lyi).map(|y| (0..lxi).flat_map(|x| [e(x, y, 1), e(x + 1, y, 2)]).collect()).collect())
        }
        // staircases: right, up, right, up, ...
        LatticeKind::Square => {
            let gcd = gcd(lx, ly);
            let steps = lx / gcd * ly;
            Some(
                (0..gcd as i64)
                    .map(|t| (0..steps as i64).flat_map(|k| [e(t + k, k, 0), e(t + k + 1, k, 1)]).collect())
                    .collect(),
            )
        }
        LatticeKind::SquareOctagon if lx % 2 == 0 => Some(
            (0..lyi)
                .map(|y| {
                    (0..lxi)
                        .flat_map(|x| {
                            if x % 2 == 0 {
                                [e(x, y, 0), e(x, y, 1), e(x, y, 4)]
                            } else {
                                [e(x, y, 3), e(x, y, 2), e(x, y, 4)]
                            }
                        })
                        .collect()
                })
                .collect(),
        ),
        _ => None,
    }
}

/// Straight lines along the first lattice direction on the kagome lattice.
fn constructive_obstructions(g: &TorusGraph) -> Option<Vec<Obstruction>> {
    let legend = g.legend()?;
    let kind: LatticeKind = legend.kind.parse().ok()?;
    if kind != LatticeKind::Kagome || g.num_edges() != legend.lx * legend.ly * kind.edges_per_cell() {
        return None;
    }
    let (lx, ly) = (legend.lx, legend.ly);
    let mut out = Vec::new();
    for y in 0..ly as i64 {
        let edges: Vec<usize> =
            (0..lx as i64).flat_map(|x| [cell_edge(kind, lx, x, ly, y, 0), cell_edge(kind, lx, x, ly, y, 3)]).collect();
        let vertices = two_sided_vertices(g, &edges).ok()?;
        out.push(Obstruction { edges, vertices });
    }
    Some(out)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Vertices of the closed walk with off-walk edges on both sides.
pub fn two_sided_vertices(g: &TorusGraph, edges: &[usize]) -> Result<Vec<usize>, TopoError> {
    Ok(walk(g, edges)?
        .into_iter()
        .filter(|&(d_in, d_out)| {
            let (up, down) = side_arcs(g, d_in, d_out);
            !up.is_empty() && !down.is_empty()
        })
        .map(|(d_in, _)| g.vertex_of(d_in))
        .collect())
}

/// Finds a family of parallel topological cycles.
///
/// Generated lattices use their translated seed cycle. Other graphs get a
/// bounded search over turning walks; the largest edge-disjoint homologous
/// set wins, preferring one-dimensional residuals. On failure the error lists
/// cycles that become topological after splitting their two-sided vertices.
pub fn find_family(g: &TorusGraph) -> Result<CycleFamily, TopoError> {
    if let Some(walks) = constructive_walks(g) {
        let cycles: Result<Vec<_>, _> = walks.iter().map(|w| check_topological(g, w)).collect();
        if let Ok(fam) = cycles.and_then(|c| validate_family(g, c)) {
            return Ok(fam);
        }
    }
    if let Some(obstructions) = constructive_obstructions(g) {
        return Err(TopoError::NoFamily { obstructions });
    }
    let candidates = turning_cycles(g, SEARCH_BUDGET);
    if let Some(fam) = best_family(g, candidates) {
        return Ok(fam);
    }
    Err(TopoError::NoFamily { obstructions: search_obstructions(g, SEARCH_BUDGET) })
}

/// Homology key: parities against a basis of the dual cycle space.
fn homology_key(dual_cycles: &[BitVec], s: &EdgeSet) -> Vec<bool> {
    dual_cycles.iter().map(|d| d.dot(s)).collect()
}

/// Every topological cycle reachable by walks that hug one side at each step.
fn turning_cycles(g: &TorusGraph, budget: usize) -> Vec<TopoCycle> {
    let mut found = BTreeMap::new();
    let mut steps = 0usize;
    for start in 0..g.num_darts() {
        let min_edge = g.edge_of(start);
        let v0 = g.vertex_of(start);
        let mut visited = vec![false; g.num_vertices()];
        visited[v0] = true;
        let mut path = vec![start];
        dfs_turning(g, min_edge, v0, &mut visited, &mut path, &mut found, &mut steps, budget);
        if steps >= budget {
            break;
        }
    }
    found.into_values().collect()
}

#[allow(clippy::too_many_arguments)]
fn dfs_turning(
    g: &TorusGraph,
    min_edge: usize,
    v0: usize,
    visited: &mut [bool],
    path: &mut Vec<usize>,
    found: &mut BTreeMap<Vec<usize>, TopoCycle>,
    steps: &mut usize,
    budget: usize,
) {
    *steps += 1;
    if *steps >= budget {
        return;
    }
    let arrive = g.alpha(*path.last().unwrap());
    let w = g.vertex_of(arrive);
    if w == v0 {
        let first = path[0];
        if (first == g.sigma(arrive) || first == g.sigma_inv(arrive)) && path.len() % 2 == 0 {
            let edges: Vec<usize> = path.iter().map(|&d| g.edge_of(d)).collect();
            let mut key = edges.clone();
            key.sort_unstable();
            if !found.contains_key(&key) {
                if let Ok(c) = check_topological(g, &edges) {
                    found.insert(key, c);
                }
            }
        }
        return;
    }
    if visited[w] {
        return;
    }
    visited[w] = true;
    let mut nexts = vec![g.sigma(arrive), g.sigma_inv(arrive)];
    nexts.dedup();
    for d in nexts {
        if g.edge_of(d) <= min_edge && d != path[0] {
            continue;
        }
        path.push(d);
        dfs_turning(g, min_edge, v0, visited, path, found, steps, budget);
        path.pop();
    }
    visited[w] = false;
}

fn best_family(g: &TorusGraph, candidates: Vec<TopoCycle>) -> Option<CycleFamily> {
    let dual_cycles = g.face_incidence().null_space();
    let mut classes: BTreeMap<Vec<bool>, Vec<TopoCycle>> = BTreeMap::new();
    for c in candidates {
        let key = homology_key(&dual_cycles, &c.edge_set(g));
        classes.entry(key).or_default().push(c);
    }
    let mut best: Option<CycleFamily> = None;
    for (_, mut cands) in classes {
        cands.sort_by(|a, b| (a.len(), &a.edges).cmp(&(b.len(), &b.edges)));
        let sets: Vec<EdgeSet> = cands.iter().map(|c| c.edge_set(g)).collect();
        let mut chosen = Vec::new();
        let mut best_pick = Vec::new();
        let mut steps = 0;
        max_disjoint(&sets, 0, &mut g.empty_edge_set(), &mut chosen, &mut best_pick, &mut steps);
        let picked: Vec<TopoCycle> = best_pick.iter().map(|&i| cands[i].clone()).collect();
        let Ok(fam) = validate_family(g, picked) else { continue };
        let better = match &best {
            None => true,
            Some(b) => (fam.len(), fam.one_dimensional()) > (b.len(), b.one_dimensional()),
        };
        if better {
            best = Some(fam);
        }
    }
    best
}

fn max_disjoint(
    sets: &[EdgeSet],
    from: usize,
    used: &mut EdgeSet,
    chosen: &mut Vec<usize>,
    best: &mut Vec<usize>,
    steps: &mut usize,
) {
    *steps += 1;
    if chosen.len() > best.len() {
        *best = chosen.clone();
    }
    if *steps > 100_000 || chosen.len() + (sets.len() - from) <= best.len() {
        return;
    }
    for i in from..sets.len() {
        if used.and_count(&sets[i]) == 0 {
            used.xor_assign(&sets[i]);
            chosen.push(i);
            max_disjoint(sets, i + 1, used, chosen, best, steps);
            chosen.pop();
            used.xor_assign(&sets[i]);
        }
    }
}

/// Non-contractible simple cycles that a sequence of vertex splits turns
/// into topological cycles. The best such cycle comes first, followed by
/// vertex-disjoint homologous ones.
fn search_obstructions(g: &TorusGraph, budget: usize) -> Vec<Obstruction> {
    let mut cycles: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut steps = 0usize;
    for start in 0..g.num_darts() {
        let v0 = g.vertex_of(start);
        let mut visited = vec![false; g.num_vertices()];
        visited[v0] = true;
        let mut path = vec![start];
        dfs_simple(g, g.edge_of(start), v0, &mut visited, &mut path, &mut cycles, &mut steps, budget);
        if steps >= budget {
            break;
        }
    }
    let mut fixable: Vec<Obstruction> = Vec::new();
    for walk_edges in cycles.into_values() {
        let set = g.edge_set(walk_edges.iter().copied());
        if g.is_contractible(&set) != Ok(false) {
            continue;
        }
        let Ok(vertices) = two_sided_vertices(g, &walk_edges) else { continue };
        if vertices.is_empty() {
            continue;
        }
        if er_fixable(g, &walk_edges, &vertices) {
            fixable.push(Obstruction { edges: walk_edges, vertices });
        }
    }
    fixable
        .sort_by(|a, b| (a.vertices.len(), a.edges.len(), &a.edges).cmp(&(b.vertices.len(), b.edges.len(), &b.edges)));
    let Some(first) = fixable.first().cloned() else { return Vec::new() };
    let dual_cycles = g.face_incidence().null_space();
    let class = homology_key(&dual_cycles, &g.edge_set(first.edges.iter().copied()));
    let mut used_vertices: BTreeSet<usize> = walk_vertices(g, &first.edges).into_iter().collect();
    let mut out = vec![first];
    for ob in fixable.into_iter().skip(1) {
        let verts = walk_vertices(g, &ob.edges);
        if verts.iter().any(|v| used_vertices.contains(v)) {
            continue;
        }
        if homology_key(&dual_cycles, &g.edge_set(ob.edges.iter().copied())) != class {
            continue;
        }
        used_vertices.extend(verts);
        out.push(ob);
    }
    out
}

fn walk_vertices(g: &TorusGraph, edges: &[usize]) -> Vec<usize> {
    walk(g, edges).map(|w| w.iter().map(|&(d, _)| g.vertex_of(d)).collect()).unwrap_or_default()
}

#[allow(clippy::too_many_arguments)]
fn dfs_simple(
    g: &TorusGraph,
    min_edge: usize,
    v0: usize,
    visited: &mut [bool],
    path: &mut Vec<usize>,
    found: &mut BTreeMap<Vec<usize>, Vec<usize>>,
    steps: &mut usize,
    budget: usize,
) {
    *steps += 1;
    if *steps >= budget {
        return;
    }
    let arrive = g.alpha(*path.last().unwrap());
    let w = g.vertex_of(arrive);
    if w == v0 {
        let edges: Vec<usize> = path.iter().map(|&d| g.edge_of(d)).collect();
        let mut key = edges.clone();
        key.sort_unstable();
        found.entry(key).or_insert_with(|| canonical_order(&edges));
        return;
    }
    if visited[w] {
        return;
    }
    visited[w] = true;
    for &d in g.rotation(w) {
        if d == arrive || g.edge_of(d) <= min_edge {
            continue;
        }
        path.push(d);
        dfs_simple(g, min_edge, v0, visited, path, found, steps, budget);
        path.pop();
    }
    visited[w] = false;
}

/// Arcs used to split `v` on the walk: the incoming dart with the right side,
/// and the outgoing dart with the left side.
fn split_arcs(g: &TorusGraph, d_in: usize, d_out: usize) -> (Vec<usize>, Vec<usize>) {
    let (up, down) = side_arcs(g, d_in, d_out);
    let mut arc1 = vec![d_in];
    arc1.extend(down);
    let mut arc2 = vec![d_out];
    arc2.extend(up);
    (arc1, arc2)
}

fn er_fixable(g: &TorusGraph, edges: &[usize], vertices: &[usize]) -> bool {
    let mut g = g.clone();
    let mut edges = edges.to_vec();
    for &v in vertices {
        match split_on_walk(&g, &edges, v) {
            Ok((h, new_edges, _, _)) => {
                g = h;
                edges = new_edges;
            }
            Err(_) => return false,
        }
    }
    check_topological(&g, &edges).is_ok()
}

/// Splits `v` on the walk, returning the new graph, the walk with the new
/// edge inserted, the split record and the first arc.
fn split_on_walk(
    g: &TorusGraph,
    edges: &[usize],
    v: usize,
) -> Result<(TorusGraph, Vec<usize>, SplitRecord, Vec<usize>), TopoError> {
    let darts = walk(g, edges)?;
    let i = darts.iter().position(|&(d, _)| g.vertex_of(d) == v).ok_or(TopoError::NotOnCycle(v))?;
    let (d_in, d_out) = darts[i];
    let (arc1, arc2) = split_arcs(g, d_in, d_out);
    if arc1.len() < 2 || arc2.len() < 2 {
        return Err(TopoError::NotTwoSided(v));
    }
    let (h, rec) = g.split_vertex(v, &arc1, &arc2)?;
    let mut new_edges = edges.to_vec();
    new_edges.insert(i + 1, rec.new_edge);
    Ok((h, new_edges, rec, arc1))
}

/// Edges appearing an odd number of times among `darts`.
fn odd_edges(g: &TorusGraph, darts: &[usize]) -> Vec<usize> {
    let mut s = g.empty_edge_set();
    for &d in darts {
        s.flip(g.edge_of(d));
    }
    s.iter_ones().collect()
}

/// Dual cycle to pair with `edges` so that, after splitting `vertices`, the
/// `Z` string lands on the resulting topological cycle: the walk with every
/// split vertex's first-arc star removed.
pub fn er_dual_partner(g: &TorusGraph, edges: &[usize], vertices: &[usize]) -> Result<EdgeSet, TopoError> {
    let darts = walk(g, edges)?;
    let mut d = g.edge_set(edges.iter().copied());
    for &v in vertices {
        let &(d_in, d_out) = darts.iter().find(|&&(x, _)| g.vertex_of(x) == v).ok_or(TopoError::NotOnCycle(v))?;
        let (arc1, _) = split_arcs(g, d_in, d_out);
        for e in odd_edges(g, &arc1) {
            d.flip(e);
        }
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaPattern {
    /// Ancilla in |0>, CNOT from each first-arc edge onto it.
    ZFirstArc,
    ZSecondArc,
    /// Ancilla in |+>, CNOT from it onto each first-arc edge.
    XFirstArc,
    XSecondArc,
}

impl AncillaPattern {
    pub const SEARCH_ORDER: [AncillaPattern; 4] =
        [AncillaPattern::ZFirstArc, AncillaPattern::ZSecondArc, AncillaPattern::XFirstArc, AncillaPattern::XSecondArc];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStep {
    pub vertex: usize,
    pub split: SplitRecord,
    pub pattern: AncillaPattern,
    pub ancilla: usize,
    pub ancilla_init: String,
    /// `(control, target)` in application order.
    pub cnots: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct ErOutcome {
    /// Toric code built fresh on the split graph.
    pub state: ToricCodeState,
    /// Input group carried through the ancillas and CNOTs.
    pub evolved: StabilizerGroup,
    pub cycle: TopoCycle,
    pub steps: Vec<SplitStep>,
}

fn apply_pattern(
    group: &StabilizerGroup,
    n_new: usize,
    ancilla: usize,
    pattern: AncillaPattern,
    arc_edges: (&[usize], &[usize]),
) -> (StabilizerGroup, String, Vec<(usize, usize)>) {
    let (first, second) = arc_edges;
    let (init, edges) = match pattern {
        AncillaPattern::ZFirstArc => (Pauli::Z, first),
        AncillaPattern::ZSecondArc => (Pauli::Z, second),
        AncillaPattern::XFirstArc => (Pauli::X, first),
        AncillaPattern::XSecondArc => (Pauli::X, second),
    };
    let cnots: Vec<(usize, usize)> = match init {
        Pauli::Z => edges.iter().map(|&e| (e, ancilla)).collect(),
        _ => edges.iter().map(|&e| (ancilla, e)).collect(),
    };
    let seed = PauliWord::single(n_new, ancilla, init);
    let mut words: Vec<PauliWord> = group.generators().iter().map(|w| w.extended(n_new)).collect();
    words.push(seed.clone());
    for &(c, t) in &cnots {
        for w in words.iter_mut() {
            *w = cnot_word(w, c, t);
        }
    }
    let g = make_group(n_new, words).expect("Clifford conjugation preserves a valid group");
    (g, seed.to_string(), cnots)
}

/// Splits each obstruction vertex on `edges`, adds the new edge qubit as an
/// ancilla, and entangles it with one side. The first ancilla pattern (in
/// [`AncillaPattern::SEARCH_ORDER`]) whose result equals the toric code on
/// the split graph is kept.
pub fn make_topological(
    state: &ToricCodeState,
    edges: &[usize],
    obstructions: &[usize],
) -> Result<ErOutcome, TopoError> {
    let mut g = state.graph.clone();
    let mut group = state.group.clone();
    let mut primal = state.primal_cycle.clone();
    let mut dual = state.dual_cycle.clone();
    let mut walk_edges = edges.to_vec();
    let mut current = state.clone();
    let mut steps = Vec::new();
    for &v in obstructions {
        let (h, new_walk, rec, arc1) = split_on_walk(&g, &walk_edges, v)?;
        let n_new = h.num_edges();
        let arc2: Vec<usize> = g.rotation(v).iter().copied().filter(|d| !arc1.contains(d)).collect();
        let first = odd_edges(&g, &arc1);
        let second = odd_edges(&g, &arc2);
        let mut new_primal = primal.extended(n_new);
        if arc1.iter().filter(|&&d| primal.get(g.edge_of(d))).count() % 2 == 1 {
            new_primal.set(rec.new_edge, true);
        }
        let new_dual = dual.extended(n_new);
        let target = toric_code_state(&h, &new_primal, &new_dual)?;
        let mut accepted = None;
        for pattern in AncillaPattern::SEARCH_ORDER {
            let (out, init, cnots) = apply_pattern(&group, n_new, rec.new_edge, pattern, (&first, &second));
            if groups_equal(&out, &target.group) {
                accepted = Some((out, pattern, init, cnots));
                break;
            }
        }
        let (out, pattern, init, cnots) = accepted.ok_or(TopoError::Postcondition(v))?;
        steps.push(SplitStep {
            vertex: v,
            split: rec.clone(),
            pattern,
            ancilla: rec.new_edge,
            ancilla_init: init,
            cnots,
        });
        g = h;
        group = out;
        primal = new_primal;
        dual = new_dual;
        walk_edges = new_walk;
        current = target;
    }
    let cycle = check_topological(&g, &walk_edges)?;
    Ok(ErOutcome { state: current, evolved: group, cycle, steps })
}

/// Toric code state and cycle family ready for disentangling.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub state: ToricCodeState,
    pub family: CycleFamily,
    /// Vertex splits performed, empty when the graph already had a family.
    pub splits: Vec<SplitStep>,
}

/// State with both strings on the first family cycle.
pub fn state_on_family(g: &TorusGraph, family: &CycleFamily) -> Result<ToricCodeState, TopoError> {
    let c = family.cycles[0].edge_set(g);
    Ok(toric_code_state(g, &c, &c)?)
}

/// Finds a family, falling back to vertex splits along the obstructions.
pub fn prepare(g: &TorusGraph) -> Result<Prepared, TopoError> {
    match find_family(g) {
        Ok(family) => Ok(Prepared { state: state_on_family(g, &family)?, family, splits: Vec::new() }),
        Err(TopoError::NoFamily { obstructions }) if !obstructions.is_empty() => renormalize(g, &obstructions),
        Err(e) => Err(e),
    }
}

/// Applies [`make_topological`] along every obstruction cycle in turn.
pub fn renormalize(g: &TorusGraph, obstructions: &[Obstruction]) -> Result<Prepared, TopoError> {
    let first = &obstructions[0];
    let primal = g.edge_set(first.edges.iter().copied());
    let dual = er_dual_partner(g, &first.edges, &first.vertices)?;
    let mut state = toric_code_state(g, &primal, &dual)?;
    let mut splits = Vec::new();
    let mut walks = Vec::new();
    for ob in obstructions {
        let out = make_topological(&state, &ob.edges, &ob.vertices)?;
        state = out.state;
        splits.extend(out.steps);
        walks.push(out.cycle.edges);
    }
    let g2 = state.graph.clone();
    let cycles = walks.iter().map(|w| check_topological(&g2, w)).collect::<Result<Vec<_>, _>>()?;
    let family = validate_family(&g2, cycles)?;
    Ok(Prepared { state, family, splits })
}
