//! Torus-embedded graphs as combinatorial maps.
//!
//! A map is a set of darts (half-edges) with two permutations: `alpha` pairs
//! the two darts of an edge and `sigma` lists the darts around each vertex in
//! counterclockwise order. Faces are the orbits of `phi = sigma . alpha`, i.e.
//! `phi(d) = sigma(alpha(d))`: arrive at a vertex along `d` and leave along
//! the next dart counterclockwise. With this convention the face containing
//! `sigma(d)` is the one sitting in the corner between `d` and `sigma(d)`.
//!
//! Faces are numbered in order of their smallest dart. Vertex and edge ids
//! come from the input.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::gf2::BitMatrix;

pub const SCHEMA_VERSION: u32 = 1;

/// Edge subset as a bit vector over edge ids.
pub type EdgeSet = BitVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph document: {0}")]
    Malformed(String),
    #[error("alpha is not a fixed-point-free involution at dart {0}")]
    BadAlpha(usize),
    #[error("sigma is not a permutation")]
    BadSigma,
    #[error("sigma moves dart {0} to another vertex")]
    SigmaCrossesVertex(usize),
    #[error("darts of vertex {0} form more than one rotation cycle")]
    SplitRotation(usize),
    #[error("ids are not contiguous: {0}")]
    NonContiguousIds(String),
    #[error("not a torus embedding: V - E + F = {0}")]
    NotTorus(i64),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("dual graph is disconnected")]
    DualDisconnected,
    #[error("edge set is not a cycle")]
    NotACycle,
    #[error("invalid homology basis: {0}")]
    InvalidBasis(String),
    #[error("lattice size must be at least 1x1, got {0}x{1}")]
    SizeTooSmall(usize, usize),
    #[error("invalid vertex split: {0}")]
    InvalidSplit(String),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
}

/// Human-readable description of a generated lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Legend {
    pub kind: String,
    pub lx: usize,
    pub ly: usize,
    pub positions: Vec<[f64; 2]>,
}

/// JSON form of a graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub darts: usize,
    pub alpha: Vec<usize>,
    pub sigma: Vec<usize>,
    pub vertex_of: Vec<usize>,
    pub edge_of: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legend: Option<Legend>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusGraph {
    alpha: Vec<usize>,
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    vertex_of: Vec<usize>,
    edge_of: Vec<usize>,
    face_of: Vec<usize>,
    faces: Vec<Vec<usize>>,
    rotations: Vec<Vec<usize>>,
    edge_darts: Vec<[usize; 2]>,
    legend: Option<Legend>,
}

/// Bookkeeping returned by [`TorusGraph::split_vertex`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    /// Vertex that keeps the first arc (same id as before).
    pub kept_vertex: usize,
    /// Newly created vertex holding the second arc.
    pub new_vertex: usize,
    /// Id of the new edge; old edges keep their ids.
    pub new_edge: usize,
    /// New dart at the kept vertex and at the new vertex.
    pub new_darts: [usize; 2],
}

impl TorusGraph {
    pub fn from_parts(
        alpha: Vec<usize>,
        sigma: Vec<usize>,
        vertex_of: Vec<usize>,
        edge_of: Vec<usize>,
        legend: Option<Legend>,
    ) -> Result<Self, GraphError> {
        let nd = alpha.len();
        if nd == 0 || nd % 2 != 0 {
            return Err(GraphError::Malformed(format!("dart count {nd} must be even and positive")));
        }
        if sigma.len() != nd || vertex_of.len() != nd || edge_of.len() != nd {
            return Err(GraphError::Malformed("array lengths differ".into()));
        }
        for d in 0..nd {
            let a = alpha[d];
            if a >= nd || a == d || alpha[a] != d {
                return Err(GraphError::BadAlpha(d));
            }
            if edge_of[a] != edge_of[d] {
                return Err(GraphError::BadAlpha(d));
            }
        }
        let ne = nd / 2;
        let mut edge_darts = vec![[usize::MAX; 2]; ne];
        for d in 0..nd {
            let e = edge_of[d];
            if e >= ne {
                return Err(GraphError::NonContiguousIds(format!("edge id {e} with {ne} edges")));
            }
            let slot = if edge_darts[e][0] == usize::MAX { 0 } else { 1 };
            if slot == 1 && edge_darts[e][1] != usize::MAX {
                return Err(GraphError::Malformed(format!("edge {e} has more than two darts")));
            }
            edge_darts[e][slot] = d;
        }
        if edge_darts.iter().any(|p| p[1] == usize::MAX) {
            return Err(GraphError::NonContiguousIds("edge ids".into()));
        }
        let mut seen = vec![false; nd];
        for &s in &sigma {
            if s >= nd || seen[s] {
                return Err(GraphError::BadSigma);
            }
            seen[s] = true;
        }
        let mut sigma_inv = vec![0; nd];
        for d in 0..nd {
            sigma_inv[sigma[d]] = d;
            if vertex_of[sigma[d]] != vertex_of[d] {
                return Err(GraphError::SigmaCrossesVertex(d));
            }
        }
        let nv = vertex_of.iter().max().map_or(0, |m| m + 1);
        let mut rotations: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for d in 0..nd {
            let v = vertex_of[d];
            if rotations[v].is_empty() {
                let mut cur = d;
                loop {
                    rotations[v].push(cur);
                    cur = sigma[cur];
                    if cur == d {
                        break;
                    }
                }
            }
        }
        let mut count = vec![0usize; nv];
        for &v in &vertex_of {
            count[v] += 1;
        }
        for v in 0..nv {
            if count[v] == 0 {
                return Err(GraphError::NonContiguousIds(format!("vertex {v} has no darts")));
            }
            if rotations[v].len() != count[v] {
                return Err(GraphError::SplitRotation(v));
            }
        }
        let mut face_of = vec![usize::MAX; nd];
        let mut faces = Vec::new();
        for d in 0..nd {
            if face_of[d] != usize::MAX {
                continue;
            }
            let f = faces.len();
            let mut orbit = Vec::new();
            let mut cur = d;
            while face_of[cur] == usize::MAX {
                face_of[cur] = f;
                orbit.push(cur);
                cur = sigma[alpha[cur]];
            }
            faces.push(orbit);
        }
        let euler = nv as i64 - ne as i64 + faces.len() as i64;
        if euler != 0 {
            return Err(GraphError::NotTorus(euler));
        }
        let g =
            TorusGraph { alpha, sigma, sigma_inv, vertex_of, edge_of, face_of, faces, rotations, edge_darts, legend };
        if !connected(g.num_vertices(), (0..ne).map(|e| g.edge_endpoints(e))) {
            return Err(GraphError::Disconnected);
        }
        if !connected(g.num_faces(), (0..ne).map(|e| g.edge_faces(e))) {
            return Err(GraphError::DualDisconnected);
        }
        Ok(g)
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self, GraphError> {
        if doc.darts != doc.alpha.len() {
            return Err(GraphError::Malformed(format!(
                "darts = {} but alpha has {} entries",
                doc.darts,
                doc.alpha.len()
            )));
        }
        Self::from_parts(
            doc.alpha.clone(),
            doc.sigma.clone(),
            doc.vertex_of.clone(),
            doc.edge_of.clone(),
            doc.legend.clone(),
        )
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            schema_version: SCHEMA_VERSION,
            darts: self.num_darts(),
            alpha: self.alpha.clone(),
            sigma: self.sigma.clone(),
            vertex_of: self.vertex_of.clone(),
            edge_of: self.edge_of.clone(),
            legend: self.legend.clone(),
        }
    }

    pub fn legend(&self) -> Option<&Legend> {
        self.legend.as_ref()
    }

    pub fn without_legend(&self) -> TorusGraph {
        let mut g = self.clone();
        g.legend = None;
        g
    }

    pub fn num_darts(&self) -> usize {
        self.alpha.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_darts.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.rotations.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn alpha(&self, d: usize) -> usize {
        self.alpha[d]
    }

    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }

    pub fn sigma_inv(&self, d: usize) -> usize {
        self.sigma_inv[d]
    }

    /// Face permutation `sigma(alpha(d))`.
    pub fn phi(&self, d: usize) -> usize {
        self.sigma[self.alpha[d]]
    }

    pub fn vertex_of(&self, d: usize) -> usize {
        self.vertex_of[d]
    }

    pub fn edge_of(&self, d: usize) -> usize {
        self.edge_of[d]
    }

    pub fn face_of(&self, d: usize) -> usize {
        self.face_of[d]
    }

    /// Darts around `v`, counterclockwise, starting from the smallest.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotations[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotations[v].len()
    }

    /// Darts of face `f` in boundary order.
    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn edge_darts(&self, e: usize) -> [usize; 2] {
        self.edge_darts[e]
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edge_darts[e];
        (self.vertex_of[a], self.vertex_of[b])
    }

    /// The faces on the two sides of `e`.
    pub fn edge_faces(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edge_darts[e];
        (self.face_of[a], self.face_of[b])
    }

    /// Face in the corner between `d` and `sigma(d)`.
    pub fn corner_face(&self, d: usize) -> usize {
        self.face_of[self.sigma[d]]
    }

    pub fn empty_edge_set(&self) -> EdgeSet {
        BitVec::zeros(self.num_edges())
    }

    pub fn edge_set<I: IntoIterator<Item = usize>>(&self, edges: I) -> EdgeSet {
        let mut s = self.empty_edge_set();
        for e in edges {
            s.set(e, true);
        }
        s
    }

    /// Edges meeting `v` an odd number of times (loops drop out).
    pub fn star(&self, v: usize) -> EdgeSet {
        let mut s = self.empty_edge_set();
        for &d in &self.rotations[v] {
            s.flip(self.edge_of[d]);
        }
        s
    }

    /// Edges on the boundary of `f` an odd number of times.
    pub fn face_boundary(&self, f: usize) -> EdgeSet {
        let mut s = self.empty_edge_set();
        for &d in &self.faces[f] {
            s.flip(self.edge_of[d]);
        }
        s
    }

    pub fn vertex_incidence(&self) -> BitMatrix {
        BitMatrix::from_rows(self.num_edges(), (0..self.num_vertices()).map(|v| self.star(v)).collect())
    }

    pub fn face_incidence(&self) -> BitMatrix {
        BitMatrix::from_rows(self.num_edges(), (0..self.num_faces()).map(|f| self.face_boundary(f)).collect())
    }

    /// Every vertex meets an even number of darts of `s`.
    pub fn is_cycle(&self, s: &EdgeSet) -> bool {
        (0..self.num_vertices()).all(|v| !self.star(v).dot(s))
    }

    /// Every face contains an even number of darts of `s`.
    pub fn is_dual_cycle(&self, s: &EdgeSet) -> bool {
        (0..self.num_faces()).all(|f| !self.face_boundary(f).dot(s))
    }

    /// True iff the cycle `s` is a sum of face boundaries.
    pub fn is_contractible(&self, s: &EdgeSet) -> Result<bool, GraphError> {
        if !self.is_cycle(s) {
            return Err(GraphError::NotACycle);
        }
        Ok(self.face_incidence().eliminate().in_span(s))
    }

    /// True iff the dual cycle `s` is a sum of vertex stars.
    pub fn is_dual_contractible(&self, s: &EdgeSet) -> Result<bool, GraphError> {
        if !self.is_dual_cycle(s) {
            return Err(GraphError::NotACycle);
        }
        Ok(self.vertex_incidence().eliminate().in_span(s))
    }

    /// Coordinates of a cycle over `basis`, read off by intersection parity
    /// with dual cycles `d1`, `d2` chosen so that `basis[i] . d_j = [i == j]`.
    pub fn homology_class(&self, s: &EdgeSet, basis: [&EdgeSet; 2]) -> Result<(bool, bool), GraphError> {
        if !self.is_cycle(s) {
            return Err(GraphError::NotACycle);
        }
        let [d1, d2] = self.dual_partners(basis)?;
        Ok((s.dot(&d1), s.dot(&d2)))
    }

    fn dual_partners(&self, basis: [&EdgeSet; 2]) -> Result<[EdgeSet; 2], GraphError> {
        for b in basis {
            if b.len() != self.num_edges() || !self.is_cycle(b) {
                return Err(GraphError::InvalidBasis("basis element is not a cycle".into()));
            }
        }
        let dual_cycles = self.face_incidence().null_space();
        // Solve for combinations y with (y.b1, y.b2) = (1,0) and (0,1).
        let mut pairing = BitMatrix::new(2);
        for y in &dual_cycles {
            pairing.push_row(BitVec::from_bools(&[y.dot(basis[0]), y.dot(basis[1])]));
        }
        let elim = pairing.eliminate();
        let mut out = Vec::with_capacity(2);
        for target in [[true, false], [false, true]] {
            let combo = elim
                .solve(&BitVec::from_bools(&target))
                .ok_or_else(|| GraphError::InvalidBasis("basis cycles are contractible or dependent".into()))?;
            let mut d = self.empty_edge_set();
            for i in combo.iter_ones() {
                d.xor_assign(&dual_cycles[i]);
            }
            out.push(d);
        }
        Ok([out[0].clone(), out[1].clone()])
    }

    /// Dual map: faces become vertices, edge ids are preserved.
    ///
    /// Its rotation is `phi`, so its face permutation is `phi . alpha = sigma`
    /// and taking the dual twice gives back the same darts and rotation.
    pub fn dual_graph(&self) -> TorusGraph {
        let sigma: Vec<usize> = (0..self.num_darts()).map(|d| self.phi(d)).collect();
        TorusGraph::from_parts(self.alpha.clone(), sigma, self.face_of.clone(), self.edge_of.clone(), None)
            .expect("dual of a valid torus map is valid")
    }

    /// Splits `v` into two vertices joined by a new edge.
    ///
    /// `arc1` and `arc2` are the darts of `v` in counterclockwise order,
    /// together covering the rotation. `v` keeps `arc1`; a new vertex takes
    /// `arc2`. New darts are appended after the existing ones.
    pub fn split_vertex(
        &self,
        v: usize,
        arc1: &[usize],
        arc2: &[usize],
    ) -> Result<(TorusGraph, SplitRecord), GraphError> {
        if v >= self.num_vertices() {
            return Err(GraphError::VertexOutOfRange(v));
        }
        if arc1.is_empty() || arc2.is_empty() {
            return Err(GraphError::InvalidSplit("arcs must be nonempty".into()));
        }
        if arc1.len() + arc2.len() != self.degree(v) {
            return Err(GraphError::InvalidSplit("arcs do not cover the rotation".into()));
        }
        let chain: Vec<usize> = arc1.iter().chain(arc2).copied().collect();
        for (k, &d) in chain.iter().enumerate() {
            if d >= self.num_darts() || self.vertex_of[d] != v {
                return Err(GraphError::InvalidSplit(format!("dart {d} is not at vertex {v}")));
            }
            if self.sigma[d] != chain[(k + 1) % chain.len()] {
                return Err(GraphError::InvalidSplit("arcs are not contiguous in rotation order".into()));
            }
        }
        let nd = self.num_darts();
        let (da, db) = (nd, nd + 1);
        let new_edge = self.num_edges();
        let new_vertex = self.num_vertices();
        let mut alpha = self.alpha.clone();
        alpha.extend([db, da]);
        let mut sigma = self.sigma.clone();
        sigma.extend([0, 0]);
        let mut vertex_of = self.vertex_of.clone();
        vertex_of.extend([v, new_vertex]);
        let mut edge_of = self.edge_of.clone();
        edge_of.extend([new_edge, new_edge]);
        sigma[*arc1.last().unwrap()] = da;
        sigma[da] = arc1[0];
        sigma[*arc2.last().unwrap()] = db;
        sigma[db] = arc2[0];
        for &d in arc2 {
            vertex_of[d] = new_vertex;
        }
        let g = TorusGraph::from_parts(alpha, sigma, vertex_of, edge_of, None)?;
        Ok((g, SplitRecord { kept_vertex: v, new_vertex, new_edge, new_darts: [da, db] }))
    }

    /// Shortest closed walk with an odd number of edges in `parity`, as an
    /// ordered edge list. Ties go to the lexicographically smallest edge list.
    ///
    /// A shortest such walk is always a simple cycle; since contractible
    /// cycles meet every dual cycle evenly, choosing `parity` to be a
    /// non-contractible dual cycle yields a non-contractible cycle.
    pub fn shortest_odd_cycle(&self, parity: &EdgeSet) -> Option<Vec<usize>> {
        let nv = self.num_vertices();
        let mut best: Option<Vec<usize>> = None;
        for e in 0..self.num_edges() {
            let (u, w) = self.edge_endpoints(e);
            let goal = (w, !parity.get(e));
            // BFS over (vertex, parity) avoiding edge e
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; 2 * nv];
            let idx = |v: usize, p: bool| 2 * v + p as usize;
            let start = idx(u, false);
            let mut seen = vec![false; 2 * nv];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(s) = queue.pop_front() {
                if s == idx(goal.0, goal.1) {
                    break;
                }
                let v = s / 2;
                let p = s % 2 == 1;
                for &d in &self.rotations[v] {
                    let f = self.edge_of[d];
                    if f == e {
                        continue;
                    }
                    let t = idx(self.vertex_of[self.alpha[d]], p ^ parity.get(f));
                    if !seen[t] {
                        seen[t] = true;
                        prev[t] = Some((s, f));
                        queue.push_back(t);
                    }
                }
            }
            let end = idx(goal.0, goal.1);
            if !seen[end] {
                continue;
            }
            let mut path = vec![e];
            let mut cur = end;
            while let Some((p, f)) = prev[cur] {
                path.push(f);
                cur = p;
            }
            let better = match &best {
                None => true,
                Some(b) => path.len() < b.len() || (path.len() == b.len() && sorted(&path) < sorted(b)),
            };
            if better {
                best = Some(path);
            }
        }
        best
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

fn connected<I: Iterator<Item = (usize, usize)>>(n: usize, edges: I) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut parts = n;
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            parts -= 1;
        }
    }
    parts == 1
}
