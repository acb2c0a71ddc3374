//! Periodic lattices built from a unit cell.
//!
//! Vertex `i` of cell `(x, y)` gets id `(y * lx + x) * nv + i`; edge `k` of
//! that cell gets id `(y * lx + x) * ne + k`. Edge `e` owns darts `2e` (tail)
//! and `2e + 1` (head). Rotations come from the planar angles of the drawn
//! unit cell.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphError, Legend, TorusGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Square,
    Triangular,
    Kagome,
    SquareOctagon,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 4] =
        [LatticeKind::Square, LatticeKind::Triangular, LatticeKind::Kagome, LatticeKind::SquareOctagon];

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Square => "square",
            LatticeKind::Triangular => "triangular",
            LatticeKind::Kagome => "kagome",
            LatticeKind::SquareOctagon => "square_octagon",
        }
    }

    fn cell(self) -> UnitCell {
        let h = 3f64.sqrt() / 2.0;
        match self {
            LatticeKind::Square => UnitCell {
                basis: [[1.0, 0.0], [0.0, 1.0]],
                sites: vec![[0.0, 0.0]],
                edges: vec![(0, 0, 1, 0), (0, 0, 0, 1)],
            },
            // drawn on the square grid with one diagonal per plaquette
            LatticeKind::Triangular => UnitCell {
                basis: [[1.0, 0.0], [0.0, 1.0]],
                sites: vec![[0.0, 0.0]],
                edges: vec![(0, 0, 1, 0), (0, 0, 1, 1), (0, 0, 0, 1)],
            },
            LatticeKind::Kagome => UnitCell {
                basis: [[1.0, 0.0], [0.5, h]],
                sites: vec![[0.0, 0.0], [0.5, 0.0], [0.25, h / 2.0]],
                edges: vec![(0, 1, 0, 0), (1, 2, 0, 0), (2, 0, 0, 0), (1, 0, 1, 0), (0, 2, 0, -1), (1, 2, 1, -1)],
            },
            LatticeKind::SquareOctagon => UnitCell {
                basis: [[1.0, 0.0], [0.0, 1.0]],
                sites: vec![[0.3, 0.5], [0.5, 0.3], [0.7, 0.5], [0.5, 0.7]],
                edges: vec![(0, 1, 0, 0), (1, 2, 0, 0), (2, 3, 0, 0), (3, 0, 0, 0), (2, 0, 1, 0), (3, 1, 0, 1)],
            },
        }
    }

    pub fn vertices_per_cell(self) -> usize {
        self.cell().sites.len()
    }

    pub fn edges_per_cell(self) -> usize {
        self.cell().edges.len()
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "square" => Ok(LatticeKind::Square),
            "triangular" => Ok(LatticeKind::Triangular),
            "kagome" => Ok(LatticeKind::Kagome),
            "square_octagon" => Ok(LatticeKind::SquareOctagon),
            other => Err(format!("unknown lattice kind '{other}'")),
        }
    }
}

struct UnitCell {
    basis: [[f64; 2]; 2],
    sites: Vec<[f64; 2]>,
    /// (tail site, head site, head cell dx, head cell dy)
    edges: Vec<(usize, usize, i64, i64)>,
}

/// Id of edge `k` in cell `(x, y)`, coordinates taken periodically.
pub fn cell_edge(kind: LatticeKind, lx: usize, x: i64, ly: usize, y: i64, k: usize) -> usize {
    let (x, y) = (x.rem_euclid(lx as i64) as usize, y.rem_euclid(ly as i64) as usize);
    (y * lx + x) * kind.edges_per_cell() + k
}

/// Id of site `i` in cell `(x, y)`, coordinates taken periodically.
pub fn cell_vertex(kind: LatticeKind, lx: usize, x: i64, ly: usize, y: i64, i: usize) -> usize {
    let (x, y) = (x.rem_euclid(lx as i64) as usize, y.rem_euclid(ly as i64) as usize);
    (y * lx + x) * kind.vertices_per_cell() + i
}

pub fn build_lattice(kind: LatticeKind, lx: usize, ly: usize) -> Result<TorusGraph, GraphError> {
    if lx == 0 || ly == 0 {
        return Err(GraphError::SizeTooSmall(lx, ly));
    }
    let cell = kind.cell();
    let (nv, nce) = (cell.sites.len(), cell.edges.len());
    let ncell = lx * ly;
    let pos = |x: i64, y: i64, i: usize| -> [f64; 2] {
        let [a1, a2] = cell.basis;
        let s = cell.sites[i];
        [x as f64 * a1[0] + y as f64 * a2[0] + s[0], x as f64 * a1[1] + y as f64 * a2[1] + s[1]]
    };
    let ne = ncell * nce;
    let nd = 2 * ne;
    let mut vertex_of = vec![0; nd];
    let mut edge_of = vec![0; nd];
    let mut angle = vec![0.0f64; nd];
    for y in 0..ly as i64 {
        for x in 0..lx as i64 {
            for (k, &(u, v, dx, dy)) in cell.edges.iter().enumerate() {
                let e = cell_edge(kind, lx, x, ly, y, k);
                let (t, h) = (2 * e, 2 * e + 1);
                vertex_of[t] = cell_vertex(kind, lx, x, ly, y, u);
                vertex_of[h] = cell_vertex(kind, lx, x + dx, ly, y + dy, v);
                edge_of[t] = e;
                edge_of[h] = e;
                let (p, q) = (pos(x, y, u), pos(x + dx, y + dy, v));
                let (vx, vy) = (q[0] - p[0], q[1] - p[1]);
                angle[t] = vy.atan2(vx).rem_euclid(2.0 * PI);
                angle[h] = (-vy).atan2(-vx).rem_euclid(2.0 * PI);
            }
        }
    }
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); ncell * nv];
    for d in 0..nd {
        at[vertex_of[d]].push(d);
    }
    let mut sigma = vec![0; nd];
    for darts in &mut at {
        darts.sort_by(|&a, &b| angle[a].total_cmp(&angle[b]));
        for w in 0..darts.len() {
            sigma[darts[w]] = darts[(w + 1) % darts.len()];
        }
    }
    let alpha = (0..nd).map(|d| d ^ 1).collect();
    let mut positions = vec![[0.0; 2]; ncell * nv];
    for y in 0..ly as i64 {
        for x in 0..lx as i64 {
            for i in 0..nv {
                positions[cell_vertex(kind, lx, x, ly, y, i)] = pos(x, y, i);
            }
        }
    }
    let legend = Legend { kind: kind.name().to_string(), lx, ly, positions };
    TorusGraph::from_parts(alpha, sigma, vertex_of, edge_of, Some(legend))
}
