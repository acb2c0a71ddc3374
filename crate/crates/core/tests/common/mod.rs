//! Random small embeddings that still carry a cycle family.
//!
//! A base lattice is prepared (family search or vertex splits), then
//! perturbed by vertex splits and face splits away from the family. Moves
//! that break the family are rejected.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;
use toricghz::topo::{state_on_family, validate_family};
use toricghz::*;

pub struct Embedding {
    pub graph: TorusGraph,
    pub family: CycleFamily,
    pub label: String,
}

fn random_arcs<R: Rng>(rot: &[usize], rng: &mut R) -> Option<(Vec<usize>, Vec<usize>)> {
    let k = rot.len();
    if k < 2 {
        return None;
    }
    let s = rng.gen_range(0..k);
    let cut = rng.gen_range(1..k);
    let ordered: Vec<usize> = (0..k).map(|i| rot[(s + i) % k]).collect();
    Some((ordered[..cut].to_vec(), ordered[cut..].to_vec()))
}

fn refamily(g: &TorusGraph, family: &CycleFamily) -> Option<CycleFamily> {
    let cycles = family.cycles.iter().map(|c| check_topological(g, &c.edges)).collect::<Result<Vec<_>, _>>().ok()?;
    validate_family(g, cycles).ok()
}

fn on_family(family: &CycleFamily, v: usize) -> bool {
    family.cycles.iter().any(|c| c.vertices.contains(&v))
}

/// One vertex split at an off-family vertex.
fn split_off_family<R: Rng>(g: &TorusGraph, family: &CycleFamily, rng: &mut R) -> Option<TorusGraph> {
    let free: Vec<usize> = (0..g.num_vertices()).filter(|&v| !on_family(family, v) && g.degree(v) >= 2).collect();
    let &v = free.choose(rng)?;
    let (a1, a2) = random_arcs(g.rotation(v), rng)?;
    g.split_vertex(v, &a1, &a2).ok().map(|(h, _)| h)
}

/// One face split, done as a vertex split of the dual.
fn split_face<R: Rng>(g: &TorusGraph, rng: &mut R) -> Option<TorusGraph> {
    let dual = g.dual_graph();
    let f = rng.gen_range(0..dual.num_vertices());
    let (a1, a2) = random_arcs(dual.rotation(f), rng)?;
    let (h, _) = dual.split_vertex(f, &a1, &a2).ok()?;
    Some(h.dual_graph())
}

fn prepared_base(kind: LatticeKind, lx: usize, ly: usize) -> Option<(TorusGraph, CycleFamily)> {
    type Cache = Mutex<HashMap<(LatticeKind, usize, usize), Option<(TorusGraph, CycleFamily)>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(kind, lx, ly)) {
        return hit.clone();
    }
    let built = build_lattice(kind, lx, ly)
        .ok()
        .and_then(|g| prepare(&g).ok())
        .map(|p| (p.state.graph.without_legend(), p.family));
    cache.lock().unwrap().insert((kind, lx, ly), built.clone());
    built
}

pub fn random_embedding<R: Rng>(rng: &mut R) -> Embedding {
    let kinds = [LatticeKind::Square, LatticeKind::Triangular, LatticeKind::SquareOctagon, LatticeKind::Kagome];
    loop {
        let kind = *kinds.choose(rng).unwrap();
        let (lx, ly) = match kind {
            LatticeKind::Kagome => (1, 2),
            _ => (rng.gen_range(2..=3), rng.gen_range(2..=3)),
        };
        let Some((mut g, mut family)) = prepared_base(kind, lx, ly) else { continue };
        let moves = rng.gen_range(0..=4);
        for _ in 0..moves {
            let cand = if rng.gen_bool(0.5) { split_off_family(&g, &family, rng) } else { split_face(&g, rng) };
            if let Some(h) = cand {
                if let Some(f) = refamily(&h, &family) {
                    g = h;
                    family = f;
                }
            }
        }
        return Embedding { graph: g, family, label: format!("{kind} {lx}x{ly} +{moves} moves") };
    }
}

/// Checks the structural invariants on one embedding.
pub fn check_invariants<R: Rng>(e: &Embedding, rng: &mut R) -> Result<(), String> {
    let g = &e.graph;
    let euler = g.num_vertices() as i64 - g.num_edges() as i64 + g.num_faces() as i64;
    if euler != 0 {
        return Err(format!("euler characteristic {euler}"));
    }
    let dd = g.dual_graph().dual_graph();
    if (0..g.num_darts()).any(|d| dd.sigma(d) != g.sigma(d) || dd.alpha(d) != g.alpha(d)) {
        return Err("dual of dual differs".into());
    }
    let dual = g.dual_graph();
    let ne = g.num_edges();
    for _ in 0..8 {
        let s = BitVec::from_bools(&(0..ne).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        if g.is_cycle(&s) != dual.is_dual_cycle(&s) || g.is_dual_cycle(&s) != dual.is_cycle(&s) {
            return Err("dual does not swap cycles and dual cycles".into());
        }
    }

    let state = state_on_family(g, &e.family).map_err(|x| x.to_string())?;
    let d = disentangle(&state, &e.family).map_err(|x| x.to_string())?;
    let input = d.input.generators();
    let exact = d.exact.generators();
    for i in 0..input.len() {
        for j in i + 1..input.len() {
            if input[i].anticommutes(&input[j]) != exact[i].anticommutes(&exact[j]) {
                return Err(format!("commutation changed for generators {i}, {j}"));
            }
        }
    }
    let ops: Vec<PauliWord> = (0..g.num_vertices())
        .map(|v| toricghz::toric::vertex_operator(g, v))
        .chain((0..g.num_faces()).map(|f| toricghz::toric::plaquette_operator(g, f)))
        .collect();
    let imgs: Vec<&PauliWord> = d.vertex_images.iter().chain(&d.plaquette_images).collect();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if ops[i].anticommutes(&ops[j]) != imgs[i].anticommutes(imgs[j]) {
                return Err(format!("rewrite changed commutation of operators {i}, {j}"));
            }
        }
    }
    let n = g.num_edges();
    if d.output.len() != n || d.exact.len() != n || !d.output.is_state() || !groups_equal(&d.output, &d.exact) {
        return Err("rank not preserved".into());
    }
    for group in [&d.input, &d.output] {
        for _ in 0..4 {
            let a: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            let b: Vec<usize> = (0..n).filter(|q| !a.contains(q)).collect();
            let sa = entanglement_entropy(group, &a).map_err(|x| x.to_string())?;
            let sb = entanglement_entropy(group, &b).map_err(|x| x.to_string())?;
            if sa != sb {
                return Err(format!("impure: S_A={sa} S_B={sb}"));
            }
        }
    }
    for c in &e.family.cycles {
        let s = c.edge_set(g);
        for f in 0..g.num_faces() {
            let k = g.face(f).iter().filter(|&&dt| s.get(g.edge_of(dt))).count();
            if k != 0 && k != 2 {
                return Err(format!("face {f} holds {k} cycle darts"));
            }
        }
    }
    Ok(())
}
