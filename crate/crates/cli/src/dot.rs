//! Graphviz output. Multi-edges and loops are kept; every edge is labelled
//! with its id so it can be matched against region and cycle files.

use std::fmt::Write;

use toricghz::{CycleFamily, TorusGraph};

const PALETTE: [&str; 6] = ["red", "blue", "darkgreen", "orange", "purple", "brown"];

fn cycle_of(g: &TorusGraph, family: Option<&CycleFamily>) -> Vec<Option<usize>> {
    let mut of = vec![None; g.num_edges()];
    if let Some(f) = family {
        for (i, c) in f.cycles.iter().enumerate() {
            for &e in &c.edges {
                of[e] = Some(i);
            }
        }
    }
    of
}

fn edge_attrs(e: usize, cycle: Option<usize>) -> String {
    match cycle {
        Some(i) => {
            format!("label=\"e{e}\", color=\"{}\", penwidth=2.5, class=\"cycle{i}\"", PALETTE[i % PALETTE.len()])
        }
        None => format!("label=\"e{e}\""),
    }
}

pub fn render(g: &TorusGraph, family: Option<&CycleFamily>, dual: bool) -> String {
    let of = cycle_of(g, family);
    let mut s = String::new();
    writeln!(s, "graph primal {{").unwrap();
    writeln!(s, "  node [shape=circle, fontsize=10];").unwrap();
    let positions = g.legend().map(|l| l.positions.clone());
    for v in 0..g.num_vertices() {
        match positions.as_ref().and_then(|p| p.get(v)) {
            Some([x, y]) => writeln!(s, "  v{v} [pos=\"{:.4},{:.4}!\"];", 2.0 * x, 2.0 * y).unwrap(),
            None => writeln!(s, "  v{v};").unwrap(),
        }
    }
    for e in 0..g.num_edges() {
        let (a, b) = g.edge_endpoints(e);
        writeln!(s, "  v{a} -- v{b} [{}];", edge_attrs(e, of[e])).unwrap();
    }
    writeln!(s, "}}").unwrap();
    if dual {
        writeln!(s, "graph dual {{").unwrap();
        writeln!(s, "  node [shape=box, fontsize=10];").unwrap();
        for f in 0..g.num_faces() {
            writeln!(s, "  f{f};").unwrap();
        }
        for e in 0..g.num_edges() {
            let (a, b) = g.edge_faces(e);
            writeln!(s, "  f{a} -- f{b} [{}];", edge_attrs(e, of[e])).unwrap();
        }
        writeln!(s, "}}").unwrap();
    }
    s
}
