//! Checks that a disentangled state is a product of ladders.
//!
//! Each support component of the output is compared with a ladder read off
//! the graph: its qubits become the edges of a ladder graph whose vertices
//! are the faces of the torus graph. An off-family edge joins its two faces,
//! and a GHZ qubit joins the two faces at its vertex on its own color side.
//! X-type cells are the stars of that ladder graph, Z-type cells come from
//! the torus vertices, and `Z` along the top leg fixes the state.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::dense::{self, DenseError, MAX_DENSE_QUBITS};
use crate::ghz::{Color, Disentangled, QubitRole};
use crate::graph::{TorusGraph, SCHEMA_VERSION};
use crate::ladder::{bottom_qubit, ladder_group, rung_qubit, top_qubit, CellKind, LadderCell, LadderLayout};
use crate::pauli::PauliWord;
use crate::stabilizer::{
    entanglement_entropy, groups_equal, mutual_information, support_components, Membership, StabilizerGroup,
};
use crate::topo::CycleFamily;

/// Largest entropy allowed across a contiguous cut of an output ladder.
pub const MAX_LADDER_CUT_ENTROPY: u32 = 2;

/// Amplitude tolerance for the dense comparisons.
pub const DENSE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub qubits: Vec<usize>,
    pub generators: Vec<String>,
    /// `(chain, color)` of the GHZ legs, top leg first.
    pub legs: Vec<(usize, Color)>,
    /// "square_ladder" when the square ladder bijection succeeded, otherwise
    /// "graph_ladder" or "none".
    pub reference: String,
    /// Reference qubit for each entry of `qubits`.
    pub bijection: Vec<usize>,
    pub rungs: usize,
    pub ladder_equal: bool,
    pub square_ladder_equal: bool,
    pub max_cut_entropy: u32,
    pub tz_string: String,
    pub tz_member: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub qubits: usize,
    pub tensor_product_equal: bool,
    pub basis_change_equal: bool,
    pub tensor_product_deviation: f64,
    pub basis_change_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub component_count: bool,
    pub ladders: bool,
    pub mutual_information_zero: bool,
    pub signs_positive: bool,
    pub tz_strings: bool,
    pub cut_entropy_bounded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        self.component_count
            && self.ladders
            && self.mutual_information_zero
            && self.signs_positive
            && self.tz_strings
            && self.cut_entropy_bounded
            && self.oracle.unwrap_or(true)
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.component_count, "component_count"),
            (self.ladders, "ladders"),
            (self.mutual_information_zero, "mutual_information_zero"),
            (self.signs_positive, "signs_positive"),
            (self.tz_strings, "tz_strings"),
            (self.cut_entropy_bounded, "cut_entropy_bounded"),
            (self.oracle.unwrap_or(true), "oracle"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisentangleReport {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    pub num_qubits: usize,
    pub num_cycles: usize,
    pub relabeling: Vec<QubitRole>,
    pub generators: Vec<String>,
    pub components: Vec<ComponentReport>,
    pub mutual_information: Vec<Vec<u32>>,
    pub preimage_mutual_information: Vec<Vec<u32>>,
    pub adjacent_pairs: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub verdicts: Verdicts,
}

/// Ladder graph edge for every qubit of the component, as a pair of faces.
fn ladder_edges(g: &TorusGraph, d: &Disentangled, qubits: &[usize]) -> Vec<(usize, usize)> {
    qubits
        .iter()
        .map(|&q| match d.roles[q] {
            QubitRole::Fixed => g.edge_faces(q),
            QubitRole::Ghz { chain, position, color } => {
                let (d_in, d_out) = d.chains[chain].cycle.darts[position];
                match color {
                    Color::Green => (g.face_of(g.sigma(d_out)), g.face_of(d_in)),
                    Color::Blue => (g.face_of(g.sigma(d_in)), g.face_of(d_out)),
                }
            }
        })
        .collect()
}

struct Layout {
    legs: Vec<(usize, Color)>,
    top: Vec<usize>,
    bottom: Vec<usize>,
    rungs: Vec<usize>,
}

/// Splits component qubits into the two GHZ legs and the rest, each leg in
/// chain order. Local indices.
fn layout(d: &Disentangled, qubits: &[usize]) -> Layout {
    let mut legs: BTreeMap<(usize, Color), Vec<(usize, usize)>> = BTreeMap::new();
    let mut rungs = Vec::new();
    for (i, &q) in qubits.iter().enumerate() {
        match d.roles[q] {
            QubitRole::Ghz { chain, position, color } => legs.entry((chain, color)).or_default().push((position, i)),
            QubitRole::Fixed => rungs.push(i),
        }
    }
    let mut keys: Vec<(usize, Color)> = legs.keys().copied().collect();
    keys.sort();
    let leg = |k: Option<&(usize, Color)>| -> Vec<usize> {
        k.map(|k| {
            let mut v = legs[k].clone();
            v.sort();
            v.into_iter().map(|(_, i)| i).collect()
        })
        .unwrap_or_default()
    };
    Layout { top: leg(keys.first()), bottom: leg(keys.get(1)), rungs, legs: keys }
}

fn graph_reference(
    g: &TorusGraph,
    family: &CycleFamily,
    d: &Disentangled,
    qubits: &[usize],
    top: &[usize],
) -> Option<LadderLayout> {
    let k = qubits.len();
    let local: BTreeMap<usize, usize> = qubits.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let edges = ladder_edges(g, d, qubits);
    let mut stars: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for f in [a, b] {
            let s = stars.entry(f).or_default();
            if !s.remove(&i) {
                s.insert(i);
            }
        }
    }
    let mut cells: Vec<LadderCell> = stars
        .into_values()
        .filter(|s| !s.is_empty())
        .map(|s| LadderCell { kind: CellKind::X, qubits: s.into_iter().collect() })
        .collect();
    let on_family = family.edge_set(g);
    for v in 0..g.num_vertices() {
        let mut qs: BTreeSet<usize> = g.star(v).iter_ones().filter(|&e| !on_family.get(e)).collect();
        for c in &d.chains {
            for (i, &w) in c.cycle.vertices.iter().enumerate() {
                if w == v {
                    qs.insert(c.qubit(i));
                }
            }
        }
        if qs.is_empty() || !qs.iter().all(|q| local.contains_key(q)) {
            continue;
        }
        cells.push(LadderCell { kind: CellKind::Z, qubits: qs.iter().map(|q| local[q]).collect() });
    }
    LadderLayout::from_cells(k, cells, top.to_vec(), None).ok()
}

/// Tries to match the component with the square ladder: top leg in chain
/// order, rungs found from the X-type vertex cells, bottom leg aligned by
/// the first rotation or reflection that makes the groups equal.
fn square_match(group: &StabilizerGroup, lay: &Layout) -> Option<(Vec<usize>, usize)> {
    let r = lay.top.len();
    if r < 2 || lay.bottom.len() != r || lay.rungs.len() != r {
        return None;
    }
    let k = 3 * r;
    let reference = ladder_group(r).ok()?;
    let oracle = group.membership_oracle();
    let mut rung_at = Vec::with_capacity(r);
    for j in 0..r {
        let t_prev = lay.top[(j + r - 1) % r];
        let t_cur = lay.top[j];
        let q = lay.rungs.iter().copied().find(|&q| {
            oracle.check(&PauliWord::x_string(k, [q, t_prev, t_cur])) == Membership::Member && !rung_at.contains(&q)
        })?;
        rung_at.push(q);
    }
    for reflect in [false, true] {
        for shift in 0..r {
            let mut map = vec![usize::MAX; k];
            for j in 0..r {
                map[lay.top[j]] = top_qubit(j);
                map[rung_at[j]] = rung_qubit(j);
                let b = if reflect { (shift + r - j) % r } else { (shift + j) % r };
                map[lay.bottom[b]] = bottom_qubit(j);
            }
            if let Ok(mapped) = group.relabeled(&map) {
                if groups_equal(&mapped, &reference.group) {
                    return Some((map, r));
                }
            }
        }
    }
    None
}

/// Largest entropy of a contiguous stretch of the ladder, given the stretch
/// index (0..r) of every qubit. Windows are cyclic and proper.
fn max_window_entropy(group: &StabilizerGroup, slot: &[usize], r: usize) -> u32 {
    let mut best = 0;
    for s in 0..r {
        for w in 1..r {
            let window: BTreeSet<usize> = (s..s + w).map(|j| j % r).collect();
            let region: Vec<usize> = (0..slot.len()).filter(|&i| window.contains(&slot[i])).collect();
            if region.is_empty() || region.len() == slot.len() {
                continue;
            }
            best = best.max(entanglement_entropy(group, &region).expect("component group is a state"));
        }
    }
    best
}

/// Stretch index of each qubit read off the ladder graph.
///
/// Top-leg link `j` gets index `j`. The other qubits take the index of the
/// nearest top link by breadth-first search over shared ladder vertices,
/// seeded in leg order.
fn graph_slots(g: &TorusGraph, d: &Disentangled, qubits: &[usize], top: &[usize]) -> Vec<usize> {
    let edges = ladder_edges(g, d, qubits);
    let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        at.entry(a).or_default().push(i);
        if b != a {
            at.entry(b).or_default().push(i);
        }
    }
    let mut slot = vec![usize::MAX; edges.len()];
    let mut queue = VecDeque::new();
    for (j, &t) in top.iter().enumerate() {
        slot[t] = j;
        queue.push_back(t);
    }
    while let Some(i) = queue.pop_front() {
        let (a, b) = edges[i];
        for f in [a, b] {
            for &k in &at[&f] {
                if slot[k] == usize::MAX {
                    slot[k] = slot[i];
                    queue.push_back(k);
                }
            }
        }
    }
    slot
}

fn component_report(
    g: &TorusGraph,
    family: &CycleFamily,
    d: &Disentangled,
    qubits: &[usize],
    gens: &[usize],
) -> ComponentReport {
    let k = qubits.len();
    let group = d.output.restricted(qubits, gens).expect("support component is closed");
    let lay = layout(d, qubits);
    let tz = PauliWord::z_string(k, lay.top.iter().copied());
    let tz_member = !lay.top.is_empty() && group.is_member(&tz) == Membership::Member;
    let graph_ref = graph_reference(g, family, d, qubits, &lay.top);
    let graph_equal = graph_ref.as_ref().is_some_and(|l| groups_equal(&group, &l.group));
    let square = square_match(&group, &lay);
    let (reference, bijection) = match (&square, graph_equal) {
        (Some((map, _)), _) => ("square_ladder", map.clone()),
        (None, true) => ("graph_ladder", (0..k).collect()),
        (None, false) => ("none", Vec::new()),
    };
    let r = lay.top.len();
    let max_cut_entropy = match &square {
        _ if !group.is_state() || r < 2 => 0,
        // cell j of the square ladder holds rung j and the two links after it
        Some((map, _)) => max_window_entropy(&group, &map.iter().map(|&m| m / 3).collect::<Vec<_>>(), r),
        None => max_window_entropy(&group, &graph_slots(g, d, qubits, &lay.top), r),
    };
    ComponentReport {
        qubits: qubits.to_vec(),
        generators: group.generators().iter().map(|w| w.to_string()).collect(),
        legs: lay.legs.clone(),
        reference: reference.to_string(),
        bijection,
        rungs: lay.top.len(),
        ladder_equal: graph_equal || square.is_some(),
        square_ladder_equal: square.is_some(),
        max_cut_entropy,
        tz_string: tz.relabeled(qubits, d.num_qubits()).to_string(),
        tz_member,
    }
}

/// Dense checks: the output state is the product of its components and the
/// GHZ basis change of the input state.
pub fn oracle_check(d: &Disentangled) -> Result<OracleReport, DenseError> {
    let n = d.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(DenseError::TooLarge(n));
    }
    let out = dense::dense_statevector(&d.output)?;
    let mut parts = Vec::new();
    for c in support_components(&d.output) {
        let sub = d.output.restricted(&c.qubits, &c.generators).map_err(|_| DenseError::Inconsistent)?;
        parts.push((c.qubits.clone(), dense::dense_statevector(&sub)?));
    }
    let product = dense::tensor_product(n, &parts);
    let mut changed = dense::dense_statevector(&d.input)?;
    for c in &d.chains {
        changed = dense::apply_ghz_change(&changed, n, c.qubits());
    }
    let dev = |a: &[num_complex::Complex64], b: &[num_complex::Complex64]| {
        dense::max_abs_diff(&dense::phase_normalized(a), &dense::phase_normalized(b))
    };
    Ok(OracleReport {
        qubits: n,
        tensor_product_equal: dense::equal_up_to_phase(&out, &product, DENSE_TOLERANCE),
        basis_change_equal: dense::equal_up_to_phase(&out, &changed, DENSE_TOLERANCE),
        tensor_product_deviation: dev(&out, &product),
        basis_change_deviation: dev(&out, &changed),
    })
}

/// Builds the full report. With `oracle` set, the dense checks run when the
/// instance has at most [`MAX_DENSE_QUBITS`] qubits.
pub fn verify_ladders(g: &TorusGraph, family: &CycleFamily, d: &Disentangled, oracle: bool) -> DisentangleReport {
    let comps = support_components(&d.output);
    let components: Vec<ComponentReport> =
        comps.iter().map(|c| component_report(g, family, d, &c.qubits, &c.generators)).collect();
    let m = comps.len();
    let mut mi = vec![vec![0; m]; m];
    let mut pre = vec![vec![0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (&comps[i].qubits, &comps[j].qubits);
            mi[i][j] = mutual_information(&d.output, a, b).expect("disjoint regions");
            pre[i][j] = mutual_information(&d.input, a, b).expect("disjoint regions");
            mi[j][i] = mi[i][j];
            pre[j][i] = pre[i][j];
        }
    }
    let mut adjacent_pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let ci: BTreeSet<usize> = components[i].legs.iter().map(|l| l.0).collect();
            if components[j].legs.iter().any(|l| ci.contains(&l.0)) {
                adjacent_pairs.push((i, j));
            }
        }
    }
    let oracle = (oracle && d.num_qubits() <= MAX_DENSE_QUBITS).then(|| oracle_check(d).ok()).flatten();
    let verdicts = Verdicts {
        component_count: m == family.len(),
        ladders: components.iter().all(|c| c.ladder_equal),
        mutual_information_zero: mi.iter().flatten().all(|&x| x == 0),
        signs_positive: d.signs_positive(),
        tz_strings: components.iter().all(|c| c.tz_member),
        cut_entropy_bounded: components.iter().all(|c| c.max_cut_entropy <= MAX_LADDER_CUT_ENTROPY),
        oracle: oracle.as_ref().map(|o| o.tensor_product_equal && o.basis_change_equal),
    };
    DisentangleReport {
        schema_version: SCHEMA_VERSION,
        lattice: g.legend().map(|l| format!("{} {}x{}", l.kind, l.lx, l.ly)),
        num_qubits: d.num_qubits(),
        num_cycles: family.len(),
        relabeling: d.roles.clone(),
        generators: d.output.generators().iter().map(|w| w.to_string()).collect(),
        components,
        mutual_information: mi,
        preimage_mutual_information: pre,
        adjacent_pairs,
        oracle,
        verdicts,
    }
}
