//! Stabilizer groups given by independent commuting generators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitVec;
use crate::gf2::{BitMatrix, Elimination, IncrementalBasis};
use crate::pauli::{PauliError, PauliWord, PhasedPauli};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilizerError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("generator {index} acts on {found} qubits, expected {expected}")]
    WrongLength { index: usize, found: usize, expected: usize },
    #[error("generators {first} and {second} anticommute")]
    AntiCommuting { first: usize, second: usize },
    #[error("generators {0:?} multiply to the identity")]
    Dependent(Vec<usize>),
    #[error("generators {0:?} multiply to minus the identity")]
    ContainsMinusIdentity(Vec<usize>),
    #[error("{count} generators exceed {n} qubits")]
    TooManyGenerators { count: usize, n: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("operation needs a state group, got {count} generators on {n} qubits")]
    NotStateGroup { count: usize, n: usize },
    #[error("regions overlap on qubit {0}")]
    OverlappingRegions(usize),
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Member,
    MemberWithWrongSign,
    NotMember,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliWord>,
}

/// Serialized form `{ "n": .., "generators": ["+X1Z2", ..] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub n: usize,
    pub generators: Vec<String>,
}

/// Multiplies commuting words left to right.
pub fn product<'a, I: IntoIterator<Item = &'a PauliWord>>(n: usize, words: I) -> Result<PauliWord, PauliError> {
    let mut acc = PhasedPauli::identity(n);
    for w in words {
        if w.n() != n {
            return Err(PauliError::LengthMismatch { left: n, right: w.n() });
        }
        acc.mul_assign(&PhasedPauli::from_word(w));
    }
    acc.to_word()
}

/// Validates and wraps a generator list.
pub fn make_group(n: usize, gens: Vec<PauliWord>) -> Result<StabilizerGroup, StabilizerError> {
    for (i, g) in gens.iter().enumerate() {
        if g.n() != n {
            return Err(StabilizerError::WrongLength { index: i, found: g.n(), expected: n });
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if gens[i].anticommutes(&gens[j]) {
                return Err(StabilizerError::AntiCommuting { first: i, second: j });
            }
        }
    }
    let rows = BitMatrix::from_rows(2 * n, gens.iter().map(PauliWord::symplectic_row).collect());
    if let Some(dep) = rows.dependency() {
        let idx: Vec<usize> = dep.iter_ones().collect();
        let p = product(n, idx.iter().map(|&i| &gens[i]))?;
        return Err(if p.is_negative() {
            StabilizerError::ContainsMinusIdentity(idx)
        } else {
            StabilizerError::Dependent(idx)
        });
    }
    if gens.len() > n {
        return Err(StabilizerError::TooManyGenerators { count: gens.len(), n });
    }
    Ok(StabilizerGroup { n, generators: gens })
}

impl StabilizerGroup {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliWord] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_state(&self) -> bool {
        self.generators.len() == self.n
    }

    pub fn into_generators(self) -> Vec<PauliWord> {
        self.generators
    }

    fn rows(&self) -> BitMatrix {
        BitMatrix::from_rows(2 * self.n, self.generators.iter().map(PauliWord::symplectic_row).collect())
    }

    /// Precomputes elimination for repeated membership queries.
    pub fn membership_oracle(&self) -> MembershipOracle<'_> {
        MembershipOracle { group: self, elim: self.rows().eliminate() }
    }

    pub fn is_member(&self, p: &PauliWord) -> Membership {
        self.membership_oracle().check(p)
    }

    /// The group element with the same bits as `p`, with its actual sign.
    pub fn member_like(&self, p: &PauliWord) -> Option<PauliWord> {
        self.membership_oracle().element(p)
    }

    pub fn to_doc(&self) -> GroupDoc {
        GroupDoc { n: self.n, generators: self.generators.iter().map(|g| g.to_string()).collect() }
    }

    pub fn from_doc(doc: &GroupDoc) -> Result<Self, StabilizerError> {
        let gens = doc.generators.iter().map(|s| PauliWord::parse(s, doc.n)).collect::<Result<Vec<_>, _>>()?;
        make_group(doc.n, gens)
    }

    /// Subgroup on `qubits` (renumbered in the given order) from generators
    /// `gens`, which must be supported inside `qubits`.
    pub fn restricted(&self, qubits: &[usize], gens: &[usize]) -> Result<StabilizerGroup, StabilizerError> {
        let mut inside = BitVec::zeros(self.n);
        for &q in qubits {
            inside.set(q, true);
        }
        let mut words = Vec::with_capacity(gens.len());
        for &i in gens {
            let g = &self.generators[i];
            if let Some(q) = g.support().iter_ones().find(|&q| !inside.get(q)) {
                return Err(StabilizerError::QubitOutOfRange { qubit: q, n: qubits.len() });
            }
            words.push(g.restricted(qubits));
        }
        make_group(qubits.len(), words)
    }

    /// Same group with qubit `q` moved to `map[q]`.
    pub fn relabeled(&self, map: &[usize]) -> Result<StabilizerGroup, StabilizerError> {
        make_group(self.n, self.generators.iter().map(|g| g.relabeled(map, self.n)).collect())
    }

    /// Adds identity qubits at the end and extra generators.
    pub fn extended(&self, new_n: usize, extra: Vec<PauliWord>) -> Result<StabilizerGroup, StabilizerError> {
        let mut gens: Vec<PauliWord> = self.generators.iter().map(|g| g.extended(new_n)).collect();
        gens.extend(extra);
        make_group(new_n, gens)
    }

    fn check_region(&self, region: &[usize]) -> Result<BitVec, StabilizerError> {
        let mut mask = BitVec::zeros(self.n);
        for &q in region {
            if q >= self.n {
                return Err(StabilizerError::QubitOutOfRange { qubit: q, n: self.n });
            }
            mask.set(q, true);
        }
        Ok(mask)
    }
}

pub struct MembershipOracle<'a> {
    group: &'a StabilizerGroup,
    elim: Elimination,
}

impl MembershipOracle<'_> {
    pub fn element(&self, p: &PauliWord) -> Option<PauliWord> {
        let n = self.group.n;
        if p.n() != n {
            return None;
        }
        let combo = self.elim.solve(&p.symplectic_row())?;
        let w = product(n, combo.iter_ones().map(|i| &self.group.generators[i]))
            .expect("elements of an abelian group multiply to Hermitian words");
        Some(w)
    }

    pub fn check(&self, p: &PauliWord) -> Membership {
        match self.element(p) {
            None => Membership::NotMember,
            Some(w) if w.is_negative() == p.is_negative() => Membership::Member,
            Some(_) => Membership::MemberWithWrongSign,
        }
    }

    pub fn contains_bits(&self, p: &PauliWord) -> bool {
        self.elim.in_span(&p.symplectic_row())
    }
}

/// True iff both groups have equal size and every generator of `a` lies in `b`
/// with the right sign.
pub fn groups_equal(a: &StabilizerGroup, b: &StabilizerGroup) -> bool {
    if a.n != b.n || a.len() != b.len() {
        return false;
    }
    let oracle = b.membership_oracle();
    a.generators.iter().all(|g| oracle.check(g) == Membership::Member)
}

/// Conjugates every generator by CNOT(control, target).
pub fn conjugate_by_cnot(
    g: &StabilizerGroup,
    control: usize,
    target: usize,
) -> Result<StabilizerGroup, StabilizerError> {
    for q in [control, target] {
        if q >= g.n {
            return Err(StabilizerError::QubitOutOfRange { qubit: q, n: g.n });
        }
    }
    assert_ne!(control, target, "control and target must differ");
    let gens = g.generators.iter().map(|w| cnot_word(w, control, target)).collect();
    make_group(g.n, gens)
}

/// Aaronson-Gottesman update: X_c -> X_c X_t, Z_t -> Z_c Z_t.
pub fn cnot_word(w: &PauliWord, control: usize, target: usize) -> PauliWord {
    let (xc, zc) = (w.x_bits().get(control), w.z_bits().get(control));
    let (xt, zt) = (w.x_bits().get(target), w.z_bits().get(target));
    let flip = xc && zt && (xt == zc);
    let mut x = w.x_bits().clone();
    let mut z = w.z_bits().clone();
    x.set(target, xt ^ xc);
    z.set(control, zc ^ zt);
    PauliWord::new(x, z, w.is_negative() ^ flip).expect("lengths match")
}

/// Entropy in bits of the reduced state on `region`.
pub fn entanglement_entropy(g: &StabilizerGroup, region: &[usize]) -> Result<u32, StabilizerError> {
    if !g.is_state() {
        return Err(StabilizerError::NotStateGroup { count: g.len(), n: g.n });
    }
    let inside = g.check_region(region)?;
    let size = inside.count_ones();
    let outside: Vec<usize> = (0..g.n).filter(|&q| !inside.get(q)).collect();
    let mut basis = IncrementalBasis::new(2 * outside.len());
    for w in &g.generators {
        let mut row = w.x_bits().gather(&outside).extended(2 * outside.len());
        for (i, &q) in outside.iter().enumerate() {
            if w.z_bits().get(q) {
                row.set(outside.len() + i, true);
            }
        }
        basis.insert(&row);
    }
    Ok((size + basis.rank() - g.n) as u32)
}

pub fn mutual_information(g: &StabilizerGroup, a: &[usize], b: &[usize]) -> Result<u32, StabilizerError> {
    let ma = g.check_region(a)?;
    let mb = g.check_region(b)?;
    if let Some(q) = ma.and(&mb).first_one() {
        return Err(StabilizerError::OverlappingRegions(q));
    }
    let union: Vec<usize> = ma.or(&mb).iter_ones().collect();
    let sa = entanglement_entropy(g, a)?;
    let sb = entanglement_entropy(g, b)?;
    let sab = entanglement_entropy(g, &union)?;
    Ok(sa + sb - sab)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportComponent {
    pub qubits: Vec<usize>,
    pub generators: Vec<usize>,
    /// Set for a qubit that no generator touches.
    pub free: bool,
}

/// Connected components of the generator/qubit incidence graph, ordered by
/// smallest qubit.
pub fn support_components(g: &StabilizerGroup) -> Vec<SupportComponent> {
    let mut parent: Vec<usize> = (0..g.n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for w in &g.generators {
        let sup: Vec<usize> = w.support().iter_ones().collect();
        for pair in sup.windows(2) {
            let (a, b) = (find(&mut parent, pair[0]), find(&mut parent, pair[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut touched = vec![false; g.n];
    for w in &g.generators {
        for q in w.support().iter_ones() {
            touched[q] = true;
        }
    }
    let mut index_of_root = vec![usize::MAX; g.n];
    let mut comps: Vec<SupportComponent> = Vec::new();
    for q in 0..g.n {
        let r = find(&mut parent, q);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = comps.len();
            comps.push(SupportComponent { qubits: Vec::new(), generators: Vec::new(), free: !touched[q] });
        }
        comps[index_of_root[r]].qubits.push(q);
    }
    for (i, w) in g.generators.iter().enumerate() {
        if let Some(q) = w.support().first_one() {
            let r = find(&mut parent, q);
            comps[index_of_root[r]].generators.push(i);
        }
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, n: usize) -> PauliWord {
        PauliWord::parse(s, n).unwrap()
    }

    fn group(n: usize, gens: &[&str]) -> StabilizerGroup {
        make_group(n, gens.iter().map(|s| w(s, n)).collect()).unwrap()
    }

    fn bell() -> StabilizerGroup {
        group(2, &["+Z1Z2", "+X1X2"])
    }

    #[test]
    fn make_group_examples() {
        assert!(make_group(1, vec![w("+Z1", 1)]).is_ok());
        assert!(make_group(2, vec![w("+Z1Z2", 2), w("+X1X2", 2)]).is_ok());
        assert_eq!(
            make_group(2, vec![w("+Z1", 2), w("+X1", 2)]),
            Err(StabilizerError::AntiCommuting { first: 0, second: 1 })
        );
        assert!(matches!(
            make_group(2, vec![w("+Z1", 2), w("+Z2", 2), w("+Z1Z2", 2)]),
            Err(StabilizerError::Dependent(_))
        ));
        assert!(matches!(
            make_group(2, vec![w("+Z1", 2), w("-Z1", 2)]),
            Err(StabilizerError::ContainsMinusIdentity(_))
        ));
    }

    #[test]
    fn membership() {
        let b = bell();
        assert_eq!(b.is_member(&w("-Y1Y2", 2)), Membership::Member);
        assert_eq!(b.is_member(&w("+Y1Y2", 2)), Membership::MemberWithWrongSign);
        assert_eq!(b.is_member(&w("+Z1", 2)), Membership::NotMember);
    }

    #[test]
    fn equality() {
        assert!(groups_equal(&bell(), &group(2, &["+X1X2", "+Z1Z2"])));
        assert!(!groups_equal(&group(1, &["+Z1"]), &group(1, &["-Z1"])));
        assert!(groups_equal(&bell(), &group(2, &["-Y1Y2", "+Z1Z2"])));
    }

    #[test]
    fn cnot_rules() {
        let g = conjugate_by_cnot(&group(2, &["+X1"]), 0, 1).unwrap();
        assert_eq!(g.generators()[0], w("+X1X2", 2));
        let g = conjugate_by_cnot(&group(2, &["+Z2"]), 0, 1).unwrap();
        assert_eq!(g.generators()[0], w("+Z1Z2", 2));
        let g = conjugate_by_cnot(&group(2, &["+Y1"]), 0, 1).unwrap();
        assert_eq!(g.generators()[0], w("+Y1X2", 2));
        assert!(conjugate_by_cnot(&group(2, &["+Y1"]), 0, 2).is_err());
    }

    #[test]
    fn entropies() {
        assert_eq!(entanglement_entropy(&group(2, &["+Z1", "+Z2"]), &[0]).unwrap(), 0);
        assert_eq!(entanglement_entropy(&bell(), &[0]).unwrap(), 1);
        assert_eq!(entanglement_entropy(&bell(), &[]).unwrap(), 0);
        assert_eq!(entanglement_entropy(&bell(), &[0, 1]).unwrap(), 0);
        assert!(entanglement_entropy(&group(2, &["+Z1"]), &[0]).is_err());
    }

    #[test]
    fn mutual_info() {
        let pairs = group(4, &["+Z1Z2", "+X1X2", "+Z3Z4", "+X3X4"]);
        assert_eq!(mutual_information(&pairs, &[0], &[2]).unwrap(), 0);
        let ghz = group(3, &["+Z1Z2", "+Z2Z3", "+X1X2X3"]);
        assert_eq!(mutual_information(&ghz, &[0], &[1]).unwrap(), 1);
        assert_eq!(mutual_information(&ghz, &[0], &[0, 1]), Err(StabilizerError::OverlappingRegions(0)));
    }

    #[test]
    fn components() {
        let pairs = group(4, &["+Z1Z2", "+X1X2", "+Z3Z4", "+X3X4"]);
        let comps = support_components(&pairs);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].qubits, vec![0, 1]);
        assert_eq!(comps[1].generators, vec![2, 3]);
        let partial = group(3, &["+Z1Z2"]);
        let comps = support_components(&partial);
        assert_eq!(comps.len(), 2);
        assert!(comps[1].free);
    }

    #[test]
    fn doc_round_trip() {
        let b = bell();
        assert_eq!(StabilizerGroup::from_doc(&b.to_doc()).unwrap(), b);
    }
}
