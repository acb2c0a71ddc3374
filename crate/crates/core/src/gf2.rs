//! Dense GF(2) matrices and Gaussian elimination.
//!
//! Elimination always picks the leftmost column that still has a nonzero
//! entry and, within it, the topmost unused row. Results are therefore
//! deterministic for a given row order.

use crate::bits::BitVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

/// Reduced row echelon form with per-row combination records.
///
/// Computing it once and solving many right-hand sides is much cheaper than
/// repeated [`BitMatrix::solve`] calls.
#[derive(Clone, Debug)]
pub struct Elimination {
    rows: Vec<BitVec>,
    combos: Vec<BitVec>,
    /// `(column, row)` for every pivot, in column order.
    pivots: Vec<(usize, usize)>,
    nrows: usize,
}

impl Elimination {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Row combination (one bit per original row) equal to `b`, if any.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        let mut rest = b.clone();
        let mut x = BitVec::zeros(self.nrows);
        for &(col, r) in &self.pivots {
            if rest.get(col) {
                rest.xor_assign(&self.rows[r]);
                x.xor_assign(&self.combos[r]);
            }
        }
        rest.is_zero().then_some(x)
    }

    pub fn in_span(&self, b: &BitVec) -> bool {
        let mut rest = b.clone();
        for &(col, r) in &self.pivots {
            if rest.get(col) {
                rest.xor_assign(&self.rows[r]);
            }
        }
        rest.is_zero()
    }
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        BitMatrix { rows: Vec::new(), cols }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows: vec![BitVec::zeros(cols); rows], cols }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix { rows: (0..n).map(|i| BitVec::from_indices(n, [i])).collect(), cols: n }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length {} != {cols}", r.len());
        }
        BitMatrix { rows, cols }
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    fn reduce(&self, track: bool) -> Elimination {
        let m = self.rows.len();
        let mut rows = self.rows.clone();
        let mut combos: Vec<BitVec> =
            if track { (0..m).map(|i| BitVec::from_indices(m, [i])).collect() } else { Vec::new() };
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == m {
                break;
            }
            let Some(p) = (next..m).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            if track {
                combos.swap(next, p);
            }
            for r in 0..m {
                if r != next && rows[r].get(col) {
                    let (src, dst) = pick(&mut rows, next, r);
                    dst.xor_assign(src);
                    if track {
                        let (src, dst) = pick(&mut combos, next, r);
                        dst.xor_assign(src);
                    }
                }
            }
            pivots.push((col, next));
            next += 1;
        }
        Elimination { rows, combos, pivots, nrows: m }
    }

    pub fn rank(&self) -> usize {
        self.reduce(false).pivots.len()
    }

    /// Finds `x` (one bit per row) whose row combination equals `b`.
    ///
    /// Rows that become zero during elimination never enter the answer, so
    /// the representative is deterministic.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.cols, "target length must equal column count");
        self.reduce(true).solve(b)
    }

    pub fn eliminate(&self) -> Elimination {
        self.reduce(true)
    }

    /// Basis of `{y : row · y = 0 for every row}`.
    pub fn null_space(&self) -> Vec<BitVec> {
        let red = self.reduce(false);
        let mut is_pivot = vec![false; self.cols];
        for &(c, _) in &red.pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut y = BitVec::zeros(self.cols);
            y.set(free, true);
            for &(c, r) in &red.pivots {
                if red.rows[r].get(free) {
                    y.set(c, true);
                }
            }
            basis.push(y);
        }
        basis
    }

    /// Indices of a maximal independent subset of rows, chosen greedily in order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut basis = IncrementalBasis::new(self.cols);
        (0..self.rows.len()).filter(|&i| basis.insert(&self.rows[i])).collect()
    }

    /// A nonzero row combination equal to zero, if the rows are dependent.
    pub fn dependency(&self) -> Option<BitVec> {
        let red = self.reduce(true);
        let rank = red.pivots.len();
        (rank < self.rows.len()).then(|| red.combos[rank].clone())
    }
}

fn pick<T>(v: &mut [T], src: usize, dst: usize) -> (&T, &mut T) {
    assert_ne!(src, dst);
    if src < dst {
        let (a, b) = v.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = v.split_at_mut(src);
        (&b[0], &mut a[dst])
    }
}

/// Echelon basis that grows one vector at a time.
#[derive(Clone, Debug)]
pub struct IncrementalBasis {
    cols: usize,
    rows: Vec<(usize, BitVec)>,
}

impl IncrementalBasis {
    pub fn new(cols: usize) -> Self {
        IncrementalBasis { cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols);
        let mut v = v.clone();
        for (p, r) in &self.rows {
            if v.get(*p) {
                v.xor_assign(r);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                for (_, row) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                    }
                }
                self.rows.push((p, r));
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        BitMatrix::from_rows(
            cols,
            rows.iter().map(|r| BitVec::from_bools(&r.chars().map(|c| c == '1').collect::<Vec<_>>())).collect(),
        )
    }

    #[test]
    fn identity_rank() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
    }

    #[test]
    fn zero_rank() {
        assert_eq!(BitMatrix::zeros(4, 7).rank(), 0);
    }

    #[test]
    fn solve_identity() {
        let x = BitMatrix::identity(2).solve(&BitVec::from_bools(&[true, false]));
        assert_eq!(x, Some(BitVec::from_bools(&[true, false])));
    }

    #[test]
    fn solve_outside_span() {
        assert_eq!(m(&["11"]).solve(&BitVec::from_bools(&[true, false])), None);
    }

    #[test]
    fn ring_decomposition_picks_alternate_links() {
        // Z parts of Z1Z2, Z2Z3, Z3Z4, Z4Z1 on a 4-cycle.
        let rows = m(&["1100", "0110", "0011", "1001"]);
        let x = rows.solve(&BitVec::from_bools(&[true; 4])).unwrap();
        assert_eq!(x.iter_ones().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn null_space_is_orthogonal() {
        let a = m(&["1101", "0111", "1010"]);
        let ns = a.null_space();
        assert_eq!(ns.len(), 4 - a.rank());
        for y in &ns {
            for r in a.rows() {
                assert!(!r.dot(y));
            }
        }
    }

    #[test]
    fn dependency_found() {
        let a = m(&["110", "011", "101"]);
        let d = a.dependency().unwrap();
        assert_eq!(d.count_ones(), 3);
        assert!(m(&["110", "011"]).dependency().is_none());
    }

    #[test]
    fn incremental_matches_rank() {
        let a = m(&["1100", "0110", "1010", "0001"]);
        assert_eq!(a.independent_rows(), vec![0, 1, 3]);
    }
}
