//! Exact sparse linear algebra over the rationals: column-major sparse
//! matrices, reduced row echelon subspaces, rank and kernel.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::rational::{self, Q};

/// Sparse vector keyed by coordinate index. Zero entries are never stored.
pub type SparseVec = BTreeMap<usize, Q>;

pub fn axpy(acc: &mut SparseVec, coef: &Q, v: &SparseVec) {
    if coef.is_zero() {
        return;
    }
    for (&i, x) in v {
        add_entry(acc, i, coef * x);
    }
}

pub fn add_entry(acc: &mut SparseVec, i: usize, x: Q) {
    if x.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match acc.entry(i) {
        Entry::Vacant(e) => {
            e.insert(x);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += x;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub fn scale_vec(v: &SparseVec, c: &Q) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&i, x)| (i, x * c)).collect()
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for (j, col) in m.data.iter_mut().enumerate() {
            col.insert(j, rational::one());
        }
        m
    }

    pub fn scalar(n: usize, c: &Q) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c.keys().all(|&i| i < rows)));
        Self { rows, cols: columns.len(), data: columns }
    }

    pub fn from_rows(cols: usize, rows: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (&j, x) in r {
                m.data[j].insert(i, x.clone());
            }
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let sparse: Vec<SparseVec> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (j, x.clone()))
                    .collect()
            })
            .collect();
        Self::from_rows(cols, &sparse)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.data[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.data[j].get(&i).cloned().unwrap_or_else(rational::zero)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&j, x) in v {
            axpy(&mut out, x, &self.data[j]);
        }
        out
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let data = rhs.data.iter().map(|c| self.apply(c)).collect();
        SparseMatrix { rows: self.rows, cols: rhs.cols, data }
    }

    pub fn add(&self, rhs: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &rational::one());
        out
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> SparseMatrix {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-rational::one());
        out
    }

    pub fn add_assign_scaled(&mut self, rhs: &SparseMatrix, c: &Q) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch in sum");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            axpy(a, c, b);
        }
    }

    pub fn scale(&self, c: &Q) -> SparseMatrix {
        let data = self.data.iter().map(|col| scale_vec(col, c)).collect();
        SparseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix::from_rows(self.rows, &self.data)
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        self.transpose().data
    }

    pub fn vstack(blocks: &[SparseMatrix]) -> SparseMatrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut out = SparseMatrix::zeros(0, cols);
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            for (j, col) in b.data.iter().enumerate() {
                for (&i, x) in col {
                    out.data[j].insert(out.rows + i, x.clone());
                }
            }
            out.rows += b.rows;
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> SparseMatrix {
        let data = idx.iter().map(|&j| self.data[j].clone()).collect();
        SparseMatrix { rows: self.rows, cols: idx.len(), data }
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut d = vec![vec![rational::zero(); self.cols]; self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (&i, x) in col {
                d[i][j] = x.clone();
            }
        }
        d
    }

    /// Dense `"p/q"` rendering for debugging exports.
    pub fn to_json(&self) -> DenseJson {
        DenseJson {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .to_dense()
                .iter()
                .map(|r| r.iter().map(rational::to_string).collect())
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct DenseJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

/// A subspace of `Q^ambient` kept in fully reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<SparseVec>,
    // pivot column -> row index
    pivots: BTreeMap<usize, usize>,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Self { ambient, rows: Vec::new(), pivots: BTreeMap::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let mut s = Self::new(ambient);
        for i in 0..ambient {
            s.insert(&SparseVec::from([(i, rational::one())]));
        }
        s
    }

    pub fn spanned_by<'a>(ambient: usize, vs: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut s = Self::new(ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Basis in reduced row echelon form, ordered by insertion.
    pub fn basis(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let hits: Vec<(usize, Q)> = v
            .iter()
            .filter_map(|(j, x)| self.pivots.get(j).map(|&r| (r, x.clone())))
            .collect();
        let mut out = v.clone();
        for (r, x) in hits {
            axpy(&mut out, &-x, &self.rows[r]);
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        let r = scale_vec(&r, &inv);
        for row in self.rows.iter_mut() {
            if let Some(c) = row.get(&p).cloned() {
                axpy(row, &-c, &r);
            }
        }
        self.pivots.insert(p, self.rows.len());
        self.rows.push(r);
        true
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other)
    }

    /// Basis of the solution space `{x : R x = 0}` where the rows `R` span this subspace.
    pub fn annihilator_kernel(&self) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for f in (0..self.ambient).filter(|c| !self.pivots.contains_key(c)) {
            let mut v = SparseVec::from([(f, rational::one())]);
            for (&p, &r) in &self.pivots {
                if let Some(x) = self.rows[r].get(&f) {
                    v.insert(p, -x.clone());
                }
            }
            out.push(v);
        }
        out
    }
}

pub fn rank(m: &SparseMatrix) -> usize {
    // Columns span the column space; rank is the same.
    Subspace::spanned_by(m.rows(), m.columns()).dim()
}

pub fn kernel(m: &SparseMatrix) -> Vec<SparseVec> {
    let rows = m.row_vectors();
    Subspace::spanned_by(m.cols(), &rows).annihilator_kernel()
}

pub fn is_unit(x: &Q) -> bool {
    x.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};
    use proptest::prelude::*;

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(
            &rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_and_kernel_small() {
        let m = dense(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let k = kernel(&m);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn subspace_rref_membership() {
        let a = SparseVec::from([(0, q(2)), (1, q(1))]);
        let b = SparseVec::from([(1, frac(1, 3)), (2, q(1))]);
        let s = Subspace::spanned_by(3, [&a, &b]);
        let c = SparseVec::from([(0, q(4)), (1, q(5)), (2, q(9))]);
        assert!(s.contains(&c));
        assert!(!s.contains(&SparseVec::from([(2, q(1))])));
    }

    #[test]
    fn product_and_transpose() {
        let a = dense(&[&[1, 2], &[0, 1]]);
        let b = dense(&[&[3, 0], &[1, 1]]);
        assert_eq!(a.mul(&b), dense(&[&[5, 2], &[1, 1]]));
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(SparseMatrix::vstack(&[a.clone(), b.clone()]).rows(), 4);
    }

    proptest! {
        #[test]
        fn rank_nullity(entries in proptest::collection::vec(-3i64..4, 20)) {
            let rows: Vec<Vec<Q>> = entries.chunks(5).map(|c| c.iter().map(|&x| q(x)).collect()).collect();
            let m = SparseMatrix::from_dense(&rows);
            let k = kernel(&m);
            prop_assert_eq!(rank(&m) + k.len(), 5);
            for v in &k {
                prop_assert!(m.apply(v).is_empty());
            }
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }
    }
}
