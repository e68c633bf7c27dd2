//! Exact sparse linear algebra over the rationals.
//!
//! Everything downstream (cohomology, minimal models, the formality
//! decision procedures) reduces to row reduction of sparse matrices with
//! `Scalar` entries. Vectors are sorted coordinate lists; reduced row
//! echelon form is computed by insertion so canonical subspace bases can
//! be grown incrementally. RREF is unique for a given row space, which is
//! what makes every derived basis in the crate reproducible run to run.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Sparse vector: strictly increasing coordinate indices, no zero entries.
pub type SparseVec = Vec<(usize, Scalar)>;

/// `a + c*b` as a canonical sparse vector.
pub fn sv_add_scaled(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    if c.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ia, va)), Some((ib, vb))) => {
                if ia == ib {
                    let v = va.clone() + c.clone() * vb;
                    if !v.is_zero() {
                        out.push((*ia, v));
                    }
                    i += 1;
                    j += 1;
                } else if ia < ib {
                    out.push((*ia, va.clone()));
                    i += 1;
                } else {
                    out.push((*ib, c.clone() * vb));
                    j += 1;
                }
            }
            (Some((ia, va)), None) => {
                out.push((*ia, va.clone()));
                i += 1;
            }
            (None, Some((ib, vb))) => {
                out.push((*ib, c.clone() * vb));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

pub fn sv_scale(a: &SparseVec, c: &Scalar) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, v)| (*i, v.clone() * c)).collect()
}

pub fn sv_get(a: &SparseVec, idx: usize) -> Scalar {
    match a.binary_search_by_key(&idx, |&(i, _)| i) {
        Ok(p) => a[p].1.clone(),
        Err(_) => Scalar::zero(),
    }
}

/// Builds a canonical sparse vector from possibly unsorted, possibly
/// repeated coordinate contributions.
pub fn sv_collect(entries: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (i, v) in entries {
        if v.is_zero() {
            continue;
        }
        let e = acc.entry(i).or_insert_with(Scalar::zero);
        *e += v;
        if e.is_zero() {
            acc.remove(&i);
        }
    }
    acc.into_iter().collect()
}

/// Incremental reduced row echelon form.
///
/// Rows are fully reduced against existing pivots on insertion and every
/// accepted pivot is immediately eliminated from the stored rows, so the
/// invariant "stored rows are in RREF (up to row order)" holds at all
/// times. With `track` set, each stored row also carries a combination
/// vector over the inserted rows, and combinations that reduce to zero are
/// collected (they span the left kernel of the inserted matrix).
pub struct Rref {
    ncols: usize,
    rows: Vec<(SparseVec, SparseVec)>,
    pivot_by_col: BTreeMap<usize, usize>,
    track: bool,
    inserted: usize,
    kernel_rows: Vec<SparseVec>,
}

impl Rref {
    pub fn new(ncols: usize) -> Self {
        Rref {
            ncols,
            rows: Vec::new(),
            pivot_by_col: BTreeMap::new(),
            track: false,
            inserted: 0,
            kernel_rows: Vec::new(),
        }
    }

    pub fn new_tracking(ncols: usize) -> Self {
        let mut r = Rref::new(ncols);
        r.track = true;
        r
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts a row; returns `true` when it enlarged the row space.
    pub fn insert(&mut self, row: SparseVec) -> bool {
        let tag = if self.track {
            vec![(self.inserted, Scalar::one())]
        } else {
            Vec::new()
        };
        self.inserted += 1;
        self.insert_with_tag(row, tag)
    }

    fn insert_with_tag(&mut self, mut row: SparseVec, mut tag: SparseVec) -> bool {
        // Forward reduction against existing pivots.
        loop {
            let lead = match row.first() {
                Some((col, coeff)) => (*col, coeff.clone()),
                None => {
                    if self.track {
                        self.kernel_rows.push(tag);
                    }
                    return false;
                }
            };
            match self.pivot_by_col.get(&lead.0) {
                Some(&r) => {
                    let c = -lead.1;
                    row = sv_add_scaled(&row, &c, &self.rows[r].0);
                    if self.track {
                        tag = sv_add_scaled(&tag, &c, &self.rows[r].1);
                    }
                }
                None => {
                    debug_assert!(lead.0 < self.ncols, "row index out of range");
                    // Normalize the leading entry to 1.
                    let inv = Scalar::one() / lead.1;
                    row = sv_scale(&row, &inv);
                    if self.track {
                        tag = sv_scale(&tag, &inv);
                    }
                    // Back-substitute into every stored row.
                    for idx in 0..self.rows.len() {
                        let coeff = sv_get(&self.rows[idx].0, lead.0);
                        if coeff.is_zero() {
                            continue;
                        }
                        let c = -coeff;
                        self.rows[idx].0 = sv_add_scaled(&self.rows[idx].0, &c, &row);
                        if self.track {
                            self.rows[idx].1 = sv_add_scaled(&self.rows[idx].1, &c, &tag);
                        }
                    }
                    self.pivot_by_col.insert(lead.0, self.rows.len());
                    self.rows.push((row, tag));
                    return true;
                }
            }
        }
    }

    /// Normal form of `v` modulo the current row space.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut i = 0;
        while i < v.len() {
            let (col, coeff) = (v[i].0, v[i].1.clone());
            if let Some(&r) = self.pivot_by_col.get(&col) {
                let c = -coeff;
                v = sv_add_scaled(&v, &c, &self.rows[r].0);
                // The pivot entry vanished; everything before position `i`
                // is untouched because stored rows lead at their pivot.
            } else {
                i += 1;
            }
        }
        v
    }

    /// Collected left-kernel combinations (tracking mode only).
    pub fn kernel_rows(&self) -> &[SparseVec] {
        &self.kernel_rows
    }

    /// Expresses `b` as a combination of the *inserted* rows (tracking
    /// mode). Returns the coefficient vector, or `None` when `b` is outside
    /// the row space.
    pub fn express(&self, b: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "express requires a tracking Rref");
        let mut v = b.clone();
        let mut tag: SparseVec = Vec::new();
        let mut i = 0;
        while i < v.len() {
            let (col, coeff) = (v[i].0, v[i].1.clone());
            if let Some(&r) = self.pivot_by_col.get(&col) {
                let c = -coeff;
                v = sv_add_scaled(&v, &c, &self.rows[r].0);
                tag = sv_add_scaled(&tag, &c, &self.rows[r].1);
            } else {
                i += 1;
            }
        }
        if v.is_empty() {
            Some(sv_scale(&tag, &(-Scalar::one())))
        } else {
            None
        }
    }

    pub fn into_basis(self) -> SubspaceBasis {
        let ncols = self.ncols;
        let mut rows: Vec<SparseVec> = self.rows.into_iter().map(|(r, _)| r).collect();
        rows.sort_by_key(|r| r.first().map(|&(c, _)| c).unwrap_or(usize::MAX));
        let pivots = rows.iter().map(|r| r[0].0).collect();
        SubspaceBasis { ncols, rows, pivots }
    }
}

/// A subspace of Q^n held as its unique reduced row echelon basis: rows
/// sorted by pivot column, each leading coefficient 1, pivot columns clear
/// elsewhere. Equal subspaces compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn empty(ncols: usize) -> Self {
        SubspaceBasis { ncols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut rref = Rref::new(ncols);
        for row in rows {
            rref.insert(row);
        }
        rref.into_basis()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Normal form of `v` modulo this subspace; the result has zero entries
    /// at every pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut i = 0;
        while i < v.len() {
            let (col, coeff) = (v[i].0, v[i].1.clone());
            match self.pivots.binary_search(&col) {
                Ok(r) => {
                    let c = -coeff;
                    v = sv_add_scaled(&v, &c, &self.rows[r]);
                }
                Err(_) => i += 1,
            }
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Coordinates of `v` in this basis (`v = sum c_i row_i`), or `None`
    /// when `v` lies outside the subspace. Because the basis is in RREF the
    /// coordinates are read off at the pivot columns.
    pub fn coords(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        let coords: Vec<Scalar> = self.pivots.iter().map(|&p| sv_get(v, p)).collect();
        let mut rem = v.clone();
        for (c, row) in coords.iter().zip(&self.rows) {
            let neg = -c.clone();
            rem = sv_add_scaled(&rem, &neg, row);
        }
        rem.is_empty().then_some(coords)
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// The sum of two subspaces of the same ambient space.
    pub fn sum(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.ncols, other.ncols, "ambient dimensions differ");
        SubspaceBasis::from_rows(
            self.ncols,
            self.rows.iter().chain(other.rows.iter()).cloned(),
        )
    }
}

/// A sparse matrix, stored by rows. Rows typically encode the images of
/// domain basis vectors under a linear map, with columns indexing the
/// codomain basis; `kernel` and `express` then speak about combinations of
/// domain vectors.
#[derive(Debug, Clone)]
pub struct MatrixQ {
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl MatrixQ {
    pub fn new(ncols: usize) -> Self {
        MatrixQ { ncols, rows: Vec::new() }
    }

    pub fn from_rows(ncols: usize, rows: Vec<SparseVec>) -> Self {
        MatrixQ { ncols, rows }
    }

    pub fn push_row(&mut self, row: SparseVec) {
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        let mut rref = Rref::new(self.ncols);
        for row in &self.rows {
            rref.insert(row.clone());
        }
        rref.rank()
    }

    /// Canonical basis of the row space.
    pub fn row_space(&self) -> SubspaceBasis {
        SubspaceBasis::from_rows(self.ncols, self.rows.iter().cloned())
    }

    pub fn transpose(&self) -> MatrixQ {
        let mut cols: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                cols.entry(*c).or_default().push((r, v.clone()));
            }
        }
        let mut out = MatrixQ::new(self.rows.len());
        // Rows of the transpose are emitted for nonzero columns only; zero
        // columns contribute zero rows, which no caller distinguishes.
        for (_, col) in cols {
            out.push_row(col);
        }
        out
    }

    /// Canonical basis of `{ x : sum_i x_i row_i = 0 }`.
    ///
    /// Computed from the RREF of the transpose by the free-column
    /// construction, then re-reduced so the result is itself in RREF.
    pub fn kernel(&self) -> SubspaceBasis {
        let n = self.rows.len();
        let t = self.transpose();
        let mut rref = Rref::new(n);
        for row in t.rows {
            rref.insert(row);
        }
        let basis = rref.into_basis();
        let pivot_set: Vec<usize> = basis.pivots().to_vec();
        let mut kernel_rows: Vec<SparseVec> = Vec::new();
        let mut pivots_iter = pivot_set.iter().peekable();
        for j in 0..n {
            if pivots_iter.peek() == Some(&&j) {
                pivots_iter.next();
                continue;
            }
            // Free column j: x_j = 1, x_{pivot_i} = -R[i][j].
            let mut entries: Vec<(usize, Scalar)> = vec![(j, Scalar::one())];
            for (i, row) in basis.rows().iter().enumerate() {
                let v = sv_get(row, j);
                if !v.is_zero() {
                    entries.push((pivot_set[i], -v));
                }
            }
            kernel_rows.push(sv_collect(entries));
        }
        SubspaceBasis::from_rows(n, kernel_rows)
    }

    /// Dimension of the kernel without materializing a basis.
    pub fn nullity(&self) -> usize {
        self.rows.len() - self.rank()
    }

    /// Finds `x` with `sum_i x_i row_i = b`, or `None` when `b` is outside
    /// the row space.
    pub fn express(&self, b: &SparseVec) -> Option<SparseVec> {
        let mut rref = Rref::new_tracking(self.ncols);
        for row in &self.rows {
            rref.insert(row.clone());
        }
        rref.express(b)
    }
}
