//! Finite multiplication-table algebras.
//!
//! A [`FiniteGradedAlgebra`] is a graded-commutative associative algebra
//! given by a finite named basis (a unit in degree 0, a fundamental class
//! in the top degree `n`) and a table of pairwise basis products. Products
//! landing above degree `n` vanish, squares of odd elements vanish, and
//! only one orientation of each pair is stored (the other follows by the
//! Koszul sign).
//!
//! Tables may be *presented* incompletely: stated relations and pairings
//! are pinned, and every other product defaults to zero. A literal
//! all-other-products-vanish reading can contradict associativity, so the
//! constructor runs a repair pass: it collects the associativity
//! constraints that are linear in the unknown (default) entries, solves
//! them exactly, installs the forced nonzero values (free coordinates stay
//! zero), and iterates to a fixpoint. Every repair is recorded. A final
//! exhaustive associativity sweep over all basis triples either passes or
//! aborts construction. Degree-`n` products are never repaired: the
//! intersection pairing is complete input data, and unstated complementary
//! products are pinned zeros.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::graded::{AlgebraContext, Element};
use crate::linalg::{sv_add_scaled, sv_collect, sv_get, sv_scale, MatrixQ, Rref, SparseVec};
use crate::scalar::{coefficient_display, sign_pow, Scalar};

#[derive(Debug, Error)]
pub enum FiniteAlgebraError {
    #[error("duplicate basis name `{0}`")]
    DuplicateName(String),
    #[error("unknown basis name `{0}`")]
    UnknownName(String),
    #[error("need exactly one degree-0 basis element (the unit), found {0}")]
    BadUnit(usize),
    #[error("need exactly one degree-{0} basis element (the fundamental class), found {1}")]
    BadFundamentalClass(usize, usize),
    #[error("basis element `{name}` has degree {degree} outside 0..={top}")]
    BadDegree { name: String, degree: usize, top: usize },
    #[error("product {left}·{right} declared twice")]
    DuplicateProduct { left: String, right: String },
    #[error("product {left}·{right} = `{value}` violates the grading")]
    ProductDegreeViolation { left: String, right: String, value: String },
    #[error("relation `{0}` is not of the form generator·generator = linear combination")]
    InvalidRelation(String),
    #[error("no associative completion: ({a}·{b})·{c} = `{lhs}` but {a}·({b}·{c}) = `{rhs}`")]
    AssociativityContradiction {
        a: String,
        b: String,
        c: String,
        lhs: String,
        rhs: String,
    },
    #[error("pairing {left}·{right} must land in degree {top}")]
    BadPairingDegree { left: String, right: String, top: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: usize,
    pub index: usize,
}

/// A repair installed by the associativity solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairRecord {
    pub left: String,
    pub right: String,
    pub value: String,
}

/// Raw input for [`FiniteGradedAlgebra::from_table`]: the full basis
/// (including the unit and the fundamental class) and the pinned products.
/// A product with an empty value list is pinned to zero (not repairable).
pub struct TableSpec {
    pub name: String,
    pub top_degree: usize,
    pub basis: Vec<(String, usize)>,
    pub products: Vec<(String, String, Vec<(String, Scalar)>)>,
}

#[derive(Debug, Clone)]
struct Entry {
    value: SparseVec,
    repaired: bool,
}

#[derive(Debug)]
pub struct FiniteGradedAlgebra {
    name: String,
    top: usize,
    basis: Vec<BasisElement>,
    by_name: HashMap<String, usize>,
    by_degree: Vec<Vec<usize>>,
    unit: usize,
    fundamental: usize,
    /// Pinned and repaired entries, keyed by index-sorted pairs; absent
    /// entries are zero.
    table: BTreeMap<(usize, usize), Entry>,
    repairs: Vec<RepairRecord>,
    warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingReport {
    pub degree: usize,
    pub dim_left: usize,
    pub dim_right: usize,
    pub rank: usize,
    pub nondegenerate: bool,
}

/// Per-degree intersection-form diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PDReport {
    pub top_degree: usize,
    pub pairings: Vec<PairingReport>,
}

impl PDReport {
    pub fn all_nondegenerate(&self) -> bool {
        self.pairings.iter().all(|p| p.nondegenerate)
    }
}

impl FiniteGradedAlgebra {
    pub fn from_table(spec: TableSpec) -> Result<FiniteGradedAlgebra, FiniteAlgebraError> {
        let top = spec.top_degree;
        // Sort stably by degree, preserving declaration order inside one
        // degree, so indices (and everything derived) are reproducible.
        let mut order: Vec<usize> = (0..spec.basis.len()).collect();
        order.sort_by_key(|&i| spec.basis[i].1);
        let mut basis = Vec::with_capacity(order.len());
        let mut by_name = HashMap::new();
        for (index, &i) in order.iter().enumerate() {
            let (name, degree) = &spec.basis[i];
            if *degree > top {
                return Err(FiniteAlgebraError::BadDegree {
                    name: name.clone(),
                    degree: *degree,
                    top,
                });
            }
            if by_name.insert(name.clone(), index).is_some() {
                return Err(FiniteAlgebraError::DuplicateName(name.clone()));
            }
            basis.push(BasisElement { name: name.clone(), degree: *degree, index });
        }
        let mut by_degree = vec![Vec::new(); top + 1];
        for b in &basis {
            by_degree[b.degree].push(b.index);
        }
        if by_degree[0].len() != 1 {
            return Err(FiniteAlgebraError::BadUnit(by_degree[0].len()));
        }
        if by_degree[top].len() != 1 {
            return Err(FiniteAlgebraError::BadFundamentalClass(top, by_degree[top].len()));
        }
        let unit = by_degree[0][0];
        let fundamental = by_degree[top][0];

        let mut alg = FiniteGradedAlgebra {
            name: spec.name,
            top,
            basis,
            by_name,
            by_degree,
            unit,
            fundamental,
            table: BTreeMap::new(),
            repairs: Vec::new(),
            warnings: Vec::new(),
        };

        for (ln, rn, value) in &spec.products {
            let i = alg.index_of(ln).ok_or_else(|| FiniteAlgebraError::UnknownName(ln.clone()))?;
            let j = alg.index_of(rn).ok_or_else(|| FiniteAlgebraError::UnknownName(rn.clone()))?;
            let mut coords: Vec<(usize, Scalar)> = Vec::new();
            for (vn, s) in value {
                let k = alg
                    .index_of(vn)
                    .ok_or_else(|| FiniteAlgebraError::UnknownName(vn.clone()))?;
                coords.push((k, s.clone()));
            }
            let coords = sv_collect(coords);
            let target = alg.basis[i].degree + alg.basis[j].degree;
            if target > top && !coords.is_empty() {
                return Err(FiniteAlgebraError::ProductDegreeViolation {
                    left: ln.clone(),
                    right: rn.clone(),
                    value: alg.render_coords(&coords),
                });
            }
            if coords.iter().any(|&(k, _)| alg.basis[k].degree != target) {
                return Err(FiniteAlgebraError::ProductDegreeViolation {
                    left: ln.clone(),
                    right: rn.clone(),
                    value: alg.render_coords(&coords),
                });
            }
            // Store under the index-sorted orientation.
            let (a, b, sgn) = alg.orient(i, j);
            let coords = sv_scale(&coords, &sgn);
            if target > top {
                continue; // pinned zero above the top degree is implicit
            }
            if alg
                .table
                .insert((a, b), Entry { value: coords, repaired: false })
                .is_some()
            {
                return Err(FiniteAlgebraError::DuplicateProduct {
                    left: ln.clone(),
                    right: rn.clone(),
                });
            }
        }

        alg.repair_and_validate()?;
        let pd = alg.pd_check();
        for p in &pd.pairings {
            if !p.nondegenerate {
                alg.warnings.push(format!(
                    "pairing H^{} × H^{} is degenerate (rank {} of {}×{})",
                    p.degree,
                    alg.top - p.degree,
                    p.rank,
                    p.dim_left,
                    p.dim_right
                ));
            }
        }
        Ok(alg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn top_degree(&self) -> usize {
        self.top
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn basis_of_degree(&self, d: usize) -> &[usize] {
        if d > self.top {
            &[]
        } else {
            &self.by_degree[d]
        }
    }

    pub fn dim(&self, d: usize) -> usize {
        self.basis_of_degree(d).len()
    }

    /// Per-degree dimensions 0..=top; with the zero differential these are
    /// the Betti numbers.
    pub fn betti_vector(&self) -> Vec<usize> {
        (0..=self.top).map(|d| self.dim(d)).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn fundamental_index(&self) -> usize {
        self.fundamental
    }

    pub fn repairs(&self) -> &[RepairRecord] {
        &self.repairs
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn orient(&self, i: usize, j: usize) -> (usize, usize, Scalar) {
        if i <= j {
            (i, j, Scalar::one())
        } else {
            (j, i, sign_pow(self.basis[i].degree * self.basis[j].degree))
        }
    }

    /// Product of two basis elements, in global coordinates.
    pub fn mul_basis(&self, i: usize, j: usize) -> SparseVec {
        if i == self.unit {
            return vec![(j, Scalar::one())];
        }
        if j == self.unit {
            return vec![(i, Scalar::one())];
        }
        let (di, dj) = (self.basis[i].degree, self.basis[j].degree);
        if di + dj > self.top {
            return Vec::new();
        }
        if i == j && di % 2 == 1 {
            return Vec::new();
        }
        let (a, b, sgn) = self.orient(i, j);
        match self.table.get(&(a, b)) {
            Some(e) => sv_scale(&e.value, &sgn),
            None => Vec::new(),
        }
    }

    /// Bilinear extension of [`FiniteGradedAlgebra::mul_basis`].
    pub fn mul(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc: SparseVec = Vec::new();
        for (i, ca) in a {
            for (j, cb) in b {
                let c = ca.clone() * cb;
                acc = sv_add_scaled(&acc, &c, &self.mul_basis(*i, *j));
            }
        }
        acc
    }

    /// Coefficient of the fundamental class in `v`.
    pub fn vol_coefficient(&self, v: &SparseVec) -> Scalar {
        sv_get(v, self.fundamental)
    }

    pub fn render_coords(&self, v: &SparseVec) -> String {
        if v.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (pos, (i, c)) in v.iter().enumerate() {
            let neg = c < &Scalar::zero();
            if pos == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let (show, mag) = coefficient_display(c);
            if show {
                out.push_str(&mag);
                out.push('*');
            }
            out.push_str(&self.basis[*i].name);
        }
        out
    }

    /// Pinned and repaired table entries in canonical order, for export:
    /// `(left index, right index, value, repaired)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &SparseVec, bool)> {
        self.table
            .iter()
            .map(|(&(a, b), e)| (a, b, &e.value, e.repaired))
    }

    /// The matrix of the pairing `A^d × A^{n−d} → A^n ≅ ℚ`; rows indexed
    /// by the degree-`d` basis, columns by the degree-`(n−d)` basis.
    pub fn pairing_matrix(&self, d: usize) -> MatrixQ {
        let left = self.basis_of_degree(d);
        let right = self.basis_of_degree(self.top - d);
        let mut m = MatrixQ::new(right.len());
        for &i in left {
            let mut row: Vec<(usize, Scalar)> = Vec::new();
            for (cj, &j) in right.iter().enumerate() {
                let v = self.vol_coefficient(&self.mul_basis(i, j));
                if !v.is_zero() {
                    row.push((cj, v));
                }
            }
            m.push_row(row);
        }
        m
    }

    /// Exact ranks and nondegeneracy verdicts for all complementary-degree
    /// pairings.
    pub fn pd_check(&self) -> PDReport {
        let pairings = (0..=self.top)
            .map(|d| {
                let m = self.pairing_matrix(d);
                let rank = m.rank();
                let (l, r) = (self.dim(d), self.dim(self.top - d));
                PairingReport {
                    degree: d,
                    dim_left: l,
                    dim_right: r,
                    rank,
                    nondegenerate: rank == l && rank == r,
                }
            })
            .collect();
        PDReport { top_degree: self.top, pairings }
    }

    // ----- associativity repair -----------------------------------------

    fn repair_and_validate(&mut self) -> Result<(), FiniteAlgebraError> {
        const MAX_ROUNDS: usize = 8;
        for _ in 0..MAX_ROUNDS {
            let installed = self.repair_round()?;
            if installed == 0 {
                break;
            }
        }
        self.validate_associativity()
    }

    /// Index-sorted pairs whose product is still a soft (absent) entry
    /// with a nonzero-dimensional target.
    fn soft_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.basis.len() {
            for b in a..self.basis.len() {
                if a == self.unit || b == self.unit {
                    continue;
                }
                let (da, db) = (self.basis[a].degree, self.basis[b].degree);
                let t = da + db;
                if t > self.top || (a == b && da % 2 == 1) {
                    continue;
                }
                // Degree-n products are pairing data: pinned zero when
                // unstated, never repaired.
                if t == self.top {
                    continue;
                }
                if self.dim(t) == 0 {
                    continue;
                }
                if !self.table.contains_key(&(a, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn repair_round(&mut self) -> Result<usize, FiniteAlgebraError> {
        let soft = self.soft_pairs();
        if soft.is_empty() {
            return Ok(0);
        }
        // Variable layout: one block of target-degree coordinates per soft
        // pair, in canonical pair order.
        let mut var_base: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut nvars = 0usize;
        for &(a, b) in &soft {
            var_base.insert((a, b), nvars);
            nvars += self.dim(self.basis[a].degree + self.basis[b].degree);
        }
        let aug = nvars; // augmented constant column
        let mut rref = Rref::new(nvars + 1);
        let gens: Vec<usize> = (0..self.basis.len())
            .filter(|&i| i != self.unit && i != self.fundamental)
            .collect();
        for &a in &gens {
            for &b in &gens {
                for &c in &gens {
                    let dsum = self.basis[a].degree + self.basis[b].degree + self.basis[c].degree;
                    if dsum > self.top {
                        continue;
                    }
                    let lhs = match self.sym_left_assoc(a, b, c, &var_base) {
                        Some(v) => v,
                        None => continue, // nonlinear this round
                    };
                    let rhs = match self.sym_right_assoc(a, b, c, &var_base) {
                        Some(v) => v,
                        None => continue,
                    };
                    // lhs − rhs = 0, one equation per global coordinate.
                    for expr in diff_expressions(lhs, rhs).into_values() {
                        let mut row: Vec<(usize, Scalar)> = expr.vars.into_iter().collect();
                        if !expr.known.is_zero() {
                            row.push((aug, -expr.known));
                        }
                        if row.is_empty() {
                            continue;
                        }
                        // A new pivot at the augmented column means the
                        // system contains 0 = nonzero: no completion exists.
                        if rref.insert(sv_collect(row)) && aug_is_pivot(&rref, aug) {
                            return Err(self.contradiction_at(a, b, c));
                        }
                    }
                }
            }
        }
        // Particular solution: pivot variables take the augmented value,
        // free variables stay zero.
        let basis = rref.into_basis();
        let mut solution: BTreeMap<usize, Scalar> = BTreeMap::new();
        for row in basis.rows() {
            let (pivot, _) = row[0].clone();
            if pivot == aug {
                // Cannot happen (checked on insert), but keep the guard.
                continue;
            }
            let v = sv_get(row, aug);
            if !v.is_zero() {
                solution.insert(pivot, v);
            }
        }
        let mut installed = 0usize;
        for (&(a, b), &base) in &var_base {
            let t = self.basis[a].degree + self.basis[b].degree;
            let locals = self.basis_of_degree(t).to_vec();
            let mut coords: Vec<(usize, Scalar)> = Vec::new();
            for (local, &global) in locals.iter().enumerate() {
                if let Some(v) = solution.get(&(base + local)) {
                    coords.push((global, v.clone()));
                }
            }
            let coords = sv_collect(coords);
            if coords.is_empty() {
                continue;
            }
            self.repairs.push(RepairRecord {
                left: self.basis[a].name.clone(),
                right: self.basis[b].name.clone(),
                value: self.render_coords(&coords),
            });
            self.table.insert((a, b), Entry { value: coords, repaired: true });
            installed += 1;
        }
        Ok(installed)
    }

    fn contradiction_at(&self, a: usize, b: usize, c: usize) -> FiniteAlgebraError {
        let lhs = self.mul(&self.mul_basis(a, b), &vec![(c, Scalar::one())]);
        let rhs = self.mul(&vec![(a, Scalar::one())], &self.mul_basis(b, c));
        FiniteAlgebraError::AssociativityContradiction {
            a: self.basis[a].name.clone(),
            b: self.basis[b].name.clone(),
            c: self.basis[c].name.clone(),
            lhs: self.render_coords(&lhs),
            rhs: self.render_coords(&rhs),
        }
    }

    /// Symbolic value of a table entry: either its known value or a block
    /// of variables. `None` is never returned here; nonlinearity only
    /// arises one multiplication later.
    fn sym_pair(&self, i: usize, j: usize, vars: &BTreeMap<(usize, usize), usize>) -> SymVec {
        let (a, b, sgn) = self.orient(i, j);
        if let Some(&base) = vars.get(&(a, b)) {
            let t = self.basis[a].degree + self.basis[b].degree;
            let mut out = SymVec::default();
            for (local, &global) in self.basis_of_degree(t).iter().enumerate() {
                out.vars.insert((global, base + local), sgn.clone());
            }
            return out;
        }
        SymVec::from_known(self.mul_basis(i, j))
    }

    /// (a·b)·c as a linear expression in the soft variables, or `None`
    /// when a variable would multiply a variable.
    fn sym_left_assoc(
        &self,
        a: usize,
        b: usize,
        c: usize,
        vars: &BTreeMap<(usize, usize), usize>,
    ) -> Option<SymVec> {
        let ab = self.sym_pair(a, b, vars);
        self.sym_mul_right(ab, c, vars)
    }

    fn sym_right_assoc(
        &self,
        a: usize,
        b: usize,
        c: usize,
        vars: &BTreeMap<(usize, usize), usize>,
    ) -> Option<SymVec> {
        let bc = self.sym_pair(b, c, vars);
        self.sym_mul_left(a, bc, vars)
    }

    fn sym_mul_right(
        &self,
        v: SymVec,
        c: usize,
        vars: &BTreeMap<(usize, usize), usize>,
    ) -> Option<SymVec> {
        let mut out = SymVec::default();
        for (m, s) in v.known {
            let p = self.sym_pair(m, c, vars);
            out.add_scaled(&p, &s);
        }
        for ((m, var), s) in v.vars {
            // x_var · (e_m · e_c): the inner product must be known.
            let (x, y, _) = self.orient(m, c);
            if vars.contains_key(&(x, y)) {
                return None;
            }
            for (t, w) in self.mul_basis(m, c) {
                let e = out.vars.entry((t, var)).or_insert_with(Scalar::zero);
                *e += s.clone() * w;
                if e.is_zero() {
                    out.vars.remove(&(t, var));
                }
            }
        }
        Some(out)
    }

    fn sym_mul_left(
        &self,
        a: usize,
        v: SymVec,
        vars: &BTreeMap<(usize, usize), usize>,
    ) -> Option<SymVec> {
        let mut out = SymVec::default();
        for (m, s) in v.known {
            let p = self.sym_pair(a, m, vars);
            out.add_scaled(&p, &s);
        }
        for ((m, var), s) in v.vars {
            let (x, y, _) = self.orient(a, m);
            if vars.contains_key(&(x, y)) {
                return None;
            }
            for (t, w) in self.mul_basis(a, m) {
                let e = out.vars.entry((t, var)).or_insert_with(Scalar::zero);
                *e += s.clone() * w;
                if e.is_zero() {
                    out.vars.remove(&(t, var));
                }
            }
        }
        Some(out)
    }

    fn validate_associativity(&self) -> Result<(), FiniteAlgebraError> {
        let n = self.basis.len();
        let failure = (0..n * n).into_par_iter().find_map_first(|ab| {
            let (a, b) = (ab / n, ab % n);
            if a == self.unit || b == self.unit {
                return None;
            }
            for c in 0..n {
                if c == self.unit {
                    continue;
                }
                if self.basis[a].degree + self.basis[b].degree + self.basis[c].degree > self.top {
                    continue;
                }
                let lhs = self.mul(&self.mul_basis(a, b), &vec![(c, Scalar::one())]);
                let rhs = self.mul(&vec![(a, Scalar::one())], &self.mul_basis(b, c));
                if lhs != rhs {
                    return Some(self.contradiction_at(a, b, c));
                }
            }
            None
        });
        match failure {
            Some(err) => Err(err),
            None => Ok(()),
        }
    }
}

/// A vector of affine-linear expressions, indexed by global basis
/// coordinates: `known + Σ coeff · x_var` per coordinate.
#[derive(Default, Clone)]
struct SymVec {
    known: BTreeMap<usize, Scalar>,
    vars: BTreeMap<(usize, usize), Scalar>,
}

impl SymVec {
    fn from_known(v: SparseVec) -> SymVec {
        SymVec { known: v.into_iter().collect(), vars: BTreeMap::new() }
    }

    fn add_scaled(&mut self, other: &SymVec, s: &Scalar) {
        for (k, v) in &other.known {
            let e = self.known.entry(*k).or_insert_with(Scalar::zero);
            *e += s.clone() * v;
            if e.is_zero() {
                self.known.remove(k);
            }
        }
        for (k, v) in &other.vars {
            let e = self.vars.entry(*k).or_insert_with(Scalar::zero);
            *e += s.clone() * v;
            if e.is_zero() {
                self.vars.remove(k);
            }
        }
    }
}

/// One affine expression per coordinate of `lhs − rhs`.
struct CoordExpr {
    known: Scalar,
    vars: BTreeMap<usize, Scalar>,
}

fn diff_expressions(lhs: SymVec, rhs: SymVec) -> BTreeMap<usize, CoordExpr> {
    let mut out: BTreeMap<usize, CoordExpr> = BTreeMap::new();
    fn entry(out: &mut BTreeMap<usize, CoordExpr>, coord: usize) -> &mut CoordExpr {
        out.entry(coord).or_insert_with(|| CoordExpr {
            known: Scalar::zero(),
            vars: BTreeMap::new(),
        })
    }
    for (k, v) in lhs.known {
        entry(&mut out, k).known += v;
    }
    for (k, v) in rhs.known {
        entry(&mut out, k).known -= v;
    }
    for ((coord, var), v) in lhs.vars {
        *entry(&mut out, coord).vars.entry(var).or_insert_with(Scalar::zero) += v;
    }
    for ((coord, var), v) in rhs.vars {
        *entry(&mut out, coord).vars.entry(var).or_insert_with(Scalar::zero) -= v;
    }
    out.retain(|_, e| !e.known.is_zero() || e.vars.values().any(|v| !v.is_zero()));
    for e in out.values_mut() {
        e.vars.retain(|_, v| !v.is_zero());
    }
    out
}

/// Whether `aug` is a pivot column: the unit vector on it reduces to zero
/// exactly when some stored row leads there.
fn aug_is_pivot(rref: &Rref, aug: usize) -> bool {
    let probe: SparseVec = vec![(aug, Scalar::one())];
    rref.reduce(&probe).is_empty()
}

/// Builds a multiplication-table algebra from a presentation: generator
/// declarations (`ctx`), relations of the shape `generator·generator −
/// linear combination`, and degree-`top` pairings against the fundamental
/// class. Basis elements `one` and `vol` are adjoined. Unstated products
/// default to zero and may be repaired by associativity; see the module
/// documentation.
pub fn presented_quotient_table(
    name: impl Into<String>,
    ctx: &AlgebraContext,
    relations: &[Element],
    pairings: &[(String, String, Scalar)],
    top_degree: usize,
) -> Result<FiniteGradedAlgebra, FiniteAlgebraError> {
    let mut basis: Vec<(String, usize)> = vec![("one".into(), 0)];
    for g in ctx.generators() {
        basis.push((g.name.clone(), g.degree));
    }
    basis.push(("vol".into(), top_degree));
    let mut products: Vec<(String, String, Vec<(String, Scalar)>)> = Vec::new();
    for r in relations {
        let (l, rname, value) = split_relation(ctx, r)?;
        products.push((l, rname, value));
    }
    for (l, r, s) in pairings {
        let li = ctx
            .index_of(l)
            .ok_or_else(|| FiniteAlgebraError::UnknownName(l.clone()))?;
        let ri = ctx
            .index_of(r)
            .ok_or_else(|| FiniteAlgebraError::UnknownName(r.clone()))?;
        if ctx.degree_of(li) + ctx.degree_of(ri) != top_degree {
            return Err(FiniteAlgebraError::BadPairingDegree {
                left: l.clone(),
                right: r.clone(),
                top: top_degree,
            });
        }
        let value = if s.is_zero() { Vec::new() } else { vec![("vol".into(), s.clone())] };
        products.push((l.clone(), r.clone(), value));
    }
    FiniteGradedAlgebra::from_table(TableSpec {
        name: name.into(),
        top_degree,
        basis,
        products,
    })
}

/// Splits `g·h − Σ c_k g_k = 0` into a pinned product. The relation must
/// contain exactly one quadratic monomial; the rest must be linear.
fn split_relation(
    ctx: &AlgebraContext,
    r: &Element,
) -> Result<(String, String, Vec<(String, Scalar)>), FiniteAlgebraError> {
    let mut quadratic: Option<(String, String, Scalar)> = None;
    let mut linear: Vec<(String, Scalar)> = Vec::new();
    for (m, c) in r.terms() {
        let total: u32 = m.factors().iter().map(|&(_, e)| e).sum();
        match total {
            1 => {
                let (g, _) = m.factors()[0];
                linear.push((ctx.generator(g).name.clone(), c.clone()));
            }
            2 => {
                if quadratic.is_some() {
                    return Err(FiniteAlgebraError::InvalidRelation(r.render()));
                }
                let (l, rr) = match m.factors() {
                    [(g, 2)] => (*g, *g),
                    [(g, 1), (h, 1)] => (*g, *h),
                    _ => return Err(FiniteAlgebraError::InvalidRelation(r.render())),
                };
                quadratic = Some((
                    ctx.generator(l).name.clone(),
                    ctx.generator(rr).name.clone(),
                    c.clone(),
                ));
            }
            _ => return Err(FiniteAlgebraError::InvalidRelation(r.render())),
        }
    }
    let (l, rr, q) = quadratic.ok_or_else(|| FiniteAlgebraError::InvalidRelation(r.render()))?;
    let inv = -Scalar::one() / q;
    let value = linear.into_iter().map(|(n, c)| (n, c * inv.clone())).collect();
    Ok((l, rr, value))
}
