//! Commutative differential graded algebras.
//!
//! A [`Cdga`] couples an [`AlgebraContext`] with a differential (given on
//! generators, extended as a graded derivation) and an optional list of
//! homogeneous relations generating a differential graded ideal. With
//! relations present, the degree-`d` component is the quotient of the free
//! degree-`d` span by the ideal's degree-`d` span; elements are kept in
//! normal form (reduced modulo the ideal), so two equal quotient elements
//! are structurally equal.
//!
//! Validation at construction time:
//! * each `d(generator)` is homogeneous of degree `|gen| + 1`,
//! * `d²(gen)` lies in the ideal (zero in the quotient) for every generator,
//! * `d(relation)` lies in the ideal, which is exactly the condition for
//!   the differential to descend (the ideal is spanned by `monomial ·
//!   relation` products, and `d(m·r) = (dm)·r ± m·(dr)` with the first term
//!   always in the ideal).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::One;
use thiserror::Error;

use crate::graded::{AlgebraContext, AlgebraError, Element, Monomial};
use crate::linalg::{sv_collect, SparseVec, SubspaceBasis};
use crate::scalar::{sign_pow, Scalar};

/// Hard ceiling on per-degree computations; a caller-supplied cap below
/// this can be installed with [`Cdga::set_degree_cap`].
pub const MAX_DEGREE: usize = 512;

#[derive(Debug, Error)]
pub enum CdgaError {
    #[error("d({generator}) must be homogeneous of degree {expected}, got `{found}`")]
    DegreeViolation {
        generator: String,
        expected: usize,
        found: String,
    },
    #[error("d² ≠ 0 on generator `{generator}`: residual `{residual}`")]
    DSquaredNonzero { generator: String, residual: String },
    #[error("relation `{relation}` is not homogeneous (or is zero)")]
    RelationNotHomogeneous { relation: String },
    #[error("differential does not descend: d({relation}) = `{image}` is not in the ideal")]
    DifferentialDoesNotDescend { relation: String, image: String },
    #[error("degree {0} exceeds the configured cap {1}")]
    DegreeOverflow(usize, usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Per-degree quotient data: the ideal's span in free coordinates and the
/// free basis columns surviving into the quotient (the non-pivot columns,
/// whose monomials are their own normal forms).
pub struct QuotientData {
    pub ideal: SubspaceBasis,
    pub rep_cols: Vec<usize>,
}

pub struct Cdga {
    name: String,
    ctx: AlgebraContext,
    diff: Vec<Element>,
    relations: Vec<Element>,
    degree_cap: usize,
    quotient_cache: Mutex<HashMap<usize, Arc<QuotientData>>>,
    pub(crate) cohomology_cache: Mutex<HashMap<usize, Arc<crate::cohomology::CohomologyComponent>>>,
}

impl Clone for Cdga {
    fn clone(&self) -> Cdga {
        Cdga {
            name: self.name.clone(),
            ctx: self.ctx.clone(),
            diff: self.diff.clone(),
            relations: self.relations.clone(),
            degree_cap: self.degree_cap,
            quotient_cache: Mutex::new(HashMap::new()),
            cohomology_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl std::fmt::Debug for Cdga {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Cdga({}, {} generators, {} relations)",
            self.name,
            self.ctx.len(),
            self.relations.len()
        )
    }
}

impl Cdga {
    /// A free CDGA: context plus differential, no relations.
    pub fn new(
        name: impl Into<String>,
        ctx: AlgebraContext,
        diff: Vec<Element>,
    ) -> Result<Cdga, CdgaError> {
        Cdga::with_relations(name, ctx, diff, Vec::new())
    }

    /// A CDGA presented with relations generating a DG ideal.
    pub fn with_relations(
        name: impl Into<String>,
        ctx: AlgebraContext,
        diff: Vec<Element>,
        relations: Vec<Element>,
    ) -> Result<Cdga, CdgaError> {
        assert_eq!(diff.len(), ctx.len(), "one differential image per generator");
        for (i, img) in diff.iter().enumerate() {
            let g = ctx.generator(i);
            if !img.is_zero() && img.degree() != Some(g.degree + 1) {
                return Err(CdgaError::DegreeViolation {
                    generator: g.name.clone(),
                    expected: g.degree + 1,
                    found: img.render(),
                });
            }
        }
        for r in &relations {
            if r.is_zero() || r.degree().is_none() {
                return Err(CdgaError::RelationNotHomogeneous { relation: r.render() });
            }
        }
        let a = Cdga {
            name: name.into(),
            ctx,
            diff,
            relations,
            degree_cap: MAX_DEGREE,
            quotient_cache: Mutex::new(HashMap::new()),
            cohomology_cache: Mutex::new(HashMap::new()),
        };
        // The ideal is d-stable iff each d(relation) lies in it.
        for r in &a.relations {
            let dr = a.differentiate_free(r);
            if !a.normal_form(&dr)?.is_zero() {
                return Err(CdgaError::DifferentialDoesNotDescend {
                    relation: r.render(),
                    image: dr.render(),
                });
            }
        }
        // d² vanishes on generators iff it vanishes everywhere (derivation
        // of odd degree); with relations, "vanishes" means "in the ideal".
        for i in 0..a.ctx.len() {
            let dd = a.differentiate_free(&a.diff[i]);
            let residual = a.normal_form(&dd)?;
            if !residual.is_zero() {
                return Err(CdgaError::DSquaredNonzero {
                    generator: a.ctx.generator(i).name.clone(),
                    residual: residual.render(),
                });
            }
        }
        Ok(a)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn relations(&self) -> &[Element] {
        &self.relations
    }

    pub fn has_relations(&self) -> bool {
        !self.relations.is_empty()
    }

    pub fn differential_of(&self, gen: usize) -> &Element {
        &self.diff[gen]
    }

    pub fn set_degree_cap(&mut self, cap: usize) {
        self.degree_cap = cap.min(MAX_DEGREE);
    }

    pub fn check_degree(&self, d: usize) -> Result<(), CdgaError> {
        if d > self.degree_cap {
            Err(CdgaError::DegreeOverflow(d, self.degree_cap))
        } else {
            Ok(())
        }
    }

    /// The graded derivation extending the generator images, *without*
    /// normal-form reduction. Internal building block.
    pub(crate) fn differentiate_free(&self, e: &Element) -> Element {
        let mut out = Element::zero(&self.ctx);
        for (m, c) in e.terms() {
            self.d_monomial_into(m, c, &mut out);
        }
        out
    }

    fn d_monomial_into(&self, m: &Monomial, coeff: &Scalar, out: &mut Element) {
        // d(g1^e1 ⋯ gk^ek) = Σ_i (−1)^{deg(prefix_i)} e_i · prefix_i ·
        // g_i^{e_i−1} · d(g_i) · suffix_i, where prefix_i = g1^e1 ⋯
        // g_{i−1}^{e_{i−1}}. Multiplying the pieces in place lets the graded
        // product supply all Koszul commutation signs; the only explicit
        // sign is the Leibniz prefix sign. (g_i^{e_i−1} may be folded into
        // the prefix: either g_i is even and commutes freely, or e_i = 1.)
        let factors = m.factors();
        let mut prefix_degree = 0usize;
        for (pos, &(g, e)) in factors.iter().enumerate() {
            let dg = &self.diff[g];
            let gdeg = self.ctx.degree_of(g);
            if !dg.is_zero() {
                let mut left = Element::one(&self.ctx);
                for (qos, &(h, f)) in factors.iter().enumerate().take(pos + 1) {
                    let f = if qos == pos { f - 1 } else { f };
                    for _ in 0..f {
                        left = left.mul(&Element::generator(&self.ctx, h)).expect("same ctx");
                    }
                }
                let mut term = left.mul(dg).expect("same ctx");
                for &(h, f) in factors.iter().skip(pos + 1) {
                    for _ in 0..f {
                        term = term.mul(&Element::generator(&self.ctx, h)).expect("same ctx");
                    }
                }
                let mult = Scalar::from_integer((e as i64).into())
                    * sign_pow(prefix_degree)
                    * coeff.clone();
                out.add_term_element(&term.scale(&mult));
            }
            prefix_degree += gdeg * e as usize;
        }
    }

    /// d in the quotient: derivation followed by normal form.
    pub fn differentiate(&self, e: &Element) -> Result<Element, CdgaError> {
        if e.context() != &self.ctx {
            return Err(AlgebraError::ContextMismatch.into());
        }
        let free = self.differentiate_free(e);
        self.normal_form(&free)
    }

    /// Product in the quotient: free product followed by normal form.
    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element, CdgaError> {
        let free = a.mul(b)?;
        self.normal_form(&free)
    }

    /// Reduces an element modulo the relation ideal, degree component by
    /// degree component. Identity when no relations are present.
    pub fn normal_form(&self, e: &Element) -> Result<Element, CdgaError> {
        if self.relations.is_empty() || e.is_zero() {
            return Ok(e.clone());
        }
        let mut by_degree: std::collections::BTreeMap<usize, Vec<(usize, Scalar)>> =
            std::collections::BTreeMap::new();
        for (m, c) in e.terms() {
            let d = self.ctx.monomial_degree(m);
            by_degree
                .entry(d)
                .or_default()
                .push((self.ctx.basis_index(m).expect("canonical monomial"), c.clone()));
        }
        let mut out = Element::zero(&self.ctx);
        for (d, coords) in by_degree {
            let q = self.quotient_data(d)?;
            let reduced = q.ideal.reduce(&sv_collect(coords));
            out.add_term_element(&Element::from_coords(&self.ctx, d, reduced));
        }
        Ok(out)
    }

    /// Ideal span and surviving columns in degree `d` (cached).
    pub fn quotient_data(&self, d: usize) -> Result<Arc<QuotientData>, CdgaError> {
        self.check_degree(d)?;
        if let Some(hit) = self.quotient_cache.lock().unwrap().get(&d) {
            return Ok(hit.clone());
        }
        let ncols = self.ctx.basis(d).len();
        let mut rows: Vec<SparseVec> = Vec::new();
        for r in &self.relations {
            let rdeg = r.degree().expect("validated homogeneous");
            if rdeg > d {
                continue;
            }
            for m in self.ctx.basis(d - rdeg).iter() {
                let me = Element::from_terms(&self.ctx, [(m.clone(), Scalar::one())]);
                let prod = me.mul(r).expect("same ctx");
                if let Some(coords) = prod.coords(d) {
                    if !coords.is_empty() {
                        rows.push(coords);
                    }
                }
            }
        }
        let ideal = SubspaceBasis::from_rows(ncols, rows);
        let mut rep_cols = Vec::with_capacity(ncols - ideal.dim());
        let mut pivots = ideal.pivots().iter().peekable();
        for j in 0..ncols {
            if pivots.peek() == Some(&&j) {
                pivots.next();
            } else {
                rep_cols.push(j);
            }
        }
        let data = Arc::new(QuotientData { ideal, rep_cols });
        Ok(self
            .quotient_cache
            .lock()
            .unwrap()
            .entry(d)
            .or_insert_with(|| data.clone())
            .clone())
    }

    /// Dimension of the degree-`d` component (after the quotient).
    pub fn dim(&self, d: usize) -> Result<usize, CdgaError> {
        if self.relations.is_empty() {
            self.check_degree(d)?;
            return Ok(self.ctx.basis(d).len());
        }
        Ok(self.quotient_data(d)?.rep_cols.len())
    }

    /// Coordinates of a homogeneous (normal-form or not) element relative
    /// to the degree-`d` quotient basis of surviving monomials.
    pub fn component_coords(&self, e: &Element, d: usize) -> Result<SparseVec, CdgaError> {
        let nf = self.normal_form(e)?;
        let free = nf.coords(d).ok_or(AlgebraError::ContextMismatch);
        let free = match free {
            Ok(f) => f,
            Err(_) => {
                // Zero element or wrong degree: only zero is acceptable.
                if nf.is_zero() {
                    Vec::new()
                } else {
                    panic!("component_coords: element not homogeneous of degree {d}")
                }
            }
        };
        if self.relations.is_empty() {
            return Ok(sv_collect(free));
        }
        let q = self.quotient_data(d)?;
        let mut out = Vec::with_capacity(free.len());
        for (col, c) in free {
            let idx = q
                .rep_cols
                .binary_search(&col)
                .expect("normal form is supported on surviving columns");
            out.push((idx, c));
        }
        Ok(sv_collect(out))
    }

    /// Inverse of [`Cdga::component_coords`].
    pub fn element_from_component(&self, d: usize, coords: &SparseVec) -> Result<Element, CdgaError> {
        if self.relations.is_empty() {
            self.check_degree(d)?;
            return Ok(Element::from_coords(&self.ctx, d, coords.iter().cloned()));
        }
        let q = self.quotient_data(d)?;
        Ok(Element::from_coords(
            &self.ctx,
            d,
            coords.iter().map(|(i, c)| (q.rep_cols[*i], c.clone())),
        ))
    }

    /// The monomial basis elements surviving into the degree-`d` quotient.
    pub fn component_basis(&self, d: usize) -> Result<Vec<Element>, CdgaError> {
        let n = self.dim(d)?;
        (0..n)
            .map(|i| self.element_from_component(d, &vec![(i, Scalar::one())]))
            .collect()
    }

    /// Quotient by the DG ideal generated by `gens` (their differentials
    /// are adjoined automatically, so the ideal is d-stable by
    /// construction; validation still runs and reports any failure).
    pub fn quotient_complex(&self, gens: &[Element]) -> Result<Cdga, CdgaError> {
        let mut relations = self.relations.clone();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            if g.degree().is_none() {
                return Err(CdgaError::RelationNotHomogeneous { relation: g.render() });
            }
            relations.push(g.clone());
            let dg = self.differentiate_free(g);
            if !dg.is_zero() {
                relations.push(dg);
            }
        }
        Cdga::with_relations(
            format!("{}_quotient", self.name),
            self.ctx.clone(),
            self.diff.clone(),
            relations,
        )
    }

    /// Tensor product of CDGAs: disjoint union of generators (second
    /// factor's names deterministically suffixed on collision), with the
    /// differential and relations of both factors carried over. Koszul
    /// signs across the factors come from the shared graded structure.
    pub fn tensor(&self, other: &Cdga) -> Result<Cdga, CdgaError> {
        let mut names: Vec<(String, usize)> = self
            .ctx
            .generators()
            .iter()
            .map(|g| (g.name.clone(), g.degree))
            .collect();
        let taken: std::collections::HashSet<String> =
            names.iter().map(|(n, _)| n.clone()).collect();
        let mut taken = taken;
        for g in other.ctx.generators() {
            let mut candidate = g.name.clone();
            let mut k = 2;
            while taken.contains(&candidate) {
                candidate = format!("{}_{}", g.name, k);
                k += 1;
            }
            taken.insert(candidate.clone());
            names.push((candidate, g.degree));
        }
        let ctx = crate::graded::make_context(names)?;
        let offset = self.ctx.len();
        let mut diff = Vec::with_capacity(ctx.len());
        for i in 0..self.ctx.len() {
            diff.push(reindex(&self.diff[i], &ctx, 0));
        }
        for i in 0..other.ctx.len() {
            diff.push(reindex(&other.diff[i], &ctx, offset));
        }
        let mut relations = Vec::new();
        for r in &self.relations {
            relations.push(reindex(r, &ctx, 0));
        }
        for r in &other.relations {
            relations.push(reindex(r, &ctx, offset));
        }
        Cdga::with_relations(
            format!("{}x{}", self.name, other.name),
            ctx,
            diff,
            relations,
        )
    }
}

/// Rebuilds an element in a context whose generators include the original
/// ones at `offset + old_index` (names may differ; degrees must match).
pub(crate) fn reindex(e: &Element, ctx: &AlgebraContext, offset: usize) -> Element {
    let mut out = Element::zero(ctx);
    for (m, c) in e.terms() {
        let mut factor = Element::one(ctx);
        for &(g, ex) in m.factors() {
            debug_assert_eq!(
                e.context().degree_of(g),
                ctx.degree_of(g + offset),
                "reindex must preserve degrees"
            );
            for _ in 0..ex {
                factor = factor.mul(&Element::generator(ctx, g + offset)).expect("same ctx");
            }
        }
        out.add_term_element(&factor.scale(c));
    }
    out
}

impl Element {
    /// Adds a whole element termwise (both in the same context).
    pub(crate) fn add_term_element(&mut self, other: &Element) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c.clone());
        }
    }
}

/// Convenience constructor for the Heisenberg nilmanifold CDGA
/// Λ(x,y,z), |x|=|y|=|z|=1, dz = x·y. Used widely in tests.
pub fn heisenberg() -> Cdga {
    let ctx = crate::graded::make_context([("x", 1), ("y", 1), ("z", 1)]).unwrap();
    let x = Element::generator(&ctx, 0);
    let y = Element::generator(&ctx, 1);
    let dz = x.mul(&y).unwrap();
    let zero = Element::zero(&ctx);
    Cdga::new("heisenberg", ctx, vec![zero.clone(), zero, dz]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::make_context;
    use crate::scalar::scalar;

    #[test]
    fn heisenberg_is_valid() {
        let h = heisenberg();
        let ctx = h.context().clone();
        let x = Element::generator(&ctx, 0);
        let z = Element::generator(&ctx, 2);
        // d(x·z) = dx·z − x·dz = −x·(x·y) = 0.
        let xz = x.mul(&z).unwrap();
        assert!(h.differentiate(&xz).unwrap().is_zero());
        // d(1) = 0.
        assert!(h.differentiate(&Element::one(&ctx)).unwrap().is_zero());
        // d(z·z) = 0 trivially (z odd).
        assert!(h.differentiate(&z.mul(&z).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn degree_violation_is_rejected() {
        let ctx = make_context([("x", 1), ("z", 1)]).unwrap();
        let x = Element::generator(&ctx, 0);
        // dz = x drops degree.
        let err = Cdga::new("bad", ctx.clone(), vec![Element::zero(&ctx), x]).unwrap_err();
        assert!(matches!(err, CdgaError::DegreeViolation { .. }));
    }

    #[test]
    fn d_squared_violation_is_rejected() {
        // da = b, db = a·b: d²a = d(b) = a·b ≠ 0.
        let ctx = make_context([("a", 1), ("b", 2)]).unwrap();
        let a = Element::generator(&ctx, 0);
        let b = Element::generator(&ctx, 1);
        let err = Cdga::new("bad", ctx.clone(), vec![b.clone(), a.mul(&b).unwrap()]).unwrap_err();
        match err {
            CdgaError::DSquaredNonzero { generator, .. } => assert_eq!(generator, "a"),
            other => panic!("expected DSquaredNonzero, got {other:?}"),
        }
    }

    #[test]
    fn leibniz_on_powers() {
        // Λ(x₂, y₃; dy = x²): d(x·y) = x·dy = x³; d(y·x) likewise.
        let ctx = make_context([("x", 2), ("y", 3)]).unwrap();
        let x = Element::generator(&ctx, 0);
        let y = Element::generator(&ctx, 1);
        let dy = x.mul(&x).unwrap();
        let a = Cdga::new("s2", ctx.clone(), vec![Element::zero(&ctx), dy]).unwrap();
        let xy = x.mul(&y).unwrap();
        let x3 = x.mul(&x).unwrap().mul(&x).unwrap();
        assert_eq!(a.differentiate(&xy).unwrap(), x3);
        // d(x²·y) = x⁴ (the power rule contributes no extra factor here
        // since dx = 0; the only derivative lands on y).
        let x2y = x.mul(&xy).unwrap();
        let x4 = x.mul(&x3).unwrap();
        assert_eq!(a.differentiate(&x2y).unwrap(), x4);
        // d(y·x²) with y in front picks up sign (−1)^{|y|} twice... the
        // canonical form already absorbed the commutation, so the result
        // is identical.
        let yx2 = y.mul(&x).unwrap().mul(&x).unwrap();
        assert_eq!(a.differentiate(&yx2).unwrap(), x4);
    }

    #[test]
    fn leibniz_sign_past_odd_prefix() {
        // Λ(y₁, x₂, u₃; dx = u): d(y·x) = dy·x + (−1)^{|y|} y·dx = −y·u.
        let ctx = make_context([("y", 1), ("x", 2), ("u", 3)]).unwrap();
        let y = Element::generator(&ctx, 0);
        let x = Element::generator(&ctx, 1);
        let u = Element::generator(&ctx, 2);
        let a = Cdga::new(
            "sign",
            ctx.clone(),
            vec![Element::zero(&ctx), u.clone(), Element::zero(&ctx)],
        )
        .unwrap();
        let yx = y.mul(&x).unwrap();
        assert_eq!(a.differentiate(&yx).unwrap(), y.mul(&u).unwrap().neg());
    }

    #[test]
    fn power_rule_counts_copies() {
        // Λ(x₂, w₁? ...) use x even with dx = u (degree 3 gen u).
        let ctx = make_context([("x", 2), ("u", 3)]).unwrap();
        let x = Element::generator(&ctx, 0);
        let u = Element::generator(&ctx, 1);
        let a = Cdga::new("p", ctx.clone(), vec![u.clone(), Element::zero(&ctx)]).unwrap();
        // d(x³) = 3 x² u.
        let x3 = x.mul(&x).unwrap().mul(&x).unwrap();
        let expect = x.mul(&x).unwrap().mul(&u).unwrap().scale(&scalar(3));
        assert_eq!(a.differentiate(&x3).unwrap(), expect);
    }

    #[test]
    fn truncated_polynomial_algebra_dims() {
        // ℚ[x]/x³ as a CDGA with zero differential: dims 1,0,1,0,1,0,0.
        let ctx = make_context([("x", 2)]).unwrap();
        let x = Element::generator(&ctx, 0);
        let x3 = x.mul(&x).unwrap().mul(&x).unwrap();
        let a = Cdga::with_relations("cp2", ctx.clone(), vec![Element::zero(&ctx)], vec![x3])
            .unwrap();
        let dims: Vec<usize> = (0..=6).map(|d| a.dim(d).unwrap()).collect();
        assert_eq!(dims, [1, 0, 1, 0, 1, 0, 0]);
        // Normal form: x³ ≡ 0, x² survives.
        let x2 = x.mul(&x).unwrap();
        assert!(a.normal_form(&a.mul(&x2, &x).unwrap()).unwrap().is_zero());
        assert_eq!(a.normal_form(&x2).unwrap(), x2);
    }

    #[test]
    fn descent_failure_is_rejected() {
        // Quotient of Heisenberg by the non-DG ideal ⟨z⟩ alone: dz = xy is
        // not in the ideal, so construction must fail.
        let h = heisenberg();
        let ctx = h.context().clone();
        let z = Element::generator(&ctx, 2);
        let err = Cdga::with_relations(
            "bad",
            ctx.clone(),
            (0..3).map(|i| h.differential_of(i).clone()).collect(),
            vec![z],
        )
        .unwrap_err();
        assert!(matches!(err, CdgaError::DifferentialDoesNotDescend { .. }));
    }

    #[test]
    fn quotient_complex_adjoins_differentials() {
        // Heisenberg / ⟨z, dz⟩: dims (1, 2, 0, 0).
        let h = heisenberg();
        let z = Element::generator(h.context(), 2);
        let q = h.quotient_complex(&[z]).unwrap();
        let dims: Vec<usize> = (0..=3).map(|d| q.dim(d).unwrap()).collect();
        assert_eq!(dims, [1, 2, 0, 0]);
        // Quotient by {0} changes nothing.
        let q0 = h.quotient_complex(&[Element::zero(h.context())]).unwrap();
        let dims: Vec<usize> = (0..=3).map(|d| q0.dim(d).unwrap()).collect();
        assert_eq!(dims, [1, 3, 3, 1]);
    }

    #[test]
    fn component_coords_roundtrip_in_quotient() {
        let ctx = make_context([("x", 2), ("y", 2)]).unwrap();
        let x = Element::generator(&ctx, 0);
        let y = Element::generator(&ctx, 1);
        let rel = x.mul(&y).unwrap(); // kill the mixed product
        let a = Cdga::with_relations(
            "q",
            ctx.clone(),
            vec![Element::zero(&ctx), Element::zero(&ctx)],
            vec![rel],
        )
        .unwrap();
        assert_eq!(a.dim(4).unwrap(), 2); // x², y² survive
        let e = x.mul(&x).unwrap().add(&y.mul(&y).unwrap().scale(&scalar(7))).unwrap();
        let coords = a.component_coords(&e, 4).unwrap();
        assert_eq!(a.element_from_component(4, &coords).unwrap(), e);
        // x*y reduces to zero.
        assert!(a.component_coords(&x.mul(&y).unwrap(), 4).unwrap().is_empty());
    }

    #[test]
    fn tensor_dims_are_kuenneth() {
        // Λ(u₃) ⊗ Λ(x₂, y₃): componentwise dims multiply-convolve.
        let c1 = make_context([("u", 3)]).unwrap();
        let s3 = Cdga::new("s3", c1.clone(), vec![Element::zero(&c1)]).unwrap();
        let c2 = make_context([("x", 2), ("y", 3)]).unwrap();
        let x = Element::generator(&c2, 0);
        let s2 = Cdga::new(
            "s2",
            c2.clone(),
            vec![Element::zero(&c2), x.mul(&x).unwrap()],
        )
        .unwrap();
        let t = s3.tensor(&s2).unwrap();
        for d in 0..=8 {
            let expect: usize = (0..=d)
                .map(|k| s3.dim(k).unwrap() * s2.dim(d - k).unwrap())
                .sum();
            assert_eq!(t.dim(d).unwrap(), expect, "degree {d}");
        }
        // d² = 0 survived the merge (constructor validated), and the
        // differential acts correctly across factors: d(u·y) = −u·x².
        let u = Element::generator(t.context(), 0);
        let y = Element::generator(t.context(), 2);
        let xx = Element::generator(t.context(), 1);
        let expect = u.mul(&xx.mul(&xx).unwrap()).unwrap().neg();
        assert_eq!(t.differentiate(&u.mul(&y).unwrap()).unwrap(), expect);
    }

    #[test]
    fn tensor_renames_collisions() {
        let c1 = make_context([("x", 2)]).unwrap();
        let a = Cdga::new("a", c1.clone(), vec![Element::zero(&c1)]).unwrap();
        let b = Cdga::new("b", c1.clone(), vec![Element::zero(&c1)]).unwrap();
        let t = a.tensor(&b).unwrap();
        let names: Vec<&str> = t.context().generators().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["x", "x_2"]);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let mut h = heisenberg();
        h.set_degree_cap(2);
        assert!(matches!(h.dim(3).unwrap_err(), CdgaError::DegreeOverflow(3, 2)));
    }
}
