//! Degreewise cohomology of a [`Cdga`].
//!
//! Everything is computed in the component coordinates of the algebra (so
//! relation quotients are handled transparently): the degree-`d` cochain
//! space is spanned by the surviving monomials, the differential is a
//! sparse matrix between neighbouring components, and `H^d = ker/im` comes
//! out of exact row reduction.
//!
//! Representatives are *echelon-leading*: walking the canonical cocycle
//! basis in order, a cocycle is kept as a representative exactly when it
//! enlarges the span of the coboundaries collected so far. This makes the
//! representative list (and everything derived from it, e.g. minimal-model
//! steps) reproducible.

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cdga::{Cdga, CdgaError};
use crate::graded::Element;
use crate::linalg::{MatrixQ, Rref, SparseVec, SubspaceBasis};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CohomologyError {
    #[error("element is not closed: d(e) = `{0}`")]
    NotClosed(String),
    #[error("element is not homogeneous; pass an explicit degree")]
    NotHomogeneous,
    #[error(transparent)]
    Cdga(#[from] CdgaError),
}

/// Exact cohomology data in one degree.
pub struct CohomologyComponent {
    pub degree: usize,
    /// Betti number: number of representatives.
    pub dim: usize,
    /// Kernel of d in component coordinates of the degree.
    pub cocycles: SubspaceBasis,
    /// Image of d from one degree below.
    pub coboundaries: SubspaceBasis,
    /// Echelon-leading representative cocycles.
    pub representatives: Vec<Element>,
    /// Component coordinates of the representatives.
    rep_coords: Vec<SparseVec>,
    /// Tracking echelon over [coboundary rows ++ representative rows]:
    /// expressing a closed vector over it yields its class coordinates.
    solver: Rref,
    /// Number of coboundary rows inserted into `solver` before the
    /// representatives.
    solver_offset: usize,
}

impl Cdga {
    /// The sparse matrix of d : A^d → A^{d+1} in component coordinates;
    /// row `j` is the image of the `j`-th surviving monomial.
    pub fn differential_matrix(&self, d: usize) -> Result<MatrixQ, CdgaError> {
        let n = self.dim(d)?;
        let m = self.dim(d + 1)?;
        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let e = self.element_from_component(d, &vec![(j, Scalar::one())])?;
            let de = self.differentiate(&e)?;
            rows.push(if de.is_zero() {
                Vec::new()
            } else {
                self.component_coords(&de, d + 1)?
            });
        }
        Ok(MatrixQ::from_rows(m, rows))
    }

    /// Canonical basis of the closed subspace of `A^d`.
    pub fn cocycles(&self, d: usize) -> Result<SubspaceBasis, CdgaError> {
        Ok(self.cohomology(d)?.cocycles.clone())
    }

    /// Canonical basis of `d(A^{d−1}) ⊆ A^d`.
    pub fn coboundaries(&self, d: usize) -> Result<SubspaceBasis, CdgaError> {
        Ok(self.cohomology(d)?.coboundaries.clone())
    }

    pub fn cohomology(&self, d: usize) -> Result<Arc<CohomologyComponent>, CdgaError> {
        if let Some(hit) = self.cohomology_cache.lock().unwrap().get(&d) {
            return Ok(hit.clone());
        }
        let cocycles = self.differential_matrix(d)?.kernel();
        let coboundaries = if d == 0 {
            SubspaceBasis::empty(self.dim(0)?)
        } else {
            self.differential_matrix(d - 1)?.row_space()
        };
        debug_assert!(coboundaries.is_subspace_of(&cocycles));
        // Echelon-leading representatives: cocycle basis vectors that
        // enlarge the coboundary echelon, in canonical order.
        let mut probe = Rref::new(self.dim(d)?);
        for row in coboundaries.rows() {
            probe.insert(row.clone());
        }
        let mut rep_coords = Vec::new();
        for row in cocycles.rows() {
            if probe.insert(row.clone()) {
                rep_coords.push(row.clone());
            }
        }
        let representatives = rep_coords
            .iter()
            .map(|v| self.element_from_component(d, v))
            .collect::<Result<Vec<_>, _>>()?;
        // Solver: coboundary basis first, then representatives. The stack
        // is linearly independent, so class coordinates are unique.
        let mut solver = Rref::new_tracking(self.dim(d)?);
        for row in coboundaries.rows() {
            solver.insert(row.clone());
        }
        let solver_offset = coboundaries.dim();
        for row in &rep_coords {
            solver.insert(row.clone());
        }
        let comp = Arc::new(CohomologyComponent {
            degree: d,
            dim: rep_coords.len(),
            cocycles,
            coboundaries,
            representatives,
            rep_coords,
            solver,
            solver_offset,
        });
        Ok(self
            .cohomology_cache
            .lock()
            .unwrap()
            .entry(d)
            .or_insert_with(|| comp.clone())
            .clone())
    }

    /// Betti numbers `b_0 .. b_{d_max}`.
    pub fn betti(&self, d_max: usize) -> Result<Vec<usize>, CdgaError> {
        (0..=d_max).map(|d| Ok(self.cohomology(d)?.dim)).collect()
    }

    /// Coordinates of the class of a closed homogeneous element in the
    /// representative basis of its degree; the zero vector exactly when
    /// the element is exact.
    pub fn class_of(&self, e: &Element) -> Result<Vec<Scalar>, CohomologyError> {
        let d = e.degree().ok_or(CohomologyError::NotHomogeneous)?;
        self.class_of_in_degree(e, d)
    }

    /// As [`Cdga::class_of`], with the degree given explicitly (needed for
    /// the zero element).
    pub fn class_of_in_degree(&self, e: &Element, d: usize) -> Result<Vec<Scalar>, CohomologyError> {
        let de = self.differentiate(e)?;
        if !de.is_zero() {
            return Err(CohomologyError::NotClosed(de.render()));
        }
        let comp = self.cohomology(d)?;
        let v = self.component_coords(e, d)?;
        let x = comp
            .solver
            .express(&v)
            .expect("closed vectors lie in coboundaries + representatives");
        let mut out = vec![Scalar::zero(); comp.dim];
        for (i, c) in x {
            if i >= comp.solver_offset {
                out[i - comp.solver_offset] = c;
            }
        }
        Ok(out)
    }

    /// True when the closed element is a coboundary.
    pub fn is_exact(&self, e: &Element, d: usize) -> Result<bool, CohomologyError> {
        Ok(self.class_of_in_degree(e, d)?.iter().all(|c| c.is_zero()))
    }
}

impl CohomologyComponent {
    pub fn representative_coords(&self) -> &[SparseVec] {
        &self.rep_coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdga::heisenberg;
    use crate::graded::make_context;

    fn s2_model() -> Cdga {
        let ctx = make_context([("x", 2), ("y", 3)]).unwrap();
        let x = Element::generator(&ctx, 0);
        Cdga::new("s2", ctx.clone(), vec![Element::zero(&ctx), x.mul(&x).unwrap()]).unwrap()
    }

    #[test]
    fn heisenberg_betti() {
        let h = heisenberg();
        assert_eq!(h.betti(3).unwrap(), [1, 2, 2, 1]);
        // H¹ representatives are the echelon-leading closed generators.
        let comp = h.cohomology(1).unwrap();
        let ctx = h.context();
        assert_eq!(
            comp.representatives,
            vec![Element::generator(ctx, 0), Element::generator(ctx, 1)]
        );
        // [x·y] = 0 (it is dz).
        let xy = Element::generator(ctx, 0).mul(&Element::generator(ctx, 1)).unwrap();
        assert!(h.is_exact(&xy, 2).unwrap());
        // [x·z] ≠ 0.
        let xz = Element::generator(ctx, 0).mul(&Element::generator(ctx, 2)).unwrap();
        assert!(!h.is_exact(&xz, 2).unwrap());
    }

    #[test]
    fn sphere_model_betti() {
        let a = s2_model();
        assert_eq!(a.betti(5).unwrap(), [1, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn zero_differential_betti_equals_dims() {
        let ctx = make_context([("x", 2)]).unwrap();
        let x = Element::generator(&ctx, 0);
        let x3 = x.mul(&x).unwrap().mul(&x).unwrap();
        let a = Cdga::with_relations("cp2", ctx.clone(), vec![Element::zero(&ctx)], vec![x3])
            .unwrap();
        assert_eq!(a.betti(5).unwrap(), [1, 0, 1, 0, 1, 0]);
        for d in 0..=5 {
            assert_eq!(a.cohomology(d).unwrap().dim, a.dim(d).unwrap());
        }
    }

    #[test]
    fn euler_characteristic_matches() {
        // Σ(−1)^d dim A^d = Σ(−1)^d b_d on bounded complexes.
        let h = heisenberg();
        let dims: i64 = (0..=3).map(|d| h.dim(d).unwrap() as i64 * if d % 2 == 0 { 1 } else { -1 }).sum();
        let betti: i64 = h
            .betti(3)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(d, b)| *b as i64 * if d % 2 == 0 { 1 } else { -1 })
            .sum();
        assert_eq!(dims, betti);
        assert_eq!(dims, 0);
    }

    #[test]
    fn coboundaries_inside_cocycles() {
        let a = s2_model();
        for d in 0..=6 {
            let comp = a.cohomology(d).unwrap();
            assert!(comp.coboundaries.is_subspace_of(&comp.cocycles), "degree {d}");
        }
    }

    #[test]
    fn class_of_differential_vanishes() {
        let h = heisenberg();
        let ctx = h.context();
        let z = Element::generator(ctx, 2);
        let de = h.differentiate(&z).unwrap();
        assert!(!de.is_zero());
        let class = h.class_of_in_degree(&de, 2).unwrap();
        assert!(class.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn not_closed_is_reported() {
        let a = s2_model();
        let y = Element::generator(a.context(), 1);
        assert!(matches!(
            a.class_of(&y),
            Err(CohomologyError::NotClosed(_))
        ));
    }

    #[test]
    fn kuenneth_on_sphere_product() {
        // model(S²) ⊗ model(S³): Betti (1,0,1,1,0,1) through degree 5.
        let s2 = s2_model();
        let c = make_context([("u", 3)]).unwrap();
        let s3 = Cdga::new("s3", c.clone(), vec![Element::zero(&c)]).unwrap();
        let t = s2.tensor(&s3).unwrap();
        assert_eq!(t.betti(5).unwrap(), [1, 0, 1, 1, 0, 1]);
    }

    #[test]
    fn kodaira_thurston_first_betti() {
        // Heisenberg ⊗ Λ(t₁): b₁ = 3.
        let h = heisenberg();
        let c = make_context([("t", 1)]).unwrap();
        let circle = Cdga::new("s1", c.clone(), vec![Element::zero(&c)]).unwrap();
        let kt = h.tensor(&circle).unwrap();
        assert_eq!(kt.betti(4).unwrap(), [1, 3, 4, 3, 1]);
    }
}
