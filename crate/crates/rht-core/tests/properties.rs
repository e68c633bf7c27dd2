//! Randomized law checks for the algebra kernel and the Massey product.
//!
//! Each suite runs 1000 cases. Random elements are described by plain data
//! (`Pick`) and realized against a fixture algebra inside the test body, so
//! shrinking stays meaningful: a failing case prints the degree and the
//! coefficient picks that produced it.

use std::sync::OnceLock;

use num_traits::Zero;
use proptest::prelude::*;

use rht_core::cdga::{heisenberg, Cdga};
use rht_core::formality::triple_massey;
use rht_core::graded::{make_context, Element};
use rht_core::linalg::SparseVec;
use rht_core::scalar::{ratio, scalar, Scalar};

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Three structurally different algebras: a free CDGA on odd generators, a
/// mixed-degree free CDGA whose differential has even and odd sources, and
/// a quotient with both an odd-product and a truncation relation.
fn fixtures() -> &'static Vec<Cdga> {
    static FIXTURES: OnceLock<Vec<Cdga>> = OnceLock::new();
    FIXTURES.get_or_init(|| vec![heisenberg(), e4(), truncated()])
}

/// Λ(s,x,y,q,z,w) with ds = q, dz = x·y, dw = y²; |s| = 1, |x|=|y|=|q| = 2,
/// |z|=|w| = 3. Every product of x, y, and q is exact, so Massey triples in
/// the span of {x + αq, y + βq} are always defined.
fn e4() -> Cdga {
    let ctx =
        make_context([("s", 1), ("x", 2), ("y", 2), ("q", 2), ("z", 3), ("w", 3)]).unwrap();
    let x = Element::generator(&ctx, 1);
    let y = Element::generator(&ctx, 2);
    let q = Element::generator(&ctx, 3);
    let zero = Element::zero(&ctx);
    let diffs = vec![
        q,
        zero.clone(),
        zero.clone(),
        zero,
        x.mul(&y).unwrap(),
        y.mul(&y).unwrap(),
    ];
    Cdga::new("e4", ctx, diffs).unwrap()
}

/// Λ(a,b,x)/(a·b, x³) with |a|=|b| = 1, |x| = 2 and zero differential:
/// multiplication goes through normal forms, which the laws must survive.
fn truncated() -> Cdga {
    let ctx = make_context([("a", 1), ("b", 1), ("x", 2)]).unwrap();
    let a = Element::generator(&ctx, 0);
    let b = Element::generator(&ctx, 1);
    let x = Element::generator(&ctx, 2);
    let zero = Element::zero(&ctx);
    let relations = vec![a.mul(&b).unwrap(), x.mul(&x).unwrap().mul(&x).unwrap()];
    Cdga::with_relations("truncated", ctx, vec![zero.clone(), zero.clone(), zero], relations)
        .unwrap()
}

// ---------------------------------------------------------------------------
// Random elements
// ---------------------------------------------------------------------------

/// A homogeneous element by recipe: up to three terms, each a basis slot
/// (taken modulo the basis size at realization time) with a small rational
/// coefficient.
#[derive(Debug, Clone)]
struct Pick {
    degree: usize,
    terms: Vec<(usize, i64, i64)>,
}

fn arb_pick(max_degree: usize) -> impl Strategy<Value = Pick> {
    (1..=max_degree, prop::collection::vec((any::<usize>(), -9..=9i64, 1..=4i64), 0..=3))
        .prop_map(|(degree, terms)| Pick { degree, terms })
}

fn realize(alg: &Cdga, pick: &Pick) -> Element {
    let basis = alg.component_basis(pick.degree).unwrap();
    let mut e = Element::zero(alg.context());
    if basis.is_empty() {
        return e;
    }
    for (slot, num, den) in &pick.terms {
        let b = &basis[slot % basis.len()];
        e = e.add(&b.scale(&ratio(*num, *den))).unwrap();
    }
    e
}

fn arb_fixture() -> impl Strategy<Value = usize> {
    0..fixtures().len()
}

fn koszul_sign(p: usize, q: usize) -> Scalar {
    if p % 2 == 1 && q % 2 == 1 {
        -scalar(1)
    } else {
        scalar(1)
    }
}

// ---------------------------------------------------------------------------
// Algebra laws
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// a·b = (−1)^{|a||b|} b·a for homogeneous a, b.
    #[test]
    fn koszul_commutativity(fi in arb_fixture(), p in arb_pick(5), q in arb_pick(5)) {
        let alg = &fixtures()[fi];
        let a = realize(alg, &p);
        let b = realize(alg, &q);
        let ab = alg.mul(&a, &b).unwrap();
        let ba = alg.mul(&b, &a).unwrap();
        prop_assert_eq!(ab, ba.scale(&koszul_sign(p.degree, q.degree)));
    }

    /// (a·b)·c = a·(b·c), including through quotient normal forms and for
    /// inhomogeneous operands.
    #[test]
    fn associativity(
        fi in arb_fixture(),
        p1 in arb_pick(4), p2 in arb_pick(4),
        q in arb_pick(4), r in arb_pick(4),
    ) {
        let alg = &fixtures()[fi];
        let a = realize(alg, &p1).add(&realize(alg, &p2)).unwrap();
        let b = realize(alg, &q);
        let c = realize(alg, &r);
        let left = alg.mul(&alg.mul(&a, &b).unwrap(), &c).unwrap();
        let right = alg.mul(&a, &alg.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    /// d(a·b) = d(a)·b + (−1)^{|a|} a·d(b) for homogeneous a.
    #[test]
    fn leibniz(fi in arb_fixture(), p in arb_pick(5), q in arb_pick(5)) {
        let alg = &fixtures()[fi];
        let a = realize(alg, &p);
        let b = realize(alg, &q);
        let lhs = alg.differentiate(&alg.mul(&a, &b).unwrap()).unwrap();
        let da_b = alg.mul(&alg.differentiate(&a).unwrap(), &b).unwrap();
        let a_db = alg.mul(&a, &alg.differentiate(&b).unwrap()).unwrap();
        let rhs = da_b.add(&a_db.scale(&koszul_sign(p.degree, 1))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// d² = 0 on arbitrary (inhomogeneous) elements.
    #[test]
    fn d_squared_zero(fi in arb_fixture(), p1 in arb_pick(5), p2 in arb_pick(5)) {
        let alg = &fixtures()[fi];
        let e = realize(alg, &p1).add(&realize(alg, &p2)).unwrap();
        let dde = alg.differentiate(&alg.differentiate(&e).unwrap()).unwrap();
        prop_assert!(dde.is_zero(), "d²(e) = {}", dde.render());
    }

    /// Coboundaries have zero cohomology class: class_of ∘ d = 0.
    #[test]
    fn class_of_d_zero(fi in arb_fixture(), p in arb_pick(5)) {
        let alg = &fixtures()[fi];
        let e = realize(alg, &p);
        let de = alg.differentiate(&e).unwrap();
        let class = alg.class_of_in_degree(&de, p.degree + 1).unwrap();
        prop_assert!(class.iter().all(|c| c.is_zero()));
    }
}

// ---------------------------------------------------------------------------
// Massey product laws (on the e4 fixture)
// ---------------------------------------------------------------------------

/// αx + βq — closed for every α, β, and its products with any other such
/// element are exact, so ⟨·,·,·⟩ is defined on these.
fn xq(alg: &Cdga, alpha: i64, beta: i64) -> Element {
    let x = Element::generator(alg.context(), 1);
    let q = Element::generator(alg.context(), 3);
    x.scale(&scalar(alpha)).add(&q.scale(&scalar(beta))).unwrap()
}

fn yq(alg: &Cdga, alpha: i64, beta: i64) -> Element {
    let y = Element::generator(alg.context(), 2);
    let q = Element::generator(alg.context(), 3);
    y.scale(&scalar(alpha)).add(&q.scale(&scalar(beta))).unwrap()
}

/// d(σ·s): the coboundary perturbation available in degree 2.
fn coboundary(alg: &Cdga, sigma: i64) -> Element {
    let s = Element::generator(alg.context(), 0);
    alg.differentiate(&s.scale(&scalar(sigma))).unwrap()
}

fn class_coords(alg: &Cdga, e: &Element, degree: usize) -> SparseVec {
    alg.class_of_in_degree(e, degree)
        .unwrap()
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// The chosen Massey representative is a cocycle.
    #[test]
    fn massey_representative_closed(
        a1 in 1..=9i64, a2 in -9..=9i64,
        b1 in 1..=9i64, b2 in -9..=9i64,
        c1 in 1..=9i64, c2 in -9..=9i64,
    ) {
        let alg = &fixtures()[1];
        let a = xq(alg, a1, a2);
        let b = yq(alg, b1, b2);
        let c = yq(alg, c1, c2);
        let result = triple_massey(alg, &a, &b, &c).unwrap();
        let dr = alg.differentiate(&result.representative).unwrap();
        prop_assert!(dr.is_zero(), "d(representative) = {}", dr.render());
    }

    /// Replacing each input by a cohomologous cocycle moves the
    /// representative's class only within the indeterminacy subspace and
    /// never changes the verdict.
    #[test]
    fn massey_coboundary_invariance(
        a1 in 1..=9i64, b1 in 1..=9i64, c1 in 1..=9i64,
        s1 in -9..=9i64, s2 in -9..=9i64, s3 in -9..=9i64,
    ) {
        let alg = &fixtures()[1];
        let a = xq(alg, a1, 0);
        let b = yq(alg, b1, 0);
        let c = yq(alg, c1, 0);
        let r1 = triple_massey(alg, &a, &b, &c).unwrap();

        let a2 = a.add(&coboundary(alg, s1)).unwrap();
        let b2 = b.add(&coboundary(alg, s2)).unwrap();
        let c2 = c.add(&coboundary(alg, s3)).unwrap();
        let r2 = triple_massey(alg, &a2, &b2, &c2).unwrap();

        prop_assert_eq!(r1.vanishes, r2.vanishes);
        prop_assert!(r1.indeterminacy.is_subspace_of(&r2.indeterminacy));
        prop_assert!(r2.indeterminacy.is_subspace_of(&r1.indeterminacy));

        let k1 = class_coords(alg, &r1.representative, r1.degree);
        let k2 = class_coords(alg, &r2.representative, r2.degree);
        let mut diff = k1;
        for (idx, coeff) in k2 {
            match diff.iter_mut().find(|(i, _)| *i == idx) {
                Some((_, c)) => *c -= coeff,
                None => diff.push((idx, -coeff)),
            }
        }
        diff.retain(|(_, c)| !c.is_zero());
        diff.sort_by_key(|(i, _)| *i);
        prop_assert!(
            r1.indeterminacy.contains(&diff),
            "class moved outside the indeterminacy subspace"
        );
    }
}
