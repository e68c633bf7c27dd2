//! Free graded-commutative algebras over the rationals.
//!
//! A context fixes a finite list of positively-graded generators. Monomials
//! are kept in a canonical factor-sorted form with the Koszul sign folded
//! into the coefficient, so `y*x == -x*y` for odd generators and squares of
//! odd generators are identically zero. Degreewise monomial bases are
//! enumerated deterministically (degree first, then lexicographically by
//! generator index with higher exponents first) and cached per degree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{format_scalar, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("generator `{0}` has non-positive degree {1}")]
    NonPositiveDegree(String, isize),
    #[error("elements belong to different algebra contexts")]
    ContextMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

/// A named generator with its degree and position in the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: String,
    pub degree: usize,
    pub index: usize,
}

struct ContextInner {
    gens: Vec<GeneratorDecl>,
    by_name: HashMap<String, usize>,
    /// Degree -> sorted monomial basis. Filling is idempotent, so a plain
    /// mutex around the map is enough for concurrent sharing.
    basis_cache: Mutex<HashMap<usize, Arc<Vec<Monomial>>>>,
}

/// Shared, immutable generator table. Cheap to clone; equality compares the
/// generator lists so independently parsed copies of the same declarations
/// are interchangeable.
#[derive(Clone)]
pub struct AlgebraContext {
    inner: Arc<ContextInner>,
}

impl PartialEq for AlgebraContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.gens == other.inner.gens
    }
}
impl Eq for AlgebraContext {}

impl fmt::Debug for AlgebraContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraContext({} generators)", self.inner.gens.len())
    }
}

/// Builds a context from `(name, degree)` pairs, rejecting duplicate names
/// and non-positive degrees.
pub fn make_context<S: Into<String>>(
    decls: impl IntoIterator<Item = (S, usize)>,
) -> Result<AlgebraContext, AlgebraError> {
    let mut gens = Vec::new();
    let mut by_name = HashMap::new();
    for (name, degree) in decls {
        let name = name.into();
        if degree == 0 {
            return Err(AlgebraError::NonPositiveDegree(name, degree as isize));
        }
        let index = gens.len();
        if by_name.insert(name.clone(), index).is_some() {
            return Err(AlgebraError::DuplicateName(name));
        }
        gens.push(GeneratorDecl { name, degree, index });
    }
    Ok(AlgebraContext {
        inner: Arc::new(ContextInner {
            gens,
            by_name,
            basis_cache: Mutex::new(HashMap::new()),
        }),
    })
}

impl AlgebraContext {
    pub fn generators(&self) -> &[GeneratorDecl] {
        &self.inner.gens
    }

    pub fn generator(&self, index: usize) -> &GeneratorDecl {
        &self.inner.gens[index]
    }

    pub fn len(&self) -> usize {
        self.inner.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.gens.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.inner.by_name.get(name).copied()
    }

    pub fn degree_of(&self, index: usize) -> usize {
        self.inner.gens[index].degree
    }

    fn is_odd(&self, index: usize) -> bool {
        self.inner.gens[index].degree % 2 == 1
    }

    /// The sorted monomial basis of the degree-`d` component of the free
    /// algebra. Degree 0 is spanned by the unit monomial.
    pub fn basis(&self, d: usize) -> Arc<Vec<Monomial>> {
        if let Some(hit) = self.inner.basis_cache.lock().unwrap().get(&d) {
            return hit.clone();
        }
        let mut out = Vec::new();
        let mut factors = Vec::new();
        self.enumerate(0, d, &mut factors, &mut out);
        debug_assert!(out.windows(2).all(|w| w[0] < w[1]), "basis must be strictly increasing");
        let out = Arc::new(out);
        self.inner
            .basis_cache
            .lock()
            .unwrap()
            .entry(d)
            .or_insert_with(|| out.clone())
            .clone()
    }

    fn enumerate(
        &self,
        gen: usize,
        remaining: usize,
        factors: &mut Vec<(usize, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        if remaining == 0 {
            out.push(Monomial { factors: factors.clone() });
            return;
        }
        if gen >= self.len() {
            return;
        }
        let deg = self.degree_of(gen);
        let cap = if self.is_odd(gen) { 1 } else { remaining / deg };
        let max_exp = (remaining / deg).min(cap);
        for exp in (1..=max_exp).rev() {
            factors.push((gen, exp as u32));
            self.enumerate(gen + 1, remaining - exp * deg, factors, out);
            factors.pop();
        }
        self.enumerate(gen + 1, remaining, factors, out);
    }

    /// Position of `m` in `basis(m.degree)`.
    pub fn basis_index(&self, m: &Monomial) -> Option<usize> {
        let basis = self.basis(self.monomial_degree(m));
        basis.binary_search(m).ok()
    }

    pub fn monomial_degree(&self, m: &Monomial) -> usize {
        m.factors
            .iter()
            .map(|&(g, e)| self.degree_of(g) * e as usize)
            .sum()
    }
}

/// A canonical-form monomial: factors sorted by generator index, exponents
/// positive, odd generators never squared. The unit monomial has no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn generator(index: usize) -> Self {
        Monomial { factors: vec![(index, 1)] }
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.factors
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn contains_generator(&self, index: usize) -> bool {
        self.factors.iter().any(|&(g, _)| g == index)
    }

    pub fn exponent_of(&self, index: usize) -> u32 {
        self.factors
            .iter()
            .find(|&&(g, _)| g == index)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// Multiplies two canonical monomials inside `ctx`. Returns `None` when
    /// the product vanishes (an odd generator would be squared); otherwise
    /// the canonical product and its Koszul sign.
    pub fn mul(&self, other: &Monomial, ctx: &AlgebraContext) -> Option<(Monomial, Scalar)> {
        // Sign: each odd factor of `other` moves left past the odd factors
        // of `self` with strictly larger index.
        let mut swaps = 0usize;
        let left_odds: Vec<usize> = self
            .factors
            .iter()
            .filter(|&&(g, _)| ctx.is_odd(g))
            .map(|&(g, _)| g)
            .collect();
        for &(g, _) in other.factors.iter().filter(|&&(g, _)| ctx.is_odd(g)) {
            swaps += left_odds.iter().filter(|&&l| l > g).count();
        }
        // Merge sorted factor lists, adding exponents.
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            let next = match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(ga, ea)), Some(&(gb, eb))) => {
                    if ga == gb {
                        i += 1;
                        j += 1;
                        (ga, ea + eb)
                    } else if ga < gb {
                        i += 1;
                        (ga, ea)
                    } else {
                        j += 1;
                        (gb, eb)
                    }
                }
                (Some(&(ga, ea)), None) => {
                    i += 1;
                    (ga, ea)
                }
                (None, Some(&(gb, eb))) => {
                    j += 1;
                    (gb, eb)
                }
                (None, None) => unreachable!(),
            };
            if ctx.is_odd(next.0) && next.1 > 1 {
                return None;
            }
            factors.push(next);
        }
        let sign = if swaps % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        Some((Monomial { factors }, sign))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic by factor list: lower generator index first; at equal
/// index, higher exponent first. Within one degree this matches the order
/// in which `AlgebraContext::basis` enumerates, so basis vectors can be
/// located by binary search.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let mut i = 0;
        loop {
            match (self.factors.get(i), other.factors.get(i)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(ga, ea)), Some(&(gb, eb))) => {
                    match ga.cmp(&gb).then(eb.cmp(&ea)) {
                        Ordering::Equal => i += 1,
                        ord => return ord,
                    }
                }
            }
        }
    }
}

/// A finite rational linear combination of monomials in one context.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    ctx: AlgebraContext,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Element {
    pub fn zero(ctx: &AlgebraContext) -> Self {
        Element { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &AlgebraContext) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::one(), Scalar::one());
        Element { ctx: ctx.clone(), terms }
    }

    pub fn generator(ctx: &AlgebraContext, index: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::generator(index), Scalar::one());
        Element { ctx: ctx.clone(), terms }
    }

    pub fn from_terms(
        ctx: &AlgebraContext,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Self {
        let mut e = Element::zero(ctx);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_ctx(&self, other: &Element) -> Result<(), AlgebraError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(AlgebraError::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        Element {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            return Element::zero(&self.ctx);
        }
        Element {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.check_ctx(other)?;
        let mut out = Element::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb, &self.ctx) {
                    out.add_term(m, ca.clone() * cb * sign);
                }
            }
        }
        Ok(out)
    }

    /// Degree of a homogeneous element; `None` for zero or mixed-degree
    /// elements.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|m| self.ctx.monomial_degree(m));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.terms.keys().all(|m| self.ctx.monomial_degree(m) == d)
    }

    /// Coordinates relative to `ctx.basis(d)`. The element must be
    /// homogeneous of degree `d` (zero is fine).
    pub fn coords(&self, d: usize) -> Option<Vec<(usize, Scalar)>> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if self.ctx.monomial_degree(m) != d {
                return None;
            }
            out.push((self.ctx.basis_index(m)?, c.clone()));
        }
        out.sort_by_key(|&(i, _)| i);
        Some(out)
    }

    pub fn from_coords(
        ctx: &AlgebraContext,
        d: usize,
        coords: impl IntoIterator<Item = (usize, Scalar)>,
    ) -> Element {
        let basis = ctx.basis(d);
        let mut e = Element::zero(ctx);
        for (i, c) in coords {
            e.add_term(basis[i].clone(), c);
        }
        e
    }

    /// Canonical plain-text rendering (terms in monomial order).
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Scalar::zero();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = if neg { -c.clone() } else { c.clone() };
            let mono = self.render_monomial(m);
            if m.is_unit() {
                out.push_str(&format_scalar(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format_scalar(&mag));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    fn render_monomial(&self, m: &Monomial) -> String {
        m.factors()
            .iter()
            .map(|&(g, e)| {
                let name = &self.ctx.generator(g).name;
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::scalar;

    fn heisenberg_ctx() -> AlgebraContext {
        make_context([("x", 1), ("y", 1), ("z", 1)]).unwrap()
    }

    #[test]
    fn rejects_bad_declarations() {
        assert_eq!(
            make_context([("x", 1), ("x", 2)]).unwrap_err(),
            AlgebraError::DuplicateName("x".into())
        );
        assert_eq!(
            make_context([("x", 0)]).unwrap_err(),
            AlgebraError::NonPositiveDegree("x".into(), 0)
        );
    }

    #[test]
    fn heisenberg_degree_two_basis() {
        let ctx = heisenberg_ctx();
        let basis = ctx.basis(2);
        let names: Vec<String> = basis
            .iter()
            .map(|m| {
                m.factors()
                    .iter()
                    .map(|&(g, _)| ctx.generator(g).name.clone())
                    .collect::<Vec<_>>()
                    .join("")
            })
            .collect();
        assert_eq!(names, ["xy", "xz", "yz"]);
    }

    #[test]
    fn koszul_signs() {
        let ctx = heisenberg_ctx();
        let x = Element::generator(&ctx, 0);
        let y = Element::generator(&ctx, 1);
        let xy = x.mul(&y).unwrap();
        let yx = y.mul(&x).unwrap();
        assert_eq!(yx, xy.neg());
        assert!(x.mul(&x).unwrap().is_zero());
    }

    #[test]
    fn mixed_parity_square() {
        // (c + n)^2 = c^2 + 2 c n for |c| = 2, |n| = 3.
        let ctx = make_context([("c", 2), ("n", 3)]).unwrap();
        let c = Element::generator(&ctx, 0);
        let n = Element::generator(&ctx, 1);
        let s = c.add(&n).unwrap();
        let sq = s.mul(&s).unwrap();
        let expected = c
            .mul(&c)
            .unwrap()
            .add(&c.mul(&n).unwrap().scale(&scalar(2)))
            .unwrap();
        assert_eq!(sq, expected);
    }

    #[test]
    fn basis_counts_for_large_context() {
        // 12 generators of degree 2 and 118 of degree 3.
        let decls: Vec<(String, usize)> = (0..12)
            .map(|i| (format!("c{i}"), 2))
            .chain((0..118).map(|i| (format!("g{i}"), 3)))
            .collect();
        let ctx = make_context(decls).unwrap();
        assert_eq!(ctx.basis(2).len(), 12);
        assert_eq!(ctx.basis(4).len(), 78);
        assert_eq!(ctx.basis(7).len(), 9204);
    }

    #[test]
    fn context_mismatch_is_rejected() {
        let a = heisenberg_ctx();
        let b = make_context([("u", 1)]).unwrap();
        let e = Element::generator(&a, 0);
        let f = Element::generator(&b, 0);
        assert_eq!(e.add(&f).unwrap_err(), AlgebraError::ContextMismatch);
    }

    #[test]
    fn coords_roundtrip() {
        let ctx = heisenberg_ctx();
        let x = Element::generator(&ctx, 0);
        let z = Element::generator(&ctx, 2);
        let e = x.mul(&z).unwrap().scale(&scalar(5));
        let coords = e.coords(2).unwrap();
        assert_eq!(Element::from_coords(&ctx, 2, coords), e);
    }

    #[test]
    fn render_is_canonical() {
        let ctx = make_context([("a", 2), ("b", 3)]).unwrap();
        let a = Element::generator(&ctx, 0);
        let b = Element::generator(&ctx, 1);
        let e = a
            .mul(&a)
            .unwrap()
            .scale(&crate::scalar::ratio(-3, 2))
            .add(&a.mul(&b).unwrap())
            .unwrap();
        assert_eq!(e.render(), "-3/2*a^2 + a*b");
    }
}
