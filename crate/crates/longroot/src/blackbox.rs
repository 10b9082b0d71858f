//! The black-box group abstraction: opaque elements with multiply, invert
//! and identity-test, a generating set, the odd characteristic p and a
//! global exponent E with x^E = 1 for every element.
//!
//! Algorithm code sees only this surface. Equality is observable solely as
//! `is_identity(x * y^-1)`; nothing outside the white-box oracle and the
//! test suite may look inside a handle.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::gf::Field;
use crate::matgrp::{self, GroupSpec, Matrix};
use crate::Result;

/// The three oracle operations over an opaque element encoding.
pub trait Oracle {
    type Handle: Clone + Send + Sync;

    fn mult(&self, a: &Self::Handle, b: &Self::Handle) -> Self::Handle;
    fn inv(&self, a: &Self::Handle) -> Self::Handle;
    fn is_identity(&self, a: &Self::Handle) -> bool;
    fn identity(&self) -> Self::Handle;
}

/// An opaque group element.
pub struct Element<O: Oracle> {
    pub(crate) handle: O::Handle,
}

impl<O: Oracle> Clone for Element<O> {
    fn clone(&self) -> Self {
        Element {
            handle: self.handle.clone(),
        }
    }
}

/// A global exponent E = 2^a * m with m odd.
#[derive(Debug, Clone)]
pub struct Exponent {
    value: BigUint,
    two_adic: u32,
    odd_part: BigUint,
}

/// Splits E as 2^a * m with m odd.
pub fn exponent_split(e: &BigUint) -> (u32, BigUint) {
    assert!(!e.is_zero(), "exponent must be positive");
    let a = e.trailing_zeros().unwrap_or(0) as u32;
    (a, e >> a)
}

impl Exponent {
    pub fn new(value: BigUint) -> Self {
        let (two_adic, odd_part) = exponent_split(&value);
        Exponent {
            value,
            two_adic,
            odd_part,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// a in E = 2^a * m.
    pub fn two_adic(&self) -> u32 {
        self.two_adic
    }

    /// m in E = 2^a * m.
    pub fn odd_part(&self) -> &BigUint {
        &self.odd_part
    }

    /// (m + 1) / 2 for the zeta-1 square root trick.
    pub fn half_odd_plus(&self) -> BigUint {
        (self.odd_part() + BigUint::one()) >> 1
    }

    /// Largest power of p dividing E, as (valuation, p-free part).
    pub fn p_split(&self, p: u64) -> (u32, BigUint) {
        let p = BigUint::from(p);
        let mut m = self.value.clone();
        let mut v = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            v += 1;
        }
        (v, m)
    }
}

/// A black-box group: the oracle, its generators, the exponent and the
/// characteristic of the defining field.
pub struct BlackBox<O: Oracle> {
    oracle: O,
    gens: Vec<Element<O>>,
    exponent: Exponent,
    char_p: u64,
    q_hint: Option<BigUint>,
}

impl<O: Oracle> BlackBox<O> {
    pub fn new(
        oracle: O,
        gens: Vec<O::Handle>,
        exponent: Exponent,
        char_p: u64,
        q_hint: Option<BigUint>,
    ) -> Self {
        let gens = gens.into_iter().map(|handle| Element { handle }).collect();
        BlackBox {
            oracle,
            gens,
            exponent,
            char_p,
            q_hint,
        }
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn gens(&self) -> &[Element<O>] {
        &self.gens
    }

    pub fn generating_subgroup(&self) -> Subgroup<O> {
        Subgroup {
            gens: self.gens.clone(),
        }
    }

    pub fn exponent(&self) -> &Exponent {
        &self.exponent
    }

    pub fn char_p(&self) -> u64 {
        self.char_p
    }

    pub fn q_hint(&self) -> Option<&BigUint> {
        self.q_hint.as_ref()
    }

    pub fn identity(&self) -> Element<O> {
        Element {
            handle: self.oracle.identity(),
        }
    }

    pub fn mult(&self, a: &Element<O>, b: &Element<O>) -> Element<O> {
        Element {
            handle: self.oracle.mult(&a.handle, &b.handle),
        }
    }

    pub fn inv(&self, a: &Element<O>) -> Element<O> {
        Element {
            handle: self.oracle.inv(&a.handle),
        }
    }

    pub fn is_identity(&self, a: &Element<O>) -> bool {
        self.oracle.is_identity(&a.handle)
    }

    /// Black-box equality: is_identity(a * b^-1).
    pub fn eq(&self, a: &Element<O>, b: &Element<O>) -> bool {
        let t = self.mult(a, &self.inv(b));
        self.is_identity(&t)
    }

    /// x^e by square-and-multiply, O(log e) oracle calls.
    pub fn pow(&self, x: &Element<O>, e: &BigUint) -> Element<O> {
        if e.is_zero() {
            return self.identity();
        }
        let bits = e.bits();
        let mut acc = x.clone();
        for i in (0..bits - 1).rev() {
            acc = self.mult(&acc, &acc);
            if e.bit(i) {
                acc = self.mult(&acc, x);
            }
        }
        acc
    }

    pub fn pow_u64(&self, x: &Element<O>, e: u64) -> Element<O> {
        self.pow(x, &BigUint::from(e))
    }

    /// g^-1 x g.
    pub fn conj(&self, x: &Element<O>, g: &Element<O>) -> Element<O> {
        let gi = self.inv(g);
        self.mult(&self.mult(&gi, x), g)
    }

    /// [a, b] = a^-1 b^-1 a b.
    pub fn commutator(&self, a: &Element<O>, b: &Element<O>) -> Element<O> {
        let ai = self.inv(a);
        let bi = self.inv(b);
        self.mult(&self.mult(&ai, &bi), &self.mult(a, b))
    }

    /// True iff x^d = 1.
    pub fn order_divides(&self, x: &Element<O>, d: &BigUint) -> bool {
        self.is_identity(&self.pow(x, d))
    }

    /// True iff x commutes with every generator of H.
    pub fn commutes_with_all(&self, x: &Element<O>, h: &Subgroup<O>) -> bool {
        h.gens
            .iter()
            .all(|g| self.is_identity(&self.commutator(x, g)))
    }
}

/// A subgroup given by generators inside a parent black box; the empty
/// generator list denotes the trivial subgroup.
pub struct Subgroup<O: Oracle> {
    pub(crate) gens: Vec<Element<O>>,
}

impl<O: Oracle> Clone for Subgroup<O> {
    fn clone(&self) -> Self {
        Subgroup {
            gens: self.gens.clone(),
        }
    }
}

impl<O: Oracle> Subgroup<O> {
    pub fn trivial() -> Self {
        Subgroup { gens: Vec::new() }
    }

    pub fn from_gens(gens: Vec<Element<O>>) -> Self {
        Subgroup { gens }
    }

    pub fn gens(&self) -> &[Element<O>] {
        &self.gens
    }

    pub fn is_trivial_as_listed(&self) -> bool {
        self.gens.is_empty()
    }

    /// Adds a generator unless it is the identity or a listed duplicate.
    pub fn push_dedup(&mut self, bb: &BlackBox<O>, e: Element<O>) {
        if bb.is_identity(&e) {
            return;
        }
        if self.gens.iter().any(|g| bb.eq(g, &e)) {
            return;
        }
        self.gens.push(e);
    }
}

/// The dense-matrix backend.
#[derive(Debug, Clone)]
pub struct MatrixOracle {
    field: Field,
    dim: usize,
}

impl MatrixOracle {
    pub fn new(field: Field, dim: usize) -> Self {
        MatrixOracle { field, dim }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// White-box escape hatch; only the oracle module, the CLI verify path
    /// and tests may call this.
    pub fn matrix<'a>(&self, e: &'a Element<Self>) -> &'a Matrix {
        &e.handle
    }

    pub fn element_from_matrix(&self, m: Matrix) -> Element<Self> {
        assert_eq!(m.dim(), self.dim);
        Element { handle: m }
    }
}

impl Oracle for MatrixOracle {
    type Handle = Matrix;

    fn mult(&self, a: &Matrix, b: &Matrix) -> Matrix {
        a.mul(&self.field, b)
    }

    fn inv(&self, a: &Matrix) -> Matrix {
        a.inverse(&self.field)
            .expect("group elements are invertible")
    }

    fn is_identity(&self, a: &Matrix) -> bool {
        a.is_identity(&self.field)
    }

    fn identity(&self) -> Matrix {
        Matrix::identity(&self.field, self.dim)
    }
}

/// A black box over the matrix backend.
pub type MatrixBlackBox = BlackBox<MatrixOracle>;

/// Wraps the standard generators of `spec` as a black box. The exponent
/// defaults to |GL_N(F)| for the shipped N-dimensional module over F,
/// which covers the p-core blocks of the affine and block fixtures; a
/// decimal `exponent` field in the descriptor overrides it.
pub fn bb_from_spec(spec: &GroupSpec) -> Result<MatrixBlackBox> {
    spec.validate()?;
    let field = spec.module_field()?;
    let dim = spec.rep_dim();
    let gens = matgrp::standard_generators(spec)?;
    let exponent = match &spec.exponent {
        Some(text) => {
            let v = text
                .parse::<BigUint>()
                .map_err(|_| crate::Error::ParseError(format!("bad exponent {text}")))?;
            Exponent::new(v)
        }
        None => Exponent::new(matgrp::gl_order(&field, dim)),
    };
    let oracle = MatrixOracle::new(field, dim);
    Ok(BlackBox::new(
        oracle,
        gens,
        exponent,
        spec.p,
        Some(spec.q()),
    ))
}

/// A black box over explicit matrices (used by product fixtures and tests).
pub fn bb_from_matrices(
    field: Field,
    dim: usize,
    gens: Vec<Matrix>,
    exponent: Option<BigUint>,
    char_p: u64,
    q_hint: Option<BigUint>,
) -> MatrixBlackBox {
    let e = exponent.unwrap_or_else(|| matgrp::gl_order(&field, dim));
    let oracle = MatrixOracle::new(field, dim);
    BlackBox::new(oracle, gens, Exponent::new(e), char_p, q_hint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::Family;

    #[test]
    fn exponent_splits() {
        let (a, m) = exponent_split(&BigUint::from(480u32));
        assert_eq!((a, m), (5, BigUint::from(15u32)));
        let (a, m) = exponent_split(&BigUint::from(120u32));
        assert_eq!((a, m), (3, BigUint::from(15u32)));
        let (a, m) = exponent_split(&BigUint::from(15u32));
        assert_eq!((a, m), (0, BigUint::from(15u32)));
    }

    #[test]
    fn sl2_5_exponent_defaults_to_gl2() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        assert_eq!(bb.exponent().value(), &BigUint::from(480u32));
        // exponent contract on the generators
        for g in bb.gens() {
            assert!(bb.order_divides(g, &BigUint::from(480u32)));
        }
    }

    #[test]
    fn oracle_laws_on_random_products() {
        use rand::Rng;
        use rand::SeedableRng;
        let spec = GroupSpec::new(Family::Sp, 4, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let mut elems = vec![bb.identity()];
        for _ in 0..20 {
            let i = rng.gen_range(0..bb.gens().len());
            let j = rng.gen_range(0..elems.len());
            elems.push(bb.mult(&elems[j], &bb.gens()[i]));
        }
        for w in elems.windows(3) {
            let (x, y, z) = (&w[0], &w[1], &w[2]);
            let l = bb.mult(&bb.mult(x, y), z);
            let r = bb.mult(x, &bb.mult(y, z));
            assert!(bb.eq(&l, &r));
        }
        for x in &elems {
            assert!(bb.is_identity(&bb.mult(x, &bb.inv(x))));
        }
        assert!(bb.is_identity(&bb.identity()));
    }

    #[test]
    fn pow_is_additive_in_the_exponent() {
        use rand::Rng;
        use rand::SeedableRng;
        let spec = GroupSpec::new(Family::Sl, 3, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let x = bb.mult(&bb.gens()[0], &bb.gens()[2]);
        for _ in 0..10 {
            let a: u64 = rng.gen_range(0..1 << 32);
            let b: u64 = rng.gen_range(0..1 << 32);
            let lhs = bb.pow_u64(&x, a + b);
            let rhs = bb.mult(&bb.pow_u64(&x, a), &bb.pow_u64(&x, b));
            assert!(bb.eq(&lhs, &rhs));
        }
        assert!(bb.eq(&bb.pow_u64(&x, 1), &x));
    }

    #[test]
    fn exponent_override_from_descriptor() {
        let mut spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        spec.exponent = Some("240".into());
        let bb = bb_from_spec(&spec).unwrap();
        assert_eq!(bb.exponent().value(), &BigUint::from(240u32));
        assert_eq!(bb.exponent().two_adic(), 4);
        assert!(matches!(
            bb_from_spec(&GroupSpec {
                exponent: Some("abc".into()),
                ..GroupSpec::new(Family::Sl, 2, 5, 1)
            }),
            Err(crate::Error::ParseError(_))
        ));
    }

    #[test]
    fn unipotent_has_order_p() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let u = &bb.gens()[0]; // the transvection
        assert!(bb.order_divides(u, &BigUint::from(5u32)));
        assert!(!bb.is_identity(u));
    }
}
