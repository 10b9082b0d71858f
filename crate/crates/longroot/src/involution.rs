//! Involutions from random elements, the zeta maps into centralizers, and
//! heart generation.
//!
//! For an even-order x, powering by the odd part m of the exponent and
//! squaring to the last non-identity term yields the involution i(x). For
//! an involution i the partial map zeta sends a random g either to
//! (i i^g)^((m+1)/2) g^-1 when i i^g has odd order (the zeta-1 branch,
//! uniformly distributed in C(i)) or to i(i i^g) when it has even order
//! (the zeta-0 branch, a normal subset of involutions in C(i)). Both
//! computations need only the exponent, never the exact order.
//!
//! A pseudo-involution is an order-4 element j with j^2 central in the
//! ambient subgroup. For pseudo-involutions only the zeta-0 branch is
//! exposed here; the zeta-1-style normalizer sampling they admit inside
//! SL2 components is part of the component-extraction algorithm.

use crate::blackbox::{BlackBox, Element, Oracle, Subgroup};
use crate::random::Sampler;
use crate::{Error, Result};

/// Outcome of one zeta evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaKind {
    /// Involution i(i i^g), commuting with i.
    Zeta0,
    /// Square-root trick output (i i^g)^((m+1)/2) g^-1, commuting with i.
    Zeta1,
    /// No output: the pseudo-involution branch saw an odd-order product.
    Trivial,
}

pub struct ZetaResult<O: Oracle> {
    pub kind: ZetaKind,
    pub value: Element<O>,
}

/// i(x): power x by the odd part of E, then square to the last
/// non-identity term. None when x has odd order.
pub fn make_involution<O: Oracle>(bb: &BlackBox<O>, x: &Element<O>) -> Option<Element<O>> {
    let y = bb.pow(x, bb.exponent().odd_part());
    involution_from_odd_power(bb, y)
}

fn involution_from_odd_power<O: Oracle>(bb: &BlackBox<O>, y: Element<O>) -> Option<Element<O>> {
    if bb.is_identity(&y) {
        return None;
    }
    let mut t = y;
    loop {
        let t2 = bb.mult(&t, &t);
        if bb.is_identity(&t2) {
            return Some(t);
        }
        t = t2;
    }
}

/// The order-4 predecessor of i(x) in the squaring chain, when it exists.
fn order_four_from<O: Oracle>(bb: &BlackBox<O>, x: &Element<O>) -> Option<Element<O>> {
    let y = bb.pow(x, bb.exponent().odd_part());
    if bb.is_identity(&y) {
        return None;
    }
    let mut prev: Option<Element<O>> = None;
    let mut t = y;
    loop {
        let t2 = bb.mult(&t, &t);
        if bb.is_identity(&t2) {
            return prev; // t is the involution; prev (if any) has order 4
        }
        prev = Some(t);
        t = t2;
    }
}

/// Searches random elements of the sampled subgroup for a j of order 4
/// whose square commutes with every stored generator.
pub fn make_pseudo_involution<O: Oracle>(
    sampler: &mut Sampler<'_, O>,
    trials: usize,
) -> Option<Element<O>> {
    let bb = sampler.bb();
    for _ in 0..trials {
        let x = sampler.draw();
        if let Some(j) = order_four_from(bb, &x) {
            let j2 = bb.mult(&j, &j);
            if bb.commutes_with_all(&j2, sampler.subgroup()) {
                return Some(j);
            }
        }
    }
    None
}

/// Evaluates zeta for an involution or pseudo-involution `i` at `g`.
pub fn zeta<O: Oracle>(
    bb: &BlackBox<O>,
    i: &Element<O>,
    g: &Element<O>,
) -> Result<ZetaResult<O>> {
    let i2 = bb.mult(i, i);
    let genuine = bb.is_identity(&i2);
    if !genuine {
        let i4 = bb.mult(&i2, &i2);
        if !bb.is_identity(&i4) {
            return Err(Error::NotAnInvolution);
        }
    }
    let z = bb.mult(i, &bb.conj(i, g));
    let zm = bb.pow(&z, bb.exponent().odd_part());
    if bb.is_identity(&zm) {
        // odd order
        if genuine {
            let h = bb.pow(&z, &bb.exponent().half_odd_plus());
            let value = bb.mult(&h, &bb.inv(g));
            Ok(ZetaResult {
                kind: ZetaKind::Zeta1,
                value,
            })
        } else {
            Ok(ZetaResult {
                kind: ZetaKind::Trivial,
                value: bb.identity(),
            })
        }
    } else {
        let value = involution_from_odd_power(bb, zm).expect("nontrivial odd power");
        Ok(ZetaResult {
            kind: ZetaKind::Zeta0,
            value,
        })
    }
}

/// Draws `count` random elements and collects the nontrivial zeta outputs
/// of both branches; every generator of the result commutes with i.
pub fn centralizer_gens<O: Oracle>(
    sampler: &mut Sampler<'_, O>,
    i: &Element<O>,
    count: usize,
) -> Result<Subgroup<O>> {
    collect_zeta(sampler, i, count, false)
}

/// Like `centralizer_gens` but keeps only the zeta-0 branch: generators of
/// the heart of the centralizer.
pub fn heart_gens<O: Oracle>(
    sampler: &mut Sampler<'_, O>,
    i: &Element<O>,
    count: usize,
) -> Result<Subgroup<O>> {
    collect_zeta(sampler, i, count, true)
}

fn collect_zeta<O: Oracle>(
    sampler: &mut Sampler<'_, O>,
    i: &Element<O>,
    count: usize,
    heart_only: bool,
) -> Result<Subgroup<O>> {
    let bb = sampler.bb();
    let mut out = Subgroup::trivial();
    for _ in 0..count {
        let g = sampler.draw();
        let r = zeta(bb, i, &g)?;
        match r.kind {
            ZetaKind::Zeta0 => out.push_dedup(bb, r.value),
            ZetaKind::Zeta1 if !heart_only => out.push_dedup(bb, r.value),
            _ => {}
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::{bb_from_matrices, bb_from_spec, MatrixBlackBox};
    use crate::matgrp::{self, Family, GroupSpec, Matrix};
    use crate::random::Sampler;
    use num_bigint::BigUint;

    fn gl2_5() -> MatrixBlackBox {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let f = spec.module_field().unwrap();
        let mut gens = matgrp::standard_generators(&spec).unwrap();
        gens.push(Matrix::diag(&f, &[f.primitive_element(), f.one()]));
        bb_from_matrices(f, 2, gens, None, 5, Some(BigUint::from(5u32)))
    }

    fn elem(bb: &MatrixBlackBox, entries: [[u64; 2]; 2]) -> crate::blackbox::Element<crate::blackbox::MatrixOracle> {
        let f = bb.oracle().field().clone();
        let mut m = Matrix::zero(&f, 2);
        for i in 0..2 {
            for j in 0..2 {
                m.set_entry(&f, i, j, &f.from_int(entries[i][j]));
            }
        }
        bb.oracle().element_from_matrix(m)
    }

    #[test]
    fn involution_from_diag_2_3() {
        // chain: x^15 = x^3, x^30 = -I, x^60 = I, so i(x) = -I
        let bb = gl2_5();
        let x = elem(&bb, [[2, 0], [0, 3]]);
        let i = make_involution(&bb, &x).unwrap();
        let minus_i = elem(&bb, [[4, 0], [0, 4]]);
        assert!(bb.eq(&i, &minus_i));
    }

    #[test]
    fn involution_of_an_involution_is_itself() {
        let bb = gl2_5();
        let x = elem(&bb, [[4, 0], [0, 4]]);
        let i = make_involution(&bb, &x).unwrap();
        assert!(bb.eq(&i, &x));
    }

    #[test]
    fn odd_order_elements_give_none() {
        let bb = gl2_5();
        let x = elem(&bb, [[1, 1], [0, 1]]); // order 5
        assert!(make_involution(&bb, &x).is_none());
    }

    #[test]
    fn zeta_branch_examples_in_gl2_5() {
        let bb = gl2_5();
        let i = elem(&bb, [[1, 0], [0, 4]]);
        // unipotent product: z = [[1,2],[0,1]] of order 5, zeta-1 value = 1
        let g = elem(&bb, [[1, 1], [0, 1]]);
        let r = zeta(&bb, &i, &g).unwrap();
        assert_eq!(r.kind, ZetaKind::Zeta1);
        assert!(bb.is_identity(&r.value));
        // antidiagonal conjugator: z = -I of order 2, zeta-0 value = -I
        let g = elem(&bb, [[0, 1], [4, 0]]);
        let r = zeta(&bb, &i, &g).unwrap();
        assert_eq!(r.kind, ZetaKind::Zeta0);
        assert!(bb.eq(&r.value, &elem(&bb, [[4, 0], [0, 4]])));
    }

    #[test]
    fn zeta_for_central_involution_returns_g_inverse() {
        let bb = gl2_5();
        let i = elem(&bb, [[4, 0], [0, 4]]);
        let g = elem(&bb, [[2, 0], [0, 3]]);
        let r = zeta(&bb, &i, &g).unwrap();
        assert_eq!(r.kind, ZetaKind::Zeta1);
        assert!(bb.eq(&r.value, &bb.inv(&g)));
    }

    #[test]
    fn zeta_rejects_non_involutions() {
        let bb = gl2_5();
        let x = elem(&bb, [[1, 1], [0, 1]]); // order 5
        let g = elem(&bb, [[2, 0], [0, 3]]);
        assert!(matches!(
            zeta(&bb, &x, &g),
            Err(Error::NotAnInvolution)
        ));
    }

    #[test]
    fn zeta_outputs_commute_with_i() {
        let spec = GroupSpec::new(Family::Sp, 4, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let f = bb.oracle().field().clone();
        // t1-type involution: -1 on the (e1, f1) plane
        let i = bb.oracle().element_from_matrix(Matrix::diag(
            &f,
            &[f.from_int(4), f.one(), f.from_int(4), f.one()],
        ));
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 5);
        for _ in 0..60 {
            let g = sampler.draw();
            let r = zeta(&bb, &i, &g).unwrap();
            assert!(bb.is_identity(&bb.commutator(&r.value, &i)));
        }
    }

    #[test]
    fn pseudo_involution_in_sl2_5() {
        // diag(2,3) squares to -I, so pseudo-involutions exist
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 9);
        let j = make_pseudo_involution(&mut sampler, 64).expect("SL2(5) has order-4 elements");
        let j2 = bb.mult(&j, &j);
        assert!(!bb.is_identity(&j2));
        assert!(bb.is_identity(&bb.mult(&j2, &j2)));
        assert!(bb.commutes_with_all(&j2, &bb.generating_subgroup()));
    }

    #[test]
    fn no_pseudo_involution_in_a5_or_trivial() {
        // A5 = Omega3(5) has element orders {1,2,3,5}
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let f = spec.module_field().unwrap();
        let gens: Vec<Matrix> = matgrp::standard_generators(&spec)
            .unwrap()
            .iter()
            .map(|g| matgrp::sym_square(&f, g))
            .collect();
        let all = crate::oracle::closure_elements(&f, &gens, 1 << 10).unwrap();
        let orders: std::collections::BTreeSet<usize> = all
            .iter()
            .map(|m| crate::oracle::order_of_matrix(&f, m, 16).unwrap())
            .collect();
        assert_eq!(orders.into_iter().collect::<Vec<_>>(), vec![1, 2, 3, 5]);
        let bb = bb_from_matrices(f, 3, gens, None, 5, None);
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 10);
        assert!(make_pseudo_involution(&mut sampler, 64).is_none());

        let mut trivial = Sampler::new(&bb, Subgroup::trivial(), 10, 11);
        assert!(make_pseudo_involution(&mut trivial, 16).is_none());
    }

    #[test]
    fn central_involution_regenerates_the_whole_product() {
        // SL2(5) x SL2(5) with i = (-I, I): zeta-1 is g -> g^-1, so the
        // collected subgroup generates everything (order 14400)
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let f = spec.module_field().unwrap();
        let g2 = matgrp::standard_generators(&spec).unwrap();
        let gens = matgrp::direct_product_gens(&f, &g2, 2, &g2, 2);
        let bb = bb_from_matrices(f.clone(), 4, gens, None, 5, None);
        let mut mi = Matrix::identity(&f, 4);
        mi.set_entry(&f, 0, 0, &f.from_int(4));
        mi.set_entry(&f, 1, 1, &f.from_int(4));
        let i = bb.oracle().element_from_matrix(mi);
        assert!(bb.commutes_with_all(&i, &bb.generating_subgroup()));
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 13);
        let c = centralizer_gens(&mut sampler, &i, 40).unwrap();
        let mats: Vec<Matrix> = c.gens().iter().map(|e| bb.oracle().matrix(e).clone()).collect();
        assert_eq!(
            crate::oracle::brute_closure(&f, &mats, 1 << 15),
            Some(14400)
        );
        // while the heart of a central involution is trivial
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 14);
        let h = heart_gens(&mut sampler, &i, 40).unwrap();
        assert!(h.gens().is_empty());
    }

    #[test]
    fn heart_of_pseudo_involution_in_sl2_is_the_center() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 21);
        let j = make_pseudo_involution(&mut sampler, 64).unwrap();
        let minus_i = {
            let f = bb.oracle().field().clone();
            bb.oracle()
                .element_from_matrix(Matrix::diag(&f, &[f.from_int(4), f.from_int(4)]))
        };
        let h = heart_gens(&mut sampler, &j, 80).unwrap();
        assert!(!h.gens().is_empty());
        for g in h.gens() {
            assert!(bb.eq(g, &minus_i));
        }
    }

    #[test]
    fn product_heart_projects_into_factor_hearts() {
        // both coordinates pseudo-involutions: heart outputs must project
        // into {+-I} x {+-I}
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let f = spec.module_field().unwrap();
        let g2 = matgrp::standard_generators(&spec).unwrap();
        let gens = matgrp::direct_product_gens(&f, &g2, 2, &g2, 2);
        let bb = bb_from_matrices(f.clone(), 4, gens, None, 5, None);
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 23);
        // hunt an element with both coordinates of order 4
        let j = loop {
            let x = sampler.draw();
            if let Some(c) = super::order_four_from(&bb, &x) {
                let m = bb.oracle().matrix(&c);
                let pa = matgrp::project_block(&f, m, 0, 2);
                let pb = matgrp::project_block(&f, m, 2, 2);
                let oa = crate::oracle::order_of_matrix(&f, &pa, 8);
                let ob = crate::oracle::order_of_matrix(&f, &pb, 8);
                if oa == Some(4) && ob == Some(4) {
                    break c;
                }
            }
        };
        let h = heart_gens(&mut sampler, &j, 120).unwrap();
        assert!(!h.gens().is_empty());
        for g in h.gens() {
            let m = bb.oracle().matrix(g);
            for off in [0, 2] {
                let blk = matgrp::project_block(&f, m, off, 2);
                let o = crate::oracle::order_of_matrix(&f, &blk, 4).unwrap();
                assert!(o <= 2, "projection has order {o}");
            }
        }
    }

    #[test]
    fn zeta0_never_returns_i_in_a_centerless_group() {
        // Omega3(5) = A5 is centerless; the zeta-0 image avoids i itself
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let f = spec.module_field().unwrap();
        let gens: Vec<Matrix> = matgrp::standard_generators(&spec)
            .unwrap()
            .iter()
            .map(|g| matgrp::sym_square(&f, g))
            .collect();
        let bb = bb_from_matrices(f, 3, gens, None, 5, None);
        let mut sampler = Sampler::new(&bb, bb.generating_subgroup(), 100, 31);
        let i = loop {
            let x = sampler.draw();
            if let Some(i) = make_involution(&bb, &x) {
                break i;
            }
        };
        let mut hits = 0;
        for _ in 0..200 {
            let g = sampler.draw();
            let r = zeta(&bb, &i, &g).unwrap();
            if r.kind == ZetaKind::Zeta0 {
                hits += 1;
                assert!(!bb.eq(&r.value, &i));
            }
        }
        assert!(hits > 0);
    }
}
