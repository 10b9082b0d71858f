//! Monte-Carlo subgroup operations: normal closure, derived subgroup,
//! triviality, p-group and solvability tests.
//!
//! These are the random-conjugation and random-commutator versions of the
//! classical polynomial-time constructions. Generator lists are capped
//! with random pruning so that deep recursions do not blow up
//! multiplication costs; on every fixture where exact closure enumeration
//! is feasible the outputs match the exact objects.

use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::blackbox::{BlackBox, Oracle, Subgroup};
use crate::random::Sampler;

/// Tuning knobs shared by the subgroup constructions.
#[derive(Debug, Clone, Copy)]
pub struct SubgrpCfg {
    /// Augmentation sweeps in the normal closure.
    pub closure_rounds: usize,
    /// Random commutators seeding a derived subgroup.
    pub commutators: usize,
    /// Generator-list cap; excess generators are pruned at random.
    pub gen_cap: usize,
    /// Draws used by the probabilistic triviality test.
    pub trivial_samples: usize,
    /// Product-replacement burn-in for internal samplers.
    pub burn_in: usize,
}

impl Default for SubgrpCfg {
    fn default() -> Self {
        SubgrpCfg {
            closure_rounds: 12,
            commutators: 8,
            gen_cap: 48,
            trivial_samples: 32,
            burn_in: 100,
        }
    }
}

fn prune<O: Oracle>(gens: &mut Vec<crate::blackbox::Element<O>>, cap: usize, rng: &mut ChaCha12Rng) {
    while gens.len() > cap {
        let idx = rng.gen_range(0..gens.len());
        gens.swap_remove(idx);
    }
}

/// Normal closure of H in <X> by iterated random conjugation: sweeps add
/// h^x for stored h and random x in X.
pub fn normal_closure<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    x: &Subgroup<O>,
    cfg: &SubgrpCfg,
    rng: &mut ChaCha12Rng,
) -> Subgroup<O> {
    let mut out = Subgroup::trivial();
    for g in h.gens() {
        out.push_dedup(bb, g.clone());
    }
    if out.gens().is_empty() || x.gens().is_empty() {
        return out;
    }
    let mut sampler = Sampler::new(bb, x.clone(), cfg.burn_in, rng.gen());
    for _ in 0..cfg.closure_rounds {
        let snapshot: Vec<_> = out.gens().to_vec();
        for hgen in snapshot {
            let conjugator = sampler.draw();
            out.push_dedup(bb, bb.conj(&hgen, &conjugator));
        }
        prune(&mut out.gens, cfg.gen_cap, rng);
    }
    out
}

/// Derived subgroup: random commutators of H, normally closed in H.
pub fn derived_subgroup<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    cfg: &SubgrpCfg,
    rng: &mut ChaCha12Rng,
) -> Subgroup<O> {
    if h.gens().is_empty() {
        return Subgroup::trivial();
    }
    let mut sampler = Sampler::new(bb, h.clone(), cfg.burn_in, rng.gen());
    let mut seed = Subgroup::trivial();
    for _ in 0..cfg.commutators {
        let a = sampler.draw();
        let b = sampler.draw();
        seed.push_dedup(bb, bb.commutator(&a, &b));
    }
    // commutators of the stored generators keep tiny groups exact
    for (i, a) in h.gens().iter().enumerate() {
        for b in h.gens().iter().skip(i + 1) {
            seed.push_dedup(bb, bb.commutator(a, b));
            if seed.gens().len() >= cfg.gen_cap {
                break;
            }
        }
        if seed.gens().len() >= cfg.gen_cap {
            break;
        }
    }
    normal_closure(bb, &seed, h, cfg, rng)
}

/// Second derived subgroup.
pub fn second_derived<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    cfg: &SubgrpCfg,
    rng: &mut ChaCha12Rng,
) -> Subgroup<O> {
    let d1 = derived_subgroup(bb, h, cfg, rng);
    derived_subgroup(bb, &d1, cfg, rng)
}

/// True iff every stored generator and `trivial_samples` random products
/// are the identity.
pub fn is_probably_trivial<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    cfg: &SubgrpCfg,
    rng: &mut ChaCha12Rng,
) -> bool {
    if h.gens().iter().any(|g| !bb.is_identity(g)) {
        return false;
    }
    if h.gens().is_empty() {
        return true;
    }
    let mut sampler = Sampler::new(bb, h.clone(), cfg.burn_in.min(16), rng.gen());
    (0..cfg.trivial_samples).all(|_| bb.is_identity(&sampler.draw()))
}

/// True iff `samples` random elements x of H satisfy x^(p-part of E) = 1.
pub fn is_p_group<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    p: u64,
    samples: usize,
    cfg: &SubgrpCfg,
    rng: &mut ChaCha12Rng,
) -> bool {
    if h.gens().is_empty() {
        return true;
    }
    let (v, _) = bb.exponent().p_split(p);
    let p_part = BigUint::from(p).pow(v);
    for g in h.gens() {
        if !bb.order_divides(g, &p_part) {
            return false;
        }
    }
    let mut sampler = Sampler::new(bb, h.clone(), cfg.burn_in, rng.gen());
    (0..samples).all(|_| bb.order_divides(&sampler.draw(), &p_part))
}

/// Default iteration depth for the solvability test: twice the log of
/// the encoding-length proxy n^2 k ceil(log2 p), since the derived length
/// of a solvable linear group grows logarithmically in the dimension.
pub fn default_solvable_depth(n: usize, k: usize, p: u64) -> usize {
    let logp = 64 - (p.max(3) - 1).leading_zeros() as usize;
    let proxy = (n * n * k * logp).max(2);
    2 * (usize::BITS - (proxy - 1).leading_zeros()) as usize
}

/// Iterated Monte-Carlo derived subgroups down to triviality.
pub fn is_probably_solvable<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    depth: usize,
    cfg: &SubgrpCfg,
    rng: &mut ChaCha12Rng,
) -> bool {
    let mut cur = h.clone();
    for _ in 0..depth {
        if is_probably_trivial(bb, &cur, cfg, rng) {
            return true;
        }
        cur = derived_subgroup(bb, &cur, cfg, rng);
    }
    is_probably_trivial(bb, &cur, cfg, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::{bb_from_matrices, bb_from_spec, MatrixOracle};
    use crate::matgrp::{self, Family, GroupSpec, Matrix};
    use rand::SeedableRng;

    fn closure_of(
        bb: &crate::blackbox::MatrixBlackBox,
        sub: &Subgroup<MatrixOracle>,
        cap: usize,
    ) -> Option<std::collections::HashSet<Vec<u8>>> {
        let f = bb.oracle().field().clone();
        let mats: Vec<Matrix> = sub.gens().iter().map(|e| bb.oracle().matrix(e).clone()).collect();
        crate::oracle::closure_set(&f, &mats, cap)
    }

    #[test]
    fn normal_closure_examples_in_sl2_5() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let f = bb.oracle().field().clone();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let cfg = SubgrpCfg::default();
        let x = bb.generating_subgroup();

        // trivial stays trivial
        let nc = normal_closure(&bb, &Subgroup::trivial(), &x, &cfg, &mut rng);
        assert!(nc.gens().is_empty());

        // central -I is already normal
        let minus_i = bb
            .oracle()
            .element_from_matrix(Matrix::diag(&f, &[f.from_int(4), f.from_int(4)]));
        let nc = normal_closure(&bb, &Subgroup::from_gens(vec![minus_i]), &x, &cfg, &mut rng);
        assert_eq!(closure_of(&bb, &nc, 8).unwrap().len(), 2);

        // a non-central element normally generates all of SL2(5)
        let t = bb.gens()[0].clone();
        let nc = normal_closure(&bb, &Subgroup::from_gens(vec![t]), &x, &cfg, &mut rng);
        assert_eq!(closure_of(&bb, &nc, 1 << 12).unwrap().len(), 120);
    }

    #[test]
    fn derived_subgroup_examples() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let cfg = SubgrpCfg::default();

        // SL2(5) is perfect
        let d = derived_subgroup(&bb, &bb.generating_subgroup(), &cfg, &mut rng);
        assert_eq!(closure_of(&bb, &d, 1 << 12).unwrap().len(), 120);

        // an abelian (cyclic) subgroup has trivial derived subgroup
        let f = bb.oracle().field().clone();
        let h = Subgroup::from_gens(vec![bb.oracle().element_from_matrix(Matrix::diag(
            &f,
            &[f.from_int(2), f.from_int(3)],
        ))]);
        let d = derived_subgroup(&bb, &h, &cfg, &mut rng);
        assert!(is_probably_trivial(&bb, &d, &cfg, &mut rng));
    }

    #[test]
    fn derived_subgroup_of_gl2_5_is_sl2_5() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let f = spec.module_field().unwrap();
        let mut gens = matgrp::standard_generators(&spec).unwrap();
        gens.push(Matrix::diag(&f, &[f.primitive_element(), f.one()]));
        let bb = bb_from_matrices(f, 2, gens, None, 5, None);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let cfg = SubgrpCfg::default();
        let d = derived_subgroup(&bb, &bb.generating_subgroup(), &cfg, &mut rng);
        assert_eq!(closure_of(&bb, &d, 1 << 12).unwrap().len(), 120);
    }

    #[test]
    fn upper_triangular_group_is_solvable_but_sl2_is_not() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let f = bb.oracle().field().clone();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let cfg = SubgrpCfg::default();

        // Borel subgroup of GL2(5): upper triangular invertibles
        let mut t = Matrix::identity(&f, 2);
        t.set_entry(&f, 0, 1, &f.one());
        let b = Subgroup::from_gens(vec![
            bb.oracle().element_from_matrix(t),
            bb.oracle()
                .element_from_matrix(Matrix::diag(&f, &[f.primitive_element(), f.one()])),
            bb.oracle()
                .element_from_matrix(Matrix::diag(&f, &[f.one(), f.primitive_element()])),
        ]);
        // exact closure of the Borel: 4 * 4 * 5 = 80 elements, solvable of
        // derived length 3
        let bm: Vec<Matrix> = b.gens().iter().map(|e| bb.oracle().matrix(e).clone()).collect();
        assert_eq!(crate::oracle::brute_closure(&f, &bm, 200), Some(80));
        let depth = default_solvable_depth(2, 1, 5);
        assert!(depth >= 3);
        assert!(is_probably_solvable(&bb, &b, depth, &cfg, &mut rng));
        assert!(!is_probably_solvable(
            &bb,
            &bb.generating_subgroup(),
            5,
            &cfg,
            &mut rng
        ));
        // abelian: solvable at depth 1
        let h = Subgroup::from_gens(vec![bb
            .oracle()
            .element_from_matrix(Matrix::diag(&f, &[f.from_int(2), f.from_int(3)]))]);
        assert!(is_probably_solvable(&bb, &h, 1, &cfg, &mut rng));
    }

    #[test]
    fn p_group_test_on_unipotent_and_full_groups() {
        let spec = GroupSpec::new(Family::Sl, 3, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let f = bb.oracle().field().clone();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let cfg = SubgrpCfg::default();
        // upper unitriangular subgroup of SL3(5)
        let mut u1 = Matrix::identity(&f, 3);
        u1.set_entry(&f, 0, 1, &f.one());
        let mut u2 = Matrix::identity(&f, 3);
        u2.set_entry(&f, 1, 2, &f.one());
        let uni = Subgroup::from_gens(vec![
            bb.oracle().element_from_matrix(u1),
            bb.oracle().element_from_matrix(u2),
        ]);
        assert!(is_p_group(&bb, &uni, 5, 32, &cfg, &mut rng));
        assert!(!is_p_group(&bb, &bb.generating_subgroup(), 5, 32, &cfg, &mut rng));
        assert!(is_p_group(&bb, &Subgroup::trivial(), 5, 8, &cfg, &mut rng));
    }

    #[test]
    fn monte_carlo_outputs_match_exact_objects_and_stay_normal() {
        // normal closure output is conjugation-stable under fresh
        // conjugators (checked white-box through closures)
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let cfg = SubgrpCfg::default();
        let x = bb.generating_subgroup();
        let t = bb.gens()[0].clone();
        let nc = normal_closure(&bb, &Subgroup::from_gens(vec![t]), &x, &cfg, &mut rng);
        let base = closure_of(&bb, &nc, 1 << 12).unwrap();
        let mut sampler = Sampler::new(&bb, x, 100, 77);
        for _ in 0..100 {
            let c = sampler.draw();
            let mut conj = nc.clone();
            for g in nc.gens() {
                conj.push_dedup(&bb, bb.conj(g, &c));
            }
            assert_eq!(closure_of(&bb, &conj, 1 << 12).unwrap(), base);
        }
    }
}
