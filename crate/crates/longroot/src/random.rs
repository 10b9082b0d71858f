//! Product-replacement random element generation, plus the named-stream
//! seed splitter all randomness flows through.
//!
//! The mixing parameters are engineering choices (the method itself fixes
//! none): `slots = max(10, |gens| + 2)`, 100 burn-in moves, and one classic
//! accumulator-free replacement move per draw. All are configurable from
//! the CLI.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

use crate::blackbox::{BlackBox, Element, Oracle, Subgroup};

/// Derives independent, reproducible RNG streams from one master seed.
/// Adding draws to one named stream never perturbs another.
#[derive(Debug, Clone, Copy)]
pub struct RngFactory {
    master: u64,
}

impl RngFactory {
    pub fn new(master: u64) -> Self {
        RngFactory { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream(&self, label: &str) -> ChaCha12Rng {
        let mut h = Sha256::new();
        h.update(self.master.to_le_bytes());
        h.update(label.as_bytes());
        let digest = h.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        ChaCha12Rng::from_seed(seed)
    }

    pub fn seed_u64(&self, label: &str) -> u64 {
        self.stream(label).gen()
    }
}

/// Product-replacement state over a subgroup's generators.
pub struct PrsState<O: Oracle> {
    slots: Vec<Element<O>>,
    rng: ChaCha12Rng,
    steps_taken: u64,
}

pub fn default_slots(gen_count: usize) -> usize {
    10usize.max(gen_count + 2)
}

pub const DEFAULT_BURN_IN: usize = 100;

/// Fills the slots cyclically from the generators of `h` and applies
/// `burn_in` replacement moves. The trivial subgroup (no generators)
/// yields the identity on every draw.
pub fn prs_init<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    slots: usize,
    burn_in: usize,
    seed: u64,
) -> PrsState<O> {
    let slots = slots.max(2);
    let mut state = PrsState {
        slots: if h.gens().is_empty() {
            vec![bb.identity(); slots]
        } else {
            (0..slots.max(h.gens().len()))
                .map(|i| h.gens()[i % h.gens().len()].clone())
                .collect()
        },
        rng: ChaCha12Rng::seed_from_u64(seed),
        steps_taken: 0,
    };
    for _ in 0..burn_in {
        state.step(bb);
    }
    state
}

impl<O: Oracle> PrsState<O> {
    fn step(&mut self, bb: &BlackBox<O>) -> Element<O> {
        let s = self.slots.len();
        let i = self.rng.gen_range(0..s);
        let mut j = self.rng.gen_range(0..s - 1);
        if j >= i {
            j += 1;
        }
        let right = self.rng.gen_bool(0.5);
        let invert = self.rng.gen_bool(0.5);
        let other = if invert {
            bb.inv(&self.slots[j])
        } else {
            self.slots[j].clone()
        };
        let new = if right {
            bb.mult(&self.slots[i], &other)
        } else {
            bb.mult(&other, &self.slots[i])
        };
        self.slots[i] = new.clone();
        self.steps_taken += 1;
        new
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    pub fn slots(&self) -> &[Element<O>] {
        &self.slots
    }
}

/// One replacement move; returns the refreshed slot value.
pub fn prs_next<O: Oracle>(state: &mut PrsState<O>, bb: &BlackBox<O>) -> Element<O> {
    state.step(bb)
}

/// A subgroup paired with its own replacement state; the unit the
/// algorithms sample from.
pub struct Sampler<'bb, O: Oracle> {
    bb: &'bb BlackBox<O>,
    subgroup: Subgroup<O>,
    state: PrsState<O>,
}

impl<'bb, O: Oracle> Sampler<'bb, O> {
    pub fn new(bb: &'bb BlackBox<O>, subgroup: Subgroup<O>, burn_in: usize, seed: u64) -> Self {
        let slots = default_slots(subgroup.gens().len());
        Self::with_slots(bb, subgroup, slots, burn_in, seed)
    }

    pub fn with_slots(
        bb: &'bb BlackBox<O>,
        subgroup: Subgroup<O>,
        slots: usize,
        burn_in: usize,
        seed: u64,
    ) -> Self {
        let state = prs_init(bb, &subgroup, slots, burn_in, seed);
        Sampler {
            bb,
            subgroup,
            state,
        }
    }

    pub fn draw(&mut self) -> Element<O> {
        self.state.step(self.bb)
    }

    pub fn subgroup(&self) -> &Subgroup<O> {
        &self.subgroup
    }

    pub fn bb(&self) -> &'bb BlackBox<O> {
        self.bb
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::bb_from_spec;
    use crate::matgrp::{Family, GroupSpec};
    use num_bigint::BigUint;

    #[test]
    fn trivial_subgroup_draws_identity() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let mut st = prs_init(&bb, &Subgroup::trivial(), 10, 50, 1);
        for _ in 0..20 {
            assert!(bb.is_identity(&prs_next(&mut st, &bb)));
        }
    }

    #[test]
    fn draws_respect_the_exponent_and_replay_bit_exact() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let h = bb.generating_subgroup();
        let mut a = prs_init(&bb, &h, 10, 100, 42);
        let mut b = prs_init(&bb, &h, 10, 100, 42);
        for _ in 0..50 {
            let x = prs_next(&mut a, &bb);
            let y = prs_next(&mut b, &bb);
            assert!(bb.eq(&x, &y));
            assert!(bb.order_divides(&x, &BigUint::from(480u32)));
        }
    }

    #[test]
    fn sl2_5_draws_hit_many_distinct_elements() {
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let h = bb.generating_subgroup();
        let mut st = prs_init(&bb, &h, 10, 100, 7);
        let mut seen: Vec<Element<_>> = Vec::new();
        for _ in 0..100 {
            let x = prs_next(&mut st, &bb);
            if !seen.iter().any(|y| bb.eq(y, &x)) {
                seen.push(x);
            }
        }
        assert!(seen.len() >= 15, "only {} distinct draws", seen.len());
    }

    #[test]
    fn slot_invariant_on_a_tiny_group() {
        // the subgroup generated by the slots never changes
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let f = bb.oracle().field().clone();
        let h = bb.generating_subgroup();
        let mut st = prs_init(&bb, &h, 6, 0, 3);
        let initial: Vec<_> = st
            .slots()
            .iter()
            .map(|e| bb.oracle().matrix(e).clone())
            .collect();
        let base = crate::oracle::brute_closure(&f, &initial, 1 << 12).unwrap();
        assert_eq!(base, 120);
        for _ in 0..200 {
            prs_next(&mut st, &bb);
        }
        let after: Vec<_> = st
            .slots()
            .iter()
            .map(|e| bb.oracle().matrix(e).clone())
            .collect();
        assert_eq!(
            crate::oracle::brute_closure(&f, &after, 1 << 12),
            Some(120)
        );
    }

    #[test]
    fn rng_factory_streams_are_stable_and_independent() {
        let f = RngFactory::new(99);
        let mut s1 = f.stream("alpha");
        let mut s2 = f.stream("alpha");
        let mut s3 = f.stream("beta");
        let a: u64 = s1.gen();
        assert_eq!(a, s2.gen::<u64>());
        assert_ne!(a, s3.gen::<u64>());
    }

    #[test]
    fn order_census_of_sl2_5_draws() {
        // every order in {1,2,3,4,5,6,10} should appear in 5000 draws;
        // the exact census of SL2(5) has exactly these orders
        let spec = GroupSpec::new(Family::Sl, 2, 5, 1);
        let bb = bb_from_spec(&spec).unwrap();
        let f = bb.oracle().field().clone();
        // exhaustive oracle: closure + per-element order
        let gens: Vec<_> = bb.gens().iter().map(|e| bb.oracle().matrix(e).clone()).collect();
        let all = crate::oracle::closure_elements(&f, &gens, 1 << 12).unwrap();
        let mut exact: Vec<usize> = all
            .iter()
            .map(|m| crate::oracle::order_of_matrix(&f, m, 64).unwrap())
            .collect();
        exact.sort_unstable();
        exact.dedup();
        assert_eq!(exact, vec![1, 2, 3, 4, 5, 6, 10]);

        let h = bb.generating_subgroup();
        let mut st = prs_init(&bb, &h, 10, 100, 17);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..5000 {
            let x = prs_next(&mut st, &bb);
            let m = bb.oracle().matrix(&x);
            seen.insert(crate::oracle::order_of_matrix(&f, m, 64).unwrap());
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), exact);
    }
}
