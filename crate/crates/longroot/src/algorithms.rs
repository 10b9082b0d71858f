//! The Monte-Carlo procedures: commuting-product construction through
//! recursive involution centralizers, SL2 component extraction, the long
//! root test, the G2 / triality-D4 routine, the main orchestration, the
//! centralizer split and p-core recognition.
//!
//! Everything here speaks only to the black-box oracle; family metadata
//! is an optional optimization channel threaded through the config, never
//! a correctness dependency (except for the split powering schemes, where
//! a generic fallback covers its absence).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde_json::json;

use crate::blackbox::{BlackBox, Element, Oracle, Subgroup};
use crate::involution::{
    centralizer_gens, make_involution, make_pseudo_involution, zeta, ZetaKind,
};
use crate::matgrp::Family;
use crate::random::Sampler;
use crate::subgrp::{
    derived_subgroup, is_p_group, is_probably_trivial, normal_closure, second_derived, SubgrpCfg,
};
use crate::transcript::Transcript;
use crate::{Error, Result};

/// Family metadata for rank bounds, restart floors and torus schemes.
#[derive(Debug, Clone, Copy)]
pub struct FamilyHint {
    pub family: Family,
    pub n: usize,
}

impl FamilyHint {
    /// Lie rank of the simple quotient.
    pub fn rank(&self) -> usize {
        match self.family {
            Family::Sl | Family::AffineSl | Family::BlockSl => self.n - 1,
            Family::Su => self.n / 2,
            Family::Sp => self.n / 2,
            Family::OmegaOdd => (self.n - 1) / 2,
            Family::OmegaPlus | Family::OmegaMinus => self.n / 2,
        }
    }
}

/// Tuning for the Monte-Carlo procedures. Defaults follow the reported
/// practice (50 centralizer generators, error budget epsilon = 0.05).
#[derive(Debug, Clone)]
pub struct AlgoCfg {
    pub epsilon: f64,
    /// zeta outputs collected per centralizer.
    pub centralizer_count: usize,
    /// zeta-1 samples per pseudo-involution acceptance trial.
    pub zeta1_samples: usize,
    /// Accepted pseudo-involution trials m; error <= (23/24)^m. Zero means
    /// derive from epsilon.
    pub accept_trials: usize,
    /// Pseudo-involution search budget per component.
    pub pseudo_trials: usize,
    /// Draw budget factor c in c * N for the involution search.
    pub max_draw_factor: usize,
    /// Encoding-length proxy N = n^2 k ceil(log2 p).
    pub encoding_length: usize,
    pub long_root_tests: usize,
    pub central_inv_draws: usize,
    pub max_restarts: usize,
    pub discrimination_samples: usize,
    pub component_count_trials: usize,
    pub split_draws: usize,
    pub split_check_samples: usize,
    pub pcore_step1_samples: usize,
    pub pcore_layers: usize,
    pub max_components: usize,
    pub burn_in: usize,
    /// Product-replacement slot override (default: max(10, gens + 2)).
    pub slots: Option<usize>,
    pub sub: SubgrpCfg,
    pub family_hint: Option<FamilyHint>,
}

impl Default for AlgoCfg {
    fn default() -> Self {
        AlgoCfg {
            epsilon: 0.05,
            centralizer_count: 50,
            zeta1_samples: 16,
            accept_trials: 0,
            pseudo_trials: 96,
            max_draw_factor: 4,
            encoding_length: 64,
            long_root_tests: 40,
            central_inv_draws: 200,
            max_restarts: 32,
            discrimination_samples: 96,
            component_count_trials: 4,
            split_draws: 64,
            split_check_samples: 24,
            pcore_step1_samples: 32,
            pcore_layers: 6,
            max_components: 8,
            burn_in: 100,
            slots: None,
            sub: SubgrpCfg::default(),
            family_hint: None,
        }
    }
}

/// Sampler honoring the config's slot override.
fn mk_sampler<'b, O: Oracle>(
    bb: &'b BlackBox<O>,
    sub: Subgroup<O>,
    cfg: &AlgoCfg,
    seed: u64,
) -> Sampler<'b, O> {
    match cfg.slots {
        Some(s) => Sampler::with_slots(bb, sub, s, cfg.burn_in, seed),
        None => Sampler::new(bb, sub, cfg.burn_in, seed),
    }
}

impl AlgoCfg {
    /// m with (23/24)^m <= epsilon.
    pub fn accept_trials_effective(&self) -> usize {
        if self.accept_trials > 0 {
            return self.accept_trials;
        }
        let m = (self.epsilon.ln() / (23.0f64 / 24.0).ln()).ceil();
        (m as usize).clamp(8, 400)
    }

    /// Involution-search budget: c * N, or the rank-based bound when
    /// family metadata is present.
    pub fn involution_draw_budget(&self) -> usize {
        let bound = match self.family_hint {
            Some(h) => self.max_draw_factor * 8 * h.rank().max(2),
            None => self.max_draw_factor * self.encoding_length,
        };
        bound.max(48)
    }

    /// Restart budget from the per-family success floor, else flat.
    pub fn restarts_effective(&self) -> usize {
        match self.family_hint {
            Some(h) => {
                let rank = h.rank().max(2) as f64;
                let rho = 0.25 * (1.0 - 1.0 / (2.0 * rank));
                let n = (self.epsilon.ln() / (1.0 - rho).ln()).ceil() as usize;
                n.clamp(8, 64)
            }
            None => self.max_restarts,
        }
    }

    /// Attaches descriptor-derived metadata.
    pub fn with_spec(mut self, spec: &crate::matgrp::GroupSpec) -> Self {
        let kmod = match spec.family {
            Family::Su => 2 * spec.k,
            _ => spec.k,
        };
        let n = spec.rep_dim();
        let logp = 64 - (spec.p - 1).leading_zeros() as usize;
        self.encoding_length = n * n * kmod * logp;
        self.family_hint = Some(FamilyHint {
            family: spec.family,
            n: spec.n,
        });
        self
    }
}

/// Result of the commuting-product construction.
pub enum CommOutcome<O: Oracle> {
    /// Terminal commuting product of (P)SL2-type sections plus the number
    /// of recursive centralizer steps taken.
    Product(Subgroup<O>, usize),
    /// A p-core probe fired first (p-core recognition mode only).
    Witness(Element<O>),
}

/// Optional p-core probe invoked on every involution before its
/// centralizer is generated.
pub type PcoreProbe<'a, O> =
    &'a mut dyn FnMut(&BlackBox<O>, &Subgroup<O>, &Element<O>) -> Option<Element<O>>;

fn noop_probe<O: Oracle>() -> impl FnMut(&BlackBox<O>, &Subgroup<O>, &Element<O>) -> Option<Element<O>>
{
    |_: &BlackBox<O>, _: &Subgroup<O>, _: &Element<O>| None
}

/// Constructs a commuting product of (P)SL2-type subgroups by recursive
/// involution-centralizer construction: find a non-central involution,
/// generate L with heart <= L <= C(i) through both zeta branches, take
/// the second derived subgroup, recurse; when every produced involution
/// is central the current group is returned, and when L'' vanishes the
/// derived normal closure of the involution is returned.
pub fn commuting_product<O: Oracle>(
    bb: &BlackBox<O>,
    x: &Subgroup<O>,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
    probe: PcoreProbe<'_, O>,
) -> Result<CommOutcome<O>> {
    let mut cur = x.clone();
    let mut depth = 0usize;
    loop {
        let mut sampler = mk_sampler(bb, cur.clone(), cfg, rng.gen());
        let budget = cfg.involution_draw_budget();
        let mut even_seen = false;
        let mut central_seen = 0usize;
        let mut found: Option<Element<O>> = None;
        for _ in 0..budget {
            let g = sampler.draw();
            let Some(i) = make_involution(bb, &g) else {
                continue;
            };
            even_seen = true;
            if bb.commutes_with_all(&i, &cur) {
                central_seen += 1;
                continue;
            }
            found = Some(i);
            break;
        }
        if !even_seen {
            return Err(Error::Stalled(format!(
                "no even-order element in {budget} draws at depth {depth}"
            )));
        }
        let Some(i) = found else {
            tr.log(
                "commuting-product",
                "all-central",
                json!({"depth": depth, "central_involutions_seen": central_seen}),
            );
            return Ok(CommOutcome::Product(cur, depth));
        };
        if let Some(w) = probe(bb, &cur, &i) {
            tr.log("commuting-product", "pcore-probe-hit", json!({"depth": depth}));
            return Ok(CommOutcome::Witness(w));
        }
        let l = centralizer_gens(&mut sampler, &i, cfg.centralizer_count)?;
        let l2 = second_derived(bb, &l, &cfg.sub, rng);
        if is_probably_trivial(bb, &l2, &cfg.sub, rng) {
            // L'' = 1: the current group is a commuting product already and
            // i acts as a pseudo-involution on some of its components.
            let nc = normal_closure(bb, &Subgroup::from_gens(vec![i]), &cur, &cfg.sub, rng);
            let out = derived_subgroup(bb, &nc, &cfg.sub, rng);
            tr.log(
                "commuting-product",
                "socle-trivial",
                json!({"depth": depth, "closure_gens": out.gens().len()}),
            );
            return Ok(CommOutcome::Product(out, depth));
        }
        tr.log(
            "commuting-product",
            "recurse",
            json!({"depth": depth, "centralizer_gens": l.gens().len(), "socle_gens": l2.gens().len()}),
        );
        cur = l2;
        depth += 1;
    }
}

/// zeta for a pseudo-involution, both branches: the odd-order branch uses
/// the same square-root trick and lands in the normalizer of <t>.
fn zeta_pseudo<O: Oracle>(bb: &BlackBox<O>, t: &Element<O>, g: &Element<O>) -> Element<O> {
    let z = bb.mult(t, &bb.conj(t, g));
    let zm = bb.pow(&z, bb.exponent().odd_part());
    if bb.is_identity(&zm) {
        let h = bb.pow(&z, &bb.exponent().half_odd_plus());
        bb.mult(&h, &bb.inv(g))
    } else {
        let mut s = zm;
        loop {
            let s2 = bb.mult(&s, &s);
            if bb.is_identity(&s2) {
                return s;
            }
            s = s2;
        }
    }
}

/// zeta-1 only (odd-order products), for the acceptance test of
/// component extraction.
fn zeta1_pseudo<O: Oracle>(
    bb: &BlackBox<O>,
    t: &Element<O>,
    g: &Element<O>,
) -> Option<Element<O>> {
    let z = bb.mult(t, &bb.conj(t, g));
    let zm = bb.pow(&z, bb.exponent().odd_part());
    if bb.is_identity(&zm) {
        let h = bb.pow(&z, &bb.exponent().half_odd_plus());
        Some(bb.mult(&h, &bb.inv(g)))
    } else {
        None
    }
}

/// Outcome of SL2 extraction from a commuting product.
pub enum ExtractOutcome<O: Oracle> {
    /// One component, believed SL2(q^l), with a pseudo-involution in it.
    Component {
        k: Subgroup<O>,
        pseudo: Element<O>,
    },
    /// No pseudo-involution found: the product consists of PSL2 sections.
    AllPsl2,
}

/// Extracts one SL2 component from a commuting product of (P)SL2-type
/// groups. A pseudo-involution t is accepted only after `m` independent
/// pseudo-involutions all give a trivial second derived of the zeta-1
/// closure; any failure shrinks the product to the derived normal closure
/// of t and restarts the count. Error probability at most (23/24)^m.
pub fn extract_sl2<O: Oracle>(
    bb: &BlackBox<O>,
    l: &Subgroup<O>,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<ExtractOutcome<O>> {
    let m = cfg.accept_trials_effective();
    let mut cur = l.clone();
    let mut successes = 0usize;
    let mut shrink_count = 0usize;
    let mut last_pseudo: Option<Element<O>> = None;
    while successes < m {
        let mut sampler = mk_sampler(bb, cur.clone(), cfg, rng.gen());
        let Some(t) = make_pseudo_involution(&mut sampler, cfg.pseudo_trials) else {
            if successes == 0 && shrink_count == 0 {
                tr.log("extract-sl2", "all-psl2", json!({}));
                return Ok(ExtractOutcome::AllPsl2);
            }
            return Err(Error::Stalled(
                "pseudo-involutions vanished mid-extraction".into(),
            ));
        };
        // test <zeta1^t(S)>'' = 1
        let mut closure = Subgroup::trivial();
        for _ in 0..cfg.zeta1_samples {
            let g = sampler.draw();
            if let Some(v) = zeta1_pseudo(bb, &t, &g) {
                closure.push_dedup(bb, v);
            }
        }
        let dd = second_derived(bb, &closure, &cfg.sub, rng);
        if is_probably_trivial(bb, &dd, &cfg.sub, rng) {
            successes += 1;
            last_pseudo = Some(t);
        } else {
            let nc = normal_closure(bb, &Subgroup::from_gens(vec![t]), &cur, &cfg.sub, rng);
            cur = derived_subgroup(bb, &nc, &cfg.sub, rng);
            successes = 0;
            shrink_count += 1;
            if cur.gens().is_empty() {
                return Err(Error::Stalled("extraction shrank to the identity".into()));
            }
        }
    }
    tr.log(
        "extract-sl2",
        "accept",
        json!({"trials": m, "shrinks": shrink_count, "gens": cur.gens().len()}),
    );
    Ok(ExtractOutcome::Component {
        k: cur,
        pseudo: last_pseudo.expect("accepted after at least one trial"),
    })
}

/// Extracts every component of the commuting product: after accepting a
/// component K with pseudo-involution t in it, the remaining product is
/// the second derived subgroup of the zeta closure of t, and extraction
/// repeats there.
pub fn extract_all_components<O: Oracle>(
    bb: &BlackBox<O>,
    l: &Subgroup<O>,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<(Vec<Subgroup<O>>, bool)> {
    let mut comps = Vec::new();
    let mut cur = l.clone();
    loop {
        if is_probably_trivial(bb, &cur, &cfg.sub, rng) {
            break;
        }
        match extract_sl2(bb, &cur, cfg, rng, tr)? {
            ExtractOutcome::AllPsl2 => {
                if comps.is_empty() {
                    return Ok((comps, true));
                }
                break;
            }
            ExtractOutcome::Component { k, pseudo } => {
                // centralizer of the pseudo-involution within the current
                // product: kills K down to a normalizer slice, keeps the
                // other components whole; its second derived is their
                // product.
                let mut sampler = mk_sampler(bb, cur.clone(), cfg, rng.gen());
                let mut rest = Subgroup::trivial();
                for _ in 0..cfg.centralizer_count {
                    let g = sampler.draw();
                    rest.push_dedup(bb, zeta_pseudo(bb, &pseudo, &g));
                }
                comps.push(k);
                if comps.len() >= cfg.max_components {
                    break;
                }
                cur = second_derived(bb, &rest, &cfg.sub, rng);
            }
        }
    }
    tr.log(
        "extract-components",
        "done",
        json!({"components": comps.len()}),
    );
    Ok((comps, false))
}

/// Verdict of the long-root test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongRootKind {
    LongRoot,
    NotLongRoot,
}

pub struct LongRootVerdict<O: Oracle> {
    pub kind: LongRootKind,
    pub k: Subgroup<O>,
    pub reason: Option<String>,
}

/// The unique central involution of a believed-SL2 subgroup, by powering
/// random elements and testing centrality against the stored generators.
pub fn central_involution<O: Oracle>(
    bb: &BlackBox<O>,
    k: &Subgroup<O>,
    draws: usize,
    burn_in: usize,
    rng: &mut ChaCha12Rng,
) -> Option<Element<O>> {
    let mut sampler = Sampler::new(bb, k.clone(), burn_in, rng.gen());
    for _ in 0..draws {
        let g = sampler.draw();
        if let Some(i) = make_involution(bb, &g) {
            if bb.commutes_with_all(&i, k) {
                return Some(i);
            }
        }
    }
    None
}

/// Checks whether K (believed isomorphic to (P)SL2(q^l)) is a long root
/// SL2(q)-subgroup of <G>: builds C = C_G(z)'' for the central involution
/// z of K, forms N = <K, K^g> for random g in C, and order-tests random
/// elements of N against q(q^2 - 1). A NotLongRoot verdict is always
/// correct; the test is one-sided.
pub fn is_long_root<O: Oracle>(
    bb: &BlackBox<O>,
    k: &Subgroup<O>,
    g_whole: &Subgroup<O>,
    q: &BigUint,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<LongRootVerdict<O>> {
    let Some(z) = central_involution(bb, k, cfg.central_inv_draws, cfg.burn_in, rng) else {
        // short-root PSL2 over extension fields has no central involution
        tr.log("long-root-test", "no-central-involution", json!({}));
        return Ok(LongRootVerdict {
            kind: LongRootKind::NotLongRoot,
            k: k.clone(),
            reason: Some("no central involution".into()),
        });
    };
    let d = q * (q * q - BigUint::one());
    // quick rejection on K's own elements
    let mut ksampler = mk_sampler(bb, k.clone(), cfg, rng.gen());
    for _ in 0..cfg.long_root_tests / 2 {
        let x = ksampler.draw();
        if !bb.order_divides(&x, &d) {
            tr.log("long-root-test", "order-violation-in-k", json!({}));
            return Ok(LongRootVerdict {
                kind: LongRootKind::NotLongRoot,
                k: k.clone(),
                reason: Some("element order does not divide q(q^2-1)".into()),
            });
        }
    }
    // C = C_G(z)''
    let mut gsampler = mk_sampler(bb, g_whole.clone(), cfg, rng.gen());
    let cz = centralizer_gens(&mut gsampler, &z, cfg.centralizer_count)?;
    let c2 = second_derived(bb, &cz, &cfg.sub, rng);
    let g = if c2.gens().is_empty() {
        bb.identity()
    } else {
        let mut csampler = mk_sampler(bb, c2.clone(), cfg, rng.gen());
        csampler.draw()
    };
    // N = <K, K^g>
    let mut n = k.clone();
    for kg in k.gens() {
        n.push_dedup(bb, bb.conj(kg, &g));
    }
    let mut nsampler = mk_sampler(bb, n.clone(), cfg, rng.gen());
    for gen in n.gens() {
        if !bb.order_divides(gen, &d) {
            tr.log("long-root-test", "order-violation-in-n", json!({}));
            return Ok(LongRootVerdict {
                kind: LongRootKind::NotLongRoot,
                k: k.clone(),
                reason: Some("conjugate pair generates elements beyond q(q^2-1)".into()),
            });
        }
    }
    for _ in 0..cfg.long_root_tests {
        let x = nsampler.draw();
        if !bb.order_divides(&x, &d) {
            tr.log("long-root-test", "order-violation-in-n", json!({}));
            return Ok(LongRootVerdict {
                kind: LongRootKind::NotLongRoot,
                k: k.clone(),
                reason: Some("conjugate pair generates elements beyond q(q^2-1)".into()),
            });
        }
    }
    tr.log("long-root-test", "accept", json!({"tests": cfg.long_root_tests}));
    Ok(LongRootVerdict {
        kind: LongRootKind::LongRoot,
        k: k.clone(),
        reason: None,
    })
}

/// Number of components of the semisimple socle of one involution
/// centralizer inside <H>; distinguishes SL3-type (one component) from
/// G2-type (two components).
pub fn count_centralizer_components<O: Oracle>(
    bb: &BlackBox<O>,
    h: &Subgroup<O>,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<usize> {
    let mut sampler = mk_sampler(bb, h.clone(), cfg, rng.gen());
    let budget = cfg.involution_draw_budget();
    let mut inv = None;
    for _ in 0..budget {
        let g = sampler.draw();
        if let Some(i) = make_involution(bb, &g) {
            if !bb.commutes_with_all(&i, h) {
                inv = Some(i);
                break;
            }
        }
    }
    let Some(i) = inv else {
        return Err(Error::Stalled(
            "no non-central involution for component counting".into(),
        ));
    };
    let c = centralizer_gens(&mut sampler, &i, cfg.centralizer_count)?;
    let c2 = second_derived(bb, &c, &cfg.sub, rng);
    let (comps, _all_psl2) = extract_all_components(bb, &c2, cfg, rng, tr)?;
    Ok(comps.len())
}

/// Ladder outcome for the depth-one discrimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discrimination {
    Classical,
    G2,
    ThreeD4 { q: BigUint },
}

fn biguint_pow(base: &BigUint, e: u32) -> BigUint {
    base.pow(e)
}

/// |3D4(q)| = q^12 (q^8 + q^4 + 1)(q^6 - 1)(q^2 - 1).
pub fn order_3d4(q: &BigUint) -> BigUint {
    let one = BigUint::one();
    biguint_pow(q, 12)
        * (biguint_pow(q, 8) + biguint_pow(q, 4) + &one)
        * (biguint_pow(q, 6) - &one)
        * (biguint_pow(q, 2) - &one)
}

/// |G2(q)| = q^6 (q^6 - 1)(q^2 - 1).
pub fn order_g2(q: &BigUint) -> BigUint {
    let one = BigUint::one();
    biguint_pow(q, 6) * (biguint_pow(q, 6) - &one) * (biguint_pow(q, 2) - &one)
}

/// The depth-one discrimination ladder: an element of order dividing
/// q^4 - 1 but not q^6 - 1 certifies a classical group; an element of
/// order dividing q^6 (q^8 + q^4 + 1) but not q^6 (q^6 - 1) certifies
/// triality D4; the torsion test against |3D4(p^(k/3))| guards the cubed
/// field-size ambiguity; component counting separates G2 from SL3-type.
pub fn discriminate<O: Oracle>(
    bb: &BlackBox<O>,
    g_whole: &Subgroup<O>,
    q: &BigUint,
    p: u64,
    k_deg: usize,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<Discrimination> {
    let one = BigUint::one();
    let mut sampler = mk_sampler(bb, g_whole.clone(), cfg, rng.gen());
    let d_q4 = biguint_pow(q, 4) - &one;
    let d_q6 = biguint_pow(q, 6) - &one;
    for _ in 0..cfg.discrimination_samples {
        let g = sampler.draw();
        if bb.order_divides(&g, &d_q4) && !bb.order_divides(&g, &d_q6) {
            tr.log("discriminate", "classical-witness", json!({"test": "q4-1 vs q6-1"}));
            return Ok(Discrimination::Classical);
        }
    }
    let d_3d4 = biguint_pow(q, 6) * (biguint_pow(q, 8) + biguint_pow(q, 4) + &one);
    let d_g2ish = biguint_pow(q, 6) * &d_q6;
    for _ in 0..cfg.discrimination_samples {
        let g = sampler.draw();
        if bb.order_divides(&g, &d_3d4) && !bb.order_divides(&g, &d_g2ish) {
            tr.log("discriminate", "triality-witness", json!({}));
            return Ok(Discrimination::ThreeD4 { q: q.clone() });
        }
    }
    if k_deg % 3 == 0 {
        let q1 = BigUint::from(p).pow((k_deg / 3) as u32);
        let m = order_3d4(&q1);
        let mut violated = false;
        for _ in 0..cfg.discrimination_samples {
            let g = sampler.draw();
            if !bb.order_divides(&g, &m) {
                violated = true;
                break;
            }
        }
        if !violated {
            tr.log("discriminate", "torsion-matches-3d4-subfield", json!({}));
            return Ok(Discrimination::ThreeD4 { q: q1 });
        }
    }
    // remaining candidates: SL3-type vs G2
    let comps = count_centralizer_components(bb, g_whole, cfg, rng, tr)?;
    tr.log("discriminate", "component-count", json!({"components": comps}));
    if comps >= 2 {
        Ok(Discrimination::G2)
    } else {
        Ok(Discrimination::Classical)
    }
}

/// Builds the long root SL2(q) from a triality-D4 involution centralizer
/// C = C_G(i) ~ SL2(q) o SL2(q^3): powers the centralizer generators by
/// q(q-1)(q+1) to pin the SL2(q^3) part, then hunts elements whose
/// (q^3 + 1)- or (q^3 - 1)-power is a non-central element h commuting
/// with it; the derived normal closure of h in C is the long root SL2(q).
pub fn sl2q_from_3d4_centralizer<O: Oracle>(
    bb: &BlackBox<O>,
    c: &Subgroup<O>,
    q: &BigUint,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<Subgroup<O>> {
    let one = BigUint::one();
    let q3 = biguint_pow(q, 3);
    let m_kill = q * (q - &one) * (q + &one);
    // L = <S^m>, the short component SL2(q^3)
    let mut lgens = Subgroup::trivial();
    for s in c.gens() {
        lgens.push_dedup(bb, bb.pow(s, &m_kill));
    }
    let mut sampler = mk_sampler(bb, c.clone(), cfg, rng.gen());
    for _ in 0..cfg.centralizer_count {
        let g = sampler.draw();
        lgens.push_dedup(bb, bb.pow(&g, &m_kill));
    }
    tr.log("g2-3d4", "short-component-gens", json!({"gens": lgens.gens().len()}));
    let conds = [
        ((q - &one) * (&q3 + &one), &q3 + &one),
        ((q + &one) * (&q3 - &one), &q3 - &one),
    ];
    for _ in 0..cfg.split_draws * 4 {
        let g = sampler.draw();
        for (full, part) in &conds {
            if !bb.order_divides(&g, full) {
                continue;
            }
            let h = bb.pow(&g, part);
            if bb.is_identity(&h) {
                continue;
            }
            let h2 = bb.mult(&h, &h);
            if bb.is_identity(&h2) {
                continue; // o(h) must exceed 2
            }
            if !bb.commutes_with_all(&h, &lgens) {
                continue;
            }
            let nc = normal_closure(bb, &Subgroup::from_gens(vec![h]), c, &cfg.sub, rng);
            let k = derived_subgroup(bb, &nc, &cfg.sub, rng);
            if k.gens().is_empty() {
                continue;
            }
            tr.log("g2-3d4", "long-root-from-torus-power", json!({}));
            return Ok(k);
        }
    }
    Err(Error::Stalled(
        "no torus element matched the triality-D4 conditions".into(),
    ))
}

/// Long root SL2(q) construction for a group promised isomorphic to G2(q)
/// or 3D4(q).
pub fn g2_3d4_long_root<O: Oracle>(
    bb: &BlackBox<O>,
    g_whole: &Subgroup<O>,
    q: &BigUint,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<Subgroup<O>> {
    let m_g2 = order_g2(q);
    let mut sampler = mk_sampler(bb, g_whole.clone(), cfg, rng.gen());
    let mut is_3d4 = false;
    for _ in 0..cfg.discrimination_samples {
        let g = sampler.draw();
        if !bb.order_divides(&g, &m_g2) {
            is_3d4 = true;
            break;
        }
    }
    tr.log(
        "g2-3d4",
        "branch",
        json!({"group": if is_3d4 { "3D4" } else { "G2" }}),
    );
    // a non-central involution and its centralizer
    let budget = cfg.involution_draw_budget();
    let mut inv = None;
    for _ in 0..budget {
        let g = sampler.draw();
        if let Some(i) = make_involution(bb, &g) {
            if !bb.commutes_with_all(&i, g_whole) {
                inv = Some(i);
                break;
            }
        }
    }
    let Some(i) = inv else {
        return Err(Error::Stalled("no involution found".into()));
    };
    let c = centralizer_gens(&mut sampler, &i, cfg.centralizer_count)?;
    if is_3d4 {
        return sl2q_from_3d4_centralizer(bb, &c, q, cfg, rng, tr);
    }
    // G2: pair the components of two involution centralizers; the unique
    // pair generating SL3-type (one component in its involution
    // centralizers) consists of the two long root SL2(q)s.
    let c2 = second_derived(bb, &c, &cfg.sub, rng);
    let (l_comps, _) = extract_all_components(bb, &c2, cfg, rng, tr)?;
    if l_comps.len() != 2 {
        return Err(Error::WrongGroupPromise);
    }
    // j: an involution in C(i) centralizing neither component
    let mut j = None;
    for _ in 0..budget {
        let g = sampler.draw();
        let r = zeta(bb, &i, &g)?;
        if r.kind != ZetaKind::Zeta0 {
            continue;
        }
        let cand = r.value;
        if !bb.commutes_with_all(&cand, &l_comps[0]) && !bb.commutes_with_all(&cand, &l_comps[1]) {
            j = Some(cand);
            break;
        }
    }
    let Some(j) = j else {
        return Err(Error::Stalled("no crossing involution in C(i)".into()));
    };
    let cj = centralizer_gens(&mut sampler, &j, cfg.centralizer_count)?;
    let cj2 = second_derived(bb, &cj, &cfg.sub, rng);
    let (k_comps, _) = extract_all_components(bb, &cj2, cfg, rng, tr)?;
    if k_comps.len() != 2 {
        return Err(Error::WrongGroupPromise);
    }
    for ls in &l_comps {
        for kt in &k_comps {
            let mut h = ls.clone();
            for g in kt.gens() {
                h.push_dedup(bb, g.clone());
            }
            let mut count = None;
            for _ in 0..cfg.component_count_trials {
                match count_centralizer_components(bb, &h, cfg, rng, tr) {
                    Ok(c) => {
                        count = Some(c);
                        break;
                    }
                    Err(_) => continue,
                }
            }
            if count == Some(1) {
                tr.log("g2-3d4", "sl3-pair-found", json!({}));
                return Ok(ls.clone());
            }
        }
    }
    Err(Error::Stalled("no SL3-type pair among the components".into()))
}

/// Outcome of the main construction in p-core mode.
pub enum MainOutcome<O: Oracle> {
    Verdict(LongRootVerdict<O>),
    Witness(Element<O>),
}

/// The main orchestration: commuting product, component extraction, the
/// depth-one G2/3D4 discrimination ladder, the long root test over all
/// components, and restarts. `ambient` is the group searched (the whole
/// black box normally; a recursion layer in p-core mode).
pub fn main_long_root<O: Oracle>(
    bb: &BlackBox<O>,
    ambient: &Subgroup<O>,
    p: u64,
    k_deg: usize,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
    probe: PcoreProbe<'_, O>,
) -> Result<MainOutcome<O>> {
    let q = bb
        .q_hint()
        .cloned()
        .ok_or_else(|| Error::BadSpec("field size q is required input metadata".into()))?;
    let g_whole = ambient.clone();
    let mut skip_ladder = false;
    let restarts = cfg.restarts_effective();
    for restart in 0..restarts {
        tr.log("main", "restart", json!({"attempt": restart}));
        // Step 1 with up to 3 augmentation rounds on a degenerate product
        let mut aug_cfg = cfg.clone();
        let mut prod = None;
        for aug in 0..3 {
            match commuting_product(bb, &g_whole, &aug_cfg, rng, tr, &mut *probe) {
                Ok(CommOutcome::Witness(w)) => return Ok(MainOutcome::Witness(w)),
                Ok(CommOutcome::Product(l, depth)) => {
                    if l.gens().is_empty() && aug < 2 {
                        aug_cfg.centralizer_count *= 2;
                        tr.log("main", "augment-centralizers", json!({"round": aug + 1}));
                        continue;
                    }
                    prod = Some((l, depth));
                    break;
                }
                Err(Error::Stalled(msg)) => {
                    tr.log("main", "stalled", json!({"why": msg}));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let Some((l, depth)) = prod else {
            continue;
        };
        if l.gens().is_empty() {
            continue;
        }
        // Step 2: one component
        let k = match extract_sl2(bb, &l, cfg, rng, tr)? {
            ExtractOutcome::AllPsl2 => {
                tr.log("main", "all-psl2-restart", json!({}));
                continue;
            }
            ExtractOutcome::Component { k, .. } => k,
        };
        // Step 2.1/2.2: the discrimination ladder at recursion depth <= 1
        if depth <= 1 && !skip_ladder {
            match discriminate(bb, &g_whole, &q, p, k_deg, cfg, rng, tr) {
                Ok(Discrimination::Classical) => {}
                Ok(Discrimination::G2) => {
                    let kk = g2_3d4_long_root(bb, &g_whole, &q, cfg, rng, tr)?;
                    return Ok(MainOutcome::Verdict(LongRootVerdict {
                        kind: LongRootKind::LongRoot,
                        k: kk,
                        reason: None,
                    }));
                }
                Ok(Discrimination::ThreeD4 { q: q_eff }) => {
                    let kk = g2_3d4_long_root(bb, &g_whole, &q_eff, cfg, rng, tr)?;
                    return Ok(MainOutcome::Verdict(LongRootVerdict {
                        kind: LongRootKind::LongRoot,
                        k: kk,
                        reason: None,
                    }));
                }
                Err(Error::Stalled(msg)) => {
                    tr.log("main", "ladder-stalled", json!({"why": msg}));
                }
                Err(e) => return Err(e),
            }
        }
        // Step 3: long root test over the components
        let v = is_long_root(bb, &k, &g_whole, &q, cfg, rng, tr)?;
        if v.kind == LongRootKind::LongRoot {
            return Ok(MainOutcome::Verdict(v));
        }
        let (comps, _) = extract_all_components(bb, &l, cfg, rng, tr)?;
        for comp in comps {
            let v = is_long_root(bb, &comp, &g_whole, &q, cfg, rng, tr)?;
            if v.kind == LongRootKind::LongRoot {
                return Ok(MainOutcome::Verdict(v));
            }
        }
        skip_ladder = true;
    }
    Err(Error::Stalled(format!(
        "no long root SL2 subgroup found in {restarts} restarts"
    )))
}

/// Convenience wrapper without a p-core probe, over the whole black box.
pub fn find_long_root<O: Oracle>(
    bb: &BlackBox<O>,
    p: u64,
    k_deg: usize,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<LongRootVerdict<O>> {
    let mut noop = noop_probe::<O>();
    let whole = bb.generating_subgroup();
    match main_long_root(bb, &whole, p, k_deg, cfg, rng, tr, &mut noop)? {
        MainOutcome::Verdict(v) => Ok(v),
        MainOutcome::Witness(_) => unreachable!("no probe installed"),
    }
}

/// Powering scheme for the centralizer split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TorusScheme {
    /// h = g^(E / (q+1)^a): linear families.
    PlusOne,
    /// h = g^(E / (q-1)^b): unitary, symplectic and orthogonal families.
    MinusOne,
}

fn split_schemes(hint: Option<FamilyHint>) -> Vec<TorusScheme> {
    match hint.map(|h| h.family) {
        Some(Family::Sl) | Some(Family::AffineSl) | Some(Family::BlockSl) => {
            vec![TorusScheme::PlusOne]
        }
        Some(_) => vec![TorusScheme::MinusOne],
        None => vec![TorusScheme::MinusOne, TorusScheme::PlusOne],
    }
}

/// Splits C = C_X(i)'' = K1 L1 with [K1, L1] = 1 for a classical
/// involution i: random elements are powered by E with the full (q -+ 1)
/// part removed until a non-central element of K1 appears; K1 is its
/// derived normal closure, and L1 is generated by q(q^2-1)-th powers.
pub fn split_two_components<O: Oracle>(
    bb: &BlackBox<O>,
    c: &Subgroup<O>,
    q: &BigUint,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<(Subgroup<O>, Subgroup<O>)> {
    let one = BigUint::one();
    let e = bb.exponent().value().clone();
    let sl2_kill = q * (q * q - &one);
    // SL2-likeness bound including a possible p-core part
    let (pv, _) = bb.exponent().p_split(bb.char_p());
    let loose = BigUint::from(bb.char_p()).pow(pv) * (q * q - &one);

    // degenerate case: C itself is already of SL2 type
    let mut csampler = mk_sampler(bb, c.clone(), cfg, rng.gen());
    let mut c_is_sl2 = true;
    for _ in 0..cfg.split_check_samples {
        if !bb.order_divides(&csampler.draw(), &loose) {
            c_is_sl2 = false;
            break;
        }
    }
    if c_is_sl2 {
        tr.log("split", "centralizer-already-sl2", json!({}));
        return Ok((c.clone(), Subgroup::trivial()));
    }

    let schemes = split_schemes(cfg.family_hint);
    let mut exps = Vec::new();
    for scheme in schemes {
        let base = match scheme {
            TorusScheme::PlusOne => q + &one,
            TorusScheme::MinusOne => q - &one,
        };
        let mut rest = e.clone();
        while (&rest % &base).is_zero() {
            rest /= &base;
        }
        exps.push(rest);
    }
    for round in 0..cfg.split_draws {
        let g = csampler.draw();
        let exp = &exps[round % exps.len()];
        let h = bb.pow(&g, exp);
        if bb.is_identity(&h) || bb.commutes_with_all(&h, c) {
            continue;
        }
        let nc = normal_closure(bb, &Subgroup::from_gens(vec![h]), c, &cfg.sub, rng);
        let k1 = derived_subgroup(bb, &nc, &cfg.sub, rng);
        if k1.gens().is_empty() {
            continue;
        }
        // SL2-likeness filter on the candidate
        let mut ksampler = Sampler::new(bb, k1.clone(), cfg.burn_in, rng.gen());
        let mut ok = true;
        for _ in 0..cfg.split_check_samples {
            if !bb.order_divides(&ksampler.draw(), &loose) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        // L1 from q(q^2-1)-th powers of the centralizer generators
        let mut l1 = Subgroup::trivial();
        for s in c.gens() {
            l1.push_dedup(bb, bb.pow(s, &sl2_kill));
        }
        for _ in 0..cfg.centralizer_count {
            let g = csampler.draw();
            l1.push_dedup(bb, bb.pow(&g, &sl2_kill));
        }
        tr.log(
            "split",
            "accept",
            json!({"k1_gens": k1.gens().len(), "l1_gens": l1.gens().len(), "draws": round + 1}),
        );
        return Ok((k1, l1));
    }
    Err(Error::Stalled("no torus power landed in K1".into()))
}

/// p-core verdict kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcoreKind {
    NontrivialPcore,
    PossiblyTrivial,
}

pub struct PcoreVerdict<O: Oracle> {
    pub kind: PcoreKind,
    pub witness: Option<Element<O>>,
}

/// Unisingular classification for the shipped classical families over the
/// prime field; used only as a transcript annotation of the expected
/// effectiveness of plain random search.
pub fn is_unisingular(family: Family, n: usize, p: u64, k: usize) -> bool {
    if k != 1 {
        return false;
    }
    match family {
        Family::Sl | Family::AffineSl | Family::BlockSl => (p - 1) % (n as u64) == 0,
        Family::Su => (p + 1) % (n as u64) == 0,
        Family::Sp | Family::OmegaOdd => true,
        Family::OmegaPlus | Family::OmegaMinus => {
            let m = n / 2;
            let exp = (m as u64) * ((p - 1) / 2);
            let eps_required_plus = exp % 2 == 0;
            match family {
                Family::OmegaPlus => eps_required_plus,
                _ => !eps_required_plus,
            }
        }
    }
}

struct WitnessChecker<'bb, O: Oracle> {
    bb: &'bb BlackBox<O>,
    x_orig: Subgroup<O>,
    p: u64,
    p_part: BigUint,
    m_pfree: BigUint,
    sub: SubgrpCfg,
    rng: ChaCha12Rng,
}

impl<'bb, O: Oracle> WitnessChecker<'bb, O> {
    fn new(bb: &'bb BlackBox<O>, p: u64, cfg: &AlgoCfg, seed: u64) -> Self {
        let (v, m_pfree) = bb.exponent().p_split(p);
        WitnessChecker {
            bb,
            x_orig: bb.generating_subgroup(),
            p,
            p_part: BigUint::from(p).pow(v),
            m_pfree,
            sub: cfg.sub,
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// p-part of x: x powered by the p-free part of E.
    fn p_element_of(&self, x: &Element<O>) -> Option<Element<O>> {
        let w = self.bb.pow(x, &self.m_pfree);
        if self.bb.is_identity(&w) {
            None
        } else {
            Some(w)
        }
    }

    /// Cheap rejection: <w, w^h> must be a p-group for random h.
    fn quick_filter(&mut self, w: &Element<O>, sampler: &mut Sampler<'_, O>) -> bool {
        let h = sampler.draw();
        let p_sub = Subgroup::from_gens(vec![w.clone(), self.bb.conj(w, &h)]);
        is_p_group(self.bb, &p_sub, self.p, 10, &self.sub, &mut self.rng)
    }

    /// Full verification against the original group: w != 1, w is a
    /// p-element, and the normal closure of <w> in X is a p-group.
    fn confirm(&mut self, w: &Element<O>) -> bool {
        if self.bb.is_identity(w) || !self.bb.order_divides(w, &self.p_part) {
            return false;
        }
        let mut wide = self.sub;
        wide.closure_rounds = wide.closure_rounds.max(16);
        let nc = normal_closure(
            self.bb,
            &Subgroup::from_gens(vec![w.clone()]),
            &self.x_orig,
            &wide,
            &mut self.rng,
        );
        is_p_group(self.bb, &nc, self.p, 48, &wide, &mut self.rng)
    }

    /// Random search inside a layer: power draws up to p-elements, filter,
    /// confirm.
    fn search(&mut self, layer: &Subgroup<O>, samples: usize, seed: u64) -> Option<Element<O>> {
        if layer.gens().is_empty() {
            return None;
        }
        let mut sampler = Sampler::new(self.bb, layer.clone(), self.sub.burn_in, seed);
        for _ in 0..samples {
            let x = sampler.draw();
            if let Some(w) = self.p_element_of(&x) {
                if self.quick_filter(&w, &mut sampler) && self.confirm(&w) {
                    return Some(w);
                }
            }
        }
        None
    }
}


/// Recognition of the p-core: either a verified nontrivial element of
/// O_p(X) (this positive answer is always correct) or "possibly trivial".
pub fn pcore<O: Oracle>(
    bb: &BlackBox<O>,
    p: u64,
    k_deg: usize,
    cfg: &AlgoCfg,
    rng: &mut ChaCha12Rng,
    tr: &mut Transcript,
) -> Result<PcoreVerdict<O>> {
    let q = bb
        .q_hint()
        .cloned()
        .ok_or_else(|| Error::BadSpec("field size q is required input metadata".into()))?;
    if let Some(h) = cfg.family_hint {
        tr.log(
            "pcore",
            "unisingular-annotation",
            json!({
                "family": h.family.name(),
                "unisingular": is_unisingular(h.family, h.n, p, k_deg),
            }),
        );
    }
    let mut checker = WitnessChecker::new(bb, p, cfg, rng.gen());
    let mut layer = bb.generating_subgroup();
    for layer_idx in 0..cfg.pcore_layers {
        // Step 1: plain random search
        if let Some(w) = checker.search(&layer, cfg.pcore_step1_samples, rng.gen()) {
            tr.log("pcore", "witness-random-search", json!({"layer": layer_idx}));
            return Ok(PcoreVerdict {
                kind: PcoreKind::NontrivialPcore,
                witness: Some(w),
            });
        }
        // Step 2: long root construction with the inversion probe
        let probe_seed: u64 = rng.gen();
        let mut probe_rng = ChaCha12Rng::seed_from_u64(probe_seed);
        let mut probe_checker = WitnessChecker::new(bb, p, cfg, probe_seed ^ 0x9e37);
        let mut probe = |bbi: &BlackBox<O>,
                         cur: &Subgroup<O>,
                         i: &Element<O>|
         -> Option<Element<O>> {
            let mut sampler = Sampler::new(bbi, cur.clone(), 32, probe_rng.gen());
            for _ in 0..6 {
                let x = sampler.draw();
                let c = bbi.commutator(i, &x);
                if let Some(w) = probe_checker.p_element_of(&c) {
                    if probe_checker.quick_filter(&w, &mut sampler) && probe_checker.confirm(&w) {
                        return Some(w);
                    }
                }
            }
            None
        };
        let verdict_k = match main_long_root(bb, &layer, p, k_deg, cfg, rng, tr, &mut probe) {
            Ok(MainOutcome::Witness(w)) => {
                tr.log("pcore", "witness-inversion-probe", json!({"layer": layer_idx}));
                return Ok(PcoreVerdict {
                    kind: PcoreKind::NontrivialPcore,
                    witness: Some(w),
                });
            }
            Ok(MainOutcome::Verdict(v)) => Some(v.k),
            Err(Error::Stalled(msg)) => {
                tr.log("pcore", "construction-stalled", json!({"layer": layer_idx, "why": msg}));
                None
            }
            Err(e) => return Err(e),
        };
        let Some(k) = verdict_k else {
            break;
        };
        // O_p(K) test
        if let Some(w) = checker.search(&k, cfg.pcore_step1_samples, rng.gen()) {
            tr.log("pcore", "witness-in-k", json!({"layer": layer_idx}));
            return Ok(PcoreVerdict {
                kind: PcoreKind::NontrivialPcore,
                witness: Some(w),
            });
        }
        // Step 3: centralizer layers of the classical involution
        let Some(z) = central_involution(bb, &k, cfg.central_inv_draws, cfg.burn_in, rng) else {
            tr.log("pcore", "no-central-involution", json!({"layer": layer_idx}));
            break;
        };
        let mut sampler = mk_sampler(bb, layer.clone(), cfg, rng.gen());
        let c = centralizer_gens(&mut sampler, &z, cfg.centralizer_count)?;
        let c1 = derived_subgroup(bb, &c, &cfg.sub, rng);
        let c2 = derived_subgroup(bb, &c1, &cfg.sub, rng);
        for (name, sub) in [("C", &c), ("C'", &c1), ("C''", &c2)] {
            if let Some(w) = checker.search(sub, cfg.pcore_step1_samples, rng.gen()) {
                tr.log("pcore", "witness-in-centralizer-layer", json!({"which": name}));
                return Ok(PcoreVerdict {
                    kind: PcoreKind::NontrivialPcore,
                    witness: Some(w),
                });
            }
        }
        // Step 4: split C'' = K1 L1 and test K1
        let (k1, l1) = match split_two_components(bb, &c2, &q, cfg, rng, tr) {
            Ok(pair) => pair,
            Err(Error::Stalled(msg)) => {
                tr.log("pcore", "split-stalled", json!({"why": msg}));
                break;
            }
            Err(e) => return Err(e),
        };
        if let Some(w) = checker.search(&k1, cfg.pcore_step1_samples, rng.gen()) {
            tr.log("pcore", "witness-in-k1", json!({"layer": layer_idx}));
            return Ok(PcoreVerdict {
                kind: PcoreKind::NontrivialPcore,
                witness: Some(w),
            });
        }
        // Step 5: recurse into L1
        if l1.gens().is_empty() || is_probably_trivial(bb, &l1, &cfg.sub, rng) {
            tr.log("pcore", "l1-exhausted", json!({"layer": layer_idx}));
            break;
        }
        layer = l1;
    }
    Ok(PcoreVerdict {
        kind: PcoreKind::PossiblyTrivial,
        witness: None,
    })
}
