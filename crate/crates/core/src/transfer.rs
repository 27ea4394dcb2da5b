// SPDX-License-Identifier: MIT OR Apache-2.0

//! Maps between group operations on ℕ and marked groups.
//!
//! * [`phi`] sends a group operation `G` to the kernel of `x_i ↦ i`.
//! * [`f_map`] goes the other way on marked groups whose cosets each contain
//!   infinitely many generators: pick the least-indexed generator of every
//!   coset, list those generators by index as `x_{i_0}, x_{i_1}, ...`, and
//!   multiply positions through the quotient.
//! * [`sigma_kernel`] marks `G` with every element repeated infinitely often
//!   so that `f(ker σ_G) = G`.
//!
//! Everything that scans generators takes a probe budget, since membership in
//! the domain of `f` cannot be decided from a membership oracle.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Mutex;

use thiserror::Error;

use crate::marked::{kernel_of_marking, Assignment, CosetKey, MarkedGroup, TailRule};
use crate::oracles::{eval_gcondition, GCondition, GroupOracle, Operation, OracleError};
use crate::words::{enumerate, EvalError, Word};

/// Default coset probes per `f` multiplication.
pub const DEFAULT_COSET_BUDGET: u64 = 100_000;

/// Default probes for a `D_m` check.
pub const DEFAULT_DM_BUDGET: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("anchor violation: {0}")]
    AnchorViolation(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("witness check failed: {0}")]
    WitnessMismatch(String),
}

impl From<EvalError> for TransferError {
    fn from(e: EvalError) -> TransferError {
        match e {
            EvalError::Oracle(o) => TransferError::Oracle(o),
            EvalError::MissingAssignment(i) => TransferError::AnchorViolation(format!("x{i} is not assigned")),
        }
    }
}

/// A countdown of probes.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    left: u64,
}

impl Budget {
    pub fn new(probes: u64) -> Budget {
        Budget { left: probes }
    }

    pub fn spend(&mut self, what: &str) -> Result<(), TransferError> {
        if self.left == 0 {
            return Err(TransferError::BudgetExhausted(what.to_string()));
        }
        self.left -= 1;
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.left
    }
}

/// `Φ(G)`: the kernel of the marking `x_i ↦ i`.
pub fn phi(group: &GroupOracle) -> MarkedGroup {
    kernel_of_marking(group, &Assignment::identity())
}

/// `ker σ_G` with `σ(x_k)` the first coordinate of the antidiagonal
/// unpairing of `k`.
pub fn sigma_kernel(group: &GroupOracle) -> MarkedGroup {
    kernel_of_marking(group, &Assignment::sigma())
}

/// No two of `x_0, ..., x_{window-1}` share a coset.
pub fn unique_generator_check(n: &MarkedGroup, window: u64) -> bool {
    let mut seen = HashSet::new();
    (0..window).all(|i| seen.insert(n.generator_key(i).expect("generator key")))
}

/// A word witnessing `Φ(G) ≠ Φ(H)`: `x_i x_j x_k⁻¹` with `k = G(i, j) ≠ H(i, j)`,
/// searched over `[0, window)²`.
pub fn phi_separating_word(g: &GroupOracle, h: &GroupOracle, window: u64) -> Option<Word> {
    for i in 0..window {
        for j in 0..window {
            let k = g.mul(i, j);
            if k != h.mul(i, j) {
                return Some(Word::reduce([(i, 1), (j, 1), (k, -1)]));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------

/// The enumerated transversal of a marked group, extended on demand.
pub struct Transversal {
    source: MarkedGroup,
    indices: Vec<u64>,
    position: HashMap<CosetKey, usize>,
    scanned: u64,
}

impl Transversal {
    pub fn new(source: &MarkedGroup) -> Transversal {
        Transversal {
            source: source.clone(),
            indices: Vec::new(),
            position: HashMap::new(),
            scanned: 0,
        }
    }

    /// `i_0 < i_1 < ...` found so far.
    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    /// Generators `x_0 .. x_{scanned-1}` have been classified.
    pub fn scanned(&self) -> u64 {
        self.scanned
    }

    fn step(&mut self, budget: &mut Budget) -> Result<(), TransferError> {
        budget.spend("extending the transversal")?;
        let i = self.scanned;
        let key = self.source.generator_key(i)?;
        if !self.position.contains_key(&key) {
            self.position.insert(key, self.indices.len());
            self.indices.push(i);
        }
        self.scanned += 1;
        Ok(())
    }

    /// `i_k`.
    pub fn index(&mut self, k: usize, budget: &mut Budget) -> Result<u64, TransferError> {
        while self.indices.len() <= k {
            self.step(budget)?;
        }
        Ok(self.indices[k])
    }

    /// Position of the coset with this key.
    pub fn position_of_key(&mut self, key: &CosetKey, budget: &mut Budget) -> Result<usize, TransferError> {
        loop {
            if let Some(&p) = self.position.get(key) {
                return Ok(p);
            }
            self.step(budget)?;
        }
    }

    /// Transversal position of the coset of `x_i` (that is, `α(x_i)`).
    pub fn position_of_generator(&mut self, i: u64, budget: &mut Budget) -> Result<usize, TransferError> {
        while self.scanned <= i {
            self.step(budget)?;
        }
        let key = self.source.generator_key(i)?;
        Ok(self.position[&key])
    }

    /// Position of the coset of `w`.
    pub fn position_of_word(&mut self, w: &Word, budget: &mut Budget) -> Result<usize, TransferError> {
        let key = self.source.coset_key(w)?;
        self.position_of_key(&key, budget)
    }
}

/// `i_k` for a fresh transversal.
pub fn transversal_index(n: &MarkedGroup, k: usize, budget: u64) -> Result<u64, TransferError> {
    Transversal::new(n).index(k, &mut Budget::new(budget))
}

/// `f(N)`: multiplication of transversal positions. Each call may scan at
/// most `budget` new generators; the transversal prefix is cached.
pub struct TransversalGroup {
    source: MarkedGroup,
    budget: u64,
    cache: Mutex<Transversal>,
}

impl TransversalGroup {
    pub fn source(&self) -> &MarkedGroup {
        &self.source
    }

    /// `i_k`.
    pub fn index(&self, k: usize) -> Result<u64, TransferError> {
        let mut t = self.cache.lock().expect("transversal cache");
        t.index(k, &mut Budget::new(self.budget))
    }

    /// The least position `c` with `x_{i_a} x_{i_b} x_{i_c}⁻¹ ∈ N`.
    pub fn try_mul(&self, a: u64, b: u64) -> Result<u64, TransferError> {
        let mut budget = Budget::new(self.budget);
        let mut t = self.cache.lock().expect("transversal cache");
        let ia = t.index(a as usize, &mut budget)?;
        let ib = t.index(b as usize, &mut budget)?;
        let product = Word::generator(ia).mul(&Word::generator(ib));
        Ok(t.position_of_word(&product, &mut budget)? as u64)
    }

    pub fn table(&self, window: u64) -> Result<Vec<Vec<u64>>, TransferError> {
        (0..window)
            .map(|a| (0..window).map(|b| self.try_mul(a, b)).collect())
            .collect()
    }

    /// A plain oracle; its multiplication panics where `try_mul` would fail.
    pub fn into_oracle(self) -> GroupOracle {
        let name = format!("f({})", self.source);
        GroupOracle::new(name, self)
    }
}

impl Operation for TransversalGroup {
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.try_mul(a, b)
            .unwrap_or_else(|e| panic!("f-multiplication {a}·{b}: {e}"))
    }

    fn identity_hint(&self) -> Option<u64> {
        let mut t = self.cache.lock().ok()?;
        let key = self.source.identity_key().ok()?;
        t.position_of_key(&key, &mut Budget::new(self.budget))
            .ok()
            .map(|p| p as u64)
    }
}

pub fn f_map(n: &MarkedGroup, budget: u64) -> TransversalGroup {
    TransversalGroup {
        source: n.clone(),
        budget,
        cache: Mutex::new(Transversal::new(n)),
    }
}

/// Words on which agreement with `N` pins down `f(N)(a, b)`:
/// `x_{i_a} x_{i_b} x_{i_c}⁻¹` and every `x_i x_j⁻¹` with `i < j ≤ max(i_a, i_b, i_c)`.
pub fn continuity_modulus(n: &MarkedGroup, a: u64, b: u64, budget: u64) -> Result<BTreeSet<Word>, TransferError> {
    let mut probes = Budget::new(budget);
    let mut t = Transversal::new(n);
    let ia = t.index(a as usize, &mut probes)?;
    let ib = t.index(b as usize, &mut probes)?;
    let product = Word::generator(ia).mul(&Word::generator(ib));
    let c = t.position_of_word(&product, &mut probes)?;
    let ic = t.indices()[c];
    let top = ia.max(ib).max(ic);
    let mut out = BTreeSet::new();
    out.insert(product.mul(&Word::power(ic, -1)));
    for j in 0..=top {
        for i in 0..j {
            out.insert(Word::reduce([(i, 1), (j, -1)]));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DmOutcome {
    True,
    False,
    Unknown,
}

impl fmt::Display for DmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DmOutcome::True => "true",
            DmOutcome::False => "false",
            DmOutcome::Unknown => "unknown",
        })
    }
}

/// Bounded check of `|F∞/N| ≥ m` and `|w_i N ∩ X∞| ≥ m` for all `i < m`.
///
/// `False` needs a disproof from the provenance: a fiber of the marking that
/// is finite and smaller than `m`, or a finite image subgroup of order `< m`.
pub fn dm_check(n: &MarkedGroup, m: u64, budget: u64) -> DmOutcome {
    assert!(m >= 1, "dm_check needs m >= 1");
    match dm_check_inner(n, m, &mut Budget::new(budget)) {
        Ok(outcome) => outcome,
        Err(_) => {
            if finite_image_smaller_than(n, m, budget) {
                DmOutcome::False
            } else {
                DmOutcome::Unknown
            }
        }
    }
}

fn dm_check_inner(n: &MarkedGroup, m: u64, budget: &mut Budget) -> Result<DmOutcome, TransferError> {
    let targets: Vec<CosetKey> = (0..m).map(|i| n.coset_key(&enumerate(i))).collect::<Result<_, _>>()?;

    if let Some((_, assignment)) = n.marking() {
        for key in &targets {
            if let CosetKey::Element(g) = key {
                if assignment.fiber_size(*g).is_some_and(|s| s < m) {
                    return Ok(DmOutcome::False);
                }
            }
        }
    }

    // |F∞/N| ≥ m
    let mut distinct = HashSet::new();
    let mut k = 0;
    while (distinct.len() as u64) < m {
        budget.spend("counting cosets")?;
        distinct.insert(n.coset_key(&enumerate(k))?);
        k += 1;
    }

    // m generators in each w_i N
    for key in &targets {
        let found = match (key, n.marking()) {
            (CosetKey::Element(g), Some((_, assignment))) => {
                let mut count = 0;
                for _ in assignment.preimages(*g).take(m as usize) {
                    budget.spend("collecting generators of a coset")?;
                    count += 1;
                }
                count
            }
            _ => {
                let mut count = 0;
                let mut j = 0;
                while count < m {
                    budget.spend("collecting generators of a coset")?;
                    if n.generator_key(j)? == *key {
                        count += 1;
                    }
                    j += 1;
                }
                count
            }
        };
        if found < m {
            return Ok(DmOutcome::False);
        }
    }
    Ok(DmOutcome::True)
}

/// Whether the image of the marking is a finite subgroup of order `< m`.
fn finite_image_smaller_than(n: &MarkedGroup, m: u64, budget: u64) -> bool {
    let Some((oracle, assignment)) = n.marking() else {
        return false;
    };
    let Some(gens) = assignment.finite_image() else {
        return false;
    };
    let Ok(e) = oracle.identity() else {
        return false;
    };
    let mut elements: BTreeSet<u64> = BTreeSet::from([e]);
    let mut frontier = vec![e];
    let mut steps = 0u64;
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            steps += 1;
            if steps > budget || elements.len() as u64 >= m {
                return false;
            }
            let y = oracle.mul(x, g);
            if elements.insert(y) {
                frontier.push(y);
            }
        }
    }
    (elements.len() as u64) < m
}

// ---------------------------------------------------------------------------

/// The data fixing a basic open set around `base`: a generator bound `k` and
/// words over `x_0 .. x_{k-1}` required inside / outside.
#[derive(Clone, Debug)]
pub struct Anchor {
    pub base: MarkedGroup,
    pub k: u64,
    pub inside: Vec<Word>,
    pub outside: Vec<Word>,
}

impl Anchor {
    pub fn new(base: &MarkedGroup, k: u64) -> Anchor {
        Anchor {
            base: base.clone(),
            k,
            inside: Vec::new(),
            outside: Vec::new(),
        }
    }

    pub fn with_words(mut self, inside: Vec<Word>, outside: Vec<Word>) -> Anchor {
        self.inside = inside;
        self.outside = outside;
        self
    }
}

/// Window on which [`openness_witness`] confirms `f(M) = H`.
const OPENNESS_CHECK_WINDOW: u64 = 4;

/// A marked group `M` with `f(M) = H` that agrees with the anchor on its
/// words: `x_i ↦ α(x_i)` (the transversal position of `x_i` in the anchor)
/// for `i < k`, then `x_{k + ⟨p, j⟩} ↦ p`.
pub fn openness_witness(h: &GroupOracle, anchor: &Anchor, budget: u64) -> Result<MarkedGroup, TransferError> {
    for w in anchor.inside.iter().chain(&anchor.outside) {
        if !w.is_over(anchor.k) {
            return Err(TransferError::AnchorViolation(format!(
                "{w} uses a generator beyond x{}",
                anchor.k
            )));
        }
    }
    let mut probes = Budget::new(budget);
    let mut t = Transversal::new(&anchor.base);
    let alpha: Vec<u64> = (0..anchor.k)
        .map(|i| t.position_of_generator(i, &mut probes).map(|p| p as u64))
        .collect::<Result<_, _>>()?;
    let e = t.position_of_key(&anchor.base.identity_key()?, &mut probes)? as u64;

    if h.mul(e, e) != e {
        return Err(TransferError::AnchorViolation(format!(
            "{e} is not idempotent in {}",
            h.name()
        )));
    }
    let table: Vec<(u64, u64)> = alpha.iter().enumerate().map(|(i, &v)| (i as u64, v)).collect();
    let eqs: Vec<GCondition> = anchor
        .inside
        .iter()
        .map(|u| GCondition::new(u.clone(), &table, e))
        .collect();
    let neqs: Vec<GCondition> = anchor
        .outside
        .iter()
        .map(|v| GCondition::new(v.clone(), &table, e))
        .collect();
    if !eval_gcondition(h, &eqs, &neqs)? {
        return Err(TransferError::AnchorViolation(format!(
            "{} does not satisfy the translated conditions",
            h.name()
        )));
    }

    let assignment =
        Assignment::new(alpha, TailRule::PairRow { offset: anchor.k }).expect("offset equals table length");
    let witness = kernel_of_marking(h, &assignment);
    let f = f_map(&witness, budget);
    for a in 0..OPENNESS_CHECK_WINDOW {
        for b in 0..OPENNESS_CHECK_WINDOW {
            if f.try_mul(a, b)? != h.mul(a, b) {
                return Err(TransferError::WitnessMismatch(format!("f(M)({a},{b}) differs from H")));
            }
        }
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::named;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn phi_examples() {
        let z = named("Z").unwrap();
        let p = phi(&z);
        assert!(p.contains(&w("x1*x2")));
        assert!(p.contains(&w("x0")));
        assert!(p.contains(&Word::commutator(&w("x3"), &w("x7"))));
    }

    #[test]
    fn sigma_transversal() {
        let s = sigma_kernel(&named("Z").unwrap());
        let got: Vec<u64> = (0..4).map(|k| transversal_index(&s, k, 1000).unwrap()).collect();
        assert_eq!(got, vec![0, 2, 5, 9]);
        assert!(s.contains(&w("x0")));
        assert!(matches!(
            transversal_index(&s, 30, 10),
            Err(TransferError::BudgetExhausted(_))
        ));
    }

    #[test]
    fn f_on_sigma_z() {
        let f = f_map(&sigma_kernel(&named("Z").unwrap()), DEFAULT_COSET_BUDGET);
        assert_eq!(f.try_mul(1, 2).unwrap(), 0);
        for a in 0..10 {
            assert_eq!(f.try_mul(0, a).unwrap(), a);
        }
    }

    #[test]
    fn phi_transversal_is_identity() {
        let p = phi(&named("Q").unwrap());
        for k in 0..20 {
            assert_eq!(transversal_index(&p, k, 1000).unwrap(), k as u64);
        }
    }

    #[test]
    fn unique_generators() {
        let z = named("Z").unwrap();
        assert!(unique_generator_check(&phi(&z), 30));
        let collapsed = kernel_of_marking(&z, &"0;const(0)".parse().unwrap());
        assert!(!unique_generator_check(&collapsed, 2));
        assert!(unique_generator_check(&collapsed, 1));
    }

    #[test]
    fn dm_examples() {
        let z = named("Z").unwrap();
        assert_eq!(dm_check(&sigma_kernel(&z), 3, DEFAULT_DM_BUDGET), DmOutcome::True);
        assert_eq!(dm_check(&phi(&z), 2, DEFAULT_DM_BUDGET), DmOutcome::False);
        assert_eq!(dm_check(&phi(&z), 1, DEFAULT_DM_BUDGET), DmOutcome::True);
        // image {0}: trivial quotient of order 1 < 2
        let trivial = kernel_of_marking(&z, &"0;const(0)".parse().unwrap());
        assert_eq!(dm_check(&trivial, 1, 100), DmOutcome::True);
        assert_eq!(dm_check(&trivial, 2, 100), DmOutcome::False);
        // image generated by +1 is infinite but the budget runs out
        assert_eq!(dm_check(&sigma_kernel(&z), 3, 2), DmOutcome::Unknown);
    }

    #[test]
    fn dm_finite_image_disproof() {
        let g = named("Prod(Cyclic(2),Z)").unwrap();
        // no generator lands on the identity
        let n = kernel_of_marking(&g, &Assignment::constant(1));
        assert_eq!(dm_check(&n, 1, 1000), DmOutcome::False);
        // generators alternate between the two elements of Cyclic(2) x {0}
        let n = kernel_of_marking(&g, &"0,1;cycle".parse().unwrap());
        assert_eq!(dm_check(&n, 2, 1000), DmOutcome::True);
        assert_eq!(dm_check(&n, 3, 1000), DmOutcome::False);
    }

    #[test]
    fn modulus_for_sigma_z() {
        let n = sigma_kernel(&named("Z").unwrap());
        let modulus = continuity_modulus(&n, 1, 2, 1000).unwrap();
        assert!(modulus.contains(&w("x2*x5*x0^-1")));
        assert!(modulus.contains(&w("x0*x5^-1")));
        assert!(modulus.contains(&w("x4*x5^-1")));
        assert_eq!(modulus.len(), 1 + 15);
        let m00 = continuity_modulus(&n, 0, 0, 1000).unwrap();
        assert!(m00.contains(&w("x0")));
    }

    #[test]
    fn openness_examples() {
        let z = named("Z").unwrap();
        let n0 = sigma_kernel(&z);
        let m = openness_witness(&z, &Anchor::new(&n0, 3), 10_000).unwrap();
        let f = f_map(&m, 10_000);
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(f.try_mul(a, b).unwrap(), z.mul(a, b));
            }
        }
        let k0 = openness_witness(&z, &Anchor::new(&n0, 0), 10_000).unwrap();
        assert_eq!(f_map(&k0, 10_000).table(8).unwrap(), z.table(8));
    }

    #[test]
    fn openness_rejects_bad_targets() {
        let z = named("Z").unwrap();
        let n0 = sigma_kernel(&z);
        // x0 x1^-1 ∈ N0 since σ(x0) = σ(x1) = 0; x2 ∉ N0
        let anchor = Anchor::new(&n0, 3).with_words(vec![w("x0*x1^-1")], vec![w("x2")]);
        assert!(openness_witness(&named("Q").unwrap(), &anchor, 10_000).is_ok());
        let shifted = crate::oracles::named("Conj(Z,swap(0,1))").unwrap();
        assert!(matches!(
            openness_witness(&shifted, &anchor, 10_000),
            Err(TransferError::AnchorViolation(_))
        ));
        let far = Anchor::new(&n0, 2).with_words(vec![w("x2")], vec![]);
        assert!(matches!(
            openness_witness(&z, &far, 10_000),
            Err(TransferError::AnchorViolation(_))
        ));
    }

    #[test]
    fn separating_word() {
        let z = named("Z").unwrap();
        let q = named("Q").unwrap();
        let sep = phi_separating_word(&z, &q, 6).unwrap();
        assert!(phi(&z).contains(&sep));
        assert!(!phi(&q).contains(&sep));
        assert!(phi_separating_word(&z, &z, 6).is_none());
    }

    // Transversal from pairwise coset comparisons only.
    fn naive_transversal(n: &MarkedGroup, count: usize) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        let mut i = 0;
        while out.len() < count {
            if (0..i).all(|j| !n.same_coset(&Word::generator(i), &Word::generator(j))) {
                out.push(i);
            }
            i += 1;
        }
        out
    }

    #[test]
    fn transversal_matches_pairwise_scan() {
        for spec in ["Z", "Prod(Cyclic(2),Z)", "Free(2)"] {
            let n = sigma_kernel(&named(spec).unwrap());
            let mut t = Transversal::new(&n);
            let mut b = Budget::new(10_000);
            t.index(7, &mut b).unwrap();
            let prefix = t.indices()[..8].to_vec();
            assert_eq!(prefix, naive_transversal(&n, 8), "{spec}");
            // every earlier generator is covered, and dropping a slot uncovers it
            let top = prefix[7];
            for j in 0..=top {
                let covered = |slots: &[u64]| {
                    slots
                        .iter()
                        .any(|&s| n.same_coset(&Word::generator(j), &Word::generator(s)))
                };
                assert!(covered(&prefix));
                if let Some(pos) = prefix.iter().position(|&s| s == j) {
                    let mut dropped = prefix.clone();
                    dropped.remove(pos);
                    assert!(!covered(&dropped));
                }
            }
        }
    }

    #[test]
    fn roundtrip_on_sigma_kernels() {
        for spec in ["Z", "Z^2", "Free(2)", "Prufer(2)", "Q", "Prod(Cyclic(2),Z)"] {
            let g = named(spec).unwrap();
            let f = f_map(&sigma_kernel(&g), DEFAULT_COSET_BUDGET);
            assert_eq!(f.table(12).unwrap(), g.table(12), "{spec}");
        }
    }

    #[test]
    fn openness_agrees_on_short_words() {
        let z = named("Z").unwrap();
        let n0 = sigma_kernel(&z);
        let m = openness_witness(&z, &Anchor::new(&n0, 3), 10_000).unwrap();
        let over3 = crate::words::Enumeration::restricted(3);
        for k in 0..50 {
            let word = over3.word(k);
            assert_eq!(m.contains(&word), n0.contains(&word), "{word}");
        }
    }

    #[test]
    fn modulus_soundness_small() {
        let kernels: Vec<MarkedGroup> = ["Z", "Prod(Cyclic(2),Z)", "Q"]
            .iter()
            .map(|s| sigma_kernel(&named(s).unwrap()))
            .collect();
        for n in &kernels {
            let fn_ = f_map(n, DEFAULT_COSET_BUDGET);
            for n2 in &kernels {
                let f2 = f_map(n2, DEFAULT_COSET_BUDGET);
                for a in 0..4 {
                    for b in 0..4 {
                        let modulus = continuity_modulus(n, a, b, DEFAULT_COSET_BUDGET).unwrap();
                        if modulus.iter().all(|w| n.contains(w) == n2.contains(w)) {
                            assert_eq!(fn_.try_mul(a, b).unwrap(), f2.try_mul(a, b).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn f_oracle_is_usable_concurrently() {
        let g = named("Z^2").unwrap();
        let oracle = f_map(&sigma_kernel(&g), DEFAULT_COSET_BUDGET).into_oracle();
        let expected = g.table(6);
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| assert_eq!(oracle.table(6), expected));
            }
        });
        assert_eq!(oracle.identity().unwrap(), g.identity().unwrap());
    }
}
