// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twospaces::abelian::{hnf, snf, to_big, Lattice, Matrix};
use twospaces::duality::{annihilated_subgroup, dual_invariants, TorusSubgroup};
use twospaces::genericity::{
    nowhere_dense_phi_demo, play_strategy, random_condition, random_word, witness_from_spec, CertifiedCondition,
};
use twospaces::marked::{kernel_of_marking, Assignment, MarkedGroup};
use twospaces::oracles::{
    check_axioms_window, conjugate, eval_gcondition, named, product_code, FinitePermutation, GCondition, GroupOracle,
    CATALOG,
};
use twospaces::transfer::{
    dm_check, phi, phi_separating_word, sigma_kernel, unique_generator_check, Budget, DmOutcome, Transversal,
    DEFAULT_DM_BUDGET,
};
use twospaces::words::{enumerate, evaluate, index_of, Word};

fn raw_word(rank: u64, len: usize) -> impl Strategy<Value = Vec<(u64, i64)>> {
    prop::collection::vec((0..rank, -3i64..=3), 0..len)
}

fn word(rank: u64, len: usize) -> impl Strategy<Value = Word> {
    raw_word(rank, len).prop_map(Word::reduce)
}

fn group(name: &str) -> GroupOracle {
    named(name).unwrap()
}

fn marked(g: &str, a: &str) -> MarkedGroup {
    witness_from_spec(g, a).unwrap()
}

// ---------------------------------------------------------------------------
// words

proptest! {
    #[test]
    fn reduce_is_idempotent(raw in raw_word(5, 12)) {
        let once = Word::reduce(raw);
        let twice = Word::reduce(once.syllables().iter().map(|s| (s.index, s.exp)));
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn words_form_a_group(u in word(4, 8), v in word(4, 8), w in word(4, 8)) {
        let e = Word::identity();
        prop_assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
        prop_assert_eq!(u.mul(&e), u.clone());
        prop_assert_eq!(e.mul(&u), u.clone());
        prop_assert!(u.mul(&u.inv()).is_identity());
        prop_assert!(u.inv().mul(&u).is_identity());
    }

    #[test]
    fn enumeration_round_trips(k in 0u64..10_000) {
        prop_assert_eq!(index_of(&enumerate(k)), k);
    }

    #[test]
    fn index_round_trips(w in word(4, 6)) {
        prop_assert_eq!(enumerate(index_of(&w)), w);
    }

    #[test]
    fn enumeration_is_monotone(k in 0u64..10_000) {
        let (a, b) = (enumerate(k), enumerate(k + 1));
        let key = |w: &Word| (w.weight(), w.letter_len(), w.letter_codes());
        prop_assert!(key(&a) < key(&b));
    }

    #[test]
    fn evaluation_is_a_homomorphism(
        name in prop::sample::select(vec!["Z", "Z^2", "Free(2)", "Prufer(3)", "Q", "Prod(Cyclic(2),Z)"]),
        values in prop::collection::vec(0u64..6, 3),
        u in word(3, 4),
        v in word(3, 4),
    ) {
        let g = group(name);
        let a = |i: u64| values.get(i as usize).copied();
        let uv = evaluate(&u.mul(&v), a, &g).unwrap();
        prop_assert_eq!(uv, g.mul(evaluate(&u, a, &g).unwrap(), evaluate(&v, a, &g).unwrap()));
    }
}

/// All reduced words of the given weight, built letter by letter.
fn brute_weight_class(weight: u64) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for max in 0..weight {
        let len = weight - max;
        let alphabet = 2 * (max + 1);
        let mut stack: Vec<Vec<u64>> = vec![Vec::new()];
        while let Some(codes) = stack.pop() {
            if codes.len() as u64 == len {
                let w = Word::from_letter_codes(&codes);
                if w.max_index() == Some(max) {
                    out.insert(w);
                }
                continue;
            }
            for c in 0..alphabet {
                if codes.last().is_some_and(|&l| l ^ 1 == c) {
                    continue;
                }
                let mut next = codes.clone();
                next.push(c);
                stack.push(next);
            }
        }
    }
    out
}

#[test]
fn weight_classes_match_brute_force() {
    let mut k = 1;
    for weight in 1..=6 {
        let expected = brute_weight_class(weight);
        let mut emitted = BTreeSet::new();
        while enumerate(k).weight() == weight {
            assert!(emitted.insert(enumerate(k)));
            k += 1;
        }
        assert_eq!(emitted, expected, "weight {weight}");
    }
}

// ---------------------------------------------------------------------------
// oracles

#[test]
fn catalog_axioms_on_windows() {
    for name in CATALOG {
        let report = check_axioms_window(&group(name), 30);
        assert!(report.passed(), "{name}: {:?}", report.violation);
    }
}

proptest! {
    #[test]
    fn hinted_inverses_are_inverses(name in prop::sample::select(CATALOG.to_vec()), a in 0u64..100) {
        let g = group(name);
        prop_assert_eq!(g.mul(a, g.inverse(a).unwrap()), g.identity().unwrap());
    }

    #[test]
    fn conjugation_transports_conditions(
        name in prop::sample::select(vec!["Z", "Free(2)", "Q", "Prod(Cyclic(2),Z)"]),
        swaps in prop::collection::vec((0u64..8, 0u64..8), 1..3),
        values in prop::collection::vec(0u64..8, 2),
        w in word(2, 4),
        target in 0u64..8,
    ) {
        let swaps: Vec<(u64, u64)> = swaps.into_iter().filter(|(i, j)| i != j).collect();
        prop_assume!(!swaps.is_empty());
        let g = group(name);
        let perm = FinitePermutation::from_swaps(&swaps);
        let h = conjugate(&g, &perm);
        let assignment: Vec<(u64, u64)> = values.iter().enumerate().map(|(i, &v)| (i as u64, v)).collect();
        let moved: Vec<(u64, u64)> = assignment.iter().map(|&(i, v)| (i, perm.apply(v))).collect();
        let before = GCondition::new(w.clone(), &assignment, target);
        let after = GCondition::new(w, &moved, perm.apply(target));
        prop_assert_eq!(
            eval_gcondition(&g, std::slice::from_ref(&before), &[]).unwrap(),
            eval_gcondition(&h, std::slice::from_ref(&after), &[]).unwrap()
        );
        prop_assert_eq!(
            eval_gcondition(&g, &[], &[before]).unwrap(),
            eval_gcondition(&h, &[], &[after]).unwrap()
        );
    }

    #[test]
    fn product_projections_are_homomorphisms(a1 in 0u64..40, a2 in 0u64..40, b1 in 0u64..40, b2 in 0u64..40) {
        let (z, f) = (group("Z"), group("Free(2)"));
        let p = group("Prod(Z,Free(2))");
        let code = |i, j| product_code(None, None, i, j);
        prop_assert_eq!(p.mul(code(a1, b1), code(a2, b2)), code(z.mul(a1, a2), f.mul(b1, b2)));

        let q = group("Prod(Cyclic(2),Z)");
        let (s1, s2) = (a1 % 2, a2 % 2);
        let code = |i, j| product_code(Some(2), None, i, j);
        prop_assert_eq!(q.mul(code(s1, b1), code(s2, b2)), code((s1 + s2) % 2, z.mul(b1, b2)));
    }
}

// ---------------------------------------------------------------------------
// marked

fn small_image_markings() -> Vec<MarkedGroup> {
    vec![
        marked("Z", "0,1,2;cycle"),
        marked("Prod(Cyclic(2),Z)", "1,2,0;const(1)"),
        marked("Free(2)", "1,2;pair-row(2)"),
        sigma_kernel(&group("Q")),
    ]
}

#[test]
fn kernels_are_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in small_image_markings() {
        let mut found = 0;
        while found < 500 {
            let u = random_word(&mut rng, 4, 6);
            if !n.contains(&u) {
                continue;
            }
            found += 1;
            let i = rng.gen_range(0..10);
            let x = Word::generator(i);
            assert!(n.contains(&x.mul(&u).mul(&x.inv())), "{n}: x{i} {u} x{i}^-1");
        }
    }
}

proptest! {
    #[test]
    fn same_coset_is_an_equivalence(u in word(3, 4), v in word(3, 4), w in word(3, 4)) {
        for n in small_image_markings() {
            prop_assert!(n.same_coset(&u, &u));
            prop_assert_eq!(n.same_coset(&u, &v), n.same_coset(&v, &u));
            if n.same_coset(&u, &v) && n.same_coset(&v, &w) {
                prop_assert!(n.same_coset(&u, &w));
            }
        }
    }

    #[test]
    fn conjugating_the_target_keeps_the_kernel(
        name in prop::sample::select(vec!["Z", "Free(2)", "Prod(Cyclic(2),Z)"]),
        table in prop::collection::vec(0u64..6, 1..4),
        swaps in prop::collection::vec((0u64..10, 0u64..10), 1..3),
        words in prop::collection::vec(word(5, 6), 1..40),
    ) {
        let swaps: Vec<(u64, u64)> = swaps.into_iter().filter(|(i, j)| i != j).collect();
        prop_assume!(!swaps.is_empty());
        let g = group(name);
        let perm = FinitePermutation::from_swaps(&swaps);
        let a: Assignment = format!("{};pair-row({})", table.iter().map(u64::to_string).collect::<Vec<_>>().join(","), table.len())
            .parse()
            .unwrap();
        let plain = kernel_of_marking(&g, &a);
        let moved = kernel_of_marking(&conjugate(&g, &perm), &a.then(&perm));
        for w in &words {
            prop_assert_eq!(plain.contains(w), moved.contains(w));
        }
    }
}

// ---------------------------------------------------------------------------
// abelian

fn square(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, n), n)
}

fn det(m: &Matrix) -> BigInt {
    match m.len() {
        0 => BigInt::from(1),
        _ => (0..m.len())
            .map(|c| {
                let minor: Matrix = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != c)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                BigInt::from(s) * &m[0][c] * det(&minor)
            })
            .sum(),
    }
}

proptest! {
    #[test]
    fn hnf_ignores_unimodular_row_operations(
        n in 1usize..=4,
        rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 4), 1..=4),
        ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3, 0u8..3), 0..12),
    ) {
        let original: Vec<Vec<i64>> = rows.iter().map(|r| r[..n].to_vec()).collect();
        let mut a = original.clone();
        let r = a.len();
        for (i, j, c, kind) in ops {
            let (i, j) = (i % r, j % r);
            match kind {
                0 if i != j => {
                    let src = a[j].clone();
                    for (x, y) in a[i].iter_mut().zip(src) {
                        *x += c * y;
                    }
                }
                1 => a.swap(i, j),
                _ => a[i].iter_mut().for_each(|x| *x = -*x),
            }
        }
        prop_assert_eq!(hnf(&to_big(&original), n), hnf(&to_big(&a), n));
    }

    #[test]
    fn smith_diagonal_multiplies_to_the_determinant(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let m = to_big(&m);
        let d = det(&m).abs();
        prop_assume!(d != BigInt::from(0));
        prop_assert_eq!(snf(&m, n).iter().product::<BigInt>(), d);
    }

    #[test]
    fn smith_rank_detects_singularity(m in square(3)) {
        let m = to_big(&m);
        let d = det(&m).abs();
        let diag = snf(&m, 3);
        if d == BigInt::from(0) {
            prop_assert!(diag.len() < 3);
        } else {
            prop_assert_eq!(diag.len(), 3);
        }
    }
}

// ---------------------------------------------------------------------------
// transfer

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_words_separate_groups(
        g in prop::sample::select(CATALOG.to_vec()),
        h in prop::sample::select(CATALOG.to_vec()),
    ) {
        let (g, h) = (group(g), group(h));
        let differ = (0..6).any(|i| (0..6).any(|j| g.mul(i, j) != h.mul(i, j)));
        match phi_separating_word(&g, &h, 6) {
            Some(w) => prop_assert_ne!(phi(&g).contains(&w), phi(&h).contains(&w)),
            None => prop_assert!(!differ),
        }
    }

    #[test]
    fn phi_never_lands_in_d(name in prop::sample::select(CATALOG.to_vec()), budget in 1u64..5_000) {
        prop_assert_ne!(dm_check(&phi(&group(name)), 2, budget), DmOutcome::True);
    }

    #[test]
    fn transversals_are_minimal(
        name in prop::sample::select(vec!["Z", "Q", "Free(2)", "Prod(Cyclic(2),Z)"]),
        table in prop::collection::vec(0u64..5, 1..5),
    ) {
        let a: Assignment = format!("{};cycle", table.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            .parse()
            .unwrap();
        let n = kernel_of_marking(&group(name), &a);
        let mut t = Transversal::new(&n);
        let mut budget = Budget::new(1_000);
        let distinct = table.iter().collect::<BTreeSet<_>>().len();
        for k in 0..distinct {
            t.index(k, &mut budget).unwrap();
        }
        let idx = t.indices().to_vec();
        let top = *idx.last().unwrap();
        // every generator up to the last slot sits with an earlier-or-equal slot
        for j in 0..=top {
            let home: Vec<u64> = idx.iter().copied().filter(|&i| n.same_coset(&Word::generator(i), &Word::generator(j))).collect();
            prop_assert_eq!(home.len(), 1);
            prop_assert!(home[0] <= j);
        }
        // dropping a slot leaves its own generator without a home
        for (k, &i) in idx.iter().enumerate() {
            let others = idx.iter().enumerate().filter(|&(l, _)| l != k).map(|(_, &x)| x);
            let covered = others.filter(|&x| x <= i).any(|x| n.same_coset(&Word::generator(x), &Word::generator(i)));
            prop_assert!(!covered);
        }
    }
}

#[test]
fn phi_kernels_have_unique_generators() {
    for name in CATALOG {
        assert!(unique_generator_check(&phi(&group(name)), 30), "{name}");
    }
}

// ---------------------------------------------------------------------------
// duality

fn lattice() -> impl Strategy<Value = Lattice> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-6i64..=6, n), 0..=n + 1)
            .prop_map(move |rows| Lattice::from_i64(n, &rows))
    })
}

proptest! {
    #[test]
    fn full_torus_dual_has_full_rank(n in 1usize..=5) {
        let d = dual_invariants(&TorusSubgroup::full(n));
        prop_assert_eq!(d.rank, n);
        prop_assert!(d.torsion.is_empty());
    }

    #[test]
    fn dual_shrinks_with_the_subgroup((small, extra) in lattice().prop_flat_map(|l| {
        let n = l.ambient();
        (Just(l), prop::collection::vec(-6i64..=6, n))
    })) {
        // larger lattice, smaller subgroup, smaller dual
        let n = small.ambient();
        let mut rows = small.basis().clone();
        rows.extend(to_big(&[extra]));
        let big = Lattice::from_rows(n, &rows);
        let (k_big, k_small) = (annihilated_subgroup(&small), annihilated_subgroup(&big));
        let (d_big, d_small) = (dual_invariants(&k_big), dual_invariants(&k_small));
        prop_assert!(d_small.rank <= d_big.rank);
        if let (Some(a), Some(b)) = (d_small.order(), d_big.order()) {
            prop_assert!((&b % &a) == BigInt::from(0));
        }
    }
}

// ---------------------------------------------------------------------------
// genericity

fn seeded_condition(seed: u64) -> CertifiedCondition {
    random_condition(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn transcripts_are_nested_and_deterministic(seed in 0u64..1_000) {
        let start = seeded_condition(seed);
        let a = play_strategy(&start, 4, DEFAULT_DM_BUDGET, seed);
        let b = play_strategy(&start, 4, DEFAULT_DM_BUDGET, seed);
        prop_assert!(a.is_nested());
        prop_assert_eq!(a.to_string(), b.to_string());
    }
}

#[test]
fn strategy_survives_fifty_seeds() {
    for seed in 0..50 {
        let t = play_strategy(&seeded_condition(seed), 4, DEFAULT_DM_BUDGET, seed);
        assert!(t.error.is_none(), "seed {seed}: {t}");
        assert_eq!(t.entries.len(), 8, "seed {seed}");
    }
}

#[test]
fn phi_demo_excludes_phi_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..20 {
        let refined = nowhere_dense_phi_demo(&seeded_condition(seed), DEFAULT_DM_BUDGET).unwrap();
        let window = refined
            .inside()
            .iter()
            .chain(refined.outside())
            .filter_map(Word::max_index)
            .max()
            .unwrap_or(0)
            + 1;
        let mut samples = vec![refined.witness().clone()];
        for _ in 0..40 {
            let g = CATALOG[rng.gen_range(0..CATALOG.len())];
            let table: Vec<String> = (0..window).map(|_| rng.gen_range(0..4).to_string()).collect();
            samples.push(marked(g, &format!("{};cycle", table.join(","))));
        }
        samples.extend(CATALOG.iter().map(|g| phi(&group(g))));
        let mut satisfied = 0;
        for n in samples {
            if refined.holds_for(&n) {
                satisfied += 1;
                assert!(
                    !unique_generator_check(&n, window),
                    "seed {seed}: {n} satisfies {refined}"
                );
            }
        }
        assert!(satisfied >= 1);
    }
}

#[test]
fn exponent_sums_cover_random_words() {
    // abelianization agrees with a direct tally
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = Lattice::zero(3);
    let psi = twospaces::abelian::psi_preimage_marked(&l);
    for _ in 0..200 {
        let w = random_word(&mut rng, 3, 8);
        let mut sums: BTreeMap<u64, i64> = BTreeMap::new();
        for s in w.syllables() {
            *sums.entry(s.index).or_default() += s.exp;
        }
        assert_eq!(psi.contains(&w), sums.values().all(|&e| e == 0), "{w}");
    }
}
