// SPDX-License-Identifier: MIT OR Apache-2.0

//! Countable groups presented as group operations on ℕ.
//!
//! A [`GroupOracle`] wraps a total, pure multiplication `ℕ × ℕ → ℕ`. The
//! identity and inverses are read off the multiplication: the identity is the
//! unique idempotent, the inverse of `a` the unique `b` with `ab = e`. Named
//! groups carry closed-form hints for both; the scan-based routes remain
//! available for checking.
//!
//! Element codings of the catalog:
//!
//! * `Z`: zigzag, codes `0, 1, 2, 3, 4, ...` are `0, 1, -1, 2, -2, ...`.
//! * `Z^d`: the code is unpaired into `d` naturals by nesting the antidiagonal
//!   pairing (`c ↦ (i, rest)`, recursing on `rest`); each is a zigzag integer.
//! * `Free(n)`: the word enumeration restricted to `x0 .. x_{n-1}`.
//! * `Prufer(p)`: code 0 is 0; codes in `[p^(k-1), p^k)` are the fractions
//!   `a/p^k` with `p ∤ a`, in increasing order of `a`.
//! * `Q`: code 0 is 0; codes `2k-1` and `2k` are `±q_k`, where `q_1, q_2, ...`
//!   is the Calkin–Wilf sequence `1, 1/2, 2, 1/3, 3/2, 2/3, 3, ...`.
//! * `QmodZ_sum`: each coordinate of ℚ/ℤ is coded as `0 ↦ 0` followed by the
//!   reduced fractions in `(0, 1)` by denominator then numerator; a finitely
//!   supported sequence `(c_0, ..., c_k)` with `c_k ≠ 0` is the number whose
//!   binary expansion, read from the least significant bit, concatenates the
//!   Elias gamma cells of `c_0 + 1, ..., c_{k-1} + 1, c_k` (a cell for `n` is
//!   `z` zeros, a one, then the low `z` bits of `n`, where `z = ⌊log₂ n⌋`).
//! * `Prod(a, b)`: two infinite factors use the antidiagonal pairing
//!   `⟨i, j⟩ = (i+j)(i+j+1)/2 + i`; a finite factor of order `k` is the low
//!   mixed-radix digit (`i + k·j` or `j + k·i`).
//! * `Conj(g, swap(i, j), ...)`: the operation pushed forward along the
//!   permutation (swaps applied in the order listed).
//!
//! Codes are `u64`; arithmetic that would leave `u64` panics.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::pairing::{pair, unpair, unzigzag, zigzag};
use crate::words::{evaluate_map, Enumeration, EvalError, Word};

/// Default number of multiplications an identity or inverse scan may use.
pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("budget exhausted while {0}")]
    BudgetExhausted(String),
    #[error("group expression `{0}` denotes a finite group")]
    IllegalFinite(String),
    #[error("bad group expression: {0}")]
    Parse(String),
}

/// A multiplication on ℕ.
pub trait Operation: Send + Sync {
    fn mul(&self, a: u64, b: u64) -> u64;

    /// Closed-form identity, if known. Must agree with the idempotent.
    fn identity_hint(&self) -> Option<u64> {
        None
    }

    /// Closed-form inverse, if known. Must agree with the scanned inverse.
    fn inverse_hint(&self, _a: u64) -> Option<u64> {
        None
    }
}

struct Inner {
    op: Box<dyn Operation>,
    name: String,
    finite_factor_sizes: Vec<u64>,
    identity: OnceLock<u64>,
}

/// A countable group as an operation on ℕ. Cheap to clone; shareable across
/// threads.
#[derive(Clone)]
pub struct GroupOracle {
    inner: Arc<Inner>,
    scan_budget: u64,
}

impl fmt::Debug for GroupOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupOracle").field("name", &self.inner.name).finish()
    }
}

impl GroupOracle {
    pub fn new(name: impl Into<String>, op: impl Operation + 'static) -> GroupOracle {
        GroupOracle::with_sizes(name, Box::new(op), Vec::new())
    }

    fn with_sizes(name: impl Into<String>, op: Box<dyn Operation>, sizes: Vec<u64>) -> GroupOracle {
        GroupOracle {
            inner: Arc::new(Inner {
                op,
                name: name.into(),
                finite_factor_sizes: sizes,
                identity: OnceLock::new(),
            }),
            scan_budget: DEFAULT_SCAN_BUDGET,
        }
    }

    /// An oracle from a bare closure (no hints). Useful for non-groups.
    pub fn from_fn<F>(name: impl Into<String>, f: F) -> GroupOracle
    where
        F: Fn(u64, u64) -> u64 + Send + Sync + 'static,
    {
        struct FnOp<F>(F);
        impl<F: Fn(u64, u64) -> u64 + Send + Sync> Operation for FnOp<F> {
            fn mul(&self, a: u64, b: u64) -> u64 {
                (self.0)(a, b)
            }
        }
        GroupOracle::new(name, FnOp(f))
    }

    pub fn with_scan_budget(mut self, budget: u64) -> GroupOracle {
        self.scan_budget = budget.max(1);
        self
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn finite_factor_sizes(&self) -> &[u64] {
        &self.inner.finite_factor_sizes
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.inner.op.mul(a, b)
    }

    pub fn identity(&self) -> Result<u64, OracleError> {
        if let Some(e) = self.inner.identity.get() {
            return Ok(*e);
        }
        let e = match self.inner.op.identity_hint() {
            Some(e) => e,
            None => self.identity_by_scan()?,
        };
        Ok(*self.inner.identity.get_or_init(|| e))
    }

    /// Least `n` with `n·n = n`, ignoring hints.
    pub fn identity_by_scan(&self) -> Result<u64, OracleError> {
        (0..self.scan_budget)
            .find(|&n| self.mul(n, n) == n)
            .ok_or_else(|| OracleError::BudgetExhausted(format!("locating the identity of {}", self.name())))
    }

    pub fn inverse(&self, a: u64) -> Result<u64, OracleError> {
        match self.inner.op.inverse_hint(a) {
            Some(b) => Ok(b),
            None => self.inverse_by_scan(a),
        }
    }

    /// Least `b` with `a·b = e`, ignoring hints.
    pub fn inverse_by_scan(&self, a: u64) -> Result<u64, OracleError> {
        let e = self.identity_by_scan()?;
        (0..self.scan_budget)
            .find(|&b| self.mul(a, b) == e)
            .ok_or_else(|| OracleError::BudgetExhausted(format!("inverting {a} in {}", self.name())))
    }

    pub fn pow(&self, a: u64, exp: i64) -> Result<u64, OracleError> {
        let base = if exp < 0 { self.inverse(a)? } else { a };
        let mut n = exp.unsigned_abs();
        let mut acc = self.identity()?;
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            n >>= 1;
            if n > 0 {
                sq = self.mul(sq, sq);
            }
        }
        Ok(acc)
    }

    /// Order of `a`, if it is at most `limit`.
    pub fn element_order(&self, a: u64, limit: u64) -> Result<Option<u64>, OracleError> {
        let e = self.identity()?;
        let mut acc = a;
        for k in 1..=limit {
            if acc == e {
                return Ok(Some(k));
            }
            acc = self.mul(acc, a);
        }
        Ok(None)
    }

    /// The B×B Cayley window, row-major.
    pub fn table(&self, window: u64) -> Vec<Vec<u64>> {
        (0..window)
            .map(|a| (0..window).map(|b| self.mul(a, b)).collect())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Permutations and conjugation

/// A finitely supported bijection of ℕ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FinitePermutation {
    forward: BTreeMap<u64, u64>,
    backward: BTreeMap<u64, u64>,
    swaps: Vec<(u64, u64)>,
}

impl FinitePermutation {
    pub fn identity() -> FinitePermutation {
        FinitePermutation::default()
    }

    /// Composite of transpositions, the first listed applied first.
    pub fn from_swaps(swaps: &[(u64, u64)]) -> FinitePermutation {
        let mut p = FinitePermutation::identity();
        for &(i, j) in swaps {
            p = FinitePermutation::transposition(i, j).after(&p);
        }
        p.swaps = swaps.to_vec();
        p
    }

    fn transposition(i: u64, j: u64) -> FinitePermutation {
        let mut forward = BTreeMap::new();
        if i != j {
            forward.insert(i, j);
            forward.insert(j, i);
        }
        FinitePermutation {
            backward: forward.clone(),
            forward,
            swaps: vec![(i, j)],
        }
    }

    /// `self ∘ first`.
    fn after(&self, first: &FinitePermutation) -> FinitePermutation {
        let mut forward = BTreeMap::new();
        let support: Vec<u64> = first.forward.keys().chain(self.forward.keys()).copied().collect();
        for x in support {
            let y = self.apply(first.apply(x));
            if y != x {
                forward.insert(x, y);
            }
        }
        let backward = forward.iter().map(|(&x, &y)| (y, x)).collect();
        let mut swaps = first.swaps.clone();
        swaps.extend_from_slice(&self.swaps);
        FinitePermutation {
            forward,
            backward,
            swaps,
        }
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.forward.get(&x).copied().unwrap_or(x)
    }

    pub fn apply_inverse(&self, x: u64) -> u64 {
        self.backward.get(&x).copied().unwrap_or(x)
    }

    pub fn inverse(&self) -> FinitePermutation {
        let mut swaps = self.swaps.clone();
        swaps.reverse();
        FinitePermutation {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            swaps,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn swaps(&self) -> &[(u64, u64)] {
        &self.swaps
    }
}

impl fmt::Display for FinitePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.swaps.iter().map(|(i, j)| format!("swap({i},{j})")).collect();
        f.write_str(&parts.join(","))
    }
}

struct Conjugated {
    base: GroupOracle,
    perm: FinitePermutation,
}

impl Operation for Conjugated {
    fn mul(&self, a: u64, b: u64) -> u64 {
        let p = &self.perm;
        p.apply(self.base.mul(p.apply_inverse(a), p.apply_inverse(b)))
    }

    fn identity_hint(&self) -> Option<u64> {
        self.base.identity().ok().map(|e| self.perm.apply(e))
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        let p = &self.perm;
        self.base.inverse(p.apply_inverse(a)).ok().map(|b| p.apply(b))
    }
}

/// `h_φ(G)(i, j) = φ(G(φ⁻¹(i), φ⁻¹(j)))`.
pub fn conjugate(group: &GroupOracle, perm: &FinitePermutation) -> GroupOracle {
    let name = if perm.is_identity() && perm.swaps().is_empty() {
        group.name().to_string()
    } else {
        format!("Conj({},{})", group.name(), perm)
    };
    GroupOracle::with_sizes(
        name,
        Box::new(Conjugated {
            base: group.clone(),
            perm: perm.clone(),
        }),
        group.finite_factor_sizes().to_vec(),
    )
    .with_scan_budget(group.scan_budget)
}

// ---------------------------------------------------------------------------
// Catalog

struct IntLattice {
    dim: u32,
}

impl IntLattice {
    fn decode(&self, mut code: u64) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.dim as usize);
        for _ in 1..self.dim {
            let (i, rest) = unpair(code);
            out.push(unzigzag(i));
            code = rest;
        }
        out.push(unzigzag(code));
        out
    }

    fn encode(&self, v: &[i64]) -> u64 {
        let mut code = zigzag(*v.last().expect("nonempty vector"));
        for &x in v[..v.len() - 1].iter().rev() {
            code = pair(zigzag(x), code);
        }
        code
    }
}

impl Operation for IntLattice {
    fn mul(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.decode(a), self.decode(b));
        let sum: Vec<i64> = x
            .iter()
            .zip(&y)
            .map(|(p, q)| p.checked_add(*q).expect("integer overflow"))
            .collect();
        self.encode(&sum)
    }

    fn identity_hint(&self) -> Option<u64> {
        Some(0)
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        let neg: Vec<i64> = self.decode(a).into_iter().map(|x| -x).collect();
        Some(self.encode(&neg))
    }
}

struct FreeGroup {
    enumeration: Enumeration,
}

impl Operation for FreeGroup {
    fn mul(&self, a: u64, b: u64) -> u64 {
        let w = self.enumeration.word(a).mul(&self.enumeration.word(b));
        self.enumeration.index(&w)
    }

    fn identity_hint(&self) -> Option<u64> {
        Some(0)
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        Some(self.enumeration.index(&self.enumeration.word(a).inv()))
    }
}

struct Prufer {
    p: u64,
}

impl Prufer {
    /// `(numerator, denominator)` with the fraction reduced.
    fn decode(&self, code: u64) -> (u64, u64) {
        if code == 0 {
            return (0, 1);
        }
        let mut lo = 1u64;
        loop {
            let hi = lo.checked_mul(self.p).expect("Prufer code overflow");
            if code < hi {
                let offset = code - lo;
                let num = offset + offset / (self.p - 1) + 1;
                return (num, hi);
            }
            lo = hi;
        }
    }

    fn encode(&self, num: u64, den: u64) -> u64 {
        if num == 0 {
            return 0;
        }
        den / self.p + (num - 1 - num / self.p)
    }

    fn reduce(&self, mut num: u64, mut den: u64) -> (u64, u64) {
        num %= den;
        if num == 0 {
            return (0, 1);
        }
        while num.is_multiple_of(self.p) {
            num /= self.p;
            den /= self.p;
        }
        (num, den)
    }
}

impl Operation for Prufer {
    fn mul(&self, a: u64, b: u64) -> u64 {
        let (na, da) = self.decode(a);
        let (nb, db) = self.decode(b);
        let den = da.max(db);
        let num = na * (den / da) + nb * (den / db);
        let (n, d) = self.reduce(num, den);
        self.encode(n, d)
    }

    fn identity_hint(&self) -> Option<u64> {
        Some(0)
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        let (n, d) = self.decode(a);
        let (n, d) = self.reduce(d - n, d);
        Some(self.encode(n, d))
    }
}

/// `k`-th term (k ≥ 1) of the Calkin–Wilf sequence.
fn calkin_wilf(k: u64) -> (u128, u128) {
    let (mut a, mut b) = (1u128, 1u128);
    let bits = 63 - k.leading_zeros();
    for s in (0..bits).rev() {
        if (k >> s) & 1 == 0 {
            b += a;
        } else {
            a += b;
        }
    }
    (a, b)
}

/// Position of a positive reduced fraction in the Calkin–Wilf sequence.
fn calkin_wilf_index(mut a: BigInt, mut b: BigInt) -> Option<u64> {
    // runs of (bit, count), from the node up towards the root
    let mut runs: Vec<(bool, u64)> = Vec::new();
    let one = BigInt::one();
    while !(a.is_one() && b.is_one()) {
        if a > b {
            let steps = if b == one { &a - &one } else { &a / &b };
            a -= &b * &steps;
            runs.push((true, steps.to_u64()?));
        } else {
            let steps = if a == one { &b - &one } else { &b / &a };
            b -= &a * &steps;
            runs.push((false, steps.to_u64()?));
        }
    }
    let mut idx: u64 = 1;
    for &(bit, count) in runs.iter().rev() {
        if count >= 64 || idx.leading_zeros() as u64 <= count {
            return None;
        }
        idx <<= count;
        if bit {
            idx |= (1u64 << count) - 1;
        }
    }
    Some(idx)
}

struct Rationals;

impl Rationals {
    fn decode(code: u64) -> BigRational {
        if code == 0 {
            return BigRational::zero();
        }
        let k = code.div_ceil(2);
        let (a, b) = calkin_wilf(k);
        let q = BigRational::new(BigInt::from(a), BigInt::from(b));
        if code % 2 == 1 {
            q
        } else {
            -q
        }
    }

    fn encode(q: &BigRational) -> u64 {
        if q.is_zero() {
            return 0;
        }
        let k = calkin_wilf_index(q.numer().abs(), q.denom().clone()).expect("rational code overflow");
        if q.is_positive() {
            k.checked_mul(2).expect("rational code overflow") - 1
        } else {
            k.checked_mul(2).expect("rational code overflow")
        }
    }
}

impl Operation for Rationals {
    fn mul(&self, a: u64, b: u64) -> u64 {
        Rationals::encode(&(Rationals::decode(a) + Rationals::decode(b)))
    }

    fn identity_hint(&self) -> Option<u64> {
        Some(0)
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        Some(Rationals::encode(&-Rationals::decode(a)))
    }
}

fn totient(n: u64) -> u64 {
    (1..=n).filter(|&k| k.gcd(&n) == 1).count() as u64
}

/// Coding of ℚ/ℤ: 0 ↦ 0, then reduced fractions in (0,1) by denominator and
/// numerator.
fn fraction_decode(code: u64) -> (u64, u64) {
    if code == 0 {
        return (0, 1);
    }
    let mut rest = code - 1;
    let mut den = 2;
    loop {
        let phi = totient(den);
        if rest < phi {
            let num = (1..den)
                .filter(|k| k.gcd(&den) == 1)
                .nth(rest as usize)
                .expect("numerator in range");
            return (num, den);
        }
        rest -= phi;
        den += 1;
    }
}

fn fraction_encode(num: u64, den: u64) -> u64 {
    if num == 0 {
        return 0;
    }
    let before: u64 = (2..den).map(totient).sum();
    let rank = (1..num).filter(|k| k.gcd(&den) == 1).count() as u64;
    1 + before + rank
}

fn fraction_add(a: u64, b: u64) -> u64 {
    let (na, da) = fraction_decode(a);
    let (nb, db) = fraction_decode(b);
    let den = da.lcm(&db);
    let num = (na * (den / da) + nb * (den / db)) % den;
    let g = num.gcd(&den);
    if num == 0 {
        return 0;
    }
    fraction_encode(num / g, den / g)
}

/// Cell decoding of a finitely supported sequence.
fn runs_decode(mut code: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while code != 0 {
        let z = code.trailing_zeros();
        let low = code.checked_shr(z + 1).unwrap_or(0) & ((1u64 << z) - 1);
        let n = (1u64 << z) | low;
        code = code.checked_shr(2 * z + 1).unwrap_or(0);
        // the last cell stores its value directly
        out.push(if code == 0 { n } else { n - 1 });
    }
    out
}

fn runs_encode(values: &[u64]) -> u64 {
    let len = values.iter().rposition(|&v| v != 0).map_or(0, |p| p + 1);
    let mut code: u128 = 0;
    let mut pos: u32 = 0;
    for (k, &v) in values[..len].iter().enumerate() {
        let n = if k + 1 == len {
            v
        } else {
            v.checked_add(1).expect("QmodZ_sum code overflow")
        };
        let z = 63 - n.leading_zeros();
        let low = u128::from(n) & ((1u128 << z) - 1);
        assert!(pos + z < 64, "QmodZ_sum code overflow");
        code |= (1u128 << (pos + z)) | (low << (pos + z + 1));
        pos += 2 * z + 1;
    }
    u64::try_from(code).expect("QmodZ_sum code overflow")
}

struct QmodZSum;

impl Operation for QmodZSum {
    fn mul(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (runs_decode(a), runs_decode(b));
        let len = x.len().max(y.len());
        let sum: Vec<u64> = (0..len)
            .map(|i| fraction_add(x.get(i).copied().unwrap_or(0), y.get(i).copied().unwrap_or(0)))
            .collect();
        runs_encode(&sum)
    }

    fn identity_hint(&self) -> Option<u64> {
        Some(0)
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        let neg: Vec<u64> = runs_decode(a)
            .into_iter()
            .map(|c| {
                let (n, d) = fraction_decode(c);
                if n == 0 {
                    0
                } else {
                    fraction_encode(d - n, d)
                }
            })
            .collect();
        Some(runs_encode(&neg))
    }
}

struct Cyclic {
    k: u64,
}

impl Operation for Cyclic {
    fn mul(&self, a: u64, b: u64) -> u64 {
        (a % self.k + b % self.k) % self.k
    }

    fn identity_hint(&self) -> Option<u64> {
        Some(0)
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        Some((self.k - a % self.k) % self.k)
    }
}

/// How a product code splits into factor codes.
#[derive(Clone, Copy)]
enum Layout {
    Paired,
    /// first factor finite of this order (low digit)
    FiniteFirst(u64),
    /// second factor finite of this order (low digit)
    FiniteSecond(u64),
}

struct Product {
    left: Arc<dyn Operation>,
    right: Arc<dyn Operation>,
    layout: Layout,
}

impl Product {
    fn split(&self, code: u64) -> (u64, u64) {
        match self.layout {
            Layout::Paired => unpair(code),
            Layout::FiniteFirst(k) => (code % k, code / k),
            Layout::FiniteSecond(k) => (code / k, code % k),
        }
    }

    fn join(&self, i: u64, j: u64) -> u64 {
        match self.layout {
            Layout::Paired => Some(pair(i, j)),
            Layout::FiniteFirst(k) => j.checked_mul(k).and_then(|v| v.checked_add(i)),
            Layout::FiniteSecond(k) => i.checked_mul(k).and_then(|v| v.checked_add(j)),
        }
        .expect("product code overflow")
    }
}

impl Operation for Product {
    fn mul(&self, a: u64, b: u64) -> u64 {
        let (a1, a2) = self.split(a);
        let (b1, b2) = self.split(b);
        self.join(self.left.mul(a1, b1), self.right.mul(a2, b2))
    }

    fn identity_hint(&self) -> Option<u64> {
        Some(self.join(self.left.identity_hint()?, self.right.identity_hint()?))
    }

    fn inverse_hint(&self, a: u64) -> Option<u64> {
        let (a1, a2) = self.split(a);
        Some(self.join(self.left.inverse_hint(a1)?, self.right.inverse_hint(a2)?))
    }
}

struct SharedOp(Arc<dyn Operation>);

impl Operation for SharedOp {
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.0.mul(a, b)
    }
    fn identity_hint(&self) -> Option<u64> {
        self.0.identity_hint()
    }
    fn inverse_hint(&self, a: u64) -> Option<u64> {
        self.0.inverse_hint(a)
    }
}

struct OracleOp(GroupOracle);

impl Operation for OracleOp {
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.0.mul(a, b)
    }
    fn identity_hint(&self) -> Option<u64> {
        self.0.identity().ok()
    }
    fn inverse_hint(&self, a: u64) -> Option<u64> {
        self.0.inverse(a).ok()
    }
}

/// Direct product of two infinite oracles, coded by the antidiagonal pairing.
pub fn product(left: &GroupOracle, right: &GroupOracle) -> GroupOracle {
    let mut sizes = left.finite_factor_sizes().to_vec();
    sizes.extend_from_slice(right.finite_factor_sizes());
    GroupOracle::with_sizes(
        format!("Prod({},{})", left.name(), right.name()),
        Box::new(Product {
            left: Arc::new(OracleOp(left.clone())),
            right: Arc::new(OracleOp(right.clone())),
            layout: Layout::Paired,
        }),
        sizes,
    )
}

/// Code of the pair `(i, j)` in `Prod(a, b)` with the given factor orders
/// (`None` = infinite).
pub fn product_code(left_order: Option<u64>, right_order: Option<u64>, i: u64, j: u64) -> u64 {
    match (left_order, right_order) {
        (Some(k), _) => i + k * j,
        (None, Some(k)) => j + k * i,
        (None, None) => pair(i, j),
    }
}

/// Group expression syntax tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupExpr {
    Z,
    ZPow(u32),
    Free(u64),
    Prufer(u64),
    Q,
    QmodZSum,
    Cyclic(u64),
    Prod(Box<GroupExpr>, Box<GroupExpr>),
    Conj(Box<GroupExpr>, Vec<(u64, u64)>),
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupExpr::Z => f.write_str("Z"),
            GroupExpr::ZPow(d) => write!(f, "Z^{d}"),
            GroupExpr::Free(n) => write!(f, "Free({n})"),
            GroupExpr::Prufer(p) => write!(f, "Prufer({p})"),
            GroupExpr::Q => f.write_str("Q"),
            GroupExpr::QmodZSum => f.write_str("QmodZ_sum"),
            GroupExpr::Cyclic(k) => write!(f, "Cyclic({k})"),
            GroupExpr::Prod(a, b) => write!(f, "Prod({a},{b})"),
            GroupExpr::Conj(g, swaps) => {
                write!(f, "Conj({g}")?;
                for (i, j) in swaps {
                    write!(f, ",swap({i},{j})")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, OracleError> {
        Err(OracleError::Parse(format!("{msg} at offset {}", self.pos)))
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.s[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), OracleError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(&format!("expected `{token}`"))
        }
    }

    fn number(&mut self) -> Result<u64, OracleError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("number out of range"))
    }

    fn arg(&mut self) -> Result<u64, OracleError> {
        self.expect("(")?;
        let n = self.number()?;
        self.expect(")")?;
        Ok(n)
    }

    fn expr(&mut self) -> Result<GroupExpr, OracleError> {
        if self.eat("QmodZ_sum") {
            Ok(GroupExpr::QmodZSum)
        } else if self.eat("Q") {
            Ok(GroupExpr::Q)
        } else if self.eat("Free") {
            Ok(GroupExpr::Free(self.arg()?))
        } else if self.eat("Prufer") {
            Ok(GroupExpr::Prufer(self.arg()?))
        } else if self.eat("Cyclic") {
            Ok(GroupExpr::Cyclic(self.arg()?))
        } else if self.eat("Prod") {
            self.expect("(")?;
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(")")?;
            Ok(GroupExpr::Prod(Box::new(a), Box::new(b)))
        } else if self.eat("Conj") {
            self.expect("(")?;
            let g = self.expr()?;
            let mut swaps = Vec::new();
            while self.eat(",") {
                self.expect("swap(")?;
                let i = self.number()?;
                self.expect(",")?;
                let j = self.number()?;
                self.expect(")")?;
                swaps.push((i, j));
            }
            self.expect(")")?;
            Ok(GroupExpr::Conj(Box::new(g), swaps))
        } else if self.eat("Z") {
            if self.eat("^") {
                let d = self.number()?;
                u32::try_from(d)
                    .map(GroupExpr::ZPow)
                    .or_else(|_| self.err("dimension too large"))
            } else {
                Ok(GroupExpr::Z)
            }
        } else {
            self.err("unknown group")
        }
    }
}

impl std::str::FromStr for GroupExpr {
    type Err = OracleError;

    fn from_str(text: &str) -> Result<GroupExpr, OracleError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = ExprParser {
            s: compact.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.s.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }
}

struct Factor {
    op: Arc<dyn Operation>,
    order: Option<u64>,
    sizes: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn build(expr: &GroupExpr) -> Result<Factor, OracleError> {
    let infinite = |op: Arc<dyn Operation>| Factor {
        op,
        order: None,
        sizes: Vec::new(),
    };
    Ok(match expr {
        GroupExpr::Z => infinite(Arc::new(IntLattice { dim: 1 })),
        GroupExpr::ZPow(0) => Factor {
            op: Arc::new(Cyclic { k: 1 }),
            order: Some(1),
            sizes: Vec::new(),
        },
        GroupExpr::ZPow(d) => infinite(Arc::new(IntLattice { dim: *d })),
        GroupExpr::Free(0) => Factor {
            op: Arc::new(Cyclic { k: 1 }),
            order: Some(1),
            sizes: Vec::new(),
        },
        GroupExpr::Free(n) => infinite(Arc::new(FreeGroup {
            enumeration: Enumeration::restricted(*n),
        })),
        GroupExpr::Prufer(p) => {
            if !is_prime(*p) {
                return Err(OracleError::Parse(format!("Prufer({p}): {p} is not prime")));
            }
            infinite(Arc::new(Prufer { p: *p }))
        }
        GroupExpr::Q => infinite(Arc::new(Rationals)),
        GroupExpr::QmodZSum => infinite(Arc::new(QmodZSum)),
        GroupExpr::Cyclic(k) => {
            if *k == 0 {
                return Err(OracleError::Parse("Cyclic(0) is not a finite cyclic group".into()));
            }
            Factor {
                op: Arc::new(Cyclic { k: *k }),
                order: Some(*k),
                sizes: vec![*k],
            }
        }
        GroupExpr::Prod(a, b) => {
            let (fa, fb) = (build(a)?, build(b)?);
            let (layout, order) = match (fa.order, fb.order) {
                (None, None) => (Layout::Paired, None),
                (Some(k), None) => (Layout::FiniteFirst(k), None),
                (None, Some(k)) => (Layout::FiniteSecond(k), None),
                (Some(k1), Some(k2)) => (Layout::FiniteFirst(k1), Some(k1 * k2)),
            };
            let mut sizes = fa.sizes;
            sizes.extend(fb.sizes);
            Factor {
                op: Arc::new(Product {
                    left: fa.op,
                    right: fb.op,
                    layout,
                }),
                order,
                sizes,
            }
        }
        GroupExpr::Conj(g, swaps) => {
            let inner = build(g)?;
            let perm = FinitePermutation::from_swaps(swaps);
            if let Some(k) = inner.order {
                if perm.forward.keys().any(|&x| x >= k) {
                    return Err(OracleError::Parse("permutation leaves the finite group".into()));
                }
            }
            let base = GroupOracle::with_sizes("", Box::new(SharedOp(inner.op)), Vec::new());
            Factor {
                op: Arc::new(Conjugated { base, perm }),
                order: inner.order,
                sizes: inner.sizes,
            }
        }
    })
}

/// Oracle for a catalog expression such as `Prod(Cyclic(2),Z)`.
pub fn named(text: &str) -> Result<GroupOracle, OracleError> {
    let expr: GroupExpr = text.parse()?;
    let factor = build(&expr)?;
    if factor.order.is_some() {
        return Err(OracleError::IllegalFinite(expr.to_string()));
    }
    Ok(GroupOracle::with_sizes(
        expr.to_string(),
        Box::new(SharedOp(factor.op)),
        factor.sizes,
    ))
}

/// The catalog used by tests and examples.
pub const CATALOG: &[&str] = &[
    "Z",
    "Z^2",
    "Z^3",
    "Free(2)",
    "Free(3)",
    "Prufer(2)",
    "Prufer(3)",
    "Q",
    "QmodZ_sum",
    "Prod(Cyclic(2),Z)",
    "Prod(Z,Cyclic(3))",
    "Prod(Z,Free(2))",
    "Conj(Z,swap(0,5))",
];

// ---------------------------------------------------------------------------
// Window checks

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    Associativity { a: u64, b: u64, c: u64 },
    IdentityNotFound,
    IdentityLaw { a: u64 },
    InverseNotFound { a: u64 },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Associativity { a, b, c } => {
                write!(f, "associativity fails at ({a},{b},{c})")
            }
            AxiomViolation::IdentityNotFound => f.write_str("no identity found within budget"),
            AxiomViolation::IdentityLaw { a } => write!(f, "identity law fails at {a}"),
            AxiomViolation::InverseNotFound { a } => write!(f, "no inverse of {a} found within budget"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub window: u64,
    pub identity: Option<u64>,
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Group axioms on the window `[0, B)`, with scan-based identity and inverses.
pub fn check_axioms_window(group: &GroupOracle, window: u64) -> AxiomReport {
    let report = |identity, violation| AxiomReport {
        window,
        identity,
        violation,
    };
    for a in 0..window {
        for b in 0..window {
            let ab = group.mul(a, b);
            for c in 0..window {
                if group.mul(ab, c) != group.mul(a, group.mul(b, c)) {
                    return report(None, Some(AxiomViolation::Associativity { a, b, c }));
                }
            }
        }
    }
    let e = match group.identity_by_scan() {
        Ok(e) => e,
        Err(_) => return report(None, Some(AxiomViolation::IdentityNotFound)),
    };
    for a in 0..window {
        if group.mul(e, a) != a || group.mul(a, e) != a {
            return report(Some(e), Some(AxiomViolation::IdentityLaw { a }));
        }
        match group.inverse_by_scan(a) {
            Ok(b) if group.mul(b, a) == e => {}
            _ => return report(Some(e), Some(AxiomViolation::InverseNotFound { a })),
        }
    }
    report(Some(e), None)
}

/// One clause `w(a⃗) = target` (or `≠`) of a basic open set of group
/// operations.
#[derive(Clone, Debug)]
pub struct GCondition {
    pub word: Word,
    pub assignment: std::collections::HashMap<u64, u64>,
    pub target: u64,
}

impl GCondition {
    pub fn new(word: Word, assignment: &[(u64, u64)], target: u64) -> GCondition {
        GCondition {
            word,
            assignment: assignment.iter().copied().collect(),
            target,
        }
    }
}

/// Whether every equality holds and every inequality fails.
pub fn eval_gcondition(
    group: &GroupOracle,
    equalities: &[GCondition],
    inequalities: &[GCondition],
) -> Result<bool, EvalError> {
    for c in equalities {
        if evaluate_map(&c.word, &c.assignment, group)? != c.target {
            return Ok(false);
        }
    }
    for c in inequalities {
        if evaluate_map(&c.word, &c.assignment, group)? == c.target {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{evaluate, index_of};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn integer_oracle_examples() {
        let z = named("Z").unwrap();
        assert_eq!(z.mul(1, 2), 0);
        assert_eq!(z.identity().unwrap(), 0);
        assert_eq!(z.inverse(1).unwrap(), 2);
        assert_eq!(z.inverse_by_scan(1).unwrap(), 2);
    }

    #[test]
    fn evaluate_examples() {
        let z = named("Z").unwrap();
        let map = |pairs: &'static [(u64, u64)]| move |i: u64| pairs.iter().find(|p| p.0 == i).map(|p| p.1);
        assert_eq!(evaluate(&Word::identity(), map(&[]), &z).unwrap(), 0);
        assert_eq!(evaluate(&w("x0*x1"), map(&[(0, 1), (1, 2)]), &z).unwrap(), 0);
        assert_eq!(evaluate(&w("x0^2"), map(&[(0, 1)]), &z).unwrap(), 3);
        assert_eq!(
            evaluate(&w("x0*x3"), map(&[(0, 1)]), &z),
            Err(EvalError::MissingAssignment(3))
        );
    }

    #[test]
    fn conjugation_moves_identity() {
        let z = named("Z").unwrap();
        let c = conjugate(&z, &FinitePermutation::from_swaps(&[(0, 5)]));
        assert_eq!(c.identity().unwrap(), 5);
        assert_eq!(c.identity_by_scan().unwrap(), 5);
        assert_eq!(c.mul(5, 5), 5);
        let back = conjugate(&c, &FinitePermutation::from_swaps(&[(0, 5)]));
        assert_eq!(back.table(20), z.table(20));
        let same = conjugate(&z, &FinitePermutation::identity());
        assert_eq!(same.table(20), z.table(20));
        assert_eq!(named("Conj(Z, swap(0,5))").unwrap().table(12), c.table(12));
    }

    #[test]
    fn product_with_finite_factor() {
        let g = named("Prod(Cyclic(2),Z)").unwrap();
        let code = product_code(Some(2), None, 1, 0);
        assert_eq!(code, 1);
        assert_eq!(g.element_order(code, 10).unwrap(), Some(2));
        assert_eq!(g.finite_factor_sizes(), &[2]);
        assert_eq!(product_code(Some(2), None, 0, 1), 2);
        assert_eq!(g.element_order(2, 50).unwrap(), None);
    }

    #[test]
    fn free_inverse_pair() {
        let f2 = named("Free(2)").unwrap();
        let a = Enumeration::restricted(2).index(&w("x0"));
        let b = Enumeration::restricted(2).index(&w("x0^-1"));
        assert_eq!(f2.mul(a, b), 0);
        assert_eq!(a, index_of(&w("x0")));
    }

    #[test]
    fn finite_groups_are_rejected() {
        assert!(matches!(named("Cyclic(3)"), Err(OracleError::IllegalFinite(_))));
        assert!(matches!(
            named("Prod(Cyclic(2),Cyclic(3))"),
            Err(OracleError::IllegalFinite(_))
        ));
        assert!(matches!(named("Z^0"), Err(OracleError::IllegalFinite(_))));
        assert!(named("Prod(Prod(Cyclic(2),Cyclic(3)),Z)").is_ok());
        assert!(matches!(named("Prufer(4)"), Err(OracleError::Parse(_))));
        assert!(matches!(named("Zed"), Err(OracleError::Parse(_))));
    }

    #[test]
    fn expressions_print_canonically() {
        for text in CATALOG {
            let e: GroupExpr = text.parse().unwrap();
            assert_eq!(e.to_string(), *text);
        }
    }

    #[test]
    fn prufer_codes() {
        let p = Prufer { p: 2 };
        assert_eq!(p.decode(1), (1, 2));
        assert_eq!(p.decode(2), (1, 4));
        assert_eq!(p.decode(3), (3, 4));
        assert_eq!(p.decode(4), (1, 8));
        for c in 0..200 {
            let (n, d) = p.decode(c);
            assert_eq!(p.encode(n, d), c);
        }
        let q3 = Prufer { p: 3 };
        for c in 0..200 {
            let (n, d) = q3.decode(c);
            assert_eq!(q3.encode(n, d), c);
        }
    }

    #[test]
    fn calkin_wilf_round_trip() {
        let first: Vec<(u128, u128)> = (1..8).map(calkin_wilf).collect();
        assert_eq!(first, vec![(1, 1), (1, 2), (2, 1), (1, 3), (3, 2), (2, 3), (3, 1)]);
        for k in 1..3000u64 {
            let (a, b) = calkin_wilf(k);
            assert_eq!(calkin_wilf_index(BigInt::from(a), BigInt::from(b)), Some(k));
        }
    }

    #[test]
    fn fraction_and_run_codes() {
        assert_eq!(fraction_decode(1), (1, 2));
        assert_eq!(fraction_decode(3), (2, 3));
        assert_eq!(fraction_decode(11), (5, 6));
        for c in 0..100 {
            let (n, d) = fraction_decode(c);
            assert_eq!(fraction_encode(n, d), c);
        }
        for c in (0..5000).chain(u64::MAX - 5000..=u64::MAX) {
            assert_eq!(runs_encode(&runs_decode(c)), c);
        }
        assert_eq!(runs_decode(0b1101), vec![0, 3]);
        assert_eq!(runs_encode(&[2, 0, 1]), 0b11110);
    }

    #[test]
    fn int_lattice_round_trip() {
        let z3 = IntLattice { dim: 3 };
        for c in 0..2000 {
            assert_eq!(z3.encode(&z3.decode(c)), c);
        }
    }

    #[test]
    fn not_a_group_reports_inverse_failure() {
        let plus = GroupOracle::from_fn("N+", |a, b| a + b).with_scan_budget(10_000);
        let r = check_axioms_window(&plus, 5);
        assert_eq!(r.violation, Some(AxiomViolation::InverseNotFound { a: 1 }));
    }

    #[test]
    fn gcondition_examples() {
        let z = named("Z").unwrap();
        let eq = GCondition::new(w("x0*x1"), &[(0, 1), (1, 2)], 0);
        assert!(eval_gcondition(&z, &[eq], &[]).unwrap());
        let ne = GCondition::new(w("x0"), &[(0, 0)], 0);
        assert!(!eval_gcondition(&z, &[], &[ne]).unwrap());
        let missing = GCondition::new(w("x4"), &[], 0);
        assert!(matches!(
            eval_gcondition(&z, &[missing], &[]),
            Err(EvalError::MissingAssignment(4))
        ));
    }
}
