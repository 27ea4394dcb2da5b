// SPDX-License-Identifier: MIT OR Apache-2.0

//! Finitely generated subgroups of `⊕ℤ` and integer normal forms.
//!
//! A [`Lattice`] is a subgroup of `ℤⁿ` stored by its Hermite normal form and
//! read inside `⊕_ℕ ℤ` by zero-extension: a vector with a nonzero coordinate
//! at or beyond `n` is never a member. All arithmetic is arbitrary precision.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::marked::MarkedGroup;
use crate::words::Word;

pub type Matrix = Vec<Vec<BigInt>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("generator x{index} lies outside ambient rank {ambient}")]
    IndexOutOfAmbient { index: u64, ambient: usize },
    #[error("window too large: ambient {ambient} and box radius {radius} must both be at most 4")]
    GuardExceeded { ambient: usize, radius: u64 },
    #[error("bad matrix: {0}")]
    Parse(String),
}

pub fn to_big(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn identity_matrix(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn row_axpy(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b) {
        *x += q * y;
    }
}

fn col_axpy(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let v = &row[src] * q;
        row[dst] += v;
    }
}

fn negate_row(m: &mut Matrix, i: usize) {
    for x in m[i].iter_mut() {
        *x = -&*x;
    }
}

/// Row-style Hermite normal form with transform: returns `(H, U, rank)` where
/// `U·A = H`, `U` is unimodular, the first `rank` rows of `H` are in HNF and
/// the rest are zero.
pub fn hnf_with_transform(a: &Matrix, cols: usize) -> (Matrix, Matrix, usize) {
    let m = a.len();
    let mut h = a.clone();
    let mut u = identity_matrix(m);
    let mut r = 0;
    for col in 0..cols {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if h[i][col].is_zero() {
                continue;
            }
            let (x, y) = (h[r][col].clone(), h[i][col].clone());
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (xg, yg) = (&x / &g, &y / &g);
            // [row_r; row_i] <- [[s, t], [-y/g, x/g]] · [row_r; row_i]
            for mat in [&mut h, &mut u] {
                let (lo, hi) = mat.split_at_mut(i);
                let (ra, rb) = (&mut lo[r], &mut hi[0]);
                for (p, q) in ra.iter_mut().zip(rb.iter_mut()) {
                    let np = &s * &*p + &t * &*q;
                    let nq = &xg * &*q - &yg * &*p;
                    *p = np;
                    *q = nq;
                }
            }
        }
        if h[r][col].is_zero() {
            continue;
        }
        if h[r][col].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let q = -h[i][col].div_floor(&h[r][col]);
            row_axpy(&mut h, i, r, &q);
            row_axpy(&mut u, i, r, &q);
        }
        r += 1;
    }
    (h, u, r)
}

/// Canonical basis of the row span.
pub fn hnf(a: &Matrix, cols: usize) -> Matrix {
    let (h, _, r) = hnf_with_transform(a, cols);
    h.into_iter().take(r).collect()
}

/// Basis of `{x ∈ ℤⁿ : M·x = 0}` as rows.
pub fn integer_kernel(m: &Matrix, cols: usize) -> Matrix {
    let transposed: Matrix = (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect();
    let (_, u, r) = hnf_with_transform(&transposed, m.len());
    u.into_iter().skip(r).collect()
}

/// `left · A · right = diag(diagonal, 0, ...)` with `d_1 | d_2 | ...`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: Matrix,
    pub right: Matrix,
}

pub fn smith(a: &Matrix, cols: usize) -> SmithForm {
    let m = a.len();
    let n = cols;
    let mut d = a.clone();
    let mut u = identity_matrix(m);
    let mut v = identity_matrix(n);
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = smallest_nonzero(&d, t, m, n) else {
            break;
        };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !d[i][t].is_zero() {
                    let q = -d[i][t].div_floor(&d[t][t]);
                    row_axpy(&mut d, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    clean &= d[i][t].is_zero();
                }
            }
            for j in t + 1..n {
                if !d[t][j].is_zero() {
                    let q = -d[t][j].div_floor(&d[t][t]);
                    col_axpy(&mut d, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    clean &= d[t][j].is_zero();
                }
            }
            if !clean {
                // a remainder smaller than the pivot sits in row or column t
                let mut best = (t, t);
                for i in t + 1..m {
                    if !d[i][t].is_zero() && d[i][t].abs() < d[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !d[t][j].is_zero() && d[t][j].abs() < d[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                d.swap(t, best.0);
                u.swap(t, best.0);
                swap_cols(&mut d, t, best.1);
                swap_cols(&mut v, t, best.1);
                continue;
            }
            let pivot = d[t][t].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[i][j] % &pivot).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    row_axpy(&mut d, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    SmithForm {
        diagonal: (0..t).map(|i| d[i][i].clone()).collect(),
        left: u,
        right: v,
    }
}

fn smallest_nonzero(d: &Matrix, t: usize, m: usize, n: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..m {
        for j in t..n {
            if d[i][j].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// Nonzero Smith invariants of an integer matrix.
pub fn snf(a: &Matrix, cols: usize) -> Vec<BigInt> {
    smith(a, cols).diagonal
}

// ---------------------------------------------------------------------------

/// A subgroup of `ℤⁿ` in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient: usize,
    basis: Matrix,
}

impl Lattice {
    pub fn from_rows(ambient: usize, rows: &Matrix) -> Lattice {
        assert!(
            rows.iter().all(|r| r.len() == ambient),
            "row length must equal ambient rank"
        );
        Lattice {
            ambient,
            basis: hnf(rows, ambient),
        }
    }

    pub fn from_i64(ambient: usize, rows: &[Vec<i64>]) -> Lattice {
        Lattice::from_rows(ambient, &to_big(rows))
    }

    pub fn zero(ambient: usize) -> Lattice {
        Lattice {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Lattice {
        Lattice {
            ambient,
            basis: identity_matrix(ambient),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn pivot(row: &[BigInt]) -> usize {
        row.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero")
    }

    /// Membership of a zero-extended vector.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.iter().skip(self.ambient).any(|x| !x.is_zero()) {
            return false;
        }
        let mut rest: Vec<BigInt> = (0..self.ambient)
            .map(|i| v.get(i).cloned().unwrap_or_default())
            .collect();
        for row in &self.basis {
            let p = Lattice::pivot(row);
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return false;
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        rest.iter().all(Zero::is_zero)
    }

    pub fn contains_i64(&self, v: &[i64]) -> bool {
        self.contains(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    /// Canonical representative of `v + L` (pivot coordinates reduced into
    /// `[0, pivot)`); coordinates beyond the ambient rank are kept, trailing
    /// zeros dropped.
    pub fn coset_rep(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = v.to_vec();
        if out.len() < self.ambient {
            out.resize(self.ambient, BigInt::zero());
        }
        for row in &self.basis {
            let p = Lattice::pivot(row);
            let q = out[p].div_floor(&row[p]);
            if !q.is_zero() {
                for (x, y) in out.iter_mut().zip(row) {
                    *x -= &q * y;
                }
            }
        }
        while out.last().is_some_and(Zero::is_zero) {
            out.pop();
        }
        out
    }

    pub fn is_subset_of(&self, other: &Lattice) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|r| other.contains(r))
    }

    /// `L1 ⊕ L2 ≤ ℤ^{n1+n2}`.
    pub fn block_diag(&self, other: &Lattice) -> Lattice {
        let n = self.ambient + other.ambient;
        let mut rows = Vec::new();
        for r in &self.basis {
            let mut v = r.clone();
            v.resize(n, BigInt::zero());
            rows.push(v);
        }
        for r in &other.basis {
            let mut v = vec![BigInt::zero(); self.ambient];
            v.extend(r.iter().cloned());
            rows.push(v);
        }
        Lattice::from_rows(n, &rows)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_matrix(&self.basis, self.ambient))
    }
}

/// `rows cols` followed by the entries, row-major.
pub fn parse_matrix(text: &str) -> Result<(Matrix, usize), AbelianError> {
    let mut tokens = text.split_whitespace();
    let mut next_usize = |what: &str| -> Result<usize, AbelianError> {
        tokens
            .next()
            .ok_or_else(|| AbelianError::Parse(format!("missing {what}")))?
            .parse()
            .map_err(|_| AbelianError::Parse(format!("bad {what}")))
    };
    let rows = next_usize("row count")?;
    let cols = next_usize("column count")?;
    let mut m = Vec::with_capacity(rows);
    for _ in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for _ in 0..cols {
            let tok = tokens
                .next()
                .ok_or_else(|| AbelianError::Parse("too few entries".into()))?;
            row.push(BigInt::from_str(tok).map_err(|_| AbelianError::Parse(format!("bad entry `{tok}`")))?);
        }
        m.push(row);
    }
    if tokens.next().is_some() {
        return Err(AbelianError::Parse("too many entries".into()));
    }
    Ok((m, cols))
}

pub fn format_matrix(m: &Matrix, cols: usize) -> String {
    let mut out = format!("{} {}\n", m.len(), cols);
    for row in m {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------

/// Exponent-sum vector of `w` in `ℤⁿ`.
pub fn abelianize(w: &Word, n: usize) -> Result<Vec<BigInt>, AbelianError> {
    let mut v = vec![BigInt::zero(); n];
    for s in w.syllables() {
        let slot =
            v.get_mut(usize::try_from(s.index).unwrap_or(usize::MAX))
                .ok_or(AbelianError::IndexOutOfAmbient {
                    index: s.index,
                    ambient: n,
                })?;
        *slot += s.exp;
    }
    Ok(v)
}

/// Exponent sums over every index occurring in `w` (length `1 + max index`,
/// at least `min_len`).
pub fn abelianize_extended(w: &Word, min_len: usize) -> Vec<BigInt> {
    let n = w.max_index().map_or(0, |m| m as usize + 1).max(min_len);
    abelianize(w, n).expect("length covers every index")
}

/// Invariants of a finitely generated abelian group `ℤ^rank ⊕ ⊕ ℤ/d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FGAbelianInvariants {
    pub rank: usize,
    /// Invariant factors, each at least 2, each dividing the next.
    pub torsion: Vec<BigInt>,
}

impl FGAbelianInvariants {
    pub fn trivial() -> FGAbelianInvariants {
        FGAbelianInvariants {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    /// Invariants of `ℤ^rank ⊕ ⊕ ℤ/c_j` for arbitrary positive `c_j`.
    pub fn from_cyclic_orders(rank: usize, orders: &[BigInt]) -> FGAbelianInvariants {
        // split into prime powers, then recombine largest-first per prime
        let mut by_prime: std::collections::BTreeMap<BigInt, Vec<BigInt>> = Default::default();
        for c in orders {
            let mut c = c.abs();
            let mut p = BigInt::from(2);
            while c > BigInt::one() {
                if &p * &p > c {
                    p = c.clone();
                }
                let mut pk = BigInt::one();
                while (&c % &p).is_zero() {
                    c /= &p;
                    pk *= &p;
                }
                if pk > BigInt::one() {
                    by_prime.entry(p.clone()).or_default().push(pk);
                }
                p += 1;
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut torsion = vec![BigInt::one(); len];
        for powers in by_prime.values_mut() {
            powers.sort();
            // largest power goes to the last factor
            for (k, pk) in powers.iter().rev().enumerate() {
                torsion[len - 1 - k] *= pk;
            }
        }
        FGAbelianInvariants { rank, torsion }
    }

    /// Direct sum.
    pub fn merge(&self, other: &FGAbelianInvariants) -> FGAbelianInvariants {
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        FGAbelianInvariants::from_cyclic_orders(self.rank + other.rank, &orders)
    }

    /// Group order, if finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for FGAbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.torsion.iter().map(ToString::to_string).collect();
        write!(f, "rank {} torsion ({})", self.rank, t.join(","))
    }
}

/// Invariants of `ℤ^ambient / L`.
pub fn quotient_invariants(l: &Lattice) -> FGAbelianInvariants {
    let diag = snf(l.basis(), l.ambient());
    FGAbelianInvariants {
        rank: l.ambient() - diag.len(),
        torsion: diag.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

pub fn fg_iso(a: &FGAbelianInvariants, b: &FGAbelianInvariants) -> bool {
    a == b
}

/// `Ψ(L) = ψ⁻¹(L)`, a normal subgroup of the free group with abelian quotient.
pub fn psi_preimage_marked(l: &Lattice) -> MarkedGroup {
    MarkedGroup::abelian_preimage(l.clone())
}

const WINDOW_GUARD: u64 = 4;

fn box_points(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut pts = vec![Vec::new()];
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (-radius..=radius).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    pts
}

fn guard(l: &Lattice, radius: u64) -> Result<(), AbelianError> {
    if l.ambient() as u64 > WINDOW_GUARD || radius > WINDOW_GUARD {
        return Err(AbelianError::GuardExceeded {
            ambient: l.ambient(),
            radius,
        });
    }
    Ok(())
}

/// Distinct cosets `v + L` with `v ∈ [-B, B]^n`.
pub fn coset_count_window(l: &Lattice, radius: u64) -> Result<u64, AbelianError> {
    guard(l, radius)?;
    let reps: std::collections::HashSet<Vec<BigInt>> = box_points(l.ambient(), radius as i64)
        .iter()
        .map(|p| l.coset_rep(&p.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
        .collect();
    Ok(reps.len() as u64)
}

/// The marked-side count: distinct `Ψ(L)`-cosets among the words
/// `x0^{a0} ⋯ x_{n-1}^{a_{n-1}}` with `|a_i| ≤ B`, decided by pairwise
/// membership tests.
pub fn coset_count_window_marked(l: &Lattice, radius: u64) -> Result<u64, AbelianError> {
    guard(l, radius)?;
    let n = psi_preimage_marked(l);
    let words: Vec<Word> = box_points(l.ambient(), radius as i64)
        .into_iter()
        .map(|p| Word::reduce(p.into_iter().enumerate().map(|(i, a)| (i as u64, a))))
        .collect();
    let mut reps: Vec<&Word> = Vec::new();
    for w in &words {
        if !reps.iter().any(|r| n.same_coset(w, r)) {
            reps.push(w);
        }
    }
    Ok(reps.len() as u64)
}
