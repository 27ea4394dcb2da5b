// SPDX-License-Identifier: MIT OR Apache-2.0

//! Annihilators between lattices in `ℤⁿ` and closed subgroups of `𝕋ⁿ`.
//!
//! Only rationally generated subgroups are represented: finitely many torsion
//! points plus rational subtori. Everything is exact; containment between
//! torus subgroups is decided on the lattice side.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::abelian::{integer_kernel, quotient_invariants, smith, FGAbelianInvariants, Lattice, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error("bad torus subgroup: {0}")]
    Parse(String),
}

/// A closed subgroup of `𝕋ⁿ` generated by torsion points and the subtori
/// `{t·v mod ℤⁿ}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusSubgroup {
    ambient: usize,
    torsion: Vec<Vec<BigRational>>,
    directions: Matrix,
}

fn frac_mod1(q: &BigRational) -> BigRational {
    q - q.floor()
}

impl TorusSubgroup {
    /// Torsion entries are reduced mod 1; no other normalization.
    pub fn new(ambient: usize, torsion: Vec<Vec<BigRational>>, directions: Matrix) -> TorusSubgroup {
        assert!(
            torsion.iter().all(|q| q.len() == ambient),
            "torsion generator length must equal ambient"
        );
        assert!(
            directions.iter().all(|v| v.len() == ambient),
            "direction length must equal ambient"
        );
        let torsion = torsion.into_iter().map(|q| q.iter().map(frac_mod1).collect()).collect();
        TorusSubgroup {
            ambient,
            torsion,
            directions,
        }
    }

    pub fn trivial(ambient: usize) -> TorusSubgroup {
        TorusSubgroup::new(ambient, Vec::new(), Vec::new())
    }

    pub fn full(ambient: usize) -> TorusSubgroup {
        TorusSubgroup::new(ambient, Vec::new(), crate::abelian::identity_matrix(ambient))
    }

    /// `⟨(1/d) e_0⟩ ≤ 𝕋¹`.
    pub fn cyclic_circle(d: &BigInt) -> TorusSubgroup {
        TorusSubgroup::new(1, vec![vec![BigRational::new(BigInt::one(), d.clone())]], Vec::new())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn torsion(&self) -> &[Vec<BigRational>] {
        &self.torsion
    }

    pub fn directions(&self) -> &Matrix {
        &self.directions
    }

    /// The representation produced from the annihilator; equal subgroups get
    /// equal canonical forms.
    pub fn canonical(&self) -> TorusSubgroup {
        annihilated_subgroup(&annihilator(self))
    }

    /// Whether the rational point `q mod ℤⁿ` lies in the subgroup.
    pub fn contains_point(&self, q: &[BigRational]) -> bool {
        annihilator(self).basis().iter().all(|l| dot_q(l, q).is_integer())
    }
}

impl fmt::Display for TorusSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ambient {}", self.ambient)?;
        for q in &self.torsion {
            let entries: Vec<String> = q.iter().map(ToString::to_string).collect();
            writeln!(f, "t {}", entries.join(" "))?;
        }
        for v in &self.directions {
            let entries: Vec<String> = v.iter().map(ToString::to_string).collect();
            writeln!(f, "d {}", entries.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for TorusSubgroup {
    type Err = DualityError;

    fn from_str(text: &str) -> Result<TorusSubgroup, DualityError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines.next().ok_or_else(|| DualityError::Parse("empty input".into()))?;
        let ambient: usize = head
            .strip_prefix("ambient")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| DualityError::Parse(format!("expected `ambient n`, got `{head}`")))?;
        let mut torsion = Vec::new();
        let mut directions = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap_or_default();
            let entries: Vec<&str> = parts.collect();
            if entries.len() != ambient {
                return Err(DualityError::Parse(format!("`{line}` needs {ambient} entries")));
            }
            match tag {
                "t" => torsion.push(
                    entries
                        .iter()
                        .map(|e| {
                            e.parse::<BigRational>()
                                .map_err(|_| DualityError::Parse(format!("bad rational `{e}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                "d" => directions.push(
                    entries
                        .iter()
                        .map(|e| {
                            e.parse::<BigInt>()
                                .map_err(|_| DualityError::Parse(format!("bad integer `{e}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                _ => return Err(DualityError::Parse(format!("unknown line `{line}`"))),
            }
        }
        Ok(TorusSubgroup::new(ambient, torsion, directions))
    }
}

fn dot_q(l: &[BigInt], q: &[BigRational]) -> BigRational {
    l.iter().zip(q).fold(BigRational::zero(), |acc, (a, b)| {
        acc + BigRational::from_integer(a.clone()) * b
    })
}

/// `{l ∈ ℤⁿ : l·q ∈ ℤ for torsion q, l·v = 0 for directions v}`.
pub fn annihilator(k: &TorusSubgroup) -> Lattice {
    let n = k.ambient;
    // integer vectors orthogonal to the directions
    let base = integer_kernel(&k.directions, n);
    let r = base.len();
    if r == 0 {
        return Lattice::zero(n);
    }
    // l = c·base; require c·(base q_j) ≡ 0 mod 1 for each j
    let mut system: Matrix = Vec::new();
    let jn = k.torsion.len();
    for (j, q) in k.torsion.iter().enumerate() {
        let denom = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut row: Vec<BigInt> = base
            .iter()
            .map(|b| (dot_q(b, q) * BigRational::from_integer(denom.clone())).to_integer())
            .collect();
        row.extend((0..jn).map(|i| if i == j { -denom.clone() } else { BigInt::zero() }));
        system.push(row);
    }
    let solutions = integer_kernel(&system, r + jn);
    let rows: Matrix = solutions
        .iter()
        .map(|sol| {
            (0..n)
                .map(|col| (0..r).fold(BigInt::zero(), |acc, i| acc + &sol[i] * &base[i][col]))
                .collect()
        })
        .collect();
    Lattice::from_rows(n, &rows)
}

/// `{t ∈ 𝕋ⁿ : l·t ≡ 0 mod 1 for all l ∈ L}`.
pub fn annihilated_subgroup(l: &Lattice) -> TorusSubgroup {
    let n = l.ambient();
    let s = smith(l.basis(), n);
    let column = |i: usize| -> Vec<BigInt> { s.right.iter().map(|row| row[i].clone()).collect() };
    let mut torsion: Vec<Vec<BigRational>> = s
        .diagonal
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_one())
        .map(|(i, d)| {
            column(i)
                .into_iter()
                .map(|x| frac_mod1(&BigRational::new(x, d.clone())))
                .collect()
        })
        .collect();
    torsion.sort();
    torsion.dedup();
    let free: Matrix = (s.diagonal.len()..n).map(column).collect();
    let directions = crate::abelian::hnf(&free, n);
    TorusSubgroup {
        ambient: n,
        torsion,
        directions,
    }
}

/// `K̂ ≅ ℤⁿ / ann(K)`.
pub fn dual_invariants(k: &TorusSubgroup) -> FGAbelianInvariants {
    quotient_invariants(&annihilator(k))
}

/// Every torsion point lies in the closed subtorus spanned by the directions.
pub fn is_connected(k: &TorusSubgroup) -> bool {
    let orth = integer_kernel(&k.directions, k.ambient);
    k.torsion.iter().all(|q| orth.iter().all(|l| dot_q(l, q).is_integer()))
}

/// `ℤⁿ / L` is torsion-free.
pub fn is_saturated(l: &Lattice) -> bool {
    crate::abelian::snf(l.basis(), l.ambient()).iter().all(One::is_one)
}

/// `inner ⊆ outer`, via `ann(outer) ⊆ ann(inner)`.
pub fn is_subgroup(inner: &TorusSubgroup, outer: &TorusSubgroup) -> bool {
    inner.ambient == outer.ambient && annihilator(outer).is_subset_of(&annihilator(inner))
}

/// The quotient by a block-diagonal lattice splits as the direct sum.
pub fn dual_of_product_check(l1: &Lattice, l2: &Lattice) -> bool {
    quotient_invariants(&l1.block_diag(l2)) == quotient_invariants(l1).merge(&quotient_invariants(l2))
}

/// One stage of a finite tower `K_j = ⟨1/d_j⟩ ≤ 𝕋¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerLevel {
    pub order: BigInt,
    pub annihilator: Lattice,
    pub dual: FGAbelianInvariants,
}

/// Restriction of characters from one stage to the previous one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectingMap {
    pub from_order: BigInt,
    pub to_order: BigInt,
    /// `1/d_j` is this multiple of `1/d_{j+1}`.
    pub multiplier: BigInt,
    pub kernel_size: BigInt,
    pub surjective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    pub levels: Vec<TowerLevel>,
    pub maps: Vec<ConnectingMap>,
    pub holds: bool,
}

impl fmt::Display for TowerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, level) in self.levels.iter().enumerate() {
            writeln!(
                f,
                "level {} order {} ann {}Z dual {}",
                j + 1,
                level.order,
                level.order,
                level.dual
            )?;
        }
        for m in &self.maps {
            writeln!(
                f,
                "map Z/{} -> Z/{} multiplier {} kernel {} surjective {}",
                m.from_order, m.to_order, m.multiplier, m.kernel_size, m.surjective
            )?;
        }
        write!(f, "{}", if self.holds { "coherent" } else { "incoherent" })
    }
}

/// Largest stage order for which restriction is checked element by element.
const EXPLICIT_MAP_LIMIT: u64 = 1 << 16;

fn tower(orders: &[BigInt]) -> TowerReport {
    let mut holds = true;
    let mut levels = Vec::new();
    for d in orders {
        let k = TorusSubgroup::cyclic_circle(d);
        let ann = annihilator(&k);
        let dual = dual_invariants(&k);
        holds &= ann == Lattice::from_rows(1, &vec![vec![d.clone()]]);
        holds &= dual == FGAbelianInvariants::from_cyclic_orders(0, std::slice::from_ref(d));
        levels.push(TowerLevel {
            order: d.clone(),
            annihilator: ann,
            dual,
        });
    }
    let mut maps = Vec::new();
    for pair in levels.windows(2) {
        let (small, big) = (&pair[0], &pair[1]);
        let small_k = TorusSubgroup::cyclic_circle(&small.order);
        let big_k = TorusSubgroup::cyclic_circle(&big.order);
        holds &= is_subgroup(&small_k, &big_k);
        holds &= big.annihilator.is_subset_of(&small.annihilator) && big.annihilator != small.annihilator;
        let (quotient, rem) = big.order.div_rem(&small.order);
        holds &= rem.is_zero();
        // restriction l ↦ l mod d_small, checked through the pairing with 1/d_small
        let (kernel_size, surjective) = match u64::try_from(&big.order) {
            Ok(b) if b <= EXPLICIT_MAP_LIMIT => {
                let s = u64::try_from(&small.order).expect("smaller than big");
                let small_gen = BigRational::new(BigInt::one(), small.order.clone());
                let mut hit = vec![false; s as usize];
                let mut kernel = 0u64;
                for l in 0..b {
                    let image = l % s;
                    let pairing = frac_mod1(&(BigRational::from_integer(l.into()) * &small_gen));
                    holds &= pairing == BigRational::new(image.into(), small.order.clone());
                    hit[image as usize] = true;
                    kernel += u64::from(image == 0);
                }
                (BigInt::from(kernel), hit.iter().all(|&h| h))
            }
            _ => (quotient.clone(), true),
        };
        holds &= kernel_size == quotient && surjective;
        maps.push(ConnectingMap {
            from_order: big.order.clone(),
            to_order: small.order.clone(),
            multiplier: quotient,
            kernel_size,
            surjective,
        });
    }
    TowerReport { levels, maps, holds }
}

/// Stages `⟨1/p^j⟩ ≤ 𝕋¹` for `j = 1..=k`.
pub fn prufer_tower(p: u64, k: u32) -> TowerReport {
    assert!(k >= 1, "tower needs at least one level");
    let orders: Vec<BigInt> = (1..=k).map(|j| BigInt::from(p).pow(j)).collect();
    tower(&orders)
}

pub fn prufer_tower_check(p: u64, k: u32) -> bool {
    prufer_tower(p, k).holds
}

/// Stages `⟨1/m!⟩ ≤ 𝕋¹` for `m = 1..=levels`.
pub fn solenoid_tower(levels: u32) -> TowerReport {
    assert!(levels >= 2, "tower needs at least two stages");
    let mut fact = BigInt::one();
    let orders: Vec<BigInt> = (1..=levels)
        .map(|m| {
            fact *= m;
            fact.clone()
        })
        .collect();
    tower(&orders)
}

pub fn solenoid_tower_check(levels: u32) -> bool {
    solenoid_tower(levels).holds
}

/// Rational vector from integer numerators and a common denominator.
pub fn rational_vector(nums: &[i64], den: i64) -> Vec<BigRational> {
    nums.iter().map(|&a| BigRational::new(a.into(), den.into())).collect()
}
