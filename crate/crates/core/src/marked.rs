// SPDX-License-Identifier: MIT OR Apache-2.0

//! Marked groups as normal subgroups `N ⊴ F∞`, given by membership.
//!
//! Every [`MarkedGroup`] remembers how it was produced: either as the kernel
//! of a marking `x_i ↦ a_i` into a [`GroupOracle`], or as the preimage of a
//! lattice under abelianization. Membership and coset comparison are decided
//! through that provenance: two words lie in the same coset exactly when
//! their [`CosetKey`]s agree.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::abelian::{abelianize_extended, Lattice};
use crate::oracles::{FinitePermutation, GroupOracle, OracleError};
use crate::pairing::{pair, row};
use crate::words::{evaluate, EvalError, Word};

/// How generators beyond the finite table are assigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailRule {
    /// `x_i ↦ c`.
    Constant(u64),
    /// `x_i ↦ first coordinate of unpair(i - offset)`; every value is hit
    /// infinitely often, first at `offset + v(v+3)/2`.
    PairRow { offset: u64 },
    /// `x_i ↦ (i - offset) / multiplicity`.
    Enumeration { multiplicity: u64, offset: u64 },
    /// Repeat the table periodically.
    Cycle,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssignmentError {
    #[error("bad assignment `{0}`")]
    Parse(String),
    #[error("tail offset {offset} exceeds table length {table}")]
    OffsetBeyondTable { offset: u64, table: u64 },
    #[error("cycle tail needs a nonempty table")]
    EmptyCycle,
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
}

/// A total map `ℕ → ℕ` described by a finite table and a tail rule,
/// optionally followed by a finitely supported relabelling of the values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    table: Vec<u64>,
    tail: TailRule,
    relabel: FinitePermutation,
}

impl Assignment {
    pub fn new(table: Vec<u64>, tail: TailRule) -> Result<Assignment, AssignmentError> {
        let len = table.len() as u64;
        match tail {
            TailRule::PairRow { offset } | TailRule::Enumeration { offset, .. } if offset > len => {
                return Err(AssignmentError::OffsetBeyondTable { offset, table: len })
            }
            TailRule::Enumeration { multiplicity: 0, .. } => return Err(AssignmentError::ZeroMultiplicity),
            TailRule::Cycle if table.is_empty() => return Err(AssignmentError::EmptyCycle),
            _ => {}
        }
        Ok(Assignment {
            table,
            tail,
            relabel: FinitePermutation::identity(),
        })
    }

    /// `x_i ↦ i`.
    pub fn identity() -> Assignment {
        Assignment::new(
            Vec::new(),
            TailRule::Enumeration {
                multiplicity: 1,
                offset: 0,
            },
        )
        .unwrap()
    }

    /// `σ`: `x_k ↦` first coordinate of the antidiagonal unpairing of `k`.
    pub fn sigma() -> Assignment {
        Assignment::new(Vec::new(), TailRule::PairRow { offset: 0 }).unwrap()
    }

    pub fn constant(c: u64) -> Assignment {
        Assignment::new(Vec::new(), TailRule::Constant(c)).unwrap()
    }

    /// Postcompose with a permutation of ℕ.
    pub fn then(&self, perm: &FinitePermutation) -> Assignment {
        let mut swaps = self.relabel.swaps().to_vec();
        swaps.extend_from_slice(perm.swaps());
        Assignment {
            table: self.table.clone(),
            tail: self.tail.clone(),
            relabel: FinitePermutation::from_swaps(&swaps),
        }
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    fn base(&self, i: u64) -> u64 {
        let len = self.table.len() as u64;
        if i < len {
            return self.table[i as usize];
        }
        match self.tail {
            TailRule::Constant(c) => c,
            TailRule::PairRow { offset } => row(i - offset),
            TailRule::Enumeration { multiplicity, offset } => (i - offset) / multiplicity,
            TailRule::Cycle => self.table[(i % len) as usize],
        }
    }

    pub fn get(&self, i: u64) -> u64 {
        self.relabel.apply(self.base(i))
    }

    /// Indices mapped to `value`, increasing. May be infinite.
    pub fn preimages(&self, value: u64) -> Box<dyn Iterator<Item = u64> + Send> {
        let v = self.relabel.apply_inverse(value);
        let len = self.table.len() as u64;
        let head: Vec<u64> = (0..len).filter(|&i| self.table[i as usize] == v).collect();
        let tail: Box<dyn Iterator<Item = u64> + Send> = match self.tail {
            TailRule::Constant(c) if c == v => Box::new(len..),
            TailRule::Constant(_) => Box::new(std::iter::empty()),
            TailRule::PairRow { offset } => {
                Box::new((0..).map(move |j| offset + pair(v, j)).skip_while(move |&i| i < len))
            }
            TailRule::Enumeration { multiplicity, offset } => {
                let lo = v
                    .checked_mul(multiplicity)
                    .and_then(|x| x.checked_add(offset))
                    .unwrap_or(u64::MAX);
                let hi = lo.saturating_add(multiplicity);
                Box::new(lo.max(len)..hi.max(len))
            }
            TailRule::Cycle if head.is_empty() => Box::new(std::iter::empty()),
            TailRule::Cycle => {
                let residues = head.clone();
                Box::new((1u64..).flat_map(move |block| {
                    let residues = residues.clone();
                    residues.into_iter().map(move |r| block * len + r)
                }))
            }
        };
        Box::new(head.into_iter().chain(tail))
    }

    /// Exact number of indices mapped to `value`; `None` when infinite.
    pub fn fiber_size(&self, value: u64) -> Option<u64> {
        let v = self.relabel.apply_inverse(value);
        let len = self.table.len() as u64;
        let head = self.table.iter().filter(|&&x| x == v).count() as u64;
        match self.tail {
            TailRule::Constant(c) if c == v => None,
            TailRule::Constant(_) => Some(head),
            TailRule::PairRow { .. } => None,
            TailRule::Enumeration { .. } => Some(head + self.preimages(value).filter(|&i| i >= len).count() as u64),
            TailRule::Cycle if head > 0 => None,
            TailRule::Cycle => Some(0),
        }
    }

    /// The set of values, when finite.
    pub fn finite_image(&self) -> Option<BTreeSet<u64>> {
        let mut values: BTreeSet<u64> = self.table.iter().copied().collect();
        match self.tail {
            TailRule::Constant(c) => {
                values.insert(c);
            }
            TailRule::Cycle => {}
            _ => return None,
        }
        Some(values.into_iter().map(|v| self.relabel.apply(v)).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.table.iter().map(ToString::to_string).collect();
        write!(f, "{};", cells.join(","))?;
        match self.tail {
            TailRule::Constant(c) => write!(f, "const({c})")?,
            TailRule::PairRow { offset: 0 } => f.write_str("pair-row")?,
            TailRule::PairRow { offset } => write!(f, "pair-row({offset})")?,
            TailRule::Enumeration {
                multiplicity: 1,
                offset: 0,
            } => f.write_str("enum")?,
            TailRule::Enumeration {
                multiplicity,
                offset: 0,
            } => write!(f, "enum({multiplicity})")?,
            TailRule::Enumeration { multiplicity, offset } => write!(f, "enum({multiplicity},{offset})")?,
            TailRule::Cycle => f.write_str("cycle")?,
        }
        if !self.relabel.swaps().is_empty() {
            write!(f, "|{}", self.relabel)?;
        }
        Ok(())
    }
}

fn parse_args(s: &str, name: &str) -> Option<Vec<u64>> {
    if s == name {
        return Some(Vec::new());
    }
    let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|x| x.parse().ok()).collect()
}

impl FromStr for Assignment {
    type Err = AssignmentError;

    /// `<v0>,<v1>,...;<tail>[|swap(i,j),...]` where the tail is one of
    /// `const(c)`, `pair-row[(offset)]`, `enum[(mult[,offset])]`, `cycle`.
    fn from_str(text: &str) -> Result<Assignment, AssignmentError> {
        let bad = || AssignmentError::Parse(text.to_string());
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (body, relabel) = match compact.split_once('|') {
            Some((b, r)) => (b.to_string(), Some(r.to_string())),
            None => (compact.clone(), None),
        };
        let (table_text, tail_text) = body.split_once(';').ok_or_else(bad)?;
        let table: Vec<u64> = if table_text.is_empty() {
            Vec::new()
        } else {
            table_text
                .split(',')
                .map(|x| x.parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        let tail = if let Some(a) = parse_args(tail_text, "const") {
            match a[..] {
                [c] => TailRule::Constant(c),
                _ => return Err(bad()),
            }
        } else if let Some(a) = parse_args(tail_text, "pair-row") {
            match a[..] {
                [] => TailRule::PairRow { offset: 0 },
                [offset] => TailRule::PairRow { offset },
                _ => return Err(bad()),
            }
        } else if let Some(a) = parse_args(tail_text, "enum") {
            match a[..] {
                [] => TailRule::Enumeration {
                    multiplicity: 1,
                    offset: 0,
                },
                [multiplicity] => TailRule::Enumeration {
                    multiplicity,
                    offset: 0,
                },
                [multiplicity, offset] => TailRule::Enumeration { multiplicity, offset },
                _ => return Err(bad()),
            }
        } else if tail_text == "cycle" {
            TailRule::Cycle
        } else {
            return Err(bad());
        };
        let mut a = Assignment::new(table, tail)?;
        if let Some(r) = relabel {
            let mut swaps = Vec::new();
            for part in r.split("swap(").skip(1) {
                let part = part.trim_end_matches(',').strip_suffix(')').ok_or_else(bad)?;
                let (i, j) = part.split_once(',').ok_or_else(bad)?;
                swaps.push((i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?));
            }
            if swaps.is_empty() {
                return Err(bad());
            }
            a = a.then(&FinitePermutation::from_swaps(&swaps));
        }
        Ok(a)
    }
}

// ---------------------------------------------------------------------------

/// Canonical name of the coset `wN`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CosetKey {
    /// Image in the marked oracle.
    Element(u64),
    /// Canonical representative modulo a lattice.
    Vector(Vec<BigInt>),
}

pub enum Provenance {
    Marking {
        oracle: GroupOracle,
        assignment: Assignment,
    },
    AbelianPreimage(Lattice),
}

/// A normal subgroup of `F∞` with the data that produced it. Cheap to clone.
#[derive(Clone)]
pub struct MarkedGroup {
    provenance: Arc<Provenance>,
}

impl fmt::Debug for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MarkedGroup({self})")
    }
}

impl fmt::Display for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.provenance {
            Provenance::Marking { oracle, assignment } => write!(f, "{} {}", oracle.name(), assignment),
            Provenance::AbelianPreimage(l) => {
                let rows: Vec<String> = l
                    .basis()
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                write!(f, "Psi(ambient {}: [{}])", l.ambient(), rows.join(";"))
            }
        }
    }
}

impl MarkedGroup {
    pub fn abelian_preimage(l: Lattice) -> MarkedGroup {
        MarkedGroup {
            provenance: Arc::new(Provenance::AbelianPreimage(l)),
        }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `(oracle, assignment)` when this is the kernel of a marking.
    pub fn marking(&self) -> Option<(&GroupOracle, &Assignment)> {
        match &*self.provenance {
            Provenance::Marking { oracle, assignment } => Some((oracle, assignment)),
            Provenance::AbelianPreimage(_) => None,
        }
    }

    pub fn coset_key(&self, w: &Word) -> Result<CosetKey, OracleError> {
        match &*self.provenance {
            Provenance::Marking { oracle, assignment } => match evaluate(w, |i| Some(assignment.get(i)), oracle) {
                Ok(v) => Ok(CosetKey::Element(v)),
                Err(EvalError::Oracle(e)) => Err(e),
                Err(EvalError::MissingAssignment(_)) => unreachable!("assignments are total"),
            },
            Provenance::AbelianPreimage(l) => Ok(CosetKey::Vector(l.coset_rep(&abelianize_extended(w, l.ambient())))),
        }
    }

    pub fn generator_key(&self, i: u64) -> Result<CosetKey, OracleError> {
        match &*self.provenance {
            Provenance::Marking { assignment, .. } => Ok(CosetKey::Element(assignment.get(i))),
            Provenance::AbelianPreimage(_) => self.coset_key(&Word::generator(i)),
        }
    }

    pub fn identity_key(&self) -> Result<CosetKey, OracleError> {
        self.coset_key(&Word::identity())
    }

    pub fn try_contains(&self, w: &Word) -> Result<bool, OracleError> {
        match &*self.provenance {
            Provenance::AbelianPreimage(l) => Ok(l.contains(&abelianize_extended(w, l.ambient()))),
            Provenance::Marking { .. } => Ok(self.coset_key(w)? == self.identity_key()?),
        }
    }

    /// Membership. Panics only if the underlying oracle fails to produce an
    /// identity or inverse within its scan budget.
    pub fn contains(&self, w: &Word) -> bool {
        self.try_contains(w)
            .unwrap_or_else(|e| panic!("membership undecided for {w} in {self}: {e}"))
    }

    /// `uN = vN`, i.e. `u v⁻¹ ∈ N`.
    pub fn same_coset(&self, u: &Word, v: &Word) -> bool {
        self.contains(&u.mul(&v.inv()))
    }
}

/// The kernel of the homomorphism extending `x_i ↦ assignment(i)`.
pub fn kernel_of_marking(oracle: &GroupOracle, assignment: &Assignment) -> MarkedGroup {
    MarkedGroup {
        provenance: Arc::new(Provenance::Marking {
            oracle: oracle.clone(),
            assignment: assignment.clone(),
        }),
    }
}

pub fn same_coset(n: &MarkedGroup, u: &Word, v: &Word) -> bool {
    n.same_coset(u, v)
}

/// `In ⊆ N` and `Out ∩ N = ∅`.
pub fn eval_condition<'a, I, O>(n: &MarkedGroup, inside: I, outside: O) -> bool
where
    I: IntoIterator<Item = &'a Word>,
    O: IntoIterator<Item = &'a Word>,
{
    inside.into_iter().all(|w| n.contains(w)) && !outside.into_iter().any(|w| n.contains(w))
}

// ---------------------------------------------------------------------------
// Condition files

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// A clopen condition as text: one word per line under `[in]` and `[out]`,
/// plus an optional `[witness]` section with `group = <expr>` and
/// `assign = <assignment>`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionFile {
    pub inside: Vec<Word>,
    pub outside: Vec<Word>,
    pub witness_group: Option<String>,
    pub witness_assignment: Option<String>,
}

impl FromStr for ConditionFile {
    type Err = ConditionFileError;

    fn from_str(text: &str) -> Result<ConditionFile, ConditionFileError> {
        #[derive(Clone, Copy)]
        enum Section {
            None,
            In,
            Out,
            Witness,
        }
        let mut out = ConditionFile::default();
        let mut section = Section::None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| ConditionFileError::Syntax { line: k + 1, msg };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[in]" => section = Section::In,
                "[out]" => section = Section::Out,
                "[witness]" => section = Section::Witness,
                _ => match section {
                    Section::None => return Err(err("word before any section header".into())),
                    Section::In => out.inside.push(line.parse().map_err(|e| err(format!("{e}")))?),
                    Section::Out => out.outside.push(line.parse().map_err(|e| err(format!("{e}")))?),
                    Section::Witness => {
                        let (key, value) = line
                            .split_once('=')
                            .ok_or_else(|| err("expected `key = value`".into()))?;
                        match key.trim() {
                            "group" => out.witness_group = Some(value.trim().to_string()),
                            "assign" => out.witness_assignment = Some(value.trim().to_string()),
                            other => return Err(err(format!("unknown witness key `{other}`"))),
                        }
                    }
                },
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ConditionFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[in]")?;
        for w in &self.inside {
            writeln!(f, "{w}")?;
        }
        writeln!(f, "[out]")?;
        for w in &self.outside {
            writeln!(f, "{w}")?;
        }
        if self.witness_group.is_some() || self.witness_assignment.is_some() {
            writeln!(f, "[witness]")?;
            if let Some(g) = &self.witness_group {
                writeln!(f, "group = {g}")?;
            }
            if let Some(a) = &self.witness_assignment {
                writeln!(f, "assign = {a}")?;
            }
        }
        Ok(())
    }
}
