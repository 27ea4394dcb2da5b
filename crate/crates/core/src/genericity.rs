// SPDX-License-Identifier: MIT OR Apache-2.0

//! Certified clopen conditions and the density game.
//!
//! A condition `In ⊆ N, Out ∩ N = ∅` is only ever held together with a
//! witness marked group satisfying it, since consistency of raw word sets is
//! undecidable. Player II answers every move with [`density_step`], which
//! re-marks the witness so that every element is hit by infinitely many
//! generators while keeping membership of words over the generators already
//! mentioned.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::marked::{kernel_of_marking, Assignment, ConditionFile, MarkedGroup, Provenance, TailRule};
use crate::oracles::{named, product, product_code, GroupOracle, OracleError, CATALOG};
use crate::transfer::{dm_check, DmOutcome};
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("certificate failed on {0}")]
    CertificateFailed(Word),
    #[error("move is not a refinement: {0}")]
    NotNested(String),
    #[error("budget exhausted while checking D_{m}")]
    BudgetExhausted { m: u64 },
    #[error("D_{m} check came back false")]
    DensityFailed { m: u64 },
    #[error("unsupported witness: {0}")]
    UnsupportedWitness(String),
    #[error("bad witness: {0}")]
    BadWitness(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// `In ⊆ N`, `Out ∩ N = ∅`, held with a witness `N`.
#[derive(Clone, Debug)]
pub struct CertifiedCondition {
    inside: BTreeSet<Word>,
    outside: BTreeSet<Word>,
    witness: MarkedGroup,
    /// The witness oracle already carries the extra `ℤ` factor.
    extended: bool,
}

impl CertifiedCondition {
    /// Checks the certificate against an arbitrary witness.
    pub fn new(
        inside: impl IntoIterator<Item = Word>,
        outside: impl IntoIterator<Item = Word>,
        witness: MarkedGroup,
    ) -> Result<CertifiedCondition, GameError> {
        let inside: BTreeSet<Word> = inside.into_iter().collect();
        let outside: BTreeSet<Word> = outside.into_iter().collect();
        if let Some(w) = inside.intersection(&outside).next() {
            return Err(GameError::CertificateFailed(w.clone()));
        }
        for w in &inside {
            if !witness.try_contains(w)? {
                return Err(GameError::CertificateFailed(w.clone()));
            }
        }
        for w in &outside {
            if witness.try_contains(w)? {
                return Err(GameError::CertificateFailed(w.clone()));
            }
        }
        Ok(CertifiedCondition {
            inside,
            outside,
            witness,
            extended: false,
        })
    }

    pub fn vacuous(witness: MarkedGroup) -> CertifiedCondition {
        CertifiedCondition::new([], [], witness).expect("empty conditions hold everywhere")
    }

    pub fn inside(&self) -> &BTreeSet<Word> {
        &self.inside
    }

    pub fn outside(&self) -> &BTreeSet<Word> {
        &self.outside
    }

    pub fn witness(&self) -> &MarkedGroup {
        &self.witness
    }

    /// `1 + ` the largest generator index mentioned, or 0.
    pub fn support(&self) -> u64 {
        self.inside
            .iter()
            .chain(&self.outside)
            .filter_map(Word::max_index)
            .max()
            .map_or(0, |i| i + 1)
    }

    /// Whether another marked group satisfies the same condition.
    pub fn holds_for(&self, n: &MarkedGroup) -> bool {
        crate::marked::eval_condition(n, &self.inside, &self.outside)
    }

    pub fn to_condition_file(&self) -> Result<ConditionFile, GameError> {
        let (oracle, assignment) = self
            .witness
            .marking()
            .ok_or_else(|| GameError::UnsupportedWitness(self.witness.to_string()))?;
        Ok(ConditionFile {
            inside: self.inside.iter().cloned().collect(),
            outside: self.outside.iter().cloned().collect(),
            witness_group: Some(oracle.name().to_string()),
            witness_assignment: Some(assignment.to_string()),
        })
    }
}

impl PartialEq for CertifiedCondition {
    fn eq(&self, other: &CertifiedCondition) -> bool {
        self.inside == other.inside
            && self.outside == other.outside
            && self.witness.to_string() == other.witness.to_string()
    }
}

fn braces(words: &BTreeSet<Word>) -> String {
    let parts: Vec<String> = words.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

impl fmt::Display for CertifiedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IN:{} OUT:{}", braces(&self.inside), braces(&self.outside))
    }
}

/// `kernel_of_marking(G, assignment)` from their text forms.
pub fn witness_from_spec(group: &str, assignment: &str) -> Result<MarkedGroup, GameError> {
    let g = named(group).map_err(|e| GameError::BadWitness(e.to_string()))?;
    let a: Assignment = assignment
        .parse()
        .map_err(|e: crate::marked::AssignmentError| GameError::BadWitness(e.to_string()))?;
    Ok(kernel_of_marking(&g, &a))
}

pub fn certify(
    inside: impl IntoIterator<Item = Word>,
    outside: impl IntoIterator<Item = Word>,
    group: &GroupOracle,
    assignment: &Assignment,
) -> Result<CertifiedCondition, GameError> {
    CertifiedCondition::new(inside, outside, kernel_of_marking(group, assignment))
}

/// A condition from a file with a `[witness]` section.
pub fn condition_from_file(file: &ConditionFile) -> Result<CertifiedCondition, GameError> {
    let (Some(g), Some(a)) = (&file.witness_group, &file.witness_assignment) else {
        return Err(GameError::BadWitness(
            "condition file needs `group` and `assign` under [witness]".into(),
        ));
    };
    CertifiedCondition::new(
        file.inside.iter().cloned(),
        file.outside.iter().cloned(),
        witness_from_spec(g, a)?,
    )
}

/// Re-mark the witness so that it lies in `D_m`.
///
/// `H` is the witness oracle times `ℤ` (taken once; later steps reuse it),
/// `x_i` keeps its old value for `i < n`, and `x_{n + pair(h, j)} ↦ h`.
pub fn density_step(cond: &CertifiedCondition, m: u64, budget: u64) -> Result<CertifiedCondition, GameError> {
    assert!(m >= 1, "density_step needs m >= 1");
    let (g, old) = cond
        .witness
        .marking()
        .ok_or_else(|| GameError::UnsupportedWitness(cond.witness.to_string()))?;
    let n = cond.support();
    let (h, table): (GroupOracle, Vec<u64>) = if cond.extended {
        (g.clone(), (0..n).map(|i| old.get(i)).collect())
    } else {
        let z = named("Z").expect("Z is named");
        let e_z = z.identity()?;
        let table = (0..n).map(|i| product_code(None, None, old.get(i), e_z)).collect();
        (product(g, &z), table)
    };
    let assignment = Assignment::new(table, TailRule::PairRow { offset: n }).expect("offset equals table length");
    let mut next = CertifiedCondition::new(
        cond.inside.iter().cloned(),
        cond.outside.iter().cloned(),
        kernel_of_marking(&h, &assignment),
    )?;
    next.extended = true;
    match dm_check(&next.witness, m, budget) {
        DmOutcome::True => Ok(next),
        DmOutcome::False => Err(GameError::DensityFailed { m }),
        DmOutcome::Unknown => Err(GameError::BudgetExhausted { m }),
    }
}

/// Player I's refinement: `In ⊆ In′`, `Out ⊆ Out′`, certified by `witness`.
pub fn adversary_move(
    cond: &CertifiedCondition,
    inside: impl IntoIterator<Item = Word>,
    outside: impl IntoIterator<Item = Word>,
    witness: Option<MarkedGroup>,
) -> Result<CertifiedCondition, GameError> {
    let inside: BTreeSet<Word> = inside.into_iter().collect();
    let outside: BTreeSet<Word> = outside.into_iter().collect();
    if let Some(w) = cond.inside.difference(&inside).next() {
        return Err(GameError::NotNested(format!("{w} dropped from In")));
    }
    if let Some(w) = cond.outside.difference(&outside).next() {
        return Err(GameError::NotNested(format!("{w} dropped from Out")));
    }
    if let Some(w) = inside.intersection(&outside).next() {
        return Err(GameError::NotNested(format!("{w} is required both in and out")));
    }
    let keep = witness.is_none();
    let mut next = CertifiedCondition::new(inside, outside, witness.unwrap_or_else(|| cond.witness.clone()))?;
    next.extended = keep && cond.extended;
    Ok(next)
}

// ---------------------------------------------------------------------------
// Finite shadow of "L ∩ F_n = M"

#[derive(Clone)]
enum Walk {
    Element(u64),
    Vector(Vec<i64>),
}

struct Side<'a> {
    n: &'a MarkedGroup,
    gens: Vec<u64>,
    invs: Vec<u64>,
    e: u64,
}

impl<'a> Side<'a> {
    fn new(n: &'a MarkedGroup, rank: u64) -> Result<Side<'a>, OracleError> {
        match n.marking() {
            Some((oracle, assignment)) => {
                let gens: Vec<u64> = (0..rank).map(|i| assignment.get(i)).collect();
                let invs = gens.iter().map(|&g| oracle.inverse(g)).collect::<Result<_, _>>()?;
                Ok(Side {
                    n,
                    gens,
                    invs,
                    e: oracle.identity()?,
                })
            }
            None => Ok(Side {
                n,
                gens: Vec::new(),
                invs: Vec::new(),
                e: 0,
            }),
        }
    }

    fn start(&self, rank: u64) -> Walk {
        match self.n.marking() {
            Some(_) => Walk::Element(self.e),
            None => Walk::Vector(vec![0; rank as usize]),
        }
    }

    fn step(&self, at: &Walk, letter: u64) -> Walk {
        let (i, inverse) = ((letter / 2) as usize, letter % 2 == 1);
        match at {
            Walk::Element(v) => {
                let (oracle, _) = self.n.marking().expect("element walks come from markings");
                Walk::Element(oracle.mul(*v, if inverse { self.invs[i] } else { self.gens[i] }))
            }
            Walk::Vector(v) => {
                let mut v = v.clone();
                v[i] += if inverse { -1 } else { 1 };
                Walk::Vector(v)
            }
        }
    }

    fn is_member(&self, at: &Walk) -> bool {
        match (at, self.n.provenance()) {
            (Walk::Element(v), _) => *v == self.e,
            (Walk::Vector(v), Provenance::AbelianPreimage(l)) => l.contains_i64(v),
            (Walk::Vector(_), Provenance::Marking { .. }) => unreachable!("vector walks come from lattices"),
        }
    }
}

/// A reduced word over `x_0 .. x_{rank-1}` of length at most `max_len` on
/// which `a` and `b` disagree, if any.
pub fn shadow_disagreement(
    a: &MarkedGroup,
    b: &MarkedGroup,
    rank: u64,
    max_len: usize,
) -> Result<Option<Word>, OracleError> {
    let sa = Side::new(a, rank)?;
    let sb = Side::new(b, rank)?;
    let mut letters = Vec::new();
    Ok(shadow_dfs(
        &sa,
        &sb,
        &sa.start(rank),
        &sb.start(rank),
        &mut letters,
        rank,
        max_len,
    ))
}

fn shadow_dfs(
    sa: &Side,
    sb: &Side,
    wa: &Walk,
    wb: &Walk,
    letters: &mut Vec<u64>,
    rank: u64,
    max_len: usize,
) -> Option<Word> {
    if sa.is_member(wa) != sb.is_member(wb) {
        return Some(Word::from_letter_codes(letters));
    }
    if letters.len() == max_len {
        return None;
    }
    let last = letters.last().copied();
    for letter in 0..2 * rank {
        if last.is_some_and(|l| l ^ 1 == letter) {
            continue;
        }
        letters.push(letter);
        let found = shadow_dfs(
            sa,
            sb,
            &sa.step(wa, letter),
            &sb.step(wb, letter),
            letters,
            rank,
            max_len,
        );
        letters.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

// ---------------------------------------------------------------------------
// The game

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    I,
    II,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::II => "II",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TranscriptEntry {
    pub round: u64,
    pub player: Player,
    pub condition: CertifiedCondition,
    pub dm: Vec<(u64, DmOutcome)>,
}

impl fmt::Display for TranscriptEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dm: Vec<String> = self
            .dm
            .iter()
            .map(|(m, o)| {
                let tag = match o {
                    DmOutcome::True => "ok",
                    DmOutcome::False => "no",
                    DmOutcome::Unknown => "unknown",
                };
                format!("m={m}:{tag}")
            })
            .collect();
        write!(
            f,
            "ROUND {} | PLAYER {} | {} | DM: {} | WITNESS: {}",
            self.round,
            self.player,
            self.condition,
            dm.join(" "),
            self.condition.witness
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct GameTranscript {
    pub seed: u64,
    pub entries: Vec<TranscriptEntry>,
    /// Set when a step failed; the game stops there.
    pub error: Option<String>,
}

impl GameTranscript {
    pub fn last(&self) -> Option<&CertifiedCondition> {
        self.entries.last().map(|e| &e.condition)
    }

    /// In and Out only grow along the transcript.
    pub fn is_nested(&self) -> bool {
        self.entries.windows(2).all(|p| {
            p[0].condition.inside.is_subset(&p[1].condition.inside)
                && p[0].condition.outside.is_subset(&p[1].condition.outside)
        })
    }
}

impl fmt::Display for GameTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        if let Some(err) = &self.error {
            writeln!(f, "ERROR | {err}")?;
        }
        Ok(())
    }
}

fn entry(round: u64, player: Player, condition: CertifiedCondition, budget: u64) -> TranscriptEntry {
    let dm = (1..=round)
        .map(|m| (m, dm_check(&condition.witness, m, budget)))
        .collect();
    TranscriptEntry {
        round,
        player,
        condition,
        dm,
    }
}

/// Random reduced word over `x_0 .. x_{rank-1}` with 1 to `max_len` letters.
pub fn random_word(rng: &mut impl Rng, rank: u64, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let raw: Vec<(u64, i64)> = (0..len)
        .map(|_| (rng.gen_range(0..rank), if rng.gen_bool(0.5) { 1 } else { -1 }))
        .collect();
    Word::reduce(raw)
}

/// Player I's automated refinement: a relator `x_i x_j⁻¹` for two cohabiting
/// generators plus a couple of random words, all classified by the witness.
fn automated_refinement(cond: &CertifiedCondition, rng: &mut ChaCha8Rng) -> Result<CertifiedCondition, GameError> {
    let window = cond.support() + 4;
    let mut inside = cond.inside.clone();
    let mut outside = cond.outside.clone();
    let mut first: HashMap<crate::marked::CosetKey, u64> = HashMap::new();
    let mut cohabiting = Vec::new();
    for j in 0..window {
        let key = cond.witness.generator_key(j)?;
        match first.get(&key) {
            Some(&i) => cohabiting.push((i, j)),
            None => {
                first.insert(key, j);
            }
        }
    }
    if !cohabiting.is_empty() {
        let (i, j) = cohabiting[rng.gen_range(0..cohabiting.len())];
        inside.insert(Word::reduce([(i, 1), (j, -1)]));
    }
    for _ in 0..2 {
        let w = random_word(rng, window, 3);
        if w.is_identity() {
            continue;
        }
        if cond.witness.try_contains(&w)? {
            inside.insert(w);
        } else {
            outside.insert(w);
        }
    }
    adversary_move(cond, inside, outside, None)
}

/// Player I opens with `initial`; Player II answers round `k` with a
/// density step for `m = k`; from round 2 Player I refines at random.
pub fn play_strategy(initial: &CertifiedCondition, rounds: u64, budget: u64, seed: u64) -> GameTranscript {
    assert!(rounds >= 1, "play_strategy needs at least one round");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transcript = GameTranscript {
        seed,
        ..GameTranscript::default()
    };
    let mut current = initial.clone();
    for round in 1..=rounds {
        if round > 1 {
            match automated_refinement(&current, &mut rng) {
                Ok(next) => current = next,
                Err(e) => {
                    transcript.error = Some(format!("round {round} player I: {e}"));
                    return transcript;
                }
            }
        }
        transcript
            .entries
            .push(entry(round, Player::I, current.clone(), budget));
        match density_step(&current, round, budget) {
            Ok(next) => current = next,
            Err(e) => {
                transcript.error = Some(format!("round {round} player II: {e}"));
                return transcript;
            }
        }
        transcript
            .entries
            .push(entry(round, Player::II, current.clone(), budget));
    }
    transcript
}

fn two_generator_relator(w: &Word) -> bool {
    matches!(w.syllables(), [a, b] if a.exp == 1 && b.exp == -1 && a.index != b.index)
}

/// A refinement forcing two generators into one coset, which no marked group
/// of the form `Φ(G)` allows.
pub fn nowhere_dense_phi_demo(cond: &CertifiedCondition, budget: u64) -> Result<CertifiedCondition, GameError> {
    if cond.inside.iter().any(two_generator_relator) {
        return Ok(cond.clone());
    }
    let stepped = density_step(cond, 2, budget)?;
    let n = cond.support();
    let mut first: HashMap<crate::marked::CosetKey, u64> = HashMap::new();
    for j in n..n.saturating_add(budget) {
        let key = stepped.witness.generator_key(j)?;
        if let Some(&i) = first.get(&key) {
            let mut inside = stepped.inside.clone();
            inside.insert(Word::reduce([(i, 1), (j, -1)]));
            let mut next = CertifiedCondition::new(inside, stepped.outside.clone(), stepped.witness.clone())?;
            next.extended = true;
            return Ok(next);
        }
        first.insert(key, j);
    }
    Err(GameError::BudgetExhausted { m: 2 })
}

/// A certified condition on generators `x_0, x_1, x_2` with a witness drawn
/// from the catalog and a small random marking.
pub fn random_condition(rng: &mut impl Rng) -> CertifiedCondition {
    let group = named(CATALOG[rng.gen_range(0..CATALOG.len())]).expect("catalog entries parse");
    let len = rng.gen_range(1..=3u64);
    let table: Vec<u64> = (0..len).map(|_| rng.gen_range(0..5)).collect();
    let tail = match rng.gen_range(0..4) {
        0 => TailRule::Constant(rng.gen_range(0..5)),
        1 => TailRule::PairRow { offset: len },
        2 => TailRule::Enumeration {
            multiplicity: rng.gen_range(1..3),
            offset: len,
        },
        _ => TailRule::Cycle,
    };
    let witness = kernel_of_marking(&group, &Assignment::new(table, tail).expect("valid tail"));
    let mut inside = BTreeSet::new();
    let mut outside = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=4) {
        let w = random_word(rng, 3, 4);
        if witness.contains(&w) {
            inside.insert(w);
        } else {
            outside.insert(w);
        }
    }
    CertifiedCondition::new(inside, outside, witness).expect("classified by the witness")
}

// ---------------------------------------------------------------------------
// Interactive play

/// Line-oriented game session; the caller owns input and output.
pub struct Repl {
    state: CertifiedCondition,
    staged_in: BTreeSet<Word>,
    staged_out: BTreeSet<Word>,
    staged_witness: Option<MarkedGroup>,
    round: u64,
    budget: u64,
    transcript: GameTranscript,
}

pub struct ReplReply {
    pub output: String,
    pub quit: bool,
}

impl ReplReply {
    fn say(output: impl Into<String>) -> ReplReply {
        ReplReply {
            output: output.into(),
            quit: false,
        }
    }
}

pub const REPL_HELP: &str = "commands: in <word> | out <word> | witness <group> <assignment> | pass | status | quit";

impl Repl {
    pub fn new(initial: CertifiedCondition, budget: u64) -> Repl {
        Repl {
            state: initial,
            staged_in: BTreeSet::new(),
            staged_out: BTreeSet::new(),
            staged_witness: None,
            round: 0,
            budget,
            transcript: GameTranscript::default(),
        }
    }

    pub fn state(&self) -> &CertifiedCondition {
        &self.state
    }

    pub fn transcript(&self) -> &GameTranscript {
        &self.transcript
    }

    pub fn handle_line(&mut self, line: &str) -> ReplReply {
        let line = line.trim();
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match cmd {
            "" => ReplReply::say(""),
            "in" | "out" => match rest.parse::<Word>() {
                Ok(w) => {
                    let reply = format!("staged {cmd} {w}");
                    if cmd == "in" {
                        self.staged_in.insert(w);
                    } else {
                        self.staged_out.insert(w);
                    }
                    ReplReply::say(reply)
                }
                Err(e) => ReplReply::say(format!("error: {e}")),
            },
            "witness" => {
                let Some((group, assignment)) = rest.split_once(char::is_whitespace) else {
                    return ReplReply::say("error: usage: witness <group> <assignment>");
                };
                match witness_from_spec(group, assignment.trim()) {
                    Ok(n) => {
                        let reply = format!("staged witness {n}");
                        self.staged_witness = Some(n);
                        ReplReply::say(reply)
                    }
                    Err(e) => ReplReply::say(format!("error: {e}")),
                }
            }
            "pass" => self.pass(),
            "status" => ReplReply::say(self.status()),
            "quit" | "exit" => ReplReply {
                output: String::new(),
                quit: true,
            },
            "help" => ReplReply::say(REPL_HELP),
            other => ReplReply::say(format!("error: unknown command `{other}`; {REPL_HELP}")),
        }
    }

    fn pass(&mut self) -> ReplReply {
        let inside: BTreeSet<Word> = self.state.inside.union(&self.staged_in).cloned().collect();
        let outside: BTreeSet<Word> = self.state.outside.union(&self.staged_out).cloned().collect();
        let witness = self.staged_witness.take();
        self.staged_in.clear();
        self.staged_out.clear();
        let moved = match adversary_move(&self.state, inside, outside, witness) {
            Ok(c) => c,
            Err(e) => return ReplReply::say(format!("rejected: {e}")),
        };
        let round = self.round + 1;
        let answer = match density_step(&moved, round, self.budget) {
            Ok(c) => c,
            Err(e) => return ReplReply::say(format!("rejected: {e}")),
        };
        self.round = round;
        let mine = entry(round, Player::I, moved, self.budget);
        let theirs = entry(round, Player::II, answer.clone(), self.budget);
        let output = format!("{mine}\n{theirs}");
        self.transcript.entries.push(mine);
        self.transcript.entries.push(theirs);
        self.state = answer;
        ReplReply::say(output)
    }

    fn status(&self) -> String {
        let dm: Vec<String> = (1..=self.round)
            .map(|m| format!("m={m}:{}", dm_check(&self.state.witness, m, self.budget)))
            .collect();
        format!(
            "round {} | {} | DM: {} | WITNESS: {}",
            self.round,
            self.state,
            dm.join(" "),
            self.state.witness
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::{sigma_kernel, unique_generator_check, DEFAULT_DM_BUDGET};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn order_two() -> CertifiedCondition {
        let g = named("Prod(Cyclic(2),Z)").unwrap();
        certify([w("x0^2")], [w("x0")], &g, &"1,2;const(0)".parse().unwrap()).unwrap()
    }

    fn vacuous_sigma() -> CertifiedCondition {
        CertifiedCondition::vacuous(sigma_kernel(&named("Z").unwrap()))
    }

    #[test]
    fn certify_examples() {
        order_two();
        let g = named("Z").unwrap();
        assert!(certify([Word::identity()], [], &g, &Assignment::identity()).is_ok());
        assert_eq!(
            certify([w("x0")], [w("x0")], &g, &Assignment::identity()).unwrap_err(),
            GameError::CertificateFailed(w("x0"))
        );
        assert_eq!(
            certify([w("x1")], [], &g, &Assignment::identity()).unwrap_err(),
            GameError::CertificateFailed(w("x1"))
        );
    }

    #[test]
    fn density_step_examples() {
        let cond = order_two();
        let next = density_step(&cond, 2, DEFAULT_DM_BUDGET).unwrap();
        let (h, _) = next.witness().marking().unwrap();
        assert_eq!(h.name(), "Prod(Prod(Cyclic(2),Z),Z)");
        assert!(next.witness().contains(&w("x0^2")));
        assert!(!next.witness().contains(&w("x0")));
        assert_eq!(dm_check(next.witness(), 2, DEFAULT_DM_BUDGET), DmOutcome::True);

        let vac = density_step(&vacuous_sigma(), 3, DEFAULT_DM_BUDGET).unwrap();
        assert!(vac.inside().is_empty() && vac.outside().is_empty());
        assert_eq!(dm_check(vac.witness(), 3, DEFAULT_DM_BUDGET), DmOutcome::True);
    }

    #[test]
    fn density_steps_nest_and_keep_the_shadow() {
        let start = order_two();
        let mut cond = start.clone();
        for m in 1..=4 {
            let next = density_step(&cond, m, DEFAULT_DM_BUDGET).unwrap();
            assert_eq!(next.inside(), start.inside());
            assert_eq!(next.outside(), start.outside());
            let n = cond.support();
            assert_eq!(shadow_disagreement(cond.witness(), next.witness(), n, 6).unwrap(), None);
            cond = next;
        }
    }

    #[test]
    fn shadow_detects_differences() {
        let z = named("Z").unwrap();
        let a = kernel_of_marking(&z, &Assignment::identity());
        let b = kernel_of_marking(&z, &"1,1;pair-row(2)".parse().unwrap());
        let found = shadow_disagreement(&a, &b, 2, 3).unwrap().unwrap();
        assert_ne!(a.contains(&found), b.contains(&found));
        assert_eq!(shadow_disagreement(&a, &a, 2, 6).unwrap(), None);
        let psi = crate::abelian::psi_preimage_marked(&crate::abelian::Lattice::from_i64(2, &[vec![1, 1]]));
        let phi_z = kernel_of_marking(&z, &Assignment::identity());
        // x0 x1 lies in both, x0 only in Φ(Z)
        assert_eq!(shadow_disagreement(&psi, &phi_z, 2, 1).unwrap(), Some(w("x0")));
    }

    #[test]
    fn adversary_examples() {
        let cond = order_two();
        let g = named("QmodZ_sum").unwrap();
        let of_order = |k: u64| (0..).find(|&c| g.element_order(c, 10).unwrap() == Some(k)).unwrap();
        let (half, third) = (of_order(2), of_order(3));
        let wit = kernel_of_marking(&g, &Assignment::new(vec![half, third], TailRule::Constant(0)).unwrap());
        let inside: Vec<Word> = cond.inside().iter().cloned().chain([w("x1^3")]).collect();
        let out: Vec<Word> = cond.outside().iter().cloned().collect();
        let moved = adversary_move(&cond, inside.clone(), out.clone(), Some(wit)).unwrap();
        assert!(moved.inside().contains(&w("x1^3")));
        // the old witness sends x1 to an element of infinite order
        assert!(matches!(
            adversary_move(&cond, inside, out, None),
            Err(GameError::CertificateFailed(_))
        ));

        let same = adversary_move(&cond, cond.inside().clone(), cond.outside().clone(), None).unwrap();
        assert_eq!(same, cond);

        let bad = adversary_move(&cond, cond.inside().clone(), [w("x0"), w("x0^2")], None);
        assert!(matches!(bad, Err(GameError::NotNested(_))));
        assert!(matches!(
            adversary_move(&cond, [], [w("x0")], None),
            Err(GameError::NotNested(_))
        ));
    }

    #[test]
    fn strategy_runs() {
        let t = play_strategy(&vacuous_sigma(), 4, DEFAULT_DM_BUDGET, 7);
        assert!(t.error.is_none(), "{t}");
        assert!(t.is_nested());
        assert_eq!(t.entries.len(), 8);
        let last = t.last().unwrap();
        for m in 1..=4 {
            assert_eq!(dm_check(last.witness(), m, DEFAULT_DM_BUDGET), DmOutcome::True);
        }
        assert_eq!(
            t.to_string(),
            play_strategy(&vacuous_sigma(), 4, DEFAULT_DM_BUDGET, 7).to_string()
        );
        let one = play_strategy(&order_two(), 1, DEFAULT_DM_BUDGET, 0);
        let direct = density_step(&order_two(), 1, DEFAULT_DM_BUDGET).unwrap();
        assert_eq!(one.last().unwrap(), &direct);
        assert!(t
            .to_string()
            .starts_with("ROUND 1 | PLAYER I | IN:{} OUT:{} | DM: m=1:ok | WITNESS: Z "));
    }

    #[test]
    fn phi_demo() {
        let out = nowhere_dense_phi_demo(&vacuous_sigma(), DEFAULT_DM_BUDGET).unwrap();
        let rel = out.inside().iter().find(|w| two_generator_relator(w)).unwrap().clone();
        let j = rel.max_index().unwrap();
        assert!(!unique_generator_check(out.witness(), j + 1));
        assert_eq!(dm_check(out.witness(), 2, DEFAULT_DM_BUDGET), DmOutcome::True);

        let z = named("Z").unwrap();
        let has = certify([w("x0*x1^-1")], [], &z, &"0,0;pair-row(2)".parse().unwrap()).unwrap();
        assert_eq!(nowhere_dense_phi_demo(&has, 100).unwrap(), has);
    }

    #[test]
    fn repl_script() {
        let mut r = Repl::new(vacuous_sigma(), DEFAULT_DM_BUDGET);
        assert!(!r.handle_line("in x0^2").quit);
        r.handle_line("out x0");
        r.handle_line("witness Prod(Cyclic(2),Z) 1,2;const(0)");
        let reply = r.handle_line("pass");
        assert!(reply.output.contains("PLAYER II"), "{}", reply.output);
        assert_eq!(r.state(), &density_step(&order_two(), 1, DEFAULT_DM_BUDGET).unwrap());
        let before = r.state().clone();
        r.handle_line("in x0");
        let rejected = r.handle_line("pass");
        assert!(rejected.output.starts_with("rejected"), "{}", rejected.output);
        assert_eq!(r.state(), &before);
        assert!(r.handle_line("bogus").output.starts_with("error"));
        assert!(r.handle_line("status").output.contains("DM: m=1:true"));
        assert!(r.handle_line("quit").quit);
        assert_eq!(r.transcript().entries.len(), 2);

        let mut empty = Repl::new(vacuous_sigma(), 10);
        assert!(empty.handle_line("quit").quit);
        assert_eq!(empty.transcript().to_string(), "");
    }

    #[test]
    fn random_conditions_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let c = random_condition(&mut rng);
            assert!(c.holds_for(c.witness()));
            assert!(c.support() <= 3);
        }
    }
}
