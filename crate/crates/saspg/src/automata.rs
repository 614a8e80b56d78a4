//! Deterministic ω-automata with one or two parity conditions, their text
//! format, and lasso-based acceptance of ultimately periodic words and runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type StateId = usize;
pub type LetterId = usize;

/// Deterministic complete automaton with two priority functions; a word is
/// accepted when its run satisfies both parity conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D2pw {
    pub alphabet: Vec<String>,
    pub initial: StateId,
    /// `delta[state][letter]`, total by construction.
    pub delta: Vec<Vec<StateId>>,
    pub omega1: Vec<u32>,
    pub omega2: Vec<u32>,
}

/// Deterministic complete parity automaton (single priority function).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dpw {
    pub alphabet: Vec<String>,
    pub initial: StateId,
    pub delta: Vec<Vec<StateId>>,
    pub omega: Vec<u32>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("state {state}: {msg}")]
    Semantic { state: u64, msg: String },
    #[error("no initial state declared")]
    NoInitial,
    #[error("empty automaton")]
    Empty,
    #[error("illegal run at position {0}")]
    IllegalRun(usize),
}

impl D2pw {
    pub fn n(&self) -> usize {
        self.delta.len()
    }

    pub fn validate(&self) -> Result<(), AutomatonError> {
        validate_parts(self.initial, &self.delta, self.alphabet.len(), self.omega1.len())?;
        if self.omega2.len() != self.n() {
            return Err(AutomatonError::Semantic { state: 0, msg: "priority vector length mismatch".into() });
        }
        Ok(())
    }

    /// Complement each condition by shifting priorities up by one.
    pub fn complement_both(&self) -> D2pw {
        D2pw {
            alphabet: self.alphabet.clone(),
            initial: self.initial,
            delta: self.delta.clone(),
            omega1: self.omega1.iter().map(|p| p + 1).collect(),
            omega2: self.omega2.iter().map(|p| p + 1).collect(),
        }
    }
}

impl Dpw {
    pub fn n(&self) -> usize {
        self.delta.len()
    }

    pub fn validate(&self) -> Result<(), AutomatonError> {
        validate_parts(self.initial, &self.delta, self.alphabet.len(), self.omega.len())
    }

    pub fn complement(&self) -> Dpw {
        Dpw {
            alphabet: self.alphabet.clone(),
            initial: self.initial,
            delta: self.delta.clone(),
            omega: self.omega.iter().map(|p| p + 1).collect(),
        }
    }
}

fn validate_parts(
    initial: StateId,
    delta: &[Vec<StateId>],
    letters: usize,
    omega_len: usize,
) -> Result<(), AutomatonError> {
    let n = delta.len();
    if n == 0 {
        return Err(AutomatonError::Empty);
    }
    if initial >= n {
        return Err(AutomatonError::NoInitial);
    }
    if omega_len != n {
        return Err(AutomatonError::Semantic { state: 0, msg: "priority vector length mismatch".into() });
    }
    for (q, row) in delta.iter().enumerate() {
        if row.len() != letters {
            return Err(AutomatonError::Semantic { state: q as u64, msg: "transition row incomplete".into() });
        }
        for &t in row {
            if t >= n {
                return Err(AutomatonError::Semantic { state: q as u64, msg: format!("dangling target {t}") });
            }
        }
    }
    Ok(())
}

/// Checks that `stem` followed by `cycle` repeated is a legal run: it starts
/// in the initial state, every step is realized by some letter, and the cycle
/// closes. Returns the position of the first violation.
fn check_run(
    initial: StateId,
    delta: &[Vec<StateId>],
    stem: &[StateId],
    cycle: &[StateId],
) -> Result<(), AutomatonError> {
    if cycle.is_empty() {
        return Err(AutomatonError::IllegalRun(stem.len()));
    }
    let seq: Vec<StateId> = stem.iter().chain(cycle).copied().collect();
    if seq[0] != initial {
        return Err(AutomatonError::IllegalRun(0));
    }
    let step_exists = |from: StateId, to: StateId| delta[from].iter().any(|&t| t == to);
    for (i, pair) in seq.windows(2).enumerate() {
        if !step_exists(pair[0], pair[1]) {
            return Err(AutomatonError::IllegalRun(i + 1));
        }
    }
    if !step_exists(seq[seq.len() - 1], cycle[0]) {
        return Err(AutomatonError::IllegalRun(seq.len()));
    }
    Ok(())
}

/// Acceptance of the ultimately periodic run `stem · cycle^ω` by a D2PW: the
/// maximal priority on the cycle must be even for both conditions.
pub fn lasso_accepts_d2pw(a: &D2pw, stem: &[StateId], cycle: &[StateId]) -> Result<bool, AutomatonError> {
    check_run(a.initial, &a.delta, stem, cycle)?;
    let m1 = cycle.iter().map(|&q| a.omega1[q]).max().expect("nonempty cycle");
    let m2 = cycle.iter().map(|&q| a.omega2[q]).max().expect("nonempty cycle");
    Ok(m1 % 2 == 0 && m2 % 2 == 0)
}

/// Acceptance of the ultimately periodic run `stem · cycle^ω` by a DPW.
pub fn lasso_accepts_dpw(a: &Dpw, stem: &[StateId], cycle: &[StateId]) -> Result<bool, AutomatonError> {
    check_run(a.initial, &a.delta, stem, cycle)?;
    let m = cycle.iter().map(|&q| a.omega[q]).max().expect("nonempty cycle");
    Ok(m % 2 == 0)
}

/// Acceptance of a game-play lasso under one priority function: the maximal
/// priority on the cycle is even.
pub fn lasso_play_accepts(omega: &[u32], cycle: &[usize]) -> bool {
    cycle.iter().map(|&v| omega[v]).max().is_some_and(|m| m % 2 == 0)
}

/// Runs an automaton on a finite word, returning the visited states
/// (including the initial one).
pub fn run_word(delta: &[Vec<StateId>], initial: StateId, word: &[LetterId]) -> Vec<StateId> {
    let mut states = vec![initial];
    let mut q = initial;
    for &a in word {
        q = delta[q][a];
        states.push(q);
    }
    states
}

/// Acceptance of the ultimately periodic word `stem · cycle^ω` by a D2PW.
/// The run's cycle is found by running the word until the (state, cycle
/// position) pair repeats.
pub fn word_accepted_d2pw(a: &D2pw, stem: &[LetterId], cycle: &[LetterId]) -> bool {
    let (m1, m2) = word_cycle_priorities(&a.delta, a.initial, &[&a.omega1, &a.omega2], stem, cycle);
    m1 % 2 == 0 && m2 % 2 == 0
}

/// Acceptance of the ultimately periodic word `stem · cycle^ω` by a DPW.
pub fn word_accepted_dpw(a: &Dpw, stem: &[LetterId], cycle: &[LetterId]) -> bool {
    let (m, _) = word_cycle_priorities(&a.delta, a.initial, &[&a.omega, &a.omega], stem, cycle);
    m % 2 == 0
}

/// Maximal priorities seen infinitely often on the run of `stem · cycle^ω`.
fn word_cycle_priorities(
    delta: &[Vec<StateId>],
    initial: StateId,
    omegas: &[&[u32]; 2],
    stem: &[LetterId],
    cycle: &[LetterId],
) -> (u32, u32) {
    assert!(!cycle.is_empty(), "cycle must be nonempty");
    let mut q = initial;
    for &a in stem {
        q = delta[q][a];
    }
    // After the stem, iterate the cycle until the entry state repeats; at
    // most |Q| iterations by determinism.
    let entry = q;
    let mut seen = vec![q];
    loop {
        for &a in cycle {
            q = delta[q][a];
        }
        if q == entry || seen.contains(&q) {
            break;
        }
        seen.push(q);
    }
    // `q` now lies on the periodic part; collect one full period.
    let loop_start = q;
    let mut m1 = 0;
    let mut m2 = 0;
    loop {
        for &a in cycle {
            m1 = m1.max(omegas[0][q]);
            m2 = m2.max(omegas[1][q]);
            q = delta[q][a];
        }
        if q == loop_start {
            break;
        }
    }
    m1 = m1.max(omegas[0][q]);
    m2 = m2.max(omegas[1][q]);
    (m1, m2)
}

fn parse_lines(
    text: &str,
    two_priorities: bool,
) -> Result<(Vec<(u64, bool, u32, u32, Vec<(String, u64)>)>, Vec<String>), AutomatonError> {
    let syntax = |line: usize, msg: String| AutomatonError::Syntax { line, msg };
    // state decl rows: (id, init, p1, p2, transitions)
    let mut rows: BTreeMap<u64, (bool, u32, u32, Vec<(String, u64)>)> = BTreeMap::new();
    let mut letters: Vec<String> = Vec::new();
    for (idx, full_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match full_line.split_once('#') {
            Some((before, _)) => before,
            None => full_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| syntax(lineno, "missing terminating `;`".into()))?
            .trim();
        let mut toks = stmt.split_whitespace().peekable();
        if toks.next() != Some("state") {
            return Err(syntax(lineno, "expected `state` declaration".into()));
        }
        let id: u64 = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| syntax(lineno, "invalid state id".into()))?;
        let init = toks.peek() == Some(&"init") && {
            toks.next();
            true
        };
        let mut p1 = None;
        let mut p2 = None;
        let mut letter = None;
        let mut target = None;
        while let Some(tok) = toks.next() {
            if tok == "on" {
                letter = Some(
                    toks.next()
                        .ok_or_else(|| syntax(lineno, "missing letter after `on`".into()))?
                        .to_string(),
                );
                if toks.next() != Some("->") {
                    return Err(syntax(lineno, "expected `->` after letter".into()));
                }
                target = Some(
                    toks.next()
                        .and_then(|t| t.parse::<u64>().ok())
                        .ok_or_else(|| syntax(lineno, "invalid transition target".into()))?,
                );
            } else if let Some((key, value)) = tok.split_once('=') {
                let parsed: u32 =
                    value.parse().map_err(|_| syntax(lineno, format!("invalid priority `{value}`")))?;
                match (key, two_priorities) {
                    ("p1", true) => p1 = Some(parsed),
                    ("p2", true) => p2 = Some(parsed),
                    ("p", false) => {
                        p1 = Some(parsed);
                        p2 = Some(parsed);
                    }
                    _ => return Err(syntax(lineno, format!("unknown key `{key}`"))),
                }
            } else {
                return Err(syntax(lineno, format!("unexpected token `{tok}`")));
            }
        }
        let (p1, p2) = match (p1, p2) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(syntax(lineno, "missing priority declaration".into())),
        };
        let (letter, target) = match (letter, target) {
            (Some(l), Some(t)) => (l, t),
            _ => return Err(syntax(lineno, "missing transition (`on <letter> -> <id>`)".into())),
        };
        if !letters.contains(&letter) {
            letters.push(letter.clone());
        }
        let entry = rows.entry(id).or_insert_with(|| (init, p1, p2, Vec::new()));
        entry.0 |= init;
        if entry.1 != p1 || entry.2 != p2 {
            return Err(AutomatonError::Semantic { state: id, msg: "inconsistent priorities across lines".into() });
        }
        if entry.3.iter().any(|(l, _)| *l == letter) {
            return Err(AutomatonError::Semantic { state: id, msg: format!("duplicate transition on `{letter}`") });
        }
        entry.3.push((letter, target));
    }
    if rows.is_empty() {
        return Err(AutomatonError::Empty);
    }
    letters.sort_unstable();
    let list = rows.into_iter().map(|(id, (init, p1, p2, tr))| (id, init, p1, p2, tr)).collect();
    Ok((list, letters))
}

fn assemble(
    rows: Vec<(u64, bool, u32, u32, Vec<(String, u64)>)>,
    letters: Vec<String>,
) -> Result<(Vec<Vec<StateId>>, Vec<u32>, Vec<u32>, StateId, Vec<String>), AutomatonError> {
    let dense: BTreeMap<u64, StateId> = rows.iter().enumerate().map(|(i, r)| (r.0, i)).collect();
    let mut delta = vec![vec![usize::MAX; letters.len()]; rows.len()];
    let mut omega1 = Vec::with_capacity(rows.len());
    let mut omega2 = Vec::with_capacity(rows.len());
    let mut initial = None;
    for (i, (id, init, p1, p2, transitions)) in rows.iter().enumerate() {
        if *init {
            if initial.is_some() {
                return Err(AutomatonError::Semantic { state: *id, msg: "multiple initial states".into() });
            }
            initial = Some(i);
        }
        omega1.push(*p1);
        omega2.push(*p2);
        for (letter, target) in transitions {
            let li = letters.binary_search(letter).expect("letter registered");
            let ti = *dense
                .get(target)
                .ok_or(AutomatonError::Semantic { state: *id, msg: format!("dangling target {target}") })?;
            delta[i][li] = ti;
        }
    }
    for (i, row) in delta.iter().enumerate() {
        if let Some(li) = row.iter().position(|&t| t == usize::MAX) {
            return Err(AutomatonError::Semantic {
                state: rows[i].0,
                msg: format!("missing transition on `{}`", letters[li]),
            });
        }
    }
    Ok((delta, omega1, omega2, initial.ok_or(AutomatonError::NoInitial)?, letters))
}

/// Parses the `.d2pw` format: `state <id> [init] p1=<nat> p2=<nat> on <letter> -> <id>;`
/// with one transition per line and `#` comments.
pub fn parse_d2pw(text: &str) -> Result<D2pw, AutomatonError> {
    let (rows, letters) = parse_lines(text, true)?;
    let (delta, omega1, omega2, initial, alphabet) = assemble(rows, letters)?;
    let a = D2pw { alphabet, initial, delta, omega1, omega2 };
    a.validate()?;
    Ok(a)
}

/// Parses the single-priority variant: `state <id> [init] p=<nat> on <letter> -> <id>;`.
pub fn parse_dpw(text: &str) -> Result<Dpw, AutomatonError> {
    let (rows, letters) = parse_lines(text, false)?;
    let (delta, omega, _, initial, alphabet) = assemble(rows, letters)?;
    let a = Dpw { alphabet, initial, delta, omega };
    a.validate()?;
    Ok(a)
}

pub fn serialize_d2pw(a: &D2pw) -> String {
    let mut out = String::new();
    for q in 0..a.n() {
        let init = if q == a.initial { " init" } else { "" };
        for (li, letter) in a.alphabet.iter().enumerate() {
            let _ = writeln!(
                out,
                "state {q}{init} p1={} p2={} on {letter} -> {};",
                a.omega1[q], a.omega2[q], a.delta[q][li]
            );
        }
    }
    out
}

pub fn serialize_dpw(a: &Dpw) -> String {
    let mut out = String::new();
    for q in 0..a.n() {
        let init = if q == a.initial { " init" } else { "" };
        for (li, letter) in a.alphabet.iter().enumerate() {
            let _ = writeln!(out, "state {q}{init} p={} on {letter} -> {};", a.omega[q], a.delta[q][li]);
        }
    }
    out
}

/// The running example automaton: states `q0..q3` over `{a, b}` with
/// `Ω1 = (0,0,2,1)`, `Ω2 = (5,3,1,6)`.
pub fn worked_example_d2pw() -> D2pw {
    D2pw {
        alphabet: vec!["a".into(), "b".into()],
        initial: 0,
        delta: vec![vec![1, 1], vec![2, 2], vec![0, 3], vec![2, 2]],
        omega1: vec![0, 0, 2, 1],
        omega2: vec![5, 3, 1, 6],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_semantics() {
        let a = worked_example_d2pw();
        // Cycle q0 -> q1 -> q2 -> q0: Ω1 max 2 even, Ω2 max 5 odd.
        assert_eq!(lasso_accepts_d2pw(&a, &[], &[0, 1, 2]).unwrap(), false);
        // Illegal run: q0 -> q2 is not a transition.
        assert!(matches!(lasso_accepts_d2pw(&a, &[], &[0, 2]), Err(AutomatonError::IllegalRun(1))));
    }

    #[test]
    fn dpw_lasso_max_even() {
        let a = Dpw {
            alphabet: vec!["a".into()],
            initial: 0,
            delta: vec![vec![1], vec![0]],
            omega: vec![1, 2],
        };
        assert!(lasso_accepts_dpw(&a, &[], &[0, 1]).unwrap());
        let odd = Dpw { omega: vec![3, 3], ..a };
        assert!(!lasso_accepts_dpw(&odd, &[], &[0, 1]).unwrap());
    }

    #[test]
    fn d2pw_text_round_trip() {
        let a = worked_example_d2pw();
        let text = serialize_d2pw(&a);
        let b = parse_d2pw(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(serialize_d2pw(&b), text);
    }

    #[test]
    fn parse_reports_missing_transition() {
        let text = "state 0 init p1=0 p2=0 on a -> 1;\nstate 1 p1=0 p2=0 on a -> 0;\nstate 1 p1=0 p2=0 on b -> 0;\n";
        match parse_d2pw(text) {
            Err(AutomatonError::Semantic { state: 0, msg }) => assert!(msg.contains("`b`")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn word_acceptance_follows_run_cycle() {
        let a = worked_example_d2pw();
        // (ab)^ω settles into the q2/q3 alternation after two rounds:
        // Ω1 max 2, Ω2 max 6, accepted.
        assert!(word_accepted_d2pw(&a, &[], &[0, 1]));
        // (aa)^ω loops q1 -> q2 -> q0 -> q1 with Ω2 max 5: rejected.
        assert!(!word_accepted_d2pw(&a, &[], &[0, 0]));
        // a(b b)^ω: q0 -a-> q1, then b: q2, b: q3, b: q2 ... cycle {q2,q3}:
        // Ω1 max 2?  q3 has Ω1 = 1... max(2,1) = 2 even; Ω2 max = 6 even.
        assert!(word_accepted_d2pw(&a, &[0], &[1, 1]));
    }
}
