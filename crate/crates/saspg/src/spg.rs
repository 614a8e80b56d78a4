//! The `.spg` text format for stochastic parity games and the JSON wire form.
//!
//! One declaration per line:
//!
//! ```text
//! spg 1;
//! # Player-1 vertex with priorities (1,0) and successors 1 and 3.
//! vertex 0 owner=p1 p1=1 p2=0 succ=1,3;
//! vertex 1 owner=rand p1=1 p2=0 succ=0:1/2,2:1/2;
//! ```
//!
//! Probability annotations are mandatory exactly on `rand` vertices. Ids may
//! be arbitrary naturals; they are normalized to dense `0..n` on load in
//! increasing order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameBuilder, GameError, Owner, Prob, StochasticGame, VertexId};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpgError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("vertex {vertex}: {msg}")]
    Semantic { vertex: u64, msg: String },
    #[error("missing `spg 1;` header")]
    MissingHeader,
    #[error("duplicate declaration of vertex {0}")]
    DuplicateVertex(u64),
    #[error("empty game")]
    Empty,
}

struct RawVertex {
    id: u64,
    owner: Owner,
    prio1: u32,
    prio2: u32,
    succ: Vec<(u64, Option<Prob>)>,
}

fn syntax(line: usize, msg: impl Into<String>) -> SpgError {
    SpgError::Syntax { line, msg: msg.into() }
}

fn parse_nat<T: FromStr>(line: usize, tok: &str, what: &str) -> Result<T, SpgError> {
    tok.parse().map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

/// Parses a `.spg` document into a validated game.
pub fn parse_game(text: &str) -> Result<StochasticGame, SpgError> {
    let mut header_seen = false;
    let mut raw: Vec<RawVertex> = Vec::new();
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
            .ok_or_else(|| syntax(lineno, "missing terminating `;`"))?
            .trim();
        if !header_seen {
            if stmt == "spg 1" {
                header_seen = true;
                continue;
            }
            return Err(SpgError::MissingHeader);
        }
        let mut tokens = stmt.split_whitespace();
        match tokens.next() {
            Some("vertex") => {}
            Some(other) => return Err(syntax(lineno, format!("unknown declaration `{other}`"))),
            None => continue,
        }
        let id: u64 = parse_nat(lineno, tokens.next().ok_or_else(|| syntax(lineno, "missing vertex id"))?, "vertex id")?;
        let mut owner = None;
        let mut prio1 = None;
        let mut prio2 = None;
        let mut succ = None;
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| syntax(lineno, format!("expected key=value, found `{tok}`")))?;
            match key {
                "owner" => {
                    owner = Some(match value {
                        "p1" => Owner::P1,
                        "p2" => Owner::P2,
                        "rand" => Owner::Random,
                        _ => return Err(syntax(lineno, format!("unknown owner `{value}`"))),
                    })
                }
                "p1" => prio1 = Some(parse_nat(lineno, value, "priority")?),
                "p2" => prio2 = Some(parse_nat(lineno, value, "priority")?),
                "succ" => {
                    let mut list = Vec::new();
                    for part in value.split(',') {
                        if part.is_empty() {
                            return Err(syntax(lineno, "empty successor entry"));
                        }
                        match part.split_once(':') {
                            None => list.push((parse_nat(lineno, part, "successor id")?, None)),
                            Some((target, frac)) => {
                                let (num, den) = frac
                                    .split_once('/')
                                    .ok_or_else(|| syntax(lineno, format!("expected num/den probability, found `{frac}`")))?;
                                let num = BigInt::from_str(num)
                                    .map_err(|_| syntax(lineno, format!("invalid numerator `{num}`")))?;
                                let den = BigInt::from_str(den)
                                    .map_err(|_| syntax(lineno, format!("invalid denominator `{den}`")))?;
                                list.push((
                                    parse_nat(lineno, target, "successor id")?,
                                    Some(BigRational::new(num, den)),
                                ));
                            }
                        }
                    }
                    succ = Some(list);
                }
                _ => return Err(syntax(lineno, format!("unknown key `{key}`"))),
            }
        }
        let owner = owner.ok_or(SpgError::Semantic { vertex: id, msg: "missing owner".into() })?;
        let succ = succ.ok_or(SpgError::Semantic { vertex: id, msg: "missing successors".into() })?;
        let has_probs = succ.iter().any(|(_, p)| p.is_some());
        let all_probs = succ.iter().all(|(_, p)| p.is_some());
        match owner {
            Owner::Random if !all_probs => {
                return Err(SpgError::Semantic { vertex: id, msg: "rand vertex requires probabilities on every successor".into() })
            }
            Owner::P1 | Owner::P2 if has_probs => {
                return Err(SpgError::Semantic { vertex: id, msg: "probability annotation on a player-owned vertex".into() })
            }
            _ => {}
        }
        raw.push(RawVertex {
            id,
            owner,
            prio1: prio1.ok_or(SpgError::Semantic { vertex: id, msg: "missing p1 priority".into() })?,
            prio2: prio2.ok_or(SpgError::Semantic { vertex: id, msg: "missing p2 priority".into() })?,
            succ,
        });
    }
    if !header_seen {
        return Err(SpgError::MissingHeader);
    }
    if raw.is_empty() {
        return Err(SpgError::Empty);
    }
    // Normalize arbitrary ids to dense 0..n in increasing order.
    let mut dense: BTreeMap<u64, VertexId> = BTreeMap::new();
    for v in &raw {
        if dense.insert(v.id, 0).is_some() {
            return Err(SpgError::DuplicateVertex(v.id));
        }
    }
    for (i, slot) in dense.values_mut().enumerate() {
        *slot = i;
    }
    raw.sort_by_key(|v| v.id);
    let original: Vec<u64> = raw.iter().map(|v| v.id).collect();
    let mut b = GameBuilder::new();
    for v in &raw {
        b.add_vertex(v.owner, v.prio1, v.prio2);
    }
    for (i, v) in raw.iter().enumerate() {
        for (target, p) in &v.succ {
            let Some(&t) = dense.get(target) else {
                return Err(SpgError::Semantic { vertex: v.id, msg: format!("dangling successor {target}") });
            };
            match p {
                Some(p) => b.add_prob_edge(i, t, p.clone()),
                None => b.add_edge(i, t),
            }
        }
    }
    b.build().map_err(|e| game_error_to_semantic(e, &original))
}

fn game_error_to_semantic(e: GameError, original: &[u64]) -> SpgError {
    let vertex = match &e {
        GameError::NoSuccessor(v)
        | GameError::UnexpectedProbabilities(v)
        | GameError::MissingProbabilities(v)
        | GameError::UnknownVertex(v) => *v,
        GameError::DanglingSuccessor { vertex, .. }
        | GameError::DuplicateSuccessor { vertex, .. }
        | GameError::BadProbabilitySum { vertex, .. }
        | GameError::NonPositiveProbability { vertex, .. }
        | GameError::LeakingRandomVertex { vertex, .. }
        | GameError::NoSuccessorInside { vertex } => *vertex,
    };
    SpgError::Semantic { vertex: original.get(vertex).copied().unwrap_or(vertex as u64), msg: e.to_string() }
}

/// Serializes a game in the normalized `.spg` form: dense ids, vertices in
/// increasing order. Parsing the output reproduces the game exactly.
pub fn serialize_game(g: &StochasticGame) -> String {
    let mut out = String::from("spg 1;\n");
    for v in g.vertices() {
        let owner = match g.owner(v) {
            Owner::P1 => "p1",
            Owner::P2 => "p2",
            Owner::Random => "rand",
        };
        let succ = if g.owner(v) == Owner::Random {
            g.succ(v)
                .iter()
                .zip(g.delta(v))
                .map(|(s, p)| format!("{s}:{}/{}", p.numer(), p.denom()))
                .collect::<Vec<_>>()
                .join(",")
        } else {
            g.succ(v).iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        };
        let _ = writeln!(out, "vertex {v} owner={owner} p1={} p2={} succ={succ};", g.prio1(v), g.prio2(v));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexWire {
    pub id: usize,
    pub owner: String,
    pub prio1: u32,
    pub prio2: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbWire {
    pub from: usize,
    pub to: usize,
    pub num: String,
    pub den: String,
}

/// Stable JSON form of a game (`schema`, `vertices`, `edges`, `prob`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameWire {
    pub schema: u32,
    pub vertices: Vec<VertexWire>,
    pub edges: Vec<(usize, usize)>,
    pub prob: Vec<ProbWire>,
}

impl GameWire {
    pub fn from_game(g: &StochasticGame) -> GameWire {
        let mut edges = Vec::new();
        let mut prob = Vec::new();
        for v in g.vertices() {
            for (k, &s) in g.succ(v).iter().enumerate() {
                edges.push((v, s));
                if g.owner(v) == Owner::Random {
                    let p = &g.delta(v)[k];
                    prob.push(ProbWire { from: v, to: s, num: p.numer().to_string(), den: p.denom().to_string() });
                }
            }
        }
        GameWire {
            schema: 1,
            vertices: g
                .vertices()
                .map(|v| VertexWire {
                    id: v,
                    owner: match g.owner(v) {
                        Owner::P1 => "p1".into(),
                        Owner::P2 => "p2".into(),
                        Owner::Random => "rand".into(),
                    },
                    prio1: g.prio1(v),
                    prio2: g.prio2(v),
                    label: g.label(v).map(str::to_owned),
                })
                .collect(),
            edges,
            prob,
        }
    }

    pub fn into_game(self) -> Result<StochasticGame, SpgError> {
        let mut b = GameBuilder::new();
        let mut owners = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(SpgError::Semantic { vertex: v.id as u64, msg: "ids must be dense and sorted".into() });
            }
            let owner = match v.owner.as_str() {
                "p1" => Owner::P1,
                "p2" => Owner::P2,
                "rand" => Owner::Random,
                other => {
                    return Err(SpgError::Semantic { vertex: v.id as u64, msg: format!("unknown owner `{other}`") })
                }
            };
            owners.push(owner);
            let id = b.add_vertex(owner, v.prio1, v.prio2);
            b.set_label(id, v.label.clone());
        }
        for &(u, v) in &self.edges {
            match owners.get(u) {
                Some(Owner::Random) => {
                    let p = self
                        .prob
                        .iter()
                        .find(|p| p.from == u && p.to == v)
                        .ok_or(SpgError::Semantic { vertex: u as u64, msg: "missing probability row".into() })?;
                    let num = BigInt::from_str(&p.num)
                        .map_err(|_| SpgError::Semantic { vertex: u as u64, msg: "bad numerator".into() })?;
                    let den = BigInt::from_str(&p.den)
                        .map_err(|_| SpgError::Semantic { vertex: u as u64, msg: "bad denominator".into() })?;
                    b.add_prob_edge(u, v, BigRational::new(num, den));
                }
                Some(_) => b.add_edge(u, v),
                None => return Err(SpgError::Semantic { vertex: u as u64, msg: "edge from unknown vertex".into() }),
            }
        }
        let original: Vec<u64> = (0..self.vertices.len() as u64).collect();
        b.build().map_err(|e| game_error_to_semantic(e, &original))
    }
}

impl Serialize for StochasticGame {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GameWire::from_game(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StochasticGame {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = GameWire::deserialize(deserializer)?;
        wire.into_game().map_err(serde::de::Error::custom)
    }
}

/// Region JSON form: sorted member ids.
pub fn region_to_json(set: &VertexSet) -> serde_json::Value {
    serde_json::Value::Array(set.iter().map(|v| serde_json::Value::from(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::infinite_memory_mdp;

    pub const FIG1: &str = "\
spg 1;
# The MDP where sure B\u{fc}chi plus almost-sure coB\u{fc}chi needs unbounded memory.
vertex 0 owner=p1 p1=1 p2=0 succ=1,3;
vertex 1 owner=rand p1=1 p2=0 succ=0:1/2,2:1/2;
vertex 2 owner=p1 p1=2 p2=0 succ=0;
vertex 3 owner=p1 p1=2 p2=1 succ=0;
";

    #[test]
    fn parses_fig1() {
        let g = parse_game(FIG1).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.owner(1), Owner::Random);
        assert_eq!(g.succ(0), &[1, 3]);
        // Same structure as the built-in constructor, modulo labels.
        let built = infinite_memory_mdp();
        assert_eq!(g.succ(1), built.succ(1));
        assert_eq!(g.omega1(), built.omega1());
        assert_eq!(g.omega2(), built.omega2());
    }

    #[test]
    fn single_vertex_game() {
        let g = parse_game("spg 1;\nvertex 0 owner=p1 p1=0 p2=0 succ=0;\n").unwrap();
        assert_eq!(g.n(), 1);
    }

    #[test]
    fn rejects_bad_probability_sum() {
        let text = "spg 1;\nvertex 0 owner=rand p1=0 p2=0 succ=0:1/2,1:1/3;\nvertex 1 owner=p1 p1=0 p2=0 succ=0;\n";
        match parse_game(text) {
            Err(SpgError::Semantic { vertex: 0, msg }) => assert!(msg.contains("5/6"), "{msg}"),
            other => panic!("expected semantic error, got {other:?}"),
        }
    }

    #[test]
    fn reports_syntax_line() {
        let text = "spg 1;\nvertex 0 owner=p1 p1=0 p2=0 succ=0;\nvertex 1 owner=p1 p1=0\n";
        match parse_game(text) {
            Err(SpgError::Syntax { line: 3, .. }) => {}
            other => panic!("expected syntax error on line 3, got {other:?}"),
        }
    }

    #[test]
    fn normalizes_sparse_ids() {
        let text = "spg 1;\nvertex 10 owner=p1 p1=0 p2=0 succ=30;\nvertex 30 owner=p2 p1=1 p2=1 succ=10;\n";
        let g = parse_game(text).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.succ(0), &[1]);
        assert_eq!(g.owner(1), Owner::P2);
    }

    #[test]
    fn serialize_parse_round_trip() {
        let g = parse_game(FIG1).unwrap();
        let text = serialize_game(&g);
        let g2 = parse_game(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(serialize_game(&g2), text);
    }

    #[test]
    fn json_wire_round_trip() {
        let g = infinite_memory_mdp();
        let json = serde_json::to_string(&g).unwrap();
        let back: StochasticGame = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
    }
}
