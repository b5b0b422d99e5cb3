//! Classical finite-automaton semantics over the fixed two-symbol alphabet
//! {a, b}: the ground-truth oracle the molecular simulation is checked
//! against.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsaError {
    #[error("syntax error at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown state {name:?} at line {line}")]
    UnknownState { name: String, line: usize },
    #[error("no initial state declared")]
    NoInitial,
    #[error("automaton is not deterministic: state {state} on {symbol} has {count} targets")]
    NotDeterministic { state: String, symbol: Symbol, count: usize },
    #[error("word may contain only 'a' and 'b', found {0:?}")]
    BadSymbol(char),
}

/// The two input symbols. The alphabet is fixed; anything larger is out of
/// scope for this machine family.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    A,
    B,
}

impl Symbol {
    pub const ALL: [Symbol; 2] = [Symbol::A, Symbol::B];

    pub fn from_char(c: char) -> Result<Symbol, FsaError> {
        match c {
            'a' => Ok(Symbol::A),
            'b' => Ok(Symbol::B),
            other => Err(FsaError::BadSymbol(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::A => 'a',
            Symbol::B => 'b',
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Parse a word like "abaa".
pub fn parse_word(s: &str) -> Result<Vec<Symbol>, FsaError> {
    s.chars().map(Symbol::from_char).collect()
}

/// Every word over {a, b} with length in `1..=max_len`, shortest first.
pub fn all_words(max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for bits in 0..(1u64 << len) {
            out.push(
                (0..len)
                    .map(|i| if bits >> i & 1 == 0 { Symbol::A } else { Symbol::B })
                    .collect(),
            );
        }
    }
    out
}

pub fn word_string(w: &[Symbol]) -> String {
    w.iter().map(|s| s.to_char()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub states: Vec<String>,
    pub initial: String,
    pub finals: BTreeSet<String>,
    pub transitions: BTreeMap<(String, Symbol), BTreeSet<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    ConsumedAll,
    NoTransition,
}

/// Outcome of a classical run: the trace lists (state, consumed symbol)
/// pairs starting from the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub trace: Vec<(String, Symbol)>,
    pub halt_reason: HaltReason,
    pub final_state: String,
}

impl Automaton {
    pub fn targets(&self, state: &str, symbol: Symbol) -> BTreeSet<String> {
        self.transitions.get(&(state.to_string(), symbol)).cloned().unwrap_or_default()
    }

    pub fn is_deterministic(&self) -> bool {
        self.transitions.values().all(|t| t.len() <= 1)
    }

    /// Whether the encoding can express this automaton at all (capacity).
    pub fn is_compilable(&self) -> bool {
        self.states.len() <= 6
    }

    pub fn rules(&self) -> impl Iterator<Item = (&str, Symbol, &str)> {
        self.transitions.iter().flat_map(|((from, sym), tos)| {
            tos.iter().map(move |to| (from.as_str(), *sym, to.as_str()))
        })
    }

    /// Standard DFA semantics; an undefined (state, symbol) pair rejects
    /// immediately, mirroring the molecular stall.
    pub fn run_dfa(&self, word: &[Symbol]) -> Result<Verdict, FsaError> {
        for ((state, symbol), tos) in &self.transitions {
            if tos.len() > 1 {
                return Err(FsaError::NotDeterministic {
                    state: state.clone(),
                    symbol: *symbol,
                    count: tos.len(),
                });
            }
        }
        let mut state = self.initial.clone();
        let mut trace = Vec::new();
        for &sym in word {
            match self.targets(&state, sym).into_iter().next() {
                Some(next) => {
                    trace.push((state, sym));
                    state = next;
                }
                None => {
                    return Ok(Verdict {
                        accepted: false,
                        trace,
                        halt_reason: HaltReason::NoTransition,
                        final_state: state,
                    })
                }
            }
        }
        Ok(Verdict {
            accepted: self.finals.contains(&state),
            trace,
            halt_reason: HaltReason::ConsumedAll,
            final_state: state,
        })
    }

    /// Subset-construction acceptance; works for any automaton.
    pub fn run_nfa(&self, word: &[Symbol]) -> bool {
        let mut current: BTreeSet<String> = std::iter::once(self.initial.clone()).collect();
        for &sym in word {
            current = current.iter().flat_map(|s| self.targets(s, sym)).collect();
        }
        current.iter().any(|s| self.finals.contains(s))
    }

    /// Parse the line-oriented automaton format:
    ///
    /// ```text
    /// states: s0 s1 s2
    /// initial: s0
    /// final: s2
    /// trans: s0 a s1
    /// ```
    ///
    /// `#` starts a comment; repeated `trans` lines with the same
    /// from/symbol express nondeterminism.
    pub fn parse(text: &str) -> Result<Automaton, FsaError> {
        let mut states: Vec<String> = Vec::new();
        let mut initial: Option<(String, usize)> = None;
        let mut finals: Vec<(String, usize)> = Vec::new();
        let mut trans: Vec<(String, Symbol, String, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ln = i + 1;
            let (key, rest) = line.split_once(':').ok_or_else(|| FsaError::Syntax {
                line: ln,
                msg: "expected 'key: value'".into(),
            })?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "states" => {
                    for f in &fields {
                        if states.iter().any(|s| s == f) {
                            return Err(FsaError::Syntax {
                                line: ln,
                                msg: format!("duplicate state {:?}", f),
                            });
                        }
                        states.push(f.to_string());
                    }
                }
                "initial" => match fields.as_slice() {
                    [one] => initial = Some((one.to_string(), ln)),
                    _ => {
                        return Err(FsaError::Syntax {
                            line: ln,
                            msg: "initial takes exactly one state".into(),
                        })
                    }
                },
                "final" => finals.extend(fields.iter().map(|f| (f.to_string(), ln))),
                "trans" => match fields.as_slice() {
                    [from, sym, to] => {
                        let sym = match *sym {
                            "a" => Symbol::A,
                            "b" => Symbol::B,
                            other => {
                                return Err(FsaError::Syntax {
                                    line: ln,
                                    msg: format!("symbol must be a or b, found {:?}", other),
                                })
                            }
                        };
                        trans.push((from.to_string(), sym, to.to_string(), ln));
                    }
                    _ => {
                        return Err(FsaError::Syntax {
                            line: ln,
                            msg: "trans takes 'from symbol to'".into(),
                        })
                    }
                },
                other => {
                    return Err(FsaError::Syntax {
                        line: ln,
                        msg: format!("unknown directive {:?}", other),
                    })
                }
            }
        }
        if states.is_empty() {
            return Err(FsaError::Syntax { line: 0, msg: "no states declared".into() });
        }
        let known = |name: &str, line: usize| -> Result<(), FsaError> {
            if states.iter().any(|s| s == name) {
                Ok(())
            } else {
                Err(FsaError::UnknownState { name: name.to_string(), line })
            }
        };
        let (initial, init_line) = initial.ok_or(FsaError::NoInitial)?;
        known(&initial, init_line)?;
        let mut final_set = BTreeSet::new();
        for (f, ln) in finals {
            known(&f, ln)?;
            final_set.insert(f);
        }
        let mut transitions: BTreeMap<(String, Symbol), BTreeSet<String>> = BTreeMap::new();
        for (from, sym, to, ln) in trans {
            known(&from, ln)?;
            known(&to, ln)?;
            transitions.entry((from, sym)).or_default().insert(to);
        }
        Ok(Automaton { states, initial, finals: final_set, transitions })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("states: {}\n", self.states.join(" ")));
        out.push_str(&format!("initial: {}\n", self.initial));
        out.push_str(&format!(
            "final: {}\n",
            self.finals.iter().cloned().collect::<Vec<_>>().join(" ")
        ));
        for (from, sym, to) in self.rules() {
            out.push_str(&format!("trans: {} {} {}\n", from, sym, to));
        }
        out
    }
}

/// Transition-table density for the random generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Density {
    /// Every (state, symbol) pair gets exactly one target.
    Full,
    /// Pairs may be left undefined.
    Partial,
    /// Pairs may get several targets (nondeterministic).
    Nondet,
}

/// Seeded random automaton over a random subset of the canonical states
/// s0..s5, so both overhang classes get exercised at every size. The same
/// seed always yields the same automaton.
pub fn random_automaton(seed: u64, n_states: usize, density: Density) -> Automaton {
    assert!((1..=6).contains(&n_states), "n_states must be in 1..=6");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<String> = (0..6).map(|i| format!("s{}", i)).collect();
    pool.shuffle(&mut rng);
    let mut states: Vec<String> = pool.into_iter().take(n_states).collect();
    states.sort();
    let initial = states[rng.gen_range(0..states.len())].clone();
    let finals: BTreeSet<String> =
        states.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect();
    let mut transitions: BTreeMap<(String, Symbol), BTreeSet<String>> = BTreeMap::new();
    for s in &states {
        for sym in Symbol::ALL {
            let n_targets = match density {
                Density::Full => 1,
                Density::Partial => usize::from(rng.gen_bool(0.7)),
                Density::Nondet => *[0, 1, 1, 2].choose(&mut rng).unwrap(),
            };
            for _ in 0..n_targets {
                let to = states[rng.gen_range(0..states.len())].clone();
                transitions.entry((s.clone(), sym)).or_default().insert(to);
            }
        }
    }
    Automaton { states, initial, finals, transitions }
}

/// The two-state automaton accepting words with an odd number of a's.
pub fn parity_automaton() -> Automaton {
    Automaton::parse(
        "states: s0 s1\n\
         initial: s0\n\
         final: s1\n\
         trans: s0 a s1\n\
         trans: s1 a s0\n\
         trans: s0 b s0\n\
         trans: s1 b s1\n",
    )
    .expect("parity automaton parses")
}
