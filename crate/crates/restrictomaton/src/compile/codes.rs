//! Canonical machine states, their overhang classes, and the twelve
//! ⟨state, symbol⟩ pair codes.
//!
//! Codes are stored the way the reference table prints them: read left to
//! right in duplex coordinate space. For the 2-nt class that equals the
//! protruding strand 5'→3'; for the 4-nt class the printed tail sits on the
//! bottom strand, so the physical exposure it pairs with is the base-wise
//! complement.

use std::fmt;

use crate::fsa::Symbol;
use crate::seq::{EndKind, Strand};

/// One of the six canonical states s0..s5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(u8);

impl State {
    pub const ALL: [State; 6] =
        [State(0), State(1), State(2), State(3), State(4), State(5)];

    pub fn new(index: u8) -> Option<State> {
        (index <= 5).then_some(State(index))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Parse a canonical state name, `s0` through `s5`.
    pub fn parse(name: &str) -> Option<State> {
        let n = name.strip_prefix('s')?;
        let i: u8 = n.parse().ok()?;
        State::new(i)
    }

    pub fn class(self) -> StateClass {
        if self.0 <= 2 {
            StateClass::C4
        } else {
            StateClass::C2
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// The two overhang classes that double the encodable state count: three
/// states are signalled by 4-nt 5' overhangs, the other three by 2-nt 3'
/// overhangs, each produced by its own enzyme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateClass {
    /// 4-nt five-prime exposures (states s0, s1, s2).
    C4,
    /// 2-nt three-prime exposures (states s3, s4, s5).
    C2,
}

impl StateClass {
    pub fn code_len(self) -> usize {
        match self {
            StateClass::C4 => 4,
            StateClass::C2 => 2,
        }
    }

    pub fn end_kind(self) -> EndKind {
        match self {
            StateClass::C4 => EndKind::FivePrime,
            StateClass::C2 => EndKind::ThreePrime,
        }
    }

    pub fn states(self) -> impl Iterator<Item = State> {
        State::ALL.into_iter().filter(move |s| s.class() == self)
    }
}

/// A ⟨state, symbol⟩ code: the sticky-end tail, as printed, that signals
/// "the machine is in `state` about to read `symbol`".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCode {
    pub state: State,
    pub symbol: Symbol,
    pub code: Strand,
    pub kind: EndKind,
}

const CODE_TABLE: [(u8, Symbol, &str); 12] = [
    (0, Symbol::A, "CAGC"),
    (1, Symbol::A, "TCAG"),
    (2, Symbol::A, "ATCA"),
    (0, Symbol::B, "ACTA"),
    (1, Symbol::B, "GACT"),
    (2, Symbol::B, "CGAC"),
    (3, Symbol::A, "CG"),
    (4, Symbol::A, "TC"),
    (5, Symbol::A, "GT"),
    (3, Symbol::B, "AT"),
    (4, Symbol::B, "GA"),
    (5, Symbol::B, "TG"),
];

/// The twelve pair codes, bundled as a fixture.
pub fn pair_codes() -> Vec<PairCode> {
    CODE_TABLE
        .iter()
        .map(|&(i, symbol, code)| {
            let state = State::new(i).unwrap();
            PairCode {
                state,
                symbol,
                code: Strand::parse(code).expect("fixture code parses"),
                kind: state.class().end_kind(),
            }
        })
        .collect()
}

/// The code for one ⟨state, symbol⟩ pair.
pub fn pair_code(state: State, symbol: Symbol) -> PairCode {
    pair_codes()
        .into_iter()
        .find(|c| c.state == state && c.symbol == symbol)
        .expect("all 12 pairs are in the fixture")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn state_parsing_and_classes() {
        assert_eq!(State::parse("s0"), Some(State(0)));
        assert_eq!(State::parse("s5"), Some(State(5)));
        assert_eq!(State::parse("s6"), None);
        assert_eq!(State::parse("q1"), None);
        assert_eq!(State(2).class(), StateClass::C4);
        assert_eq!(State(3).class(), StateClass::C2);
    }

    #[test]
    fn code_examples() {
        let c = pair_code(State(0), Symbol::A);
        assert_eq!(c.code.to_string(), "CAGC");
        assert_eq!(c.kind, EndKind::FivePrime);
        let c = pair_code(State(5), Symbol::B);
        assert_eq!(c.code.to_string(), "TG");
        assert_eq!(c.kind, EndKind::ThreePrime);
    }

    #[test]
    fn codes_distinct_within_each_class() {
        for class in [StateClass::C4, StateClass::C2] {
            let codes: Vec<String> = pair_codes()
                .into_iter()
                .filter(|c| c.state.class() == class)
                .map(|c| c.code.to_string())
                .collect();
            let unique: BTreeSet<&String> = codes.iter().collect();
            assert_eq!(codes.len(), 6);
            assert_eq!(unique.len(), 6, "duplicate code in class {:?}", class);
        }
    }
}
