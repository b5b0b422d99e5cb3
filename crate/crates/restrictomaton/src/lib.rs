//! Compiler and one-pot reaction simulator for finite automata built from
//! DNA and two Type IIS restriction enzymes.
//!
//! A two-symbol automaton is compiled into double-stranded "software"
//! molecules whose sticky ends encode ⟨state, symbol⟩ pairs. In a pot with
//! the encoded input, AcuI, BbvI and ligase, alternating ligation/cleavage
//! steps replay the automaton's run; a terminator molecule caps accepting
//! runs and the verdict is read off the resulting fragment length, as on a
//! gel. The crate provides the sequence algebra, the enzyme model, the
//! classical automaton oracle, the molecule compiler and the pot simulator.

pub mod compile;
pub mod enzyme;
pub mod fsa;
pub mod seq;
pub mod sim;
