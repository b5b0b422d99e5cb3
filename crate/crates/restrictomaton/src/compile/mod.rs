//! Automaton → DNA compilation: pair codes, layout derivation, molecule
//! encoding, machine validation and the reference-table diff.

mod codes;
mod encode;
mod layout;
mod table;
mod validate;

pub use codes::{pair_code, pair_codes, PairCode, State, StateClass};
pub use encode::{
    encode_input, encode_terminator, encode_transition, instantiate, remnant_exposing,
    TransitionMolecule, MAX_INSTANTIATION_ATTEMPTS,
};
pub use layout::{BlockKind, Layout, END_PAD, INITIATOR_SITE_POS};
pub use table::{
    discrepancy_ledger, reference_table, table_diff, DiffReport, LedgerEntry, RowClass, RowDiff,
    TableRow,
};
pub use validate::{ValidationCheck, ValidationReport};

use serde_json::json;
use thiserror::Error;

use crate::enzyme::{EnzymeError, Registry};
use crate::fsa::{Automaton, FsaError, Symbol};
use crate::seq::{Duplex, SeqError};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("not compilable: {0}")]
    NotCompilable(String),
    #[error("no consistent layout: {0}")]
    NoConsistentLayout(String),
    #[error("instantiation exhausted after {} attempts for {label}", MAX_INSTANTIATION_ATTEMPTS)]
    InstantiationExhausted { label: String },
    #[error("empty input word is not encodable; the machine always reads at least one symbol")]
    EmptyWord,
    #[error(transparent)]
    Fsa(#[from] FsaError),
    #[error(transparent)]
    Enzyme(#[from] EnzymeError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// Default double-stranded tail length of terminator molecules.
pub const DEFAULT_TERMINATOR_TAIL: usize = 80;

#[derive(Debug, Clone)]
pub struct CompiledRule {
    pub from: State,
    pub symbol: Symbol,
    pub to: State,
    pub molecule: TransitionMolecule,
    /// Fully instantiated molecule (no N).
    pub duplex: Duplex,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CompiledTerminator {
    pub state: State,
    pub duplex: Duplex,
    pub seed: u64,
    pub tail_len: usize,
}

/// A fully compiled machine: one molecule per rule, one terminator per
/// final state, the shared layout, and the validation report.
#[derive(Debug, Clone)]
pub struct CompiledMachine {
    pub automaton: Automaton,
    pub layout: Layout,
    pub rules: Vec<CompiledRule>,
    pub terminators: Vec<CompiledTerminator>,
    pub initial: State,
    pub master_seed: u64,
    pub validation: ValidationReport,
}

impl CompiledMachine {
    /// Compile an automaton with the bundled registry and default
    /// terminator tail. Deterministic in `seed`.
    pub fn compile(aut: &Automaton, seed: u64) -> Result<CompiledMachine, CompileError> {
        CompiledMachine::compile_with(aut, Registry::builtin(), seed, DEFAULT_TERMINATOR_TAIL)
    }

    pub fn compile_with(
        aut: &Automaton,
        registry: &Registry,
        seed: u64,
        terminator_tail: usize,
    ) -> Result<CompiledMachine, CompileError> {
        if aut.states.len() > 6 {
            return Err(CompileError::NotCompilable(format!(
                ">6 states ({}); the two-enzyme encoding addresses at most six",
                aut.states.len()
            )));
        }
        let canon = |name: &str| {
            State::parse(name).ok_or_else(|| {
                CompileError::NotCompilable(format!(
                    "state {:?} is not one of the canonical names s0..s5",
                    name
                ))
            })
        };
        let layout = Layout::derive(registry)?;
        let initial = canon(&aut.initial)?;
        let mut rules = Vec::new();
        for (from, symbol, to) in aut.rules() {
            let (from, to) = (canon(from)?, canon(to)?);
            let molecule = encode_transition(from, symbol, to, &layout);
            let rule_seed = stable_seed(seed, &molecule.label());
            let duplex = instantiate(&molecule, &layout, registry, rule_seed)?;
            rules.push(CompiledRule { from, symbol, to, molecule, duplex, seed: rule_seed });
        }
        let mut terminators = Vec::new();
        for f in &aut.finals {
            let f = canon(f)?;
            let term_seed = stable_seed(seed, &format!("term({})", f));
            let duplex = encode_terminator(f, &layout, registry, terminator_tail, term_seed)?;
            terminators.push(CompiledTerminator {
                state: f,
                duplex,
                seed: term_seed,
                tail_len: terminator_tail,
            });
        }
        let mut machine = CompiledMachine {
            automaton: aut.clone(),
            layout,
            rules,
            terminators,
            initial,
            master_seed: seed,
            validation: ValidationReport::default(),
        };
        machine.validation = validate::run_checks(&machine, registry);
        Ok(machine)
    }

    /// Encode an input word for this machine's initial state. Seeded off
    /// the machine's master seed.
    pub fn encode_input(&self, word: &[Symbol], registry: &Registry) -> Result<Duplex, CompileError> {
        let word_seed =
            stable_seed(self.master_seed, &format!("input({})", crate::fsa::word_string(word)));
        encode_input(word, self.initial, &self.layout, registry, word_seed)
    }

    /// Machine manifest: rule list, enzymes, spacer lengths, seeds, layout.
    pub fn manifest(&self) -> serde_json::Value {
        json!({
            "states": self.automaton.states,
            "initial": self.automaton.initial,
            "finals": self.automaton.finals.iter().collect::<Vec<_>>(),
            "deterministic": self.automaton.is_deterministic(),
            "master_seed": self.master_seed,
            "layout": {
                "block_len": self.layout.block_len,
                "window_offsets": State::ALL.iter()
                    .map(|s| (s.to_string(), self.layout.window_offset(*s)))
                    .collect::<std::collections::BTreeMap<_, _>>(),
                "a_block": self.layout.a_block.to_string(),
                "b_block": self.layout.b_block.to_string(),
                "end_block": self.layout.end_block.to_string(),
                "end_pad": self.layout.end_pad.to_string(),
                "initiator_site_pos": self.layout.initiator_site_pos,
                // the published experiment's input fragments were excised
                // from vectors whose flanks are not public; initiators are
                // a reconstruction from the layout constraints
                "initiator": "reconstructed",
            },
            "rules": self.rules.iter().map(|r| json!({
                "label": r.molecule.label(),
                "from": r.from.to_string(),
                "symbol": r.symbol.to_string(),
                "to": r.to.to_string(),
                "enzyme": r.molecule.enzyme,
                "spacers": r.molecule.spacers,
                "seed": r.seed,
                "file": format!("{}.dx", file_stem(&r.molecule.label())),
            })).collect::<Vec<_>>(),
            "terminators": self.terminators.iter().map(|t| json!({
                "state": t.state.to_string(),
                "tail_len": t.tail_len,
                "seed": t.seed,
                "file": format!("{}.dx", file_stem(&format!("term({})", t.state))),
            })).collect::<Vec<_>>(),
            "validation": {
                "errors": self.validation.error_count(),
                "checks": self.validation.checks,
            },
        })
    }

    /// Named duplex records for every emitted molecule.
    pub fn molecule_records(&self) -> Vec<(String, Duplex)> {
        let mut out: Vec<(String, Duplex)> = self
            .rules
            .iter()
            .map(|r| (r.molecule.label(), r.duplex.clone()))
            .collect();
        out.extend(self.terminators.iter().map(|t| (format!("term({})", t.state), t.duplex.clone())));
        out
    }
}

/// Filesystem-safe stem for a molecule label like `T(s0,a,s1)`.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

/// Standalone validation entry point: compile and return just the report.
pub fn validate_automaton(
    aut: &Automaton,
    registry: &Registry,
    seed: u64,
) -> Result<ValidationReport, CompileError> {
    CompiledMachine::compile_with(aut, registry, seed, DEFAULT_TERMINATOR_TAIL)
        .map(|m| m.validation)
}

/// Deterministic per-artifact seed derivation (FNV-1a mix plus a splitmix
/// finalizer); all randomness flows from the one master seed.
pub fn stable_seed(master: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ master.rotate_left(17);
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
