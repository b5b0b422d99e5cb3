//! Molecule construction: transition molecules, encoded input molecules,
//! terminators, and seeded instantiation of spacer positions.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::enzyme::{find_sites, Orientation, Registry, SiteHit};
use crate::fsa::{word_string, Symbol};
use crate::seq::{Base, Duplex, Strand};

use super::codes::{pair_code, State, StateClass};
use super::layout::{BlockKind, Layout};
use super::CompileError;

/// Rejection-sampling bound per molecule; deterministic reproducibility
/// outranks speed here.
pub const MAX_INSTANTIATION_ATTEMPTS: usize = 10_000;

/// The compiled DNA code for one transition rule, with spacer positions
/// still schematic (N).
#[derive(Debug, Clone)]
pub struct TransitionMolecule {
    pub rule: (State, Symbol, State),
    pub schematic: Duplex,
    /// Name of the enzyme whose site the molecule carries; fixed by the
    /// destination state's class.
    pub enzyme: String,
    pub spacers: usize,
}

impl TransitionMolecule {
    pub fn label(&self) -> String {
        let (from, sym, to) = self.rule;
        format!("T({},{},{})", from, sym, to)
    }
}

/// Compile one rule `(from, symbol) → to` into its molecule: a recognition
/// site for `to`'s class enzyme, a spacer run that steers the cut onto
/// `to`'s window in the next block, and a tail complementary to the
/// ⟨from, symbol⟩ exposure.
pub fn encode_transition(
    from: State,
    symbol: Symbol,
    to: State,
    layout: &Layout,
) -> TransitionMolecule {
    let enzyme = layout.class_enzyme(to.class()).clone();
    let k = layout.spacer_len(from, to);
    let code = pair_code(from, symbol).code;
    let body = enzyme.recognition.concat(&Strand::repeat_n(k));
    let (top, bottom) = match from.class() {
        // 4-nt tail protrudes on the bottom strand
        StateClass::C4 => (body.clone(), code.reversed().concat(&body.revcomp())),
        // 2-nt tail protrudes on the top strand
        StateClass::C2 => (body.concat(&code), body.revcomp()),
    };
    let schematic =
        Duplex::from_strands(top, bottom, 0).expect("transition schematic is a valid duplex");
    TransitionMolecule { rule: (from, symbol, to), schematic, enzyme: enzyme.name, spacers: k }
}

/// Deterministically replace every N with a concrete base such that the
/// result carries exactly the intended recognition sites (its own, nothing
/// else across the whole registry) and forms no site across its ligation
/// junction with any of the given downstream contexts.
pub fn instantiate_duplex(
    schematic: &Duplex,
    seed: u64,
    registry: &Registry,
    intended: &[(String, SiteHit)],
    right_contexts: &[Strand],
    label: &str,
) -> Result<Duplex, CompileError> {
    if !schematic.top().contains_n() && !schematic.bottom().contains_n() {
        // nothing to sample; the fixed content must already satisfy the
        // constraints
        if sites_ok(schematic, registry, intended)
            && junctions_ok(schematic, registry, right_contexts)
        {
            return Ok(schematic.clone());
        }
        return Err(CompileError::InstantiationExhausted { label: label.to_string() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top0 = schematic.top().bases().to_vec();
    let bot0 = schematic.bottom().bases().to_vec();
    let lb = bot0.len() as i64;
    let align = schematic.align();
    for _ in 0..MAX_INSTANTIATION_ATTEMPTS {
        let mut top = top0.clone();
        let mut bottom = bot0.clone();
        for (i, cell) in top.iter_mut().enumerate() {
            if *cell == Base::N {
                let b = random_base(&mut rng);
                *cell = b;
                // keep the paired cell complementary
                let j = align + lb - 1 - i as i64;
                if (0..lb).contains(&j) {
                    bottom[j as usize] = b.complement();
                }
            }
        }
        for cell in bottom.iter_mut() {
            if *cell == Base::N {
                *cell = random_base(&mut rng);
            }
        }
        let d = Duplex::from_strands(Strand::new(top), Strand::new(bottom), align)
            .expect("instantiation preserves pairing");
        if sites_ok(&d, registry, intended) && junctions_ok(&d, registry, right_contexts) {
            return Ok(d);
        }
    }
    Err(CompileError::InstantiationExhausted { label: label.to_string() })
}

fn random_base(rng: &mut ChaCha8Rng) -> Base {
    *[Base::A, Base::C, Base::G, Base::T].choose(rng).unwrap()
}

fn sites_ok(d: &Duplex, registry: &Registry, intended: &[(String, SiteHit)]) -> bool {
    registry.iter().all(|e| {
        let want: Vec<SiteHit> =
            intended.iter().filter(|(n, _)| *n == e.name).map(|(_, h)| *h).collect();
        find_sites(d, e) == want
    })
}

/// No recognition site may straddle the boundary between this molecule's
/// top strand and any possible downstream continuation.
fn junctions_ok(d: &Duplex, registry: &Registry, right_contexts: &[Strand]) -> bool {
    let top = d.top();
    right_contexts.iter().all(|ctx| {
        let joined = top.concat(ctx);
        registry.iter().all(|e| {
            [e.recognition.clone(), e.recognition.revcomp()].iter().all(|pat| {
                joined
                    .find_all(pat)
                    .iter()
                    .all(|&p| p + pat.len() <= top.len() || p >= top.len())
            })
        })
    })
}

/// The physical top-strand contexts that can follow a transition molecule
/// after it ligates: the rest of the consumed symbol block, then either
/// symbol block or the end block.
pub fn transition_contexts(m: &TransitionMolecule, layout: &Layout) -> Vec<Strand> {
    let (from, symbol, _) = m.rule;
    let o = layout.window_offset(from);
    // a 4-nt exposure leaves the window on the remnant; a 2-nt exposure's
    // window bases arrive with the molecule's own tail
    let skip = match from.class() {
        StateClass::C4 => o,
        StateClass::C2 => o + 2,
    };
    let block = layout.physical_block(BlockKind::Sym(symbol));
    let rest = block.slice(skip..block.len());
    [BlockKind::Sym(Symbol::A), BlockKind::Sym(Symbol::B), BlockKind::End]
        .into_iter()
        .map(|next| match next {
            BlockKind::End => rest.concat(&layout.physical_end_with_pad()),
            sym => rest.concat(&layout.physical_block(sym)),
        })
        .collect()
}

/// Instantiate a transition molecule's spacers.
pub fn instantiate(
    m: &TransitionMolecule,
    layout: &Layout,
    registry: &Registry,
    seed: u64,
) -> Result<Duplex, CompileError> {
    let intended =
        vec![(m.enzyme.clone(), SiteHit { position: 0, orientation: Orientation::Forward })];
    instantiate_duplex(
        &m.schematic,
        seed,
        registry,
        &intended,
        &transition_contexts(m, layout),
        &m.label(),
    )
}

/// Encode an input word as a blunt duplex: initiator, one block per symbol,
/// end block, padding. The initiator carries the single active site of the
/// fresh input; its cleavage exposes ⟨initial, word[0]⟩.
pub fn encode_input(
    word: &[Symbol],
    initial: State,
    layout: &Layout,
    registry: &Registry,
    seed: u64,
) -> Result<Duplex, CompileError> {
    if word.is_empty() {
        return Err(CompileError::EmptyWord);
    }
    let e = layout.class_enzyme(initial.class());
    let site_pos = layout.initiator_site_pos;
    let spacer = layout.initiator_len(initial) - site_pos - e.site_len();
    let mut top = Strand::repeat_n(site_pos)
        .concat(&e.recognition)
        .concat(&Strand::repeat_n(spacer));
    for &sym in word {
        top = top.concat(&layout.physical_block(BlockKind::Sym(sym)));
    }
    top = top.concat(&layout.physical_end_with_pad());
    let schematic = Duplex::blunt(top).expect("input schematic is a valid blunt duplex");
    let intended = vec![(
        e.name.clone(),
        SiteHit { position: site_pos as i64, orientation: Orientation::Forward },
    )];
    instantiate_duplex(
        &schematic,
        seed,
        registry,
        &intended,
        &[],
        &format!("input({})", word_string(word)),
    )
}

/// Encode the terminal molecule for one final state: a site-free tail of
/// `tail_len` bp whose right sticky end is complementary to the
/// ⟨final_state, end⟩ exposure. Ligating it caps the computation.
pub fn encode_terminator(
    final_state: State,
    layout: &Layout,
    registry: &Registry,
    tail_len: usize,
    seed: u64,
) -> Result<Duplex, CompileError> {
    assert!(tail_len >= 4, "terminator tail must give the ligase something to hold");
    let code = layout.window_code(final_state, BlockKind::End);
    let pad = Strand::repeat_n(tail_len);
    let (top, bottom) = match final_state.class() {
        StateClass::C2 => (pad.concat(&code), pad.clone()),
        StateClass::C4 => (pad.clone(), code.reversed().concat(&pad)),
    };
    let schematic =
        Duplex::from_strands(top, bottom, 0).expect("terminator schematic is a valid duplex");
    let o = layout.window_offset(final_state);
    let skip = match final_state.class() {
        StateClass::C4 => o,
        StateClass::C2 => o + 2,
    };
    let full_end = layout.physical_end_with_pad();
    let ctx = full_end.slice(skip..full_end.len());
    instantiate_duplex(&schematic, seed, registry, &[], &[ctx], &format!("term({})", final_state))
}

/// A duplex shaped like an input remnant whose left end exposes
/// ⟨state, first⟩, followed by the given blocks. Used by validation and
/// tests to probe exposures without running a whole input.
pub fn remnant_exposing(
    state: State,
    first: BlockKind,
    rest: &[BlockKind],
    layout: &Layout,
) -> Duplex {
    let o = layout.window_offset(state);
    let first_block = match first {
        BlockKind::End => layout.physical_end_with_pad(),
        sym => layout.physical_block(sym),
    };
    let mut under = first_block.slice(o..first_block.len());
    for &k in rest {
        under = match k {
            BlockKind::End => under.concat(&layout.physical_end_with_pad()),
            sym => under.concat(&layout.physical_block(sym)),
        };
    }
    match state.class() {
        StateClass::C4 => {
            let bottom = under.slice(4..under.len()).revcomp();
            Duplex::from_strands(under, bottom, 4).expect("remnant geometry is valid")
        }
        StateClass::C2 => {
            let top = under.slice(2..under.len());
            Duplex::from_strands(top, under.revcomp(), -2).expect("remnant geometry is valid")
        }
    }
}
