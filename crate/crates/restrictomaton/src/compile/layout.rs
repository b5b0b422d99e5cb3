//! The global symbol-block layout implied by the twelve pair codes:
//! block contents, per-state window offsets, spacer arithmetic and
//! initiator geometry.
//!
//! Nothing here is hand-copied from the reference table. [`Layout::derive`]
//! runs a brute-force constraint search over window offsets and block
//! contents; the table is used only as a test oracle against the result.
//! Blocks are stored in code space (the orientation codes are printed in);
//! the physical top strand of an input molecule is the base-wise
//! complement, see [`Layout::physical_block`].

use crate::enzyme::{EnzymeSpec, Registry};
use crate::fsa::Symbol;
use crate::seq::{Base, EndKind, Side, StickyEnd, Strand};

use super::codes::{pair_codes, State, StateClass};
use super::CompileError;

/// Which segment of the input molecule a window lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Sym(Symbol),
    End,
}

/// Offset of the recognition site inside the initiator segment. Mirrors the
/// published input fragment, whose site starts at the fourth base.
pub const INITIATOR_SITE_POS: usize = 3;

/// Fixed double-stranded padding appended after the end block so the last
/// cut always lands well inside the molecule. Site-free against the whole
/// registry, which `Layout::derive` re-checks.
pub const END_PAD: &str = "TATATATA";

#[derive(Debug, Clone)]
pub struct Layout {
    /// Length of every symbol block (and of the end block's window region).
    pub block_len: usize,
    /// Per-state window offset inside a block, indexed by state index.
    pub offsets: [usize; 6],
    /// Symbol-a block, code space.
    pub a_block: Strand,
    /// Symbol-b block, code space.
    pub b_block: Strand,
    /// End block, code space: its windows are the ⟨state, end⟩ codes that
    /// terminators bind.
    pub end_block: Strand,
    /// Physical padding after the end block.
    pub end_pad: Strand,
    pub initiator_site_pos: usize,
    /// Enzyme exposing the 4-nt five-prime class.
    pub c4_enzyme: EnzymeSpec,
    /// Enzyme exposing the 2-nt three-prime class.
    pub c2_enzyme: EnzymeSpec,
}

impl Layout {
    pub fn class_enzyme(&self, class: StateClass) -> &EnzymeSpec {
        match class {
            StateClass::C4 => &self.c4_enzyme,
            StateClass::C2 => &self.c2_enzyme,
        }
    }

    pub fn window_offset(&self, state: State) -> usize {
        self.offsets[state.index()]
    }

    pub fn block_code(&self, kind: BlockKind) -> &Strand {
        match kind {
            BlockKind::Sym(Symbol::A) => &self.a_block,
            BlockKind::Sym(Symbol::B) => &self.b_block,
            BlockKind::End => &self.end_block,
        }
    }

    /// The ⟨state, ·⟩ code readable from a block's window, in printed
    /// orientation.
    pub fn window_code(&self, state: State, kind: BlockKind) -> Strand {
        let o = self.window_offset(state);
        let w = self.block_code(kind).slice(o..o + state.class().code_len());
        match state.class() {
            StateClass::C4 => w,
            StateClass::C2 => w.complemented(),
        }
    }

    /// Physical top-strand content of a block on the input molecule.
    pub fn physical_block(&self, kind: BlockKind) -> Strand {
        self.block_code(kind).complemented()
    }

    /// End block plus padding, as emitted on the input.
    pub fn physical_end_with_pad(&self) -> Strand {
        self.physical_block(BlockKind::End).concat(&self.end_pad)
    }

    /// The sticky end an input remnant presents (on its left end) when the
    /// machine is in `state` with the given block up next.
    pub fn exposure(&self, state: State, kind: BlockKind) -> StickyEnd {
        let code = self.window_code(state, kind);
        match state.class() {
            StateClass::C4 => StickyEnd {
                side: Side::Left,
                kind: EndKind::FivePrime,
                seq: code.complemented(),
            },
            StateClass::C2 => StickyEnd {
                side: Side::Left,
                kind: EndKind::ThreePrime,
                seq: code.revcomp(),
            },
        }
    }

    /// Spacer count of the molecule realizing a `from → to` transition.
    /// Symbol-independent: the spacer only steers the cut onto `to`'s
    /// window in the next block.
    pub fn spacer_len(&self, from: State, to: State) -> usize {
        let e = self.class_enzyme(to.class());
        let k = self.window_offset(from) as i64 + e.window_offset() as i64
            - self.block_len as i64
            - self.window_offset(to) as i64;
        debug_assert!(k >= 0, "derive guarantees non-negative spacers");
        k as usize
    }

    /// Length of the initiator segment for a machine starting in `initial`:
    /// its cut exposes `initial`'s window at the head of the first block.
    pub fn initiator_len(&self, initial: State) -> usize {
        let e = self.class_enzyme(initial.class());
        self.initiator_site_pos + e.site_len() + e.window_offset() - self.window_offset(initial)
    }

    /// Brute-force constraint search for the layout: block length, window
    /// offsets and block contents consistent with all twelve codes, every
    /// transition's spacer, the initiator geometry and site hygiene. The
    /// lexicographically-least solution is canonical.
    pub fn derive(registry: &Registry) -> Result<Layout, CompileError> {
        let codes = pair_codes();
        let class_enzyme = |class: StateClass| -> Result<EnzymeSpec, CompileError> {
            registry
                .iter()
                .find(|e| e.overhang_signature() == (class.end_kind(), class.code_len()))
                .cloned()
                .ok_or_else(|| {
                    CompileError::NoConsistentLayout(format!(
                        "no registry enzyme produces {}-nt {:?} overhangs",
                        class.code_len(),
                        class.end_kind()
                    ))
                })
        };
        let c4 = class_enzyme(StateClass::C4)?;
        let c2 = class_enzyme(StateClass::C2)?;
        let end_pad = Strand::parse(END_PAD).expect("pad constant parses");
        let mut rejects: Vec<&'static str> = Vec::new();

        for block_len in 4..=10usize {
            for offsets in offset_candidates(block_len) {
                // stamp both symbol blocks; any cell conflict kills the
                // candidate
                let stamped: Option<Vec<Strand>> = [Symbol::A, Symbol::B]
                    .iter()
                    .map(|&sym| stamp_block(block_len, &offsets, sym))
                    .collect();
                let Some(blocks) = stamped else {
                    rejects.push("window stamping conflict");
                    continue;
                };
                let (a_block, b_block) = (blocks[0].clone(), blocks[1].clone());

                // every transition must get a non-negative spacer count
                let spacers_ok = State::ALL.iter().all(|&p| {
                    State::ALL.iter().all(|&q| {
                        let e = match q.class() {
                            StateClass::C4 => &c4,
                            StateClass::C2 => &c2,
                        };
                        offsets[p.index()] + e.window_offset()
                            >= block_len + offsets[q.index()]
                    })
                });
                if !spacers_ok {
                    rejects.push("negative spacer for some transition");
                    continue;
                }
                // the initiator site must fit left of the first block
                let initiator_ok = State::ALL.iter().all(|&q| {
                    let e = match q.class() {
                        StateClass::C4 => &c4,
                        StateClass::C2 => &c2,
                    };
                    e.window_offset() >= offsets[q.index()]
                });
                if !initiator_ok {
                    rejects.push("initiator cut cannot reach a window");
                    continue;
                }

                // physical blocks and their junctions must carry no site
                let phys_a = a_block.complemented();
                let phys_b = b_block.complemented();
                let sym_junctions_clean = [&phys_a, &phys_b].iter().all(|x| {
                    [&phys_a, &phys_b].iter().all(|y| !has_any_site(registry, &x.concat(y)))
                });
                if !sym_junctions_clean {
                    rejects.push("enzyme site in symbol blocks or junctions");
                    continue;
                }

                if let Some(end_block) = search_end_block(
                    registry, block_len, &offsets, &a_block, &b_block, &end_pad,
                ) {
                    return Ok(Layout {
                        block_len,
                        offsets,
                        a_block,
                        b_block,
                        end_block,
                        end_pad,
                        initiator_site_pos: INITIATOR_SITE_POS,
                        c4_enzyme: c4,
                        c2_enzyme: c2,
                    });
                }
                rejects.push("no admissible end block");
            }
        }
        let _ = codes;
        rejects.sort();
        rejects.dedup();
        Err(CompileError::NoConsistentLayout(format!(
            "search exhausted; violated constraints: {}",
            rejects.join(", ")
        )))
    }
}

/// All window-offset assignments for the six states, ascending
/// lexicographically by (s0..s5); offsets are injective within each class.
fn offset_candidates(block_len: usize) -> Vec<[usize; 6]> {
    let mut out = Vec::new();
    if block_len < 4 {
        return out;
    }
    let c4_max = block_len - 4;
    let c2_max = block_len - 2;
    for o0 in 0..=c4_max {
        for o1 in 0..=c4_max {
            for o2 in 0..=c4_max {
                if o0 == o1 || o0 == o2 || o1 == o2 {
                    continue;
                }
                for o3 in 0..=c2_max {
                    for o4 in 0..=c2_max {
                        for o5 in 0..=c2_max {
                            if o3 == o4 || o3 == o5 || o4 == o5 {
                                continue;
                            }
                            out.push([o0, o1, o2, o3, o4, o5]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Write every state's code into a fresh block at its offset; C2 codes are
/// stamped complemented (blocks live in code space, where 4-nt windows read
/// direct). Returns `None` on any cell conflict. Cells no window covers are
/// filled with A.
fn stamp_block(block_len: usize, offsets: &[usize; 6], symbol: Symbol) -> Option<Strand> {
    let mut cells: Vec<Option<Base>> = vec![None; block_len];
    for code in pair_codes().into_iter().filter(|c| c.symbol == symbol) {
        let o = offsets[code.state.index()];
        let stamped = match code.state.class() {
            StateClass::C4 => code.code.clone(),
            StateClass::C2 => code.code.complemented(),
        };
        for (i, &b) in stamped.bases().iter().enumerate() {
            match cells[o + i] {
                Some(existing) if existing != b => return None,
                _ => cells[o + i] = Some(b),
            }
        }
    }
    Some(Strand::new(cells.into_iter().map(|c| c.unwrap_or(Base::A)).collect()))
}

fn has_any_site(registry: &Registry, s: &Strand) -> bool {
    registry.iter().any(|e| {
        !s.find_all(&e.recognition).is_empty() || !s.find_all(&e.recognition.revcomp()).is_empty()
    })
}

/// Find the lexicographically-least end block whose windows give every
/// state a ⟨state, end⟩ code distinct from all symbol codes and from each
/// other, with clean physical junctions. Uncovered cells stay A.
fn search_end_block(
    registry: &Registry,
    block_len: usize,
    offsets: &[usize; 6],
    a_block: &Strand,
    b_block: &Strand,
    end_pad: &Strand,
) -> Option<Strand> {
    let covered: Vec<usize> = (0..block_len)
        .filter(|&i| {
            State::ALL.iter().any(|&s| {
                let o = offsets[s.index()];
                (o..o + s.class().code_len()).contains(&i)
            })
        })
        .collect();
    let order = [Base::A, Base::C, Base::G, Base::T];
    let n = covered.len();
    let mut counter = vec![0usize; n];
    let symbol_codes: Vec<(StateClass, String)> = pair_codes()
        .into_iter()
        .map(|c| (c.state.class(), c.code.to_string()))
        .collect();
    loop {
        let mut cells = vec![Base::A; block_len];
        for (slot, &pos) in covered.iter().enumerate() {
            cells[pos] = order[counter[slot]];
        }
        let cand = Strand::new(cells);
        if end_codes_admissible(&cand, offsets, &symbol_codes)
            && junctions_clean(registry, &cand, a_block, b_block, end_pad)
        {
            return Some(cand);
        }
        // increment the base-4 counter, most significant (leftmost) first
        // so candidates come out in ascending lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if counter[i] < 3 {
                counter[i] += 1;
                break;
            }
            counter[i] = 0;
        }
    }
}

fn end_codes_admissible(
    cand: &Strand,
    offsets: &[usize; 6],
    symbol_codes: &[(StateClass, String)],
) -> bool {
    let mut seen: Vec<(StateClass, String)> = Vec::new();
    for s in State::ALL {
        let o = offsets[s.index()];
        let w = cand.slice(o..o + s.class().code_len());
        let code = match s.class() {
            StateClass::C4 => w,
            StateClass::C2 => w.complemented(),
        }
        .to_string();
        let clash = symbol_codes
            .iter()
            .chain(seen.iter())
            .any(|(cls, c)| *cls == s.class() && *c == code);
        if clash {
            return false;
        }
        seen.push((s.class(), code));
    }
    true
}

fn junctions_clean(
    registry: &Registry,
    end_block: &Strand,
    a_block: &Strand,
    b_block: &Strand,
    end_pad: &Strand,
) -> bool {
    let phys_end = end_block.complemented();
    let tails = [a_block.complemented(), b_block.complemented()];
    tails.iter().all(|t| !has_any_site(registry, &t.concat(&phys_end)))
        && !has_any_site(registry, &phys_end.concat(end_pad))
}
