//! DNA strand and duplex algebra: bases, complementarity, sticky ends,
//! ligation.
//!
//! A [`Duplex`] is stored as two 5'→3' strands plus a single integer
//! alignment; overhangs are derived from that geometry, never stored.
//! Coordinates are top-strand positions: the top strand occupies
//! `0..top.len()`, and bottom base `j` (counted 5'→3') sits at coordinate
//! `align + bottom.len() - 1 - j`, so the bottom strand runs antiparallel.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("invalid base character {0:?}")]
    BadBase(char),
    #[error("strand must be non-empty")]
    EmptyStrand,
    #[error("non-complementary pair at coordinate {coord}")]
    MismatchedPair { coord: i64 },
    #[error("paired region is not contiguous")]
    GapInPairing,
    #[error("strands share no coordinate")]
    NoOverlap,
    #[error("ends cannot be ligated")]
    IncompatibleEnds,
    #[error("record syntax error at line {line}: {msg}")]
    RecordSyntax { line: usize, msg: String },
}

/// A nucleotide. `N` is a first-class placeholder that pairs only with `N`;
/// it is instantiated to a concrete base only by the molecule compiler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    A,
    C,
    G,
    T,
    N,
}

impl Base {
    pub fn complement(self) -> Base {
        match self {
            Base::A => Base::T,
            Base::T => Base::A,
            Base::C => Base::G,
            Base::G => Base::C,
            Base::N => Base::N,
        }
    }

    pub fn from_char(c: char) -> Result<Base, SeqError> {
        match c.to_ascii_uppercase() {
            'A' => Ok(Base::A),
            'C' => Ok(Base::C),
            'G' => Ok(Base::G),
            'T' => Ok(Base::T),
            'N' => Ok(Base::N),
            other => Err(SeqError::BadBase(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
            Base::N => 'N',
        }
    }

    /// Watson-Crick pairing test; `N` pairs only with `N`.
    pub fn pairs_with(self, other: Base) -> bool {
        self.complement() == other
    }
}

/// An ordered run of bases, read 5'→3'.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Strand(Vec<Base>);

impl Strand {
    pub fn new(bases: Vec<Base>) -> Strand {
        Strand(bases)
    }

    pub fn parse(s: &str) -> Result<Strand, SeqError> {
        s.chars().map(Base::from_char).collect::<Result<_, _>>().map(Strand)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bases(&self) -> &[Base] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<Base> {
        self.0.get(i).copied()
    }

    /// Base-wise complement without reversal.
    pub fn complemented(&self) -> Strand {
        Strand(self.0.iter().map(|b| b.complement()).collect())
    }

    pub fn reversed(&self) -> Strand {
        Strand(self.0.iter().rev().copied().collect())
    }

    /// Reverse complement: the same physical strand read from the other end
    /// of its pairing partner. `revcomp(revcomp(s)) == s`.
    pub fn revcomp(&self) -> Strand {
        Strand(self.0.iter().rev().map(|b| b.complement()).collect())
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Strand {
        Strand(self.0[range].to_vec())
    }

    pub fn concat(&self, other: &Strand) -> Strand {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Strand(v)
    }

    pub fn repeat_n(count: usize) -> Strand {
        Strand(vec![Base::N; count])
    }

    pub fn contains_n(&self) -> bool {
        self.0.contains(&Base::N)
    }

    /// 0-based start positions of every occurrence of `pat` in `self`.
    pub fn find_all(&self, pat: &Strand) -> Vec<usize> {
        if pat.is_empty() || pat.len() > self.len() {
            return Vec::new();
        }
        (0..=self.len() - pat.len())
            .filter(|&i| self.0[i..i + pat.len()] == pat.0[..])
            .collect()
    }
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{}", b.to_char())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Strand {
    type Err = SeqError;
    fn from_str(s: &str) -> Result<Strand, SeqError> {
        Strand::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndKind {
    FivePrime,
    ThreePrime,
    Blunt,
}

/// Description of one duplex end: which side, which terminus protrudes, and
/// the protruding bases read 5'→3'. `seq` is empty iff the end is blunt.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StickyEnd {
    pub side: Side,
    pub kind: EndKind,
    pub seq: Strand,
}

impl StickyEnd {
    pub fn blunt(side: Side) -> StickyEnd {
        StickyEnd { side, kind: EndKind::Blunt, seq: Strand::default() }
    }
}

/// A double-stranded DNA molecule with explicit sticky ends.
///
/// Invariants, checked at construction:
/// - every doubly-occupied coordinate is Watson-Crick complementary,
/// - the two strands share at least one coordinate (so the paired region is
///   a single contiguous interval and each end carries at most one overhang).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Duplex {
    top: Strand,
    bottom: Strand,
    align: i64,
}

impl Duplex {
    /// Build and validate a duplex from two 5'→3' strands. `align` is the
    /// top-strand coordinate paired with the bottom strand's 3'-terminal
    /// base.
    pub fn from_strands(top: Strand, bottom: Strand, align: i64) -> Result<Duplex, SeqError> {
        if top.is_empty() || bottom.is_empty() {
            return Err(SeqError::EmptyStrand);
        }
        let d = Duplex { top, bottom, align };
        let (lo, hi) = match d.ds_range() {
            Some(r) => r,
            None => return Err(SeqError::NoOverlap),
        };
        for c in lo..=hi {
            let t = d.top_at(c).expect("ds coordinate has top base");
            let b = d.bottom_at(c).expect("ds coordinate has bottom base");
            if !t.pairs_with(b) {
                return Err(SeqError::MismatchedPair { coord: c });
            }
        }
        Ok(d)
    }

    /// A fully blunt duplex over `top` and its reverse complement.
    pub fn blunt(top: Strand) -> Result<Duplex, SeqError> {
        let bottom = top.revcomp();
        Duplex::from_strands(top, bottom, 0)
    }

    pub fn top(&self) -> &Strand {
        &self.top
    }

    pub fn bottom(&self) -> &Strand {
        &self.bottom
    }

    pub fn align(&self) -> i64 {
        self.align
    }

    /// Top base at a top-strand coordinate, if covered.
    pub fn top_at(&self, coord: i64) -> Option<Base> {
        if (0..self.top.len() as i64).contains(&coord) {
            self.top.get(coord as usize)
        } else {
            None
        }
    }

    /// Bottom base at a top-strand coordinate, if covered.
    pub fn bottom_at(&self, coord: i64) -> Option<Base> {
        let j = self.align + self.bottom.len() as i64 - 1 - coord;
        if (0..self.bottom.len() as i64).contains(&j) {
            self.bottom.get(j as usize)
        } else {
            None
        }
    }

    /// Inclusive coordinate range covered by either strand.
    pub fn span(&self) -> (i64, i64) {
        let top_end = self.top.len() as i64 - 1;
        let bot_lo = self.align;
        let bot_hi = self.align + self.bottom.len() as i64 - 1;
        (0.min(bot_lo), top_end.max(bot_hi))
    }

    /// Inclusive double-stranded interval, or `None` when the strands do not
    /// overlap.
    pub fn ds_range(&self) -> Option<(i64, i64)> {
        let lo = 0.max(self.align);
        let hi = (self.top.len() as i64 - 1).min(self.align + self.bottom.len() as i64 - 1);
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Number of coordinates covered by either strand.
    pub fn footprint(&self) -> usize {
        let (lo, hi) = self.span();
        (hi - lo + 1) as usize
    }

    /// Total nucleotide count over both strands.
    pub fn nucleotides(&self) -> usize {
        self.top.len() + self.bottom.len()
    }

    /// The overhang description of one end.
    pub fn end(&self, side: Side) -> StickyEnd {
        let top_end = self.top.len() as i64 - 1;
        let bot_hi = self.align + self.bottom.len() as i64 - 1;
        let end = match side {
            Side::Left => {
                if self.align > 0 {
                    // top-only coordinates 0..align: a protruding 5' terminus
                    StickyEnd {
                        side,
                        kind: EndKind::FivePrime,
                        seq: self.top.slice(0..self.align as usize),
                    }
                } else if self.align < 0 {
                    // bottom-only coordinates align..0: the bottom 3' tail
                    let n = (-self.align) as usize;
                    let len = self.bottom.len();
                    StickyEnd {
                        side,
                        kind: EndKind::ThreePrime,
                        seq: self.bottom.slice(len - n..len),
                    }
                } else {
                    StickyEnd::blunt(side)
                }
            }
            Side::Right => {
                if top_end > bot_hi {
                    StickyEnd {
                        side,
                        kind: EndKind::ThreePrime,
                        seq: self.top.slice((bot_hi + 1) as usize..(top_end + 1) as usize),
                    }
                } else if bot_hi > top_end {
                    // bottom-only coordinates top_end+1..=bot_hi: the bottom
                    // 5' head, i.e. bottom indices 0..(bot_hi - top_end)
                    let n = (bot_hi - top_end) as usize;
                    StickyEnd { side, kind: EndKind::FivePrime, seq: self.bottom.slice(0..n) }
                } else {
                    StickyEnd::blunt(side)
                }
            }
        };
        end.normalize()
    }

    pub fn is_blunt(&self) -> bool {
        self.end(Side::Left).kind == EndKind::Blunt && self.end(Side::Right).kind == EndKind::Blunt
    }

    /// The same molecule rotated 180°: top and bottom swap roles.
    pub fn flipped(&self) -> Duplex {
        Duplex {
            top: self.bottom.clone(),
            bottom: self.top.clone(),
            align: self.align + self.bottom.len() as i64 - self.top.len() as i64,
        }
    }

    /// Two-row rendering in coordinate space: top 5'→3', bottom 3'→5',
    /// aligned column by column with spaces over uncovered coordinates.
    pub fn render_two_row(&self) -> (String, String) {
        let (lo, hi) = self.span();
        let mut t = String::new();
        let mut b = String::new();
        for c in lo..=hi {
            t.push(self.top_at(c).map_or(' ', Base::to_char));
            b.push(self.bottom_at(c).map_or(' ', Base::to_char));
        }
        (format!("5'-{}-3'", t), format!("3'-{}-5'", b))
    }

    /// Stable text key used to identify a species: sequence plus alignment.
    pub fn canonical_key(&self) -> String {
        format!("{}|{}|{}", self.top, self.bottom, self.align)
    }
}

impl fmt::Display for Duplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (t, b) = self.render_two_row();
        write!(f, "{} / {}", t, b)
    }
}

/// True iff a right end and a left end can be sealed by ligase: equal
/// non-blunt kinds, equal lengths, and fully complementary protrusions
/// (`e2.seq == revcomp(e1.seq)`). Blunt ligation is disallowed.
pub fn can_ligate(e1: &StickyEnd, e2: &StickyEnd) -> bool {
    e1.side == Side::Right
        && e2.side == Side::Left
        && e1.kind != EndKind::Blunt
        && e1.kind == e2.kind
        && e1.seq.len() == e2.seq.len()
        && e2.seq == e1.seq.revcomp()
        && !e1.seq.contains_n()
}

/// Join `a`'s right end to `b`'s left end, sealing both nicks. The result's
/// footprint is `footprint(a) + footprint(b) - overhang`.
pub fn ligate(a: &Duplex, b: &Duplex) -> Result<Duplex, SeqError> {
    let e1 = a.end(Side::Right);
    let e2 = b.end(Side::Left);
    if !can_ligate(&e1, &e2) {
        return Err(SeqError::IncompatibleEnds);
    }
    // With compatible ends the joined molecule is plain strand
    // concatenation; a's alignment is unchanged because its bottom
    // 3'-terminal base keeps its coordinate.
    Duplex::from_strands(a.top.concat(&b.top), b.bottom.concat(&a.bottom), a.align)
}

impl StickyEnd {
    fn normalize(self) -> StickyEnd {
        if self.kind == EndKind::Blunt || self.seq.is_empty() {
            StickyEnd::blunt(self.side)
        } else {
            self
        }
    }
}

/// Text serialization of named duplex records.
///
/// One record is four lines: `>name`, `T5 <top 5'→3'>`, `B5 <bottom 5'→3'>`,
/// `ALIGN <integer>`. Lines starting with `#` are comments; files may hold
/// any number of records.
pub mod records {
    use super::{Duplex, SeqError, Strand};

    pub fn write_record(name: &str, d: &Duplex) -> String {
        format!(">{}\nT5 {}\nB5 {}\nALIGN {}\n", name, d.top(), d.bottom(), d.align())
    }

    pub fn write_records(records: &[(String, Duplex)]) -> String {
        records.iter().map(|(n, d)| write_record(n, d)).collect::<Vec<_>>().join("")
    }

    pub fn parse_records(text: &str) -> Result<Vec<(String, Duplex)>, SeqError> {
        let mut out = Vec::new();
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        while let Some((ln, line)) = lines.next() {
            let line = line.trim();
            let name = line
                .strip_prefix('>')
                .ok_or_else(|| SeqError::RecordSyntax {
                    line: ln + 1,
                    msg: format!("expected '>name', found {:?}", line),
                })?
                .trim()
                .to_string();
            let mut field = |tag: &str| -> Result<(usize, String), SeqError> {
                let (ln, l) = lines.next().ok_or(SeqError::RecordSyntax {
                    line: ln + 1,
                    msg: format!("unexpected end of record {:?}", name),
                })?;
                let rest = l.trim().strip_prefix(tag).ok_or_else(|| SeqError::RecordSyntax {
                    line: ln + 1,
                    msg: format!("expected {:?} line", tag),
                })?;
                Ok((ln + 1, rest.trim().to_string()))
            };
            let (_, top) = field("T5")?;
            let (_, bottom) = field("B5")?;
            let (aln_line, align) = field("ALIGN")?;
            let align: i64 = align.parse().map_err(|_| SeqError::RecordSyntax {
                line: aln_line,
                msg: format!("bad ALIGN value {:?}", align),
            })?;
            let d = Duplex::from_strands(Strand::parse(&top)?, Strand::parse(&bottom)?, align)?;
            out.push((name, d));
        }
        Ok(out)
    }
}
