//! Parametric model of Type IIS restriction endonucleases.
//!
//! A Type IIS enzyme binds a recognition site but cuts at fixed offsets
//! *outside* it, so the exposed overhang sequence is site-independent.
//! Offsets are counted in nucleotides from the site's 3' end: `cut_top` on
//! the recognition strand, `cut_bottom` on the complementary strand. The
//! offset difference fixes the overhang: `cut_bottom > cut_top` gives a 5'
//! overhang, `cut_top > cut_bottom` a 3' overhang, equal offsets blunt ends.

use std::sync::OnceLock;

use thiserror::Error;

use crate::seq::{Duplex, EndKind, SeqError, Strand};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnzymeError {
    #[error("invalid enzyme spec: {0}")]
    BadSpec(String),
    #[error("hit is not a site of this enzyme on this duplex")]
    InvalidHit,
    #[error("cut window falls outside the double-stranded region; the site binds but cannot cut")]
    InertSite,
    #[error("registry syntax error at line {line}: {msg}")]
    RegistryParse { line: usize, msg: String },
    #[error("unknown enzyme {0:?}")]
    UnknownEnzyme(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnzymeSpec {
    pub name: String,
    /// Recognition sequence, 5'→3' on the recognition strand.
    pub recognition: Strand,
    /// Cut distance from the site's 3' end on the recognition strand.
    pub cut_top: usize,
    /// Cut distance from the site's 3' end on the complementary strand.
    pub cut_bottom: usize,
}

impl EnzymeSpec {
    pub fn new(
        name: &str,
        recognition: &str,
        cut_top: usize,
        cut_bottom: usize,
    ) -> Result<EnzymeSpec, EnzymeError> {
        let recognition = Strand::parse(recognition)?;
        if recognition.len() < 4 {
            return Err(EnzymeError::BadSpec(format!(
                "{}: recognition length {} < 4",
                name,
                recognition.len()
            )));
        }
        if recognition.contains_n() {
            return Err(EnzymeError::BadSpec(format!("{}: recognition contains N", name)));
        }
        Ok(EnzymeSpec { name: name.to_string(), recognition, cut_top, cut_bottom })
    }

    /// Overhang kind and length produced by this enzyme's cut geometry.
    pub fn overhang_signature(&self) -> (EndKind, usize) {
        use std::cmp::Ordering::*;
        match self.cut_bottom.cmp(&self.cut_top) {
            Greater => (EndKind::FivePrime, self.cut_bottom - self.cut_top),
            Less => (EndKind::ThreePrime, self.cut_top - self.cut_bottom),
            Equal => (EndKind::Blunt, 0),
        }
    }

    pub fn site_len(&self) -> usize {
        self.recognition.len()
    }

    /// Offset from the site's 3' end to the near edge of the cut window,
    /// i.e. where the exposed overhang window starts.
    pub fn window_offset(&self) -> usize {
        self.cut_top.min(self.cut_bottom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    /// Recognition sequence on the top strand.
    Forward,
    /// Recognition sequence on the bottom strand.
    Reverse,
}

/// One recognition-site occurrence. `position` is the leftmost top-strand
/// coordinate of the site's span for both orientations; the whole span is
/// double-stranded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteHit {
    pub position: i64,
    pub orientation: Orientation,
}

/// All fully double-stranded occurrences of the enzyme's site, forward and
/// reverse, sorted by position (forward first at equal positions). Sites in
/// single-stranded regions are invisible.
pub fn find_sites(d: &Duplex, e: &EnzymeSpec) -> Vec<SiteHit> {
    let len = e.site_len() as i64;
    let ds = d.ds_range();
    let mut hits = Vec::new();
    let mut scan = |pat: &Strand, orientation: Orientation| {
        for p in d.top().find_all(pat) {
            let p = p as i64;
            let within_ds = matches!(ds, Some((lo, hi)) if p >= lo && p + len - 1 <= hi);
            if within_ds {
                hits.push(SiteHit { position: p, orientation });
            }
        }
    };
    scan(&e.recognition, Orientation::Forward);
    scan(&e.recognition.revcomp(), Orientation::Reverse);
    hits.sort();
    hits
}

/// Top- and bottom-strand cut boundaries for a hit, as top coordinates.
/// A boundary `x` separates coordinate `x - 1` from coordinate `x`.
fn cut_boundaries(e: &EnzymeSpec, hit: &SiteHit) -> (i64, i64) {
    let len = e.site_len() as i64;
    match hit.orientation {
        Orientation::Forward => {
            (hit.position + len + e.cut_top as i64, hit.position + len + e.cut_bottom as i64)
        }
        // The site reads leftward on the bottom strand, so the cut window
        // lies to the left of the span.
        Orientation::Reverse => {
            (hit.position - e.cut_bottom as i64, hit.position - e.cut_top as i64)
        }
    }
}

/// Cleave `d` at `hit`, producing the left and right fragments. The new ends
/// carry `e.overhang_signature()`; re-ligating the fragments recreates a
/// duplex sequence-identical to `d`.
pub fn cleave(d: &Duplex, e: &EnzymeSpec, hit: &SiteHit) -> Result<(Duplex, Duplex), EnzymeError> {
    if !find_sites(d, e).contains(hit) {
        return Err(EnzymeError::InvalidHit);
    }
    let (t, b) = cut_boundaries(e, hit);
    let (lo, hi) = d.ds_range().expect("valid duplex has a ds region");
    // Both boundaries must sit strictly inside the double-stranded region,
    // otherwise the enzyme binds but cannot cut.
    for x in [t, b] {
        if x <= lo || x > hi {
            return Err(EnzymeError::InertSite);
        }
    }
    let lb = d.bottom().len() as i64;
    let split = (lb + d.align() - b) as usize; // bottom index of the cut
    let left = Duplex::from_strands(
        d.top().slice(0..t as usize),
        d.bottom().slice(split..lb as usize),
        d.align(),
    )
    .expect("left fragment inherits validity");
    let right = Duplex::from_strands(
        d.top().slice(t as usize..d.top().len()),
        d.bottom().slice(0..split),
        b - t,
    )
    .expect("right fragment inherits validity");
    Ok((left, right))
}

/// Repeatedly cleave the leftmost cuttable hit (forward before reverse)
/// until none remains. The fragment multiset is independent of cut order
/// whenever cut windows do not interact.
pub fn digest(d: &Duplex, enzymes: &[&EnzymeSpec]) -> Vec<Duplex> {
    let mut out = Vec::new();
    let mut work = vec![d.clone()];
    while let Some(cur) = work.pop() {
        let mut cuttable = enzymes
            .iter()
            .flat_map(|e| find_sites(&cur, e).into_iter().map(move |h| (h, *e)))
            .filter(|(h, e)| {
                let (t, b) = cut_boundaries(e, h);
                matches!(cur.ds_range(), Some((lo, hi)) if t > lo && t <= hi && b > lo && b <= hi)
            })
            .collect::<Vec<_>>();
        cuttable.sort_by_key(|(h, _)| *h);
        match cuttable.first() {
            None => out.push(cur),
            Some((hit, e)) => {
                let (l, r) = cleave(&cur, e, hit).expect("checked cuttable");
                // keep left-to-right output order: process left next
                work.push(r);
                work.push(l);
            }
        }
    }
    out
}

/// Enzyme registry, loadable from a text file: one enzyme per line,
/// `NAME RECOGNITION CUT_TOP CUT_BOTTOM`, `#` starts a comment.
#[derive(Debug, Clone)]
pub struct Registry {
    enzymes: Vec<EnzymeSpec>,
}

pub const BUILTIN_REGISTRY: &str = include_str!("../data/enzymes.txt");

impl Registry {
    pub fn parse(text: &str) -> Result<Registry, EnzymeError> {
        let mut enzymes = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(EnzymeError::RegistryParse {
                    line: i + 1,
                    msg: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let cut = |s: &str| {
                s.parse::<usize>().map_err(|_| EnzymeError::RegistryParse {
                    line: i + 1,
                    msg: format!("bad cut offset {:?}", s),
                })
            };
            enzymes.push(EnzymeSpec::new(fields[0], fields[1], cut(fields[2])?, cut(fields[3])?)?);
        }
        Ok(Registry { enzymes })
    }

    /// The bundled registry (AcuI, BbvI, FokI).
    pub fn builtin() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| Registry::parse(BUILTIN_REGISTRY).expect("bundled registry parses"))
    }

    pub fn get(&self, name: &str) -> Result<&EnzymeSpec, EnzymeError> {
        self.enzymes
            .iter()
            .find(|e| e.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| EnzymeError::UnknownEnzyme(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &EnzymeSpec> {
        self.enzymes.iter()
    }
}
