//! The published reference table of all 72 transition codes, bundled
//! verbatim as a fixture, and the classifier that diffs it against the
//! constraint-derived generator.
//!
//! "Verbatim match" compares the canonical content of a row: recognition
//! site, top-strand spacer count and the tail. Printed bottom-strand spacer
//! counts are not part of the comparison because several rows print
//! bottoms that disagree with their own tops (a physical molecule needs
//! equal coverage); such skews are annotated instead. Rows whose canonical
//! content cannot be reconciled with the derived layout must appear in the
//! pre-built discrepancy ledger.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::fsa::Symbol;

use super::codes::State;
use super::encode::encode_transition;
use super::layout::Layout;

pub const TABLE_FIXTURE: &str = include_str!("../../data/transition_table.txt");
pub const LEDGER_FIXTURE: &str = include_str!("../../data/table_ledger.txt");

/// One reference-table row as printed: rule label plus the two strands.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub id: String,
    pub from: State,
    pub symbol: Symbol,
    pub to: State,
    /// Top strand as printed, 5'→3'.
    pub top: String,
    /// Bottom strand as printed, 3'→5'.
    pub bottom: String,
}

impl TableRow {
    pub fn rule_label(&self) -> String {
        format!("{} -{}-> {}", self.from, self.symbol, self.to)
    }
}

pub fn reference_table() -> &'static [TableRow] {
    static ROWS: OnceLock<Vec<TableRow>> = OnceLock::new();
    ROWS.get_or_init(|| parse_table(TABLE_FIXTURE).expect("bundled table parses"))
}

fn parse_table(text: &str) -> Result<Vec<TableRow>, String> {
    let mut rows = Vec::new();
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    while let Some(header) = lines.next() {
        let (id, rule) = header.split_once(':').ok_or_else(|| format!("bad header {header:?}"))?;
        let fields: Vec<&str> = rule.split_whitespace().collect();
        let [from, symbol, to] = fields.as_slice() else {
            return Err(format!("bad rule in {header:?}"));
        };
        let strip = |line: &str, l: &str, r: &str| -> Result<String, String> {
            line.strip_prefix(l)
                .and_then(|s| s.strip_suffix(r))
                .map(str::to_string)
                .ok_or_else(|| format!("bad strand line {line:?}"))
        };
        let top = strip(lines.next().ok_or("missing top strand")?, "5'-", "-3'")?;
        let bottom = strip(lines.next().ok_or("missing bottom strand")?, "3'-", "-5'")?;
        rows.push(TableRow {
            id: id.trim().to_string(),
            from: State::parse(from).ok_or_else(|| format!("bad state {from:?}"))?,
            symbol: Symbol::from_char(symbol.chars().next().unwrap_or('?'))
                .map_err(|e| e.to_string())?,
            to: State::parse(to).ok_or_else(|| format!("bad state {to:?}"))?,
            top,
            bottom,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct LedgerEntry {
    pub id: String,
    pub kind: String,
    pub note: String,
}

pub fn discrepancy_ledger() -> &'static [LedgerEntry] {
    static ENTRIES: OnceLock<Vec<LedgerEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        LEDGER_FIXTURE
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let mut parts = l.splitn(3, '|').map(str::trim);
                LedgerEntry {
                    id: parts.next().unwrap_or_default().to_string(),
                    kind: parts.next().unwrap_or_default().to_string(),
                    note: parts.next().unwrap_or_default().to_string(),
                }
            })
            .collect()
    })
}

/// Canonical content of a printed or generated row.
#[derive(Debug, Clone, PartialEq, Eq)]
struct CanonRow {
    site: String,
    top_spacers: usize,
    top_tail: String,
    bottom_spacers: usize,
    bottom_tail: String,
}

fn canonize(layout: &Layout, top: &str, bottom: &str) -> Result<CanonRow, String> {
    let sites = [layout.c4_enzyme.recognition.to_string(), layout.c2_enzyme.recognition.to_string()];
    let site = sites
        .iter()
        .find(|s| top.starts_with(*s))
        .cloned()
        .ok_or_else(|| format!("top strand {top:?} starts with no known site"))?;
    let comp_site: String = site
        .chars()
        .map(|c| match c {
            'A' => 'T',
            'T' => 'A',
            'C' => 'G',
            _ => 'C',
        })
        .collect();
    let split = |rest: &str| -> (usize, String) {
        let spacers = rest.chars().take_while(|&c| c == 'N').count();
        (spacers, rest[spacers..].to_string())
    };
    let (top_spacers, top_tail) = split(&top[site.len()..]);
    let rest_bottom = bottom
        .strip_prefix(&comp_site)
        .ok_or_else(|| format!("bottom strand {bottom:?} does not complement the site"))?;
    let (bottom_spacers, bottom_tail) = split(rest_bottom);
    if top_tail.contains('N') || bottom_tail.contains('N') {
        return Err(format!("interleaved N runs in {top:?} / {bottom:?}"));
    }
    Ok(CanonRow { site, top_spacers, top_tail, bottom_spacers, bottom_tail })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowClass {
    ExactMatch,
    KnownDiscrepancy,
    Mismatch,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowDiff {
    pub id: String,
    pub rule: String,
    pub class: RowClass,
    pub printed_top: String,
    pub printed_bottom: String,
    pub generated_top: String,
    pub generated_bottom: String,
    /// Ledger kind for known discrepancies.
    pub ledger_kind: Option<String>,
    /// Annotation on otherwise-exact rows (bottom-strand spacer skew).
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffReport {
    pub rows: Vec<RowDiff>,
}

impl DiffReport {
    pub fn count(&self, class: RowClass) -> usize {
        self.rows.iter().filter(|r| r.class == class).count()
    }

    /// True when every row is a verbatim match or ledgered.
    pub fn fully_classified(&self) -> bool {
        self.count(RowClass::Mismatch) == 0
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let tag = match r.class {
                RowClass::ExactMatch => "exact",
                RowClass::KnownDiscrepancy => "ledgered",
                RowClass::Mismatch => "MISMATCH",
            };
            write!(f, "{:<4} {:<14} {:<9}", r.id, r.rule, tag)?;
            if let Some(kind) = &r.ledger_kind {
                write!(f, " [{}]", kind)?;
            }
            if r.class != RowClass::ExactMatch {
                write!(
                    f,
                    "  printed {} / {}  generated {} / {}",
                    r.printed_top, r.printed_bottom, r.generated_top, r.generated_bottom
                )?;
            } else if let Some(note) = &r.note {
                write!(f, "  ({})", note)?;
            }
            writeln!(f)?;
        }
        writeln!(
            f,
            "{} rows: {} exact, {} ledgered, {} mismatched",
            self.rows.len(),
            self.count(RowClass::ExactMatch),
            self.count(RowClass::KnownDiscrepancy),
            self.count(RowClass::Mismatch)
        )
    }
}

/// Compare the generator's output for every reference-table row against the
/// printed form, classifying each row.
pub fn table_diff(layout: &Layout) -> DiffReport {
    let ledger = discrepancy_ledger();
    let rows = reference_table()
        .iter()
        .map(|row| {
            let m = encode_transition(row.from, row.symbol, row.to, layout);
            let generated_top = m.schematic.top().to_string();
            let generated_bottom = m.schematic.bottom().reversed().to_string();
            let printed = canonize(layout, &row.top, &row.bottom);
            let generated = canonize(layout, &generated_top, &generated_bottom)
                .expect("generated rows are canonical");
            let verbatim = printed.as_ref().is_ok_and(|p| {
                p.site == generated.site
                    && p.top_spacers == generated.top_spacers
                    && p.top_tail == generated.top_tail
                    && p.bottom_tail == generated.bottom_tail
            });
            let ledger_entry = ledger.iter().find(|e| e.id == row.id);
            let class = if verbatim {
                RowClass::ExactMatch
            } else if ledger_entry.is_some() {
                RowClass::KnownDiscrepancy
            } else {
                RowClass::Mismatch
            };
            let note = match (&printed, class) {
                (Ok(p), RowClass::ExactMatch) if p.bottom_spacers != p.top_spacers => {
                    Some(format!(
                        "printed bottom shows {} spacers where the top shows {}",
                        p.bottom_spacers, p.top_spacers
                    ))
                }
                _ => None,
            };
            RowDiff {
                id: row.id.clone(),
                rule: row.rule_label(),
                class,
                printed_top: row.top.clone(),
                printed_bottom: row.bottom.clone(),
                generated_top,
                generated_bottom,
                ledger_kind: ledger_entry.map(|e| e.kind.clone()),
                note,
            }
        })
        .collect();
    DiffReport { rows }
}
