//! Encoding validation: code distinctness, exposure correctness,
//! determinism, cross-talk and site hygiene. Failures are report entries,
//! never errors; a clean report is the precondition for deterministic
//! simulation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::enzyme::{cleave, find_sites, Registry};
use crate::fsa::Symbol;
use crate::seq::{can_ligate, ligate, Side};

use super::codes::{pair_codes, State, StateClass};
use super::encode::remnant_exposing;
use super::layout::BlockKind;
use super::CompiledMachine;

#[derive(Debug, Clone, Serialize)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, passed: bool, details: impl Into<String>) {
        self.checks.push(ValidationCheck {
            name: name.into(),
            passed,
            details: details.into(),
        });
    }

    pub fn error_count(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn is_clean(&self) -> bool {
        self.error_count() == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

const NEXT_KINDS: [BlockKind; 3] =
    [BlockKind::Sym(Symbol::A), BlockKind::Sym(Symbol::B), BlockKind::End];

fn kind_name(kind: BlockKind) -> String {
    match kind {
        BlockKind::Sym(s) => s.to_string(),
        BlockKind::End => "end".into(),
    }
}

pub(super) fn run_checks(machine: &CompiledMachine, registry: &Registry) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_code_distinctness(&mut report);
    check_exposure_correctness(machine, registry, &mut report);
    check_determinism(machine, &mut report);
    check_cross_talk(machine, &mut report);
    check_site_hygiene(machine, registry, &mut report);
    report
}

/// (a) the twelve pair codes are pairwise distinct within each class.
fn check_code_distinctness(report: &mut ValidationReport) {
    for class in [StateClass::C4, StateClass::C2] {
        let codes: Vec<String> = pair_codes()
            .into_iter()
            .filter(|c| c.state.class() == class)
            .map(|c| format!("{}", c.code))
            .collect();
        let mut sorted = codes.clone();
        sorted.sort();
        sorted.dedup();
        report.push(
            format!("code-distinctness-{:?}", class),
            sorted.len() == codes.len(),
            format!("{} codes, {} distinct", codes.len(), sorted.len()),
        );
    }
}

/// (b) for every rule and every possible next block, ligating the molecule
/// onto its exposure and cutting exposes exactly the destination's window.
fn check_exposure_correctness(
    machine: &CompiledMachine,
    registry: &Registry,
    report: &mut ValidationReport,
) {
    let layout = &machine.layout;
    for rule in &machine.rules {
        for next in NEXT_KINDS {
            let rest: Vec<BlockKind> = match next {
                BlockKind::End => vec![BlockKind::End],
                sym => vec![sym, BlockKind::End],
            };
            let remnant =
                remnant_exposing(rule.from, BlockKind::Sym(rule.symbol), &rest, layout);
            let name = format!("exposure-{}-next-{}", rule.molecule.label(), kind_name(next));
            let complex = match ligate(&rule.molecule.schematic, &remnant) {
                Ok(c) => c,
                Err(e) => {
                    report.push(name, false, format!("molecule does not ligate: {}", e));
                    continue;
                }
            };
            let enzyme = registry.get(&rule.molecule.enzyme).expect("compiled enzyme exists");
            let hit = find_sites(&complex, enzyme)
                .into_iter()
                .find(|h| h.position == 0)
                .expect("molecule site survives ligation");
            match cleave(&complex, enzyme, &hit) {
                Ok((_, new_remnant)) => {
                    let got = new_remnant.end(Side::Left);
                    let want = layout.exposure(rule.to, next);
                    report.push(
                        name,
                        got == want,
                        format!("exposed {:?} {}, expected {}", got.kind, got.seq, want.seq),
                    );
                }
                Err(e) => report.push(name, false, format!("cut failed: {}", e)),
            }
        }
    }
}

/// (c) determinism: no two molecules answer the same exposure.
fn check_determinism(machine: &CompiledMachine, report: &mut ValidationReport) {
    let mut by_exposure: BTreeMap<(State, Symbol), Vec<String>> = BTreeMap::new();
    for rule in &machine.rules {
        by_exposure
            .entry((rule.from, rule.symbol))
            .or_default()
            .push(rule.molecule.label());
    }
    let clashes: Vec<String> = by_exposure
        .iter()
        .filter(|(_, v)| v.len() > 1)
        .map(|((s, sym), v)| format!("exposure ({},{}) claimed by {}", s, sym, v.join(" and ")))
        .collect();
    report.push(
        "determinism",
        clashes.is_empty(),
        if clashes.is_empty() { "one molecule per exposure".into() } else { clashes.join("; ") },
    );
}

/// (d) cross-talk: every sticky end matches exactly its intended exposure,
/// across all 18 ⟨state, block⟩ exposures.
fn check_cross_talk(machine: &CompiledMachine, report: &mut ValidationReport) {
    let layout = &machine.layout;
    let mut bad = Vec::new();
    let probes = State::ALL
        .into_iter()
        .flat_map(|q| NEXT_KINDS.into_iter().map(move |k| (q, k)));
    for rule in &machine.rules {
        let tail = rule.molecule.schematic.end(Side::Right);
        for (q, kind) in probes.clone() {
            let intended = q == rule.from && kind == BlockKind::Sym(rule.symbol);
            if can_ligate(&tail, &layout.exposure(q, kind)) != intended {
                bad.push(format!(
                    "{} vs exposure ({},{})",
                    rule.molecule.label(),
                    q,
                    kind_name(kind)
                ));
            }
        }
    }
    for term in &machine.terminators {
        let tail = term.duplex.end(Side::Right);
        for (q, kind) in probes.clone() {
            let intended = q == term.state && kind == BlockKind::End;
            if can_ligate(&tail, &layout.exposure(q, kind)) != intended {
                bad.push(format!("term({}) vs exposure ({},{})", term.state, q, kind_name(kind)));
            }
        }
    }
    report.push(
        "cross-talk",
        bad.is_empty(),
        if bad.is_empty() { "all sticky ends specific".into() } else { bad.join("; ") },
    );
}

/// (e) instantiated molecules carry exactly one active site; terminators
/// none, and a ligated terminator leaves no cuttable site.
fn check_site_hygiene(
    machine: &CompiledMachine,
    registry: &Registry,
    report: &mut ValidationReport,
) {
    for rule in &machine.rules {
        let count = total_sites(&rule.duplex, registry);
        report.push(
            format!("single-site-{}", rule.molecule.label()),
            count == 1,
            format!("{} recognition sites across registry", count),
        );
    }
    for term in &machine.terminators {
        let count = total_sites(&term.duplex, registry);
        let remnant = remnant_exposing(term.state, BlockKind::End, &[], &machine.layout);
        let capped = ligate(&term.duplex, &remnant);
        let cap_ok = match &capped {
            Ok(capped) => registry.iter().all(|e| {
                find_sites(capped, e).iter().all(|h| cleave(capped, e, h).is_err())
            }),
            Err(_) => false,
        };
        report.push(
            format!("terminator-caps-{}", term.state),
            count == 0 && cap_ok,
            format!("{} sites in tail; capped product inert: {}", count, cap_ok),
        );
    }
}

fn total_sites(d: &crate::seq::Duplex, registry: &Registry) -> usize {
    registry.iter().map(|e| find_sites(d, e).len()).sum()
}
