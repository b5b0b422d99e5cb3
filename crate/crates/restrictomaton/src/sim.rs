//! One-pot reaction simulator: a multiset of duplex species under enzyme
//! and ligase action, with deterministic and exhaustive exploration modes
//! plus gel-style reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::compile::{CompileError, CompiledMachine};
use crate::enzyme::{cleave, find_sites, Registry, SiteHit};
use crate::fsa::Symbol;
use crate::seq::{can_ligate, ligate, Duplex, Side};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("ambiguous step (encoding cross-talk): {}", events.join("; "))]
    AmbiguousStep { events: Vec<String> },
    #[error(transparent)]
    Compile(#[from] CompileError),
}

/// Species multiplicity. Software molecules default to `Unbounded`
/// ("fuel"): the reaction supplies them in molar excess.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Count {
    Finite(u64),
    Unbounded,
}

impl Count {
    fn dec(self) -> Count {
        match self {
            Count::Finite(n) => Count::Finite(n.saturating_sub(1)),
            Count::Unbounded => Count::Unbounded,
        }
    }

    fn add(self, n: u64) -> Count {
        match self {
            Count::Finite(m) => Count::Finite(m + n),
            Count::Unbounded => Count::Unbounded,
        }
    }

    fn is_zero(self) -> bool {
        self == Count::Finite(0)
    }
}

impl Serialize for Count {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n),
            Count::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "x{}", n),
            Count::Unbounded => write!(f, "excess"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub duplex: Duplex,
    pub label: String,
    pub count: Count,
    /// Spent cleavage leftovers: they stay in the pot (mass, gel bands)
    /// but no longer take part in events. Computation flows rightward;
    /// the departing fragment carries the used site away.
    pub waste: bool,
}

/// The reaction state: a multiset of duplex species keyed by canonical
/// form, plus the enzyme set and the ligase switch. Values are immutable
/// snapshots; applying an event yields a new pot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pot {
    species: BTreeMap<String, Species>,
    pub enzymes: Vec<String>,
    pub ligase_active: bool,
    fragment_counter: u64,
}

impl Pot {
    pub fn new(enzymes: Vec<String>) -> Pot {
        Pot { species: BTreeMap::new(), enzymes, ligase_active: true, fragment_counter: 0 }
    }

    fn key_of(duplex: &Duplex, waste: bool) -> String {
        format!("{}{}", if waste { "!" } else { "" }, duplex.canonical_key())
    }

    pub fn add(&mut self, duplex: Duplex, label: &str, count: Count, waste: bool) {
        let key = Pot::key_of(&duplex, waste);
        self.species
            .entry(key)
            .and_modify(|s| {
                s.count = match count {
                    Count::Finite(n) => s.count.add(n),
                    Count::Unbounded => Count::Unbounded,
                }
            })
            .or_insert(Species { duplex, label: label.to_string(), count, waste });
    }

    pub fn species(&self) -> impl Iterator<Item = &Species> {
        self.species.values().filter(|s| !s.count.is_zero())
    }

    fn live(&self) -> impl Iterator<Item = (&String, &Species)> {
        self.species.iter().filter(|(_, s)| !s.count.is_zero() && !s.waste)
    }

    pub fn get(&self, key: &str) -> Option<&Species> {
        self.species.get(key)
    }

    /// Label-independent canonical signature, used to deduplicate pots.
    pub fn signature(&self) -> PotSignature {
        self.species
            .iter()
            .filter(|(_, s)| !s.count.is_zero())
            .map(|(k, s)| (k.clone(), s.count, s.waste))
            .collect()
    }
}

/// Label-independent canonical form of a pot: (species key, count, waste).
pub type PotSignature = Vec<(String, Count, bool)>;

/// An event that can fire on a pot. Cleavages order before ligations, then
/// lexicographically by species key; the ordering makes deterministic runs
/// reproducible, never correct.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Event {
    Cleavage { species: String, enzyme: String, hit: SiteHit },
    Ligation { left: String, right: String },
}

impl Event {
    fn describe(&self, pot: &Pot) -> String {
        let name = |k: &String| pot.get(k).map_or_else(|| k.clone(), |s| s.label.clone());
        match self {
            Event::Cleavage { species, enzyme, hit } => {
                format!("cleave {} with {} at {}", name(species), enzyme, hit.position)
            }
            Event::Ligation { left, right } => {
                format!("ligate {} + {}", name(left), name(right))
            }
        }
    }
}

/// All events enabled on the pot: every cuttable site on a live species,
/// and every ligatable ordered pair of live species.
pub fn enabled_events(pot: &Pot, registry: &Registry) -> Vec<Event> {
    let mut events = Vec::new();
    for (key, sp) in pot.live() {
        for enzyme_name in &pot.enzymes {
            let Ok(e) = registry.get(enzyme_name) else { continue };
            for hit in find_sites(&sp.duplex, e) {
                if cleave(&sp.duplex, e, &hit).is_ok() {
                    events.push(Event::Cleavage {
                        species: key.clone(),
                        enzyme: e.name.clone(),
                        hit,
                    });
                }
            }
        }
    }
    if pot.ligase_active {
        for (lk, ls) in pot.live() {
            for (rk, rs) in pot.live() {
                if lk == rk && ls.count == Count::Finite(1) {
                    continue; // a single unit cannot ligate to itself
                }
                if can_ligate(&ls.duplex.end(Side::Right), &rs.duplex.end(Side::Left)) {
                    events.push(Event::Ligation { left: lk.clone(), right: rk.clone() });
                }
            }
        }
    }
    events.sort();
    events
}

/// One recorded reaction step, in the serialized trace schema.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TraceEvent {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enzyme: Option<String>,
    pub species_in: Vec<String>,
    pub species_out: Vec<String>,
}

/// Apply one event, producing the successor pot and its trace record.
pub fn apply(pot: &Pot, event: &Event, registry: &Registry) -> (Pot, TraceEvent) {
    let mut next = pot.clone();
    next.fragment_counter += 1;
    let n = next.fragment_counter;
    match event {
        Event::Cleavage { species, enzyme, hit } => {
            let sp = pot.get(species).expect("event references a pot species").clone();
            let e = registry.get(enzyme).expect("pot enzymes resolve");
            let (left, right) = cleave(&sp.duplex, e, hit).expect("event was enabled");
            next.species.get_mut(species).unwrap().count =
                next.species[species].count.dec();
            // the left fragment departs with the spent site; the right
            // fragment carries the computation
            let left_label = format!("waste#{}", n);
            let right_label = format!("remnant#{}", n);
            next.add(left, &left_label, Count::Finite(1), true);
            next.add(right, &right_label, Count::Finite(1), false);
            (
                next,
                TraceEvent {
                    kind: "cleavage".into(),
                    enzyme: Some(enzyme.clone()),
                    species_in: vec![sp.label],
                    species_out: vec![left_label, right_label],
                },
            )
        }
        Event::Ligation { left, right } => {
            let ls = pot.get(left).expect("event references a pot species").clone();
            let rs = pot.get(right).expect("event references a pot species").clone();
            let joined = ligate(&ls.duplex, &rs.duplex).expect("event was enabled");
            next.species.get_mut(left).unwrap().count = next.species[left].count.dec();
            next.species.get_mut(right).unwrap().count = next.species[right].count.dec();
            let label = format!("complex#{}", n);
            next.add(joined, &label, Count::Finite(1), false);
            (
                next,
                TraceEvent {
                    kind: "ligation".into(),
                    enzyme: None,
                    species_in: vec![ls.label, rs.label],
                    species_out: vec![label],
                },
            )
        }
    }
}

fn is_terminator_ligation(pot: &Pot, event: &Event) -> bool {
    match event {
        Event::Ligation { left, .. } => {
            pot.get(left).is_some_and(|s| s.label.starts_with("term("))
        }
        Event::Cleavage { .. } => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    TerminatorLigated,
    Stalled,
    DepthExceeded,
}

/// Outcome of one simulated trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub accepted: bool,
    pub halt_reason: HaltReason,
    pub events: Vec<TraceEvent>,
    pub bands: Vec<GelBand>,
    #[serde(skip)]
    pub final_pot: Pot,
}

/// Step budget with margin: a correct run needs `2·(n+1)` events, so
/// anything past this is a livelocked encoding bug.
pub fn default_max_steps(word_len: usize) -> usize {
    4 * (word_len + 2)
}

/// Seed a pot for one machine and input word: the encoded input (count 1),
/// every transition molecule and terminator as fuel, both class enzymes,
/// ligase on.
pub fn seed_pot(
    machine: &CompiledMachine,
    word: &[Symbol],
    registry: &Registry,
    fuel: Count,
) -> Result<Pot, SimError> {
    let input = machine.encode_input(word, registry)?;
    let mut pot = Pot::new(vec![
        machine.layout.c2_enzyme.name.clone(),
        machine.layout.c4_enzyme.name.clone(),
    ]);
    pot.add(input, &format!("input({})", crate::fsa::word_string(word)), Count::Finite(1), false);
    for rule in &machine.rules {
        pot.add(rule.duplex.clone(), &rule.molecule.label(), fuel, false);
    }
    for term in &machine.terminators {
        pot.add(term.duplex.clone(), &format!("term({})", term.state), fuel, false);
    }
    Ok(pot)
}

/// Run the single enabled event until the pot halts. More than one enabled
/// event is an encoding error, not a branch.
pub fn run_deterministic(
    pot: &Pot,
    registry: &Registry,
    max_steps: usize,
) -> Result<SimResult, SimError> {
    let mut pot = pot.clone();
    let mut events = Vec::new();
    loop {
        let enabled = enabled_events(&pot, registry);
        match enabled.len() {
            0 => {
                return Ok(SimResult {
                    accepted: false,
                    halt_reason: HaltReason::Stalled,
                    events,
                    bands: gel_report(&pot),
                    final_pot: pot,
                })
            }
            1 => {
                if events.len() >= max_steps {
                    return Ok(SimResult {
                        accepted: false,
                        halt_reason: HaltReason::DepthExceeded,
                        events,
                        bands: gel_report(&pot),
                        final_pot: pot,
                    });
                }
                let accept = is_terminator_ligation(&pot, &enabled[0]);
                let (next, ev) = apply(&pot, &enabled[0], registry);
                pot = next;
                events.push(ev);
                if accept {
                    return Ok(SimResult {
                        accepted: true,
                        halt_reason: HaltReason::TerminatorLigated,
                        events,
                        bands: gel_report(&pot),
                        final_pot: pot,
                    });
                }
            }
            _ => {
                return Err(SimError::AmbiguousStep {
                    events: enabled.iter().map(|e| e.describe(&pot)).collect(),
                })
            }
        }
    }
}

/// Depth-bounded exploration of every event interleaving. Results are
/// deduplicated by final pot; acceptance of the set is "any branch ligated
/// a terminator". Deterministic machines yield a singleton.
pub fn run_exhaustive(pot: &Pot, registry: &Registry, depth: usize) -> Vec<SimResult> {
    run_exhaustive_jobs(pot, registry, depth, 1)
}

/// What expanding one frontier node produces.
struct Expansion {
    finished: Vec<SimResult>,
    children: Vec<(Pot, Vec<TraceEvent>)>,
}

fn expand(pot: Pot, events: Vec<TraceEvent>, registry: &Registry, depth: usize) -> Expansion {
    let enabled = enabled_events(&pot, registry);
    let mut finished = Vec::new();
    let mut children = Vec::new();
    if enabled.is_empty() {
        finished.push(SimResult {
            accepted: false,
            halt_reason: HaltReason::Stalled,
            bands: gel_report(&pot),
            events,
            final_pot: pot,
        });
    } else if events.len() >= depth {
        finished.push(SimResult {
            accepted: false,
            halt_reason: HaltReason::DepthExceeded,
            bands: gel_report(&pot),
            events,
            final_pot: pot,
        });
    } else {
        for ev in enabled {
            let accept = is_terminator_ligation(&pot, &ev);
            let (next, traced) = apply(&pot, &ev, registry);
            let mut next_events = events.clone();
            next_events.push(traced);
            if accept {
                finished.push(SimResult {
                    accepted: true,
                    halt_reason: HaltReason::TerminatorLigated,
                    bands: gel_report(&next),
                    events: next_events,
                    final_pot: next,
                });
            } else {
                children.push((next, next_events));
            }
        }
    }
    Expansion { finished, children }
}

/// Level-synchronous variant: each frontier level may be expanded on
/// `jobs` threads. Expansion of a node is pure and the merge order is the
/// frontier order, so the result set does not depend on `jobs`.
pub fn run_exhaustive_jobs(
    pot: &Pot,
    registry: &Registry,
    depth: usize,
    jobs: usize,
) -> Vec<SimResult> {
    let jobs = jobs.max(1);
    let mut results: BTreeMap<(PotSignature, HaltReason), SimResult> = BTreeMap::new();
    let mut seen: BTreeSet<(PotSignature, usize)> = BTreeSet::new();
    let mut frontier: Vec<(Pot, Vec<TraceEvent>)> = vec![(pot.clone(), Vec::new())];
    while !frontier.is_empty() {
        frontier.retain(|(p, ev)| seen.insert((p.signature(), ev.len())));
        let expansions: Vec<Expansion> = if jobs == 1 || frontier.len() == 1 {
            frontier.drain(..).map(|(p, ev)| expand(p, ev, registry, depth)).collect()
        } else {
            let nodes = std::mem::take(&mut frontier);
            let chunk = nodes.len().div_ceil(jobs);
            std::thread::scope(|scope| {
                let handles: Vec<_> = nodes
                    .chunks(chunk)
                    .map(|c| {
                        let c = c.to_vec();
                        scope.spawn(move || {
                            c.into_iter()
                                .map(|(p, ev)| expand(p, ev, registry, depth))
                                .collect::<Vec<_>>()
                        })
                    })
                    .collect();
                handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
            })
        };
        for exp in expansions {
            for r in exp.finished {
                results.entry((r.final_pot.signature(), r.halt_reason)).or_insert(r);
            }
            frontier.extend(exp.children);
        }
    }
    results.into_values().collect()
}

pub fn any_accepted(results: &[SimResult]) -> bool {
    results.iter().any(|r| r.accepted)
}

/// A gel band: all species of one footprint length co-migrate.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GelBand {
    pub length_bp: usize,
    pub count: Count,
}

/// Band report over every species in the pot (waste included; it runs on
/// the gel like everything else), sorted descending by length.
pub fn gel_report(pot: &Pot) -> Vec<GelBand> {
    let mut by_len: BTreeMap<usize, Count> = BTreeMap::new();
    for sp in pot.species() {
        let total_units = sp.count;
        by_len
            .entry(sp.duplex.footprint())
            .and_modify(|c| {
                *c = match (*c, total_units) {
                    (Count::Finite(a), Count::Finite(b)) => Count::Finite(a + b),
                    _ => Count::Unbounded,
                }
            })
            .or_insert(total_units);
    }
    by_len.into_iter().rev().map(|(length_bp, count)| GelBand { length_bp, count }).collect()
}

/// ASCII gel: sample bands next to a synthetic 100 bp ladder, bar width
/// scaled to log(length) the way migration distance compresses.
pub fn render_gel(bands: &[GelBand]) -> String {
    let max_len = bands.iter().map(|b| b.length_bp).max().unwrap_or(0);
    let top = max_len.div_ceil(100).max(1) * 100;
    let ladder: BTreeSet<usize> = (1..=top / 100).map(|i| i * 100).collect();
    let mut rows: Vec<usize> = bands.iter().map(|b| b.length_bp).chain(ladder.iter().copied()).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.reverse();
    let bar = |len: usize| "=".repeat(((len.max(2) as f64).log10() * 8.0).round() as usize);
    let mut out = String::new();
    out.push_str(&format!("{:>6}  {:<20} {}\n", "bp", "M (100 bp ladder)", "sample"));
    for len in rows {
        let m = if ladder.contains(&len) { bar(len) } else { String::new() };
        let sample = bands
            .iter()
            .find(|b| b.length_bp == len)
            .map(|b| format!("{} {}", bar(len), b.count))
            .unwrap_or_default();
        out.push_str(&format!("{:>6}  {:<20} {}\n", len, m, sample));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::CompiledMachine;
    use crate::fsa::{parse_word, parity_automaton, Automaton};

    fn registry() -> &'static Registry {
        Registry::builtin()
    }

    fn fig_three_state() -> Automaton {
        Automaton::parse(
            "states: s0 s1 s2\ninitial: s0\nfinal: s2\ntrans: s0 a s1\ntrans: s1 b s2\n",
        )
        .unwrap()
    }

    /// The same machine in the reference table's state labels (initial in
    /// the 2-nt class, so the initiator carries the 16/14 cutter's site).
    fn experiment_relabeled() -> Automaton {
        Automaton::parse(
            "states: s2 s3 s5\ninitial: s3\nfinal: s5\ntrans: s3 a s2\ntrans: s2 b s5\n",
        )
        .unwrap()
    }

    fn pot_for(aut: &Automaton, word: &str, seed: u64) -> Pot {
        let m = CompiledMachine::compile(aut, seed).unwrap();
        seed_pot(&m, &parse_word(word).unwrap(), registry(), Count::Unbounded).unwrap()
    }

    #[test]
    fn seeded_pot_composition() {
        let pot = pot_for(&fig_three_state(), "ab", 7);
        assert_eq!(pot.species().count(), 4); // input + 2 molecules + terminator
        let input = pot.species().find(|s| s.label.starts_with("input")).unwrap();
        assert!(input.duplex.is_blunt());
        assert_eq!(input.count, Count::Finite(1));
    }

    #[test]
    fn fresh_pot_has_exactly_one_event_the_initiator_cut() {
        // 2-nt-class initial state: the single event is an AcuI cleavage
        let pot = pot_for(&experiment_relabeled(), "ab", 7);
        let events = enabled_events(&pot, registry());
        assert_eq!(events.len(), 1, "events: {:?}", events);
        assert!(matches!(&events[0], Event::Cleavage { enzyme, .. } if enzyme == "AcuI"));
        // 4-nt-class initial state: same shape, the other enzyme
        let pot = pot_for(&fig_three_state(), "ab", 7);
        let events = enabled_events(&pot, registry());
        assert_eq!(events.len(), 1);
        assert!(matches!(&events[0], Event::Cleavage { enzyme, .. } if enzyme == "BbvI"));
    }

    #[test]
    fn after_first_cut_exactly_one_ligation() {
        let pot = pot_for(&fig_three_state(), "ab", 7);
        let events = enabled_events(&pot, registry());
        let (pot, _) = apply(&pot, &events[0], registry());
        let events = enabled_events(&pot, registry());
        assert_eq!(events.len(), 1, "events: {:?}", events);
        match &events[0] {
            Event::Ligation { left, .. } => {
                assert_eq!(pot.get(left).unwrap().label, "T(s0,a,s1)");
            }
            other => panic!("expected ligation, got {:?}", other),
        }
    }

    #[test]
    fn accepting_run_has_alternating_trace() {
        for aut in [fig_three_state(), experiment_relabeled()] {
            let pot = pot_for(&aut, "ab", 7);
            let r = run_deterministic(&pot, registry(), default_max_steps(2)).unwrap();
            assert!(r.accepted);
            assert_eq!(r.halt_reason, HaltReason::TerminatorLigated);
            let cleavages = r.events.iter().filter(|e| e.kind == "cleavage").count();
            let ligations = r.events.iter().filter(|e| e.kind == "ligation").count();
            assert_eq!((cleavages, ligations), (3, 3));
            // strict alternation starting with a cleavage
            for (i, ev) in r.events.iter().enumerate() {
                let expect = if i % 2 == 0 { "cleavage" } else { "ligation" };
                assert_eq!(ev.kind, expect, "event {}", i);
            }
        }
    }

    #[test]
    fn missing_rule_stalls() {
        let pot = pot_for(&fig_three_state(), "aa", 7);
        let r = run_deterministic(&pot, registry(), default_max_steps(2)).unwrap();
        assert!(!r.accepted);
        assert_eq!(r.halt_reason, HaltReason::Stalled);
    }

    #[test]
    fn parity_word_matches_classical_oracle() {
        let aut = parity_automaton();
        let m = CompiledMachine::compile(&aut, 3).unwrap();
        for word in ["abaa", "aa", "a", "bbb", "abab"] {
            let w = parse_word(word).unwrap();
            let pot = seed_pot(&m, &w, registry(), Count::Unbounded).unwrap();
            let r = run_deterministic(&pot, registry(), default_max_steps(w.len())).unwrap();
            assert_eq!(
                r.accepted,
                aut.run_dfa(&w).unwrap().accepted,
                "molecular vs classical on {:?}",
                word
            );
        }
    }

    #[test]
    fn per_event_mass_accounting_is_exact() {
        let pot = pot_for(&fig_three_state(), "ab", 7);
        let mut pot = pot;
        loop {
            let events = enabled_events(&pot, registry());
            if events.len() != 1 {
                break;
            }
            let ev = events[0].clone();
            let (before, after): (Vec<Duplex>, Vec<Duplex>) = match &ev {
                Event::Cleavage { species, enzyme, hit } => {
                    let d = pot.get(species).unwrap().duplex.clone();
                    let e = registry().get(enzyme).unwrap();
                    let (l, r) = cleave(&d, e, hit).unwrap();
                    (vec![d], vec![l, r])
                }
                Event::Ligation { left, right } => {
                    let a = pot.get(left).unwrap().duplex.clone();
                    let b = pot.get(right).unwrap().duplex.clone();
                    let j = ligate(&a, &b).unwrap();
                    (vec![a, b], vec![j])
                }
            };
            let was_accept = is_terminator_ligation(&pot, &ev);
            let (next, _) = apply(&pot, &ev, registry());
            let nt = |ds: &[Duplex]| ds.iter().map(|d| d.nucleotides()).sum::<usize>();
            let fp = |ds: &[Duplex]| ds.iter().map(|d| d.footprint()).sum::<usize>();
            assert_eq!(nt(&before), nt(&after), "nucleotide mass drifted");
            match &ev {
                Event::Cleavage { enzyme, .. } => {
                    let lambda = registry().get(enzyme).unwrap().overhang_signature().1;
                    assert_eq!(fp(&after), fp(&before) + lambda);
                }
                Event::Ligation { left, .. } => {
                    let lambda = pot.get(left).unwrap().duplex.end(Side::Right).seq.len();
                    assert_eq!(fp(&after), fp(&before) - lambda);
                }
            }
            pot = next;
            if was_accept {
                break;
            }
        }
    }

    #[test]
    fn exhaustive_on_deterministic_machine_is_singleton() {
        let pot = pot_for(&fig_three_state(), "ab", 7);
        let results = run_exhaustive(&pot, registry(), default_max_steps(2));
        assert_eq!(results.len(), 1);
        assert!(results[0].accepted);
    }

    #[test]
    fn exhaustive_explores_nondeterministic_branches() {
        let aut = Automaton::parse(
            "states: s0 s1 s2\ninitial: s0\nfinal: s1\n\
             trans: s0 a s1\ntrans: s0 a s2\n",
        )
        .unwrap();
        let m = CompiledMachine::compile(&aut, 11).unwrap();
        let w = parse_word("a").unwrap();
        let pot = seed_pot(&m, &w, registry(), Count::Unbounded).unwrap();
        let results = run_exhaustive(&pot, registry(), default_max_steps(1));
        assert_eq!(results.len(), 2, "one accepting branch, one stalled branch");
        assert!(any_accepted(&results));
        assert_eq!(any_accepted(&results), aut.run_nfa(&w));
        // and the deterministic runner refuses to pick
        let err = run_deterministic(&pot, registry(), 10);
        match err {
            Err(SimError::AmbiguousStep { events }) => assert_eq!(events.len(), 2),
            other => panic!("expected AmbiguousStep after first cut, got {:?}", other.map(|r| r.halt_reason)),
        }
    }

    #[test]
    fn depth_zero_flags_unexplored() {
        let pot = pot_for(&fig_three_state(), "ab", 7);
        let results = run_exhaustive(&pot, registry(), 0);
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].halt_reason, HaltReason::DepthExceeded);
    }

    #[test]
    fn jobs_do_not_change_the_result_set() {
        let aut = Automaton::parse(
            "states: s0 s1 s2\ninitial: s0\nfinal: s1 s2\n\
             trans: s0 a s1\ntrans: s0 a s2\ntrans: s1 a s0\ntrans: s2 b s2\n",
        )
        .unwrap();
        let m = CompiledMachine::compile(&aut, 21).unwrap();
        for word in ["a", "ab", "aab", "abb"] {
            let w = parse_word(word).unwrap();
            let pot = seed_pot(&m, &w, registry(), Count::Unbounded).unwrap();
            let summarize = |rs: Vec<SimResult>| {
                rs.into_iter()
                    .map(|r| (r.accepted, r.halt_reason, r.final_pot.signature()))
                    .collect::<Vec<_>>()
            };
            let one = summarize(run_exhaustive_jobs(&pot, registry(), 20, 1));
            let four = summarize(run_exhaustive_jobs(&pot, registry(), 20, 4));
            assert_eq!(one, four);
        }
    }

    #[test]
    fn gel_bands_and_acceptance_arithmetic() {
        let aut = fig_three_state();
        let m = CompiledMachine::compile(&aut, 7).unwrap();
        let w = parse_word("ab").unwrap();
        let pot = seed_pot(&m, &w, registry(), Count::Unbounded).unwrap();

        // replay manually to capture the remnant the terminator caps
        let mut pot2 = pot.clone();
        let mut last_remnant_fp = 0;
        let mut term_fp = 0;
        let mut overhang = 0;
        loop {
            let events = enabled_events(&pot2, registry());
            if events.len() != 1 {
                break;
            }
            if is_terminator_ligation(&pot2, &events[0]) {
                if let Event::Ligation { left, right } = &events[0] {
                    let term = pot2.get(left).unwrap();
                    let remnant = pot2.get(right).unwrap();
                    term_fp = term.duplex.footprint();
                    last_remnant_fp = remnant.duplex.footprint();
                    overhang = term.duplex.end(Side::Right).seq.len();
                }
            }
            let (next, _) = apply(&pot2, &events[0], registry());
            let done = enabled_events(&next, registry()).is_empty();
            pot2 = next;
            if done {
                break;
            }
        }
        let r = run_deterministic(&pot, registry(), default_max_steps(2)).unwrap();
        assert!(r.accepted);
        let expected = last_remnant_fp + term_fp - overhang;
        // the acceptance product is the unique longest band
        assert_eq!(r.bands.first().unwrap().length_bp, expected);
        assert_eq!(
            r.bands.iter().filter(|b| b.length_bp == expected).count(),
            1
        );
        assert_eq!(r.bands.first().unwrap().count, Count::Finite(1));
        // bands sorted descending
        let lens: Vec<usize> = r.bands.iter().map(|b| b.length_bp).collect();
        let mut sorted = lens.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(lens, sorted);

        // a rejected run has no band of that length
        let pot = seed_pot(&m, &parse_word("aa").unwrap(), registry(), Count::Unbounded).unwrap();
        let r = run_deterministic(&pot, registry(), default_max_steps(2)).unwrap();
        assert!(!r.accepted);
        assert!(r.bands.iter().all(|b| b.length_bp != expected));
    }

    #[test]
    fn empty_transition_set_pot_stalls_after_opening() {
        let aut =
            Automaton::parse("states: s0 s2\ninitial: s0\nfinal: s2\n").unwrap();
        let m = CompiledMachine::compile(&aut, 5).unwrap();
        let pot = seed_pot(&m, &parse_word("a").unwrap(), registry(), Count::Unbounded).unwrap();
        assert_eq!(pot.species().count(), 2); // input + terminator only
        let r = run_deterministic(&pot, registry(), 8).unwrap();
        assert!(!r.accepted);
        assert_eq!(r.halt_reason, HaltReason::Stalled);
        assert_eq!(r.events.len(), 1); // the opening cut, then nothing matches
    }

    #[test]
    fn empty_pot_has_empty_gel() {
        let pot = Pot::new(vec!["AcuI".into()]);
        assert!(gel_report(&pot).is_empty());
        assert!(enabled_events(&pot, registry()).is_empty());
    }

    #[test]
    fn gel_rendering_mentions_every_band() {
        let pot = pot_for(&fig_three_state(), "ab", 7);
        let r = run_deterministic(&pot, registry(), default_max_steps(2)).unwrap();
        let gel = render_gel(&r.bands);
        for band in &r.bands {
            assert!(gel.contains(&band.length_bp.to_string()), "missing {}", band.length_bp);
        }
        assert!(gel.contains("100 bp ladder"));
    }

    #[test]
    fn sim_result_serializes_to_documented_schema() {
        let pot = pot_for(&fig_three_state(), "ab", 7);
        let r = run_deterministic(&pot, registry(), default_max_steps(2)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["accepted"], serde_json::json!(true));
        assert_eq!(v["halt_reason"], serde_json::json!("terminator_ligated"));
        assert!(v["events"][0]["kind"].is_string());
        assert!(v["events"][0]["species_in"].is_array());
        assert!(v["bands"][0]["length_bp"].is_number());
    }

    #[test]
    fn finite_fuel_mode_exhausts() {
        // with one unit of each molecule the first run still completes
        let aut = fig_three_state();
        let m = CompiledMachine::compile(&aut, 7).unwrap();
        let pot = seed_pot(&m, &parse_word("ab").unwrap(), registry(), Count::Finite(1)).unwrap();
        let r = run_deterministic(&pot, registry(), default_max_steps(2)).unwrap();
        assert!(r.accepted);
        // spent species really are gone
        assert!(r.final_pot.species().all(|s| !s.label.starts_with("T(") || s.waste));
    }
}
