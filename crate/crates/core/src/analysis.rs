//! Enforceability checking and repair of non-enforceable properties.

use std::collections::VecDeque;

use crate::alphabet::Word;
use crate::automaton::{Location, SafetyAutomaton};

/// Outcome of the enforceability check.
///
/// A dead location is an accepting location whose every outgoing transition
/// enters `qv`; the property is enforceable iff there are none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnforceabilityReport {
    pub dead_locations: Vec<Location>,
    /// Names of `dead_locations`, same order.
    pub dead_names: Vec<String>,
    /// Shortest accepted word reaching the first dead location.
    pub witness: Option<Witness>,
}

impl EnforceabilityReport {
    pub fn is_enforceable(&self) -> bool {
        self.dead_locations.is_empty()
    }
}

/// An accepted word after which every event violates the property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub prefix: Word,
    pub location: Location,
}

fn is_dead(a: &SafetyAutomaton, q: Location, merged: &[bool]) -> bool {
    a.alphabet().events().all(|e| {
        let t = a.step(q, &e);
        !a.is_accepting(t) || merged[t.index()]
    })
}

pub fn check_enforceability(a: &SafetyAutomaton) -> EnforceabilityReport {
    let none = vec![false; a.location_count()];
    let dead_locations: Vec<Location> = a
        .accepting_locations()
        .filter(|&q| is_dead(a, q, &none))
        .collect();
    let witness = dead_locations.first().map(|&target| Witness {
        prefix: shortest_path(a, target),
        location: target,
    });
    EnforceabilityReport {
        dead_names: dead_locations
            .iter()
            .map(|&q| a.name(q).to_owned())
            .collect(),
        dead_locations,
        witness,
    }
}

/// Breadth-first path from `q0` to `target` through accepting locations.
fn shortest_path(a: &SafetyAutomaton, target: Location) -> Word {
    let n = a.location_count();
    let mut parent: Vec<Option<(Location, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[a.initial().index()] = true;
    let mut queue = VecDeque::from([a.initial()]);
    while let Some(q) = queue.pop_front() {
        if q == target {
            break;
        }
        for (i, e) in a.alphabet().events().enumerate() {
            let t = a.step(q, &e);
            if a.is_accepting(t) && !seen[t.index()] {
                seen[t.index()] = true;
                parent[t.index()] = Some((q, i));
                queue.push_back(t);
            }
        }
    }
    let mut events = Vec::new();
    let mut cur = target;
    while let Some((p, ev)) = parent[cur.index()] {
        events.push(a.alphabet().event_at(ev));
        cur = p;
    }
    events.reverse();
    events.into()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformOutcome {
    Transformed(SafetyAutomaton),
    NotTransformable,
}

impl TransformOutcome {
    pub fn automaton(&self) -> Option<&SafetyAutomaton> {
        match self {
            TransformOutcome::Transformed(a) => Some(a),
            TransformOutcome::NotTransformable => None,
        }
    }
}

/// Repeatedly merges dead locations into `qv` until none remain.
///
/// Each sweep visits accepting locations in name order. If `q0` becomes dead
/// the property cannot be repaired. The surviving automaton is renormalized,
/// which drops locations that became unreachable.
pub fn transform_non_enforceable(a: &SafetyAutomaton) -> TransformOutcome {
    let mut merged = vec![false; a.location_count()];
    loop {
        let mut removed_any = false;
        for q in a.accepting_locations() {
            if merged[q.index()] || !is_dead(a, q, &merged) {
                continue;
            }
            if q == a.initial() {
                return TransformOutcome::NotTransformable;
            }
            merged[q.index()] = true;
            removed_any = true;
        }
        if !removed_any {
            break;
        }
    }

    let mut raw = a.to_raw();
    let qv = a.violating().index();
    let mut pruned = crate::automaton::RawAutomaton::new(
        raw.alphabet().clone(),
        raw.names().to_vec(),
        raw.initial(),
        qv,
    )
    .expect("initial survives the sweep");
    for &(from, ev, to) in raw.transitions() {
        if merged[from] {
            continue;
        }
        let to = if merged[to] { qv } else { to };
        let event = raw.alphabet().event_at(ev);
        pruned
            .add_transition(from, event, to)
            .expect("qv stays a trap");
    }
    raw = pruned;
    TransformOutcome::Transformed(raw.normalize().expect("q0 is accepting"))
}
