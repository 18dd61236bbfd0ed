//! Safety automata: parsing, normalization, membership and rendering.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::alphabet::{Alphabet, Bits, Event, Word};
use crate::document::{self, InterfaceHeaders};
use crate::error::{Error, ParseError, ParseErrorKind};

/// Index of a location within its automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location(pub(crate) usize);

impl Location {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A parsed automaton before determinization and completion.
///
/// The transition relation may be nondeterministic and incomplete; missing
/// transitions are read as going to the violating location.
#[derive(Clone, Debug)]
pub struct RawAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    initial: usize,
    violating: usize,
    /// `(from, event index, to)`
    transitions: Vec<(usize, usize, usize)>,
}

impl RawAutomaton {
    pub fn new(
        alphabet: Alphabet,
        names: Vec<String>,
        initial: usize,
        violating: usize,
    ) -> Result<Self, Error> {
        assert!(initial < names.len() && violating < names.len());
        if initial == violating {
            return Err(Error::EmptyProperty);
        }
        Ok(RawAutomaton {
            alphabet,
            names,
            initial,
            violating,
            transitions: Vec::new(),
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn violating(&self) -> usize {
        self.violating
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    /// Adds `from --event--> to`. Transitions out of the violating location
    /// into any other location are rejected.
    pub fn add_transition(&mut self, from: usize, event: Event, to: usize) -> Result<(), Error> {
        self.alphabet.check_event(&event)?;
        if from == self.violating && to != self.violating {
            return Err(ParseError::new(
                0,
                ParseErrorKind::ViolatingNotTrap {
                    from: self.names[from].clone(),
                    to: self.names[to].clone(),
                },
            )
            .into());
        }
        self.transitions
            .push((from, self.alphabet.event_index(&event), to));
        Ok(())
    }

    /// Subset construction, completion towards a single trap and pruning of
    /// unreachable locations.
    ///
    /// A macro-state is accepting iff it holds a non-violating location. The
    /// result names locations `q0, q1, ...` in breadth-first discovery order
    /// (events visited in ascending index order) with `qv` last.
    pub fn normalize(&self) -> Result<SafetyAutomaton, Error> {
        if self.initial == self.violating {
            return Err(Error::EmptyProperty);
        }
        let events = self.alphabet.event_count();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.names.len() * events];
        for &(from, ev, to) in &self.transitions {
            if to != self.violating {
                succ[from * events + ev].push(to);
            }
        }

        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut macros: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let start = vec![self.initial];
        ids.insert(start.clone(), 0);
        macros.push(start);
        queue.push_back(0usize);

        // Targets are macro ids; `None` is the trap.
        let mut rows: Vec<Vec<Option<usize>>> = Vec::new();
        while let Some(id) = queue.pop_front() {
            let members = macros[id].clone();
            let mut row = Vec::with_capacity(events);
            for ev in 0..events {
                let mut target: Vec<usize> = members
                    .iter()
                    .flat_map(|&m| succ[m * events + ev].iter().copied())
                    .collect();
                target.sort_unstable();
                target.dedup();
                if target.is_empty() {
                    row.push(None);
                    continue;
                }
                let next = match ids.get(&target) {
                    Some(&t) => t,
                    None => {
                        let t = macros.len();
                        ids.insert(target.clone(), t);
                        macros.push(target);
                        queue.push_back(t);
                        t
                    }
                };
                row.push(Some(next));
            }
            debug_assert_eq!(rows.len(), id);
            rows.push(row);
        }

        let accepting = macros.len();
        let trap = accepting;
        let mut delta = Vec::with_capacity((accepting + 1) * events);
        for row in &rows {
            delta.extend(row.iter().map(|t| Location(t.unwrap_or(trap))));
        }
        delta.extend(std::iter::repeat_n(Location(trap), events));
        Ok(SafetyAutomaton::from_parts(
            self.alphabet.clone(),
            accepting,
            delta,
        ))
    }
}

/// Parses an automaton document. Wildcards are expanded; the result is not
/// yet normalized.
pub fn parse_automaton(source: &str) -> Result<RawAutomaton, ParseError> {
    let mut iface = InterfaceHeaders::default();
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<String> = None;
    let mut violating: Option<String> = None;
    let mut pending: Vec<(usize, &str)> = Vec::new();
    let mut last_line = 0;

    for (line, text) in document::content_lines(source) {
        last_line = line;
        if let Some((key, value)) = document::header(text) {
            if iface.accept(key, value, line)? {
                continue;
            }
            match key {
                "states" => document::set_once(
                    &mut states,
                    value.split_whitespace().map(str::to_owned).collect(),
                    key,
                    line,
                )?,
                "initial" => document::set_once(&mut initial, value.to_owned(), key, line)?,
                "violating" => document::set_once(&mut violating, value.to_owned(), key, line)?,
                _ => {
                    return Err(ParseError::new(
                        line,
                        ParseErrorKind::UnknownHeader(key.to_owned()),
                    ))
                }
            }
        } else {
            pending.push((line, text));
        }
    }

    let alphabet = iface.finish(last_line)?;
    let names = states
        .ok_or_else(|| ParseError::new(last_line, ParseErrorKind::MissingHeader("states")))?;
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.as_str(), i).is_some() {
            return Err(ParseError::new(
                last_line,
                ParseErrorKind::DuplicateState(n.clone()),
            ));
        }
    }
    let lookup = |name: &str, line: usize| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::new(line, ParseErrorKind::UnknownState(name.to_owned())))
    };
    let initial = initial
        .ok_or_else(|| ParseError::new(last_line, ParseErrorKind::MissingHeader("initial")))?;
    let violating = violating
        .ok_or_else(|| ParseError::new(last_line, ParseErrorKind::MissingHeader("violating")))?;
    let initial = lookup(&initial, last_line)?;
    let violating = lookup(&violating, last_line)?;
    if initial == violating {
        return Err(ParseError::new(
            last_line,
            ParseErrorKind::InitialIsViolating,
        ));
    }

    let mut raw = RawAutomaton {
        alphabet,
        names: names.clone(),
        initial,
        violating,
        transitions: Vec::new(),
    };
    for (line, text) in pending {
        let (from, to, lhs, rhs) = document::transition_parts(text)
            .ok_or_else(|| ParseError::new(line, ParseErrorKind::MalformedTransition))?;
        let from = lookup(from, line)?;
        let to = lookup(to, line)?;
        if from == violating && to != violating {
            return Err(ParseError::new(
                line,
                ParseErrorKind::ViolatingNotTrap {
                    from: names[from].clone(),
                    to: names[to].clone(),
                },
            ));
        }
        let xs = document::expand_pattern(lhs, raw.alphabet.input_width(), "input", line)?;
        let ys = document::expand_pattern(rhs, raw.alphabet.output_width(), "output", line)?;
        for &x in &xs {
            for &y in &ys {
                let ev = raw.alphabet.event_index(&Event::new(x, y));
                raw.transitions.push((from, ev, to));
            }
        }
    }
    Ok(raw)
}

/// Deterministic, complete safety automaton with a unique violating trap.
///
/// Only obtainable through [`RawAutomaton::normalize`], so every instance is
/// pruned and canonically named: accepting locations are `q0..q{n-1}` in
/// breadth-first order and the trap `qv` has index `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SafetyAutomaton {
    alphabet: Alphabet,
    names: Vec<String>,
    accepting: usize,
    /// Row-major `location × event` successor table.
    delta: Vec<Location>,
}

impl SafetyAutomaton {
    fn from_parts(alphabet: Alphabet, accepting: usize, delta: Vec<Location>) -> Self {
        let mut names: Vec<String> = (0..accepting).map(|i| format!("q{i}")).collect();
        names.push("qv".to_owned());
        debug_assert_eq!(delta.len(), (accepting + 1) * alphabet.event_count());
        SafetyAutomaton {
            alphabet,
            names,
            accepting,
            delta,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> Location {
        Location(0)
    }

    pub fn violating(&self) -> Location {
        Location(self.accepting)
    }

    /// `|Q|`, including `qv`.
    pub fn location_count(&self) -> usize {
        self.accepting + 1
    }

    pub fn locations(&self) -> impl Iterator<Item = Location> {
        (0..=self.accepting).map(Location)
    }

    /// `Q \ {qv}`, in name order.
    pub fn accepting_locations(&self) -> impl Iterator<Item = Location> {
        (0..self.accepting).map(Location)
    }

    pub fn is_accepting(&self, q: Location) -> bool {
        q.0 < self.accepting
    }

    pub fn name(&self, q: Location) -> &str {
        &self.names[q.0]
    }

    pub fn location_named(&self, name: &str) -> Option<Location> {
        self.names.iter().position(|n| n == name).map(Location)
    }

    pub(crate) fn step_index(&self, q: Location, event_index: usize) -> Location {
        self.delta[q.0 * self.alphabet.event_count() + event_index]
    }

    /// `δ(q, e)`. Widths are checked in debug builds only.
    pub fn step(&self, q: Location, event: &Event) -> Location {
        debug_assert!(self.alphabet.check_event(event).is_ok());
        self.step_index(q, self.alphabet.event_index(event))
    }

    /// Location reached from `q0` on `word`; `qv` if the word violates.
    pub fn run(&self, word: &Word) -> Result<Location, Error> {
        self.run_from(self.initial(), word)
    }

    pub fn run_from(&self, mut q: Location, word: &Word) -> Result<Location, Error> {
        for e in word {
            self.alphabet.check_event(e)?;
            q = self.step(q, e);
        }
        Ok(q)
    }

    /// `σ ⊨ φ`: the run from `q0` never enters `qv`.
    pub fn accepts(&self, word: &Word) -> Result<bool, Error> {
        Ok(self.is_accepting(self.run(word)?))
    }

    /// Transitions as `(from, event, to)`, in location then event order.
    pub fn transitions(&self) -> impl Iterator<Item = (Location, Event, Location)> + '_ {
        self.locations().flat_map(move |q| {
            self.alphabet
                .events()
                .enumerate()
                .map(move |(i, e)| (q, e, self.step_index(q, i)))
        })
    }

    /// Lifts back to a raw relation with the same transitions.
    pub fn to_raw(&self) -> RawAutomaton {
        RawAutomaton {
            alphabet: self.alphabet.clone(),
            names: self.names.clone(),
            initial: self.initial().0,
            violating: self.violating().0,
            transitions: self
                .transitions()
                .map(|(q, e, t)| (q.0, self.alphabet.event_index(&e), t.0))
                .collect(),
        }
    }

    /// Structural isomorphism: a bijection between locations that maps
    /// initial to initial, trap to trap, and commutes with `δ`.
    pub fn is_isomorphic(&self, other: &SafetyAutomaton) -> bool {
        if self.alphabet != other.alphabet || self.location_count() != other.location_count() {
            return false;
        }
        let n = self.location_count();
        let mut map: Vec<Option<usize>> = vec![None; n];
        let mut used = vec![false; n];
        map[self.violating().0] = Some(other.violating().0);
        used[other.violating().0] = true;
        map[0] = Some(0);
        used[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            let p = map[q].expect("mapped before enqueue");
            for ev in 0..self.alphabet.event_count() {
                let a = self.step_index(Location(q), ev).0;
                let b = other.step_index(Location(p), ev).0;
                match map[a] {
                    Some(m) if m == b => {}
                    Some(_) => return false,
                    None => {
                        if used[b] {
                            return false;
                        }
                        map[a] = Some(b);
                        used[b] = true;
                        queue.push_back(a);
                    }
                }
            }
        }
        map.iter().all(Option::is_some)
    }

    /// Renders the document format. Transitions into `qv` are left implicit.
    pub fn render(&self) -> String {
        let mut out = String::new();
        document::render_interface(&mut out, &self.alphabet);
        out.push_str(&format!("states: {}\n", self.names.join(" ")));
        out.push_str(&format!("initial: {}\n", self.name(self.initial())));
        out.push_str(&format!("violating: {}\n", self.name(self.violating())));
        out.push_str("# unlisted transitions lead to qv\n");
        let any_output = "-".repeat(self.alphabet.output_width());
        for q in self.accepting_locations() {
            for x in self.alphabet.input_vectors() {
                let targets: Vec<Location> = self
                    .alphabet
                    .output_vectors()
                    .map(|y| self.step(q, &Event::new(x, y)))
                    .collect();
                if targets.iter().all(|&t| t == targets[0]) {
                    if self.is_accepting(targets[0]) {
                        out.push_str(&format!(
                            "{} -> {} : {x}/{any_output}\n",
                            self.name(q),
                            self.name(targets[0])
                        ));
                    }
                    continue;
                }
                for (y, t) in self.alphabet.output_vectors().zip(targets) {
                    if self.is_accepting(t) {
                        out.push_str(&format!("{} -> {} : {x}/{y}\n", self.name(q), self.name(t)));
                    }
                }
            }
        }
        out
    }

    /// Successor on a concrete `(x, y)` pair, for callers holding raw vectors.
    pub fn step_pair(&self, q: Location, x: Bits, y: Bits) -> Location {
        self.step(q, &Event::new(x, y))
    }
}

impl fmt::Debug for SafetyAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for SafetyAutomaton {
    type Err = Error;

    /// Parses and normalizes a document.
    fn from_str(s: &str) -> Result<Self, Error> {
        parse_automaton(s)?.normalize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn parses_s1() {
        let raw = parse_automaton(corpus::S1_DOC).unwrap();
        assert_eq!(raw.alphabet().inputs(), ["A", "B"]);
        assert_eq!(raw.alphabet().outputs(), ["R"]);
        let a = raw.normalize().unwrap();
        assert_eq!(a.location_count(), 2);
        assert_eq!(a.name(a.initial()), "q0");
        assert_eq!(a.name(a.violating()), "qv");
    }

    #[test]
    fn wildcard_pattern_expands_to_four_events() {
        let doc =
            "inputs: A B\noutputs: R\nstates: q0 qv\ninitial: q0\nviolating: qv\nq0 -> q0 : 1-/-\n";
        let raw = parse_automaton(doc).unwrap();
        let mut events: Vec<String> = raw
            .transitions()
            .iter()
            .map(|&(_, ev, _)| raw.alphabet().event_at(ev).to_string())
            .collect();
        events.sort();
        assert_eq!(events, ["10/0", "10/1", "11/0", "11/1"]);
    }

    #[test]
    fn violating_state_must_be_trap() {
        let doc =
            "inputs: A\noutputs: B\nstates: q0 qv\ninitial: q0\nviolating: qv\nqv -> q0 : -/-\n";
        let err = parse_automaton(doc).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ViolatingNotTrap { .. }));
        assert!(err.to_string().contains("violating state must be a trap"));
    }

    #[test]
    fn parse_errors() {
        let base = "inputs: A\noutputs: B\ninitial: q0\nviolating: qv\n";
        let dup = format!("{base}states: q0 q0 qv\n");
        assert!(matches!(
            parse_automaton(&dup).unwrap_err().kind,
            ParseErrorKind::DuplicateState(_)
        ));
        let unknown = format!("{base}states: q0 qv\nq0 -> q9 : 1/1\n");
        assert!(matches!(
            parse_automaton(&unknown).unwrap_err().kind,
            ParseErrorKind::UnknownState(_)
        ));
        let length = format!("{base}states: q0 qv\nq0 -> q0 : 11/1\n");
        let err = parse_automaton(&length).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::PatternLength { .. }));
        assert_eq!(err.line, 6);
        let missing = "inputs: A\noutputs: B\nstates: q0 qv\ninitial: q0\n";
        assert_eq!(
            parse_automaton(missing).unwrap_err().kind,
            ParseErrorKind::MissingHeader("violating")
        );
        let missing_init = "inputs: A\noutputs: B\nstates: q0 qv\nviolating: qv\n";
        assert_eq!(
            parse_automaton(missing_init).unwrap_err().kind,
            ParseErrorKind::MissingHeader("initial")
        );
        let unknown_var = format!("{base}states: q0 qv\nfoo: bar\n");
        assert!(matches!(
            parse_automaton(&unknown_var).unwrap_err().kind,
            ParseErrorKind::UnknownHeader(_)
        ));
        let same = "inputs: A\noutputs: B\nstates: q0\ninitial: q0\nviolating: q0\n";
        assert_eq!(
            parse_automaton(same).unwrap_err().kind,
            ParseErrorKind::InitialIsViolating
        );
    }

    #[test]
    fn nondeterministic_duplicates_are_not_parse_errors() {
        let doc = "inputs: A\noutputs: B\nstates: q0 q1 qv\ninitial: q0\nviolating: qv\n\
                   q0 -> q0 : 1/1\nq0 -> q1 : 1/1\n";
        assert!(parse_automaton(doc).is_ok());
    }

    #[test]
    fn normalize_is_a_fixpoint_on_s1() {
        let a = corpus::s1();
        let again = a.to_raw().normalize().unwrap();
        assert_eq!(a, again);
        assert!(a.is_isomorphic(&again));
    }

    #[test]
    fn completion_adds_trap_transitions() {
        let doc =
            "inputs: A\noutputs: B\nstates: q0 qv\ninitial: q0\nviolating: qv\nq0 -> q0 : 1/1\n";
        let a: SafetyAutomaton = doc.parse().unwrap();
        let q0 = a.initial();
        let qv = a.violating();
        assert_eq!(a.step(q0, &"1/1".parse().unwrap()), q0);
        for e in ["0/0", "0/1", "1/0"] {
            assert_eq!(a.step(q0, &e.parse().unwrap()), qv);
        }
        for e in a.alphabet().events() {
            assert_eq!(a.step(qv, &e), qv);
        }
    }

    #[test]
    fn nondeterminism_resolved_by_subset_construction() {
        // q0 --(1,1)--> {q1, qv}; q1 loops on (0,0).
        let doc = "inputs: A\noutputs: B\nstates: q0 q1 qv\ninitial: q0\nviolating: qv\n\
                   q0 -> q1 : 1/1\nq0 -> qv : 1/1\nq1 -> q1 : 0/0\n";
        let a: SafetyAutomaton = doc.parse().unwrap();
        assert!(a.accepts(&word("1/1")).unwrap());
        assert!(a.accepts(&word("1/1 0/0 0/0")).unwrap());
        assert!(!a.accepts(&word("1/1 1/1")).unwrap());
        assert!(!a.accepts(&word("0/0")).unwrap());
    }

    #[test]
    fn unreachable_locations_pruned() {
        let doc = "inputs: A\noutputs: B\nstates: q0 island qv\ninitial: q0\nviolating: qv\n\
                   q0 -> q0 : -/-\nisland -> q0 : -/-\n";
        let a: SafetyAutomaton = doc.parse().unwrap();
        assert_eq!(a.location_count(), 2);
    }

    #[test]
    fn membership_examples() {
        let s1 = corpus::s1();
        assert!(s1.accepts(&word("10/1 01/0")).unwrap());
        assert!(!s1.accepts(&word("11/0")).unwrap());
        assert!(s1.accepts(&Word::new()).unwrap());
        assert!(corpus::fig4().accepts(&Word::new()).unwrap());
    }

    #[test]
    fn membership_width_mismatch() {
        let s1 = corpus::s1();
        let err = s1.accepts(&word("1/1")).unwrap_err();
        assert!(matches!(err, Error::WidthMismatch { .. }));
    }

    #[test]
    fn render_round_trip_named() {
        for a in corpus::named() {
            let back: SafetyAutomaton = a.1.render().parse().unwrap();
            assert!(back.is_isomorphic(&a.1), "{}", a.0);
        }
    }

    #[test]
    fn null_interface_document() {
        let a: SafetyAutomaton = corpus::NULL_DOC.parse().unwrap();
        assert!(a.alphabet().is_null());
        assert_eq!(a.location_count(), 2);
        assert!(a.accepts(&word("/ / /")).unwrap());
        let back: SafetyAutomaton = a.render().parse().unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn isomorphism_detects_difference() {
        assert!(!corpus::fig5a().is_isomorphic(&corpus::fig5b()));
        assert!(!corpus::s1().is_isomorphic(&corpus::fig4()));
    }
}
