//! Brute-force reference semantics.
//!
//! Nothing here reuses the runtime's incremental state: edit sets are
//! recomputed from the released prefix at every step, and the enforcer
//! constraints are checked literally over every observed word up to a bound.

use std::collections::HashMap;
use std::fmt;

use crate::alphabet::{word_count_up_to, words_up_to, Bits, Event, Word};
use crate::automaton::{Location, SafetyAutomaton};
use crate::edit::{build_edit_tables, word_edit_sets, EditSets, EditTables, RepairPolicy};
use crate::error::Error;
use crate::projection::{project_inputs, InputAutomaton};
use crate::runtime::{enforce_word, Enforcer};

/// Largest number of observed words `check_constraints` will enumerate.
pub const WORD_BUDGET: u64 = 1_000_000;

/// Selection from an edit set, written out variable by variable.
fn select(set: &[Bits], observed: Bits, policy: RepairPolicy, table: Option<Bits>) -> Bits {
    match policy {
        RepairPolicy::Nearest => {
            let width = observed.width();
            let key = |c: &Bits| {
                let disagreement: Vec<bool> =
                    (0..width).map(|k| c.get(k) != observed.get(k)).collect();
                let distance = disagreement.iter().filter(|&&d| d).count();
                (distance, disagreement, c.to_string())
            };
            *set.iter()
                .min_by_key(|c| key(c))
                .expect("non-empty edit set")
        }
        RepairPolicy::Lexicographic => *set
            .iter()
            .min_by_key(|c| c.to_string())
            .expect("non-empty edit set"),
        RepairPolicy::SeededRandom { .. } => table.expect("table entry for accepting location"),
    }
}

/// `E*φ(observed)` computed on words.
///
/// The program is taken to answer `y_t` at tick `t`, the output half of the
/// observed event, whatever input it receives.
pub fn oracle_enforce(
    a: &SafetyAutomaton,
    observed: &Word,
    policy: RepairPolicy,
) -> Result<Word, Error> {
    let ai = project_inputs(a);
    let tables: Option<EditTables> = match policy.table_selection() {
        Some(sel) => Some(build_edit_tables(&EditSets::compute(a, &ai), sel)?),
        None => None,
    };
    let mut released = Word::new();
    for e in observed {
        a.alphabet().check_event(e)?;
        let inputs = word_edit_sets(a, &ai, &released, None)?;
        if inputs.is_empty() {
            return Err(Error::EmptyEditSet {
                location: a.name(a.run(&released)?).to_owned(),
            });
        }
        // Random tables are keyed by location, recovered by a fresh run.
        let here = || {
            a.run(&released)
                .expect("released word has the right widths")
        };
        let x = if inputs.contains(&e.input) {
            e.input
        } else {
            let entry = tables.as_ref().and_then(|t| t.input(here()));
            select(&inputs, e.input, policy, entry)
        };
        let outputs = word_edit_sets(a, &ai, &released, Some(x))?;
        let y = if outputs.contains(&e.output) {
            e.output
        } else {
            let entry = tables.as_ref().and_then(|t| t.output(here(), x));
            select(&outputs, e.output, policy, entry)
        };
        released.push(Event::new(x, y));
    }
    Ok(released)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    Soundness,
    Monotonicity,
    Instantaneity,
    Transparency,
    Causality,
    /// Weak transparency: a compliant observed word is released unchanged.
    TransparencyPrime,
}

impl Constraint {
    pub const ALL: [Constraint; 6] = [
        Constraint::Soundness,
        Constraint::Monotonicity,
        Constraint::Instantaneity,
        Constraint::Transparency,
        Constraint::Causality,
        Constraint::TransparencyPrime,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Constraint::Soundness => "Snd",
            Constraint::Monotonicity => "Mono",
            Constraint::Instantaneity => "Inst",
            Constraint::Transparency => "Tr",
            Constraint::Causality => "Cau",
            Constraint::TransparencyPrime => "Tr'",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Per-constraint verdicts with the first counterexample (in enumeration
/// order) for each failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintReport {
    counterexamples: [Option<Word>; 6],
    pub words_checked: usize,
}

impl ConstraintReport {
    pub fn passed(&self, c: Constraint) -> bool {
        self.counterexample(c).is_none()
    }

    pub fn all_passed(&self) -> bool {
        self.counterexamples.iter().all(Option::is_none)
    }

    pub fn counterexample(&self, c: Constraint) -> Option<&Word> {
        self.counterexamples[c as usize].as_ref()
    }

    pub fn failures(&self) -> impl Iterator<Item = (Constraint, &Word)> {
        Constraint::ALL
            .into_iter()
            .filter_map(|c| self.counterexample(c).map(|w| (c, w)))
    }

    fn fail(&mut self, c: Constraint, word: &Word) {
        let slot = &mut self.counterexamples[c as usize];
        if slot.is_none() {
            *slot = Some(word.clone());
        }
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in Constraint::ALL {
            match self.counterexample(c) {
                None => writeln!(f, "{:<5} pass", c.short_name())?,
                Some(w) => writeln!(f, "{:<5} FAIL counterexample: {w}", c.short_name())?,
            }
        }
        write!(f, "words checked: {}", self.words_checked)
    }
}

/// Runs the runtime enforcer under `policy` over every observed word of
/// length at most `max_len` and checks all six constraints.
pub fn check_constraints(
    a: &SafetyAutomaton,
    policy: RepairPolicy,
    max_len: usize,
) -> Result<ConstraintReport, Error> {
    let mut enforcer = Enforcer::new(a.clone(), policy)?;
    check_enforcement_function(a, max_len, |w| {
        enforce_word(&mut enforcer, w).expect("enforceable automaton never fails a tick")
    })
}

/// Checks an arbitrary word transformer against the constraints for `a`.
pub fn check_enforcement_function(
    a: &SafetyAutomaton,
    max_len: usize,
    mut enforce: impl FnMut(&Word) -> Word,
) -> Result<ConstraintReport, Error> {
    let requested = word_count_up_to(a.alphabet(), max_len);
    if requested > WORD_BUDGET {
        return Err(Error::BudgetExceeded {
            words: requested,
            budget: WORD_BUDGET,
        });
    }
    let ai = project_inputs(a);
    let accepts = |w: &Word| a.accepts(w).unwrap_or(false);

    let words = words_up_to(a.alphabet(), max_len);
    let mut report = ConstraintReport {
        counterexamples: Default::default(),
        words_checked: words.len(),
    };
    let mut released: HashMap<&Word, Word> = HashMap::with_capacity(words.len());
    for w in &words {
        let e = enforce(w);
        if e.len() != w.len() {
            report.fail(Constraint::Instantaneity, w);
        }
        if !accepts(&e) {
            report.fail(Constraint::Soundness, w);
        }
        if accepts(w) && e != *w {
            report.fail(Constraint::TransparencyPrime, w);
        }
        released.insert(w, e);
    }

    for w in words.iter().filter(|w| !w.is_empty()) {
        let out = &released[w];
        for k in 0..w.len() {
            if !released[&w.prefix(k)].is_prefix_of(out) {
                report.fail(Constraint::Monotonicity, w);
                break;
            }
        }

        let sigma = w.prefix(w.len() - 1);
        let event = w.events()[w.len() - 1];
        let before = &released[&sigma];
        let unedited = before.extended(event);
        if accepts(&unedited) && *out != unedited {
            report.fail(Constraint::Transparency, w);
        }

        let causal = out.len() == before.len() + 1 && before.is_prefix_of(out) && {
            let last = out.events()[before.len()];
            let mut inputs = before.inputs();
            inputs.push(last.input);
            ai.accepts(&inputs).unwrap_or(false) && accepts(&before.extended(last))
        };
        if !causal {
            report.fail(Constraint::Causality, w);
        }
    }
    Ok(report)
}

/// True iff `witness` is accepted and every event from the location it
/// reaches enters `qv`, so no enforcer can answer the next tick.
pub fn validate_witness(a: &SafetyAutomaton, witness: &Word) -> Result<bool, Error> {
    let q = a.run(witness)?;
    if !a.is_accepting(q) {
        return Err(Error::PriorViolates);
    }
    let mut extended = witness.clone();
    for e in a.alphabet().events() {
        extended.push(e);
        let accepted = a.accepts(&extended)?;
        extended.pop();
        if accepted {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A failed clause of the projection lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectionViolation {
    /// `δ(q, (x, y)) = q′` but `(q, x, q′) ∉ δ_I`.
    Missing {
        from: Location,
        event: Event,
        to: Location,
    },
    /// `(q, x, q′) ∈ δ_I` with no `y` such that `δ(q, (x, y)) = q′`.
    Spurious {
        from: Location,
        input: Bits,
        to: Location,
    },
}

/// Exhaustively checks both clauses of the projection lemma.
pub fn projection_violations(a: &SafetyAutomaton, ai: &InputAutomaton) -> Vec<ProjectionViolation> {
    let mut out = Vec::new();
    for q in a.locations() {
        for e in a.alphabet().events() {
            let to = a.step(q, &e);
            if !ai.contains(q, e.input, to) {
                out.push(ProjectionViolation::Missing {
                    from: q,
                    event: e,
                    to,
                });
            }
        }
        for x in a.alphabet().input_vectors() {
            for to in a.locations() {
                if ai.contains(q, x, to)
                    && !a
                        .alphabet()
                        .output_vectors()
                        .any(|y| a.step(q, &Event::new(x, y)) == to)
                {
                    out.push(ProjectionViolation::Spurious {
                        from: q,
                        input: x,
                        to,
                    });
                }
            }
        }
    }
    out
}
