//! Edit sets and the choice functions that pick a repair from them.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Alphabet, Bits, Event, Word};
use crate::automaton::{Location, SafetyAutomaton};
use crate::error::Error;
use crate::projection::InputAutomaton;

/// State-indexed edit sets.
///
/// `inputs(q) = {x : ∃q′ ≠ qv. (q, x, q′) ∈ δ_I}` and
/// `outputs(q, x) = {y : δ(q, (x, y)) ≠ qv}`, both sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditSets {
    alphabet: Alphabet,
    names: Vec<String>,
    accepting: usize,
    inputs: Vec<Vec<Bits>>,
    /// Row-major `location × input`.
    outputs: Vec<Vec<Bits>>,
}

impl EditSets {
    pub fn compute(a: &SafetyAutomaton, ai: &InputAutomaton) -> Self {
        let alphabet = a.alphabet().clone();
        let mut inputs = Vec::with_capacity(a.location_count());
        let mut outputs = Vec::with_capacity(a.location_count() * alphabet.input_count());
        for q in a.locations() {
            let accepting = a.is_accepting(q);
            inputs.push(
                alphabet
                    .input_vectors()
                    .filter(|&x| accepting && ai.has_accepting_successor(q, x))
                    .collect(),
            );
            for x in alphabet.input_vectors() {
                outputs.push(
                    alphabet
                        .output_vectors()
                        .filter(|&y| accepting && a.is_accepting(a.step(q, &Event::new(x, y))))
                        .collect(),
                );
            }
        }
        EditSets {
            names: a.locations().map(|q| a.name(q).to_owned()).collect(),
            accepting: a.location_count() - 1,
            alphabet,
            inputs,
            outputs,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `editI(q)`
    pub fn inputs(&self, q: Location) -> &[Bits] {
        &self.inputs[q.index()]
    }

    /// `editO(q, x)`
    pub fn outputs(&self, q: Location, x: Bits) -> &[Bits] {
        &self.outputs[q.index() * self.alphabet.input_count() + x.value() as usize]
    }

    pub(crate) fn name(&self, q: Location) -> &str {
        &self.names[q.index()]
    }

    pub(crate) fn accepting_locations(&self) -> impl Iterator<Item = Location> {
        (0..self.accepting).map(Location)
    }
}

/// Word-indexed edit sets: runs `a` over `prior` and reads the set at the
/// location reached. With `x` absent this is `editI`, otherwise `editO(·, x)`.
pub fn word_edit_sets(
    a: &SafetyAutomaton,
    ai: &InputAutomaton,
    prior: &Word,
    x: Option<Bits>,
) -> Result<Vec<Bits>, Error> {
    let q = a.run(prior)?;
    if !a.is_accepting(q) {
        return Err(Error::PriorViolates);
    }
    Ok(match x {
        None => a
            .alphabet()
            .input_vectors()
            .filter(|&x| ai.has_accepting_successor(q, x))
            .collect(),
        Some(x) => {
            a.alphabet().check_input(x)?;
            a.alphabet()
                .output_vectors()
                .filter(|&y| a.is_accepting(a.step(q, &Event::new(x, y))))
                .collect()
        }
    })
}

/// Rule that turns an edit set into a single repair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum RepairPolicy {
    /// Minimal Hamming distance to the observed vector; ties prefer agreement
    /// on earlier-declared variables, then the smallest vector.
    #[default]
    Nearest,
    /// Smallest vector of the set, precomputed per location.
    Lexicographic,
    /// Uniform choice per location, drawn once from ChaCha8 seeded with `seed`.
    SeededRandom { seed: u64 },
}

impl RepairPolicy {
    /// The observed-independent table rule, if this policy is one.
    pub fn table_selection(self) -> Option<TableSelection> {
        match self {
            RepairPolicy::Nearest => None,
            RepairPolicy::Lexicographic => Some(TableSelection::Lexicographic),
            RepairPolicy::SeededRandom { seed } => Some(TableSelection::SeededRandom { seed }),
        }
    }

    /// The three policies, with `seed` for the random one.
    pub fn all(seed: u64) -> [RepairPolicy; 3] {
        [
            RepairPolicy::Nearest,
            RepairPolicy::Lexicographic,
            RepairPolicy::SeededRandom { seed },
        ]
    }
}

impl fmt::Display for RepairPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepairPolicy::Nearest => f.write_str("nearest"),
            RepairPolicy::Lexicographic => f.write_str("lex"),
            RepairPolicy::SeededRandom { seed } => write!(f, "random(seed={seed})"),
        }
    }
}

/// Parses `nearest`, `lex` or `random`; `random` takes seed 0 until one is
/// set through [`RepairPolicy::with_seed`].
impl FromStr for RepairPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nearest" => Ok(RepairPolicy::Nearest),
            "lex" | "lexicographic" => Ok(RepairPolicy::Lexicographic),
            "random" | "seeded-random" => Ok(RepairPolicy::SeededRandom { seed: 0 }),
            other => Err(format!(
                "unknown policy `{other}`, expected nearest, lex or random"
            )),
        }
    }
}

impl RepairPolicy {
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            RepairPolicy::SeededRandom { .. } => RepairPolicy::SeededRandom { seed },
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableSelection {
    Lexicographic,
    SeededRandom { seed: u64 },
}

/// Precomputed repairs: one input per accepting location, one output per
/// accepting location and admissible input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditTables {
    selection: TableSelection,
    input_count: usize,
    choose_input: Vec<Option<Bits>>,
    choose_output: Vec<Option<Bits>>,
}

impl EditTables {
    pub fn selection(&self) -> TableSelection {
        self.selection
    }

    pub fn seed(&self) -> Option<u64> {
        match self.selection {
            TableSelection::SeededRandom { seed } => Some(seed),
            TableSelection::Lexicographic => None,
        }
    }

    pub fn input(&self, q: Location) -> Option<Bits> {
        self.choose_input.get(q.index()).copied().flatten()
    }

    pub fn output(&self, q: Location, x: Bits) -> Option<Bits> {
        self.choose_output
            .get(q.index() * self.input_count + x.value() as usize)
            .copied()
            .flatten()
    }
}

pub fn build_edit_tables(sets: &EditSets, selection: TableSelection) -> Result<EditTables, Error> {
    let mut rng = match selection {
        TableSelection::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        TableSelection::Lexicographic => None,
    };
    let mut pick = |set: &[Bits]| match rng.as_mut() {
        Some(rng) => set[rng.gen_range(0..set.len())],
        None => set[0],
    };
    let inputs = sets.alphabet().input_count();
    let locations = sets.inputs.len();
    let mut choose_input = vec![None; locations];
    let mut choose_output = vec![None; locations * inputs];
    for q in sets.accepting_locations() {
        let admissible = sets.inputs(q);
        if admissible.is_empty() {
            return Err(Error::EmptyEditSet {
                location: sets.name(q).to_owned(),
            });
        }
        choose_input[q.index()] = Some(pick(admissible));
        for &x in admissible {
            let outs = sets.outputs(q, x);
            if outs.is_empty() {
                return Err(Error::EmptyEditSet {
                    location: sets.name(q).to_owned(),
                });
            }
            choose_output[q.index() * inputs + x.value() as usize] = Some(pick(outs));
        }
    }
    Ok(EditTables {
        selection,
        input_count: inputs,
        choose_input,
        choose_output,
    })
}

/// Element of `candidates` closest to `observed` under the nearest rule.
///
/// `c ^ observed` read as a number has the first-declared variable as its most
/// significant bit, so minimizing `(popcount, xor)` prefers agreement on
/// earlier variables among equally distant candidates.
pub fn nearest(candidates: &[Bits], observed: Bits) -> Option<Bits> {
    candidates.iter().copied().min_by_key(|&c| {
        let diff = c.value() ^ observed.value();
        (diff.count_ones(), diff, c.value())
    })
}

/// Which half of an event is being repaired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairKind {
    Input,
    /// Output under the already released input `context`.
    Output {
        context: Bits,
    },
}

/// Edit sets bundled with a policy and, for table policies, its tables.
#[derive(Clone, Debug)]
pub struct Repairer {
    sets: EditSets,
    policy: RepairPolicy,
    tables: Option<EditTables>,
}

impl Repairer {
    pub fn new(sets: EditSets, policy: RepairPolicy) -> Result<Self, Error> {
        let tables = policy
            .table_selection()
            .map(|sel| build_edit_tables(&sets, sel))
            .transpose()?;
        Ok(Repairer {
            sets,
            policy,
            tables,
        })
    }

    pub fn sets(&self) -> &EditSets {
        &self.sets
    }

    pub fn policy(&self) -> RepairPolicy {
        self.policy
    }

    pub fn tables(&self) -> Option<&EditTables> {
        self.tables.as_ref()
    }

    /// Repairs `observed` at location `q`. Only valid when `observed` falls
    /// outside the relevant edit set.
    pub fn repair(&self, q: Location, observed: Bits, kind: RepairKind) -> Result<Bits, Error> {
        let set = match kind {
            RepairKind::Input => self.sets.inputs(q),
            RepairKind::Output { context } => self.sets.outputs(q, context),
        };
        if set.is_empty() {
            return Err(Error::EmptyEditSet {
                location: self.sets.name(q).to_owned(),
            });
        }
        if set.binary_search(&observed).is_ok() {
            return Err(Error::RepairNotNeeded(observed.to_string()));
        }
        let choice = match (&self.tables, kind) {
            (None, _) => nearest(set, observed),
            (Some(t), RepairKind::Input) => t.input(q),
            (Some(t), RepairKind::Output { context }) => t.output(q, context),
        };
        choice.ok_or_else(|| Error::EmptyEditSet {
            location: self.sets.name(q).to_owned(),
        })
    }
}

/// One-shot form of [`Repairer::repair`].
pub fn repair_event(
    sets: &EditSets,
    q: Location,
    observed: Bits,
    kind: RepairKind,
    policy: RepairPolicy,
) -> Result<Bits, Error> {
    Repairer::new(sets.clone(), policy)?.repair(q, observed, kind)
}

/// Audit listing of edit sets and the repair each location would use.
pub fn explain(sets: &EditSets, policy: RepairPolicy) -> Result<String, Error> {
    let repairer = Repairer::new(sets.clone(), policy)?;
    let fmt_set = |s: &[Bits]| {
        s.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut out = format!("# policy: {policy}\n");
    for q in sets.accepting_locations() {
        let name = sets.name(q);
        let inputs = sets.inputs(q);
        out.push_str(&format!("editI {name} = {{{}}}\n", fmt_set(inputs)));
        match repairer.tables() {
            Some(t) => out.push_str(&format!(
                "chooseI {name} = {}\n",
                t.input(q).map(|b| b.to_string()).unwrap_or_default()
            )),
            None => out.push_str(&format!("chooseI {name} = nearest\n")),
        }
        for &x in inputs {
            out.push_str(&format!(
                "editO {name} {x} = {{{}}}\n",
                fmt_set(sets.outputs(q, x))
            ));
            match repairer.tables() {
                Some(t) => out.push_str(&format!(
                    "chooseO {name} {x} = {}\n",
                    t.output(q, x).map(|b| b.to_string()).unwrap_or_default()
                )),
                None => out.push_str(&format!("chooseO {name} {x} = nearest\n")),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::projection::project_inputs;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    fn strs(v: &[Bits]) -> Vec<String> {
        v.iter().map(ToString::to_string).collect()
    }

    fn s1_sets() -> (SafetyAutomaton, EditSets) {
        let a = corpus::s1();
        let sets = EditSets::compute(&a, &project_inputs(&a));
        (a, sets)
    }

    #[test]
    fn s1_edit_sets() {
        let (a, sets) = s1_sets();
        let q0 = a.initial();
        assert_eq!(strs(sets.inputs(q0)), ["00", "01", "10"]);
        assert_eq!(strs(sets.outputs(q0, b("01"))), ["0"]);
        assert!(sets.inputs(a.violating()).is_empty());
    }

    #[test]
    fn self_loop_edit_sets_are_full() {
        let a = corpus::all_self_loop(2, 2);
        let sets = EditSets::compute(&a, &project_inputs(&a));
        assert_eq!(sets.inputs(a.initial()).len(), 4);
        for x in a.alphabet().input_vectors() {
            assert_eq!(sets.outputs(a.initial(), x).len(), 4);
        }
    }

    #[test]
    fn word_sets_examples() {
        let a = corpus::s1();
        let ai = project_inputs(&a);
        let prior: Word = "10/0 01/0".parse().unwrap();
        assert_eq!(
            strs(&word_edit_sets(&a, &ai, &prior, None).unwrap()),
            ["00", "01", "10"]
        );
        assert_eq!(
            strs(&word_edit_sets(&a, &ai, &Word::new(), Some(b("01"))).unwrap()),
            ["0"]
        );
        let sets = EditSets::compute(&a, &ai);
        assert_eq!(
            word_edit_sets(&a, &ai, &Word::new(), None).unwrap(),
            sets.inputs(a.initial())
        );
    }

    #[test]
    fn word_sets_reject_violating_prior() {
        let a = corpus::s1();
        let ai = project_inputs(&a);
        let prior: Word = "10/0 01/1".parse().unwrap();
        assert_eq!(
            word_edit_sets(&a, &ai, &prior, None).unwrap_err(),
            Error::PriorViolates
        );
    }

    #[test]
    fn lexicographic_tables_on_s1() {
        let (a, sets) = s1_sets();
        let t = build_edit_tables(&sets, TableSelection::Lexicographic).unwrap();
        assert_eq!(t.input(a.initial()), Some(b("00")));
        assert_eq!(t.output(a.initial(), b("00")), Some(b("0")));
        assert_eq!(t.output(a.initial(), b("11")), None);
        assert_eq!(t.seed(), None);
    }

    #[test]
    fn seeded_tables_reproducible_and_members() {
        let (a, sets) = s1_sets();
        let sel = TableSelection::SeededRandom { seed: 42 };
        let t1 = build_edit_tables(&sets, sel).unwrap();
        let t2 = build_edit_tables(&sets, sel).unwrap();
        assert_eq!(t1, t2);
        let q0 = a.initial();
        assert!(sets.inputs(q0).contains(&t1.input(q0).unwrap()));
        for &x in sets.inputs(q0) {
            assert!(sets.outputs(q0, x).contains(&t1.output(q0, x).unwrap()));
        }
    }

    #[test]
    fn singleton_sets_force_choice() {
        let (a, sets) = s1_sets();
        for policy in RepairPolicy::all(7) {
            let r = Repairer::new(sets.clone(), policy).unwrap();
            let got = r
                .repair(a.initial(), b("1"), RepairKind::Output { context: b("01") })
                .unwrap();
            assert_eq!(got, b("0"), "{policy}");
        }
    }

    #[test]
    fn tables_fail_on_dead_location() {
        let a = corpus::fig4();
        let sets = EditSets::compute(&a, &project_inputs(&a));
        assert!(matches!(
            build_edit_tables(&sets, TableSelection::Lexicographic),
            Err(Error::EmptyEditSet { .. })
        ));
    }

    #[test]
    fn nearest_reproduces_published_repair() {
        let (a, sets) = s1_sets();
        let got = repair_event(
            &sets,
            a.initial(),
            b("11"),
            RepairKind::Input,
            RepairPolicy::Nearest,
        )
        .unwrap();
        assert_eq!(got, b("10"));
    }

    #[test]
    fn repair_not_needed_is_an_error() {
        let (a, sets) = s1_sets();
        let err = repair_event(
            &sets,
            a.initial(),
            b("10"),
            RepairKind::Input,
            RepairPolicy::Nearest,
        )
        .unwrap_err();
        assert!(matches!(err, Error::RepairNotNeeded(_)));
    }

    #[test]
    fn nearest_tie_break() {
        let c = [b("0011"), b("1100"), b("0110")];
        // Distances from 1111 are all 2; agreement on the first variable wins,
        // then on the second.
        assert_eq!(nearest(&c, b("1111")), Some(b("1100")));
        assert_eq!(nearest(&c, b("0111")), Some(b("0110")));
        assert_eq!(nearest(&[], b("0")), None);
    }

    #[test]
    fn explain_lists_every_choice() {
        let (_, sets) = s1_sets();
        let text = explain(&sets, RepairPolicy::Lexicographic).unwrap();
        assert!(text.contains("editI q0 = {00,01,10}"));
        assert!(text.contains("chooseI q0 = 00"));
        assert!(text.contains("editO q0 01 = {0}"));
        assert!(text.contains("chooseO q0 00 = 0"));
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("nearest".parse(), Ok(RepairPolicy::Nearest));
        assert_eq!("lex".parse(), Ok(RepairPolicy::Lexicographic));
        assert_eq!(
            "random".parse::<RepairPolicy>().unwrap().with_seed(9),
            RepairPolicy::SeededRandom { seed: 9 }
        );
        assert!("best".parse::<RepairPolicy>().is_err());
    }
}
