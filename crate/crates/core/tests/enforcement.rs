use proptest::prelude::*;
use syncenf::alphabet::words_up_to;
use syncenf::edit::{nearest, word_edit_sets};
use syncenf::oracle::projection_violations;
use syncenf::runtime::released_word;
use syncenf::{
    corpus, oracle_enforce, project_inputs, Bits, EditSets, Enforcer, Event, RepairPolicy,
    SafetyAutomaton, ScriptedOutputs, Word,
};

fn policy_strategy() -> impl Strategy<Value = RepairPolicy> {
    prop_oneof![
        Just(RepairPolicy::Nearest),
        Just(RepairPolicy::Lexicographic),
        any::<u64>().prop_map(|seed| RepairPolicy::SeededRandom { seed }),
    ]
}

fn automaton_strategy() -> impl Strategy<Value = SafetyAutomaton> {
    any::<u64>().prop_map(|seed| corpus::random_enforceable(1, seed).remove(0))
}

fn word_strategy(a: &SafetyAutomaton, max_len: usize) -> impl Strategy<Value = Word> {
    let events: Vec<Event> = a.alphabet().events().collect();
    proptest::collection::vec(proptest::sample::select(events), 0..=max_len).prop_map(Word::from)
}

fn case() -> impl Strategy<Value = (SafetyAutomaton, Word, RepairPolicy)> {
    automaton_strategy().prop_flat_map(|a| {
        let w = word_strategy(&a, 12);
        (Just(a), w, policy_strategy())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn runtime_invariants((a, w, policy) in case()) {
        let mut enforcer = Enforcer::new(a.clone(), policy).unwrap();
        let mut program = ScriptedOutputs::new(if w.is_empty() { vec![Bits::zero(1)] } else { w.outputs() });
        let records = enforcer.run(w.inputs(), &mut program).unwrap();
        let released = released_word(&records);
        prop_assert_eq!(released.len(), w.len());
        let mut unedited_so_far = true;
        for (k, r) in records.iter().enumerate() {
            let prefix = released.prefix(k + 1);
            prop_assert!(a.accepts(&prefix).unwrap());
            prop_assert_eq!(a.run(&prefix).unwrap(), r.state_after);
            prop_assert!(r.state_after != a.violating());
            prop_assert_eq!(r.input_edited, r.released.input != r.observed.input);
            prop_assert_eq!(r.output_edited, r.released.output != r.observed.output);
            let before = a.run(&released.prefix(k)).unwrap();
            if a.is_accepting(a.step(before, &r.observed)) && r.observed.input == w.events()[k].input {
                prop_assert_eq!(r.released, r.observed);
            }
            unedited_so_far &= !r.input_edited && !r.output_edited;
        }
        if a.accepts(&w).unwrap() {
            prop_assert!(unedited_so_far);
            prop_assert_eq!(&released, &w);
        }
    }

    #[test]
    fn runtime_agrees_with_oracle((a, w, policy) in case()) {
        let mut enforcer = Enforcer::new(a.clone(), policy).unwrap();
        let runtime = syncenf::enforce_word(&mut enforcer, &w).unwrap();
        prop_assert_eq!(runtime, oracle_enforce(&a, &w, policy).unwrap());
    }

    #[test]
    fn enforcement_is_monotone_after_reset((a, w, policy) in case()) {
        let mut enforcer = Enforcer::new(a, policy).unwrap();
        let full = syncenf::enforce_word(&mut enforcer, &w).unwrap();
        for k in 0..w.len() {
            let part = syncenf::enforce_word(&mut enforcer, &w.prefix(k)).unwrap();
            prop_assert!(part.is_prefix_of(&full));
        }
    }

    #[test]
    fn word_and_location_edit_sets_agree((a, w, _p) in case()) {
        let ai = project_inputs(&a);
        let sets = EditSets::compute(&a, &ai);
        let mut prior = Word::new();
        for e in &w {
            let q = a.run(&prior).unwrap();
            if !a.is_accepting(q) {
                break;
            }
            prop_assert_eq!(word_edit_sets(&a, &ai, &prior, None).unwrap(), sets.inputs(q).to_vec());
            for x in a.alphabet().input_vectors() {
                prop_assert_eq!(word_edit_sets(&a, &ai, &prior, Some(x)).unwrap(), sets.outputs(q, x).to_vec());
            }
            prior.push(*e);
        }
    }

    #[test]
    fn nearest_choice_minimizes_distance(mask in 1u32..256, observed in 0u32..256) {
        let candidates: Vec<Bits> = (0..8u32)
            .filter(|v| mask & (1 << v) != 0)
            .map(|v| Bits::new(v, 3))
            .collect();
        let o = Bits::new(observed % 8, 3);
        let c = nearest(&candidates, o).unwrap();
        prop_assert!(candidates.contains(&c));
        prop_assert!(candidates.iter().all(|d| d.hamming(o) >= c.hamming(o)));
        if candidates.contains(&o) {
            prop_assert_eq!(c, o);
        }
    }
}

#[test]
fn projection_lemma_holds_on_corpus() {
    let mut all: Vec<SafetyAutomaton> = corpus::named().into_iter().map(|(_, a)| a).collect();
    all.extend(corpus::exhaustive_small());
    all.extend(corpus::random_enforceable(100, 0));
    for a in &all {
        let ai = project_inputs(a);
        assert!(projection_violations(a, &ai).is_empty());
        // Word level: an input word is in the projected language iff it is
        // the input half of some accepted word.
        for w in words_up_to(a.alphabet(), 2) {
            if a.accepts(&w).unwrap() {
                assert!(ai.accepts(&w.inputs()).unwrap());
            }
        }
    }
}

#[test]
fn edit_sets_are_exactly_the_safe_choices() {
    for a in corpus::exhaustive_small()
        .into_iter()
        .chain(corpus::random_enforceable(50, 3))
    {
        let ai = project_inputs(&a);
        let sets = EditSets::compute(&a, &ai);
        for q in a.accepting_locations() {
            for x in a.alphabet().input_vectors() {
                let safe_outputs: Vec<Bits> = a
                    .alphabet()
                    .output_vectors()
                    .filter(|&y| a.is_accepting(a.step(q, &Event::new(x, y))))
                    .collect();
                assert_eq!(sets.outputs(q, x), safe_outputs.as_slice());
                assert_eq!(sets.inputs(q).contains(&x), !safe_outputs.is_empty());
            }
        }
    }
}
