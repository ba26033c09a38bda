use proptest::prelude::*;

use dsttr::eval::{
    exact_match, rouge_l, rouge_n, ConditionBucket, NormalizationTable, RevisionSpec,
};
use dsttr::generate::{generate, GenConfig};
use dsttr::model::{train, ConditionalModel, Normalization};
use dsttr::parser::parse_utterance;
use dsttr::repair::{default_interregna, generate_with_revisions, strip_repair, RevisionEvent};
use dsttr::toy;

fn vocab() -> Vec<String> {
    toy::lexicon().words().map(str::to_owned).collect()
}

fn toy_model() -> ConditionalModel {
    train(&toy::corpus(), &toy::lexicon(), 0.1, Normalization::PerWord).unwrap().model
}

fn word_seq(max: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vocab()), 1..=max)
}

fn small_words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 0..8)
        .prop_map(|v| v.into_iter().map(str::to_owned).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prefix_semantics_only_grow(words in word_seq(6)) {
        let lex = toy::lexicon();
        if let Ok(p) = parse_utterance(&words, &lex) {
            prop_assert_eq!(p.prefix_semantics.len(), words.len() + 1);
            prop_assert!(p.prefix_semantics[0].is_empty());
            for w in p.prefix_semantics.windows(2) {
                prop_assert!(w[1].is_subtype_of(&w[0]), "{} then {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn parsing_is_deterministic_and_pure(words in word_seq(5)) {
        let lex = toy::lexicon();
        let before = lex.to_string();
        let a = parse_utterance(&words, &lex).map(|p| p.dag.dump()).map_err(|e| e.to_string());
        let b = parse_utterance(&words, &lex).map(|p| p.dag.dump()).map_err(|e| e.to_string());
        prop_assert_eq!(a, b);
        prop_assert_eq!(lex.to_string(), before);
    }

    #[test]
    fn generation_spine_subsumes_goal(entry in 0usize..16, beam in 1usize..20) {
        let lex = toy::lexicon();
        let model = toy_model();
        let goal = &toy::corpus()[entry].goal;
        let config = GenConfig::with_beam(beam);
        if let Ok(g) = generate(&model, &lex, goal, &config) {
            let sems: Vec<_> = g.spine.iter().map(|&v| g.dag.vertex(v).r_cur.clone()).collect();
            for s in &sems {
                prop_assert!(goal.is_subtype_of(s));
            }
            for w in sems.windows(2) {
                prop_assert!(w[1].is_subtype_of(&w[0]) && !w[0].is_subtype_of(&w[1]));
            }
            prop_assert!(sems.last().unwrap().is_equivalent(goal));
            let again = generate(&model, &lex, goal, &config).unwrap();
            prop_assert_eq!(again.tokens, g.tokens);
            prop_assert_eq!(again.dag.dump(), g.dag.dump());
        }
    }

    #[test]
    fn rouge_is_symmetric_and_bounded(a in small_words(), b in small_words()) {
        for n in 1..=2 {
            let ab = rouge_n(&a, &b, n);
            prop_assert_eq!(ab, rouge_n(&b, &a, n));
            prop_assert!((0.0..=1.0).contains(&ab));
        }
        let l = rouge_l(&a, &b);
        prop_assert_eq!(l, rouge_l(&b, &a));
        prop_assert!((0.0..=1.0).contains(&l));
        prop_assert_eq!(rouge_l(&a, &a), 1.0);
    }

    #[test]
    fn exact_match_implies_full_rouge(a in small_words(), b in small_words()) {
        let table = NormalizationTable::identity();
        prop_assert!(exact_match(&a, &a, &table));
        if exact_match(&a, &b, &table) {
            prop_assert_eq!(rouge_n(&a, &b, 1), 1.0);
            prop_assert_eq!(rouge_n(&a, &b, 2), 1.0);
            prop_assert_eq!(rouge_l(&a, &b), 1.0);
        }
    }

    #[test]
    fn buckets_partition_specs(idx in 0usize..167) {
        let specs = toy::revisions();
        let s: &RevisionSpec = &specs[idx % specs.len()];
        let hits = ConditionBucket::ALL.iter().filter(|b| **b == s.bucket()).count();
        prop_assert_eq!(hits, 1);
        prop_assert!(s.distance() >= 1);
        prop_assert_eq!(s.forward, s.position >= s.index);
    }

    #[test]
    fn stripping_recovers_realized_words(idx in 0usize..167, beam in 1usize..20) {
        let specs = toy::revisions();
        let s = &specs[idx % specs.len()];
        let lex = toy::lexicon();
        let model = toy_model();
        let events = [RevisionEvent { index: s.index, new_goal: s.r_r.clone() }];
        if let Ok(out) = generate_with_revisions(&model, &lex, &s.r_g, &events, &GenConfig::with_beam(beam)) {
            let annotated = out.annotated();
            let tokens: Vec<&str> = annotated.split_whitespace().collect();
            prop_assert_eq!(strip_repair(&tokens, &default_interregna()), out.clean.clone());
            let reparsed = parse_utterance(&out.clean, &lex).unwrap();
            prop_assert!(reparsed.semantics().is_equivalent(&s.r_r));
        }
    }
}
