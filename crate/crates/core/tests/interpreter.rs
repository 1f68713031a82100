use std::collections::BTreeSet;

use scg::constructions::Repository;
use scg::demo;
use scg::interpreter::{finalize, EdgeSource, Engine, EngineConfig, Policy};
use scg::kb::KnowledgeBase;
use scg::logic::free_vars;
use scg::tagger::Lexicon;

const INPUTS: &[&str] = &[
    "big blue building",
    "G12V-K-Ras",
    "blowing out candles",
    "The song has 6 notes.",
    "Barack Obama eats a sandwich",
    "a bank is a kind of company",
    "the last Olympics was in 2016 in Rio",
    "Dakar Giro the end of the 2015 season",
    "kick the bucket",
];

fn resources() -> (KnowledgeBase, Repository, Lexicon) {
    (
        demo::knowledge_base().unwrap(),
        demo::repository().unwrap(),
        demo::lexicon().unwrap(),
    )
}

#[test]
fn graph_invariants_hold() {
    let (kb, repo, lex) = resources();
    let engine = Engine::new(&kb, &repo, &lex, EngineConfig::default());
    for text in INPUTS {
        let g = engine.interpret(text);
        let n = g.token_count();
        let mut seen = BTreeSet::new();
        for (i, e) in g.edges.iter().enumerate() {
            assert_eq!(e.id, i);
            assert!(
                e.start < e.end && e.end <= n,
                "{text}: bad span on {}",
                e.logic
            );
            assert!(
                seen.insert((e.start, e.end, e.source.clone(), e.logic.clone())),
                "{text}: duplicate edge"
            );
            if matches!(e.source, EdgeSource::Lexical) {
                assert!(e.children.is_empty());
            }
            for (_, c) in &e.children {
                let child = g.edge(*c);
                assert!(*c < e.id, "children precede parents");
                let inside = e.start <= child.start && child.end <= e.end;
                assert!(
                    inside || child.end <= e.start,
                    "{text}: child outside window"
                );
            }
            if e.output_var.is_some() {
                assert!(e.logic.is_sentential());
            }
        }
    }
}

#[test]
fn interpretations_are_ranked_longest_first() {
    let (kb, repo, lex) = resources();
    let engine = Engine::new(&kb, &repo, &lex, EngineConfig::default());
    for text in INPUTS {
        let g = engine.interpret(text);
        let ranked = finalize(&g, Policy::Statement);
        for (k, w) in ranked.windows(2).enumerate() {
            assert!(w[0].len() >= w[1].len());
            assert_eq!(w[0].id, format!("i{}", k + 1));
        }
        for i in &ranked {
            assert!(
                free_vars(&i.logic).is_empty(),
                "{text}: statement mode left {} open",
                i.logic
            );
        }
    }
}

#[test]
fn interpretation_is_deterministic() {
    let (kb, repo, lex) = resources();
    let engine = Engine::new(&kb, &repo, &lex, EngineConfig::default());
    for text in INPUTS {
        let a = finalize(&engine.interpret(text), Policy::Question);
        let b = finalize(&engine.interpret(text), Policy::Question);
        assert_eq!(a, b);
    }
}

#[test]
fn window_limit_bounds_construction_spans() {
    let (kb, repo, lex) = resources();
    let config = EngineConfig {
        max_window: 2,
        ..EngineConfig::default()
    };
    let engine = Engine::new(&kb, &repo, &lex, config);
    let g = engine.interpret("big blue building");
    let built: Vec<_> = g.construction_edges().collect();
    assert!(built.iter().all(|e| e.len() <= 2));
    assert!(built.iter().any(|e| e.len() == 2));
}

#[test]
fn edge_cap_truncates() {
    let (kb, repo, lex) = resources();
    let config = EngineConfig {
        max_edges: 3,
        ..EngineConfig::default()
    };
    let engine = Engine::new(&kb, &repo, &lex, config);
    let g = engine.interpret("Barack Obama eats a sandwich");
    assert!(g.truncated);
    assert!(g.edges.len() <= 3);
}

#[test]
fn overlay_context_sees_base_facts() {
    let (kb, repo, lex) = resources();
    let config = EngineConfig {
        context: scg::kb::ContextStack::with_overlay("CookingMt"),
        ..EngineConfig::default()
    };
    let engine = Engine::new(&kb, &repo, &lex, config);
    let g = engine.interpret("blowing out candles");
    assert_eq!(finalize(&g, Policy::Question)[0].len(), 3);
}
