//! Taxonomy queries checked against a breadth-first search over the raw
//! declarations.

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use scg::kb::{KnowledgeBase, SubsumptionMode};
use scg::logic::LogicExpr;

const COLLECTIONS: usize = 9;
const INDIVIDUALS: usize = 4;

#[derive(Debug, Clone)]
struct Taxonomy {
    /// (specific, general) with specific > general, so genls is acyclic.
    genls: Vec<(usize, usize)>,
    /// (individual, collection)
    isa: Vec<(usize, usize)>,
}

fn taxonomy() -> impl Strategy<Value = Taxonomy> {
    let genls = prop::collection::vec((1..COLLECTIONS, 0..COLLECTIONS), 0..16)
        .prop_map(|v| v.into_iter().filter(|(a, b)| b < a).collect::<Vec<_>>());
    let isa = prop::collection::vec((0..INDIVIDUALS, 0..COLLECTIONS), 0..8);
    (genls, isa).prop_map(|(genls, isa)| Taxonomy { genls, isa })
}

fn coll(i: usize) -> String {
    format!("C{i}")
}

fn indiv(i: usize) -> String {
    format!("I{i}")
}

fn build(t: &Taxonomy) -> KnowledgeBase {
    let mut text = String::new();
    for i in 0..COLLECTIONS {
        text.push_str(&format!("(collection {})\n", coll(i)));
    }
    for i in 0..INDIVIDUALS {
        text.push_str(&format!("(individual {})\n", indiv(i)));
    }
    for (a, b) in &t.genls {
        text.push_str(&format!("(genls {} {})\n", coll(*a), coll(*b)));
    }
    for (a, b) in &t.isa {
        text.push_str(&format!("(isa {} {})\n", indiv(*a), coll(*b)));
    }
    text.parse::<KnowledgeBase>().expect("generated KB loads")
}

/// Upward BFS from `start` following isa edges from individuals and genls
/// edges from collections.
fn bfs(t: &Taxonomy, start: &str, follow_isa: bool) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([start.to_string()]);
    let mut queue = VecDeque::from([start.to_string()]);
    while let Some(cur) = queue.pop_front() {
        let mut next = Vec::new();
        for (a, b) in &t.genls {
            if coll(*a) == cur {
                next.push(coll(*b));
            }
        }
        if follow_isa {
            for (a, b) in &t.isa {
                if indiv(*a) == cur {
                    next.push(coll(*b));
                }
            }
        }
        for n in next {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen
}

fn c(name: &str) -> LogicExpr {
    LogicExpr::constant(name)
}

fn names(set: &BTreeSet<LogicExpr>) -> BTreeSet<String> {
    set.iter().map(ToString::to_string).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closures_match_bfs(t in taxonomy()) {
        let kb = build(&t);
        for i in 0..COLLECTIONS {
            let name = coll(i);
            prop_assert_eq!(names(&kb.generalizations(&c(&name)).unwrap()), bfs(&t, &name, true));
            prop_assert_eq!(names(&kb.genls_closure(&c(&name)).unwrap()), bfs(&t, &name, false));
        }
        for i in 0..INDIVIDUALS {
            let name = indiv(i);
            let mut expected = bfs(&t, &name, true);
            prop_assert_eq!(names(&kb.generalizations(&c(&name)).unwrap()), expected.clone());
            expected.remove(&name);
            prop_assert_eq!(names(&kb.instance_types(&c(&name)).unwrap()), expected);
        }
    }

    #[test]
    fn genls_subsumption_is_a_partial_order(t in taxonomy()) {
        let kb = build(&t);
        let sub = |a: usize, b: usize| kb.subsumes(&c(&coll(a)), &c(&coll(b)), SubsumptionMode::Genls).unwrap();
        for a in 0..COLLECTIONS {
            prop_assert!(sub(a, a));
            for b in 0..COLLECTIONS {
                if a != b {
                    prop_assert!(!(sub(a, b) && sub(b, a)));
                }
                for x in 0..COLLECTIONS {
                    if sub(a, b) && sub(b, x) {
                        prop_assert!(sub(a, x));
                    }
                }
            }
        }
    }

    #[test]
    fn auto_mode_follows_the_specific_term(t in taxonomy()) {
        let kb = build(&t);
        for g in 0..COLLECTIONS {
            let general = c(&coll(g));
            for i in 0..INDIVIDUALS {
                let s = c(&indiv(i));
                prop_assert_eq!(
                    kb.subsumes(&general, &s, SubsumptionMode::Auto).unwrap(),
                    kb.subsumes(&general, &s, SubsumptionMode::Isa).unwrap()
                );
            }
            for s in 0..COLLECTIONS {
                let s = c(&coll(s));
                prop_assert_eq!(
                    kb.subsumes(&general, &s, SubsumptionMode::Auto).unwrap(),
                    kb.subsumes(&general, &s, SubsumptionMode::Genls).unwrap()
                );
            }
        }
    }
}

#[test]
fn unknown_terms_are_errors() {
    let kb = "(genls A B)".parse::<KnowledgeBase>().unwrap();
    assert!(kb.generalizations(&c("Zebra")).is_err());
    assert!(kb
        .subsumes(&c("B"), &c("Zebra"), SubsumptionMode::Auto)
        .is_err());
}
