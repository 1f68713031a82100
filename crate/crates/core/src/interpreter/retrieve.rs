//! Three-tier construction retrieval for one window.

use std::collections::BTreeSet;

use crate::constructions::{fold, Key, SkeletonElem, Slot, TypedElem, VariantElement};

use super::{Engine, ParseGraph};

/// A variant that matches a window, with the edge chosen for each of its
/// NL slots (in template order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Match {
    pub variant: usize,
    pub binding: Vec<(Slot, usize)>,
}

#[derive(Debug, Clone)]
enum Role {
    Lit(String),
    Span(usize, usize),
}

/// Ways to cover `start..end` with literal tokens and edge spans, at most
/// `limit` roles long. Literal roles are only offered for tokens that occur
/// as a literal in some template.
fn segmentations(
    engine: &Engine,
    graph: &ParseGraph,
    start: usize,
    end: usize,
    limit: usize,
) -> Vec<Vec<Role>> {
    fn go(
        engine: &Engine,
        graph: &ParseGraph,
        pos: usize,
        end: usize,
        limit: usize,
        cur: &mut Vec<Role>,
        out: &mut Vec<Vec<Role>>,
    ) {
        if pos == end {
            out.push(cur.clone());
            return;
        }
        if cur.len() == limit {
            return;
        }
        let folded = fold(&graph.chart.tokens[pos].surface);
        if engine.repo.is_literal(&folded) {
            cur.push(Role::Lit(folded));
            go(engine, graph, pos + 1, end, limit, cur, out);
            cur.pop();
        }
        for next in pos + 1..=end {
            if !graph.edges_at(pos, next).is_empty() {
                cur.push(Role::Span(pos, next));
                go(engine, graph, next, end, limit, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(engine, graph, start, end, limit, &mut Vec::new(), &mut out);
    out
}

fn cross<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    choices.iter().fold(vec![Vec::new()], |acc, options| {
        acc.iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

/// Every (variant, slot binding) whose variant matches the whole window.
///
/// Lexical keys are tried first, then skeletons for the lexical hits, then
/// typed keys built from the cross product of each slot's generalizations
/// restricted to types used by some template.
pub fn retrieve(engine: &Engine, graph: &ParseGraph, start: usize, end: usize) -> Vec<Match> {
    let repo = engine.repo;
    let lang = engine.config.language.as_str();
    let mut found = BTreeSet::new();
    if start >= end || repo.is_empty() {
        return Vec::new();
    }
    for roles in segmentations(engine, graph, start, end, repo.max_variant_len()) {
        let lexical: Vec<String> = roles
            .iter()
            .filter_map(|r| match r {
                Role::Lit(s) => Some(s.clone()),
                Role::Span(..) => None,
            })
            .collect();
        if !repo.has(lang, &Key::Lexical(lexical)) {
            continue;
        }
        let skeleton = roles
            .iter()
            .map(|r| match r {
                Role::Lit(s) => SkeletonElem::Lit(s.clone()),
                Role::Span(..) => SkeletonElem::Placeholder,
            })
            .collect();
        if !repo.has(lang, &Key::Skeleton(skeleton)) {
            continue;
        }
        let type_choices: Vec<Vec<TypedElem>> = roles
            .iter()
            .map(|r| match r {
                Role::Lit(s) => vec![TypedElem::Lit(s.clone())],
                Role::Span(a, b) => graph
                    .edges_at(*a, *b)
                    .iter()
                    .flat_map(|&e| graph.edge(e).slot_types.iter().cloned())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .map(TypedElem::Type)
                    .collect(),
            })
            .collect();
        for typed in cross(&type_choices) {
            for vid in repo.lookup(lang, &Key::Typed(typed)) {
                let variant = repo.variant(vid);
                let mut slot_edges: Vec<Vec<(Slot, usize)>> = Vec::new();
                for (el, role) in variant.elements.iter().zip(&roles) {
                    if let (VariantElement::Slot(slot), Role::Span(a, b)) = (el, role) {
                        slot_edges.push(
                            graph
                                .edges_at(*a, *b)
                                .iter()
                                .filter(|&&e| graph.edge(e).slot_types.contains(&slot.ty))
                                .map(|&e| (slot.clone(), e))
                                .collect(),
                        );
                    }
                }
                for binding in cross(&slot_edges) {
                    found.insert(Match {
                        variant: vid,
                        binding,
                    });
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Patterns to search for a window before generalization expansion: each
/// token contributes its single-token readings plus its own surface.
pub fn typed_pattern_count(graph: &ParseGraph, start: usize, end: usize) -> u128 {
    (start..end)
        .map(|i| graph.chart.span(i, i + 1).map_or(0, |s| s.concepts.len()) as u128 + 1)
        .product()
}
