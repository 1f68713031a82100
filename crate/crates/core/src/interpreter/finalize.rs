use std::cmp::Reverse;
use std::collections::BTreeSet;

use crate::logic::{quantify_existential, LogicExpr};

use super::{ParseGraph, Policy};

/// Sort key fields followed by the edge id and the finished logic.
type Ranked = (
    Reverse<usize>,
    usize,
    String,
    usize,
    usize,
    usize,
    LogicExpr,
);

#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    /// `i1`, `i2`, … in rank order.
    pub id: String,
    pub start: usize,
    pub end: usize,
    pub edge: usize,
    pub logic: LogicExpr,
}

impl Interpretation {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Maximal edges, ranked: longer span, then fewer conjuncts, then logic
/// text. An edge is maximal when no construction edge strictly covers its
/// span; a lexical edge also yields to a construction edge on the same span.
pub fn finalize(graph: &ParseGraph, policy: Policy) -> Vec<Interpretation> {
    let built: Vec<(usize, usize)> = graph
        .construction_edges()
        .map(|e| (e.start, e.end))
        .collect();
    let mut ranked: Vec<Ranked> = Vec::new();
    for e in &graph.edges {
        let covered = built.iter().any(|&(s, t)| {
            let contains = s <= e.start && e.end <= t;
            contains && (t - s > e.len() || e.is_lexical())
        });
        if covered {
            continue;
        }
        let logic = match policy {
            Policy::Statement | Policy::Check if e.logic.is_sentential() => {
                quantify_existential(&e.logic)
            }
            _ => e.logic.clone(),
        };
        ranked.push((
            Reverse(e.len()),
            e.logic.conjuncts().len(),
            logic.to_string(),
            e.start,
            e.end,
            e.id,
            logic,
        ));
    }
    ranked.sort_by(|a, b| (&a.0, a.1, &a.2, a.3, a.5).cmp(&(&b.0, b.1, &b.2, b.3, b.5)));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (_, _, text, start, end, edge, logic) in ranked {
        if seen.insert((start, end, text)) {
            out.push(Interpretation {
                id: format!("i{}", out.len() + 1),
                start,
                end,
                edge,
                logic,
            });
        }
    }
    out
}
