//! Construction application: anaphor resolution, semantic tests,
//! composition and plausibility filtering.

use crate::constructions::{Construction, OutputType, Slot};
use crate::kb::Term;
use crate::logic::{free_vars, rename_query_vars, simplify, substitute, Binding, LogicExpr, Var};

use super::{DiscardReason, Edge, EdgeSource, Engine, Match, ParseGraph, TraceEvent};

fn slot_var(s: &Slot) -> Var {
    Var::Typed {
        ty: s.ty.clone(),
        index: s.index,
    }
}

/// Builds the matrix's logic from its slot fillers. Term-valued children
/// are substituted directly; sentential children are renamed apart, their
/// output variable fills the slot and their sentence is conjoined. The
/// result is simplified. `fresh` supplies renaming suffixes.
pub fn compose(
    matrix: &Construction,
    binding: &[(Slot, &Edge)],
    fresh: &mut u64,
) -> Result<(LogicExpr, Term), String> {
    let mut subst = Binding::new();
    let mut conjuncts = Vec::new();
    for (slot, child) in binding {
        if child.logic.is_sentential() {
            let ov = child
                .output_var
                .as_ref()
                .ok_or_else(|| format!("sentential filler of {slot} has no output variable"))?;
            *fresh += 1;
            conjuncts.push(rename_query_vars(&child.logic, *fresh));
            subst.insert(slot_var(slot), LogicExpr::QueryVar(format!("{ov}_{fresh}")));
        } else {
            subst.insert(slot_var(slot), child.logic.clone());
        }
    }
    let body = substitute(&matrix.logic, &subst);
    let logic = if conjuncts.is_empty() {
        body
    } else if body.is_sentential() {
        let mut parts = vec![body];
        parts.extend(conjuncts);
        LogicExpr::And(parts)
    } else {
        return Err("sentential filler cannot be conjoined into a term-valued template".into());
    };
    let output_type = match &matrix.output_type {
        OutputType::Explicit(t) => t.clone(),
        OutputType::Slot(k) => binding
            .iter()
            .find(|(s, _)| s.index == *k)
            .map(|(_, e)| e.output_type.clone())
            .ok_or_else(|| format!("output type refers to unbound slot #{k}"))?,
    };
    Ok((simplify(&logic), output_type))
}

fn cross(choices: &[Vec<(Slot, usize)>]) -> Vec<Vec<(Slot, usize)>> {
    choices.iter().fold(vec![Vec::new()], |acc, options| {
        acc.iter()
            .flat_map(|p| {
                options.iter().map(move |o| {
                    let mut v = p.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

impl Engine<'_> {
    /// Earlier edges compatible with `slot`, nearest first, distinct by
    /// logic, at most `max_anaphor_candidates`.
    pub fn resolve_anaphora(
        &self,
        graph: &ParseGraph,
        slot: &Slot,
        window_start: usize,
    ) -> Vec<usize> {
        let mut candidates: Vec<&Edge> = graph
            .edges
            .iter()
            .filter(|e| e.end <= window_start && e.slot_types.contains(&slot.ty))
            .collect();
        candidates.sort_by(|a, b| {
            b.end
                .cmp(&a.end)
                .then(b.start.cmp(&a.start))
                .then(a.id.cmp(&b.id))
        });
        let mut out: Vec<usize> = Vec::new();
        for e in candidates {
            if out.len() == self.config.max_anaphor_candidates {
                break;
            }
            if !out.iter().any(|&o| graph.edge(o).logic == e.logic) {
                out.push(e.id);
            }
        }
        out
    }

    fn discard(
        graph: &mut ParseGraph,
        c: &Construction,
        start: usize,
        end: usize,
        candidate: Option<String>,
        reason: DiscardReason,
    ) {
        graph.trace.push(TraceEvent::Discarded {
            construction: c.id.clone(),
            start,
            end,
            candidate,
            reason,
        });
    }

    /// Applies a retrieved match to the window `start..end`; returns the
    /// number of edges added.
    pub(crate) fn apply_construction(
        &self,
        graph: &mut ParseGraph,
        m: &Match,
        start: usize,
        end: usize,
    ) -> usize {
        let c = self.repo.owner(m.variant);
        let mut choices: Vec<Vec<(Slot, usize)>> = Vec::new();
        for slot in &c.anaphoric_refs {
            let found = self.resolve_anaphora(graph, slot, start);
            if found.is_empty() {
                Self::discard(
                    graph,
                    c,
                    start,
                    end,
                    None,
                    DiscardReason::NoAntecedent(slot.clone()),
                );
                return 0;
            }
            choices.push(found.into_iter().map(|e| (slot.clone(), e)).collect());
        }

        let mut added = 0;
        'candidate: for anaphors in cross(&choices) {
            let mut full: Vec<(Slot, usize)> = m.binding.iter().cloned().chain(anaphors).collect();
            full.sort_by_key(|(s, _)| s.index);

            let mut test_binding = Binding::new();
            for (slot, e) in &full {
                let child = graph.edge(*e);
                let value = if !child.logic.is_sentential() && free_vars(&child.logic).is_empty() {
                    child.logic.clone()
                } else {
                    child.output_type.clone()
                };
                test_binding.insert(slot_var(slot), value);
            }
            let preview = Some(substitute(&c.logic, &test_binding).to_string());
            for (i, t) in c.tests_positive.iter().enumerate() {
                if !self
                    .kb
                    .holds(&substitute(t, &test_binding), &self.config.context)
                {
                    let reason = DiscardReason::PositiveTestFailed(c.test_id(true, i));
                    Self::discard(graph, c, start, end, preview, reason);
                    continue 'candidate;
                }
            }
            for (i, t) in c.tests_negative.iter().enumerate() {
                if self
                    .kb
                    .holds(&substitute(t, &test_binding), &self.config.context)
                {
                    let reason = DiscardReason::NegativeTestHeld(c.test_id(false, i));
                    Self::discard(graph, c, start, end, preview, reason);
                    continue 'candidate;
                }
            }

            let children: Vec<(Slot, Edge)> = full
                .iter()
                .map(|(s, e)| (s.clone(), graph.edge(*e).clone()))
                .collect();
            let refs: Vec<(Slot, &Edge)> = children.iter().map(|(s, e)| (s.clone(), e)).collect();
            let (logic, output_type) = match compose(c, &refs, &mut graph.fresh) {
                Ok(r) => r,
                Err(msg) => {
                    Self::discard(
                        graph,
                        c,
                        start,
                        end,
                        preview,
                        DiscardReason::Composition(msg),
                    );
                    continue;
                }
            };
            let shown = Some(logic.to_string());
            match self.kb.check_plausibility(&logic, &self.config.context) {
                Err(e) => {
                    Self::discard(
                        graph,
                        c,
                        start,
                        end,
                        shown,
                        DiscardReason::Structural(e.to_string()),
                    );
                    continue;
                }
                Ok(v) if !v.is_empty() => {
                    Self::discard(graph, c, start, end, shown, DiscardReason::Implausible(v));
                    continue;
                }
                Ok(_) => {}
            }
            let edge = Edge {
                id: 0,
                start,
                end,
                source: EdgeSource::Construction(c.id.clone()),
                kind: self.kind_of(&logic),
                slot_types: self.slot_types_of(&output_type),
                output_var: c.output_var.clone(),
                output_type,
                logic,
                children: full,
                variant: Some(m.variant),
            };
            if graph.add(edge, self.config.max_edges).is_some() {
                added += 1;
            }
        }
        added
    }
}
