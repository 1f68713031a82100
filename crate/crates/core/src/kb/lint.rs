//! Consistency diagnostics for KB files.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::json;

use crate::logic::LogicExpr;

use super::{
    Declaration, KnowledgeBase, LinkKind, Located, ResultRule, SubsumptionMode, Term, TermKind,
};

/// One lint diagnostic, printed as a JSON line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub code: &'static str,
    pub origin: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Finding {
    pub fn new(code: &'static str, loc: Option<&Located>, message: String) -> Self {
        Finding {
            code,
            origin: loc.map_or_else(String::new, |l| l.origin.clone()),
            line: loc.map_or(0, |l| l.pos.line),
            col: loc.map_or(0, |l| l.pos.col),
            message,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "code": self.code,
            "origin": self.origin,
            "line": self.line,
            "col": self.col,
            "message": self.message,
        })
    }
}

/// Strongly connected components of size > 1 in the genls graph, each as a
/// sorted list of names; components sorted.
pub(crate) fn genls_cycles(genls_up: &HashMap<Term, Vec<Term>>) -> Vec<Vec<String>> {
    let nodes: BTreeSet<&Term> = genls_up.keys().chain(genls_up.values().flatten()).collect();
    let ids: BTreeMap<&Term, usize> = nodes.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let order: Vec<&Term> = nodes.into_iter().collect();
    let succ = |i: usize| -> Vec<usize> {
        genls_up
            .get(order[i])
            .map(|v| v.iter().map(|t| ids[t]).collect())
            .unwrap_or_default()
    };

    // iterative Tarjan
    let n = order.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut out = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, next, pos)) = work.last_mut() {
            let v = *v;
            if let Some(&w) = next.get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            work.pop();
            if let Some((parent, _, _)) = work.last() {
                low[*parent] = low[*parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("scc member");
                    on_stack[w] = false;
                    comp.push(order[w].to_string());
                    if w == v {
                        break;
                    }
                }
                if comp.len() > 1 {
                    comp.sort();
                    out.push(comp);
                }
            }
        }
    }
    out.sort();
    out
}

/// Checks a set of declarations for cycles, self links, disjoint
/// collections that subsume one another, individual/collection conflicts
/// and arity problems.
pub fn lint(decls: &[Located]) -> Vec<Finding> {
    let kb = KnowledgeBase::build(decls.iter().map(|l| &l.decl));
    let mut out = Vec::new();

    let link_site = |t: &str| {
        decls.iter().find(|l| {
            matches!(&l.decl, Declaration::Link(link) if link.kind == LinkKind::Genls && link.specific.to_string() == t)
        })
    };
    for cycle in genls_cycles(&kb.genls_up) {
        out.push(Finding::new(
            "genls-cycle",
            link_site(&cycle[0]),
            format!("genls cycle through {}", cycle.join(", ")),
        ));
    }

    let mut declared: HashMap<&Term, Vec<(TermKind, &Located)>> = HashMap::new();
    for l in decls {
        match &l.decl {
            Declaration::Link(link) if link.specific == link.general => {
                out.push(Finding::new(
                    "self-link",
                    Some(l),
                    format!("{} is linked to itself", link.specific),
                ));
            }
            Declaration::Link(link) => {
                arity_findings(&kb, &link.specific, l, &mut out);
                arity_findings(&kb, &link.general, l, &mut out);
            }
            Declaration::Fact(f) => {
                for a in &f.args {
                    arity_findings(&kb, a, l, &mut out);
                }
            }
            Declaration::Disjoint(a, b) => {
                let acyclic = !out.iter().any(|f| f.code == "genls-cycle");
                if acyclic
                    && (kb.subsumes(a, b, SubsumptionMode::Genls).unwrap_or(false)
                        || kb.subsumes(b, a, SubsumptionMode::Genls).unwrap_or(false))
                {
                    out.push(Finding::new(
                        "disjoint-subsumption",
                        Some(l),
                        format!("{a} and {b} are declared disjoint but one generalizes the other"),
                    ));
                }
            }
            Declaration::Kind(t, k) => declared.entry(t).or_default().push((*k, l)),
            Declaration::Arg(c) => {
                if let Some(sig) = kb.signature(&c.relation) {
                    if c.position > sig.arity {
                        out.push(Finding::new(
                            "arity",
                            Some(l),
                            format!(
                                "{} has arity {}, constraint on argument {}",
                                c.relation, sig.arity, c.position
                            ),
                        ));
                    }
                }
            }
            Declaration::Function(sig) => {
                if let ResultRule::ResultGenlsArg(n) = sig.result_rule {
                    if n > sig.arity {
                        out.push(Finding::new(
                            "arity",
                            Some(l),
                            format!("{} result index {n} exceeds arity", sig.functor),
                        ));
                    }
                }
            }
            _ => {}
        }
    }

    let mut terms: Vec<_> = declared.into_iter().collect();
    terms.sort_by(|a, b| a.0.cmp(b.0));
    for (t, kinds) in terms {
        let site = kinds[0].1;
        let mut set: Vec<TermKind> = kinds.iter().map(|k| k.0).collect();
        set.dedup();
        if set.contains(&TermKind::Individual) && set.contains(&TermKind::Collection) {
            out.push(Finding::new(
                "kind-conflict",
                Some(site),
                format!("{t} is declared both an individual and a collection"),
            ));
        } else if set.contains(&TermKind::Individual) {
            let has_instances = kb.isa_up.values().any(|ups| ups.contains(t));
            let in_genls =
                kb.genls_up.contains_key(t) || kb.genls_up.values().any(|ups| ups.contains(t));
            if has_instances || in_genls {
                out.push(Finding::new(
                    "kind-conflict",
                    Some(site),
                    format!("{t} is declared an individual but is used as a collection"),
                ));
            }
        }
    }
    out
}

fn arity_findings(kb: &KnowledgeBase, t: &Term, site: &Located, out: &mut Vec<Finding>) {
    t.visit(&mut |e| {
        if let LogicExpr::Nat { .. } = e {
            if let Err(err) = kb.check_arity(e) {
                out.push(Finding::new("arity", Some(site), err.to_string()));
            }
        }
    });
}
