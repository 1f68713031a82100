//! Semantic plausibility checks over candidate logical forms.

use std::fmt;

use thiserror::Error;

use crate::logic::LogicExpr;

use super::{ConstraintKind, ContextStack, KnowledgeBase, SubsumptionMode, Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// Argument fails its argIsa/argGenls constraint.
    ArgType,
    /// A collection where an instance was required.
    InstanceExpected,
    /// An instance where a specialization was required.
    SpecializationExpected,
    /// Inter-argument constraint not met.
    InterArg,
    /// The KB entails the negation.
    KnownFalse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Child indices from the root to the offending subexpression.
    pub path: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {:?}: {}", self.kind, self.path, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unfilled slot {slot} at {path:?}")]
pub struct StructuralError {
    pub slot: String,
    pub path: Vec<usize>,
}

impl KnowledgeBase {
    /// Collects every type-constraint violation and every atom the KB knows
    /// to be false. Arguments that contain variables or unknown terms are
    /// not checked. A remaining typed slot is a structural error.
    pub fn check_plausibility(
        &self,
        e: &LogicExpr,
        ctx: &ContextStack,
    ) -> Result<Vec<Violation>, StructuralError> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.walk(e, true, ctx, &mut path, &mut out)?;
        Ok(out)
    }

    pub fn is_plausible(&self, e: &LogicExpr, ctx: &ContextStack) -> bool {
        matches!(self.check_plausibility(e, ctx), Ok(v) if v.is_empty())
    }

    fn walk(
        &self,
        e: &LogicExpr,
        positive: bool,
        ctx: &ContextStack,
        path: &mut Vec<usize>,
        out: &mut Vec<Violation>,
    ) -> Result<(), StructuralError> {
        if let LogicExpr::TypedVar { ty, index } = e {
            return Err(StructuralError {
                slot: format!("${ty}#{index}"),
                path: path.clone(),
            });
        }
        match e {
            LogicExpr::App { head, args } => {
                if let Some(rel) = head.as_constant() {
                    self.check_args(rel, args, path, out);
                    if positive {
                        self.check_known_false(e, rel, args, ctx, path, out);
                    }
                }
            }
            LogicExpr::Nat { functor, args } => self.check_args(functor, args, path, out),
            _ => {}
        }
        let flips = matches!(e, LogicExpr::Not(_));
        for (i, c) in e.children().into_iter().enumerate() {
            path.push(i);
            self.walk(c, positive != flips, ctx, path, out)?;
            path.pop();
        }
        Ok(())
    }

    fn checkable(&self, t: &Term) -> bool {
        t.is_ground() && self.is_known(t)
    }

    fn satisfies(&self, t: &Term, required: &str, kind: ConstraintKind) -> bool {
        let req = LogicExpr::Constant(required.to_string());
        if !self.is_known(&req) {
            return false;
        }
        let mode = match kind {
            ConstraintKind::Isa => SubsumptionMode::Isa,
            ConstraintKind::Genls => SubsumptionMode::Genls,
        };
        self.subsumes(&req, t, mode).unwrap_or(false)
    }

    fn check_args(&self, rel: &str, args: &[LogicExpr], path: &[usize], out: &mut Vec<Violation>) {
        for c in self.arg_constraints(rel) {
            let Some(arg) = args.get(c.position - 1) else {
                continue;
            };
            if !self.checkable(arg) || self.satisfies(arg, &c.required, c.kind) {
                continue;
            }
            let other = match c.kind {
                ConstraintKind::Isa => ConstraintKind::Genls,
                ConstraintKind::Genls => ConstraintKind::Isa,
            };
            let kind = match (c.kind, self.satisfies(arg, &c.required, other)) {
                (ConstraintKind::Isa, true) => ViolationKind::InstanceExpected,
                (ConstraintKind::Genls, true) => ViolationKind::SpecializationExpected,
                _ => ViolationKind::ArgType,
            };
            out.push(Violation {
                kind,
                path: path.to_vec(),
                detail: format!(
                    "argument {} of {rel} is {arg}, needs {:?} {}",
                    c.position, c.kind, c.required
                ),
            });
        }
        for c in self.inter_arg_constraints(rel) {
            let (Some(a), Some(b)) = (args.get(c.if_position - 1), args.get(c.then_position - 1))
            else {
                continue;
            };
            if self.checkable(a)
                && self.checkable(b)
                && self.satisfies(a, &c.if_type, c.kind)
                && !self.satisfies(b, &c.then_type, c.kind)
            {
                out.push(Violation {
                    kind: ViolationKind::InterArg,
                    path: path.to_vec(),
                    detail: format!(
                        "argument {} of {rel} is {:?} {}, so argument {} ({b}) must be {:?} {}",
                        c.if_position, c.kind, c.if_type, c.then_position, c.kind, c.then_type
                    ),
                });
            }
        }
    }

    fn check_known_false(
        &self,
        atom: &LogicExpr,
        rel: &str,
        args: &[LogicExpr],
        ctx: &ContextStack,
        path: &[usize],
        out: &mut Vec<Violation>,
    ) {
        if !atom.is_ground() {
            return;
        }
        let contradiction = match (rel, args) {
            ("genls", [s, g]) if self.checkable(s) && self.checkable(g) => {
                let below = self.genls_closure(s).expect("known term");
                self.clashes(&below, g)
            }
            ("isa", [x, g]) if self.checkable(x) && self.checkable(g) => {
                let types = self.instance_types(x).expect("known term");
                self.kind_of(x) == TermKind::Individual && self.clashes(&types, g)
            }
            _ => {
                let head = LogicExpr::Constant(rel.to_string());
                self.facts(&head, ctx)
                    .any(|f| f.negated && self.fact_matches_args(f, args))
            }
        };
        if contradiction {
            out.push(Violation {
                kind: ViolationKind::KnownFalse,
                path: path.to_vec(),
                detail: format!("{atom} contradicts the knowledge base"),
            });
        }
    }

    /// Whether some collection in `types` is disjoint with a generalization of `g`.
    fn clashes(&self, types: &std::collections::BTreeSet<Term>, g: &Term) -> bool {
        let above = self.genls_closure(g).expect("known term");
        types
            .iter()
            .any(|a| above.iter().any(|b| self.is_disjoint(a, b)))
    }

    fn fact_matches_args(&self, fact: &super::Fact, args: &[LogicExpr]) -> bool {
        fact.args.len() == args.len()
            && fact.args.iter().zip(args).all(|(general, specific)| {
                general == specific
                    || (self.is_known(specific)
                        && self.is_known(general)
                        && self
                            .subsumes(general, specific, SubsumptionMode::Auto)
                            .unwrap_or(false))
            })
    }
}
