//! Miniature knowledge base: taxonomy, ground facts, function result typing
//! and argument constraints.
//!
//! Terms are ground [`LogicExpr`] values, either constants or non-atomic
//! terms (NATs). Generalization follows both `isa` and `genls` links; NATs
//! without explicit links are typed through the result rule of their
//! functor's signature. The KB is immutable once built.

mod lint;
mod load;
mod plausibility;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::path::Path;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::logic::LogicExpr;

pub use lint::{lint, Finding};
pub use load::{parse_declarations, Declaration, Located};
pub use plausibility::{StructuralError, Violation, ViolationKind};

/// A KB term: a constant or a ground non-atomic term.
pub type Term = LogicExpr;

/// Context holding the general assertions every application context inherits.
pub const BASE_CONTEXT: &str = "BaseKB";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkKind {
    Isa,
    Genls,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaxonomyLink {
    pub kind: LinkKind,
    pub specific: Term,
    pub general: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub predicate: Term,
    pub args: Vec<Term>,
    pub context: String,
    /// Asserted as explicitly false.
    pub negated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResultRule {
    ResultIsa(String),
    ResultGenls(String),
    /// The result is a specialization of the type of the 1-based argument.
    ResultGenlsArg(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSignature {
    pub functor: String,
    pub arity: usize,
    pub result_rule: ResultRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Isa,
    Genls,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgConstraint {
    pub relation: String,
    pub position: usize,
    pub kind: ConstraintKind,
    pub required: String,
}

/// If argument `if_position` satisfies `if_type`, argument `then_position`
/// must satisfy `then_type` (both under `kind`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterArgConstraint {
    pub relation: String,
    pub if_position: usize,
    pub if_type: String,
    pub then_position: usize,
    pub then_type: String,
    pub kind: ConstraintKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    Individual,
    Collection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsumptionMode {
    Isa,
    Genls,
    /// `Isa` for individuals, `Genls` for collections.
    Auto,
}

/// Base context plus an optional application overlay that inherits it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextStack {
    pub base: String,
    pub overlay: Option<String>,
}

impl Default for ContextStack {
    fn default() -> Self {
        ContextStack {
            base: BASE_CONTEXT.to_string(),
            overlay: None,
        }
    }
}

impl ContextStack {
    pub fn with_overlay(overlay: impl Into<String>) -> Self {
        ContextStack {
            overlay: Some(overlay.into()),
            ..Self::default()
        }
    }

    pub fn includes(&self, context: &str) -> bool {
        context == self.base || self.overlay.as_deref() == Some(context)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("unknown term {0}")]
    UnknownTerm(String),
    #[error("{origin}:{line}:{col}: {msg}")]
    Load {
        origin: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("genls cycle through {}", .0.join(", "))]
    Cycle(Vec<String>),
    #[error("{0}: a term cannot be linked to itself")]
    SelfLink(String),
    #[error("no function signature for {0}")]
    Untyped(String),
    #[error("{functor} takes {expected} arguments, got {actual} in {term}")]
    Arity {
        functor: String,
        expected: usize,
        actual: usize,
        term: String,
    },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Default)]
pub struct KnowledgeBase {
    isa_up: HashMap<Term, Vec<Term>>,
    genls_up: HashMap<Term, Vec<Term>>,
    kinds: HashMap<Term, TermKind>,
    known: HashSet<Term>,
    functions: HashMap<String, FunctionSignature>,
    arg_constraints: HashMap<String, Vec<ArgConstraint>>,
    inter_arg: HashMap<String, Vec<InterArgConstraint>>,
    disjoint: HashSet<(Term, Term)>,
    facts: HashMap<Term, Vec<Fact>>,
    gen_cache: RwLock<HashMap<Term, Arc<BTreeSet<Term>>>>,
    genls_cache: RwLock<HashMap<Term, Arc<BTreeSet<Term>>>>,
}

impl std::str::FromStr for KnowledgeBase {
    type Err = KbError;

    fn from_str(text: &str) -> Result<Self, KbError> {
        Self::from_declarations(parse_declarations(text, "<string>")?)
    }
}

impl KnowledgeBase {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Loads and merges several KB files.
    pub fn load_files<P: AsRef<Path>>(paths: &[P]) -> Result<Self, KbError> {
        let mut decls = Vec::new();
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p).map_err(|e| KbError::Io {
                path: p.display().to_string(),
                msg: e.to_string(),
            })?;
            decls.extend(parse_declarations(&text, &p.display().to_string())?);
        }
        Self::from_declarations(decls)
    }

    /// Builds a KB, rejecting self links, arity mismatches and genls cycles.
    pub fn from_declarations(decls: Vec<Located>) -> Result<Self, KbError> {
        let kb = Self::build(decls.iter().map(|l| &l.decl));
        kb.validate(&decls)?;
        Ok(kb)
    }

    /// Builds without validation; used by the linter to inspect broken KBs.
    pub(crate) fn build<'a>(decls: impl IntoIterator<Item = &'a Declaration>) -> Self {
        let mut kb = KnowledgeBase::default();
        for decl in decls {
            match decl {
                Declaration::Link(link) => {
                    kb.register(&link.specific);
                    kb.register(&link.general);
                    let map = match link.kind {
                        LinkKind::Isa => &mut kb.isa_up,
                        LinkKind::Genls => &mut kb.genls_up,
                    };
                    let ups = map.entry(link.specific.clone()).or_default();
                    if !ups.contains(&link.general) {
                        ups.push(link.general.clone());
                    }
                }
                Declaration::Fact(f) => {
                    kb.register(&f.predicate);
                    f.args.iter().for_each(|a| kb.register(a));
                    kb.facts
                        .entry(f.predicate.clone())
                        .or_default()
                        .push(f.clone());
                }
                Declaration::Function(sig) => {
                    kb.known.insert(LogicExpr::Constant(sig.functor.clone()));
                    if let ResultRule::ResultIsa(c) | ResultRule::ResultGenls(c) = &sig.result_rule
                    {
                        kb.known.insert(LogicExpr::Constant(c.clone()));
                    }
                    kb.functions.insert(sig.functor.clone(), sig.clone());
                }
                Declaration::Arg(c) => {
                    kb.known.insert(LogicExpr::Constant(c.relation.clone()));
                    kb.known.insert(LogicExpr::Constant(c.required.clone()));
                    kb.arg_constraints
                        .entry(c.relation.clone())
                        .or_default()
                        .push(c.clone());
                }
                Declaration::InterArg(c) => {
                    for n in [&c.relation, &c.if_type, &c.then_type] {
                        kb.known.insert(LogicExpr::Constant(n.clone()));
                    }
                    kb.inter_arg
                        .entry(c.relation.clone())
                        .or_default()
                        .push(c.clone());
                }
                Declaration::Disjoint(a, b) => {
                    kb.register(a);
                    kb.register(b);
                    kb.disjoint.insert((a.clone(), b.clone()));
                    kb.disjoint.insert((b.clone(), a.clone()));
                }
                Declaration::Kind(t, kind) => {
                    kb.register(t);
                    kb.kinds.insert(t.clone(), *kind);
                }
            }
        }
        kb
    }

    fn register(&mut self, t: &Term) {
        t.visit(&mut |e| {
            if let LogicExpr::Constant(_) | LogicExpr::Nat { .. } = e {
                self.known.insert(e.clone());
            }
            if let LogicExpr::Nat { functor, .. } = e {
                self.known.insert(LogicExpr::Constant(functor.clone()));
            }
        });
    }

    fn validate(&self, decls: &[Located]) -> Result<(), KbError> {
        for l in decls {
            if let Declaration::Link(link) = &l.decl {
                if link.specific == link.general {
                    return Err(KbError::SelfLink(link.specific.to_string()));
                }
            }
        }
        for t in &self.known {
            self.check_arity(t)?;
        }
        if let Some(cycle) = lint::genls_cycles(&self.genls_up).into_iter().next() {
            return Err(KbError::Cycle(cycle));
        }
        Ok(())
    }

    fn check_arity(&self, t: &Term) -> Result<(), KbError> {
        if let LogicExpr::Nat { functor, args } = t {
            if let Some(sig) = self.functions.get(functor) {
                if sig.arity != args.len() {
                    return Err(KbError::Arity {
                        functor: functor.clone(),
                        expected: sig.arity,
                        actual: args.len(),
                        term: t.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn signature(&self, functor: &str) -> Option<&FunctionSignature> {
        self.functions.get(functor)
    }

    pub fn arg_constraints(&self, relation: &str) -> &[ArgConstraint] {
        self.arg_constraints
            .get(relation)
            .map_or(&[], Vec::as_slice)
    }

    pub fn inter_arg_constraints(&self, relation: &str) -> &[InterArgConstraint] {
        self.inter_arg.get(relation).map_or(&[], Vec::as_slice)
    }

    /// Every declared or mentioned term, sorted.
    pub fn terms(&self) -> BTreeSet<Term> {
        self.known.iter().cloned().collect()
    }

    /// Whether `t` can be reasoned about: mentioned in the KB, a NAT whose
    /// functor has a signature, or a numeral.
    pub fn is_known(&self, t: &Term) -> bool {
        match t {
            LogicExpr::Numeral(_) => true,
            LogicExpr::Nat { functor, .. } => {
                self.known.contains(t) || self.functions.contains_key(functor)
            }
            _ => self.known.contains(t),
        }
    }

    fn require_known(&self, t: &Term) -> Result<(), KbError> {
        if self.is_known(t) {
            Ok(())
        } else {
            Err(KbError::UnknownTerm(t.to_string()))
        }
    }

    pub fn is_disjoint(&self, a: &Term, b: &Term) -> bool {
        self.disjoint.contains(&(a.clone(), b.clone()))
    }

    pub fn declared_kind(&self, t: &Term) -> Option<TermKind> {
        self.kinds.get(t).copied()
    }

    /// Declared kind, falling back to what the links and signatures imply.
    pub fn kind_of(&self, t: &Term) -> TermKind {
        if let Some(k) = self.kinds.get(t) {
            return *k;
        }
        match t {
            LogicExpr::Numeral(_) | LogicExpr::Text(_) => TermKind::Individual,
            LogicExpr::Nat { functor, .. } => {
                match self.functions.get(functor).map(|s| &s.result_rule) {
                    Some(ResultRule::ResultIsa(_)) => TermKind::Individual,
                    Some(_) => TermKind::Collection,
                    None => TermKind::Individual,
                }
            }
            _ => {
                let has_genls = self.genls_up.get(t).is_some_and(|v| !v.is_empty());
                let is_general = self
                    .genls_up
                    .values()
                    .chain(self.isa_up.values())
                    .any(|ups| ups.contains(t));
                if has_genls || is_general {
                    TermKind::Collection
                } else {
                    TermKind::Individual
                }
            }
        }
    }

    /// Direct upward links of `t`, explicit plus those implied by NAT
    /// signatures and numeral values.
    fn direct_up(&self, t: &Term, kind: LinkKind) -> Vec<Term> {
        let map = match kind {
            LinkKind::Isa => &self.isa_up,
            LinkKind::Genls => &self.genls_up,
        };
        let mut out = map.get(t).cloned().unwrap_or_default();
        let mut add = |x: Term| {
            if &x != t && !out.contains(&x) {
                out.push(x);
            }
        };
        match t {
            LogicExpr::Nat { functor, .. } => {
                if let Some(sig) = self.functions.get(functor) {
                    match (&sig.result_rule, kind) {
                        (ResultRule::ResultIsa(c), LinkKind::Isa)
                        | (ResultRule::ResultGenls(c), LinkKind::Genls) => {
                            add(LogicExpr::Constant(c.clone()))
                        }
                        (ResultRule::ResultGenlsArg(_), LinkKind::Genls) => {
                            if let Ok(rt) = self.result_type(t) {
                                add(rt);
                            }
                        }
                        _ => {}
                    }
                }
            }
            LogicExpr::Numeral(_) if kind == LinkKind::Isa => {
                if t.is_positive_integer() {
                    add(LogicExpr::constant("PositiveInteger"));
                }
                if t.as_integer().is_some() {
                    add(LogicExpr::constant("Integer"));
                } else {
                    add(LogicExpr::constant("RealNumber"));
                }
            }
            _ => {}
        }
        out
    }

    fn closure(&self, start: &Term, kinds: &[LinkKind]) -> BTreeSet<Term> {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(t) = queue.pop_front() {
            for &k in kinds {
                for up in self.direct_up(&t, k) {
                    if seen.insert(up.clone()) {
                        queue.push_back(up);
                    }
                }
            }
        }
        seen
    }

    fn cached(
        &self,
        cache: &RwLock<HashMap<Term, Arc<BTreeSet<Term>>>>,
        t: &Term,
        kinds: &[LinkKind],
    ) -> Arc<BTreeSet<Term>> {
        if let Some(hit) = cache.read().expect("cache lock").get(t) {
            return hit.clone();
        }
        let computed = Arc::new(self.closure(t, kinds));
        cache
            .write()
            .expect("cache lock")
            .insert(t.clone(), computed.clone());
        computed
    }

    /// Reflexive-transitive upward closure over `isa` and `genls`.
    pub fn generalizations(&self, t: &Term) -> Result<Arc<BTreeSet<Term>>, KbError> {
        self.require_known(t)?;
        Ok(self.cached(&self.gen_cache, t, &[LinkKind::Isa, LinkKind::Genls]))
    }

    /// Reflexive-transitive closure over `genls` only.
    pub fn genls_closure(&self, t: &Term) -> Result<Arc<BTreeSet<Term>>, KbError> {
        self.require_known(t)?;
        Ok(self.cached(&self.genls_cache, t, &[LinkKind::Genls]))
    }

    /// Collections `t` is an instance of: one `isa` step, then `genls`.
    pub fn instance_types(&self, t: &Term) -> Result<BTreeSet<Term>, KbError> {
        self.require_known(t)?;
        let mut out = BTreeSet::new();
        for c in self.direct_up(t, LinkKind::Isa) {
            out.extend(
                self.cached(&self.genls_cache, &c, &[LinkKind::Genls])
                    .iter()
                    .cloned(),
            );
        }
        Ok(out)
    }

    pub fn subsumes(
        &self,
        general: &Term,
        specific: &Term,
        mode: SubsumptionMode,
    ) -> Result<bool, KbError> {
        self.require_known(general)?;
        self.require_known(specific)?;
        let mode = match mode {
            SubsumptionMode::Auto => match self.kind_of(specific) {
                TermKind::Individual => SubsumptionMode::Isa,
                TermKind::Collection => SubsumptionMode::Genls,
            },
            m => m,
        };
        Ok(match mode {
            SubsumptionMode::Genls => self.genls_closure(specific)?.contains(general),
            _ => self.instance_types(specific)?.contains(general),
        })
    }

    /// The type a NAT is matched under, per its functor's result rule.
    pub fn result_type(&self, t: &Term) -> Result<Term, KbError> {
        let LogicExpr::Nat { functor, args } = t else {
            return Err(KbError::Untyped(t.to_string()));
        };
        let sig = self
            .functions
            .get(functor)
            .ok_or_else(|| KbError::Untyped(functor.clone()))?;
        match &sig.result_rule {
            ResultRule::ResultIsa(c) | ResultRule::ResultGenls(c) => {
                Ok(LogicExpr::Constant(c.clone()))
            }
            ResultRule::ResultGenlsArg(n) => {
                let arg = args.get(n - 1).ok_or_else(|| KbError::Arity {
                    functor: functor.clone(),
                    expected: sig.arity,
                    actual: args.len(),
                    term: t.to_string(),
                })?;
                match arg {
                    LogicExpr::Nat { functor: inner, .. } if self.functions.contains_key(inner) => {
                        self.result_type(arg)
                    }
                    other => Ok(other.clone()),
                }
            }
        }
    }

    /// Asserted facts for a predicate visible from `ctx`.
    pub fn facts<'a>(
        &'a self,
        predicate: &Term,
        ctx: &'a ContextStack,
    ) -> impl Iterator<Item = &'a Fact> + 'a {
        self.facts
            .get(predicate)
            .into_iter()
            .flatten()
            .filter(move |f| ctx.includes(&f.context))
    }

    /// Evaluates a ground test atom against the KB. Taxonomic predicates
    /// are answered from the taxonomy, other atoms by matching facts whose
    /// arguments subsume the query arguments; negation is by failure.
    pub fn holds(&self, atom: &LogicExpr, ctx: &ContextStack) -> bool {
        match atom {
            LogicExpr::And(parts) => parts.iter().all(|p| self.holds(p, ctx)),
            LogicExpr::Not(inner) => !self.holds(inner, ctx),
            LogicExpr::App { head, args } => {
                if !atom.is_ground() {
                    return false;
                }
                match (head.as_constant(), args.as_slice()) {
                    (Some("genls"), [s, g]) => {
                        self.subsumes(g, s, SubsumptionMode::Genls).unwrap_or(false)
                    }
                    (Some("isa"), [s, g]) => {
                        self.subsumes(g, s, SubsumptionMode::Isa).unwrap_or(false)
                    }
                    (Some("equals"), [a, b]) => a == b,
                    (Some("disjointWith"), [a, b]) => self.is_disjoint(a, b),
                    _ => self
                        .facts(head, ctx)
                        .any(|f| !f.negated && self.fact_matches(f, args)),
                }
            }
            _ => false,
        }
    }

    fn fact_matches(&self, fact: &Fact, args: &[LogicExpr]) -> bool {
        fact.args.len() == args.len()
            && fact.args.iter().zip(args).all(|(general, specific)| {
                general == specific
                    || self
                        .subsumes(general, specific, SubsumptionMode::Auto)
                        .unwrap_or(false)
            })
    }
}
