//! The interpretation engine: seeds a parse graph with concept tags, runs
//! the sliding window to a fixpoint, and applies, tests and composes
//! constructions bottom-up.

mod apply;
mod finalize;
mod retrieve;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::constructions::{Repository, Slot};
use crate::kb::{ContextStack, KnowledgeBase, Term, TermKind, Violation};
use crate::logic::{canonicalize_vars, LogicExpr};
use crate::tagger::{self, Lexicon, TagChart};

pub use apply::compose;
pub use finalize::{finalize, Interpretation};
pub use retrieve::{retrieve, typed_pattern_count, Match};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Existentially close free variables.
    Statement,
    /// Leave free variables open for querying.
    Question,
    /// Existentially close; only the existence of bindings matters.
    Check,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub max_window: usize,
    pub language: String,
    pub max_anaphor_candidates: usize,
    pub outermost_policy: Policy,
    pub max_edges: usize,
    pub context: ContextStack,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_window: 12,
            language: "en".into(),
            max_anaphor_candidates: 5,
            outermost_policy: Policy::Statement,
            max_edges: 50_000,
            context: ContextStack::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeSource {
    Lexical,
    Construction(String),
}

impl fmt::Display for EdgeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeSource::Lexical => f.write_str("lexical"),
            EdgeSource::Construction(id) => f.write_str(id),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Instance,
    Collection,
    Sentential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: usize,
    /// Token range.
    pub start: usize,
    pub end: usize,
    pub source: EdgeSource,
    pub logic: LogicExpr,
    pub output_var: Option<String>,
    pub output_type: Term,
    pub kind: EdgeKind,
    /// Slot fillers, anaphoric ones included.
    pub children: Vec<(Slot, usize)>,
    /// Template variant that produced the edge.
    pub variant: Option<usize>,
    /// Generalizations of the output type that occur as slot types.
    pub slot_types: BTreeSet<String>,
}

impl Edge {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn is_lexical(&self) -> bool {
        self.source == EdgeSource::Lexical
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiscardReason {
    PositiveTestFailed(String),
    NegativeTestHeld(String),
    Implausible(Vec<Violation>),
    Structural(String),
    Composition(String),
    NoAntecedent(Slot),
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscardReason::PositiveTestFailed(id) => write!(f, "positive test {id} failed"),
            DiscardReason::NegativeTestHeld(id) => write!(f, "negative test {id} holds"),
            DiscardReason::Implausible(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "implausible: {}", parts.join("; "))
            }
            DiscardReason::Structural(m) => write!(f, "structural: {m}"),
            DiscardReason::Composition(m) => write!(f, "composition: {m}"),
            DiscardReason::NoAntecedent(s) => write!(f, "no antecedent for {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Added {
        edge: usize,
    },
    Discarded {
        construction: String,
        start: usize,
        end: usize,
        /// Rendered logic of the candidate when it got that far.
        candidate: Option<String>,
        reason: DiscardReason,
    },
}

#[derive(Debug, Clone)]
pub struct ParseGraph {
    pub chart: TagChart,
    pub edges: Vec<Edge>,
    pub trace: Vec<TraceEvent>,
    /// Set when `max_edges` stopped edge creation.
    pub truncated: bool,
    by_span: HashMap<(usize, usize), Vec<usize>>,
    seen: HashSet<(usize, usize, EdgeSource, LogicExpr)>,
    applied: HashSet<(usize, Vec<usize>)>,
    fresh: u64,
}

impl ParseGraph {
    fn new(chart: TagChart) -> Self {
        ParseGraph {
            chart,
            edges: Vec::new(),
            trace: Vec::new(),
            truncated: false,
            by_span: HashMap::new(),
            seen: HashSet::new(),
            applied: HashSet::new(),
            fresh: 0,
        }
    }

    pub fn token_count(&self) -> usize {
        self.chart.tokens.len()
    }

    pub fn edges_at(&self, start: usize, end: usize) -> &[usize] {
        self.by_span.get(&(start, end)).map_or(&[], Vec::as_slice)
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn construction_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !e.is_lexical())
    }

    /// Adds an edge unless an equal one (modulo variable renaming) exists.
    /// Returns the new id.
    fn add(&mut self, mut edge: Edge, max_edges: usize) -> Option<usize> {
        let key = (
            edge.start,
            edge.end,
            edge.source.clone(),
            canonicalize_vars(&edge.logic),
        );
        if self.seen.contains(&key) {
            return None;
        }
        if self.edges.len() >= max_edges {
            self.truncated = true;
            return None;
        }
        self.seen.insert(key);
        let id = self.edges.len();
        edge.id = id;
        self.by_span
            .entry((edge.start, edge.end))
            .or_default()
            .push(id);
        self.edges.push(edge);
        self.trace.push(TraceEvent::Added { edge: id });
        Some(id)
    }
}

/// Shared resources for interpreting any number of texts.
pub struct Engine<'a> {
    pub kb: &'a KnowledgeBase,
    pub repo: &'a Repository,
    pub lexicon: &'a Lexicon,
    pub config: EngineConfig,
}

impl<'a> Engine<'a> {
    pub fn new(
        kb: &'a KnowledgeBase,
        repo: &'a Repository,
        lexicon: &'a Lexicon,
        config: EngineConfig,
    ) -> Self {
        Engine {
            kb,
            repo,
            lexicon,
            config,
        }
    }

    pub(crate) fn slot_types_of(&self, t: &Term) -> BTreeSet<String> {
        let used = self.repo.used_types();
        match self.kb.generalizations(t) {
            Ok(g) => g
                .iter()
                .filter_map(|x| x.as_constant())
                .filter(|x| used.contains(*x))
                .map(str::to_string)
                .collect(),
            Err(_) => t
                .as_constant()
                .filter(|x| used.contains(*x))
                .map(|x| BTreeSet::from([x.to_string()]))
                .unwrap_or_default(),
        }
    }

    pub(crate) fn kind_of(&self, logic: &LogicExpr) -> EdgeKind {
        if logic.is_sentential() {
            return EdgeKind::Sentential;
        }
        match self.kb.kind_of(logic) {
            TermKind::Individual => EdgeKind::Instance,
            TermKind::Collection => EdgeKind::Collection,
        }
    }

    /// Tags `text`, seeds lexical edges and runs the window loop to a fixpoint.
    pub fn interpret(&self, text: &str) -> ParseGraph {
        let mut graph = ParseGraph::new(tagger::tag(text, self.lexicon));
        let spans = graph.chart.spans.clone();
        for span in spans {
            for concept in span.concepts {
                let edge = Edge {
                    id: 0,
                    start: span.start,
                    end: span.end,
                    source: EdgeSource::Lexical,
                    kind: self.kind_of(&concept),
                    slot_types: self.slot_types_of(&concept),
                    output_type: concept.clone(),
                    logic: concept,
                    output_var: None,
                    children: Vec::new(),
                    variant: None,
                };
                graph.add(edge, self.config.max_edges);
            }
        }
        self.run_to_fixpoint(&mut graph);
        graph
    }

    /// Alternates a non-anaphoric fixpoint with an anaphoric sweep until
    /// neither adds an edge.
    pub fn run_to_fixpoint(&self, graph: &mut ParseGraph) {
        loop {
            while self.sweep(graph, false) > 0 && !graph.truncated {}
            if graph.truncated || self.sweep(graph, true) == 0 {
                break;
            }
        }
    }

    /// One left-to-right pass of the window. At each anchor, sizes shrink
    /// from the largest until some window yields a new edge.
    pub fn sweep(&self, graph: &mut ParseGraph, anaphoric: bool) -> usize {
        let n = graph.token_count();
        let max_window = self.config.max_window.max(1);
        let mut added = 0;
        for anchor in 0..n {
            for size in (1..=max_window.min(n - anchor)).rev() {
                let new = self.process_window(graph, anchor, anchor + size, anaphoric);
                added += new;
                if new > 0 {
                    break;
                }
            }
        }
        added
    }

    fn process_window(
        &self,
        graph: &mut ParseGraph,
        start: usize,
        end: usize,
        anaphoric: bool,
    ) -> usize {
        let mut added = 0;
        for m in retrieve(self, graph, start, end) {
            if self.repo.owner(m.variant).is_anaphoric() != anaphoric {
                continue;
            }
            let key = (m.variant, m.binding.iter().map(|(_, e)| *e).collect());
            if !graph.applied.insert(key) {
                continue;
            }
            added += self.apply_construction(graph, &m, start, end);
        }
        added
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine_parts() -> (KnowledgeBase, Repository, Lexicon) {
        let kb: KnowledgeBase =
            r#"
            (genls Building PositiveDimensionalThing) (genls PositiveDimensionalThing PartiallyTangible)
            (isa BlueColor Color)
            (fn SubcollectionOfWithRelationToFn 3 (resultGenlsArg 1))
            (fn LargeFn 1 (resultGenlsArg 1))
            "#
        .parse::<KnowledgeBase>()
        .unwrap();
        let repo: Repository = r#"
            (construction :id ColorThing :nl "$Color#0 $PartiallyTangible#1"
              :logic (SubcollectionOfWithRelationToFn $PartiallyTangible#1 mainColorOfObject $Color#0)
              :output-type (slot 1))
            (construction :id Big :nl "big $PositiveDimensionalThing#0"
              :logic (LargeFn $PositiveDimensionalThing#0) :output-type (slot 0))
        "#
        .parse()
        .unwrap();
        let lex: Lexicon = r#"(lex "blue" BlueColor) (lex "building" Building)"#
            .parse()
            .unwrap();
        (kb, repo, lex)
    }

    #[test]
    fn big_blue_building() {
        let (kb, repo, lex) = engine_parts();
        let engine = Engine::new(&kb, &repo, &lex, EngineConfig::default());
        let g = engine.interpret("big blue building");
        let full: Vec<String> = g
            .construction_edges()
            .filter(|e| e.start == 0 && e.end == 3)
            .map(|e| e.logic.to_string())
            .collect();
        assert_eq!(
            full,
            ["(LargeFn (SubcollectionOfWithRelationToFn Building mainColorOfObject BlueColor))"]
        );
        let before = g.edges.len();
        let mut again = g.clone();
        engine.run_to_fixpoint(&mut again);
        assert_eq!(again.edges.len(), before);
    }

    #[test]
    fn empty_input_and_edge_cap() {
        let (kb, repo, lex) = engine_parts();
        let engine = Engine::new(&kb, &repo, &lex, EngineConfig::default());
        let g = engine.interpret("");
        assert!(g.chart.tokens.is_empty() && g.edges.is_empty());
        let capped = Engine::new(
            &kb,
            &repo,
            &lex,
            EngineConfig {
                max_edges: 2,
                ..EngineConfig::default()
            },
        );
        let g = capped.interpret("big blue building");
        assert!(g.truncated);
        assert_eq!(g.edges.len(), 2);
    }
}
