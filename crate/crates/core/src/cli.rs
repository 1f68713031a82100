//! Command-line front end.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::constructions::{
    parse_constructions, Construction, ConstructionError, OutputType, Repository, Slot,
};
use crate::demo;
use crate::eval::{self, EvalError, LengthUnit};
use crate::interpreter::{
    finalize, Edge, EdgeSource, Engine, EngineConfig, ParseGraph, Policy, TraceEvent,
};
use crate::kb::{self, ContextStack, Finding, KbError, KnowledgeBase, Located};
use crate::logic::{self, LogicExpr};
use crate::tagger::{self, Lexicon, LexiconError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_LOAD: i32 = 2;
pub const EXIT_LINT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "scg",
    version,
    about = "Interpret text into CycL-style logic with a construction grammar"
)]
pub struct Cli {
    #[command(flatten)]
    pub resources: ResourceArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ResourceArgs {
    /// Knowledge base file (repeatable).
    #[arg(long = "kb", global = true, value_name = "FILE")]
    pub kb: Vec<PathBuf>,
    /// Lexicon file (repeatable).
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Vec<PathBuf>,
    /// Construction file (repeatable).
    #[arg(long, global = true, value_name = "FILE")]
    pub constructions: Vec<PathBuf>,
    /// Also load the bundled demo resources.
    #[arg(long, global = true)]
    pub demo: bool,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, global = true, default_value = "en")]
    pub lang: String,
    #[arg(long, global = true, default_value_t = 12)]
    pub max_window: usize,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Statement)]
    pub mode: Mode,
    #[arg(long, global = true, default_value_t = 50_000)]
    pub max_edges: usize,
    /// Application context layered over the base context.
    #[arg(long, global = true, value_name = "OVERLAY")]
    pub context: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Cycl)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Statement,
    Question,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Cycl,
    Json,
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    Tokens,
    Chars,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interpret a text and print ranked interpretations.
    Interpret {
        text: Option<String>,
        /// Read the text from a file instead.
        #[arg(long, conflicts_with = "text")]
        file: Option<PathBuf>,
    },
    /// Print the concept tags of a text as a tab-separated table.
    Tag { text: String },
    /// Check the resources for inconsistencies; findings are JSON lines.
    Lint,
    /// Emit a scoring worksheet, or metrics when verdicts are given.
    Eval {
        captions: PathBuf,
        #[arg(long)]
        verdicts: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Unit::Tokens)]
        length_unit: Unit,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_LOAD,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// Resource texts with their origins, demo first.
fn sources(
    files: &[PathBuf],
    bundled: Option<(&'static str, &'static str)>,
) -> Result<Vec<(String, String)>, CliError> {
    let mut out: Vec<(String, String)> = bundled
        .map(|(t, o)| (t.to_string(), o.to_string()))
        .into_iter()
        .collect();
    for f in files {
        out.push((read(f)?, f.display().to_string()));
    }
    Ok(out)
}

/// Everything the engine needs, loaded from the manifest.
pub struct Resources {
    pub kb: KnowledgeBase,
    pub lexicon: Lexicon,
    pub repo: Repository,
}

impl ResourceArgs {
    fn require(&self) -> Result<(), CliError> {
        let missing: Vec<&str> = [
            ("--kb", &self.kb),
            ("--lexicon", &self.lexicon),
            ("--constructions", &self.constructions),
        ]
        .into_iter()
        .filter(|(_, v)| v.is_empty())
        .map(|(n, _)| n)
        .collect();
        if !self.demo && !missing.is_empty() {
            return Err(CliError::Usage(format!(
                "missing {} (or pass --demo)",
                missing.join(", ")
            )));
        }
        Ok(())
    }

    fn kb_sources(&self) -> Result<Vec<(String, String)>, CliError> {
        sources(&self.kb, self.demo.then_some((demo::KB, "demo.kb")))
    }

    fn lexicon_sources(&self) -> Result<Vec<(String, String)>, CliError> {
        sources(
            &self.lexicon,
            self.demo.then_some((demo::LEXICON, "demo.lex")),
        )
    }

    fn construction_sources(&self) -> Result<Vec<(String, String)>, CliError> {
        sources(
            &self.constructions,
            self.demo.then_some((demo::CONSTRUCTIONS, "demo.cxn")),
        )
    }

    pub fn load(&self) -> Result<Resources, CliError> {
        self.require()?;
        let mut decls = Vec::new();
        for (text, origin) in self.kb_sources()? {
            decls.extend(kb::parse_declarations(&text, &origin)?);
        }
        let kb = KnowledgeBase::from_declarations(decls)?;
        let mut lexicon = Lexicon::new();
        for (text, origin) in self.lexicon_sources()? {
            lexicon.load_str(&text, &origin)?;
        }
        let mut all = Vec::new();
        for (text, origin) in self.construction_sources()? {
            all.extend(parse_constructions(&text, &origin)?);
        }
        let repo = Repository::new(all)?;
        Ok(Resources { kb, lexicon, repo })
    }
}

impl EngineArgs {
    pub fn config(&self) -> EngineConfig {
        EngineConfig {
            max_window: self.max_window,
            language: self.lang.clone(),
            outermost_policy: match self.mode {
                Mode::Statement => Policy::Statement,
                Mode::Question => Policy::Question,
                Mode::Check => Policy::Check,
            },
            max_edges: self.max_edges,
            context: self
                .context
                .clone()
                .map_or_else(ContextStack::default, ContextStack::with_overlay),
            ..EngineConfig::default()
        }
    }
}

/// Parses `args` and runs the command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "scg: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: "<stdout>".into(),
        msg: e.to_string(),
    };
    match &cli.command {
        Command::Interpret { text, file } => {
            let text = match (text, file) {
                (Some(t), None) => t.clone(),
                (None, Some(f)) => read(f)?,
                _ => {
                    return Err(CliError::Usage(
                        "interpret needs a TEXT argument or --file".into(),
                    ))
                }
            };
            let res = cli.resources.load()?;
            let engine = Engine::new(&res.kb, &res.repo, &res.lexicon, cli.engine.config());
            let graph = engine.interpret(&text);
            let rendered = match cli.engine.format {
                Format::Cycl => render_cycl(&graph, engine.config.outermost_policy),
                Format::Trace => render_trace(&graph, engine.config.outermost_policy),
                Format::Json => format!(
                    "{}\n",
                    render_json(&res.repo, &graph, engine.config.outermost_policy)
                ),
            };
            out.write_all(rendered.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Tag { text } => {
            cli.resources.require()?;
            let mut lexicon = Lexicon::new();
            for (t, origin) in cli.resources.lexicon_sources()? {
                lexicon.load_str(&t, &origin)?;
            }
            out.write_all(render_tags(&tagger::tag(text, &lexicon)).as_bytes())
                .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Lint => {
            let r = &cli.resources;
            if !r.demo && r.kb.is_empty() && r.lexicon.is_empty() && r.constructions.is_empty() {
                return Err(CliError::Usage(
                    "lint needs resources (--kb, --lexicon, --constructions or --demo)".into(),
                ));
            }
            let findings = lint_resources(r)?;
            for f in &findings {
                writeln!(out, "{}", f.to_json()).map_err(io)?;
            }
            Ok(if findings.is_empty() {
                EXIT_OK
            } else {
                EXIT_LINT
            })
        }
        Command::Eval {
            captions,
            verdicts,
            length_unit,
        } => {
            let caps = eval::parse_captions(&read(captions)?, &captions.display().to_string())?;
            let verdicts = match verdicts {
                Some(v) => Some(eval::parse_verdicts(&read(v)?, &v.display().to_string())?),
                None => None,
            };
            let res = cli.resources.load()?;
            let engine = Engine::new(&res.kb, &res.repo, &res.lexicon, cli.engine.config());
            let records = eval::interpret_captions(&engine, &caps);
            let text = match verdicts {
                None => eval::worksheet(&records),
                Some(v) => {
                    let unit = match length_unit {
                        Unit::Tokens => LengthUnit::Tokens,
                        Unit::Chars => LengthUnit::Chars,
                    };
                    let m = eval::score(&records, &v, unit)?;
                    match cli.engine.format {
                        Format::Json => format!("{}\n", m.to_json()),
                        _ => render_metrics(&m, unit),
                    }
                }
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

fn span_text(graph: &ParseGraph, start: usize, end: usize) -> &str {
    let t = &graph.chart.tokens;
    if start >= end {
        return "";
    }
    &graph.chart.text[t[start].span.start..t[end - 1].span.end]
}

/// One line per interpretation: id, token span, covered text, logic.
pub fn render_cycl(graph: &ParseGraph, policy: Policy) -> String {
    let mut s = String::new();
    for i in finalize(graph, policy) {
        s.push_str(&format!(
            "{}\t[{},{})\t{}\t{}\n",
            i.id,
            i.start,
            i.end,
            span_text(graph, i.start, i.end),
            i.logic
        ));
    }
    s
}

fn source_name(e: &Edge) -> String {
    match &e.source {
        EdgeSource::Lexical => "lexical".into(),
        EdgeSource::Construction(id) => id.clone(),
    }
}

/// The cycl lines followed by every edge and every discarded candidate.
pub fn render_trace(graph: &ParseGraph, policy: Policy) -> String {
    let mut s = render_cycl(graph, policy);
    for e in &graph.edges {
        s.push_str(&format!(
            "edge\te{}\t[{},{})\t{}\t{}\n",
            e.id,
            e.start,
            e.end,
            source_name(e),
            e.logic
        ));
    }
    for t in &graph.trace {
        if let TraceEvent::Discarded {
            construction,
            start,
            end,
            candidate,
            reason,
        } = t
        {
            let cand = candidate.as_deref().unwrap_or("-");
            s.push_str(&format!(
                "discarded\t{construction}\t[{start},{end})\t{reason}\t{cand}\n"
            ));
        }
    }
    if graph.truncated {
        s.push_str("truncated\tedge limit reached\n");
    }
    s
}

fn provenance(repo: &Repository, graph: &ParseGraph, id: usize) -> Value {
    let e = graph.edge(id);
    let nl_slots: Vec<&Slot> = e
        .variant
        .map(|v| repo.variant(v).slots().collect())
        .unwrap_or_default();
    let children: Vec<Value> = e
        .children
        .iter()
        .map(|(slot, c)| {
            json!({
                "slot": slot.to_string(),
                "anaphoric": !nl_slots.contains(&slot),
                "node": provenance(repo, graph, *c),
            })
        })
        .collect();
    json!({
        "edge": e.id,
        "source": source_name(e),
        "span": [e.start, e.end],
        "logic": logic::to_json(&e.logic),
        "output_type": logic::to_json(&e.output_type),
        "children": children,
    })
}

/// Machine-readable document: tokens, interpretations with logic as
/// nested arrays, output types and provenance trees.
pub fn render_json(repo: &Repository, graph: &ParseGraph, policy: Policy) -> Value {
    let tokens: Vec<Value> = graph
        .chart
        .tokens
        .iter()
        .map(|t| json!({"surface": t.surface, "span": [t.span.start, t.span.end]}))
        .collect();
    let interps: Vec<Value> = finalize(graph, policy)
        .iter()
        .map(|i| {
            let e = graph.edge(i.edge);
            json!({
                "id": i.id,
                "span": [i.start, i.end],
                "text": span_text(graph, i.start, i.end),
                "logic": logic::to_json(&i.logic),
                "output_type": logic::to_json(&e.output_type),
                "provenance": provenance(repo, graph, i.edge),
            })
        })
        .collect();
    json!({
        "text": graph.chart.text,
        "tokens": tokens,
        "truncated": graph.truncated,
        "interpretations": interps,
    })
}

/// `start-end<TAB>surface<TAB>concepts` rows.
pub fn render_tags(chart: &tagger::TagChart) -> String {
    let mut s = String::new();
    for span in &chart.spans {
        let concepts: Vec<String> = span.concepts.iter().map(ToString::to_string).collect();
        s.push_str(&format!(
            "{}-{}\t{}\t{}\n",
            span.start,
            span.end,
            span.surface,
            concepts.join(" ")
        ));
    }
    s
}

fn render_metrics(m: &eval::Metrics, unit: LengthUnit) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"));
    let unit = match unit {
        LengthUnit::Tokens => "tokens",
        LengthUnit::Chars => "chars",
    };
    format!(
        "captions\t{}\ncoverage\t{:.6}\nprecision\t{}\nmean_length\t{} {unit}\nscored\t{}\ncorrect\t{}\n",
        m.captions,
        m.coverage,
        opt(m.precision),
        opt(m.mean_length),
        m.scored,
        m.correct
    )
}

fn finding(code: &'static str, origin: &str, line: usize, message: String) -> Finding {
    Finding {
        code,
        origin: origin.to_string(),
        line,
        col: 0,
        message,
    }
}

fn construction_findings(kb: &KnowledgeBase, c: &Construction, out: &mut Vec<Finding>) {
    let known = |name: &str| kb.is_known(&LogicExpr::Constant(name.to_string()));
    let types: BTreeSet<String> = c.slot_types().into_values().collect();
    for ty in types {
        if !known(&ty) {
            let msg = format!(
                "construction {}: slot type {ty} is not in the knowledge base",
                c.id
            );
            out.push(finding("unknown-slot-type", &c.origin, c.line, msg));
        }
    }
    if let OutputType::Explicit(t) = &c.output_type {
        if !kb.is_known(t) {
            let msg = format!(
                "construction {}: output type {t} is not in the knowledge base",
                c.id
            );
            out.push(finding("unknown-output-type", &c.origin, c.line, msg));
        }
    }
}

/// Runs every lint check over the named resources. Unparseable files are
/// load errors; everything else becomes a finding.
pub fn lint_resources(r: &ResourceArgs) -> Result<Vec<Finding>, CliError> {
    let mut decls: Vec<Located> = Vec::new();
    for (text, origin) in r.kb_sources()? {
        decls.extend(kb::parse_declarations(&text, &origin)?);
    }
    let mut findings = kb::lint(&decls);
    let kb = KnowledgeBase::build(decls.iter().map(|l| &l.decl));

    for (text, origin) in r.lexicon_sources()? {
        let mut lex = Lexicon::new();
        lex.load_str(&text, &origin)?;
        for entry in lex.entries() {
            for reading in &entry.readings {
                if !kb.is_known(reading) {
                    let msg = format!(
                        "lexicon entry \"{}\": {reading} is not in the knowledge base",
                        entry.surface
                    );
                    findings.push(finding(
                        "unknown-lexicon-term",
                        &entry.origin,
                        entry.line,
                        msg,
                    ));
                }
            }
        }
    }

    let mut all = Vec::new();
    for (text, origin) in r.construction_sources()? {
        match parse_constructions(&text, &origin) {
            Ok(cs) => all.extend(cs),
            Err(ConstructionError::Invalid {
                origin,
                line,
                id,
                msg,
            }) => {
                findings.push(finding(
                    "construction-invalid",
                    &origin,
                    line,
                    format!("construction {id}: {msg}"),
                ));
            }
            Err(e) => return Err(e.into()),
        }
    }
    for c in &all {
        construction_findings(&kb, c, &mut findings);
    }
    if let Err(ConstructionError::DuplicateId(id)) = Repository::new(all) {
        findings.push(finding(
            "duplicate-construction",
            "",
            0,
            format!("construction id {id} is defined twice"),
        ));
    }
    Ok(findings)
}
