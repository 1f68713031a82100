//! Caption evaluation: worksheets for manual judging and metrics from
//! recorded verdicts.
//!
//! Scoring walks each caption's interpretations from the longest span
//! downwards. All interpretations at a span length are scored; the walk
//! stops after the first length that holds a correct one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::interpreter::{finalize, Engine};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{origin}:{line}: {msg}")]
    Format {
        origin: String,
        line: usize,
        msg: String,
    },
    #[error("duplicate caption id {0}")]
    DuplicateCaption(String),
    #[error("verdict for unknown caption {0}")]
    UnknownCaption(String),
    #[error("verdict for unknown interpretation {caption} {interpretation}")]
    UnknownInterpretation {
        caption: String,
        interpretation: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caption {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthUnit {
    #[default]
    Tokens,
    Chars,
}

/// One interpretation as seen by the scorer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredInterpretation {
    pub id: String,
    pub start: usize,
    pub end: usize,
    /// Characters of caption text covered by the span.
    pub chars: usize,
    pub logic: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptionRecord {
    pub id: String,
    pub text: String,
    pub tokens: usize,
    pub interpretations: Vec<ScoredInterpretation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub captions: usize,
    /// Mean over captions of the token fraction covered by correct
    /// interpretations.
    pub coverage: f64,
    /// Correct over scored, `None` when nothing was scored.
    pub precision: Option<f64>,
    /// Mean length of correct interpretations, `None` when there are none.
    pub mean_length: Option<f64>,
    pub scored: usize,
    pub correct: usize,
}

pub type Verdicts = BTreeMap<(String, String), Verdict>;

/// Reads `id<TAB>text` lines; blank lines and `#` comments are skipped.
pub fn parse_captions(text: &str, origin: &str) -> Result<Vec<Caption>, EvalError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, body) = line.split_once('\t').ok_or_else(|| EvalError::Format {
            origin: origin.to_string(),
            line: i + 1,
            msg: "expected id<TAB>text".into(),
        })?;
        let id = id.trim().to_string();
        if !seen.insert(id.clone()) {
            return Err(EvalError::DuplicateCaption(id));
        }
        out.push(Caption {
            id,
            text: body.to_string(),
        });
    }
    Ok(out)
}

/// Reads `caption interpretation correct|incorrect` lines.
pub fn parse_verdicts(text: &str, origin: &str) -> Result<Verdicts, EvalError> {
    let mut out = Verdicts::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| EvalError::Format {
            origin: origin.to_string(),
            line: i + 1,
            msg: msg.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [caption, interp, verdict] = fields[..] else {
            return Err(bad(
                "expected: caption-id interpretation-id correct|incorrect",
            ));
        };
        let v = match verdict {
            "correct" => Verdict::Correct,
            "incorrect" => Verdict::Incorrect,
            _ => return Err(bad("verdict must be correct or incorrect")),
        };
        out.insert((caption.to_string(), interp.to_string()), v);
    }
    Ok(out)
}

/// Interprets every caption and keeps the ranked interpretations.
pub fn interpret_captions(engine: &Engine, captions: &[Caption]) -> Vec<CaptionRecord> {
    let policy = engine.config.outermost_policy;
    captions
        .iter()
        .map(|c| {
            let graph = engine.interpret(&c.text);
            let tokens = &graph.chart.tokens;
            let interpretations = finalize(&graph, policy)
                .into_iter()
                .map(|i| {
                    let bytes = tokens[i.start].span.start..tokens[i.end - 1].span.end;
                    ScoredInterpretation {
                        chars: c.text[bytes].chars().count(),
                        id: i.id,
                        start: i.start,
                        end: i.end,
                        logic: i.logic.to_string(),
                    }
                })
                .collect();
            CaptionRecord {
                id: c.id.clone(),
                text: c.text.clone(),
                tokens: tokens.len(),
                interpretations,
            }
        })
        .collect()
}

/// A verdict file skeleton listing every interpretation, with the text and
/// logic as comments. Every line starts out `incorrect`.
pub fn worksheet(records: &[CaptionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "# {}\t{}", r.id, r.text);
        for i in &r.interpretations {
            let _ = writeln!(out, "# [{},{}) {}", i.start, i.end, i.logic);
            let _ = writeln!(out, "{} {} incorrect", r.id, i.id);
        }
    }
    out
}

/// Scores `records` against `verdicts`. Interpretations without a verdict
/// are not scored. Verdicts naming an unknown caption or interpretation
/// are errors.
pub fn score(
    records: &[CaptionRecord],
    verdicts: &Verdicts,
    unit: LengthUnit,
) -> Result<Metrics, EvalError> {
    let by_id: BTreeMap<&str, &CaptionRecord> =
        records.iter().map(|r| (r.id.as_str(), r)).collect();
    for (caption, interp) in verdicts.keys() {
        let r = by_id
            .get(caption.as_str())
            .ok_or_else(|| EvalError::UnknownCaption(caption.clone()))?;
        if !r.interpretations.iter().any(|i| &i.id == interp) {
            return Err(EvalError::UnknownInterpretation {
                caption: caption.clone(),
                interpretation: interp.clone(),
            });
        }
    }

    let mut coverage_sum = 0.0;
    let (mut scored, mut correct) = (0usize, 0usize);
    let mut length_sum = 0.0;
    for r in records {
        let mut levels: BTreeMap<std::cmp::Reverse<usize>, Vec<&ScoredInterpretation>> =
            BTreeMap::new();
        for i in &r.interpretations {
            levels
                .entry(std::cmp::Reverse(i.end - i.start))
                .or_default()
                .push(i);
        }
        let mut covered = BTreeSet::new();
        for level in levels.values() {
            let mut hit = false;
            for i in level {
                match verdicts.get(&(r.id.clone(), i.id.clone())) {
                    Some(Verdict::Correct) => {
                        hit = true;
                        scored += 1;
                        correct += 1;
                        covered.extend(i.start..i.end);
                        length_sum += match unit {
                            LengthUnit::Tokens => (i.end - i.start) as f64,
                            LengthUnit::Chars => i.chars as f64,
                        };
                    }
                    Some(Verdict::Incorrect) => scored += 1,
                    None => {}
                }
            }
            if hit {
                break;
            }
        }
        if r.tokens > 0 {
            coverage_sum += covered.len() as f64 / r.tokens as f64;
        }
    }
    Ok(Metrics {
        captions: records.len(),
        coverage: if records.is_empty() {
            0.0
        } else {
            coverage_sum / records.len() as f64
        },
        precision: (scored > 0).then(|| correct as f64 / scored as f64),
        mean_length: (correct > 0).then(|| length_sum / correct as f64),
        scored,
        correct,
    })
}

impl Metrics {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "captions": self.captions,
            "coverage": self.coverage,
            "precision": self.precision,
            "mean_length": self.mean_length,
            "scored": self.scored,
            "correct": self.correct,
        })
    }
}
