use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use crate::kb::Term;
use crate::logic::{self, LogicExpr};
use crate::sexp::{self, Datum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("{origin}:{line}:{col}: {msg}")]
    Load {
        origin: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub surface: String,
    pub readings: BTreeSet<Term>,
    pub exact_case: bool,
    pub origin: String,
    pub line: usize,
}

/// Surface-string to concept map. Surfaces are whitespace-normalized.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    exact: BTreeMap<String, BTreeSet<Term>>,
    folded: BTreeMap<String, BTreeSet<Term>>,
    entries: Vec<LexEntry>,
}

pub(crate) fn normalize_surface(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        surface: &str,
        readings: impl IntoIterator<Item = Term>,
        exact_case: bool,
    ) {
        self.push(LexEntry {
            surface: normalize_surface(surface),
            readings: readings.into_iter().collect(),
            exact_case,
            origin: String::new(),
            line: 0,
        });
    }

    fn push(&mut self, entry: LexEntry) {
        self.exact
            .entry(entry.surface.clone())
            .or_default()
            .extend(entry.readings.iter().cloned());
        if !entry.exact_case && entry.surface.chars().count() > 1 {
            self.folded
                .entry(entry.surface.to_lowercase())
                .or_default()
                .extend(entry.readings.iter().cloned());
        }
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Readings for a surface: exact-case hits, else case-folded hits.
    pub fn lookup(&self, surface: &str) -> BTreeSet<Term> {
        let s = normalize_surface(surface);
        if let Some(r) = self.exact.get(&s) {
            return r.clone();
        }
        self.folded
            .get(&s.to_lowercase())
            .cloned()
            .unwrap_or_default()
    }

    pub fn contains(&self, surface: &str) -> bool {
        !self.lookup(surface).is_empty()
    }

    pub fn load_str(&mut self, text: &str, origin: &str) -> Result<(), LexiconError> {
        let err = |d: &Datum, msg: String| {
            let p = d.pos();
            LexiconError::Load {
                origin: origin.to_string(),
                line: p.line,
                col: p.col,
                msg,
            }
        };
        let data = sexp::read_all(text).map_err(|e| LexiconError::Load {
            origin: origin.to_string(),
            line: e.line,
            col: e.col,
            msg: e.msg,
        })?;
        for d in &data {
            let items = d
                .as_list()
                .ok_or_else(|| err(d, "expected a lex form".into()))?;
            let (head, rest) = items
                .split_first()
                .ok_or_else(|| err(d, "empty form".into()))?;
            let keyword = head.as_atom().unwrap_or("");
            if keyword != "lex" && keyword != "lex-nat" {
                return Err(err(head, format!("unknown form '{keyword}'")));
            }
            let Some((Datum::Str(surface, _), rest)) = rest.split_first() else {
                return Err(err(d, "expected a quoted surface string".into()));
            };
            if surface.trim().is_empty() {
                return Err(err(d, "empty surface string".into()));
            }
            let mut exact_case = false;
            let mut readings = BTreeSet::new();
            for r in rest {
                if r.as_atom() == Some(":exact-case") {
                    exact_case = true;
                    continue;
                }
                let t = logic::from_datum(r).map_err(|e| err(r, e.to_string()))?;
                let ok = match keyword {
                    "lex-nat" => matches!(t, LogicExpr::Nat { .. }),
                    _ => matches!(
                        t,
                        LogicExpr::Constant(_) | LogicExpr::Nat { .. } | LogicExpr::Numeral(_)
                    ),
                };
                if !ok || !t.is_ground() {
                    return Err(err(r, format!("invalid {keyword} reading {t}")));
                }
                readings.insert(t);
            }
            if readings.is_empty() {
                return Err(err(d, "entry has no readings".into()));
            }
            self.push(LexEntry {
                surface: normalize_surface(surface),
                readings,
                exact_case,
                origin: origin.to_string(),
                line: d.pos().line,
            });
        }
        Ok(())
    }

    pub fn load_files<P: AsRef<Path>>(paths: &[P]) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new();
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p).map_err(|e| LexiconError::Io {
                path: p.display().to_string(),
                msg: e.to_string(),
            })?;
            lex.load_str(&text, &p.display().to_string())?;
        }
        Ok(lex)
    }
}

impl std::str::FromStr for Lexicon {
    type Err = LexiconError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lex = Lexicon::new();
        lex.load_str(text, "<string>")?;
        Ok(lex)
    }
}
