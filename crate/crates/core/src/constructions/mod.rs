//! Constructions: NL templates paired with one logic template, semantic
//! tests and output typing, indexed for three-tier exact-match retrieval.

mod dsl;
mod repository;
mod template;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kb::Term;
use crate::logic::LogicExpr;

pub use dsl::{parse_constructions, validate};
pub use repository::{
    derive_keys, Key, LexicalKey, Repository, SkeletonElem, SkeletonKey, TypedElem, TypedKey,
};
pub use template::{fold, parse_template, Element, NlTemplate, Slot, VariantElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("{origin}:{line}:{col}: {msg}")]
    Syntax {
        origin: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{origin}:{line}: construction {id}: {msg}")]
    Invalid {
        origin: String,
        line: usize,
        id: String,
        msg: String,
    },
    #[error("duplicate construction id {0}")]
    DuplicateId(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputType {
    Explicit(Term),
    /// The output type of whatever fills slot `k`.
    Slot(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub id: String,
    pub nl_templates: Vec<NlTemplate>,
    pub logic: LogicExpr,
    pub anaphoric_refs: Vec<Slot>,
    pub output_var: Option<String>,
    pub output_type: OutputType,
    pub tests_positive: Vec<LogicExpr>,
    pub tests_negative: Vec<LogicExpr>,
    pub origin: String,
    pub line: usize,
}

/// One alternation-free expansion of one NL template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateVariant {
    pub elements: Vec<VariantElement>,
    pub parent: String,
    pub language: String,
    /// Index of the NL template within its construction.
    pub template: usize,
}

impl TemplateVariant {
    pub fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.elements.iter().filter_map(|e| match e {
            VariantElement::Slot(s) => Some(s),
            VariantElement::Lit(_) => None,
        })
    }
}

impl Construction {
    /// Every variant of every NL template.
    pub fn variants(&self) -> Vec<TemplateVariant> {
        self.nl_templates
            .iter()
            .enumerate()
            .flat_map(|(i, t)| {
                t.expand().into_iter().map(move |elements| TemplateVariant {
                    elements,
                    parent: self.id.clone(),
                    language: t.language.clone(),
                    template: i,
                })
            })
            .collect()
    }

    pub fn variant_count(&self) -> usize {
        self.nl_templates
            .iter()
            .map(NlTemplate::variant_count)
            .sum()
    }

    pub fn is_anaphoric(&self) -> bool {
        !self.anaphoric_refs.is_empty()
    }

    /// Slot index to type, across templates, logic, anaphoric refs and tests.
    pub fn slot_types(&self) -> BTreeMap<u32, String> {
        let mut out = BTreeMap::new();
        for t in &self.nl_templates {
            for s in t.slots() {
                out.insert(s.index, s.ty.clone());
            }
        }
        for s in &self.anaphoric_refs {
            out.insert(s.index, s.ty.clone());
        }
        out
    }

    /// Identifier of the `i`th positive or negative test, as shown in traces.
    pub fn test_id(&self, positive: bool, i: usize) -> String {
        format!("{}/test{}/{}", self.id, if positive { '+' } else { '-' }, i)
    }
}
