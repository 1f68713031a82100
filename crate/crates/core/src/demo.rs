//! Bundled micro-resources: a small knowledge base, lexicon and
//! construction set covering the worked examples.

use crate::constructions::{parse_constructions, ConstructionError, Repository};
use crate::kb::{KbError, KnowledgeBase};
use crate::tagger::{Lexicon, LexiconError};

pub const KB: &str = include_str!("../resources/demo.kb");
pub const LEXICON: &str = include_str!("../resources/demo.lex");
pub const CONSTRUCTIONS: &str = include_str!("../resources/demo.cxn");

pub fn knowledge_base() -> Result<KnowledgeBase, KbError> {
    KB.parse()
}

pub fn lexicon() -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::new();
    lex.load_str(LEXICON, "demo.lex")?;
    Ok(lex)
}

pub fn repository() -> Result<Repository, ConstructionError> {
    Repository::new(parse_constructions(CONSTRUCTIONS, "demo.cxn")?)
}
