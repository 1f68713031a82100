use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use super::dsl::parse_constructions;
use super::{Construction, ConstructionError, TemplateVariant, VariantElement};

pub type LexicalKey = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkeletonElem {
    Lit(String),
    Placeholder,
}

impl fmt::Display for SkeletonElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkeletonElem::Lit(s) => f.write_str(s),
            SkeletonElem::Placeholder => f.write_str("⟨*⟩"),
        }
    }
}

pub type SkeletonKey = Vec<SkeletonElem>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypedElem {
    Lit(String),
    Type(String),
}

pub type TypedKey = Vec<TypedElem>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Key {
    Lexical(LexicalKey),
    Skeleton(SkeletonKey),
    Typed(TypedKey),
}

/// Skeleton (slots collapsed) and lexical (slots removed) keys of a variant.
pub fn derive_keys(v: &[VariantElement]) -> (SkeletonKey, LexicalKey) {
    let skeleton = v
        .iter()
        .map(|e| match e {
            VariantElement::Lit(s) => SkeletonElem::Lit(s.clone()),
            VariantElement::Slot(_) => SkeletonElem::Placeholder,
        })
        .collect();
    let lexical = v
        .iter()
        .filter_map(|e| match e {
            VariantElement::Lit(s) => Some(s.clone()),
            VariantElement::Slot(_) => None,
        })
        .collect();
    (skeleton, lexical)
}

pub fn typed_key(v: &[VariantElement]) -> TypedKey {
    v.iter()
        .map(|e| match e {
            VariantElement::Lit(s) => TypedElem::Lit(s.clone()),
            VariantElement::Slot(s) => TypedElem::Type(s.ty.clone()),
        })
        .collect()
}

/// Immutable construction store with lexical, skeleton and typed indexes,
/// each keyed by language.
#[derive(Debug, Default)]
pub struct Repository {
    constructions: Vec<Construction>,
    by_id: HashMap<String, usize>,
    variants: Vec<TemplateVariant>,
    variant_owner: Vec<usize>,
    index: HashMap<(String, Key), BTreeSet<usize>>,
    used_types: BTreeSet<String>,
    vocabulary: BTreeSet<String>,
    max_variant_len: usize,
}

impl Repository {
    pub fn new(constructions: Vec<Construction>) -> Result<Self, ConstructionError> {
        let mut repo = Repository::default();
        for c in constructions {
            if repo.by_id.contains_key(&c.id) {
                return Err(ConstructionError::DuplicateId(c.id));
            }
            let owner = repo.constructions.len();
            repo.by_id.insert(c.id.clone(), owner);
            for v in c.variants() {
                let vid = repo.variants.len();
                let (skeleton, lexical) = derive_keys(&v.elements);
                for key in [
                    Key::Lexical(lexical),
                    Key::Skeleton(skeleton),
                    Key::Typed(typed_key(&v.elements)),
                ] {
                    repo.index
                        .entry((v.language.clone(), key))
                        .or_default()
                        .insert(vid);
                }
                for e in &v.elements {
                    match e {
                        VariantElement::Lit(s) => repo.vocabulary.insert(s.clone()),
                        VariantElement::Slot(s) => repo.used_types.insert(s.ty.clone()),
                    };
                }
                repo.max_variant_len = repo.max_variant_len.max(v.elements.len());
                repo.variants.push(v);
                repo.variant_owner.push(owner);
            }
            repo.used_types
                .extend(c.anaphoric_refs.iter().map(|s| s.ty.clone()));
            repo.constructions.push(c);
        }
        Ok(repo)
    }

    pub fn load_files<P: AsRef<Path>>(paths: &[P]) -> Result<Self, ConstructionError> {
        let mut all = Vec::new();
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p).map_err(|e| ConstructionError::Io {
                path: p.display().to_string(),
                msg: e.to_string(),
            })?;
            all.extend(parse_constructions(&text, &p.display().to_string())?);
        }
        Self::new(all)
    }

    /// Variant ids stored under `key` for `language`.
    pub fn lookup(&self, language: &str, key: &Key) -> BTreeSet<usize> {
        // avoid cloning the key for the common miss
        self.index
            .get(&(language.to_string(), key.clone()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn has(&self, language: &str, key: &Key) -> bool {
        self.index
            .contains_key(&(language.to_string(), key.clone()))
    }

    pub fn variant(&self, id: usize) -> &TemplateVariant {
        &self.variants[id]
    }

    pub fn variants(&self) -> &[TemplateVariant] {
        &self.variants
    }

    pub fn owner(&self, variant: usize) -> &Construction {
        &self.constructions[self.variant_owner[variant]]
    }

    pub fn construction(&self, id: &str) -> Option<&Construction> {
        self.by_id.get(id).map(|&i| &self.constructions[i])
    }

    pub fn constructions(&self) -> &[Construction] {
        &self.constructions
    }

    /// Types that occur as typed slots in some template or anaphoric field.
    pub fn used_types(&self) -> &BTreeSet<String> {
        &self.used_types
    }

    /// Whether a folded token occurs as a literal in some template.
    pub fn is_literal(&self, folded: &str) -> bool {
        self.vocabulary.contains(folded)
    }

    pub fn max_variant_len(&self) -> usize {
        self.max_variant_len
    }

    pub fn is_empty(&self) -> bool {
        self.constructions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.constructions.len()
    }
}

impl std::str::FromStr for Repository {
    type Err = ConstructionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        Self::new(parse_constructions(text, "<string>")?)
    }
}
