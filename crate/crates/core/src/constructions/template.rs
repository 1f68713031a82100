//! NL template micro-syntax: literals, `$Type#k` slots, `[a|b]`
//! alternation with `{}` (or an empty branch) for the empty alternative.

use std::fmt;

use crate::logic::parse_typed_var;
use crate::tagger::split_word;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub ty: String,
    pub index: u32,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}#{}", self.ty, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Literal(String),
    Slot(Slot),
    Alternation(Vec<Vec<Element>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NlTemplate {
    pub language: String,
    pub source: String,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariantElement {
    Lit(String),
    Slot(Slot),
}

impl fmt::Display for VariantElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantElement::Lit(s) => f.write_str(s),
            VariantElement::Slot(s) => s.fmt(f),
        }
    }
}

/// Case-folds a literal token for key comparison.
pub fn fold(s: &str) -> String {
    s.to_lowercase()
}

/// Splits at whitespace outside brackets.
fn words(text: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = None;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.checked_sub(1).ok_or("unbalanced ']'")?,
            _ => {}
        }
        if depth > 1 {
            return Err("nested alternations are not supported".into());
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(s) = start.take() {
                out.push(&text[s..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if depth != 0 {
        return Err("unbalanced '['".into());
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    Ok(out)
}

/// Tokens of an alternation-free chunk: slots are cut out wherever they
/// occur, the remaining text is split like input text.
fn chunk_elements(chunk: &str) -> Result<Vec<Element>, String> {
    let mut out = Vec::new();
    for word in chunk.split_whitespace() {
        let mut rest = word;
        while !rest.is_empty() {
            let (lit, tail) = match rest.find('$') {
                Some(p) => rest.split_at(p),
                None => (rest, ""),
            };
            for r in split_word(lit) {
                out.push(Element::Literal(fold(&lit[r])));
            }
            if tail.is_empty() {
                break;
            }
            let name_len = tail[1..]
                .find(|c: char| !(c.is_alphanumeric() || c == '-' || c == '_'))
                .map_or(tail.len(), |p| p + 1);
            let after_hash = &tail[name_len..];
            let digits = after_hash
                .strip_prefix('#')
                .map(|d| d.find(|c: char| !c.is_ascii_digit()).unwrap_or(d.len()))
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("malformed slot in '{word}': slots are written $Type#k"))?;
            let end = name_len + 1 + digits;
            let (ty, index) = parse_typed_var(&tail[..end])
                .ok_or_else(|| format!("malformed slot '{}'", &tail[..end]))?;
            out.push(Element::Slot(Slot { ty, index }));
            rest = &tail[end..];
        }
    }
    Ok(out)
}

/// Parses one NL template string.
pub fn parse_template(text: &str, language: &str) -> Result<NlTemplate, String> {
    let mut elements = Vec::new();
    for word in words(text)? {
        if !word.contains('[') {
            elements.extend(chunk_elements(word)?);
            continue;
        }
        // every combination of the word's bracket groups, as strings
        let mut strings = vec![String::new()];
        let mut rest = word;
        while let Some(open) = rest.find('[') {
            let close = open + rest[open..].find(']').ok_or("unbalanced '['")?;
            let fixed = &rest[..open];
            let mut branches: Vec<&str> = Vec::new();
            for b in rest[open + 1..close].split('|') {
                if b.contains("{}") {
                    branches.extend(b.split("{}").filter(|p| !p.is_empty()));
                    branches.push("");
                } else {
                    branches.push(b);
                }
            }
            strings = strings
                .iter()
                .flat_map(|s| branches.iter().map(move |b| format!("{s}{fixed}{b}")))
                .collect();
            rest = &rest[close + 1..];
        }
        for s in strings.iter_mut() {
            s.push_str(rest);
        }
        let alternatives = strings
            .iter()
            .map(|s| chunk_elements(s))
            .collect::<Result<Vec<_>, _>>()?;
        elements.push(Element::Alternation(alternatives));
    }
    if elements.is_empty() {
        return Err("empty template".into());
    }
    Ok(NlTemplate {
        language: language.to_string(),
        source: text.to_string(),
        elements,
    })
}

impl NlTemplate {
    /// Product of the alternation widths.
    pub fn variant_count(&self) -> usize {
        self.elements
            .iter()
            .map(|e| match e {
                Element::Alternation(alts) => alts.len(),
                _ => 1,
            })
            .product()
    }

    /// Every alternation-free variant, in cross-product order.
    pub fn expand(&self) -> Vec<Vec<VariantElement>> {
        let mut out: Vec<Vec<VariantElement>> = vec![Vec::new()];
        for e in &self.elements {
            match e {
                Element::Literal(s) => out
                    .iter_mut()
                    .for_each(|v| v.push(VariantElement::Lit(s.clone()))),
                Element::Slot(s) => out
                    .iter_mut()
                    .for_each(|v| v.push(VariantElement::Slot(s.clone()))),
                Element::Alternation(alts) => {
                    out = out
                        .iter()
                        .flat_map(|v| {
                            alts.iter().map(move |alt| {
                                let mut v = v.clone();
                                v.extend(alt.iter().map(|a| match a {
                                    Element::Literal(s) => VariantElement::Lit(s.clone()),
                                    Element::Slot(s) => VariantElement::Slot(s.clone()),
                                    Element::Alternation(_) => {
                                        unreachable!("alternations do not nest")
                                    }
                                }));
                                v
                            })
                        })
                        .collect();
                }
            }
        }
        out
    }

    /// Every slot mentioned anywhere in the template.
    pub fn slots(&self) -> Vec<&Slot> {
        fn walk<'a>(es: &'a [Element], out: &mut Vec<&'a Slot>) {
            for e in es {
                match e {
                    Element::Slot(s) => out.push(s),
                    Element::Alternation(alts) => alts.iter().for_each(|a| walk(a, out)),
                    Element::Literal(_) => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.elements, &mut out);
        out
    }
}
