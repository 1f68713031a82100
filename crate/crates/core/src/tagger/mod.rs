//! Concept tagging: tokenization, sub-word segmentation and lexicon lookup
//! over every token window.

mod lexicon;

use std::collections::BTreeSet;
use std::ops::Range;

use crate::kb::Term;
use crate::logic::{self, LogicExpr};

pub(crate) use lexicon::normalize_surface;
pub use lexicon::{LexEntry, Lexicon, LexiconError};

/// Longest token window looked up in the lexicon.
pub const MAX_SPAN_TOKENS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Byte range in the source text.
    pub span: Range<usize>,
    /// For sub-word tokens, the index of the token they were split from
    /// in the pre-segmentation token list.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSpan {
    /// Token range.
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub concepts: BTreeSet<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagChart {
    pub text: String,
    pub tokens: Vec<Token>,
    pub spans: Vec<TagSpan>,
}

impl TagChart {
    pub fn span(&self, start: usize, end: usize) -> Option<&TagSpan> {
        self.spans.iter().find(|s| s.start == start && s.end == end)
    }

    /// Source text covered by tokens `start..end`, whitespace-normalized.
    pub fn surface(&self, start: usize, end: usize) -> String {
        normalize_surface(&self.text[self.tokens[start].span.start..self.tokens[end - 1].span.end])
    }
}

fn is_separator(c: char) -> bool {
    matches!(c, '-' | '(' | ')' | '[' | ']' | '{' | '}')
}

fn is_trailing_punct(c: char) -> bool {
    matches!(c, '.' | ',' | ';' | ':' | '!' | '?' | '"' | '\'')
}

/// Byte ranges of the tokens in a whitespace-free word: separators stand
/// alone, trailing punctuation and leading quotes are split off.
pub fn split_word(word: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut chunk_start = 0;
    let push_chunk = |s: usize, e: usize, out: &mut Vec<Range<usize>>| {
        let mut s = s;
        let mut e = e;
        let mut tail = Vec::new();
        while s < e && word[s..e].starts_with(['"', '\'']) {
            out.push(s..s + 1);
            s += 1;
        }
        while let Some(c) = word[s..e]
            .chars()
            .next_back()
            .filter(|&c| is_trailing_punct(c))
        {
            tail.push(e - c.len_utf8()..e);
            e -= c.len_utf8();
        }
        if s < e {
            out.push(s..e);
        }
        out.extend(tail.into_iter().rev());
    };
    for (i, c) in word.char_indices() {
        if is_separator(c) {
            push_chunk(chunk_start, i, &mut out);
            out.push(i..i + c.len_utf8());
            chunk_start = i + c.len_utf8();
        }
    }
    push_chunk(chunk_start, word.len(), &mut out);
    out
}

/// Splits on whitespace, then applies [`split_word`].
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut start = None;
    let flush = |s: usize, e: usize, out: &mut Vec<Token>| {
        for r in split_word(&text[s..e]) {
            let span = s + r.start..s + r.end;
            out.push(Token {
                surface: text[span.clone()].to_string(),
                span,
                parent: None,
            });
        }
    };
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                flush(s, i, &mut out);
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        flush(s, text.len(), &mut out);
    }
    out
}

/// Numeric value of a digit-run or decimal token.
pub fn numeral_reading(surface: &str) -> Option<Term> {
    if !surface.starts_with(|c: char| c.is_ascii_digit()) || surface.contains('/') {
        return None;
    }
    logic::parse_numeral(surface).map(LogicExpr::Numeral)
}

fn readings(lexicon: &Lexicon, surface: &str) -> BTreeSet<Term> {
    let mut r = lexicon.lookup(surface);
    if let Some(n) = numeral_reading(surface) {
        r.insert(n);
    }
    r
}

/// Decompositions of `word` into consecutive segments that each have a
/// reading, longest lexicon match first, digit runs taken whole. Only
/// decompositions with at least two segments are returned.
pub fn segment(word: &str, lexicon: &Lexicon) -> Vec<Vec<Range<usize>>> {
    const LIMIT: usize = 64;
    fn go(
        word: &str,
        pos: usize,
        lexicon: &Lexicon,
        cur: &mut Vec<Range<usize>>,
        out: &mut Vec<Vec<Range<usize>>>,
    ) {
        if out.len() >= LIMIT {
            return;
        }
        if pos == word.len() {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        let rest = &word[pos..];
        if rest.starts_with(|c: char| c.is_ascii_digit()) {
            let len = rest
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(rest.len());
            cur.push(pos..pos + len);
            go(word, pos + len, lexicon, cur, out);
            cur.pop();
            return;
        }
        let ends: Vec<usize> = rest.char_indices().map(|(i, c)| i + c.len_utf8()).collect();
        for &end in ends.iter().rev() {
            if lexicon.contains(&rest[..end]) {
                cur.push(pos..pos + end);
                go(word, pos + end, lexicon, cur, out);
                cur.pop();
            }
        }
    }
    if word.is_empty() || lexicon.contains(word) {
        return Vec::new();
    }
    let mut out = Vec::new();
    go(word, 0, lexicon, &mut Vec::new(), &mut out);
    out
}

/// Joins runs of adjacent tokens containing a hyphen when the run as a
/// whole is a lexicon entry, longest run first.
fn join_hyphenated(text: &str, tokens: Vec<Token>, lexicon: &Lexicon) -> Vec<Token> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let mut run_end = i + 1;
        while run_end < tokens.len()
            && run_end - i < MAX_SPAN_TOKENS
            && tokens[run_end - 1].span.end == tokens[run_end].span.start
        {
            run_end += 1;
        }
        let joined = (i + 3..=run_end).rev().find(|&j| {
            let run = &tokens[i..j];
            run.iter().any(|t| t.surface == "-")
                && run[0].surface != "-"
                && run[j - i - 1].surface != "-"
                && lexicon.contains(&text[run[0].span.start..run[j - i - 1].span.end])
        });
        match joined {
            Some(j) => {
                let span = tokens[i].span.start..tokens[j - 1].span.end;
                out.push(Token {
                    surface: text[span.clone()].to_string(),
                    span,
                    parent: None,
                });
                i = j;
            }
            None => {
                out.push(tokens[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// Tags every token window of up to [`MAX_SPAN_TOKENS`] tokens with all of
/// its lexicon readings. Ambiguity is preserved.
pub fn tag(text: &str, lexicon: &Lexicon) -> TagChart {
    let joined = join_hyphenated(text, tokenize(text), lexicon);
    let mut tokens = Vec::with_capacity(joined.len());
    for (idx, t) in joined.into_iter().enumerate() {
        let splittable = t.surface.chars().all(char::is_alphanumeric)
            && readings(lexicon, &t.surface).is_empty();
        let decomposition = if splittable {
            segment(&t.surface, lexicon).into_iter().next()
        } else {
            None
        };
        match decomposition {
            Some(parts) => tokens.extend(parts.into_iter().map(|r| {
                let span = t.span.start + r.start..t.span.start + r.end;
                Token {
                    surface: text[span.clone()].to_string(),
                    span,
                    parent: Some(idx),
                }
            })),
            None => tokens.push(t),
        }
    }

    let mut chart = TagChart {
        text: text.to_string(),
        tokens,
        spans: Vec::new(),
    };
    let n = chart.tokens.len();
    for start in 0..n {
        for end in start + 1..=n.min(start + MAX_SPAN_TOKENS) {
            let surface = chart.surface(start, end);
            let concepts = if end == start + 1 {
                readings(lexicon, &surface)
            } else {
                lexicon.lookup(&surface)
            };
            if !concepts.is_empty() {
                chart.spans.push(TagSpan {
                    start,
                    end,
                    surface,
                    concepts,
                });
            }
        }
    }
    chart
}
