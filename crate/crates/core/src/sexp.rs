//! Minimal s-expression reader shared by the KB, lexicon, construction and
//! expression formats.
//!
//! Atoms are maximal runs of characters other than whitespace, parentheses,
//! double quotes and `;`. Strings are double-quoted with `\"` and `\\`
//! escapes. `;` starts a comment that runs to the end of the line. The atom
//! `¬` written directly in front of another datum reads as `(not datum)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Datum {
    Atom(String, Pos),
    Str(String, Pos),
    List(Vec<Datum>, Pos),
}

impl Datum {
    pub fn pos(&self) -> Pos {
        match self {
            Datum::Atom(_, p) | Datum::Str(_, p) | Datum::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Datum::Atom(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Datum]> {
        match self {
            Datum::List(items, _) => Some(items),
            _ => None,
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let p = self.pos();
        SyntaxError {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Atom(a, _) => f.write_str(a),
            Datum::Str(s, _) => write_quoted(f, s),
            Datum::List(items, _) => {
                f.write_str("(")?;
                for (i, d) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{d}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

const NEGATION: &str = "¬";

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Datum>, SyntaxError> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(SyntaxError {
                                line: pos.line,
                                col: pos.col,
                                msg: "unclosed '('".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            break;
                        }
                        Some(_) => {
                            let d = self.read()?.expect("peeked a non-trivia char");
                            items.push(d);
                        }
                    }
                }
                Ok(Some(Datum::List(items, pos)))
            }
            ')' => Err(self.err("unexpected ')'")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(SyntaxError {
                                line: pos.line,
                                col: pos.col,
                                msg: "unterminated string".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some(c @ ('"' | '\\')) => s.push(c),
                            Some(c) => return Err(self.err(format!("unknown escape '\\{c}'"))),
                            None => return Err(self.err("unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
                Ok(Some(Datum::Str(s, pos)))
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    atom.push(c);
                    self.bump();
                }
                if atom == NEGATION && self.chars.peek().is_some_and(|c| !c.is_whitespace()) {
                    if let Some(inner) = self.read()? {
                        let head = Datum::Atom("not".into(), pos);
                        return Ok(Some(Datum::List(vec![head, inner], pos)));
                    }
                }
                Ok(Some(Datum::Atom(atom, pos)))
            }
        }
    }
}

/// Reads every top-level datum in `text`.
pub fn read_all(text: &str) -> Result<Vec<Datum>, SyntaxError> {
    let mut r = Reader::new(text);
    let mut out = Vec::new();
    while let Some(d) = r.read()? {
        out.push(d);
    }
    Ok(out)
}

/// Reads exactly one datum; trailing content is an error.
pub fn read_one(text: &str) -> Result<Datum, SyntaxError> {
    let mut r = Reader::new(text);
    let d = r.read()?.ok_or_else(|| r.err("empty input"))?;
    r.skip_trivia();
    if r.chars.peek().is_some() {
        return Err(r.err("trailing input after expression"));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_strings() {
        let d = read_one("(a (b \"c d\") ; comment\n e)").unwrap();
        assert_eq!(d.to_string(), "(a (b \"c d\") e)");
    }

    #[test]
    fn negation_prefix_wraps_next_datum() {
        let d = read_one("¬(genls X Y)").unwrap();
        assert_eq!(d.to_string(), "(not (genls X Y))");
        let d = read_one("(¬ (p a))").unwrap();
        assert_eq!(d.to_string(), "(¬ (p a))");
    }

    #[test]
    fn reports_position_of_errors() {
        let e = read_one("(a\n  (b c)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = read_one("(a))").unwrap_err();
        assert_eq!((e.line, e.col), (1, 4));
        let e = read_all("x\n  )").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }
}
