//! CycL-style logical expressions: representation, concrete syntax,
//! substitution, renaming and simplification.

mod simplify;
mod subst;

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::sexp::{self, Datum, SyntaxError};

pub use simplify::simplify;
pub use subst::{rename_query_vars, substitute, Binding};

/// Name of the equality predicate eliminated by [`simplify`].
pub const EQUALS: &str = "equals";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicExpr {
    Constant(String),
    Numeral(BigRational),
    Text(String),
    TypedVar {
        ty: String,
        index: u32,
    },
    QueryVar(String),
    /// Non-atomic term: a function application denoting a concept.
    Nat {
        functor: String,
        args: Vec<LogicExpr>,
    },
    And(Vec<LogicExpr>),
    Not(Box<LogicExpr>),
    /// Predicate (or relation-denoting term) applied to arguments.
    App {
        head: Box<LogicExpr>,
        args: Vec<LogicExpr>,
    },
    Kappa {
        vars: Vec<String>,
        body: Box<LogicExpr>,
    },
    TheSetOf {
        var: String,
        body: Box<LogicExpr>,
    },
    Exists {
        var: String,
        body: Box<LogicExpr>,
    },
}

/// A variable that can be bound by a [`Binding`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Typed { ty: String, index: u32 },
    Query(String),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Typed { ty, index } => write!(f, "${ty}#{index}"),
            Var::Query(n) => write!(f, "?{n}"),
        }
    }
}

impl Var {
    pub fn to_expr(&self) -> LogicExpr {
        match self {
            Var::Typed { ty, index } => LogicExpr::TypedVar {
                ty: ty.clone(),
                index: *index,
            },
            Var::Query(n) => LogicExpr::QueryVar(n.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("{line}:{col}: unknown sigil in '{text}'")]
    UnknownSigil {
        text: String,
        line: usize,
        col: usize,
    },
}

impl ParseError {
    fn at(d: &Datum, msg: impl Into<String>) -> Self {
        ParseError::Syntax(d.error(msg))
    }
}

/// Parses a single expression.
pub fn parse_expr(text: &str) -> Result<LogicExpr, ParseError> {
    from_datum(&sexp::read_one(text)?)
}

/// Converts an already-read datum into an expression.
pub fn from_datum(d: &Datum) -> Result<LogicExpr, ParseError> {
    match d {
        Datum::Str(s, _) => Ok(LogicExpr::Text(s.clone())),
        Datum::Atom(a, pos) => parse_atom(a).ok_or_else(|| ParseError::UnknownSigil {
            text: a.clone(),
            line: pos.line,
            col: pos.col,
        }),
        Datum::List(items, _) => {
            let Some((head, rest)) = items.split_first() else {
                return Err(ParseError::at(d, "empty list is not an expression"));
            };
            let keyword = head.as_atom().map(strip_constant_prefix);
            match keyword {
                Some("and") => {
                    if rest.is_empty() {
                        return Err(ParseError::at(d, "'and' needs at least one argument"));
                    }
                    Ok(LogicExpr::And(parse_args(rest)?))
                }
                Some("not" | "¬") => match rest {
                    [x] => Ok(LogicExpr::Not(Box::new(from_datum(x)?))),
                    _ => Err(ParseError::at(d, "'not' takes exactly one argument")),
                },
                Some("Kappa") => match rest {
                    [vars, body] => {
                        let vars = vars
                            .as_list()
                            .ok_or_else(|| ParseError::at(vars, "Kappa expects a variable list"))?
                            .iter()
                            .map(query_var_name)
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(LogicExpr::Kappa {
                            vars,
                            body: Box::new(from_datum(body)?),
                        })
                    }
                    _ => Err(ParseError::at(d, "Kappa takes a variable list and a body")),
                },
                Some(binder @ ("TheSetOf" | "thereExists")) => match rest {
                    [var, body] => {
                        let var = query_var_name(var)?;
                        let body = Box::new(from_datum(body)?);
                        Ok(if binder == "TheSetOf" {
                            LogicExpr::TheSetOf { var, body }
                        } else {
                            LogicExpr::Exists { var, body }
                        })
                    }
                    _ => Err(ParseError::at(
                        d,
                        format!("{binder} takes a variable and a body"),
                    )),
                },
                _ => {
                    let head_expr = from_datum(head)?;
                    let args = parse_args(rest)?;
                    match head_expr {
                        LogicExpr::Constant(name) if is_function_name(&name) => {
                            Ok(LogicExpr::Nat {
                                functor: name,
                                args,
                            })
                        }
                        head_expr => Ok(LogicExpr::App {
                            head: Box::new(head_expr),
                            args,
                        }),
                    }
                }
            }
        }
    }
}

fn parse_args(items: &[Datum]) -> Result<Vec<LogicExpr>, ParseError> {
    items.iter().map(from_datum).collect()
}

fn query_var_name(d: &Datum) -> Result<String, ParseError> {
    match d.as_atom().and_then(parse_atom) {
        Some(LogicExpr::QueryVar(n)) => Ok(n),
        _ => Err(ParseError::at(
            d,
            format!("expected a query variable, got {d}"),
        )),
    }
}

fn strip_constant_prefix(a: &str) -> &str {
    a.strip_prefix("#$").unwrap_or(a)
}

/// Functors whose applications denote terms rather than sentences.
pub fn is_function_name(name: &str) -> bool {
    name.len() > 2 && name.ends_with("Fn")
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '_' | '\'' | '.' | '*' | '+' | '/')
}

/// Parses `$Type#k`, returning the type name and index.
pub fn parse_typed_var(a: &str) -> Option<(String, u32)> {
    let body = a.strip_prefix('$')?;
    let (ty, idx) = body.rsplit_once('#')?;
    if ty.is_empty() || !ty.chars().all(is_name_char) || idx.is_empty() {
        return None;
    }
    if !idx.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Some((ty.to_string(), idx.parse().ok()?))
}

pub(crate) fn parse_numeral(a: &str) -> Option<BigRational> {
    let (neg, digits) = match a.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, a),
    };
    let all_digits = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit());
    let value = if let Some((n, d)) = digits.split_once('/') {
        if !all_digits(n) || !all_digits(d) {
            return None;
        }
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n.parse().ok()?, d)
    } else if let Some((whole, frac)) = digits.split_once('.') {
        if !all_digits(whole) || !all_digits(frac) {
            return None;
        }
        let scale = num::pow(BigInt::from(10), frac.len());
        let n: BigInt = format!("{whole}{frac}").parse().ok()?;
        BigRational::new(n, scale)
    } else if all_digits(digits) {
        BigRational::from_integer(digits.parse().ok()?)
    } else {
        return None;
    };
    Some(if neg { -value } else { value })
}

fn parse_atom(a: &str) -> Option<LogicExpr> {
    if a.starts_with('$') {
        let (ty, index) = parse_typed_var(a)?;
        return Some(LogicExpr::TypedVar { ty, index });
    }
    if let Some(name) = a.strip_prefix('?') {
        if name.is_empty() || !name.chars().all(is_name_char) {
            return None;
        }
        return Some(LogicExpr::QueryVar(name.to_string()));
    }
    if let Some(n) = parse_numeral(a) {
        return Some(LogicExpr::Numeral(n));
    }
    let name = strip_constant_prefix(a);
    match name.chars().next() {
        None => None,
        Some('#' | '$' | '?' | '@' | '%' | '&' | '!' | '^') => None,
        Some(_) => Some(LogicExpr::Constant(name.to_string())),
    }
}

impl fmt::Display for LogicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(
            f: &mut fmt::Formatter<'_>,
            head: &dyn fmt::Display,
            args: &[LogicExpr],
        ) -> fmt::Result {
            write!(f, "({head}")?;
            for a in args {
                write!(f, " {a}")?;
            }
            f.write_str(")")
        }
        match self {
            LogicExpr::Constant(c) => f.write_str(c),
            LogicExpr::Numeral(n) => write_numeral(f, n),
            LogicExpr::Text(s) => sexp::write_quoted(f, s),
            LogicExpr::TypedVar { ty, index } => write!(f, "${ty}#{index}"),
            LogicExpr::QueryVar(n) => write!(f, "?{n}"),
            LogicExpr::Nat { functor, args } => list(f, functor, args),
            LogicExpr::And(args) => list(f, &"and", args),
            LogicExpr::Not(x) => write!(f, "(not {x})"),
            LogicExpr::App { head, args } => list(f, head, args),
            LogicExpr::Kappa { vars, body } => {
                f.write_str("(Kappa (")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "?{v}")?;
                }
                write!(f, ") {body})")
            }
            LogicExpr::TheSetOf { var, body } => write!(f, "(TheSetOf ?{var} {body})"),
            LogicExpr::Exists { var, body } => write!(f, "(thereExists ?{var} {body})"),
        }
    }
}

fn write_numeral(f: &mut fmt::Formatter<'_>, n: &BigRational) -> fmt::Result {
    if n.denom().is_one() {
        write!(f, "{}", n.numer())
    } else {
        write!(f, "{}/{}", n.numer(), n.denom())
    }
}

impl LogicExpr {
    pub fn constant(name: &str) -> Self {
        LogicExpr::Constant(name.to_string())
    }

    pub fn integer(n: i64) -> Self {
        LogicExpr::Numeral(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn app(pred: &str, args: Vec<LogicExpr>) -> Self {
        LogicExpr::App {
            head: Box::new(LogicExpr::constant(pred)),
            args,
        }
    }

    /// Name of the head predicate when it is a plain constant.
    pub fn predicate_name(&self) -> Option<&str> {
        match self {
            LogicExpr::App { head, .. } => match head.as_ref() {
                LogicExpr::Constant(c) => Some(c),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<&str> {
        match self {
            LogicExpr::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, LogicExpr::TypedVar { .. } | LogicExpr::QueryVar(_))
    }

    /// True for expressions that are sentences rather than terms.
    pub fn is_sentential(&self) -> bool {
        matches!(
            self,
            LogicExpr::And(_)
                | LogicExpr::Not(_)
                | LogicExpr::App { .. }
                | LogicExpr::Exists { .. }
        )
    }

    /// True if no variable occurs anywhere, bound or free.
    pub fn is_ground(&self) -> bool {
        let mut ground = true;
        self.visit(&mut |e| {
            if matches!(
                e,
                LogicExpr::TypedVar { .. }
                    | LogicExpr::QueryVar(_)
                    | LogicExpr::Kappa { .. }
                    | LogicExpr::TheSetOf { .. }
                    | LogicExpr::Exists { .. }
            ) {
                ground = false;
            }
        });
        ground
    }

    pub fn is_closed(&self) -> bool {
        free_vars(self).is_empty()
    }

    /// Positive integer value of an integral numeral.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            LogicExpr::Numeral(n) if n.is_integer() => Some(n.to_integer()),
            _ => None,
        }
    }

    pub fn is_positive_integer(&self) -> bool {
        self.as_integer().is_some_and(|n| n.is_positive())
    }

    /// Top-level conjuncts (the expression itself when not a conjunction).
    pub fn conjuncts(&self) -> &[LogicExpr] {
        match self {
            LogicExpr::And(args) => args,
            other => std::slice::from_ref(other),
        }
    }

    /// Immediate subexpressions, in order.
    pub fn children(&self) -> Vec<&LogicExpr> {
        match self {
            LogicExpr::Constant(_)
            | LogicExpr::Numeral(_)
            | LogicExpr::Text(_)
            | LogicExpr::TypedVar { .. }
            | LogicExpr::QueryVar(_) => Vec::new(),
            LogicExpr::Nat { args, .. } | LogicExpr::And(args) => args.iter().collect(),
            LogicExpr::Not(x) => vec![x],
            LogicExpr::App { head, args } => std::iter::once(head.as_ref()).chain(args).collect(),
            LogicExpr::Kappa { body, .. }
            | LogicExpr::TheSetOf { body, .. }
            | LogicExpr::Exists { body, .. } => vec![body],
        }
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&LogicExpr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Query variables bound by this node, if it is a binder.
    pub fn bound_here(&self) -> &[String] {
        match self {
            LogicExpr::Kappa { vars, .. } => vars,
            LogicExpr::TheSetOf { var, .. } | LogicExpr::Exists { var, .. } => {
                std::slice::from_ref(var)
            }
            _ => &[],
        }
    }

    /// Every query-variable name occurring anywhere, bound or free.
    pub fn all_query_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let LogicExpr::QueryVar(n) = e {
                out.insert(n.clone());
            }
            for v in e.bound_here() {
                out.insert(v.clone());
            }
        });
        out
    }
}

/// Free variables (typed and query) of `e`.
pub fn free_vars(e: &LogicExpr) -> BTreeSet<Var> {
    fn walk(e: &LogicExpr, bound: &mut Vec<String>, out: &mut BTreeSet<Var>) {
        match e {
            LogicExpr::TypedVar { ty, index } => {
                out.insert(Var::Typed {
                    ty: ty.clone(),
                    index: *index,
                });
            }
            LogicExpr::QueryVar(n) => {
                if !bound.contains(n) {
                    out.insert(Var::Query(n.clone()));
                }
            }
            _ => {
                let binds = e.bound_here();
                let depth = bound.len();
                bound.extend(binds.iter().cloned());
                for c in e.children() {
                    walk(c, bound, out);
                }
                bound.truncate(depth);
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(e, &mut Vec::new(), &mut out);
    out
}

/// Free query-variable names of `e`.
pub fn free_query_vars(e: &LogicExpr) -> BTreeSet<String> {
    free_vars(e)
        .into_iter()
        .filter_map(|v| match v {
            Var::Query(n) => Some(n),
            Var::Typed { .. } => None,
        })
        .collect()
}

/// Existentially closes every free query variable, outermost first in name order.
pub fn quantify_existential(e: &LogicExpr) -> LogicExpr {
    free_query_vars(e)
        .into_iter()
        .rev()
        .fold(e.clone(), |body, var| LogicExpr::Exists {
            var,
            body: Box::new(body),
        })
}

/// Renames query variables to `?V0`, `?V1`, ... in order of first
/// occurrence; two expressions are alpha-equivalent iff their canonical
/// forms are equal.
pub fn canonicalize_vars(e: &LogicExpr) -> LogicExpr {
    fn collect(e: &LogicExpr, order: &mut Vec<String>) {
        for v in e.bound_here() {
            if !order.contains(v) {
                order.push(v.clone());
            }
        }
        if let LogicExpr::QueryVar(n) = e {
            if !order.contains(n) {
                order.push(n.clone());
            }
        }
        for c in e.children() {
            collect(c, order);
        }
    }
    fn rename(e: &LogicExpr, map: &std::collections::HashMap<&str, String>) -> LogicExpr {
        let r = |n: &String| map[n.as_str()].clone();
        match e {
            LogicExpr::QueryVar(n) => LogicExpr::QueryVar(r(n)),
            LogicExpr::Kappa { vars, body } => LogicExpr::Kappa {
                vars: vars.iter().map(r).collect(),
                body: Box::new(rename(body, map)),
            },
            LogicExpr::TheSetOf { var, body } => LogicExpr::TheSetOf {
                var: r(var),
                body: Box::new(rename(body, map)),
            },
            LogicExpr::Exists { var, body } => LogicExpr::Exists {
                var: r(var),
                body: Box::new(rename(body, map)),
            },
            other => other.map_children(|c| rename(c, map)),
        }
    }
    let mut order = Vec::new();
    collect(e, &mut order);
    let map = order
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), format!("V{i}")))
        .collect();
    rename(e, &map)
}

impl LogicExpr {
    /// Rebuilds this node with `f` applied to each immediate child.
    pub(crate) fn map_children(&self, mut f: impl FnMut(&LogicExpr) -> LogicExpr) -> LogicExpr {
        match self {
            LogicExpr::Constant(_)
            | LogicExpr::Numeral(_)
            | LogicExpr::Text(_)
            | LogicExpr::TypedVar { .. }
            | LogicExpr::QueryVar(_) => self.clone(),
            LogicExpr::Nat { functor, args } => LogicExpr::Nat {
                functor: functor.clone(),
                args: args.iter().map(&mut f).collect(),
            },
            LogicExpr::And(args) => LogicExpr::And(args.iter().map(&mut f).collect()),
            LogicExpr::Not(x) => LogicExpr::Not(Box::new(f(x))),
            LogicExpr::App { head, args } => LogicExpr::App {
                head: Box::new(f(head)),
                args: args.iter().map(&mut f).collect(),
            },
            LogicExpr::Kappa { vars, body } => LogicExpr::Kappa {
                vars: vars.clone(),
                body: Box::new(f(body)),
            },
            LogicExpr::TheSetOf { var, body } => LogicExpr::TheSetOf {
                var: var.clone(),
                body: Box::new(f(body)),
            },
            LogicExpr::Exists { var, body } => LogicExpr::Exists {
                var: var.clone(),
                body: Box::new(f(body)),
            },
        }
    }
}

/// Machine-readable form: compound expressions become arrays, atoms their
/// printed text, integral numerals JSON numbers.
pub fn to_json(e: &LogicExpr) -> serde_json::Value {
    use serde_json::Value;
    let arr = |head: Value, args: &[LogicExpr]| {
        Value::Array(
            std::iter::once(head)
                .chain(args.iter().map(to_json))
                .collect(),
        )
    };
    match e {
        LogicExpr::Numeral(n) if n.is_integer() => match i64::try_from(n.to_integer()) {
            Ok(i) => Value::from(i),
            Err(_) => Value::String(e.to_string()),
        },
        LogicExpr::Constant(_)
        | LogicExpr::Numeral(_)
        | LogicExpr::Text(_)
        | LogicExpr::TypedVar { .. }
        | LogicExpr::QueryVar(_) => Value::String(e.to_string()),
        LogicExpr::Nat { functor, args } => arr(Value::String(functor.clone()), args),
        LogicExpr::And(args) => arr(Value::String("and".into()), args),
        LogicExpr::Not(x) => arr(Value::String("not".into()), std::slice::from_ref(x)),
        LogicExpr::App { head, args } => arr(to_json(head), args),
        LogicExpr::Kappa { vars, body } => Value::Array(vec![
            Value::String("Kappa".into()),
            Value::Array(
                vars.iter()
                    .map(|v| Value::String(format!("?{v}")))
                    .collect(),
            ),
            to_json(body),
        ]),
        LogicExpr::TheSetOf { var, body } => Value::Array(vec![
            Value::String("TheSetOf".into()),
            Value::String(format!("?{var}")),
            to_json(body),
        ]),
        LogicExpr::Exists { var, body } => Value::Array(vec![
            Value::String("thereExists".into()),
            Value::String(format!("?{var}")),
            to_json(body),
        ]),
    }
}

/// Inverse of [`to_json`].
pub fn from_json(v: &serde_json::Value) -> Result<LogicExpr, ParseError> {
    fn text(v: &serde_json::Value) -> Result<String, ParseError> {
        use serde_json::Value;
        Ok(match v {
            // atoms carry their printed form
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            Value::Array(items) => {
                let parts = items.iter().map(text).collect::<Result<Vec<_>, _>>()?;
                format!("({})", parts.join(" "))
            }
            other => {
                return Err(ParseError::Syntax(SyntaxError {
                    line: 0,
                    col: 0,
                    msg: format!("unexpected JSON value {other}"),
                }))
            }
        })
    }
    parse_expr(&text(v)?)
}
