//! Reader for the declarative KB file format.

use crate::logic::{self, LogicExpr};
use crate::sexp::{self, Datum, Pos};

use super::{
    ArgConstraint, ConstraintKind, Fact, FunctionSignature, InterArgConstraint, KbError, LinkKind,
    ResultRule, TaxonomyLink, Term, TermKind,
};

/// One top-level form of a KB file.
#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Link(TaxonomyLink),
    Fact(Fact),
    Function(FunctionSignature),
    Arg(ArgConstraint),
    InterArg(InterArgConstraint),
    Disjoint(Term, Term),
    Kind(Term, TermKind),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub decl: Declaration,
    pub origin: String,
    pub pos: Pos,
}

fn err(origin: &str, d: &Datum, msg: impl Into<String>) -> KbError {
    let p = d.pos();
    KbError::Load {
        origin: origin.to_string(),
        line: p.line,
        col: p.col,
        msg: msg.into(),
    }
}

fn term(origin: &str, d: &Datum) -> Result<Term, KbError> {
    let e = logic::from_datum(d).map_err(|e| err(origin, d, e.to_string()))?;
    match &e {
        LogicExpr::Constant(_) | LogicExpr::Nat { .. } | LogicExpr::Numeral(_) if e.is_ground() => {
            Ok(e)
        }
        _ => Err(err(origin, d, format!("expected a ground term, got {e}"))),
    }
}

fn name(origin: &str, d: &Datum) -> Result<String, KbError> {
    match term(origin, d)? {
        LogicExpr::Constant(c) => Ok(c),
        other => Err(err(origin, d, format!("expected a constant, got {other}"))),
    }
}

fn index(origin: &str, d: &Datum) -> Result<usize, KbError> {
    d.as_atom()
        .and_then(|a| a.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| err(origin, d, "expected a positive argument index"))
}

/// Parses every declaration in `text`. `origin` names the source in errors.
pub fn parse_declarations(text: &str, origin: &str) -> Result<Vec<Located>, KbError> {
    let data = sexp::read_all(text).map_err(|e| KbError::Load {
        origin: origin.to_string(),
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    data.iter()
        .map(|d| {
            Ok(Located {
                decl: parse_form(origin, d)?,
                origin: origin.to_string(),
                pos: d.pos(),
            })
        })
        .collect()
}

fn parse_form(origin: &str, d: &Datum) -> Result<Declaration, KbError> {
    let items = d
        .as_list()
        .ok_or_else(|| err(origin, d, "top-level form must be a list"))?;
    let Some((head, rest)) = items.split_first() else {
        return Err(err(origin, d, "empty form"));
    };
    let keyword = head.as_atom().unwrap_or("");
    let arity_err = |n: usize| err(origin, d, format!("'{keyword}' takes {n} arguments"));
    Ok(match keyword {
        "isa" | "genls" => {
            let [s, g] = rest else {
                return Err(arity_err(2));
            };
            Declaration::Link(TaxonomyLink {
                kind: if keyword == "isa" {
                    LinkKind::Isa
                } else {
                    LinkKind::Genls
                },
                specific: term(origin, s)?,
                general: term(origin, g)?,
            })
        }
        "fact" => {
            let [ctx, atom] = rest else {
                return Err(arity_err(2));
            };
            let context = name(origin, ctx)?;
            let e = logic::from_datum(atom).map_err(|e| err(origin, atom, e.to_string()))?;
            let (negated, e) = match e {
                LogicExpr::Not(inner) => (true, *inner),
                e => (false, e),
            };
            let LogicExpr::App { head, args } = e else {
                return Err(err(origin, atom, "fact must be a predicate application"));
            };
            if !head.is_ground() || !args.iter().all(LogicExpr::is_ground) {
                return Err(err(origin, atom, "fact arguments must be ground"));
            }
            Declaration::Fact(Fact {
                predicate: *head,
                args,
                context,
                negated,
            })
        }
        "fn" => {
            let [f, arity, rule] = rest else {
                return Err(arity_err(3));
            };
            let functor = name(origin, f)?;
            let arity = index(origin, arity)?;
            let rule_items = rule
                .as_list()
                .ok_or_else(|| err(origin, rule, "expected a result rule"))?;
            let result_rule = match rule_items {
                [k, arg] => match k.as_atom() {
                    Some("resultIsa") => ResultRule::ResultIsa(name(origin, arg)?),
                    Some("resultGenls") => ResultRule::ResultGenls(name(origin, arg)?),
                    Some("resultGenlsArg") => {
                        let n = index(origin, arg)?;
                        if n > arity {
                            return Err(err(origin, arg, "resultGenlsArg index exceeds arity"));
                        }
                        ResultRule::ResultGenlsArg(n)
                    }
                    _ => return Err(err(origin, k, "unknown result rule")),
                },
                _ => return Err(err(origin, rule, "malformed result rule")),
            };
            Declaration::Function(FunctionSignature {
                functor,
                arity,
                result_rule,
            })
        }
        "argIsa" | "argGenls" => {
            let [p, n, c] = rest else {
                return Err(arity_err(3));
            };
            Declaration::Arg(ArgConstraint {
                relation: name(origin, p)?,
                position: index(origin, n)?,
                kind: if keyword == "argIsa" {
                    ConstraintKind::Isa
                } else {
                    ConstraintKind::Genls
                },
                required: name(origin, c)?,
            })
        }
        "interArgIsa" | "interArgGenls" => {
            let [p, n1, c1, n2, c2] = rest else {
                return Err(arity_err(5));
            };
            let (if_position, then_position) = (index(origin, n1)?, index(origin, n2)?);
            if if_position == then_position {
                return Err(err(origin, d, "inter-argument positions must differ"));
            }
            Declaration::InterArg(InterArgConstraint {
                relation: name(origin, p)?,
                if_position,
                if_type: name(origin, c1)?,
                then_position,
                then_type: name(origin, c2)?,
                kind: if keyword == "interArgIsa" {
                    ConstraintKind::Isa
                } else {
                    ConstraintKind::Genls
                },
            })
        }
        "disjoint" => {
            let [a, b] = rest else {
                return Err(arity_err(2));
            };
            Declaration::Disjoint(term(origin, a)?, term(origin, b)?)
        }
        "individual" | "collection" => {
            let [t] = rest else { return Err(arity_err(1)) };
            let kind = if keyword == "individual" {
                TermKind::Individual
            } else {
                TermKind::Collection
            };
            Declaration::Kind(term(origin, t)?, kind)
        }
        other => return Err(err(origin, head, format!("unknown form '{other}'"))),
    })
}
