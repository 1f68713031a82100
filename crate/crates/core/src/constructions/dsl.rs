//! Construction file reader and load-time invariant checks.

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{self, free_query_vars, LogicExpr};
use crate::sexp::{self, Datum};

use super::template::parse_template;
use super::{Construction, ConstructionError, OutputType, Slot};

fn syntax(origin: &str, d: &Datum, msg: impl Into<String>) -> ConstructionError {
    let p = d.pos();
    ConstructionError::Syntax {
        origin: origin.to_string(),
        line: p.line,
        col: p.col,
        msg: msg.into(),
    }
}

fn typed_vars(e: &LogicExpr) -> Vec<Slot> {
    let mut out = Vec::new();
    e.visit(&mut |x| {
        if let LogicExpr::TypedVar { ty, index } = x {
            out.push(Slot {
                ty: ty.clone(),
                index: *index,
            });
        }
    });
    out
}

/// Parses every `(construction …)` form in `text` and validates each one.
pub fn parse_constructions(
    text: &str,
    origin: &str,
) -> Result<Vec<Construction>, ConstructionError> {
    let data = sexp::read_all(text).map_err(|e| ConstructionError::Syntax {
        origin: origin.to_string(),
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    data.iter().map(|d| parse_one(d, origin)).collect()
}

fn parse_one(d: &Datum, origin: &str) -> Result<Construction, ConstructionError> {
    let items = d
        .as_list()
        .ok_or_else(|| syntax(origin, d, "expected (construction …)"))?;
    match items.first().and_then(Datum::as_atom) {
        Some("construction") => {}
        _ => return Err(syntax(origin, d, "expected (construction …)")),
    }
    let mut id = None;
    let mut language = "en".to_string();
    let mut nl = Vec::new();
    let mut logic_forms = Vec::new();
    let mut anaphoric = Vec::new();
    let mut output_var = None;
    let mut output_type = None;
    let mut tests_positive = Vec::new();
    let mut tests_negative = Vec::new();

    let expr = |v: &Datum| logic::from_datum(v).map_err(|e| syntax(origin, v, e.to_string()));
    let mut rest = &items[1..];
    while let Some((k, tail)) = rest.split_first() {
        let key = k
            .as_atom()
            .filter(|a| a.starts_with(':'))
            .ok_or_else(|| syntax(origin, k, "expected a :keyword"))?;
        let Some((v, tail)) = tail.split_first() else {
            return Err(syntax(origin, k, format!("{key} needs a value")));
        };
        rest = tail;
        match key {
            ":id" => {
                id = Some(
                    v.as_atom()
                        .ok_or_else(|| syntax(origin, v, ":id must be a name"))?
                        .to_string(),
                )
            }
            ":lang" => {
                language = v
                    .as_atom()
                    .ok_or_else(|| syntax(origin, v, ":lang must be a tag"))?
                    .to_string()
            }
            ":nl" => {
                let Datum::Str(s, _) = v else {
                    return Err(syntax(origin, v, ":nl must be a quoted string"));
                };
                nl.push(parse_template(s, &language).map_err(|m| syntax(origin, v, m))?);
            }
            ":logic" => logic_forms.push(expr(v)?),
            ":anaphoric" => {
                let list = v
                    .as_list()
                    .ok_or_else(|| syntax(origin, v, ":anaphoric takes a list of slots"))?;
                for s in list {
                    match expr(s)? {
                        LogicExpr::TypedVar { ty, index } => anaphoric.push(Slot { ty, index }),
                        _ => {
                            return Err(syntax(
                                origin,
                                s,
                                "anaphoric references must be $Type#k slots",
                            ))
                        }
                    }
                }
            }
            ":output-var" => match expr(v)? {
                LogicExpr::QueryVar(n) => output_var = Some(n),
                _ => return Err(syntax(origin, v, ":output-var must be a ?variable")),
            },
            ":output-type" => {
                output_type = Some(match v.as_list() {
                    Some([s, k]) if s.as_atom() == Some("slot") => OutputType::Slot(
                        k.as_atom()
                            .and_then(|a| a.parse().ok())
                            .ok_or_else(|| syntax(origin, k, "slot reference needs an index"))?,
                    ),
                    _ => match expr(v)? {
                        t @ (LogicExpr::Constant(_) | LogicExpr::Nat { .. }) if t.is_ground() => {
                            OutputType::Explicit(t)
                        }
                        _ => {
                            return Err(syntax(
                                origin,
                                v,
                                ":output-type must be a term or (slot k)",
                            ))
                        }
                    },
                })
            }
            ":test+" => tests_positive.push(expr(v)?),
            ":test-" => tests_negative.push(expr(v)?),
            other => return Err(syntax(origin, k, format!("unknown keyword {other}"))),
        }
    }

    let id = id.ok_or_else(|| syntax(origin, d, "construction has no :id"))?;
    let invalid = |msg: String| ConstructionError::Invalid {
        origin: origin.to_string(),
        line: d.pos().line,
        id: id.clone(),
        msg,
    };
    let logic = match logic_forms.len() {
        1 => logic_forms.pop().expect("one form"),
        0 => return Err(invalid("missing :logic template".into())),
        n => {
            return Err(invalid(format!(
                "exactly one :logic template allowed, found {n}"
            )))
        }
    };
    let c = Construction {
        id: id.clone(),
        nl_templates: nl,
        logic,
        anaphoric_refs: anaphoric,
        output_var,
        output_type: output_type.ok_or_else(|| invalid("missing :output-type".into()))?,
        tests_positive,
        tests_negative,
        origin: origin.to_string(),
        line: d.pos().line,
    };
    validate(&c).map_err(invalid)?;
    Ok(c)
}

/// Checks the construction invariants; the message names the first violation.
pub fn validate(c: &Construction) -> Result<(), String> {
    if c.nl_templates.is_empty() {
        return Err("at least one :nl template is required".into());
    }
    let mut types: BTreeMap<u32, &str> = BTreeMap::new();
    let template_slots = c.nl_templates.iter().flat_map(|t| t.slots());
    let logic_slots = typed_vars(&c.logic);
    let test_slots: Vec<Slot> = c
        .tests_positive
        .iter()
        .chain(&c.tests_negative)
        .flat_map(typed_vars)
        .collect();
    for s in template_slots
        .chain(&c.anaphoric_refs)
        .chain(&logic_slots)
        .chain(&test_slots)
    {
        match types.insert(s.index, &s.ty) {
            Some(prev) if prev != s.ty => {
                return Err(format!(
                    "slot #{} used with types {prev} and {}",
                    s.index, s.ty
                ));
            }
            _ => {}
        }
    }

    let in_templates: BTreeSet<u32> = c
        .nl_templates
        .iter()
        .flat_map(|t| t.slots())
        .map(|s| s.index)
        .collect();
    let anaphoric: BTreeSet<u32> = c.anaphoric_refs.iter().map(|s| s.index).collect();
    if anaphoric.len() != c.anaphoric_refs.len() {
        return Err("duplicate anaphoric reference".into());
    }
    if let Some(s) = c
        .anaphoric_refs
        .iter()
        .find(|s| in_templates.contains(&s.index))
    {
        return Err(format!(
            "anaphoric reference {s} also occurs in an NL template"
        ));
    }

    let needed: BTreeSet<u32> = logic_slots
        .iter()
        .chain(&test_slots)
        .map(|s| s.index)
        .chain(match c.output_type {
            OutputType::Slot(k) => Some(k),
            OutputType::Explicit(_) => None,
        })
        .filter(|k| !anaphoric.contains(k))
        .collect();
    for v in c.variants() {
        let mut seen = BTreeSet::new();
        for s in v.slots() {
            if !seen.insert(s.index) {
                return Err(format!(
                    "slot #{} occurs twice in one template variant",
                    s.index
                ));
            }
        }
        if let Some(k) = needed.iter().find(|k| !seen.contains(k)) {
            let shown: Vec<String> = v.elements.iter().map(ToString::to_string).collect();
            return Err(format!(
                "slot #{k} is not bound by the NL template variant \"{}\" nor by an anaphoric reference",
                shown.join(" ")
            ));
        }
    }

    if let Some(var) = &c.output_var {
        if !free_query_vars(&c.logic).contains(var) {
            return Err(format!(
                "output variable ?{var} does not occur free in the logic template"
            ));
        }
        if !c.logic.is_sentential() {
            return Err("an output variable requires a sentential logic template".into());
        }
    }
    Ok(())
}
