use super::{substitute, Binding, LogicExpr, Var, EQUALS};

/// Flattens conjunctions, drops duplicate conjuncts and eliminates
/// top-level `(equals ?V t)` conjuncts by substituting `t` for `?V`.
/// Iterates to a fixed point.
pub fn simplify(e: &LogicExpr) -> LogicExpr {
    let mut cur = normalize(e);
    loop {
        let next = match eliminate_one_equality(&cur) {
            Some(reduced) => normalize(&reduced),
            None => return cur,
        };
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn normalize(e: &LogicExpr) -> LogicExpr {
    let e = e.map_children(normalize);
    match e {
        LogicExpr::And(args) => {
            let mut flat: Vec<LogicExpr> = Vec::with_capacity(args.len());
            for a in args {
                let parts = match a {
                    LogicExpr::And(inner) => inner,
                    other => vec![other],
                };
                for part in parts {
                    if !flat.contains(&part) {
                        flat.push(part);
                    }
                }
            }
            if flat.len() == 1 {
                flat.pop().expect("one conjunct")
            } else {
                LogicExpr::And(flat)
            }
        }
        other => other,
    }
}

/// Picks the variable to eliminate from `(equals lhs rhs)`, with the
/// expression that replaces it.
fn elimination(lhs: &LogicExpr, rhs: &LogicExpr) -> Option<(String, LogicExpr)> {
    match (lhs, rhs) {
        (LogicExpr::QueryVar(a), LogicExpr::QueryVar(b)) if a != b => {
            // keep the lexicographically smaller name
            if a < b {
                Some((b.clone(), lhs.clone()))
            } else {
                Some((a.clone(), rhs.clone()))
            }
        }
        (LogicExpr::QueryVar(v), t) | (t, LogicExpr::QueryVar(v)) if t.is_ground() => {
            Some((v.clone(), t.clone()))
        }
        _ => None,
    }
}

fn eliminate_one_equality(e: &LogicExpr) -> Option<LogicExpr> {
    let LogicExpr::And(conjuncts) = e else {
        return None;
    };
    for (i, c) in conjuncts.iter().enumerate() {
        if c.predicate_name() != Some(EQUALS) {
            continue;
        }
        let LogicExpr::App { args, .. } = c else {
            unreachable!("predicate_name implies App")
        };
        let [lhs, rhs] = args.as_slice() else {
            continue;
        };
        let rest: Vec<LogicExpr> = conjuncts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, x)| x.clone())
            .collect();
        if lhs == rhs {
            return Some(LogicExpr::And(rest));
        }
        if let Some((var, replacement)) = elimination(lhs, rhs) {
            let b = Binding::from([(Var::Query(var), replacement)]);
            return Some(LogicExpr::And(
                rest.iter().map(|x| substitute(x, &b)).collect(),
            ));
        }
    }
    None
}
