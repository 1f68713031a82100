use std::collections::{BTreeMap, BTreeSet};

use super::{free_query_vars, LogicExpr, Var};

/// Variable assignment applied by [`substitute`].
pub type Binding = BTreeMap<Var, LogicExpr>;

/// Replaces every free occurrence of a bound variable. Binders shadow their
/// own variables and are alpha-renamed when a replacement would be captured.
pub fn substitute(e: &LogicExpr, b: &Binding) -> LogicExpr {
    if b.is_empty() {
        return e.clone();
    }
    match e {
        LogicExpr::TypedVar { ty, index } => b
            .get(&Var::Typed {
                ty: ty.clone(),
                index: *index,
            })
            .cloned()
            .unwrap_or_else(|| e.clone()),
        LogicExpr::QueryVar(n) => b
            .get(&Var::Query(n.clone()))
            .cloned()
            .unwrap_or_else(|| e.clone()),
        LogicExpr::Kappa { .. } | LogicExpr::TheSetOf { .. } | LogicExpr::Exists { .. } => {
            substitute_under_binder(e, b)
        }
        other => other.map_children(|c| substitute(c, b)),
    }
}

fn substitute_under_binder(e: &LogicExpr, b: &Binding) -> LogicExpr {
    let binders = e.bound_here().to_vec();
    let body = e.children()[0];

    let mut inner: Binding = b
        .iter()
        .filter(|(v, _)| !matches!(v, Var::Query(n) if binders.contains(n)))
        .map(|(v, x)| (v.clone(), x.clone()))
        .collect();
    let body_free = super::free_vars(body);
    inner.retain(|v, _| body_free.contains(v));
    if inner.is_empty() {
        return e.clone();
    }

    let incoming: BTreeSet<String> = inner.values().flat_map(free_query_vars).collect();
    let mut renamed = binders.clone();
    let mut avoid: BTreeSet<String> = body.all_query_names();
    avoid.extend(incoming.iter().cloned());
    for name in renamed.iter_mut() {
        if incoming.contains(name) {
            let fresh = fresh_name(name, &avoid);
            avoid.insert(fresh.clone());
            inner.insert(Var::Query(name.clone()), LogicExpr::QueryVar(fresh.clone()));
            *name = fresh;
        }
    }

    let new_body = Box::new(substitute(body, &inner));
    match e {
        LogicExpr::Kappa { .. } => LogicExpr::Kappa {
            vars: renamed,
            body: new_body,
        },
        LogicExpr::TheSetOf { .. } => LogicExpr::TheSetOf {
            var: renamed.remove(0),
            body: new_body,
        },
        _ => LogicExpr::Exists {
            var: renamed.remove(0),
            body: new_body,
        },
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded counter")
}

/// Appends `_suffix` to every free query variable.
pub fn rename_query_vars(e: &LogicExpr, suffix: u64) -> LogicExpr {
    let b: Binding = free_query_vars(e)
        .into_iter()
        .map(|n| {
            let renamed = LogicExpr::QueryVar(format!("{n}_{suffix}"));
            (Var::Query(n), renamed)
        })
        .collect();
    substitute(e, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{free_vars, parse_expr};

    fn p(s: &str) -> LogicExpr {
        parse_expr(s).unwrap()
    }

    fn typed(ty: &str, index: u32) -> Var {
        Var::Typed {
            ty: ty.into(),
            index,
        }
    }

    #[test]
    fn fills_typed_slot_with_term() {
        let b = Binding::from([(
            typed("PositiveDimensionalThing", 0),
            p("(SubcollectionOfWithRelationToFn Building mainColorOfObject BlueColor)"),
        )]);
        assert_eq!(
            substitute(&p("(LargeFn $PositiveDimensionalThing#0)"), &b).to_string(),
            "(LargeFn (SubcollectionOfWithRelationToFn Building mainColorOfObject BlueColor))"
        );
    }

    #[test]
    fn empty_binding_is_identity() {
        let e = p("(and (p ?X $T#0) (TheSetOf ?Y (q ?Y)))");
        assert_eq!(substitute(&e, &Binding::new()), e);
    }

    #[test]
    fn bound_variables_are_untouched() {
        let e = p("(CollectionSubsetFn $Food#1 (TheSetOf ?FOOD (isa ?FOOD $Food#1)))");
        let b = Binding::from([
            (Var::Query("FOOD".into()), p("Banana")),
            (typed("Food", 1), p("Kibble")),
        ]);
        assert_eq!(
            substitute(&e, &b).to_string(),
            "(CollectionSubsetFn Kibble (TheSetOf ?FOOD (isa ?FOOD Kibble)))"
        );
    }

    #[test]
    fn avoids_capture() {
        let e = p("(TheSetOf ?X (related ?X ?Y))");
        let b = Binding::from([(Var::Query("Y".into()), p("?X"))]);
        let out = substitute(&e, &b);
        assert_eq!(out.to_string(), "(TheSetOf ?X_1 (related ?X_1 ?X))");
        assert_eq!(free_vars(&out), BTreeSet::from([Var::Query("X".into())]));
    }

    #[test]
    fn renaming_is_injective_and_respects_binders() {
        let e = p("(and (isa ?SAND Sandwich) (Kappa (?A) (p ?A ?SAND)))");
        let r3 = rename_query_vars(&e, 3);
        assert_eq!(
            r3.to_string(),
            "(and (isa ?SAND_3 Sandwich) (Kappa (?A) (p ?A ?SAND_3)))"
        );
        let r4 = rename_query_vars(&e, 4);
        assert!(crate::logic::free_query_vars(&r3).is_disjoint(&crate::logic::free_query_vars(&r4)));
    }

    #[test]
    fn sequential_substitution_composes() {
        let e = p("(p $A#0 ?X (f $B#1))");
        let b1 = Binding::from([(typed("A", 0), p("a"))]);
        let b2 = Binding::from([(typed("B", 1), p("?X")), (Var::Query("X".into()), p("c"))]);
        let once = substitute(&substitute(&e, &b1), &b2);
        assert_eq!(once.to_string(), "(p a c (f ?X))");
    }
}
