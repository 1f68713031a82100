//! Every displayed expression from the worked examples, transcribed, must
//! survive parse then print unchanged up to whitespace.

use scg::logic::{free_vars, parse_expr, LogicExpr, Var};

const CORPUS: &[&str] = &[
    "(LargeFn (SubcollectionOfWithRelationToFn Building mainColorOfObject BlueColor))",
    "(SubcollectionOfWithRelationToFn MilitaryBase-Grounds
       (Kappa (?VAR1 ?VAR2) (behaviorCapable ?VAR1 ?VAR2 fromLocation))
       (DeployingMaterialOfTypeFn Submarine))",
    "(LargeFn $PositiveDimensionalThing#0)",
    "(CollectionSubsetFn $Food#1
       (TheSetOf ?FOOD
         (and (isa ?FOOD $Food#1)
              (intendedSoleFunction ?FOOD
                (SubcollectionOfWithRelationToTypeFn EatingEvent doneBy $Animal#0)
                consumedObject))))",
    "(CollectionSubsetFn $Food#1
       (TheSetOf ?FOOD
         (and (isa ?ART $Food#1)
              (intendedSoleFunction ?ART
                (SubcollectionOfWithRelationToTypeFn EatingEvent doneBy $Animal#0)
                consumedObject))))",
    "(EndFn (AnnualEventOfYearFn (SeasonOfSportEventTypeFn $SportsEvent#1) (YearFn $Integer#0)))",
    "(SitTypeSpecWithTypeRestrictionOnRolePlayerFn $ActionOnObject#0 objectActedOn $ExistingObjectType#1)",
    "((TypeCapableFn behaviorCapable) $ActionOnObject#0 objectActedOn $ExistingObjectType#1)",
    "(SitTypeSpecWithTypeRestrictionOnRolePlayerFn $MovementEvent#1 toLocation $PartiallyTangible#0)",
    "(not (genls $PartiallyTangible#0 SubAtomicParticle))",
    "(PolypeptideTypeWithResidueAtPositionReplacedByResidueTypeFn K-Ras-Protein
       (AminoAcidResidueTypeFn Glycine) 12 (AminoAcidResidueTypeFn Valine))",
    "(interArgGen1-2 properPartTypeCount Intangible Intangible)",
    "(and (isa ?EVT (CompositeActivityFn (TheSet EatingEvent Buying)))
          (objectActedOn ?EVT ?SAND)
          (isa ?SAND Sandwich))",
    "(and (isa ?EAT EatingEvent) (isa ?BUY Buying) (objectPaidFor ?BUY ?SAND)
          (consumedObject ?EAT ?SAND) (isa ?SAND Sandwich))",
    "(SubcollectionOfWithRelationToFn (GroupFn Sandwich) groupCardinality 2)",
];

fn squeeze(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .replace("( ", "(")
        .replace(" )", ")")
}

#[test]
fn corpus_round_trips() {
    for text in CORPUS {
        let e = parse_expr(text).unwrap_or_else(|err| panic!("{text}: {err}"));
        assert_eq!(e.to_string(), squeeze(text));
        assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }
}

#[test]
fn alternative_spellings_print_canonically() {
    let e = parse_expr("(#$EndFn (#$AnnualEventOfYearFn (#$SeasonOfSportEventTypeFn $SportsEvent#1) (#$YearFn $Integer#0)))").unwrap();
    assert_eq!(e.to_string(), squeeze(CORPUS[5]));
    assert_eq!(
        parse_expr("¬(genls $PartiallyTangible#0 SubAtomicParticle)")
            .unwrap()
            .to_string(),
        CORPUS[9]
    );
}

#[test]
fn set_former_binds_its_variable() {
    let e = parse_expr(CORPUS[3]).unwrap();
    let fv = free_vars(&e);
    assert!(fv.iter().all(|v| matches!(v, Var::Typed { .. })));
    assert_eq!(fv.len(), 2);
    assert!(matches!(e, LogicExpr::Nat { .. }));
}
