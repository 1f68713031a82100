//! Generators and oracles shared by the property suites and the
//! acceptance run.
#![allow(dead_code)]

pub mod retrieval {
    use std::collections::BTreeSet;

    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use scg::constructions::{fold, Repository, VariantElement};
    use scg::interpreter::{retrieve, Engine, EngineConfig, Match, ParseGraph};
    use scg::kb::KnowledgeBase;
    use scg::tagger::Lexicon;

    const TYPES: usize = 6;
    const WORDS: [&str; 6] = ["alpha", "beta", "gamma", "delta", "eps", "zeta"];

    struct Instance {
        kb: KnowledgeBase,
        lexicon: Lexicon,
        repo: Repository,
        text: String,
    }

    fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
        let mut kb = String::new();
        for i in 0..TYPES {
            kb.push_str(&format!("(collection T{i})\n"));
            for j in 0..i {
                if rng.gen_bool(0.3) {
                    kb.push_str(&format!("(genls T{i} T{j})\n"));
                }
            }
        }
        for k in 0..5 {
            kb.push_str(&format!(
                "(individual K{k})\n(isa K{k} T{})\n",
                rng.gen_range(0..TYPES)
            ));
        }

        let mut lex = String::new();
        for w in WORDS {
            let n = rng.gen_range(0..3);
            if n == 0 {
                continue;
            }
            let readings: Vec<String> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        format!("K{}", rng.gen_range(0..5))
                    } else {
                        format!("T{}", rng.gen_range(0..TYPES))
                    }
                })
                .collect();
            lex.push_str(&format!("(lex \"{w}\" {})\n", readings.join(" ")));
        }
        if rng.gen_bool(0.5) {
            let a = WORDS.choose(rng).unwrap();
            let b = WORDS.choose(rng).unwrap();
            lex.push_str(&format!("(lex \"{a} {b}\" T{})\n", rng.gen_range(0..TYPES)));
        }

        let mut cxn = String::new();
        for c in 0..rng.gen_range(1..6) {
            let len = rng.gen_range(1..5);
            let mut elements = Vec::new();
            let mut slots = 0;
            for _ in 0..len {
                if rng.gen_bool(0.5) {
                    elements.push(format!("$T{}#{slots}", rng.gen_range(0..TYPES)));
                    slots += 1;
                } else {
                    elements.push(WORDS.choose(rng).unwrap().to_string());
                }
            }
            let (logic, output) = if slots == 0 {
                ("K0".to_string(), "T0".to_string())
            } else {
                let first = elements.iter().find(|e| e.ends_with("#0")).unwrap().clone();
                (first, "(slot 0)".to_string())
            };
            let mut templates = format!(":nl \"{}\"", elements.join(" "));
            if rng.gen_bool(0.3) {
                let mut rev = elements.clone();
                rev.reverse();
                templates.push_str(&format!(" :nl \"{}\"", rev.join(" ")));
            }
            cxn.push_str(&format!(
                "(construction :id C{c} {templates} :logic {logic} :output-type {output})\n"
            ));
        }

        let n = rng.gen_range(1..8);
        let words: Vec<String> = (0..n)
            .map(|_| {
                let w = WORDS.choose(rng).unwrap();
                if rng.gen_bool(0.2) {
                    w.to_uppercase()
                } else {
                    w.to_string()
                }
            })
            .collect();

        Instance {
            kb: kb.parse::<KnowledgeBase>().unwrap(),
            lexicon: lex.parse().unwrap(),
            repo: cxn.parse().unwrap_or_else(|e| panic!("{e}\n{cxn}")),
            text: words.join(" "),
        }
    }

    fn brute_force(
        repo: &Repository,
        lang: &str,
        graph: &ParseGraph,
        start: usize,
        end: usize,
    ) -> BTreeSet<Match> {
        fn go(
            elements: &[VariantElement],
            graph: &ParseGraph,
            pos: usize,
            end: usize,
            binding: &mut Vec<(scg::constructions::Slot, usize)>,
            out: &mut Vec<Vec<(scg::constructions::Slot, usize)>>,
        ) {
            let Some((first, rest)) = elements.split_first() else {
                if pos == end {
                    out.push(binding.clone());
                }
                return;
            };
            if pos >= end {
                return;
            }
            match first {
                VariantElement::Lit(s) => {
                    if fold(&graph.chart.tokens[pos].surface) == *s {
                        go(rest, graph, pos + 1, end, binding, out);
                    }
                }
                VariantElement::Slot(slot) => {
                    for next in pos + 1..=end {
                        for &e in graph.edges_at(pos, next) {
                            if graph.edge(e).slot_types.contains(&slot.ty) {
                                binding.push((slot.clone(), e));
                                go(rest, graph, next, end, binding, out);
                                binding.pop();
                            }
                        }
                    }
                }
            }
        }
        let mut found = BTreeSet::new();
        for (vid, v) in repo.variants().iter().enumerate() {
            if v.language != lang {
                continue;
            }
            let mut out = Vec::new();
            go(&v.elements, graph, start, end, &mut Vec::new(), &mut out);
            for binding in out {
                found.insert(Match {
                    variant: vid,
                    binding,
                });
            }
        }
        found
    }

    /// Compares retrieval with brute force on every window of one random
    /// instance. Returns the number of windows and of non-empty ones.
    pub fn check_seed(seed: u64) -> Result<(usize, usize), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng);
        let config = EngineConfig {
            max_window: 6,
            max_edges: 2_000,
            ..EngineConfig::default()
        };
        let engine = Engine::new(&inst.kb, &inst.repo, &inst.lexicon, config);
        let graph = engine.interpret(&inst.text);
        let n = graph.token_count();
        let (mut windows, mut nonempty) = (0, 0);
        for start in 0..n {
            for end in start + 1..=n {
                let got: BTreeSet<Match> =
                    retrieve(&engine, &graph, start, end).into_iter().collect();
                let want = brute_force(&inst.repo, "en", &graph, start, end);
                if got != want {
                    return Err(format!(
                        "seed {seed}, window {start}..{end} of {:?}: got {got:?}, want {want:?}",
                        inst.text
                    ));
                }
                windows += 1;
                nonempty += usize::from(!want.is_empty());
            }
        }
        Ok((windows, nonempty))
    }
}

pub mod ground {
    use std::collections::BTreeMap;

    use proptest::prelude::*;
    use scg::logic::{free_vars, LogicExpr, Var};

    const CONSTANTS: [&str; 5] = ["c0", "c1", "c2", "c3", "c4"];
    const VARS: [&str; 4] = ["A", "B", "C", "D"];

    fn term() -> impl Strategy<Value = LogicExpr> {
        prop_oneof![
            (0..5usize).prop_map(|i| LogicExpr::constant(CONSTANTS[i])),
            (0..4usize).prop_map(|i| LogicExpr::QueryVar(VARS[i].into())),
        ]
    }

    fn atom() -> impl Strategy<Value = LogicExpr> {
        prop_oneof![
            term().prop_map(|a| LogicExpr::app("p", vec![a])),
            (term(), term()).prop_map(|(a, b)| LogicExpr::app("q", vec![a, b])),
            (term(), term()).prop_map(|(a, b)| LogicExpr::app("equals", vec![a, b])),
        ]
    }

    pub fn sentence() -> impl Strategy<Value = LogicExpr> {
        atom().prop_recursive(4, 24, 4, |inner| {
            prop_oneof![
                3 => prop::collection::vec(inner.clone(), 1..5).prop_map(LogicExpr::And),
                1 => inner.clone().prop_map(|e| LogicExpr::Not(Box::new(e))),
                1 => ((0..4usize), inner).prop_map(|(v, e)| LogicExpr::Exists {
                    var: VARS[v].into(),
                    body: Box::new(e),
                }),
            ]
        })
    }

    /// A model: extensions of `p` and `q` over the universe.
    #[derive(Debug, Clone)]
    pub struct Model {
        p: [bool; 5],
        q: [[bool; 5]; 5],
    }

    pub fn model() -> impl Strategy<Value = Model> {
        (
            prop::array::uniform5(any::<bool>()),
            prop::array::uniform5(prop::array::uniform5(any::<bool>())),
        )
            .prop_map(|(p, q)| Model { p, q })
    }

    fn value(t: &LogicExpr, env: &BTreeMap<String, usize>) -> usize {
        match t {
            LogicExpr::Constant(c) => CONSTANTS
                .iter()
                .position(|k| k == c)
                .expect("known constant"),
            LogicExpr::QueryVar(v) => env[v],
            other => panic!("not a term: {other}"),
        }
    }

    fn eval(e: &LogicExpr, m: &Model, env: &BTreeMap<String, usize>) -> bool {
        match e {
            LogicExpr::And(xs) => xs.iter().all(|x| eval(x, m, env)),
            LogicExpr::Not(x) => !eval(x, m, env),
            LogicExpr::Exists { var, body } => (0..5).any(|d| {
                let mut inner = env.clone();
                inner.insert(var.clone(), d);
                eval(body, m, &inner)
            }),
            LogicExpr::App { head, args } => {
                let vals: Vec<usize> = args.iter().map(|a| value(a, env)).collect();
                match head.as_constant().expect("named predicate") {
                    "p" => m.p[vals[0]],
                    "q" => m.q[vals[0]][vals[1]],
                    "equals" => vals[0] == vals[1],
                    other => panic!("unknown predicate {other}"),
                }
            }
            other => panic!("not a sentence: {other}"),
        }
    }

    /// Whether some assignment to the free variables satisfies `e`.
    pub fn satisfiable(e: &LogicExpr, m: &Model) -> bool {
        let names: Vec<String> = free_vars(e)
            .into_iter()
            .map(|v| match v {
                Var::Query(n) => n,
                Var::Typed { .. } => unreachable!("no typed variables generated"),
            })
            .collect();
        let total = 5usize.pow(names.len() as u32);
        (0..total).any(|mut code| {
            let mut env = BTreeMap::new();
            for n in &names {
                env.insert(n.clone(), code % 5);
                code /= 5;
            }
            eval(e, m, &env)
        })
    }
}
