use loopmag::deviations::{associator, commutator, deviation, DeviationIndex};
use loopmag::loop_term::dim_degree;
use loopmag::suites::{balanced_corpus, run_suite, Suite, SuiteConfig};
use loopmag::verify::{
    is_balanced, phi_xy, verify_grading, verify_multilinear_parts, verify_p_deviation,
    verify_primitive_lowest, MultilinearCase, Verdict,
};
use loopmag::{magnus, LoopTerm, Trunc, VarSet, VarTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table() -> (VarTable, Vec<LoopTerm>) {
    let t = VarTable::from_names(["x", "u", "v", "a", "b", "y", "z"]).unwrap();
    let g = t.ids().map(LoopTerm::Gen).collect();
    (t, g)
}

fn set(gs: &[&LoopTerm]) -> VarSet {
    gs.iter()
        .map(|g| match g {
            LoopTerm::Gen(v) => *v,
            _ => panic!("not a generator"),
        })
        .collect()
}

#[test]
fn balance_examples() {
    let (_, g) = table();
    let (x, u, v) = (&g[0], &g[1], &g[2]);
    assert!(is_balanced(
        &associator(x, u, v),
        &set(&[x, u, v]),
        Trunc::new(5)
    ));
    assert!(!is_balanced(
        &LoopTerm::mul(x, u),
        &set(&[x, u]),
        Trunc::new(3)
    ));
    assert!(is_balanced(x, &set(&[x]), Trunc::new(3)));
}

#[test]
fn phi_xy_of_a_generator_is_trivial() {
    let (vars, g) = table();
    let (x, y) = (vars.get("x").unwrap(), vars.get("y").unwrap());
    let step = phi_xy(&g[0], x, y).unwrap();
    assert_eq!(step.display(&vars).to_string(), "(x*y) \\ (x*y)");
    assert!(magnus(&step, Trunc::new(6)).is_one());
    assert!(phi_xy(&LoopTerm::mul(&g[0], &g[5]), x, y).is_err());
}

#[test]
fn phi_xy_of_associator_is_balanced() {
    let (vars, g) = table();
    let (x, y) = (vars.get("x").unwrap(), vars.get("y").unwrap());
    let phi = associator(&g[0], &g[1], &g[2]);
    let step = phi_xy(&phi, x, y).unwrap();
    let enlarged = set(&[&g[0], &g[1], &g[2], &g[5]]);
    assert!(is_balanced(&step, &enlarged, Trunc::new(6)));
    // the new word really has content in the enlarged degree
    assert!(!magnus(&step, Trunc::new(4)).is_one());
}

#[test]
fn balanced_corpus_is_balanced_and_distinct() {
    let (_, g) = table();
    let pool = set(&[&g[0], &g[1], &g[2], &g[3]]);
    let pool: Vec<_> = pool.into_iter().collect();
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let corpus = balanced_corpus(&pool, 30, 4, &mut r);
    for (i, (phi, s, x)) in corpus.iter().enumerate() {
        assert!(s.contains(x));
        assert_eq!(&phi.vars(), s);
        assert!(is_balanced(phi, s, Trunc::new(s.len() + 1)), "case {i}");
        assert!(!magnus(phi, Trunc::new(s.len() + 1)).is_one(), "case {i}");
        assert!(corpus[..i].iter().all(|(p, _, _)| p != phi));
    }
}

#[test]
fn multilinear_part_examples() {
    let (vars, g) = table();
    let id = |n: &str| vars.get(n).unwrap();
    let phi = associator(&g[0], &g[1], &g[2]);
    let s = set(&[&g[0], &g[1], &g[2]]);
    let cases = [
        (
            LoopTerm::mul(&g[3], &g[4]),
            set(&[&g[0], &g[1], &g[2], &g[3], &g[4]]),
        ),
        (g[3].clone(), set(&[&g[0], &g[1], &g[2], &g[3]])),
        (
            LoopTerm::ldiv(&g[0], &g[3]),
            set(&[&g[0], &g[1], &g[2], &g[3]]),
        ),
    ];
    for (w, set_hat) in cases {
        let c = MultilinearCase {
            phi: phi.clone(),
            x: id("x"),
            set: s.clone(),
            set_hat,
            w,
            y: id("y"),
        };
        let rep = verify_multilinear_parts("split", &c, &vars).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.witness);
    }
    // y inside Ŝ violates the preconditions
    let bad = MultilinearCase {
        phi,
        x: id("x"),
        set: s.clone(),
        set_hat: set(&[&g[0], &g[1], &g[2], &g[5]]),
        w: g[0].clone(),
        y: id("y"),
    };
    assert!(verify_multilinear_parts("bad", &bad, &vars).is_err());
}

#[test]
fn p_deviation_with_and_without_pruning() {
    for (m, n) in [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)] {
        for prune in [true, false] {
            let rep = verify_p_deviation(m, n, prune).unwrap();
            assert_eq!(
                rep.verdict,
                Verdict::Pass,
                "({m},{n}) prune={prune}: {:?}",
                rep.witness
            );
        }
    }
}

#[test]
fn primitive_examples() {
    let (vars, g) = table();
    let n = Trunc::new(6);
    for t in [g[0].clone(), commutator(&g[0], &g[5])] {
        let rep = verify_primitive_lowest("p", &t, n, &vars).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass);
    }
    let lowest = magnus(&commutator(&g[0], &g[5]), n)
        .minus_one()
        .lowest_term()
        .unwrap();
    assert_eq!(lowest.1.display(&vars).to_string(), "(x*y) - (y*x)");
    let rep = verify_primitive_lowest("one", &LoopTerm::ldiv(&g[0], &g[0]), n, &vars).unwrap();
    assert_eq!(rep.verdict, Verdict::Inconclusive);
    assert!(rep.witness.is_some());
}

#[test]
fn grading_examples() {
    let (_, g) = table();
    let n = Trunc::new(7);
    let (x, y, z) = (&g[0], &g[5], &g[6]);
    let yz = commutator(y, z);
    assert!(dim_degree(&commutator(x, &yz), n).at_least(3));
    let rep = verify_grading("g", [x, &yz, y, z], n).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass);
    assert!(magnus(&commutator(x, x), n).is_one());
    assert_eq!(
        verify_grading("uu", [x, x, x, x], n).unwrap().verdict,
        Verdict::Pass
    );
}

#[test]
fn deviations_absorb_the_unit() {
    let (_, g) = table();
    let n = Trunc::new(6);
    for level in 0..=2 {
        for idx in DeviationIndex::enumerate(level) {
            for slot in 0..level + 3 {
                let mut args: Vec<LoopTerm> = g[..level + 3].to_vec();
                args[slot] = LoopTerm::One;
                assert!(
                    magnus(&deviation(&args, &idx).unwrap(), n).is_one(),
                    "{idx:?} slot {slot}"
                );
            }
        }
    }
}

#[test]
fn deviations_on_generators_start_in_degree_arity() {
    let (_, g) = table();
    for level in 0..=2 {
        let n = Trunc::multilinear(level + 3);
        for idx in DeviationIndex::enumerate(level) {
            let d = deviation(&g[..level + 3], &idx).unwrap();
            assert!(dim_degree(&d, n).at_least(level + 3), "{idx:?}");
        }
    }
}

#[test]
fn suites_pass_on_small_corpora() {
    let cfg = SuiteConfig {
        cases: Some(8),
        split_cases: 4,
        max_total: 3,
        ..SuiteConfig::default()
    };
    for suite in Suite::ALL {
        let reps = run_suite(suite, &cfg).unwrap();
        assert!(!reps.is_empty());
        for r in reps {
            assert!(r.passed(), "{}", r.to_record(false));
        }
    }
}

#[test]
fn records_are_deterministic_and_omit_timing() {
    let cfg = SuiteConfig {
        cases: Some(5),
        ..SuiteConfig::default()
    };
    let render = || {
        run_suite(Suite::Axioms, &cfg)
            .unwrap()
            .iter()
            .map(|r| r.to_record(false))
            .collect::<Vec<_>>()
    };
    let first = render();
    assert_eq!(first, render());
    assert!(first[0].contains("\"millis\":null"));
    assert!(first[0].starts_with("{\"case\":\"axioms/000\""));
}

#[test]
fn p_deviation_guard() {
    let cfg = SuiteConfig {
        pair: Some((9, 9)),
        ..SuiteConfig::default()
    };
    assert!(run_suite(Suite::PDeviation, &cfg).is_err());
    let cfg = SuiteConfig {
        pair: Some((4, 3)),
        ..SuiteConfig::default()
    };
    assert!(run_suite(Suite::PDeviation, &cfg).is_err());
}
