//! Randomized invariants over the parsers, both semantics, and the checker.
//!
//! Specs are generated as source text that is valid by construction: action
//! names are globally unique, every action has a probability definition,
//! constants stay inside [0, 1], and each state's exit mass is capped below
//! 1 for every occupancy, so the induced models are probabilistic
//! everywhere. Formulas are generated as trees and printed back.

use proptest::collection::vec;
use proptest::prelude::*;

use flyfast_core::{
    check, check_path, initial_occupancy, mf_step, parse_formula, parse_system_spec,
    CheckOptions, ExactModel, Formula, MeanFieldModel, PathFormula, ProbRel, SystemSpec,
};

const STATE_NAMES: [&str; 4] = ["A", "B", "C", "D"];

#[derive(Debug, Clone)]
struct RawBranch {
    target: usize,
    weight: f64,
    frc_factor: Option<usize>,
}

fn raw_branch(n_states: usize) -> impl Strategy<Value = RawBranch> {
    (0..n_states, 0.0f64..1.0, proptest::option::of(0..n_states)).prop_map(
        |(target, weight, frc_factor)| RawBranch {
            target,
            weight,
            frc_factor,
        },
    )
}

fn render_spec(branch_lists: &[Vec<RawBranch>], counts: &[u32], labeled: usize) -> String {
    let mut defs = String::new();
    let mut probs = String::new();
    let mut action = 0usize;
    for (i, branches) in branch_lists.iter().enumerate() {
        let cap = 0.99 / branches.len() as f64;
        let mut parts = Vec::new();
        for branch in branches {
            let name = format!("act{}", action);
            action += 1;
            let c = branch.weight * cap;
            match branch.frc_factor {
                Some(s) => {
                    probs.push_str(&format!("{} :: {} * frc {};\n", name, c, STATE_NAMES[s]))
                }
                None => probs.push_str(&format!("{} :: {};\n", name, c)),
            }
            parts.push(format!("{}.{}", name, STATE_NAMES[branch.target]));
        }
        defs.push_str(&format!("{} := {};\n", STATE_NAMES[i], parts.join(" + ")));
    }
    let init: Vec<String> = counts
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{}[{}]", STATE_NAMES[i], c))
        .collect();
    format!(
        "{}{}label local l0 = {};\nlabel global g0 = frc A < 0.5;\ninit <{}>;\n",
        defs,
        probs,
        STATE_NAMES[labeled],
        init.join(", ")
    )
}

fn spec_source() -> impl Strategy<Value = String> {
    (2..=4usize)
        .prop_flat_map(|n| {
            (
                vec(vec(raw_branch(n), 1..=3), n..=n),
                vec(0u32..=5, n..=n),
                0..n,
            )
        })
        .prop_map(|(branch_lists, mut counts, labeled)| {
            if counts.iter().all(|&c| c == 0) {
                counts[0] = 1;
            }
            render_spec(&branch_lists, &counts, labeled)
        })
}

fn parse_generated(src: &str) -> Result<SystemSpec, TestCaseError> {
    parse_system_spec(src).map_err(|diags| {
        TestCaseError::fail(format!("generated spec rejected: {:?}\n{}", diags, src))
    })
}

fn prob_rel() -> impl Strategy<Value = ProbRel> {
    prop_oneof![
        Just(ProbRel::Ge),
        Just(ProbRel::Gt),
        Just(ProbRel::Le),
        Just(ProbRel::Lt),
    ]
}

fn formula_tree() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        "[a-z][a-z0-9]{0,2}".prop_map(Formula::Atom),
        Just(Formula::truth()),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        let path = prop_oneof![
            inner.clone().prop_map(PathFormula::Next),
            (inner.clone(), inner.clone(), 0u32..=60).prop_map(|(lhs, rhs, horizon)| {
                PathFormula::Until { lhs, rhs, horizon }
            }),
        ];
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (prob_rel(), 0.0f64..=1.0, path)
                .prop_map(|(rel, bound, path)| Formula::prob(rel, bound, path)),
        ]
    })
}

/// Path formulas over the atoms every generated spec defines, so they can
/// be evaluated and not just printed.
fn checkable_path() -> impl Strategy<Value = PathFormula> {
    let atom = prop_oneof![
        Just(Formula::atom("l0")),
        Just(Formula::atom("g0")),
        Just(Formula::truth()),
        Just(Formula::not(Formula::atom("l0"))),
    ];
    prop_oneof![
        atom.clone().prop_map(PathFormula::Next),
        (atom.clone(), atom, 0u32..=20).prop_map(|(lhs, rhs, horizon)| PathFormula::Until {
            lhs,
            rhs,
            horizon,
        }),
    ]
}

proptest! {
    #[test]
    fn generated_specs_parse_and_round_trip(src in spec_source()) {
        let spec = parse_generated(&src)?;
        let printed = spec.to_string();
        let reparsed = parse_system_spec(&printed).map_err(|diags| {
            TestCaseError::fail(format!("printed spec rejected: {:?}\n{}", diags, printed))
        })?;
        prop_assert_eq!(reparsed, spec);
    }

    #[test]
    fn formula_printing_round_trips(formula in formula_tree()) {
        let printed = formula.to_string();
        let reparsed = parse_formula(&printed)
            .map_err(|d| TestCaseError::fail(format!("printed formula rejected: {}\n{}", d, printed)))?;
        prop_assert_eq!(reparsed, formula);
    }

    #[test]
    fn mean_field_occupancy_stays_on_the_simplex(src in spec_source()) {
        let spec = parse_generated(&src)?;
        let mut mu = initial_occupancy(&spec).unwrap();
        for _ in 0..100 {
            mu = mf_step(&spec, &mu)
                .map_err(|e| TestCaseError::fail(format!("step failed: {}\n{}", e, src)))?;
            let sum: f64 = mu.as_slice().iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-12, "mass drifted to {}", sum);
            for &entry in mu.as_slice() {
                prop_assert!((0.0..=1.0).contains(&entry), "entry {} left [0, 1]", entry);
            }
        }
    }

    #[test]
    fn until_probability_is_monotone_in_the_horizon(
        src in spec_source(),
        lhs_is_global in any::<bool>(),
    ) {
        let spec = parse_generated(&src)?;
        let model = MeanFieldModel::new(&spec).unwrap();
        let initial = model.initial_state(0).unwrap();
        let lhs = if lhs_is_global {
            Formula::atom("g0")
        } else {
            Formula::truth()
        };
        let opts = CheckOptions::default();
        let mut previous = 0.0f64;
        for horizon in 0..=12u32 {
            let path = PathFormula::Until {
                lhs: lhs.clone(),
                rhs: Formula::atom("l0"),
                horizon,
            };
            let result = check_path(&model, &initial, &path, &opts).unwrap();
            prop_assert!(
                result.probability >= previous - 1e-12,
                "probability fell from {} to {} at horizon {}",
                previous,
                result.probability,
                horizon
            );
            previous = result.probability;
        }
    }

    #[test]
    fn path_probabilities_stay_within_unit_interval(
        src in spec_source(),
        path in checkable_path(),
    ) {
        let spec = parse_generated(&src)?;
        let model = MeanFieldModel::new(&spec).unwrap();
        let initial = model.initial_state(0).unwrap();
        let result = check_path(&model, &initial, &path, &CheckOptions::default()).unwrap();
        prop_assert!(
            (-1e-9..=1.0 + 1e-9).contains(&result.probability),
            "probability {} left the unit interval",
            result.probability
        );
    }

    #[test]
    fn bound_complements_give_opposite_verdicts(
        src in spec_source(),
        path in checkable_path(),
        bound in 0.0f64..=1.0,
        wide in any::<bool>(),
    ) {
        let spec = parse_generated(&src)?;
        let model = MeanFieldModel::new(&spec).unwrap();
        let initial = model.initial_state(0).unwrap();
        let opts = CheckOptions::default();
        let (rel, complement) = if wide {
            (ProbRel::Ge, ProbRel::Lt)
        } else {
            (ProbRel::Gt, ProbRel::Le)
        };
        let pos = check(&model, &initial, &Formula::prob(rel, bound, path.clone()), &opts).unwrap();
        let neg = check(&model, &initial, &Formula::prob(complement, bound, path), &opts).unwrap();
        prop_assert_eq!(pos.value, !neg.value);
        prop_assert_eq!(
            pos.probability.unwrap().to_bits(),
            neg.probability.unwrap().to_bits()
        );
    }

    #[test]
    fn memoization_and_reruns_do_not_change_answers(
        src in spec_source(),
        path in checkable_path(),
        bound in 0.0f64..=1.0,
    ) {
        let spec = parse_generated(&src)?;
        let formula = Formula::prob(ProbRel::Le, bound, path);

        let model = MeanFieldModel::new(&spec).unwrap();
        let initial = model.initial_state(0).unwrap();
        let memoized = CheckOptions::default();
        let bare = CheckOptions {
            memoize: false,
            ..CheckOptions::default()
        };
        let first = check(&model, &initial, &formula, &memoized).unwrap();
        let second = check(&model, &initial, &formula, &memoized).unwrap();
        let third = check(&model, &initial, &formula, &bare).unwrap();
        for other in [&second, &third] {
            prop_assert_eq!(first.value, other.value);
            prop_assert_eq!(
                first.probability.unwrap().to_bits(),
                other.probability.unwrap().to_bits()
            );
            prop_assert_eq!(first.safety.len(), other.safety.len());
        }

        let exact = ExactModel::new(&spec);
        let exact_initial = exact.initial_state().unwrap();
        let a = check(&exact, &exact_initial, &formula, &memoized).unwrap();
        let b = check(&exact, &exact_initial, &formula, &bare).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(
            a.probability.unwrap().to_bits(),
            b.probability.unwrap().to_bits()
        );
    }
}
