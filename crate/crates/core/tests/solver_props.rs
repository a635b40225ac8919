mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use qubolin::encoding::{violates_pair_constraint, Assignment};
use qubolin::qubo::{build_vanilla_with, BuildOptions, QuboModel};
use qubolin::solver::{
    solve_exhaustive, solve_exhaustive_with, solve_sa, solve_system, success_report, CongruenceSource,
    ExhaustiveParams, FormulationKind, Method, SaParams, SolveOptions,
};
use qubolin::{EncodingSpec, Error, LinearSystem};

use common::{gauss_solve, max_diff, to_f64, worked_spec, worked_sylvester, worked_system, worked_vanilla};

fn random_model() -> impl Strategy<Value = QuboModel> {
    (2usize..=10).prop_flat_map(|n| {
        prop::collection::btree_map((0..n, 0..n), -8i32..=8, 0..=n * n).prop_map(move |raw| {
            let coeffs: BTreeMap<(usize, usize), f64> = raw
                .into_iter()
                .map(|((i, j), c)| ((i.min(j), i.max(j)), f64::from(c) / 2.0))
                .collect();
            QuboModel::from_coeffs(n, coeffs, 0.0).unwrap()
        })
    })
}

fn brute_minimum(model: &QuboModel) -> f64 {
    (0..1u64 << model.n_qubits())
        .map(|i| model.energy(&Assignment::from_index(i, model.n_qubits())).unwrap())
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exhaustive_finds_every_minimum(model in random_model()) {
        let set = solve_exhaustive(&model).unwrap();
        let min = brute_minimum(&model);
        prop_assert_eq!(set.best_energy, min);
        let n = model.n_qubits();
        let want: Vec<Assignment> = (0..1u64 << n)
            .map(|i| Assignment::from_index(i, n))
            .filter(|a| model.energy(a).unwrap() == min)
            .collect();
        let mut got: Vec<Assignment> = set.samples.iter().map(|s| s.assignment.clone()).collect();
        got.sort();
        let mut want = want;
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn annealing_never_beats_exhaustive(model in random_model(), seed in any::<u64>()) {
        let p = SaParams { reads: 40, sweeps: 50, seed, ..SaParams::default() };
        let sa = solve_sa(&model, &p).unwrap();
        let ex = solve_exhaustive(&model).unwrap();
        prop_assert!(sa.best_energy >= ex.best_energy);
        prop_assert_eq!(sa.total_count(), 40);
        for w in sa.samples.windows(2) {
            prop_assert!(w[0].energy <= w[1].energy);
        }
        for s in &sa.samples {
            prop_assert_eq!(model.energy(&s.assignment).unwrap(), s.energy);
        }
    }

    #[test]
    fn annealing_is_deterministic(model in random_model(), seed in any::<u64>()) {
        let p = SaParams { reads: 20, sweeps: 30, seed, ..SaParams::default() };
        prop_assert_eq!(solve_sa(&model, &p).unwrap(), solve_sa(&model, &p).unwrap());
    }
}

#[test]
fn ground_states_reproduce_the_residual() {
    let sys = worked_system();
    for model in [worked_vanilla(), worked_sylvester()] {
        let set = solve_exhaustive(&model).unwrap();
        assert!(!set.samples.is_empty());
        for s in &set.samples {
            let x = model.decode(&s.assignment).unwrap().x;
            let r2 = sys.residual(&x).unwrap().powi(2);
            assert!((s.energy + model.offset() - r2).abs() <= 1e-9);
            assert_eq!(x, vec![-1.0, 2.0]);
        }
    }
}

#[test]
fn vanilla_ground_states_are_all_forty_two_patterns() {
    let set = solve_exhaustive(&worked_vanilla()).unwrap();
    assert_eq!(set.best_energy, -26.0);
    assert_eq!(set.samples.len(), 42);
    assert!(!set.truncated);
    assert_eq!(set.decoded.len(), 42);
}

#[test]
fn sylvester_ground_states_respect_the_pair_constraint() {
    let spec = worked_spec();
    let set = solve_exhaustive(&worked_sylvester()).unwrap();
    assert!((set.best_energy + 26.0).abs() <= 1e-9);
    for s in &set.samples {
        assert!(!violates_pair_constraint(&spec, &s.assignment).unwrap());
    }
}

#[test]
fn kept_zeros_do_not_change_the_success_report() {
    let sys = worked_system();
    let spec = worked_spec();
    let kept = build_vanilla_with(&sys, &spec, &BuildOptions { keep_zeros: true, instrument: true }).unwrap();
    let dropped = worked_vanilla();
    let p = SaParams { reads: 200, sweeps: 100, seed: 9, ..SaParams::default() };
    let a = success_report(&kept, &p, 3, None).unwrap();
    let b = success_report(&dropped, &p, 3, None).unwrap();
    assert_eq!(a.minimum, b.minimum);
    assert_eq!(a.rows.len(), 3);
    for row in &a.rows {
        assert!(row.probability >= 0.0 && row.probability <= 1.0);
    }
}

#[test]
fn exhaustive_cap_and_truncation() {
    let big = QuboModel::empty(27);
    assert!(matches!(solve_exhaustive(&big), Err(Error::SizeCap { qubits: 27, cap: 26 })));
    // Every assignment of an all-zero model is a ground state.
    let flat = QuboModel::empty(10);
    let set = solve_exhaustive_with(&flat, &ExhaustiveParams { cap: 26, max_ground_states: 100 }).unwrap();
    assert!(set.truncated);
    assert!(set.samples.len() <= 100);
}

#[test]
fn invalid_annealing_parameters_are_rejected() {
    let m = worked_vanilla();
    for p in [
        SaParams { reads: 0, ..SaParams::default() },
        SaParams { sweeps: 0, ..SaParams::default() },
        SaParams { beta_start: 5.0, beta_end: 1.0, ..SaParams::default() },
    ] {
        assert!(solve_sa(&m, &p).is_err());
    }
}

#[test]
fn pipeline_solves_the_worked_system_every_way() {
    let sys = worked_system();
    let spec = worked_spec();
    for formulation in [FormulationKind::Vanilla, FormulationKind::Sylvester] {
        for congruence in [CongruenceSource::Symmetric, CongruenceSource::Qr] {
            let mut opts = SolveOptions::new(formulation, Method::Exhaustive(ExhaustiveParams::default()));
            opts.congruence = congruence;
            // A Sylvester model encodes y = R⁻¹x, which need not lie on the grid.
            if formulation == FormulationKind::Sylvester {
                opts.refine_rounds = 40;
            }
            let sol = solve_system(&sys, &spec, &opts).unwrap();
            assert!(sol.solved, "{formulation:?} {:?}: residual {}", opts.congruence, sol.residual);
            assert!(max_diff(&sol.x_best, &[-1.0, 2.0]) <= 1e-9);
        }
    }
}

#[test]
fn refinement_reaches_a_fractional_solution() {
    // x = (1/3, -2/3) is not representable in any binary window.
    let sys = LinearSystem::from_rows(&[[2.0, 1.0], [1.0, 2.0]], &[0.0, -1.0]).unwrap();
    let spec = EncodingSpec::signed_pair(-3, 1, 2).unwrap();
    let want = to_f64(&gauss_solve(&sys.a().to_rows(), sys.b()));
    let sa = SaParams { reads: 200, sweeps: 100, seed: 3, ..SaParams::default() };
    let mut opts = SolveOptions::new(FormulationKind::Sylvester, Method::Sa(sa));
    opts.fit_beta = true;
    opts.refine_rounds = 30;
    let sol = solve_system(&sys, &spec, &opts).unwrap();
    assert!(sol.solved, "residual {}", sol.residual);
    assert!(max_diff(&sol.x_best, &want) <= 1e-9);
    for w in sol.rounds.windows(2) {
        assert!(w[1].residual <= w[0].residual);
    }
}

#[test]
fn singular_qr_is_reported() {
    let sys = LinearSystem::from_rows(&[[1.0, 2.0], [2.0, 4.0]], &[1.0, 2.0]).unwrap();
    let mut opts = SolveOptions::new(FormulationKind::Sylvester, Method::Exhaustive(ExhaustiveParams::default()));
    opts.congruence = CongruenceSource::Qr;
    assert!(matches!(
        solve_system(&sys, &worked_spec(), &opts),
        Err(Error::Singular { .. })
    ));
}
