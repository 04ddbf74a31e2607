use evpos_core::linalg::{eig, mat_exp, mat_exp_eig, resolvent, Matrix, DEFAULT_TOL_SEP};
use evpos_core::maxprinciple::{resolvent_sign_sweep, RightVerdict};
use evpos_core::positivity::{check_markov_generator, check_noutsos, is_metzler, Classification, DEFAULT_TOL_POS};
use proptest::prelude::*;

fn square(n: usize, lo: f64, hi: f64) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(lo..hi, n * n).prop_map(move |v| Matrix::from_row_major(n, n, v).unwrap())
}

fn metzler(n: usize) -> impl Strategy<Value = Matrix> {
    square(n, -1.0, 1.0).prop_map(move |m| Matrix::from_fn(n, n, |j, k| if j == k { m.get(j, k) } else { m.get(j, k).abs() }).unwrap())
}

fn rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).max_abs() / (1.0 + b.max_abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_law(a in square(4, -1.0, 1.0), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let lhs = &mat_exp(&a, s).unwrap() * &mat_exp(&a, t).unwrap();
        prop_assert!(rel_diff(&lhs, &mat_exp(&a, s + t).unwrap()) <= 1e-9);
    }

    #[test]
    fn resolvent_identity(a in square(4, -1.0, 1.0), l in 0.5f64..3.0, m in 0.5f64..3.0) {
        let shift = a.norm1();
        let (l, m) = (shift + l, shift + m);
        let (rl, rm) = (resolvent(&a, l).unwrap(), resolvent(&a, m).unwrap());
        let rhs = (&rl * &rm).scale(m - l);
        prop_assert!((&(&rl - &rm) - &rhs).max_abs() <= 1e-8 * (1.0 + rl.max_abs()));
    }

    #[test]
    fn trace_is_sum_of_eigenvalues(a in square(5, -2.0, 2.0)) {
        let spec = eig(&a, DEFAULT_TOL_SEP).unwrap();
        let sum: f64 = spec.eigenvalues.iter().map(|z| z.re).sum();
        let imag: f64 = spec.eigenvalues.iter().map(|z| z.im).sum();
        prop_assert!((sum - a.trace()).abs() < 1e-10 * (1.0 + a.norm1()));
        prop_assert!(imag.abs() < 1e-10);
    }

    #[test]
    fn eigen_path_matches_pade(s in square(4, -0.3, 0.3), d in proptest::collection::vec(-2.0f64..0.5, 4), t in 0.0f64..3.0) {
        // well-conditioned eigenbasis S = I + small
        let s = &Matrix::identity(4) + &s;
        let sinv = Matrix::from_dmatrix(s.as_dmatrix().clone().try_inverse().unwrap()).unwrap();
        let a = &(&s * &Matrix::from_diagonal(&d).unwrap()) * &sinv;
        prop_assert!(rel_diff(&mat_exp_eig(&a, t).unwrap(), &mat_exp(&a, t).unwrap()) <= 1e-8);
    }

    #[test]
    fn positive_perturbations_of_positive_matrices_are_eventually_positive(
        p in square(4, 0.2, 1.0),
        q in square(4, -1.0, 1.0),
    ) {
        // small indefinite perturbations keep both Perron vectors positive
        let a = &p + &q.scale(0.05);
        let v = check_noutsos(&a, DEFAULT_TOL_POS).unwrap();
        prop_assert!(matches!(v.classification, Classification::EventuallyPositiveStrict | Classification::Positive));
        let t0 = v.t0_estimate.unwrap();
        for t in [t0 + 0.1, t0 + 1.0, t0 + 10.0] {
            let e = mat_exp(&a.shift(-v.criterion_report.spectral_bound), t).unwrap();
            prop_assert!(e.min_entry() > 0.0, "t = {}", t);
        }
    }

    #[test]
    fn negative_verdicts_carry_witnesses(a in square(3, -1.0, 1.0)) {
        let v = check_noutsos(&a, DEFAULT_TOL_POS).unwrap();
        if v.classification == Classification::NotEventuallyPositive {
            let w = v.witness.unwrap();
            let e = mat_exp(&a, w.t).unwrap();
            prop_assert!(e.get(w.j, w.k) < 0.0);
        }
        if v.classification == Classification::EventuallyPositiveStrict {
            prop_assert!(v.criterion_report.all_pass());
        }
    }

    #[test]
    fn markov_generators_preserve_constants(m in metzler(4), t in prop::sample::select(vec![0.1, 1.0, 10.0])) {
        let a = Matrix::from_fn(4, 4, |j, k| {
            if j == k { -(0..4).filter(|&l| l != j).map(|l| m.get(j, l)).sum::<f64>() } else { m.get(j, k) }
        }).unwrap();
        prop_assert!(check_markov_generator(&a, 1e-12).unwrap());
        let e = mat_exp(&a, t).unwrap();
        for s in e.row_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn metzler_generators_satisfy_maximum_principle(a in metzler(4)) {
        prop_assert!(is_metzler(&a, 0.0).unwrap());
        let spec = eig(&a, DEFAULT_TOL_SEP).unwrap();
        let s = spec.spectral_bound;
        if spec.dominant_index.is_some() && spec.leading().im == 0.0 && spec.dominance_gap > 1e-3 {
            let p = resolvent_sign_sweep(&a, s, spec.dominance_gap / 4.0, 6, 1e-9).unwrap();
            prop_assert_eq!(p.right_window_verdict, RightVerdict::UniformMax);
        }
        for d in [0.01, 0.5, 3.0] {
            let r = resolvent(&a, s + d).unwrap();
            prop_assert!(r.min_entry() >= -1e-9 * r.max_abs());
        }
    }

    #[test]
    fn maximum_principle_is_monotone(a in square(4, -1.0, 1.0)) {
        let s = eig(&a, DEFAULT_TOL_SEP).unwrap().spectral_bound;
        let grid: Vec<f64> = (1..=12).map(|i| s + 0.05 * 1.6f64.powi(i)).collect();
        let nonneg: Vec<bool> = grid
            .iter()
            .map(|&l| {
                let r = resolvent(&a, l).unwrap();
                r.min_entry() >= -1e-9 * r.max_abs()
            })
            .collect();
        if let Some(first) = nonneg.iter().rposition(|b| *b) {
            prop_assert!(nonneg[..=first].iter().all(|b| *b), "{:?}", nonneg);
        }
    }
}
