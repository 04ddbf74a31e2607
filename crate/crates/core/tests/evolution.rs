use std::f64::consts::PI;

use evpos_core::linalg::{mat_exp, Matrix, Vector};
use evpos_core::semigroups::{
    closed_axis, evolve, local_positivity_probe, mean_projection_check, periodic_axis, realified_fourier_generator,
    GridFunction, SemigroupModel,
};

fn bump(center: f64, width: f64) -> impl Fn(f64) -> f64 {
    move |x| {
        let s = (x - center) / width;
        if s.abs() < 0.5 {
            (PI * s).cos().powi(2)
        } else {
            0.0
        }
    }
}

fn scaled(mut g: GridFunction, target_mean: f64) -> GridFunction {
    let m = g.mean();
    g.values.iter_mut().for_each(|v| *v *= target_mean / m);
    g
}

#[test]
fn single_mode_closed_form() {
    let model = SemigroupModel::FourierMultiplier { power: 2, length: 1.0, modes: 256 };
    let u0 = GridFunction::sample_1d(periodic_axis(0.0, 1.0, 256), |x| 1.0 + (2.0 * PI * x).cos()).unwrap();
    let t = 0.001;
    let u = evolve(&model, &u0, t).unwrap();
    let decay = (-(2.0 * PI).powi(4) * t).exp();
    for (x, v) in u.x.iter().zip(&u.values) {
        assert!((v - (1.0 + decay * (2.0 * PI * x).cos())).abs() < 1e-8);
    }
}

#[test]
fn single_mode_in_two_dimensions() {
    let n = 32;
    let model = SemigroupModel::FourierMultiplier { power: 2, length: 1.0, modes: n };
    let axis = periodic_axis(0.0, 1.0, n);
    let u0 = GridFunction::sample_2d(axis.clone(), axis, |x, y| (2.0 * PI * x).cos() * (4.0 * PI * y).sin()).unwrap();
    let t = 1e-4;
    let u = evolve(&model, &u0, t).unwrap();
    let decay = (-t * (4.0 * PI * PI * 5.0f64).powi(2)).exp();
    for (v, w) in u.values.iter().zip(&u0.values) {
        assert!((v - decay * w).abs() < 1e-10);
    }
}

#[test]
fn narrow_bump_changes_sign_then_recovers() {
    let n = 4096;
    let model = SemigroupModel::FourierMultiplier { power: 2, length: 1.0, modes: n };
    let u0 = scaled(GridFunction::sample_1d(periodic_axis(0.0, 1.0, n), bump(0.5, 0.05)).unwrap(), 1.0);
    let early = evolve(&model, &u0, 1e-6).unwrap();
    assert!(early.min() < -1e-6);
    let late = evolve(&model, &u0, 0.01).unwrap();
    assert!(late.min() > 0.0);
    let dist = mean_projection_check(&model, &u0, 0.01).unwrap();
    let bound = (-(2.0 * PI).powi(4) * 0.01).exp() * u0.values.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    assert!(dist <= bound + 1e-8, "{dist} > {bound}");
}

#[test]
fn heat_kernel_conserves_mass_and_positivity() {
    let x = closed_axis(-8.0, 8.0, 1601);
    let u0 = GridFunction::sample_1d(x, bump(0.0, 1.0)).unwrap();
    let model = SemigroupModel::HeatKernel { dim: 1 };
    let mass0: f64 = u0.values.iter().sum::<f64>() * u0.spacing();
    for t in [1e-3, 0.1, 1.0] {
        let u = evolve(&model, &u0, t).unwrap();
        let mass: f64 = u.values.iter().sum::<f64>() * u.spacing();
        assert!((mass - mass0).abs() < 1e-6, "t = {t}");
        assert!(u.min() >= -1e-12);
    }
}

#[test]
fn heat_kernel_in_two_dimensions_is_separable() {
    let x = closed_axis(-4.0, 4.0, 161);
    let gauss = |s: f64, t: f64| (-(s * s) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let u0 = GridFunction::sample_2d(x.clone(), x, |a, b| gauss(a, 0.1) * gauss(b, 0.1)).unwrap();
    let u = evolve(&SemigroupModel::HeatKernel { dim: 2 }, &u0, 0.2).unwrap();
    let expected = GridFunction::sample_2d(u0.x.clone(), u0.y.clone().unwrap(), |a, b| gauss(a, 0.3) * gauss(b, 0.3))
        .unwrap();
    assert!(u.sup_distance(&expected).unwrap() < 1e-9);
}

#[test]
fn fourier_heat_matches_heat_kernel() {
    let n = 1024;
    let length = 32.0;
    let g = |x: f64| (-x * x).exp();
    let periodic = GridFunction::sample_1d(periodic_axis(-length / 2.0, length, n), g).unwrap();
    let spectral = evolve(&SemigroupModel::FourierMultiplier { power: 1, length, modes: n }, &periodic, 0.5).unwrap();
    let kernel = evolve(&SemigroupModel::HeatKernel { dim: 1 }, &periodic, 0.5).unwrap();
    assert!(spectral.sup_distance(&kernel).unwrap() <= 1e-4);
    // closed form: (1 + 4t)^{-1/2} e^{-x²/(1+4t)}
    for (x, v) in spectral.x.iter().zip(&spectral.values) {
        assert!((v - (-x * x / 3.0).exp() / 3f64.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn realified_generator_reproduces_spectral_evolution() {
    let n = 32;
    let a = realified_fourier_generator(2, 1.0, n).unwrap();
    let u0 = GridFunction::sample_1d(periodic_axis(0.0, 1.0, n), bump(0.4, 0.3)).unwrap();
    let model = SemigroupModel::FourierMultiplier { power: 2, length: 1.0, modes: n };
    for t in [1e-6, 1e-4, 1e-2] {
        let spectral = evolve(&model, &u0, t).unwrap();
        let direct = mat_exp(&a, t).unwrap().mul_vec(&Vector::new(u0.values.clone()).unwrap()).unwrap();
        let d = spectral.values.iter().zip(direct.iter()).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        assert!(d < 1e-8, "t = {t}: {d}");
    }
}

#[test]
fn semigroup_law_for_every_model() {
    let n = 128;
    let periodic = GridFunction::sample_1d(periodic_axis(-8.0, 16.0, n), bump(0.0, 2.0)).unwrap();
    let closed = GridFunction::sample_1d(closed_axis(0.0, 10.0, 101), bump(2.0, 2.0)).unwrap();
    let a = Matrix::from_rows(&[[-1.0, 2.0, 0.0], [0.5, -1.0, -0.3], [0.0, 1.0, -2.0]]).unwrap();
    let small = GridFunction::new_1d(vec![0.0, 1.0, 2.0], vec![1.0, -2.0, 0.5]).unwrap();
    let cases = [
        (SemigroupModel::Matrix(a), small, 0.3, 0.9),
        (SemigroupModel::HeatKernel { dim: 1 }, periodic.clone(), 0.25, 0.5),
        (SemigroupModel::RightShift, closed, 1.0, 2.5),
        (SemigroupModel::FourierMultiplier { power: 2, length: 16.0, modes: n }, periodic.clone(), 0.2, 0.7),
        (SemigroupModel::FourierMultiplier { power: 1, length: 16.0, modes: n }, periodic, 0.2, 0.7),
    ];
    for (model, u0, s, t) in cases {
        let two = evolve(&model, &evolve(&model, &u0, s).unwrap(), t).unwrap();
        let one = evolve(&model, &u0, s + t).unwrap();
        let d = two.sup_distance(&one).unwrap();
        assert!(d <= 1e-9 * (1.0 + u0.sup_norm()), "{model:?}: {d}");
    }
}

fn line_setup() -> GridFunction {
    let n = 4096;
    let u0 = GridFunction::sample_1d(periodic_axis(-32.0, 64.0, n), bump(0.0, 1.0)).unwrap();
    let mass = u0.l1_norm();
    GridFunction {
        values: u0.values.iter().map(|v| v / mass).collect(),
        ..u0
    }
}

fn log_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect()
}

#[test]
fn biharmonic_is_locally_eventually_positive() {
    let u0 = line_setup();
    let model = SemigroupModel::FourierMultiplier { power: 2, length: 64.0, modes: 4096 };
    let times = log_grid(1e-3, 1.5, 60);
    let r = local_positivity_probe(&model, &u0, (-1.0, 1.0), &times, 1e-10).unwrap();
    let onset = r.onset_time.expect("finite onset");
    assert!(onset > times[0]);
    assert!(r.has_negative_excursion(1e-10));
    assert_eq!(r.persistence_checked_until, 1.5);

    let heat = SemigroupModel::FourierMultiplier { power: 1, length: 64.0, modes: 4096 };
    let r = local_positivity_probe(&heat, &u0, (-1.0, 1.0), &times, 1e-10).unwrap();
    assert_eq!(r.onset_time, Some(times[0]));
    assert!(!r.has_negative_excursion(1e-10));
}

#[test]
fn probe_guards_against_wraparound() {
    let u0 = line_setup();
    let model = SemigroupModel::FourierMultiplier { power: 1, length: 64.0, modes: 4096 };
    let r = local_positivity_probe(&model, &u0, (-1.0, 1.0), &[1.0, 200.0], 1e-10);
    assert!(matches!(r, Err(evpos_core::Error::Truncation { t, .. }) if t == 200.0));
    let neg = GridFunction {
        values: u0.values.iter().map(|v| -v).collect(),
        ..u0.clone()
    };
    assert!(local_positivity_probe(&model, &neg, (-1.0, 1.0), &[1.0], 1e-10).is_err());
    assert!(local_positivity_probe(&model, &u0, (-40.0, 1.0), &[1.0], 1e-10).is_err());
}
