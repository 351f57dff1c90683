//! Oracle and property checks for the core algebra.
//!
//! Dense nalgebra routines (LU inverse, matrix product, SVD, normal
//! equations) act as independent references for the compact LTT code.

use approx::assert_abs_diff_eq;
use lagdeconv::bounds::{self, BoundReport};
use lagdeconv::deconv::{self, Observation, ObservationSet};
use lagdeconv::laguerre::{self, LaguerreBasis, LaguerreSeries, Signal};
use lagdeconv::toeplitz::{spectral_norm, LttMatrix};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn well_conditioned(n: usize) -> impl Strategy<Value = LttMatrix> {
    (
        prop_oneof![0.8f64..2.0, -2.0f64..-0.8],
        prop::collection::vec(-1.0f64..1.0, n - 1),
    )
        .prop_map(|(d0, rest)| {
            let mut diag = vec![d0];
            diag.extend(rest.iter().enumerate().map(|(k, v)| v * 0.5f64.powi(k as i32 + 1)));
            LttMatrix::new(diag).unwrap()
        })
}

fn sized_pair(max_n: usize) -> impl Strategy<Value = (LttMatrix, LttMatrix)> {
    (2..=max_n).prop_flat_map(|n| (well_conditioned(n), well_conditioned(n)))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_is_ltt_and_matches_dense((m, _) in sized_pair(64)) {
        let dense_inv = m.to_dense().try_inverse().unwrap();
        let scale = max_abs(&dense_inv);
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                let expected = if i >= j { dense_inv[(i - j, 0)] } else { 0.0 };
                prop_assert!((dense_inv[(i, j)] - expected).abs() <= 1e-10 * scale);
            }
        }
        let inv = m.invert().unwrap();
        for k in 0..n {
            prop_assert!((inv.diag()[k] - dense_inv[(k, 0)]).abs() <= 1e-10 * scale);
        }
        let back = inv.invert().unwrap();
        let ms = m.diag().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (x, y) in back.diag().iter().zip(m.diag()) {
            prop_assert!((x - y).abs() <= 1e-10 * ms);
        }
    }

    #[test]
    fn product_is_ltt_and_matches_dense((f, g) in sized_pair(48)) {
        let dense = f.to_dense() * g.to_dense();
        let prod = f.multiply(&g).unwrap();
        let n = f.dim();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((dense[(i, j)] - prod.get(i, j)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn multiply_is_associative(
        (f, g, h) in (2usize..24).prop_flat_map(|n| (well_conditioned(n), well_conditioned(n), well_conditioned(n)))
    ) {
        let left = f.multiply(&g).unwrap().multiply(&h).unwrap();
        let right = f.multiply(&g.multiply(&h).unwrap()).unwrap();
        for (x, y) in left.diag().iter().zip(right.diag()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn solve_inverts_apply(m in well_conditioned(50), a in prop::collection::vec(-1.0f64..1.0, 50)) {
        let c = m.apply(&a).unwrap();
        let back = m.solve(&c).unwrap();
        let via_inverse = m.invert().unwrap().apply(&c).unwrap();
        for i in 0..50 {
            prop_assert!((back[i] - a[i]).abs() <= 1e-10);
            prop_assert!((via_inverse[i] - back[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn spectral_norm_matches_svd(m in well_conditioned(16)) {
        let sigma = m.to_dense().singular_values().max();
        let got = spectral_norm(&m).unwrap();
        prop_assert!((got - sigma).abs() <= 1e-6 * sigma);
    }

    #[test]
    fn single_location_error_identity(
        (model, truth) in sized_pair(32),
        seed in prop::collection::vec(-1.0f64..1.0, 32),
    ) {
        let n = model.dim();
        let a = &seed[..n];
        let c = truth.apply(a).unwrap();
        let est = deconv::solve_single(&model, &c).unwrap();
        let err = deconv::reconstruction_error(a, &est.a_hat);
        let ea = deconv::error_operator(&model, &truth).unwrap().apply(a).unwrap();
        let ea_norm = ea.iter().map(|x| x * x).sum::<f64>().sqrt();
        if let Ok(err) = err {
            prop_assert!((err.absolute - ea_norm).abs() <= 1e-10 * (1.0 + ea_norm));
        }
    }

    #[test]
    fn bound_ordering(
        (model, truth) in sized_pair(24),
        seed in prop::collection::vec(-1.0f64..1.0, 24),
    ) {
        let n = model.dim();
        let a = &seed[..n];
        prop_assume!(a.iter().any(|x| x.abs() > 1e-3));
        let report = BoundReport::relative(a, &model, &truth).unwrap();
        let est = deconv::solve_single(&model, &truth.apply(a).unwrap()).unwrap();
        let rel = deconv::reconstruction_error(a, &est.a_hat).unwrap().relative;
        prop_assert!(report.brackets(rel, 1e-8, 1e-6), "{report:?} vs {rel}");
    }

    #[test]
    fn error_operator_is_dense_residual((model, truth) in sized_pair(16)) {
        let n = model.dim();
        let dense = DMatrix::identity(n, n) - model.to_dense().try_inverse().unwrap() * truth.to_dense();
        let e = deconv::error_operator(&model, &truth).unwrap();
        let scale = 1.0 + max_abs(&dense);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((dense[(i, j)] - e.get(i, j)).abs() <= 1e-10 * scale);
            }
        }
        let (e0, e1) = bounds::error_diagonal_closed_form(
            truth.diag()[0], truth.diag()[1], model.diag()[0], model.diag()[1]).unwrap();
        prop_assert!((e.diag()[0] - e0).abs() <= 1e-12 * scale);
        prop_assert!((e.diag()[1] - e1).abs() <= 1e-12 * scale);
    }

    #[test]
    fn multi_location_estimators(
        (n, models) in (2usize..10).prop_flat_map(|n| (Just(n), prop::collection::vec((well_conditioned(n), well_conditioned(n)), 1..5))),
        seed in prop::collection::vec(-1.0f64..1.0, 10),
    ) {
        let a = &seed[..n];
        let entries: Vec<Observation> = models
            .iter()
            .map(|(m, t)| Observation::synthetic(a, m.clone(), t.clone()).unwrap())
            .collect();
        let obs = ObservationSet::new(entries).unwrap();
        let avg = deconv::solve_multi_averaged(&obs).unwrap();
        let lsq = deconv::solve_multi_lsq(&obs).unwrap();
        prop_assert!(
            deconv::objective(&obs, &lsq.a_hat).unwrap() <= deconv::objective(&obs, &avg.a_hat).unwrap() + 1e-12
        );
        let ids = deconv::averaged_error_identities(&obs, a).unwrap();
        prop_assert!(ids.actual <= ids.arithmetic_mean + 1e-10);
        if obs.len() == 1 {
            for (x, y) in avg.a_hat.iter().zip(&lsq.a_hat) {
                prop_assert!((x - y).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn lsq_matches_normal_equation_oracle() {
    // fixed M = 3, N = 8 instance
    let n = 8;
    let models: Vec<LttMatrix> = (0..3)
        .map(|l| {
            let diag = (0..n).map(|k| if k == 0 { 1.0 + 0.3 * l as f64 } else { ((k * 7 + l * 3) as f64).sin() * 0.4 }).collect();
            LttMatrix::new(diag).unwrap()
        })
        .collect();
    let outputs: Vec<Vec<f64>> = (0..3).map(|l| (0..n).map(|i| ((i + 2 * l) as f64).cos()).collect()).collect();
    let obs = ObservationSet::new(
        models.iter().zip(&outputs).map(|(m, c)| Observation::new(c.clone(), m.clone())).collect(),
    )
    .unwrap();

    let mut normal = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (m, c) in models.iter().zip(&outputs) {
        let d = m.to_dense();
        normal += d.transpose() * &d;
        rhs += d.transpose() * DVector::from_column_slice(c);
    }
    let oracle = normal.lu().solve(&rhs).unwrap();
    let got = deconv::solve_multi_lsq(&obs).unwrap();
    for i in 0..n {
        assert_abs_diff_eq!(got.a_hat[i], oracle[i], epsilon = 1e-8);
    }
}

#[test]
fn upper_bound_matches_dense_block_operator() {
    let n = 6;
    let pairs: Vec<(LttMatrix, LttMatrix)> = (0..3)
        .map(|l| {
            let mk = |shift: f64| {
                let diag = (0..n)
                    .map(|k| if k == 0 { 1.0 + shift } else { (k as f64 * (1.3 + shift)).sin() * 0.3 })
                    .collect();
                LttMatrix::new(diag).unwrap()
            };
            (mk(0.1 * l as f64), mk(0.5 + 0.2 * l as f64))
        })
        .collect();
    let mut block = DMatrix::zeros(3 * n, 3 * n);
    for (l, (model, truth)) in pairs.iter().enumerate() {
        let e = DMatrix::identity(n, n) - model.to_dense().try_inverse().unwrap() * truth.to_dense();
        block.view_mut((l * n, l * n), (n, n)).copy_from(&e);
    }
    let oracle = block.singular_values().max();
    let got = bounds::upper_bound(&pairs).unwrap();
    assert!((got - oracle).abs() <= 1e-6 * oracle, "{got} vs {oracle}");
    // the same operator through the generic dense path
    let dense = spectral_norm(&block).unwrap();
    assert!((dense - oracle).abs() <= 1e-6 * oracle);
}

#[test]
fn block_partition_identity_reproduces_leading_inverse_entries() {
    // upper-left 2×2 block A of an LTT matrix, inverted by the block-triangular identity
    let m = LttMatrix::new(vec![1.7, -0.4, 0.3, 0.2]).unwrap();
    let dense = m.to_dense();
    let a = dense.view((0, 0), (2, 2)).into_owned();
    let c = dense.view((2, 0), (2, 2)).into_owned();
    let d = dense.view((2, 2), (2, 2)).into_owned();
    let a_inv = a.clone().try_inverse().unwrap();
    let d_inv = d.try_inverse().unwrap();
    let lower_left = -(&d_inv * c * &a_inv);
    let inv = m.invert().unwrap();
    let (b0, b1) = (m.diag()[0], m.diag()[1]);
    assert_abs_diff_eq!(a_inv[(0, 0)], 1.0 / b0, epsilon = 1e-14);
    assert_abs_diff_eq!(a_inv[(1, 0)], -b1 / (b0 * b0), epsilon = 1e-14);
    assert_abs_diff_eq!(inv.diag()[1], a_inv[(1, 0)], epsilon = 1e-14);
    assert_abs_diff_eq!(inv.diag()[2], lower_left[(0, 0)], epsilon = 1e-14);
    assert_abs_diff_eq!(inv.diag()[3], lower_left[(1, 0)], epsilon = 1e-14);
    assert_abs_diff_eq!(inv.diag()[1], d_inv[(1, 0)], epsilon = 1e-14);
}

#[test]
fn orthonormality_under_quadrature() {
    let basis = LaguerreBasis::new(13, 1.0).unwrap();
    for m in 0..=12 {
        let f = move |t: f64| laguerre::eval_basis(m, t).unwrap();
        let c = laguerre::expand(Signal::Analytic(&f), &basis).unwrap();
        for (n, v) in c.series.coeffs().iter().enumerate() {
            let expected = if n == m { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-6, "<φ{m}, φ{n}> = {v}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn expand_of_synthesized_series_is_identity(
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..12),
        scale in 0.2f64..50.0,
    ) {
        let series = LaguerreSeries::new(coeffs.clone(), scale).unwrap();
        let f = |t: f64| laguerre::synthesize(&series, t).unwrap();
        let basis = LaguerreBasis::new(coeffs.len() + 2, scale).unwrap();
        let back = laguerre::expand(Signal::Analytic(&f), &basis).unwrap().series;
        for (i, v) in back.coeffs().iter().enumerate() {
            let expected = coeffs.get(i).copied().unwrap_or(0.0);
            prop_assert!((v - expected).abs() < 1e-8, "{i}: {v} vs {expected}");
        }
    }

    #[test]
    fn dominant_coefficient_of_scaled_exponential(scale in 0.01f64..1e4) {
        let f = move |t: f64| (-t / (2.0 * scale)).exp();
        let b0 = bounds::green_dominant_coeff(Signal::Analytic(&f), scale).unwrap();
        prop_assert!((b0 - 1.0).abs() < 1e-9);
    }
}

#[test]
fn narrow_pulse_dominant_coefficient_tends_to_inverse_scale() {
    let scale = 5.0;
    let mut prev_err = f64::INFINITY;
    for width in [0.5, 0.05, 0.005] {
        // unit-area box on [0, width]
        let f = move |t: f64| if t <= width { 1.0 / width } else { 0.0 };
        let n_samples = 2001;
        let dt = 4.0 * width / (n_samples - 1) as f64;
        let values: Vec<f64> = (0..n_samples).map(|k| f(k as f64 * dt)).collect();
        let ts = laguerre::TimeSeries::uniform(dt, values).unwrap();
        let b0 = bounds::green_dominant_coeff(Signal::Sampled(&ts), scale).unwrap();
        let err = (b0 - 1.0 / scale).abs();
        assert!(err < prev_err);
        prev_err = err;
    }
    assert!(prev_err < 1e-3 / scale);
}

#[test]
fn sampled_expansion_reproduces_smooth_signal() {
    // gamma-like pulse, synthesized back and compared in L2
    let scale = 2.0;
    let f = |t: f64| t * t * (-t).exp();
    let dt = 0.005;
    let values: Vec<f64> = (0..=8000).map(|k| f(k as f64 * dt)).collect();
    let ts = laguerre::TimeSeries::uniform(dt, values).unwrap();
    let basis = LaguerreBasis::new(40, scale).unwrap();
    let e = laguerre::expand(Signal::Sampled(&ts), &basis).unwrap();
    assert!(!e.tail_warning);
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..=8000 {
        let t = k as f64 * dt;
        let r = laguerre::synthesize(&e.series, t).unwrap() - f(t);
        num += r * r;
        den += f(t) * f(t);
    }
    assert!((num / den).sqrt() < 1e-4);
}
