use lagdeconv_groundwater::kle::grid_inner;
use lagdeconv_groundwater::{kle_build, sample_field, CovarianceConfig, DomainConfig, FieldRealization};

fn coarse() -> DomainConfig {
    DomainConfig::desk()
}

#[test]
fn energy_below_total_variance() {
    let dom = DomainConfig::default();
    let cov = CovarianceConfig::default();
    let basis = kle_build(&cov, &dom).unwrap();
    assert_eq!(basis.len(), 100);
    let energy: f64 = basis.modes.iter().map(|m| m.lambda).sum();
    assert!(energy <= cov.variance * dom.l1 * dom.l2);
    assert!(basis.energy_fraction(&dom) > 0.5);
}

#[test]
fn eigenvalues_strictly_decrease() {
    let basis = kle_build(&CovarianceConfig::default(), &coarse()).unwrap();
    assert!(basis.modes.iter().all(|m| m.lambda > 0.0));
    assert!(basis.modes.windows(2).all(|w| w[0].lambda > w[1].lambda));
}

fn orthonormality_defect(dom: &DomainConfig) -> f64 {
    let basis = kle_build(&CovarianceConfig::default(), dom).unwrap();
    let mut worst = 0.0f64;
    for a in 0..basis.len() {
        for b in a..basis.len() {
            let g = grid_inner(dom, &basis.modes[a].values, &basis.modes[b].values);
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - want).abs());
        }
    }
    worst
}

#[test]
fn eigenfunctions_orthonormal_on_resolving_grid() {
    let dom = DomainConfig { nx: 200, ny: 80, ..DomainConfig::default() };
    let worst = orthonormality_defect(&dom);
    assert!(worst < 1e-3, "worst deviation {worst:e}");
}

#[test]
#[ignore = "the 100 retained modes reach y-frequencies where the trapezoid rule on 40 cells errs by 1.07e-3"]
fn eigenfunctions_orthonormal_on_default_grid() {
    let worst = orthonormality_defect(&DomainConfig::default());
    assert!(worst < 1e-3, "worst deviation {worst:e}");
}

#[test]
fn orthonormality_defect_shrinks_with_refinement() {
    let d1 = orthonormality_defect(&DomainConfig::default());
    let d2 = orthonormality_defect(&DomainConfig { nx: 200, ny: 80, ..DomainConfig::default() });
    assert!(d2 < 0.3 * d1, "{d1:e} {d2:e}");
}

#[test]
fn truncated_covariance_matches_kernel() {
    let cov = CovarianceConfig::default();
    let basis = kle_build(&cov, &DomainConfig::default()).unwrap();
    let points: [(f64, f64); 7] = [(1.0, 1.0), (4.0, 2.0), (2.5, 3.5), (7.0, 0.5), (9.0, 3.0), (5.5, 1.2), (4.3, 2.1)];
    let mut checked = 0;
    for &p in &points {
        for &q in &points {
            let dist = (p.0 - q.0).hypot(p.1 - q.1);
            if dist < 0.5 {
                continue;
            }
            let want = cov.kernel(p, q);
            let got = basis.covariance(p, q);
            assert!((got - want).abs() <= 0.05 * want, "{p:?} {q:?}: {got} vs {want}");
            checked += 1;
        }
    }
    assert!(checked > 30);
}

#[test]
fn same_seed_same_field() {
    let basis = kle_build(&CovarianceConfig::default(), &coarse()).unwrap();
    let a = sample_field(&basis, 42);
    let b = sample_field(&basis, 42);
    assert_eq!(a.xi, b.xi);
    assert!(a.log_k.iter().zip(&b.log_k).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_ne!(sample_field(&basis, 43).xi, a.xi);
}

#[test]
fn zero_weights_give_unit_conductivity() {
    let basis = kle_build(&CovarianceConfig::default(), &coarse()).unwrap();
    let f = FieldRealization::from_weights(&basis, vec![0.0; basis.len()], 0).unwrap();
    assert!(f.log_k.iter().all(|&y| y == 0.0));
    assert!(f.conductivity().iter().all(|&k| k == 1.0));
}

#[test]
fn zero_variance_field_is_homogeneous() {
    let cov = CovarianceConfig { variance: 0.0, ..Default::default() };
    let basis = kle_build(&cov, &coarse()).unwrap();
    let f = sample_field(&basis, 9);
    assert!(f.conductivity().iter().all(|&k| k == 1.0));
}

#[test]
fn ensemble_variance_matches_retained_energy() {
    let dom = coarse();
    let cov = CovarianceConfig::default();
    let basis = kle_build(&cov, &dom).unwrap();
    let draws = 2000;
    let n = dom.node_count();
    let (mut s1, mut s2) = (vec![0.0; n], vec![0.0; n]);
    for seed in 0..draws {
        let f = sample_field(&basis, seed);
        for (i, y) in f.log_k.iter().enumerate() {
            s1[i] += y;
            s2[i] += y * y;
        }
    }
    let var: Vec<f64> = (0..n).map(|i| (s2[i] - s1[i] * s1[i] / draws as f64) / (draws - 1) as f64).collect();

    // pointwise, against the retained variance Σλf²(p)
    for (i, j) in [(10, 10), (25, 5), (40, 15), (20, 10)] {
        let node = dom.node(i, j);
        let want: f64 = basis.modes.iter().map(|m| m.lambda * m.values[node] * m.values[node]).sum();
        let se = want * (2.0 / (draws - 1) as f64).sqrt();
        assert!((var[node] - want).abs() < 4.0 * se, "node ({i},{j}): {} vs {want}", var[node]);
    }

    // averaged over the interior, against σ² times the retained fraction
    let mut mean = 0.0;
    let mut count = 0;
    for i in 1..dom.nx {
        for j in 1..dom.ny {
            mean += var[dom.node(i, j)];
            count += 1;
        }
    }
    mean /= count as f64;
    let want = cov.variance * basis.energy_fraction(&dom);
    assert!((mean - want).abs() < 0.05 * want, "{mean} vs {want}");
}
