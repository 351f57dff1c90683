//! Truncated Karhunen-Loève expansion of a separable exponential field.
//!
//! On `[0, L]` the kernel `exp(-|s - s'|/η)` has eigenfunctions
//! `ηω cos(ωs) + sin(ωs)` with eigenvalues `2η/(1 + η²ω²)`, where `ω` solves
//! `(η²ω² - 1) sin(ωL) = 2ηω cos(ωL)`. There is exactly one root in each
//! interval `(kπ/L, (k+1)π/L)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{CovarianceConfig, DomainConfig};
use crate::error::{Error, Result};

/// Relative tolerance on each characteristic frequency.
pub const ROOT_REL_TOL: f64 = 1e-10;

/// One eigenpair of the unit-variance 1D kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode1d {
    pub omega: f64,
    pub lambda: f64,
    eta: f64,
    norm: f64,
}

impl Mode1d {
    pub fn eval(&self, s: f64) -> f64 {
        (self.eta * self.omega * (self.omega * s).cos() + (self.omega * s).sin()) / self.norm
    }
}

fn characteristic(omega: f64, eta: f64, length: f64) -> f64 {
    let eo = eta * omega;
    (eo * eo - 1.0) * (omega * length).sin() - 2.0 * eo * (omega * length).cos()
}

/// The `count` leading 1D eigenpairs on `[0, length]`.
pub fn modes_1d(eta: f64, length: f64, count: usize, axis: &'static str) -> Result<Vec<Mode1d>> {
    let step = std::f64::consts::PI / length;
    (0..count)
        .map(|k| {
            let mut lo = if k == 0 { step * 1e-9 } else { k as f64 * step };
            let mut hi = (k + 1) as f64 * step;
            let (mut glo, ghi) = (characteristic(lo, eta, length), characteristic(hi, eta, length));
            if glo == 0.0 || ghi == 0.0 || glo.signum() == ghi.signum() {
                return Err(Error::RootBracket { axis, index: k });
            }
            while hi - lo > ROOT_REL_TOL * 0.5 * (lo + hi) {
                let mid = 0.5 * (lo + hi);
                let gm = characteristic(mid, eta, length);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            let omega = 0.5 * (lo + hi);
            let eo = eta * omega;
            let s2 = (2.0 * omega * length).sin() / (4.0 * omega);
            let norm2 = eo * eo * (0.5 * length + s2)
                + (0.5 * length - s2)
                + 0.5 * eta * (1.0 - (2.0 * omega * length).cos());
            Ok(Mode1d { omega, lambda: 2.0 * eta / (1.0 + eo * eo), eta, norm: norm2.sqrt() })
        })
        .collect()
}

/// A retained 2D mode: product of x-mode `ix` and y-mode `iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct KleMode {
    pub lambda: f64,
    pub ix: usize,
    pub iy: usize,
    /// Eigenfunction at the grid nodes, indexed like [`DomainConfig::node`].
    pub values: Vec<f64>,
}

/// Modes sorted by descending eigenvalue, evaluated on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KleBasis {
    pub modes: Vec<KleMode>,
    pub x_modes: Vec<Mode1d>,
    pub y_modes: Vec<Mode1d>,
    pub variance: f64,
    pub nx: usize,
    pub ny: usize,
}

impl KleBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Eigenfunction `k` at an arbitrary point.
    pub fn eval_mode(&self, k: usize, p: (f64, f64)) -> f64 {
        let m = &self.modes[k];
        self.x_modes[m.ix].eval(p.0) * self.y_modes[m.iy].eval(p.1)
    }

    /// Covariance implied by the retained modes.
    pub fn covariance(&self, p: (f64, f64), q: (f64, f64)) -> f64 {
        (0..self.len()).map(|k| self.modes[k].lambda * self.eval_mode(k, p) * self.eval_mode(k, q)).sum()
    }

    /// `Σλ` over retained modes divided by `σ²·L1·L2`; zero when `σ² = 0`.
    pub fn energy_fraction(&self, dom: &DomainConfig) -> f64 {
        let total = self.variance * dom.l1 * dom.l2;
        if total == 0.0 {
            return 0.0;
        }
        self.modes.iter().map(|m| m.lambda).sum::<f64>() / total
    }
}

/// Trapezoid weights along one axis with `cells` intervals of width `h`.
fn axis_weights(cells: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; cells + 1];
    w[0] = 0.5 * h;
    w[cells] = 0.5 * h;
    w
}

/// Grid inner product `∫∫ a·b` of two nodal fields.
pub fn grid_inner(dom: &DomainConfig, a: &[f64], b: &[f64]) -> f64 {
    let wx = axis_weights(dom.nx, dom.dx());
    let wy = axis_weights(dom.ny, dom.dy());
    let mut sum = 0.0;
    for (i, wxi) in wx.iter().enumerate() {
        for (j, wyj) in wy.iter().enumerate() {
            let n = dom.node(i, j);
            sum += wxi * wyj * a[n] * b[n];
        }
    }
    sum
}

pub fn kle_build(cov: &CovarianceConfig, dom: &DomainConfig) -> Result<KleBasis> {
    cov.validate()?;
    dom.validate()?;
    let per_axis = cov.n_terms;
    let x_modes = modes_1d(cov.eta1, dom.l1, per_axis, "x")?;
    let y_modes = modes_1d(cov.eta2, dom.l2, per_axis, "y")?;

    // the top n products always come from the first n modes of each axis
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(per_axis * per_axis);
    for (ix, mx) in x_modes.iter().enumerate() {
        for (iy, my) in y_modes.iter().enumerate() {
            pairs.push((mx.lambda * my.lambda, ix, iy));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    pairs.truncate(cov.n_terms);

    let xs: Vec<Vec<f64>> = x_modes.iter().map(|m| (0..=dom.nx).map(|i| m.eval(dom.node_coords(i, 0).0)).collect()).collect();
    let ys: Vec<Vec<f64>> = y_modes.iter().map(|m| (0..=dom.ny).map(|j| m.eval(dom.node_coords(0, j).1)).collect()).collect();
    let modes = pairs
        .into_iter()
        .map(|(lambda, ix, iy)| {
            let mut values = vec![0.0; dom.node_count()];
            for i in 0..=dom.nx {
                for j in 0..=dom.ny {
                    values[dom.node(i, j)] = xs[ix][i] * ys[iy][j];
                }
            }
            KleMode { lambda: cov.variance * lambda, ix, iy, values }
        })
        .collect();
    Ok(KleBasis { modes, x_modes, y_modes, variance: cov.variance, nx: dom.nx, ny: dom.ny })
}

/// A sampled log-conductivity field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub xi: Vec<f64>,
    /// `ln K` at the grid nodes.
    pub log_k: Vec<f64>,
    pub seed: u64,
    pub nx: usize,
    pub ny: usize,
}

impl FieldRealization {
    /// Field with prescribed weights; `ξ = 0` gives `K ≡ 1`.
    pub fn from_weights(basis: &KleBasis, xi: Vec<f64>, seed: u64) -> Result<Self> {
        if xi.len() != basis.len() {
            return Err(crate::error::invalid(format!("{} weights for {} modes", xi.len(), basis.len())));
        }
        let n = basis.modes.first().map_or((basis.nx + 1) * (basis.ny + 1), |m| m.values.len());
        let mut log_k = vec![0.0; n];
        for (mode, &w) in basis.modes.iter().zip(&xi) {
            let c = mode.lambda.sqrt() * w;
            log_k.iter_mut().zip(&mode.values).for_each(|(y, f)| *y += c * f);
        }
        Ok(Self { xi, log_k, seed, nx: basis.nx, ny: basis.ny })
    }

    pub fn conductivity(&self) -> Vec<f64> {
        self.log_k.iter().map(|y| y.exp()).collect()
    }
}

/// Draw `ξ` from a ChaCha8 stream keyed by `seed` and assemble `ln K`.
pub fn sample_field(basis: &KleBasis, seed: u64) -> FieldRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi: Vec<f64> = (0..basis.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    FieldRealization::from_weights(basis, xi, seed).expect("weight count matches basis")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_satisfy_characteristic_equation() {
        let modes = modes_1d(4.0, 10.0, 30, "x").unwrap();
        for (k, m) in modes.iter().enumerate() {
            let step = std::f64::consts::PI / 10.0;
            assert!(m.omega > k as f64 * step && m.omega < (k + 1) as f64 * step);
            // residual relative to the size of the terms
            let scale = (4.0 * m.omega).powi(2) + 1.0;
            assert!(characteristic(m.omega, 4.0, 10.0).abs() < 1e-8 * scale * m.omega * 10.0);
        }
        assert!(modes.windows(2).all(|w| w[0].lambda > w[1].lambda));
    }

    #[test]
    fn modes_are_orthonormal() {
        let modes = modes_1d(2.0, 4.0, 6, "y").unwrap();
        let n = 20000;
        let h = 4.0 / n as f64;
        for a in &modes {
            for b in &modes {
                let s: f64 = (0..n).map(|i| (i as f64 + 0.5) * h).map(|s| a.eval(s) * b.eval(s)).sum::<f64>() * h;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-6, "{s}");
            }
        }
    }

    #[test]
    fn eigenfunction_solves_integral_equation() {
        let m = modes_1d(4.0, 10.0, 3, "x").unwrap()[2];
        let n = 40000;
        let h = 10.0 / n as f64;
        for s0 in [0.0, 3.3, 10.0] {
            let lhs: f64 = (0..n).map(|i| (i as f64 + 0.5) * h).map(|s| (-(s - s0).abs() / 4.0).exp() * m.eval(s)).sum::<f64>() * h;
            assert!((lhs - m.lambda * m.eval(s0)).abs() < 1e-6);
        }
    }
}
