use crate::error::{invalid, Result};

/// Rectangular aquifer `(0, l1) × (0, l2)` and its discretization.
///
/// Head is prescribed on `x = 0` (the input) and `x = l1` (zero); the
/// boundaries `y = 0` and `y = l2` are impermeable.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainConfig {
    pub l1: f64,
    pub l2: f64,
    /// Specific storage.
    pub ss: f64,
    /// Cells along x; the grid has `nx + 1` nodes on that axis.
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub t_end: f64,
    pub probe: (f64, f64),
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { l1: 10.0, l2: 4.0, ss: 1.0, nx: 100, ny: 40, dt: 0.05, t_end: 400.0, probe: (4.0, 2.0) }
    }
}

impl DomainConfig {
    /// Coarse grid for quick ensemble runs.
    pub fn desk() -> Self {
        Self { nx: 50, ny: 20, dt: 0.1, t_end: 300.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("l1", self.l1), ("l2", self.l2), ("ss", self.ss), ("dt", self.dt), ("t_end", self.t_end)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.nx < 4 || self.ny < 4 {
            return Err(invalid(format!("nx and ny must be at least 4, got {}x{}", self.nx, self.ny)));
        }
        if self.t_end <= self.dt {
            return Err(invalid(format!("t_end {} must exceed dt {}", self.t_end, self.dt)));
        }
        let (px, py) = self.probe;
        if !(px > 0.0 && px < self.l1 && py > 0.0 && py < self.l2) {
            return Err(invalid(format!("probe ({px}, {py}) is not strictly inside the domain")));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.l1 / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.l2 / self.ny as f64
    }

    /// Number of grid nodes, boundaries included.
    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    /// Row-major node index, `y` fastest.
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 1) + j
    }

    pub fn node_coords(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.dx(), j as f64 * self.dy())
    }

    /// Number of time steps; samples are taken at `k·dt`, `k = 0..=steps`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Separable exponential covariance `σ² exp(-|Δx|/η₁ - |Δy|/η₂)` of `ln K`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceConfig {
    pub variance: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub n_terms: usize,
}

impl Default for CovarianceConfig {
    fn default() -> Self {
        Self { variance: 2.0, eta1: 4.0, eta2: 2.0, n_terms: 100 }
    }
}

impl CovarianceConfig {
    /// A zero variance is accepted and yields the homogeneous field.
    pub fn validate(&self) -> Result<()> {
        if !(self.variance.is_finite() && self.variance >= 0.0) {
            return Err(invalid(format!("variance must be nonnegative, got {}", self.variance)));
        }
        for (name, v) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n_terms == 0 {
            return Err(invalid("n_terms must be positive"));
        }
        Ok(())
    }

    pub fn kernel(&self, p: (f64, f64), q: (f64, f64)) -> f64 {
        self.variance * (-(p.0 - q.0).abs() / self.eta1 - (p.1 - q.1).abs() / self.eta2).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        DomainConfig::default().validate().unwrap();
        DomainConfig::desk().validate().unwrap();
        CovarianceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_domains() {
        let bad = [
            DomainConfig { nx: 3, ..DomainConfig::default() },
            DomainConfig { dt: 0.0, ..DomainConfig::default() },
            DomainConfig { t_end: 0.05, ..DomainConfig::default() },
            DomainConfig { probe: (10.0, 2.0), ..DomainConfig::default() },
            DomainConfig { probe: (4.0, 0.0), ..DomainConfig::default() },
        ];
        for d in bad {
            assert!(d.validate().is_err(), "{d:?}");
        }
    }

    #[test]
    fn zero_variance_allowed() {
        CovarianceConfig { variance: 0.0, ..Default::default() }.validate().unwrap();
        assert!(CovarianceConfig { n_terms: 0, ..Default::default() }.validate().is_err());
    }
}
