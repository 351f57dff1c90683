//! Lower-triangular Toeplitz (LTT) matrices.
//!
//! An `N×N` LTT matrix is stored as its first column: `diag[k]` is the value
//! on the `k`-th descending diagonal. Products and inverses of LTT matrices
//! are again LTT, so every operation here stays in the compact form and
//! costs `O(N²)`.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::laguerre::LaguerreSeries;

/// `|diag[0]|` below this fraction of `max|diag|` is reported as
/// ill-conditioned.
pub const CONDITIONING_THRESHOLD: f64 = 1e-12;

/// Relative tolerance of [`spectral_norm`].
pub const SPECTRAL_REL_TOL: f64 = 1e-8;

/// Krylov dimension cap of [`spectral_norm`].
pub const SPECTRAL_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LttMatrix {
    diag: Vec<f64>,
}

impl LttMatrix {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("an LTT matrix needs at least one diagonal"));
        }
        if diag.iter().any(|v| !v.is_finite()) {
            return Err(invalid("LTT diagonals must be finite"));
        }
        Ok(Self { diag })
    }

    pub fn identity(n: usize) -> Self {
        let mut diag = vec![0.0; n.max(1)];
        diag[0] = 1.0;
        Self { diag }
    }

    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![0.0; n.max(1)] }
    }

    /// Transfer matrix of a Green's-function series:
    /// `diag[0] = T·b₀`, `diag[k] = T·(b_k - b_{k-1})`.
    pub fn from_green_series(b: &LaguerreSeries) -> Self {
        let t = b.scale();
        let c = b.coeffs();
        let diag = (0..c.len())
            .map(|k| if k == 0 { t * c[0] } else { t * (c[k] - c[k - 1]) })
            .collect();
        Self { diag }
    }

    /// Builds the matrix from the first column of a dense matrix, ignoring
    /// everything else.
    pub fn from_dense_first_column(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.column(0).iter().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            self.diag[i - j]
        } else {
            0.0
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.diag[0] != 0.0
    }

    /// `|diag[0]| < 10⁻¹²·max|diag|`.
    pub fn is_ill_conditioned(&self) -> bool {
        let max = self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.diag[0].abs() < CONDITIONING_THRESHOLD * max
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n });
        }
        Ok(())
    }

    /// `diag_out[m] = Σ_{k≤m} f[m-k]·g[k]`.
    pub fn multiply(&self, other: &LttMatrix) -> Result<LttMatrix> {
        self.check_dim(other.dim())?;
        Ok(Self { diag: convolve(&self.diag, &other.diag) })
    }

    pub fn invert(&self) -> Result<LttMatrix> {
        self.invert_checked().map(|(m, _)| m)
    }

    /// Inverse plus the ill-conditioning flag of the input.
    pub fn invert_checked(&self) -> Result<(LttMatrix, bool)> {
        let d0 = self.diag[0];
        if d0 == 0.0 {
            return Err(Error::Singular);
        }
        let n = self.dim();
        let mut inv = vec![0.0; n];
        inv[0] = 1.0 / d0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.diag[j] * inv[k - j]).sum();
            inv[k] = -s / d0;
        }
        Ok((Self { diag: inv }, self.is_ill_conditioned()))
    }

    /// `M·a`.
    pub fn apply(&self, a: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(a.len())?;
        Ok(convolve(&self.diag, a))
    }

    /// `Mᵀ·x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        let n = self.dim();
        Ok((0..n).map(|j| (j..n).map(|i| self.diag[i - j] * x[i]).sum()).collect())
    }

    /// Solves `M·a = c` by forward substitution.
    pub fn solve(&self, c: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(c.len())?;
        let d0 = self.diag[0];
        if d0 == 0.0 {
            return Err(Error::Singular);
        }
        let mut a = vec![0.0; c.len()];
        for i in 0..c.len() {
            let s: f64 = (0..i).map(|k| self.diag[i - k] * a[k]).sum();
            a[i] = (c[i] - s) / d0;
        }
        Ok(a)
    }

    pub fn scaled(&self, s: f64) -> LttMatrix {
        Self { diag: self.diag.iter().map(|v| v * s).collect() }
    }

    /// `I - M`.
    pub fn identity_minus(&self) -> LttMatrix {
        let mut diag: Vec<f64> = self.diag.iter().map(|v| -v).collect();
        diag[0] += 1.0;
        Self { diag }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }
}

fn convolve(f: &[f64], g: &[f64]) -> Vec<f64> {
    (0..f.len()).map(|m| (0..=m).map(|k| f[m - k] * g[k]).sum()).collect()
}

/// A real linear operator that can be applied and transposed.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply_to(&self, x: &[f64], out: &mut [f64]);
    fn apply_transpose_to(&self, x: &[f64], out: &mut [f64]);
}

impl LinearOperator for LttMatrix {
    fn nrows(&self) -> usize {
        self.dim()
    }
    fn ncols(&self) -> usize {
        self.dim()
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64]) {
        for (m, o) in out.iter_mut().enumerate() {
            *o = (0..=m).map(|k| self.diag[m - k] * x[k]).sum();
        }
    }
    fn apply_transpose_to(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for (j, o) in out.iter_mut().enumerate() {
            *o = (j..n).map(|i| self.diag[i - j] * x[i]).sum();
        }
    }
}

impl LinearOperator for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }
    fn ncols(&self) -> usize {
        self.ncols()
    }
    fn apply_to(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
    fn apply_transpose_to(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..self.nrows()).map(|i| self[(i, j)] * x[i]).sum();
        }
    }
}

/// Largest singular value of `op`.
///
/// Lanczos iteration on `MᵀM` from a fixed start vector, with full
/// reorthogonalization; the largest Ritz value of the tridiagonal projection
/// is found by Sturm-sequence bisection. The Krylov space is the one swept by
/// power iteration from the same vector, but the Ritz value converges in at
/// most `n` steps even when the top singular values cluster, as they do for
/// Toeplitz operators. Stops when the Krylov space becomes invariant, when it
/// fills the domain, or when the Ritz value changes by less than
/// `SPECTRAL_REL_TOL·10⁻³` (relative) over three consecutive steps.
pub fn spectral_norm<Op: LinearOperator + ?Sized>(op: &Op) -> Result<f64> {
    let (m, n) = (op.nrows(), op.ncols());
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    let max_dim = n.min(SPECTRAL_MAX_ITER);
    let mut q: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i + 1) as f64).sin()).collect();
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_dim);
    let mut beta: Vec<f64> = Vec::with_capacity(max_dim);
    let mut mv = vec![0.0; m];
    let mut w = vec![0.0; n];
    let mut theta = 0.0f64;
    let mut stable_steps = 0;
    let mut change: f64;
    let mut restarted = false;

    loop {
        op.apply_to(&q, &mut mv);
        if mv.iter().any(|x| !x.is_finite()) {
            return Err(invalid("operator produced non-finite values"));
        }
        op.apply_transpose_to(&mv, &mut w);
        let a = dot(&q, &w);
        basis.push(std::mem::take(&mut q));
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
            }
        }
        let b_next = dot(&w, &w).sqrt();

        let next = largest_tridiagonal_eigenvalue(&alpha, &beta);
        change = (next - theta).abs() / next.abs().max(f64::MIN_POSITIVE);
        theta = next;
        stable_steps = if change < SPECTRAL_REL_TOL * 1e-3 { stable_steps + 1 } else { 0 };

        let scale = alpha.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(f64::MIN_POSITIVE);
        let invariant = b_next <= 1e-14 * scale;
        if theta == 0.0 && invariant && !restarted {
            // start vector in the null space of MᵀM: retry on a column the operator keeps
            match restart_vector(op, &mut mv) {
                Some(e) => {
                    restarted = true;
                    basis.clear();
                    alpha.clear();
                    beta.clear();
                    q = e;
                    continue;
                }
                None => return Ok(0.0),
            }
        }
        if invariant || basis.len() >= n || stable_steps >= 3 {
            return Ok(theta.max(0.0).sqrt());
        }
        if basis.len() >= max_dim {
            return Err(Error::NotConverged { iterations: basis.len(), change });
        }
        beta.push(b_next);
        q = w.iter().map(|x| x / b_next).collect();
    }
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta` (`beta.len() == alpha.len() - 1`).
fn largest_tridiagonal_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // number of eigenvalues strictly below x
    let count_below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..k {
            let off = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { off / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn restart_vector<Op: LinearOperator + ?Sized>(op: &Op, scratch: &mut [f64]) -> Option<Vec<f64>> {
    let n = op.ncols();
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_to(&e, scratch);
        if scratch.iter().any(|x| *x != 0.0) {
            return Some(e);
        }
        e[j] = 0.0;
    }
    None
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}
