//! Adaptive Gauss-Kronrod (7/15) integration of vector-valued integrands.
//!
//! All Laguerre coefficients of a signal are integrated together: one panel
//! evaluation fills every component, and panels are bisected on the largest
//! componentwise Kronrod-Gauss discrepancy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone)]
pub(crate) struct QuadResult {
    pub values: Vec<f64>,
    pub error: f64,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    values: Vec<f64>,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, scratch: &mut [f64]) -> Panel {
    let dim = scratch.len();
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];

    f(center, scratch);
    for k in 0..dim {
        kronrod[k] += WGK[7] * scratch[k];
        gauss[k] += WG[3] * scratch[k];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        for x in [center - dx, center + dx] {
            f(x, scratch);
            for k in 0..dim {
                kronrod[k] += WGK[j] * scratch[k];
                if j % 2 == 1 {
                    gauss[k] += WG[j / 2] * scratch[k];
                }
            }
        }
    }
    let mut error = 0.0f64;
    for k in 0..dim {
        kronrod[k] *= half;
        gauss[k] *= half;
        error = error.max((kronrod[k] - gauss[k]).abs());
    }
    Panel { a, b, values: kronrod, error }
}

/// Integrates `f` over `[a, b]` component by component.
pub(crate) fn integrate<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    initial_panels: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> QuadResult {
    let mut scratch = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { lo + width };
        heap.push(gk15(&mut f, lo, hi, &mut scratch));
    }

    let totals = |heap: &BinaryHeap<Panel>| {
        let mut values = vec![0.0; dim];
        let mut error = 0.0;
        for p in heap.iter() {
            for (v, pv) in values.iter_mut().zip(&p.values) {
                *v += pv;
            }
            error += p.error;
        }
        (values, error)
    };

    loop {
        let (values, error) = totals(&heap);
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let target = abs_tol.max(rel_tol * scale);
        if error <= target {
            return QuadResult { values, error, converged: true };
        }
        if heap.len() >= max_panels {
            return QuadResult { values, error, converged: false };
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            heap.push(worst);
            let (values, error) = totals(&heap);
            return QuadResult { values, error, converged: false };
        }
        heap.push(gk15(&mut f, worst.a, mid, &mut scratch));
        heap.push(gk15(&mut f, mid, worst.b, &mut scratch));
    }
}

/// Integrates over `[a, ∞)` through the map `t = a + scale·s/(1-s)`, `s ∈ [0, 1)`.
pub(crate) fn integrate_to_infinity<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    a: f64,
    scale: f64,
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> QuadResult {
    integrate(
        |s, out: &mut [f64]| {
            let one_minus = 1.0 - s;
            let t = a + scale * s / one_minus;
            let jac = scale / (one_minus * one_minus);
            if !t.is_finite() || !jac.is_finite() {
                out.iter_mut().for_each(|v| *v = 0.0);
                return;
            }
            f(t, out);
            out.iter_mut().for_each(|v| *v *= jac);
        },
        0.0,
        1.0,
        dim,
        16,
        rel_tol,
        abs_tol,
        4000,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x, o| o[0] = x.powi(5) - 2.0 * x, 0.0, 2.0, 1, 1, 1e-12, 0.0, 10);
        assert!((r.values[0] - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn exponential_to_infinity() {
        let r = integrate_to_infinity(
            |t, o| {
                o[0] = (-t).exp();
                o[1] = t * (-2.0 * t).exp();
            },
            0.0,
            1.0,
            2,
            1e-11,
            1e-15,
        );
        assert!((r.values[0] - 1.0).abs() < 1e-10);
        assert!((r.values[1] - 0.25).abs() < 1e-10);
    }
}
