//! Impulse response of the homogeneous strip.
//!
//! With uniform `K` the head does not depend on `y`, and the response at
//! `x` to a unit impulse of head at `x = 0` (zero head at `x = L`) is
//!
//! ```text
//! b(x, t) = Σₙ (2nπD/L²) sin(nπx/L) exp(-D n²π² t / L²),   D = K/Ss
//! ```

/// Fewest terms ever summed.
pub const MIN_TERMS: usize = 200;

/// Number of terms needed at time `t` so the neglected tail is below
/// `e^-60` of the largest term.
pub fn terms_needed(t: f64, length: f64, diffusivity: f64) -> usize {
    if t <= 0.0 {
        return usize::MAX;
    }
    let n = length / std::f64::consts::PI * (60.0 / (diffusivity * t)).sqrt();
    MIN_TERMS.max(n.ceil() as usize + 1)
}

/// Strip Green's function at `x` and time `t`; zero for `t ≤ 0`.
pub fn strip_green(x: f64, t: f64, length: f64, diffusivity: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    strip_green_terms(x, t, length, diffusivity, terms_needed(t, length, diffusivity))
}

/// Partial sum with exactly `terms` terms.
pub fn strip_green_terms(x: f64, t: f64, length: f64, diffusivity: f64, terms: usize) -> f64 {
    let k = std::f64::consts::PI / length;
    let mut sum = 0.0;
    for n in 1..=terms {
        let nk = n as f64 * k;
        sum += 2.0 * nk * diffusivity / length * (nk * x).sin() * (-diffusivity * nk * nk * t).exp();
    }
    sum
}

/// Time of the maximum of [`strip_green`] at `x`, by golden-section search.
pub fn peak_time(x: f64, length: f64, diffusivity: f64) -> f64 {
    let scale = x * x / diffusivity;
    let (mut a, mut b) = (scale / 50.0, scale);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| -strip_green(x, t, length, diffusivity);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > 1e-10 * scale {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_is_converged() {
        for t in [0.05, 0.5, 2.7, 30.0] {
            let n = terms_needed(t, 10.0, 1.0);
            let a = strip_green_terms(4.0, t, 10.0, 1.0, n);
            let b = strip_green_terms(4.0, t, 10.0, 1.0, 2 * n);
            assert!((a - b).abs() <= 1e-14 * b.abs().max(1e-300), "t={t}");
        }
    }

    #[test]
    fn unit_area_in_time_matches_steady_flux_split() {
        // ∫b dt = 1 - x/L for the Dirichlet strip.
        let dt = 1e-3;
        let mut total = 0.0;
        let mut t = 0.5 * dt;
        while t < 200.0 {
            total += strip_green(4.0, t, 10.0, 1.0) * dt;
            t += dt;
        }
        assert!((total - 0.6).abs() < 1e-6, "{total}");
    }

    #[test]
    fn peak_near_semi_infinite_estimate() {
        let tp = peak_time(4.0, 10.0, 1.0);
        assert!((tp - 16.0 / 6.0).abs() < 0.05, "{tp}");
        let slope = strip_green(4.0, tp + 1e-4, 10.0, 1.0) - strip_green(4.0, tp - 1e-4, 10.0, 1.0);
        assert!(slope.abs() < 1e-9);
    }
}
