//! Fourier-series view of the training signal `a(θ)` over `θ ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::channel::{linear_array_sum, RadioConstants, RisGeometry};
use crate::error::{Error, Result};
use crate::math::median;

pub const DEFAULT_QUADRATURE_POINTS: usize = 10_000;
pub const DEFAULT_GRID_POINTS: usize = 256;

#[derive(Debug, Clone)]
pub struct SpatialSignalAnalysis {
    pub fundamental_frequency: f64,
    pub fundamental_period: f64,
    pub taylor_fmax: f64,
    pub coefficient_cap: usize,
    /// `c(i)` for `i = -cap..=cap`, stored at offset `i + cap`.
    pub coefficients: Vec<Complex64>,
    pub power: f64,
    pub bandwidth_index: usize,
    pub epsilon: f64,
}

impl SpatialSignalAnalysis {
    pub fn coefficient(&self, i: i64) -> Complex64 {
        let cap = self.coefficient_cap as i64;
        assert!(i.abs() <= cap, "index {i} beyond cap {cap}");
        self.coefficients[(i + cap) as usize]
    }

    /// `Σ_{|i| ≤ n} |c(i)|²`.
    pub fn truncated_power(&self, n: usize) -> f64 {
        let cap = self.coefficient_cap;
        let n = n.min(cap);
        self.coefficients[cap - n..=cap + n]
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    }

    /// Approximate maximum spatial frequency `I^ε · F_0`.
    pub fn max_frequency(&self) -> f64 {
        self.bandwidth_index as f64 * self.fundamental_frequency
    }
}

/// Largest coefficient index searched for the power target.
///
/// The tail of `|c(i)|²` falls off like `1/i²` because the signal is cut at
/// `π/2`, so small ε needs a cap growing like `1/ε`. Narrower beams (larger
/// `M_x F_0`) push more power into that tail. Clamped at
/// [`MAX_COEFFICIENT_CAP`]; tolerances that need more report non-convergence.
pub fn coefficient_cap(m_x: usize, f0: f64, epsilon: f64) -> usize {
    let spectral = (8.0 * m_x as f64 * f0 * PI).ceil();
    let tail = ((m_x as f64 * f0).max(2.0) / epsilon).ceil();
    spectral.max(tail).min(MAX_COEFFICIENT_CAP as f64) as usize
}

pub const MAX_COEFFICIENT_CAP: usize = 1 << 18;

/// Array sum seen by a UE at `theta_k` when the surface points at `theta`.
fn training_signal(m_x: usize, f0: f64, theta_k: f64, theta: f64) -> Complex64 {
    linear_array_sum(m_x, 2.0 * PI * f0 * (theta_k.sin() - theta.sin()))
}

pub fn analyze_signal(
    geom: &RisGeometry,
    radio: &RadioConstants,
    theta_k: f64,
    epsilon: f64,
    quadrature_points: usize,
) -> Result<SpatialSignalAnalysis> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid("epsilon", "must lie in (0, 1)"));
    }
    if quadrature_points < 1000 {
        return Err(Error::invalid("quadrature_points", "need at least 1000"));
    }
    let f0 = geom.fundamental_frequency(radio);
    let tp = 1.0 / f0;
    // a period shorter than the support aliases and breaks Parseval
    if tp < FRAC_PI_2 {
        return Err(Error::invalid(
            "d_x",
            format!(
                "spatial period {tp:.4} rad is shorter than the [0, π/2] support; need d_x ≤ 2λ/π"
            ),
        ));
    }
    let cap = coefficient_cap(geom.m_x, f0, epsilon);

    // Composite trapezoid on a grid of spacing tp/len, evaluated for every
    // coefficient at once with an FFT. Nodes past one period wrap modulo len.
    let want = (quadrature_points as f64 * tp / FRAC_PI_2).ceil() as usize;
    let len = (8 * cap).max(want).next_power_of_two();
    let h = tp / len as f64;
    let last = (FRAC_PI_2 / h).floor() as usize;
    let rem = FRAC_PI_2 - last as f64 * h;

    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let mut power = 0.0;
    for k in 0..=last {
        let a = training_signal(geom.m_x, f0, theta_k, k as f64 * h);
        // len >= 8 so there are always at least two nodes
        let mut w = if k == 0 || k == last { h / 2.0 } else { h };
        if k == last {
            w += rem / 2.0;
        }
        buf[k % len] += a * w;
        power += w * a.norm_sqr();
    }
    let a_end = training_signal(geom.m_x, f0, theta_k, FRAC_PI_2);
    power = (power + rem / 2.0 * a_end.norm_sqr()) / tp;

    FftPlanner::new().plan_fft_forward(len).process(&mut buf);

    let coefficients: Vec<Complex64> = (-(cap as i64)..=cap as i64)
        .map(|i| {
            let bin = i.rem_euclid(len as i64) as usize;
            let end =
                Complex64::from_polar(rem / 2.0, -2.0 * PI * f0 * i as f64 * FRAC_PI_2) * a_end;
            (buf[bin] + end) / tp
        })
        .collect();

    let target = (1.0 - epsilon) * power;
    let mut acc = coefficients[cap].norm_sqr();
    let mut bandwidth = (acc >= target).then_some(0);
    for n in 1..=cap {
        if bandwidth.is_some() {
            break;
        }
        acc += coefficients[cap - n].norm_sqr() + coefficients[cap + n].norm_sqr();
        if acc >= target {
            bandwidth = Some(n);
        }
    }
    let bandwidth_index = bandwidth.ok_or(Error::NonConvergence {
        achieved: acc / power,
        target: 1.0 - epsilon,
        cap,
    })?;

    Ok(SpatialSignalAnalysis {
        fundamental_frequency: f0,
        fundamental_period: tp,
        taylor_fmax: geom.m_x as f64 * f0,
        coefficient_cap: cap,
        coefficients,
        power,
        bandwidth_index,
        epsilon,
    })
}

/// Minimum number of training samples for a maximum frequency `f_max`.
pub fn training_lower_bound(f_max: f64) -> usize {
    ((PI * f_max).ceil() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodebookStatistics {
    pub median_fmax: f64,
    pub max_fmax: f64,
    pub taylor_fmax: f64,
    pub median_bound: usize,
    pub max_bound: usize,
    pub taylor_bound: usize,
}

/// `n` evenly spaced angles spanning `[0, π/2]` inclusive.
pub fn uniform_theta_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| FRAC_PI_2 * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Candidate training-codebook sizes from the bandwidth spread over `grid`.
pub fn codebook_statistics(
    geom: &RisGeometry,
    radio: &RadioConstants,
    epsilon: f64,
    grid: &[f64],
) -> Result<CodebookStatistics> {
    if grid.len() < 64 {
        return Err(Error::invalid("grid", "need at least 64 angles"));
    }
    let fmax = grid
        .par_iter()
        .map(|&t| {
            analyze_signal(geom, radio, t, epsilon, DEFAULT_QUADRATURE_POINTS)
                .map(|a| a.max_frequency())
        })
        .collect::<Result<Vec<f64>>>()?;
    let median_fmax = median(&fmax);
    let max_fmax = fmax.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let taylor_fmax = geom.m_x as f64 * geom.fundamental_frequency(radio);
    Ok(CodebookStatistics {
        median_fmax,
        max_fmax,
        taylor_fmax,
        median_bound: training_lower_bound(median_fmax),
        max_bound: training_lower_bound(max_fmax),
        taylor_bound: training_lower_bound(taylor_fmax),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> (RisGeometry, RadioConstants) {
        let radio = RadioConstants::from_wavelength(0.1).unwrap();
        (RisGeometry::new(10, 10, 0.05, 0.05, &radio).unwrap(), radio)
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(training_lower_bound(14.5), 46);
        assert_eq!(training_lower_bound(5.0), 16);
        assert_eq!(training_lower_bound(45.0), 142);
        assert_eq!(training_lower_bound(186.0), 585);
        assert_eq!(training_lower_bound(50.0), 158);
        assert_eq!(training_lower_bound(0.2), 1);
        assert_eq!(training_lower_bound(1.0 / PI), 1);
    }

    #[test]
    fn analysis_invariants() {
        let (g, r) = fig4();
        for &t in &[0.0, 0.3, 0.9, FRAC_PI_2] {
            let a = analyze_signal(&g, &r, t, 1e-2, DEFAULT_QUADRATURE_POINTS).unwrap();
            assert!((a.fundamental_frequency * a.fundamental_period - 1.0).abs() < 1e-12);
            let mx2 = (g.m_x * g.m_x) as f64;
            assert!(a.power <= mx2 * (1.0 + 1e-9));
            assert!(a.truncated_power(a.coefficient_cap) <= mx2 * (1.0 + 1e-3));
            assert!(a.truncated_power(a.bandwidth_index) >= (1.0 - a.epsilon) * a.power);
            if a.bandwidth_index > 0 {
                assert!(a.truncated_power(a.bandwidth_index - 1) < (1.0 - a.epsilon) * a.power);
            }
        }
    }

    #[test]
    fn coefficient_matches_direct_integral() {
        // compare c(3) against a fine midpoint rule
        let (g, r) = fig4();
        let t = 0.4;
        let a = analyze_signal(&g, &r, t, 1e-2, DEFAULT_QUADRATURE_POINTS).unwrap();
        let n = 400_000;
        let h = FRAC_PI_2 / n as f64;
        let f0 = 0.5;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let th = (k as f64 + 0.5) * h;
            acc += training_signal(10, f0, t, th)
                * Complex64::from_polar(h, -2.0 * PI * f0 * 3.0 * th);
        }
        let want = acc * f0;
        assert!((a.coefficient(3) - want).norm() < 1e-4 * want.norm().max(1.0));
    }

    #[test]
    fn bandwidth_monotone_in_epsilon() {
        let (g, r) = fig4();
        for &t in &[0.1, 0.7, 1.3] {
            let i1 = analyze_signal(&g, &r, t, 1e-1, DEFAULT_QUADRATURE_POINTS)
                .unwrap()
                .bandwidth_index;
            let i2 = analyze_signal(&g, &r, t, 1e-2, DEFAULT_QUADRATURE_POINTS)
                .unwrap()
                .bandwidth_index;
            assert!(i2 >= i1);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let (g, r) = fig4();
        assert!(analyze_signal(&g, &r, 0.1, 0.0, DEFAULT_QUADRATURE_POINTS).is_err());
        assert!(analyze_signal(&g, &r, 0.1, 0.1, 10).is_err());
        assert!(codebook_statistics(&g, &r, 0.1, &uniform_theta_grid(10)).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = uniform_theta_grid(256);
        assert_eq!(g[0], 0.0);
        assert!((g[255] - FRAC_PI_2).abs() < 1e-15);
    }
}
