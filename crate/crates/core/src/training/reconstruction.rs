//! Interpolation of training estimates into a continuous angle → response model.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Not-a-knot cubic spline.
    #[default]
    Spline,
    /// Whittaker cardinal series `sin(πx/T) / (πx/T)`.
    IdealLowpass,
    Linear,
}

impl Kernel {
    pub fn name(self) -> &'static str {
        match self {
            Kernel::Spline => "spline",
            Kernel::IdealLowpass => "ideal_lowpass",
            Kernel::Linear => "linear",
        }
    }

    fn min_samples(self) -> usize {
        match self {
            Kernel::IdealLowpass => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionModel {
    pub kernel: Kernel,
    pub sample_period: f64,
    pub samples: Vec<Complex64>,
    /// Spline second derivatives at the knots; empty for other kernels.
    second: Vec<Complex64>,
}

impl ReconstructionModel {
    /// Predicted response at `theta`. Outside the sampled span the end
    /// polynomial pieces are extended.
    pub fn query(&self, theta: f64) -> Complex64 {
        let h = self.sample_period;
        let y = &self.samples;
        match self.kernel {
            Kernel::IdealLowpass => y
                .iter()
                .enumerate()
                .map(|(n, &v)| v * cardinal_sinc(theta / h - n as f64))
                .sum(),
            Kernel::Linear => {
                let (j, t) = self.segment(theta);
                y[j] + (y[j + 1] - y[j]) * (t / h)
            }
            Kernel::Spline => {
                let (j, t) = self.segment(theta);
                let m = &self.second;
                let a = h - t;
                m[j] * (a * a * a / (6.0 * h))
                    + m[j + 1] * (t * t * t / (6.0 * h))
                    + (y[j] / h - m[j] * (h / 6.0)) * a
                    + (y[j + 1] / h - m[j + 1] * (h / 6.0)) * t
            }
        }
    }

    fn segment(&self, theta: f64) -> (usize, f64) {
        let h = self.sample_period;
        let last = self.samples.len() - 2;
        let j = ((theta / h).floor().max(0.0) as usize).min(last);
        (j, theta - j as f64 * h)
    }
}

fn cardinal_sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

pub fn reconstruct(
    estimates: &[Complex64],
    sample_period: f64,
    kernel: Kernel,
) -> Result<ReconstructionModel> {
    let need = kernel.min_samples();
    if estimates.len() < need {
        return Err(Error::TooFewSamples {
            kernel: kernel.name(),
            got: estimates.len(),
            need,
        });
    }
    if !(sample_period > 0.0) {
        return Err(Error::invalid("sample_period", "must be positive"));
    }
    let second = match kernel {
        Kernel::Spline => spline_second_derivatives(estimates, sample_period),
        _ => Vec::new(),
    };
    Ok(ReconstructionModel {
        kernel,
        sample_period,
        samples: estimates.to_vec(),
        second,
    })
}

/// Knot second derivatives of the not-a-knot spline on a uniform grid.
///
/// With equal spacing the not-a-knot conditions reduce the first and last
/// interior rows to `6 M_1 = r_1`, leaving a tridiagonal system in between.
fn spline_second_derivatives(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = y.len();
    let zero = Complex64::new(0.0, 0.0);
    if n == 2 {
        return vec![zero; 2];
    }
    let rhs: Vec<Complex64> = (1..n - 1)
        .map(|i| (y[i - 1] - y[i] * 2.0 + y[i + 1]) * (6.0 / (h * h)))
        .collect();
    if n == 3 {
        let c = rhs[0] / 6.0;
        return vec![c; 3];
    }
    let mut m = vec![zero; n];
    m[1] = rhs[0] / 6.0;
    m[n - 2] = rhs[n - 3] / 6.0;
    if n > 4 {
        // unknowns m[2..=n-3]; rows i = 2..=n-3 of  m[i-1] + 4 m[i] + m[i+1] = rhs
        let k = n - 4;
        let mut d: Vec<Complex64> = (2..=n - 3).map(|i| rhs[i - 1]).collect();
        d[0] -= m[1];
        d[k - 1] -= m[n - 2];
        let sol = thomas(k, &d);
        m[2..=n - 3].copy_from_slice(&sol);
    }
    m[0] = m[1] * 2.0 - m[2];
    m[n - 1] = m[n - 2] * 2.0 - m[n - 3];
    m
}

/// Solve the `k × k` system with unit off-diagonals and 4 on the diagonal.
fn thomas(k: usize, d: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![0.0; k];
    let mut x = d.to_vec();
    let mut b = 4.0;
    c[0] = 1.0 / b;
    x[0] /= b;
    for i in 1..k {
        b = 4.0 - c[i - 1];
        c[i] = 1.0 / b;
        x[i] = (x[i] - x[i - 1]) / b;
    }
    for i in (0..k - 1).rev() {
        let next = x[i + 1];
        x[i] -= next * c[i];
    }
    x
}

/// Weights `Λ_n(θ)` such that the model at `theta` equals `Σ_n Λ_n(θ) y[n]`.
pub fn basis_weights(kernel: Kernel, n: usize, sample_period: f64, theta: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    let mut unit = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        unit[i] = Complex64::new(1.0, 0.0);
        out.push(reconstruct(&unit, sample_period, kernel)?.query(theta).re);
        unit[i] = Complex64::new(0.0, 0.0);
    }
    Ok(out)
}

/// Mean of `|ζ̂(θ) − ζ(θ)|²` over models and grid, divided by the grid mean of `|ζ|²`.
pub fn normalized_expected_se(
    models: &[ReconstructionModel],
    truth: &[Complex64],
    grid: &[f64],
) -> Result<f64> {
    if models.is_empty() || grid.is_empty() {
        return Err(Error::EmptyInput("models or grid"));
    }
    if truth.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: truth.len(),
        });
    }
    let err: f64 = models
        .iter()
        .map(|m| {
            grid.iter()
                .zip(truth)
                .map(|(&t, z)| (m.query(t) - z).norm_sqr())
                .sum::<f64>()
        })
        .sum::<f64>()
        / (models.len() * grid.len()) as f64;
    let norm = truth.iter().map(|z| z.norm_sqr()).sum::<f64>() / truth.len() as f64;
    Ok(err / norm)
}
