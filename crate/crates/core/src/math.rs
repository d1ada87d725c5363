//! Small numeric helpers shared by the physical-layer and protocol modules.

/// Arguments with magnitude below this are treated as exactly zero when
/// evaluating removable singularities.
pub const SINGULARITY_EPS: f64 = 1e-12;

/// Unnormalized sinc, `sin(x) / x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINGULARITY_EPS {
        1.0
    } else {
        x.sin() / x
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w * 1e3)
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_2pi(phase: f64) -> f64 {
    let r = phase.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= std::f64::consts::TAU {
        0.0
    } else {
        r
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`, stopping once the
/// bracket is narrower than `tol`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sample mean and 95% normal-approximation half-width.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Median of a slice (average of the two middle values for even lengths).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sinc_values() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc(1e-14), 1.0);
        assert!(sinc(PI).abs() < 1e-15);
        assert!((sinc(1.0) - 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn db_roundtrip() {
        assert!((db_to_linear(3.0) - 1.995_262_314_968_879_5).abs() < 1e-12);
        assert!((dbm_to_watts(20.0) - 0.1).abs() < 1e-15);
        assert!((watts_to_dbm(0.01) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_2pi(0.0), 0.0);
        assert!((wrap_2pi(-PI) - PI).abs() < 1e-15);
        assert!(wrap_2pi(2.0 * PI) < 1e-15);
        assert!(wrap_2pi(-1e-300) < 2.0 * PI);
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
