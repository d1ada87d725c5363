//! Slot-selection policies. Each returns the chosen slot indices in the
//! order they were picked.

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Carap,
    Gscap,
    Smap,
    RrsAloha,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::RrsAloha, Policy::Carap, Policy::Gscap, Policy::Smap];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Carap => "carap",
            Policy::Gscap => "gscap",
            Policy::Smap => "smap",
            Policy::RrsAloha => "rrs_aloha",
        }
    }

    pub fn uses_oracle(self) -> bool {
        self != Policy::RrsAloha
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AccessSet {
    pub slots: Vec<usize>,
}

fn check_replicas(r: usize, n: usize) -> Result<()> {
    if r > n {
        return Err(Error::invalid(
            "r_replicas",
            format!("{r} exceeds {n} slots"),
        ));
    }
    Ok(())
}

/// Weighted sampling without replacement with pmf ∝ `|prediction|`.
pub fn policy_carap<R: Rng + ?Sized>(
    rng: &mut R,
    predictions: &[Complex64],
    r: usize,
) -> Result<AccessSet> {
    check_replicas(r, predictions.len())?;
    let mut weights: Vec<f64> = predictions.iter().map(|p| p.norm()).collect();
    let mut slots = Vec::with_capacity(r);
    for _ in 0..r {
        let n = match WeightedIndex::new(&weights) {
            Ok(dist) => dist.sample(rng),
            // all remaining mass is zero
            Err(_) => {
                let free: Vec<usize> = (0..weights.len()).filter(|i| !slots.contains(i)).collect();
                free[rng.random_range(0..free.len())]
            }
        };
        weights[n] = 0.0;
        slots.push(n);
    }
    Ok(AccessSet { slots })
}

/// The `r` strongest predicted slots, ties to the lowest index.
pub fn policy_gscap(predictions: &[Complex64], r: usize) -> Result<AccessSet> {
    check_replicas(r, predictions.len())?;
    let mut order: Vec<usize> = (0..predictions.len()).collect();
    // stable sort keeps lower indices first among equals
    order.sort_by(|&a, &b| predictions[b].norm().total_cmp(&predictions[a].norm()));
    order.truncate(r);
    Ok(AccessSet { slots: order })
}

/// Strongest slot, plus the slot whose predicted SNR clears `γ_ac` by the
/// smallest margin, if any.
pub fn policy_smap(predictions: &[Complex64], snr_ul: f64, gamma_ac: f64) -> Result<AccessSet> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    let snr: Vec<f64> = predictions.iter().map(|p| snr_ul * p.norm_sqr()).collect();
    let mut n1 = 0;
    for (n, &s) in snr.iter().enumerate() {
        if s > snr[n1] {
            n1 = n;
        }
    }
    let mut n2: Option<usize> = None;
    for (n, &s) in snr.iter().enumerate() {
        if n == n1 || s < gamma_ac {
            continue;
        }
        if n2.is_none_or(|m| s - gamma_ac < snr[m] - gamma_ac) {
            n2 = Some(n);
        }
    }
    let mut slots = vec![n1];
    slots.extend(n2);
    Ok(AccessSet { slots })
}

/// Uniform `r`-subset of the slots.
pub fn policy_rrs_aloha<R: Rng + ?Sized>(rng: &mut R, n_ac: usize, r: usize) -> Result<AccessSet> {
    check_replicas(r, n_ac)?;
    Ok(AccessSet {
        slots: rand::seq::index::sample(rng, n_ac, r).into_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mags(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(0.0, x)).collect()
    }

    #[test]
    fn gscap_ties_and_nesting() {
        let p = mags(&[0.1, 0.9, 0.4, 0.9]);
        assert_eq!(policy_gscap(&p, 2).unwrap().slots, vec![1, 3]);
        assert_eq!(policy_gscap(&p, 1).unwrap().slots, vec![1]);
        let s3 = policy_gscap(&p, 3).unwrap().slots;
        assert_eq!(&s3[..2], &[1, 3]);
        assert!(policy_gscap(&p, 5).is_err());
    }

    #[test]
    fn smap_rules() {
        // SNR · |ζ|² = (10, 4, 3.5, 2)
        let p: Vec<Complex64> = [10.0f64, 4.0, 3.5, 2.0]
            .iter()
            .map(|v| Complex64::new(v.sqrt(), 0.0))
            .collect();
        assert_eq!(policy_smap(&p, 1.0, 3.0).unwrap().slots, vec![0, 2]);
        assert_eq!(policy_smap(&p, 1.0, 5.0).unwrap().slots, vec![0]);
    }

    #[test]
    fn carap_full_and_dominant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = mags(&[1.0, 2.0, 3.0]);
        let mut s = policy_carap(&mut rng, &p, 3).unwrap().slots;
        s.sort();
        assert_eq!(s, vec![0, 1, 2]);
        let p = mags(&[1.0, 1000.0, 1.0, 1.0]);
        let first = (0..10_000)
            .filter(|_| policy_carap(&mut rng, &p, 1).unwrap().slots[0] == 1)
            .count();
        assert!(first > 9_900);
        let z = mags(&[0.0, 0.0, 0.0]);
        let s = policy_carap(&mut rng, &z, 2).unwrap().slots;
        assert_eq!(s.len(), 2);
        assert_ne!(s[0], s[1]);
    }

    #[test]
    fn rrs_full_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = policy_rrs_aloha(&mut rng, 5, 5).unwrap().slots;
        s.sort();
        assert_eq!(s, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn names_roundtrip() {
        for p in Policy::ALL {
            assert_eq!(p.name().parse::<Policy>().unwrap(), p);
        }
        assert!("aloha".parse::<Policy>().is_err());
    }
}
