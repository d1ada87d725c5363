//! Uplink slot signals and the peeling SIC decoder.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::access::policy::AccessSet;
use crate::error::{Error, Result};
use crate::training::complex_noise;

#[derive(Debug, Clone, PartialEq)]
pub struct SlotReception {
    pub signals: Vec<Vec<Complex64>>,
    /// UE ids transmitting in each slot, ascending.
    pub contenders: Vec<Vec<usize>>,
}

/// Map per-UE access sets onto per-slot contender lists.
pub fn contender_map(sets: &[AccessSet], n_ac: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new(); n_ac];
    for (k, set) in sets.iter().enumerate() {
        for &n in &set.slots {
            if n >= n_ac {
                return Err(Error::invalid("slot", format!("{n} outside {n_ac} slots")));
            }
            out[n].push(k);
        }
    }
    Ok(out)
}

/// `v[n] = Σ_{k ∈ K_n} √ρ_k ζ_k[n] ν_k + η` with all-ones packets.
///
/// `ul[k][n]` is UE `k`'s true uplink response under slot `n`.
pub fn simulate_access<R: Rng + ?Sized>(
    rng: &mut R,
    ul: &[Vec<Complex64>],
    sets: &[AccessSet],
    rho: &[f64],
    sigma2: f64,
    l_ac: usize,
) -> Result<SlotReception> {
    if ul.len() != sets.len() || rho.len() != sets.len() {
        return Err(Error::LengthMismatch {
            expected: sets.len(),
            got: ul.len().min(rho.len()),
        });
    }
    let n_ac = ul.first().map_or(0, Vec::len);
    let contenders = contender_map(sets, n_ac)?;
    let signals = contenders
        .iter()
        .enumerate()
        .map(|(n, ks)| {
            let clean: Complex64 = ks.iter().map(|&k| rho[k].sqrt() * ul[k][n]).sum();
            (0..l_ac)
                .map(|_| {
                    if sigma2 > 0.0 {
                        clean + complex_noise(rng, sigma2)
                    } else {
                        clean
                    }
                })
                .collect()
        })
        .collect();
    Ok(SlotReception {
        signals,
        contenders,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecodeResult {
    /// Decoded UE ids, ascending.
    pub decoded: Vec<usize>,
    /// Slots where a decode happened, ascending.
    pub decode_slots: Vec<usize>,
    /// Decoded UE → slot of its first successful decode.
    pub slot_of: BTreeMap<usize, usize>,
}

/// Singleton decoding with successive cancellation of every replica of a
/// decoded UE. `snr(k, n)` gates the decode of UE `k` alone in slot `n`.
pub fn decode_access(
    contenders: &[Vec<usize>],
    snr: impl Fn(usize, usize) -> f64,
    gamma_ac: f64,
) -> DecodeResult {
    let mut remaining: Vec<Vec<usize>> = contenders.to_vec();
    let mut slot_of = BTreeMap::new();
    loop {
        let mut progress = false;
        for n in 0..remaining.len() {
            if let [k] = remaining[n][..] {
                if snr(k, n) >= gamma_ac {
                    slot_of.insert(k, n);
                    // the packet header reveals every replica of k
                    for slot in remaining.iter_mut() {
                        slot.retain(|&u| u != k);
                    }
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }
    let decoded = slot_of.keys().copied().collect();
    let mut decode_slots: Vec<usize> = slot_of.values().copied().collect();
    decode_slots.sort_unstable();
    decode_slots.dedup();
    DecodeResult {
        decoded,
        decode_slots,
        slot_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_traced_chain() {
        // A = 0 in {0}, B = 1 in {0, 1}
        let c = vec![vec![0, 1], vec![1]];
        let d = decode_access(&c, |_, _| 10.0, 2.0);
        assert_eq!(d.decoded, vec![0, 1]);
        assert_eq!(d.slot_of[&1], 1);
        assert_eq!(d.slot_of[&0], 0);
        assert_eq!(d.decode_slots, vec![0, 1]);
    }

    #[test]
    fn pure_collision_and_threshold() {
        let c = vec![vec![0, 1, 2]];
        assert!(decode_access(&c, |_, _| 10.0, 2.0).decoded.is_empty());
        let c = vec![vec![0]];
        assert_eq!(decode_access(&c, |_, _| 2.0, 2.0).decoded, vec![0]);
        assert!(decode_access(&c, |_, _| 1.9, 2.0).decoded.is_empty());
    }

    #[test]
    fn superposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let z1 = Complex64::new(1.0, 2.0);
        let z2 = Complex64::new(-0.5, 0.1);
        let ul = vec![
            vec![z1, Complex64::new(0.0, 0.0)],
            vec![z2, Complex64::new(0.0, 0.0)],
        ];
        let sets = vec![AccessSet { slots: vec![0] }, AccessSet { slots: vec![0] }];
        let rx = simulate_access(&mut rng, &ul, &sets, &[4.0, 4.0], 0.0, 3).unwrap();
        for v in &rx.signals[0] {
            assert!((v - (z1 + z2) * 2.0).norm() < 1e-12);
        }
        assert!(rx.signals[1].iter().all(|v| v.norm() == 0.0));
        assert_eq!(rx.contenders, vec![vec![0, 1], vec![]]);
    }

    #[test]
    fn empty_slot_noise_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ul = vec![vec![Complex64::new(0.0, 0.0); 1]];
        let sets = vec![AccessSet::default()];
        let rx = simulate_access(&mut rng, &ul, &sets, &[1.0], 0.25, 100_000).unwrap();
        let p = rx.signals[0].iter().map(|v| v.norm_sqr()).sum::<f64>() / 100_000.0;
        assert!((p - 0.25).abs() < 0.01);
    }
}
