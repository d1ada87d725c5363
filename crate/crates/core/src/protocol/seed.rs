//! Per-trial random streams.
//!
//! Trial `t` of master seed `s` seeds a ChaCha8 generator with
//! `splitmix64(s ^ splitmix64(t))` and selects one ChaCha stream per frame
//! stage. Streams depend only on `(s, t, stage)`, so results do not depend on
//! how trials are spread across threads, and every policy, ACK mode and
//! switching time sees the same UEs and noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Load = 0,
    Training = 1,
    Policy = 2,
    Ack = 3,
    AccessNoise = 4,
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn trial_rng(master: u64, trial: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(master ^ splitmix64(trial)));
    rng.set_stream(stream as u64);
    rng
}
