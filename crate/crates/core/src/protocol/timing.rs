use serde::{Deserialize, Serialize};

use crate::ack::AckMode;

/// Slot counts and per-slot symbols of the three phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub c_tr: usize,
    pub c_ac: usize,
    pub c_ack: usize,
    pub l_tr: usize,
    pub l_ac: usize,
    pub l_ack: usize,
}

/// Durations in channel uses: `T_i = C_i L_i + ξ_i C_i T_sw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTiming {
    pub counts: PhaseCounts,
    pub t_sw: f64,
    pub xi_tr: f64,
    pub xi_ac: f64,
    pub xi_ack: f64,
    pub t_tr: f64,
    pub t_ac: f64,
    pub t_ack: f64,
    pub total: f64,
}

impl FrameTiming {
    /// Number of surface reconfigurations per phase.
    pub fn switches(&self) -> (f64, f64, f64) {
        let c = &self.counts;
        (
            self.xi_tr * c.c_tr as f64,
            self.xi_ac * c.c_ac as f64,
            self.xi_ack * c.c_ack as f64,
        )
    }
}

pub fn frame_timing(counts: PhaseCounts, t_sw: f64, ack_mode: AckMode) -> FrameTiming {
    let xi_ack = match ack_mode {
        // one reconfiguration for the whole ACK phase
        AckMode::Precoding if counts.c_ack > 0 => 1.0 / counts.c_ack as f64,
        AckMode::Precoding => 0.0,
        AckMode::Tdma => 1.0,
        AckMode::None => 0.0,
    };
    let c_ack = if ack_mode == AckMode::None {
        0
    } else {
        counts.c_ack
    };
    let counts = PhaseCounts { c_ack, ..counts };
    let phase = |c: usize, l: usize, xi: f64| (c * l) as f64 + xi * c as f64 * t_sw;
    let t_tr = phase(counts.c_tr, counts.l_tr, 1.0);
    let t_ac = phase(counts.c_ac, counts.l_ac, 1.0);
    let t_ack = phase(counts.c_ack, counts.l_ack, xi_ack);
    FrameTiming {
        counts,
        t_sw,
        xi_tr: 1.0,
        xi_ac: 1.0,
        xi_ack,
        t_tr,
        t_ac,
        t_ack,
        total: t_tr + t_ac + t_ack,
    }
}
