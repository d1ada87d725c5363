//! Ordered sets of reflecting angles shared by the training, access and ACK phases.

use std::io::Write;

use crate::channel::{config_for_angle, Configuration, Direction, RadioConstants, RisGeometry};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookKind {
    Training,
    Access,
    Ack,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub kind: CodebookKind,
    pub angles: Vec<f64>,
    pub configurations: Vec<Configuration>,
}

impl Codebook {
    /// Realize every angle as a configuration steering from `theta_a`.
    pub fn from_angles(
        kind: CodebookKind,
        geom: &RisGeometry,
        radio: &RadioConstants,
        theta_a: f64,
        angles: Vec<f64>,
        direction: Direction,
    ) -> Result<Self> {
        let configurations = angles
            .iter()
            .map(|&t| config_for_angle(geom, radio, theta_a, t, direction))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind,
            angles,
            configurations,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// CSV with columns `n,theta_rad,phase_0..phase_{Mx-1}`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let m_x = self
            .configurations
            .first()
            .map_or(0, |c| c.phase_shifts.len());
        let mut header = vec!["n".to_string(), "theta_rad".to_string()];
        header.extend((0..m_x).map(|m| format!("phase_{m}")));
        w.write_record(&header)?;
        for (n, (theta, cfg)) in self.angles.iter().zip(&self.configurations).enumerate() {
            let mut rec = vec![n.to_string(), format!("{theta:.12}")];
            rec.extend(cfg.phase_shifts.iter().map(|p| format!("{p:.12}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
