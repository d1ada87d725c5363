//! Frame structure and the end-to-end single-frame pipeline.

mod config;
mod frame;
mod seed;
mod timing;

pub use config::{NtrMode, PowerMode, ScenarioConfig, FIGURE_NOISE_DBM, PRESETS};
pub use frame::{sample_load, FrameOutcome, Scenario};
pub use seed::{splitmix64, trial_rng, Stream};
pub use timing::{frame_timing, FrameTiming, PhaseCounts};
