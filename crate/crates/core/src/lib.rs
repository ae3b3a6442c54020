//! Power-based respiration monitoring for FMCW radar.
//!
//! The processing chain follows the range profile of each chirp through
//! CA-CFAR peak detection, per-peak tracking, masked inverse-FFT amplitude
//! reconstruction, impulse thresholding and envelope detection, ending in a
//! respiration presence decision and rate estimate:
//!
//! ```text
//! chirp ── window ── range FFT ── CA-CFAR ── track ── masked IFFT ──┐
//!                        │                                           │
//!                    waterfall              impulses ── envelope ── presence / rate
//! ```
//!
//! A physics-based scene simulator ([`sim`]) produces complex baseband
//! chirps for a breathing target (static torso plus moving chest wall)
//! and static clutter, and serves as ground truth for every stage.

pub mod cfar;
pub mod cli;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod radar;
pub mod range;
pub mod sim;

pub use error::{Error, Result};
pub use radar::{ModulePreset, RadarConfig, SPEED_OF_LIGHT};
