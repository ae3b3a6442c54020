use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cfar::CfarConfig;
use crate::error::{Error, Result};
use crate::pipeline::{PipelineConfig, QueuePolicy, StreamProcessor};
use crate::radar::{ModulePreset, RadarConfig};
use crate::range::RangeConfig;
use crate::sim::Scene;

/// Names a config file to load when none is given explicitly.
pub const CONFIG_ENV_VAR: &str = "FMCW_RESP_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IoPaths {
    pub recording: Option<PathBuf>,
    pub scene: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QueueConfig {
    pub capacity: usize,
    pub policy: QueuePolicy,
}

impl Default for QueueConfig {
    fn default() -> Self {
        Self {
            capacity: 256,
            policy: QueuePolicy::Block,
        }
    }
}

/// Everything a run needs. Every field has a default, so an empty file is
/// a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub preset: ModulePreset,
    /// Replaces the preset's parameters when present.
    pub radar: Option<RadarConfig>,
    pub range: RangeConfig,
    pub cfar: CfarConfig,
    pub pipeline: PipelineConfig,
    pub io: IoPaths,
    pub queue: QueueConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: ModulePreset::Radar120G,
            radar: None,
            range: RangeConfig::default(),
            cfar: CfarConfig::default(),
            pipeline: PipelineConfig::default(),
            io: IoPaths::default(),
            queue: QueueConfig::default(),
        }
    }
}

fn parse_error(what: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format {
        what: what.display().to_string(),
        detail: e.to_string(),
    }
}

impl RunConfig {
    pub fn for_preset(preset: ModulePreset) -> Self {
        Self {
            preset,
            ..Default::default()
        }
    }

    pub fn radar_config(&self) -> RadarConfig {
        self.radar.unwrap_or_else(|| self.preset.config())
    }

    pub fn validate(&self) -> Result<()> {
        let radar = self.radar_config();
        radar.validate()?;
        self.cfar.validate()?;
        self.pipeline.validate()?;
        if self.queue.capacity == 0 {
            return Err(Error::config("queue capacity must be positive"));
        }
        // builds the FFT plan and checks fft_len against the CFAR window
        self.processor().map(|_| ())
    }

    pub fn processor(&self) -> Result<StreamProcessor> {
        StreamProcessor::new(self.radar_config(), self.range, self.cfar, self.pipeline.clone())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| parse_error(Path::new("run config"), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| parse_error(Path::new("run config"), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = toml::from_str(&text).map_err(|e| parse_error(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `path` if given, else the file named by [`CONFIG_ENV_VAR`], else defaults.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV_VAR) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }
}

impl Scene {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| parse_error(path, e))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| parse_error(Path::new("scene"), e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn partial_override() {
        let cfg = RunConfig::from_toml_str(
            "preset = \"RADAR_94G\"\n[cfar]\npfa = 1e-4\n[pipeline]\ngate_bins = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.radar_config(), ModulePreset::Radar94G.config());
        assert_eq!(cfg.cfar.pfa, 1e-4);
        assert_eq!(cfg.cfar.train_cells, 8);
        assert_eq!(cfg.pipeline.gate_bins, 2);
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::for_preset(ModulePreset::Radar94G);
        cfg.radar = Some(ModulePreset::Radar94G.config());
        cfg.queue.policy = QueuePolicy::DropOldest;
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(RunConfig::from_toml_str("preset = \"RADAR_60G\"").is_err());
        assert!(RunConfig::from_toml_str("[pipeline]\nresp_band_hz = [0.7, 0.1]").is_err());
        assert!(RunConfig::from_toml_str("[range]\nfft_len = 100").is_err());
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn scene_round_trip() {
        let s = Scene::default();
        let back: Scene = toml::from_str(&s.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
