//! TOML run configuration. Every section and key is optional; unknown keys
//! are rejected. Physical quantities carry their unit in the key name.
//!
//! ```toml
//! seed = 7
//!
//! [geometry]
//! tx_x_m = 0.0
//! tx_y_m = 0.0
//! rx_x_m = 3.0
//! rx_y_m = 0.0
//!
//! [channels]
//! start_hz = 2.405e9
//! spacing_hz = 5e6
//! count = 16
//! propagation_speed_m_per_s = 3e8
//!
//! [reflection]
//! gamma = 0.35
//! path_loss_exponent = 3.0
//! delta_m = 0.4
//!
//! [detector]
//! sigma_db = 0.5
//! pf = 6e-6
//! sweep_period_s = 0.032
//!
//! [io]
//! trace_path = "trace.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detector::DEFAULT_TARGET_PF;
use crate::energy::{ChannelSet, IEEE_802_15_4_CHANNELS, IEEE_802_15_4_SPACING_HZ, IEEE_802_15_4_START_HZ};
use crate::error::{Error, Result};
use crate::model::{LinkGeometry, Point, DEFAULT_PATH_LOSS_EXPONENT, DEFAULT_PROPAGATION_SPEED};
use crate::pipeline::DEFAULT_SWEEP_PERIOD_S;

/// Environment variable naming a directory searched for [`CONFIG_FILE_NAME`].
pub const CONFIG_DIR_ENV: &str = "RSS_REFLECT_CONFIG_DIR";
pub const CONFIG_FILE_NAME: &str = "rss-reflect.toml";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub geometry: GeometryConfig,
    pub channels: ChannelConfig,
    pub reflection: ReflectionConfig,
    pub detector: DetectorSection,
    pub io: IoConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub tx_x_m: f64,
    pub tx_y_m: f64,
    pub rx_x_m: f64,
    pub rx_y_m: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            tx_x_m: 0.0,
            tx_y_m: 0.0,
            rx_x_m: 3.0,
            rx_y_m: 0.0,
        }
    }
}

impl GeometryConfig {
    pub fn link(&self) -> Result<LinkGeometry> {
        LinkGeometry::new(Point::new(self.tx_x_m, self.tx_y_m), Point::new(self.rx_x_m, self.rx_y_m))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub start_hz: f64,
    pub spacing_hz: f64,
    pub count: usize,
    pub propagation_speed_m_per_s: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            start_hz: IEEE_802_15_4_START_HZ,
            spacing_hz: IEEE_802_15_4_SPACING_HZ,
            count: IEEE_802_15_4_CHANNELS,
            propagation_speed_m_per_s: DEFAULT_PROPAGATION_SPEED,
        }
    }
}

impl ChannelConfig {
    pub fn channel_set(&self) -> Result<ChannelSet> {
        ChannelSet::uniform(self.start_hz, self.spacing_hz, self.count, self.propagation_speed_m_per_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReflectionConfig {
    pub gamma: f64,
    pub path_loss_exponent: f64,
    pub delta_m: f64,
}

impl Default for ReflectionConfig {
    fn default() -> Self {
        ReflectionConfig {
            gamma: 0.35,
            path_loss_exponent: DEFAULT_PATH_LOSS_EXPONENT,
            delta_m: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub sigma_db: f64,
    pub pf: f64,
    pub sweep_period_s: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        DetectorSection {
            sigma_db: 0.5,
            pf: DEFAULT_TARGET_PF,
            sweep_period_s: DEFAULT_SWEEP_PERIOD_S,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    pub trace_path: Option<PathBuf>,
    pub baseline_path: Option<PathBuf>,
    pub calibration_path: Option<PathBuf>,
    pub taps_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// `explicit` if given, else `$RSS_REFLECT_CONFIG_DIR/rss-reflect.toml`
    /// when that file exists, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        if let Some(p) = explicit {
            return Self::load(p);
        }
        if let Some(dir) = std::env::var_os(CONFIG_DIR_ENV) {
            let p = Path::new(&dir).join(CONFIG_FILE_NAME);
            if p.is_file() {
                return Self::load(&p);
            }
        }
        Ok(Self::default())
    }
}
