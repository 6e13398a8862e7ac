//! Camera calibration JSON: `{fx, fy, cx, cy, rotation[9], translation[3]}`.

use std::path::Path;

use freqloss_core::geometry::{Intrinsics, Pose};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Row-major target-to-source rotation.
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

impl Calibration {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.into(),
            source,
        })
    }

    pub fn intrinsics(&self) -> Result<Intrinsics> {
        Ok(Intrinsics::new(self.fx, self.fy, self.cx, self.cy)?)
    }

    pub fn pose(&self) -> Result<Pose> {
        let r = &self.rotation;
        Ok(Pose::new(
            [[r[0], r[1], r[2]], [r[3], r[4], r[5]], [r[6], r[7], r[8]]],
            self.translation,
        )?)
    }
}
