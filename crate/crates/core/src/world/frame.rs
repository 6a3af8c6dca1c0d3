//! NED <-> ENU conversion.
//!
//! The simulator works in ENU with yaw measured counter-clockwise from +x
//! (East). Flight stacks report NED poses with yaw measured clockwise from
//! North. These two functions are the only place the NED convention appears.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{normalize_yaw, VehicleState};

/// Pose in the North-East-Down frame; `yaw` is degrees, clockwise-positive from North.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NedPose {
    pub north: f64,
    pub east: f64,
    pub down: f64,
    pub yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("pose component `{0}` is not finite")]
    NonFinite(&'static str),
}

fn finite(value: f64, name: &'static str) -> Result<f64, FrameError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FrameError::NonFinite(name))
    }
}

pub fn ned_to_enu(pose: NedPose) -> Result<VehicleState, FrameError> {
    let north = finite(pose.north, "north")?;
    let east = finite(pose.east, "east")?;
    let down = finite(pose.down, "down")?;
    let yaw = finite(pose.yaw, "yaw")?;
    Ok(VehicleState {
        x: east,
        y: north,
        // 0.0 - v rather than -v so a zero altitude stays +0.0
        z: 0.0 - down,
        yaw: normalize_yaw(90.0 - yaw),
    })
}

pub fn enu_to_ned(state: VehicleState) -> Result<NedPose, FrameError> {
    let x = finite(state.x, "x")?;
    let y = finite(state.y, "y")?;
    let z = finite(state.z, "z")?;
    let yaw = finite(state.yaw, "yaw")?;
    Ok(NedPose {
        north: y,
        east: x,
        down: 0.0 - z,
        yaw: normalize_yaw(90.0 - yaw),
    })
}
