//! Intervention pairs and action-space discretization.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// One year's intervention: ITN coverage and IRS coverage, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    itn: f64,
    irs: f64,
}

impl Action {
    /// Strict constructor; rejects coordinates outside `[0, 1]` and NaN.
    pub fn new(itn: f64, irs: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&itn) || !(0.0..=1.0).contains(&irs) {
            return Err(Error::invalid(format!(
                "action ({itn}, {irs}) outside [0,1]^2"
            )));
        }
        Ok(Self { itn, irs })
    }

    /// Clamping constructor. NaN coordinates map to 0.
    pub fn clamped(itn: f64, irs: f64) -> Self {
        Self {
            itn: clamp_unit(itn),
            irs: clamp_unit(irs),
        }
    }

    pub fn uniform(rng: &mut SeededRng) -> Self {
        Self {
            itn: rng.unit(),
            irs: rng.unit(),
        }
    }

    pub fn itn(self) -> f64 {
        self.itn
    }

    pub fn irs(self) -> f64 {
        self.irs
    }

    pub fn coords(self) -> [f64; 2] {
        [self.itn, self.irs]
    }

    pub fn squared_distance(self, other: Action) -> f64 {
        let dx = self.itn - other.itn;
        let dy = self.irs - other.irs;
        dx * dx + dy * dy
    }

    /// Rounds both coordinates to a lattice of spacing `step`, removing
    /// accumulated float error such as `0.30000000000000004`.
    pub fn snapped(self, step: f64) -> Self {
        Self::clamped(snap(self.itn, step), snap(self.irs, step))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.itn, self.irs)
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.itn, self.irs].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [itn, irs] = <[f64; 2]>::deserialize(d)?;
        Action::new(itn, irs).map_err(D::Error::custom)
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

pub(crate) fn snap(x: f64, step: f64) -> f64 {
    let k = (x / step).round();
    clean(k * step)
}

/// Drops float noise below 1e-9.
pub(crate) fn clean(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Clamps an arbitrary pair into the unit square.
pub fn clamp_action(itn: f64, irs: f64) -> Action {
    Action::clamped(itn, irs)
}

/// Per-axis coordinates of the discretized grid at `resolution`.
///
/// `0.1` yields `{0.0, .., 0.9}` (ten one-decimal values, 1.0 excluded),
/// `0.3` yields `{0.0, 0.3, 0.6, 0.9}`, and any other `r` yields every
/// `k * r <= 1`.
pub fn grid_axis(resolution: f64) -> Result<Vec<f64>> {
    if !(resolution > 0.0) || resolution > 1.0 {
        return Err(Error::invalid(format!(
            "resolution must be in (0, 1], got {resolution}"
        )));
    }
    if (resolution - 0.1).abs() < 1e-12 {
        return Ok((0..10).map(|k| clean(k as f64 * 0.1)).collect());
    }
    if (resolution - 0.3).abs() < 1e-12 {
        return Ok(vec![0.0, 0.3, 0.6, 0.9]);
    }
    let mut axis = Vec::new();
    let mut k = 0usize;
    loop {
        let v = clean(k as f64 * resolution);
        if v > 1.0 + 1e-9 {
            break;
        }
        axis.push(v.min(1.0));
        k += 1;
    }
    Ok(axis)
}

/// Cartesian grid over the unit square, row-major (ITN outer, IRS inner).
pub fn discretize_action_space(resolution: f64) -> Result<Vec<Action>> {
    let axis = grid_axis(resolution)?;
    Ok(axis
        .iter()
        .flat_map(|&itn| axis.iter().map(move |&irs| Action { itn, irs }))
        .collect())
}
