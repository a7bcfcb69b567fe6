use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::env::{scan_axis, EnvConfig, EnvironmentModel, SyntheticEnv};
use crate::error::{Error, Result};
use crate::policy::HORIZON;

/// Divisor applied by [`Landscape::for_display`].
pub const DISPLAY_SCALE: f64 = 100.0;

/// Rewards of one year over an `n x n` grid of the unit square.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub year: usize,
    pub n: usize,
    /// `(itn, irs, reward)`, ITN-major.
    pub cells: Vec<(f64, f64, f64)>,
}

impl Landscape {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max(&self) -> (f64, f64, f64) {
        self.cells
            .iter()
            .copied()
            .fold((0.0, 0.0, f64::NEG_INFINITY), |b, c| if c.2 > b.2 { c } else { b })
    }

    pub fn mean(&self) -> f64 {
        self.cells.iter().map(|c| c.2).sum::<f64>() / self.cells.len() as f64
    }

    /// The cell closest to `(itn, irs)`.
    pub fn nearest(&self, itn: f64, irs: f64) -> (f64, f64, f64) {
        let d = |c: &(f64, f64, f64)| (c.0 - itn).powi(2) + (c.1 - irs).powi(2);
        *self
            .cells
            .iter()
            .min_by(|a, b| d(a).total_cmp(&d(b)))
            .expect("landscape is never empty")
    }

    /// Rewards divided by [`DISPLAY_SCALE`].
    pub fn for_display(&self) -> Self {
        Self {
            cells: self
                .cells
                .iter()
                .map(|&(x, y, r)| (x, y, r / DISPLAY_SCALE))
                .collect(),
            ..self.clone()
        }
    }
}

/// Scans `year` on an unmetered copy of the environment. Earlier years play
/// `context` (default `(0.5, 0.5)` every year) before each grid cell.
pub fn landscape_scan(
    config: &EnvConfig,
    year: usize,
    grid_n: usize,
    context: Option<&[Action]>,
) -> Result<Landscape> {
    if !(1..=HORIZON).contains(&year) {
        return Err(Error::invalid(format!("year {year} outside 1..={HORIZON}")));
    }
    if grid_n < 2 {
        return Err(Error::invalid("grid_n must be at least 2"));
    }
    let fallback = [Action::clamped(0.5, 0.5); HORIZON];
    let context = context.unwrap_or(&fallback);
    if context.len() < year - 1 {
        return Err(Error::invalid("context policy is shorter than the scanned year"));
    }
    let mut env = SyntheticEnv::new(config.clone());
    let axis = scan_axis(grid_n);
    let mut cells = Vec::with_capacity(grid_n * grid_n);
    for &x in &axis {
        for &y in &axis {
            env.reset()?;
            let mut history = Vec::with_capacity(year);
            for (i, &a) in context[..year - 1].iter().enumerate() {
                env.step(i + 1, a, &history)?;
                history.push(a);
            }
            let a = Action::clamped(x, y);
            cells.push((x, y, env.step(year, a, &history)?));
        }
    }
    Ok(Landscape {
        year,
        n: grid_n,
        cells,
    })
}
