use junction_core::model::SystemSpec;
use junction_core::scattering::{solve_stationary, ScatteringResult};
use junction_core::Error;
use rayon::prelude::*;

use crate::error::Result;

/// Stationary scattering over `grid`, solved in parallel. Output order
/// follows `grid`.
pub fn spectrum(system: &SystemSpec, omega: f64, grid: &[f64]) -> Result<Vec<ScatteringResult>> {
    let rows = grid
        .par_iter()
        .map(|&e| {
            solve_stationary(e, system, omega).map_err(|source| Error::AtEnergy {
                energy: e,
                source: Box::new(source),
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(rows)
}
