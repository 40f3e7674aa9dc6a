use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest number of samples accepted on any grid.
pub const MIN_GRID_COUNT: usize = 16;

/// Smallest coverage, in multiples of the rms width, accepted by
/// [`make_frequency_grid`].
pub const MIN_COVERAGE: f64 = 6.0;

/// Default one-sided coverage of 1D grids, in multiples of σ.
pub const DEFAULT_COVERAGE: f64 = 8.0;

/// Default number of samples of 1D grids.
pub const DEFAULT_GRID_COUNT: usize = 4096;

/// Uniform angular-frequency sampling.
///
/// Sample `k` sits at `center + (k - count/2) * spacing`, so the centre is
/// always sampled exactly and the grid has one more point below the centre
/// than above it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    center: f64,
    spacing: f64,
    count: usize,
    coverage: Option<f64>,
}

impl FrequencyGrid {
    pub fn new(center: f64, spacing: f64, count: usize) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidParameter(format!("grid center {center} is not finite")));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        if count < MIN_GRID_COUNT {
            return Err(Error::InvalidParameter(format!(
                "grid count must be at least {MIN_GRID_COUNT}, got {count}"
            )));
        }
        Ok(Self {
            center,
            spacing,
            count,
            coverage: None,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// One-sided coverage in units of σ, when the grid was built from a
    /// bandwidth.
    pub fn coverage(&self) -> Option<f64> {
        self.coverage
    }

    /// Index of the sample sitting exactly on the centre.
    pub fn center_index(&self) -> usize {
        self.count / 2
    }

    pub fn frequency(&self, index: usize) -> f64 {
        self.center + (index as f64 - (self.count / 2) as f64) * self.spacing
    }

    pub fn frequencies(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.frequency(k))
    }

    pub fn lower(&self) -> f64 {
        self.frequency(0)
    }

    pub fn upper(&self) -> f64 {
        self.frequency(self.count - 1)
    }

    /// Distance between the first and last sample.
    pub fn span(&self) -> f64 {
        (self.count - 1) as f64 * self.spacing
    }

    /// Step of the conjugate time grid, 2π / (spacing · count).
    pub fn time_step(&self) -> f64 {
        2.0 * PI / (self.spacing * self.count as f64)
    }

    /// Conjugate time samples, centred on zero with the same index layout.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.time_step();
        let half = (self.count / 2) as f64;
        (0..self.count).map(|m| (m as f64 - half) * dt).collect()
    }

    /// The same grid translated by `offset` rad/fs.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            center: self.center + offset,
            ..*self
        }
    }

    /// Twice as many samples over the same span.
    pub fn refined(&self) -> Self {
        let count = 2 * self.count;
        Self {
            center: self.center,
            spacing: self.span() / (count - 1) as f64,
            count,
            coverage: self.coverage,
        }
    }

    /// Checks that `[center - half_width, center + half_width]` lies inside
    /// the grid, allowing one sample of slack for the asymmetric layout.
    pub fn ensure_covers(&self, center: f64, half_width: f64) -> Result<()> {
        let slack = self.spacing * (1.0 + 1e-9);
        let (lo, hi) = (center - half_width, center + half_width);
        if lo < self.lower() - slack || hi > self.upper() + slack {
            return Err(Error::Coverage {
                lower: self.lower(),
                upper: self.upper(),
                required_lower: lo,
                required_upper: hi,
            });
        }
        Ok(())
    }

    /// True when both grids sample with the same spacing and count. Centres
    /// may differ.
    pub fn is_compatible(&self, other: &Self) -> bool {
        self.count == other.count
            && ((self.spacing - other.spacing).abs() <= 1e-12 * self.spacing.max(other.spacing))
    }
}

/// Builds a grid spanning `center ± coverage·sigma` with `count` samples.
pub fn make_frequency_grid(
    center: f64,
    sigma: f64,
    coverage: f64,
    count: usize,
) -> Result<FrequencyGrid> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !(coverage >= MIN_COVERAGE && coverage.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "coverage must be at least {MIN_COVERAGE} sigma, got {coverage}"
        )));
    }
    if count < MIN_GRID_COUNT {
        return Err(Error::InvalidParameter(format!(
            "grid count must be at least {MIN_GRID_COUNT}, got {count}"
        )));
    }
    let spacing = 2.0 * coverage * sigma / (count - 1) as f64;
    let mut grid = FrequencyGrid::new(center, spacing, count)?;
    grid.coverage = Some(coverage);
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laser_grid_spans_requested_band() {
        let grid = make_frequency_grid(2.334, 0.1191, 8.0, 1024).unwrap();
        assert!((grid.span() / 2.0 - 0.9528).abs() < 1e-12);
        assert_eq!(grid.coverage(), Some(8.0));
        assert_eq!(grid.frequency(grid.center_index()), 2.334);
        assert!(grid.lower() <= 2.334 - 0.9528);
    }

    #[test]
    fn minimal_grid_spacing() {
        let sigma = 0.05;
        let grid = make_frequency_grid(1.0, sigma, 6.0, 16).unwrap();
        assert!((grid.spacing() - 12.0 * sigma / 15.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            make_frequency_grid(1.0, 0.0, 8.0, 64),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_frequency_grid(1.0, -0.1, 8.0, 64),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_frequency_grid(1.0, 0.1, 8.0, 15),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_frequency_grid(1.0, 0.1, 5.0, 64),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn refinement_keeps_span() {
        let grid = make_frequency_grid(2.0, 0.1, 8.0, 256).unwrap();
        let fine = grid.refined();
        assert_eq!(fine.count(), 512);
        assert!((fine.span() - grid.span()).abs() < 1e-12);
        assert_eq!(fine.frequency(fine.center_index()), 2.0);
    }

    #[test]
    fn time_grid_is_conjugate() {
        let grid = make_frequency_grid(2.0, 0.1, 8.0, 256).unwrap();
        let times = grid.times();
        assert_eq!(times.len(), 256);
        assert_eq!(times[128], 0.0);
        assert!((times[1] - times[0] - grid.time_step()).abs() < 1e-9);
    }
}
