//! Three-term Sellmeier media and the quadratic dispersion coefficient they
//! impart over a finite path.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, SPEED_OF_LIGHT_NM_PER_FS};

const BK7_DATA: &str = include_str!("../../data/bk7_sellmeier.txt");

/// Speed of light in µm/fs.
const C_UM_PER_FS: f64 = SPEED_OF_LIGHT_NM_PER_FS * 1e-3;

/// Angular-frequency step used by the finite-difference cross-check.
pub const DEFAULT_DIFFERENCE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierCoefficients {
    /// `(B_i, C_i)` with `C_i` in µm².
    pub terms: [(f64, f64); 3],
    /// Validity band in µm.
    pub band_um: (f64, f64),
}

impl SellmeierCoefficients {
    /// Parses the first data row of a coefficient file. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let row = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or_else(|| Error::DataFile("no coefficient row".into()))?;
        let values = row
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::DataFile(format!("bad value {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let [b1, b2, b3, c1, c2, c3, lo, hi] = values[..] else {
            return Err(Error::DataFile(format!(
                "expected 8 columns, found {}",
                values.len()
            )));
        };
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::DataFile(format!("invalid validity band {lo}..{hi} µm")));
        }
        Ok(Self {
            terms: [(b1, c1), (b2, c2), (b3, c3)],
            band_um: (lo, hi),
        })
    }

    /// Schott N-BK7, from the bundled data file.
    pub fn bk7() -> Self {
        Self::parse(BK7_DATA).expect("bundled BK7 coefficients parse")
    }
}

/// A dispersive path of given length through a Sellmeier medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierMedium {
    coefficients: SellmeierCoefficients,
    length_mm: f64,
}

impl SellmeierMedium {
    pub fn new(coefficients: SellmeierCoefficients, length_mm: f64) -> Result<Self> {
        if !(length_mm >= 0.0 && length_mm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "path length must be non-negative, got {length_mm} mm"
            )));
        }
        Ok(Self {
            coefficients,
            length_mm,
        })
    }

    pub fn bk7(length_mm: f64) -> Result<Self> {
        Self::new(SellmeierCoefficients::bk7(), length_mm)
    }

    pub fn length_mm(&self) -> f64 {
        self.length_mm
    }

    fn check_band(&self, wavelength_nm: f64) -> Result<f64> {
        let um = wavelength_nm * 1e-3;
        let (lo, hi) = self.coefficients.band_um;
        if !(um >= lo && um <= hi) {
            return Err(Error::Domain(format!(
                "wavelength {wavelength_nm} nm outside the Sellmeier band {lo}–{hi} µm"
            )));
        }
        Ok(um)
    }

    /// n² as a function of u = λ² (µm²), with its first two u-derivatives.
    fn n_squared(&self, u: f64) -> (f64, f64, f64) {
        self.coefficients
            .terms
            .iter()
            .fold((1.0, 0.0, 0.0), |(f, df, d2f), &(b, c)| {
                let q = u - c;
                (
                    f + b * u / q,
                    df - b * c / (q * q),
                    d2f + 2.0 * b * c / (q * q * q),
                )
            })
    }

    pub fn refractive_index(&self, wavelength_nm: f64) -> Result<f64> {
        let um = self.check_band(wavelength_nm)?;
        let n2 = self.n_squared(um * um).0;
        if !(n2 > 1.0) {
            return Err(Error::Domain(format!(
                "refractive index not real and above 1 at {wavelength_nm} nm"
            )));
        }
        Ok(n2.sqrt())
    }

    /// d²k/dω² in fs²/mm from the analytic derivatives of the Sellmeier form,
    /// via k″ = λ³/(2πc²) · d²n/dλ².
    pub fn group_velocity_dispersion(&self, wavelength_nm: f64) -> Result<f64> {
        let lambda = self.check_band(wavelength_nm)?;
        let u = lambda * lambda;
        let (n2, f1, f2) = self.n_squared(u);
        let n = n2.sqrt();
        // n(λ) = sqrt(F(λ²)); differentiate twice in λ
        let dn = lambda * f1 / n;
        let d2n = (f1 + 2.0 * u * f2) / n - lambda * f1 * dn / n2;
        let per_um = lambda.powi(3) / (2.0 * PI * C_UM_PER_FS * C_UM_PER_FS) * d2n;
        Ok(per_um * 1e3)
    }

    /// Same quantity by central differences of k(ω) = n(ω)·ω/c.
    pub fn group_velocity_dispersion_numeric(&self, wavelength_nm: f64, step: f64) -> Result<f64> {
        self.check_band(wavelength_nm)?;
        let omega = 2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS / wavelength_nm;
        let k = |w: f64| -> Result<f64> {
            let lambda_nm = 2.0 * PI * SPEED_OF_LIGHT_NM_PER_FS / w;
            // rad per mm: ω / c with c in mm/fs
            Ok(self.refractive_index(lambda_nm)? * w / (SPEED_OF_LIGHT_NM_PER_FS * 1e-6))
        };
        Ok((k(omega + step)? - 2.0 * k(omega)? + k(omega - step)?) / (step * step))
    }

    /// β = ½ (d²k/dω²) L in fs².
    pub fn beta(&self, wavelength_nm: f64) -> Result<f64> {
        Ok(0.5 * self.group_velocity_dispersion(wavelength_nm)? * self.length_mm)
    }
}

/// Quadratic dispersion coefficient (fs²) of `length_mm` of BK7 at
/// `wavelength_nm`.
pub fn bk7_beta(length_mm: f64, wavelength_nm: f64) -> Result<f64> {
    SellmeierMedium::bk7(length_mm)?.beta(wavelength_nm)
}
