//! Bulk refractive indices of congruent lithium niobate and the titanium
//! indiffusion surface index increment.
//!
//! Wavelengths are in nanometres throughout the public API; the Sellmeier
//! expressions themselves are written in micrometres, which is how the
//! published coefficient sets are tabulated.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    #[serde(alias = "o")]
    Ordinary,
    #[serde(alias = "e")]
    Extraordinary,
}

impl Polarization {
    pub fn symbol(self) -> char {
        match self {
            Polarization::Ordinary => 'o',
            Polarization::Extraordinary => 'e',
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::Ordinary => f.write_str("ordinary"),
            Polarization::Extraordinary => f.write_str("extraordinary"),
        }
    }
}

/// Coefficients of the temperature-dependent form
/// `n² = a1 + (a2 + b1 F)/(λ² − (a3 + b2 F)²) + b3 F − a4 λ²`,
/// with `F = (T − 24.5)(T + 570.5)` and λ in µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum SellmeierForm {
    /// `n² = 1 + Σ Aₖ λ² / (λ² − Bₖ)` with λ in µm and Bₖ in µm².
    Poles {
        extraordinary: Vec<(f64, f64)>,
        ordinary: Vec<(f64, f64)>,
    },
    Thermal {
        extraordinary: ThermalCoefficients,
        ordinary: ThermalCoefficients,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel {
    pub name: String,
    pub form: SellmeierForm,
    /// Inclusive validity interval in nm.
    pub valid_range_nm: (f64, f64),
    pub temperature_c: f64,
}

pub const DEFAULT_TEMPERATURE_C: f64 = 25.0;

impl SellmeierModel {
    /// Congruent LiNbO3, Zelmon, Small & Jundt, JOSA B 14, 3319 (1997).
    /// Measured at 21 °C; the form carries no temperature term.
    pub fn zelmon_1997() -> Self {
        SellmeierModel {
            name: "zelmon1997".into(),
            form: SellmeierForm::Poles {
                extraordinary: vec![(2.9804, 0.02047), (0.5981, 0.0666), (8.9543, 416.08)],
                ordinary: vec![(2.6734, 0.01764), (1.2290, 0.05914), (12.614, 474.6)],
            },
            valid_range_nm: (400.0, 5000.0),
            temperature_c: DEFAULT_TEMPERATURE_C,
        }
    }

    /// Congruent LiNbO3, Edwards & Lawrence, Opt. Quantum Electron. 16, 373 (1984).
    pub fn edwards_lawrence_1984(temperature_c: f64) -> Self {
        SellmeierModel {
            name: "edwards-lawrence1984".into(),
            form: SellmeierForm::Thermal {
                extraordinary: ThermalCoefficients {
                    a1: 4.5820,
                    a2: 0.099169,
                    a3: 0.21090,
                    a4: 0.021940,
                    b1: 5.2716e-8,
                    b2: -4.9143e-8,
                    b3: 2.2971e-8,
                },
                ordinary: ThermalCoefficients {
                    a1: 4.9048,
                    a2: 0.11775,
                    a3: 0.21802,
                    a4: 0.027153,
                    b1: 2.2314e-8,
                    b2: -2.9671e-8,
                    b3: 2.1429e-8,
                },
            },
            valid_range_nm: (400.0, 3100.0),
            temperature_c,
        }
    }

    /// Looks up one of the embedded coefficient sets by name.
    pub fn named(name: &str, temperature_c: f64) -> Result<Self> {
        match name {
            "zelmon1997" => Ok(SellmeierModel {
                temperature_c,
                ..Self::zelmon_1997()
            }),
            "edwards-lawrence1984" => Ok(Self::edwards_lawrence_1984(temperature_c)),
            other => Err(Error::Config(format!(
                "unknown Sellmeier set '{other}' (expected zelmon1997 or edwards-lawrence1984)"
            ))),
        }
    }

    pub fn bulk_index(&self, pol: Polarization, wavelength_nm: f64) -> Result<f64> {
        let (lo, hi) = self.valid_range_nm;
        if !(wavelength_nm >= lo && wavelength_nm <= hi) {
            return Err(Error::OutOfRange {
                wavelength_nm,
                min_nm: lo,
                max_nm: hi,
            });
        }
        let l2 = (wavelength_nm * 1e-3).powi(2);
        let n2 = match &self.form {
            SellmeierForm::Poles {
                extraordinary,
                ordinary,
            } => {
                let poles = match pol {
                    Polarization::Extraordinary => extraordinary,
                    Polarization::Ordinary => ordinary,
                };
                1.0 + poles.iter().map(|&(a, b)| a * l2 / (l2 - b)).sum::<f64>()
            }
            SellmeierForm::Thermal {
                extraordinary,
                ordinary,
            } => {
                let c = match pol {
                    Polarization::Extraordinary => extraordinary,
                    Polarization::Ordinary => ordinary,
                };
                let t = self.temperature_c;
                let f = (t - 24.5) * (t + 570.5);
                c.a1 + (c.a2 + c.b1 * f) / (l2 - (c.a3 + c.b2 * f).powi(2)) + c.b3 * f - c.a4 * l2
            }
        };
        Ok(n2.sqrt())
    }

    /// Checks the model on a 1 nm grid: indices in (1, 3) and n_e < n_o.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.valid_range_nm;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return Err(Error::Config(format!(
                "Sellmeier '{}' has an invalid range [{lo}, {hi}] nm",
                self.name
            )));
        }
        let steps = ((hi - lo).floor() as usize).max(1);
        for k in 0..=steps {
            let l = (lo + k as f64).min(hi);
            let ne = self.bulk_index(Polarization::Extraordinary, l)?;
            let no = self.bulk_index(Polarization::Ordinary, l)?;
            if !(ne > 1.0 && ne < 3.0 && no > 1.0 && no < 3.0) || !(ne < no) {
                return Err(Error::Config(format!(
                    "Sellmeier '{}' gives n_e = {ne}, n_o = {no} at {l} nm",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

impl Default for SellmeierModel {
    fn default() -> Self {
        Self::zelmon_1997()
    }
}

/// Titanium-indiffusion surface index increment, tabulated per polarization
/// as `(wavelength nm, Δn)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexIncrementTable {
    pub extraordinary: Vec<(f64, f64)>,
    pub ordinary: Vec<(f64, f64)>,
}

impl Default for IndexIncrementTable {
    fn default() -> Self {
        IndexIncrementTable {
            extraordinary: vec![
                (519.0, 0.0037),
                (775.0, 0.0030),
                (780.0, 0.0030),
                (1551.03, 0.0025),
                (1571.19, 0.0025),
            ],
            // Assumed values, chosen so that the type-II degree of entanglement falls
            // with guide size. Not measured data.
            ordinary: vec![
                (519.0, 0.0037),
                (775.0, 0.00225),
                (780.0, 0.00225),
                (1551.03, 0.0024),
                (1571.19, 0.0024),
            ],
        }
    }
}

impl IndexIncrementTable {
    pub fn entries(&self, pol: Polarization) -> &[(f64, f64)] {
        match pol {
            Polarization::Extraordinary => &self.extraordinary,
            Polarization::Ordinary => &self.ordinary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for pol in [Polarization::Extraordinary, Polarization::Ordinary] {
            let entries = self.entries(pol);
            for &(l, dn) in entries {
                if !(l.is_finite() && l > 0.0) || !(dn > 0.0 && dn < 0.01) {
                    return Err(Error::Config(format!(
                        "{pol} increment entry ({l} nm, {dn}) must have 0 < dn < 0.01"
                    )));
                }
            }
            if entries.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                return Err(Error::Config(format!(
                    "{pol} increment table must be strictly ascending in wavelength"
                )));
            }
        }
        Ok(())
    }

    /// Piecewise-linear interpolation, clamped to the end values.
    pub fn surface_increment(&self, pol: Polarization, wavelength_nm: f64) -> Result<f64> {
        let entries = self.entries(pol);
        let (first, last) = match (entries.first(), entries.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => {
                return Err(Error::Config(format!(
                    "no {pol} index increment entries configured"
                )))
            }
        };
        if wavelength_nm <= first.0 {
            return Ok(first.1);
        }
        if wavelength_nm >= last.0 {
            return Ok(last.1);
        }
        let k = entries.partition_point(|&(l, _)| l <= wavelength_nm);
        let (l0, d0) = entries[k - 1];
        if l0 == wavelength_nm {
            return Ok(d0);
        }
        let (l1, d1) = entries[k];
        let t = (wavelength_nm - l0) / (l1 - l0);
        Ok(d0 + t * (d1 - d0))
    }
}

/// Substrate plus indiffusion data.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Material {
    pub sellmeier: SellmeierModel,
    pub increments: IndexIncrementTable,
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        self.sellmeier.validate()?;
        self.increments.validate()
    }

    pub fn bulk_index(&self, pol: Polarization, wavelength_nm: f64) -> Result<f64> {
        self.sellmeier.bulk_index(pol, wavelength_nm)
    }

    pub fn surface_increment(&self, pol: Polarization, wavelength_nm: f64) -> Result<f64> {
        self.increments.surface_increment(pol, wavelength_nm)
    }
}
