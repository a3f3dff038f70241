//! Full dual-poling designs: five guided modes, both QPM periods, overlaps,
//! amplitudes, γ and bandwidths, plus geometry sweeps and a γ maximizer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{Material, Polarization};
use crate::error::{Error, Result};
use crate::mode_solver::{
    field_overlap, ModeSettings, ModeSolution, ProfileShape, WaveguideGeometry, WaveguideModel,
};
use crate::optimize::golden_section;
use crate::spdc::{
    coupling_amplitude, degree_of_entanglement, phase_mismatch, spectral_distinguishability,
    spectrum_scan_auto, state_weights_and_entropy, CouplingAmplitude, Distinguishability,
    IndexProvider, ScanAxis, SpdcProcess, Spectrum, StateWeights,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Every wave extraordinary.
    #[serde(alias = "type0_eee", alias = "type0")]
    Type0Eee,
    /// Ordinary pump; process 1 has an ordinary signal and extraordinary idler,
    /// process 2 the reverse.
    #[serde(alias = "type2_cross", alias = "type2")]
    Type2Cross,
}

impl Scheme {
    /// `[pump, signal, idler]` polarizations for process 1 and process 2.
    pub fn polarizations(self) -> [[Polarization; 3]; 2] {
        use Polarization::{Extraordinary as E, Ordinary as O};
        match self {
            Scheme::Type0Eee => [[E, E, E], [E, E, E]],
            Scheme::Type2Cross => [[O, O, E], [O, E, O]],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Type0Eee => "type0-eee",
            Scheme::Type2Cross => "type2-cross",
        }
    }
}

/// How indices vary across a spectrum scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexTreatment {
    /// Effective indices held at their design-point values.
    #[default]
    Frozen,
    /// Effective indices re-solved at every scan wavelength.
    Waveguide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumSettings {
    pub enabled: bool,
    pub samples: usize,
    pub indices: IndexTreatment,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        SpectrumSettings {
            enabled: true,
            samples: 401,
            indices: IndexTreatment::Frozen,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignRequest {
    pub pump_nm: f64,
    pub signal_1_nm: f64,
    pub signal_2_nm: f64,
    pub scheme: Scheme,
    pub geometry: WaveguideGeometry,
    #[serde(default)]
    pub spectrum: SpectrumSettings,
}

impl DesignRequest {
    /// 519 nm pump with 780 nm and 775 nm signals.
    pub fn reference(scheme: Scheme, geometry: WaveguideGeometry) -> Self {
        DesignRequest {
            pump_nm: 519.0,
            signal_1_nm: 780.0,
            signal_2_nm: 775.0,
            scheme,
            geometry,
            spectrum: SpectrumSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.signal_1_nm == self.signal_2_nm {
            return Err(Error::Domain(format!(
                "the two signals must differ (both {} nm)",
                self.signal_1_nm
            )));
        }
        if self.spectrum.enabled && self.spectrum.samples < 101 {
            return Err(Error::Domain(format!(
                "spectrum needs at least 101 samples, got {}",
                self.spectrum.samples
            )));
        }
        Ok(())
    }

    pub fn with_geometry(&self, geometry: WaveguideGeometry) -> Self {
        DesignRequest { geometry, ..*self }
    }
}

/// One of the two processes of a design, with every intermediate quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessDesign {
    pub process: SpdcProcess,
    pub pump_mode: ModeSolution,
    pub signal_mode: ModeSolution,
    pub idler_mode: ModeSolution,
    pub amplitude: CouplingAmplitude,
    pub signal_spectrum: Option<Spectrum>,
    pub idler_spectrum: Option<Spectrum>,
}

impl ProcessDesign {
    pub fn overlap_per_um(&self) -> f64 {
        self.amplitude.overlap_per_um
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPolingDesign {
    pub request: DesignRequest,
    pub process_1: ProcessDesign,
    pub process_2: ProcessDesign,
    pub gamma: f64,
    pub state: StateWeights,
}

impl DualPolingDesign {
    pub fn periods_um(&self) -> (f64, f64) {
        (
            self.process_1.process.period_um,
            self.process_2.process.period_um,
        )
    }

    /// Signal-spectrum separation; `None` when spectra were not computed.
    pub fn signal_distinguishability(&self) -> Option<Result<Distinguishability>> {
        let a = self.process_1.signal_spectrum.as_ref()?;
        let b = self.process_2.signal_spectrum.as_ref()?;
        Some(spectral_distinguishability(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// `depths[k]` with `widths[k]`.
    #[default]
    Paired,
    /// Every depth with every width.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepValues {
    pub gamma: f64,
    pub period_1_um: f64,
    pub period_2_um: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub depth_um: f64,
    pub width_um: f64,
    pub outcome: std::result::Result<SweepValues, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scheme: Scheme,
    pub rows: Vec<SweepRow>,
}

/// Search box for [`Designer::find_best_geometry`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryBounds {
    pub width_um: (f64, f64),
    pub depth_um: (f64, f64),
    /// Grid points per axis before refinement.
    pub grid_points: usize,
}

impl GeometryBounds {
    pub fn square(lo: f64, hi: f64, grid_points: usize) -> Self {
        GeometryBounds {
            width_um: (lo, hi),
            depth_um: (lo, hi),
            grid_points,
        }
    }
}

const REFINE_TOL_UM: f64 = 0.05;

/// Material and profile constants shared by every geometry of a design study.
#[derive(Debug, Clone, Default)]
pub struct Designer {
    pub material: Material,
    pub shape: ProfileShape,
    pub settings: ModeSettings,
}

impl Designer {
    pub fn new(material: Material, shape: ProfileShape) -> Self {
        Designer {
            material,
            shape,
            settings: ModeSettings::default(),
        }
    }

    pub fn model(&self, geometry: WaveguideGeometry) -> WaveguideModel {
        WaveguideModel::new(self.material.clone(), self.shape, geometry)
            .with_settings(self.settings)
    }

    pub fn design(&self, request: &DesignRequest) -> Result<DualPolingDesign> {
        request.validate()?;
        let model = self.model(request.geometry);
        let [pols_1, pols_2] = request.scheme.polarizations();
        let process_1 = self
            .process(&model, request, request.signal_1_nm, pols_1)
            .map_err(|e| e.context("process 1"))?;
        let process_2 = self
            .process(&model, request, request.signal_2_nm, pols_2)
            .map_err(|e| e.context("process 2"))?;
        let gamma = degree_of_entanglement(&process_1.amplitude, &process_2.amplitude)?;
        let state = state_weights_and_entropy(&process_1.amplitude, &process_2.amplitude)?;
        Ok(DualPolingDesign {
            request: *request,
            process_1,
            process_2,
            gamma,
            state,
        })
    }

    fn process(
        &self,
        model: &WaveguideModel,
        request: &DesignRequest,
        signal_nm: f64,
        pols: [Polarization; 3],
    ) -> Result<ProcessDesign> {
        let process = SpdcProcess::phase_matched(request.pump_nm, signal_nm, pols, model)?;
        let pump_mode = model.solve(process.pump_nm, process.pump_pol)?;
        let signal_mode = model.solve(process.signal_nm, process.signal_pol)?;
        let idler_mode = model.solve(process.idler_nm, process.idler_pol)?;
        let overlap = field_overlap(&pump_mode, &signal_mode, &idler_mode)?;
        let length_cm = request.geometry.length_cm;
        // the period is exact for the design point, so Δk vanishes up to rounding
        let dk = phase_mismatch(&process, process.signal_nm, model)?;
        let amplitude = coupling_amplitude(&process, overlap, dk, length_cm)?;

        let (signal_spectrum, idler_spectrum) = if request.spectrum.enabled {
            let frozen = process.frozen_indices();
            let indices: &dyn IndexProvider = match request.spectrum.indices {
                IndexTreatment::Frozen => &frozen,
                IndexTreatment::Waveguide => model,
            };
            let samples = request.spectrum.samples;
            let s = spectrum_scan_auto(&process, ScanAxis::Signal, samples, length_cm, indices)?;
            let i = spectrum_scan_auto(&process, ScanAxis::Idler, samples, length_cm, indices)?;
            (Some(s), Some(i))
        } else {
            (None, None)
        };
        Ok(ProcessDesign {
            process,
            pump_mode: (*pump_mode).clone(),
            signal_mode: (*signal_mode).clone(),
            idler_mode: (*idler_mode).clone(),
            amplitude,
            signal_spectrum,
            idler_spectrum,
        })
    }

    fn values(&self, request: &DesignRequest) -> Result<SweepValues> {
        let mut request = *request;
        request.spectrum.enabled = false;
        let d = self.design(&request)?;
        Ok(SweepValues {
            gamma: d.gamma,
            period_1_um: d.process_1.process.period_um,
            period_2_um: d.process_2.process.period_um,
        })
    }

    /// Runs one design per geometry in parallel. Rows come back in request
    /// order, and a failing geometry yields an error row.
    pub fn sweep(
        &self,
        template: &DesignRequest,
        depths_um: &[f64],
        widths_um: &[f64],
        pairing: Pairing,
    ) -> Result<SweepResult> {
        if depths_um.is_empty() || widths_um.is_empty() {
            return Err(Error::Domain(
                "sweep needs non-empty depth and width lists".into(),
            ));
        }
        let points: Vec<(f64, f64)> = match pairing {
            Pairing::Paired => {
                if depths_um.len() != widths_um.len() {
                    return Err(Error::Domain(format!(
                        "paired sweep needs equal-length lists ({} depths, {} widths)",
                        depths_um.len(),
                        widths_um.len()
                    )));
                }
                depths_um
                    .iter()
                    .copied()
                    .zip(widths_um.iter().copied())
                    .collect()
            }
            Pairing::Grid => depths_um
                .iter()
                .flat_map(|&d| widths_um.iter().map(move |&w| (d, w)))
                .collect(),
        };
        let rows = points
            .par_iter()
            .map(|&(depth_um, width_um)| {
                let outcome =
                    WaveguideGeometry::new(width_um, depth_um, template.geometry.length_cm)
                        .and_then(|g| self.values(&template.with_geometry(g)))
                        .map_err(|e| e.to_string());
                SweepRow {
                    depth_um,
                    width_um,
                    outcome,
                }
            })
            .collect();
        Ok(SweepResult {
            scheme: template.scheme,
            rows,
        })
    }

    /// Grid search over the bounds, then golden-section refinement along
    /// width and then depth around the best grid point. A refined point is
    /// kept only if it beats the grid.
    pub fn find_best_geometry(
        &self,
        template: &DesignRequest,
        bounds: &GeometryBounds,
    ) -> Result<(WaveguideGeometry, DualPolingDesign)> {
        let axis = |(lo, hi): (f64, f64), name: &str| -> Result<Vec<f64>> {
            if !(lo <= hi) {
                return Err(Error::Domain(format!(
                    "{name} bounds ({lo}, {hi}) are reversed"
                )));
            }
            if lo == hi || bounds.grid_points < 2 {
                return Ok(vec![0.5 * (lo + hi)]);
            }
            let n = bounds.grid_points;
            Ok((0..n)
                .map(|k| {
                    if k + 1 == n {
                        hi
                    } else {
                        lo + (hi - lo) * k as f64 / (n - 1) as f64
                    }
                })
                .collect())
        };
        let widths = axis(bounds.width_um, "width")?;
        let depths = axis(bounds.depth_um, "depth")?;
        let length_cm = template.geometry.length_cm;
        let gamma_at = |w: f64, h: f64| -> Option<f64> {
            let g = WaveguideGeometry::new(w, h, length_cm).ok()?;
            self.values(&template.with_geometry(g))
                .ok()
                .map(|v| v.gamma)
        };

        let grid: Vec<(f64, f64)> = depths
            .iter()
            .flat_map(|&h| widths.iter().map(move |&w| (w, h)))
            .collect();
        let scores: Vec<Option<f64>> = grid.par_iter().map(|&(w, h)| gamma_at(w, h)).collect();
        let mut best: Option<(f64, f64, f64)> = None;
        for (&(w, h), score) in grid.iter().zip(&scores) {
            if let Some(g) = *score {
                if best.is_none_or(|b| g > b.2) {
                    best = Some((w, h, g));
                }
            }
        }
        let (mut w, mut h, mut g) = best.ok_or_else(|| {
            Error::NoFeasibleDesign(format!(
                "none of {} grid geometries supports every mode",
                grid.len()
            ))
        })?;

        let step = |values: &[f64]| {
            if values.len() > 1 {
                values[1] - values[0]
            } else {
                0.0
            }
        };
        let (step_w, step_h) = (step(&widths), step(&depths));
        if step_w > 0.0 {
            let lo = (w - step_w).max(bounds.width_um.0);
            let hi = (w + step_w).min(bounds.width_um.1);
            let (x, _) = golden_section(
                |x| gamma_at(x, h).map_or(f64::INFINITY, |v| -v),
                lo,
                hi,
                REFINE_TOL_UM,
            );
            if let Some(v) = gamma_at(x, h) {
                if v > g {
                    (w, g) = (x, v);
                }
            }
        }
        if step_h > 0.0 {
            let lo = (h - step_h).max(bounds.depth_um.0);
            let hi = (h + step_h).min(bounds.depth_um.1);
            let (x, _) = golden_section(
                |x| gamma_at(w, x).map_or(f64::INFINITY, |v| -v),
                lo,
                hi,
                REFINE_TOL_UM,
            );
            if let Some(v) = gamma_at(w, x) {
                if v > g {
                    h = x;
                }
            }
        }
        let geometry = WaveguideGeometry::new(w, h, length_cm)?;
        let design = self.design(&template.with_geometry(geometry))?;
        Ok((geometry, design))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(scheme: Scheme, size: f64) -> DesignRequest {
        DesignRequest::reference(scheme, WaveguideGeometry::new(size, size, 1.0).unwrap())
    }

    #[test]
    fn scheme_polarizations() {
        use Polarization::{Extraordinary as E, Ordinary as O};
        assert_eq!(Scheme::Type0Eee.polarizations(), [[E; 3]; 2]);
        assert_eq!(Scheme::Type2Cross.polarizations(), [[O, O, E], [O, E, O]]);
    }

    #[test]
    fn equal_signals_rejected() {
        let mut r = request(Scheme::Type0Eee, 10.0);
        r.signal_2_nm = r.signal_1_nm;
        assert!(Designer::default().design(&r).unwrap_err().is_config());
    }

    #[test]
    fn type0_design_at_ten_microns() {
        let d = Designer::default()
            .design(&request(Scheme::Type0Eee, 10.0))
            .unwrap();
        let (l1, l2) = d.periods_um();
        assert!((l1 / 6.7969 - 1.0).abs() < 0.015, "{l1}");
        assert!((l2 / 6.8316 - 1.0).abs() < 0.015, "{l2}");
        assert!((d.gamma - 0.9817).abs() < 0.05, "{}", d.gamma);
        for p in [&d.process_1, &d.process_2] {
            assert!(p.process.energy_residual().abs() < 1e-12);
            assert!(p.amplitude.phase_mismatch.abs() < 1.0);
            assert!(p.signal_spectrum.is_some() && p.idler_spectrum.is_some());
        }
        assert!(
            d.signal_distinguishability()
                .unwrap()
                .unwrap()
                .distinguishable
        );
    }

    #[test]
    fn sweep_validation_and_order() {
        let designer = Designer::default();
        let t = request(Scheme::Type0Eee, 10.0);
        assert!(designer.sweep(&t, &[], &[10.0], Pairing::Grid).is_err());
        assert!(designer
            .sweep(&t, &[8.0, 10.0], &[10.0], Pairing::Paired)
            .is_err());
        let r = designer
            .sweep(&t, &[8.0, 0.5], &[10.0, 12.0], Pairing::Grid)
            .unwrap();
        let coords: Vec<_> = r.rows.iter().map(|r| (r.depth_um, r.width_um)).collect();
        assert_eq!(coords, [(8.0, 10.0), (8.0, 12.0), (0.5, 10.0), (0.5, 12.0)]);
        assert!(r.rows[0].outcome.is_ok() && r.rows[1].outcome.is_ok());
        // out-of-regime depth is recorded, not fatal
        assert!(r.rows[2].outcome.is_err() && r.rows[3].outcome.is_err());
    }

    #[test]
    fn single_row_sweep_matches_design() {
        let designer = Designer::default();
        let t = request(Scheme::Type2Cross, 8.0);
        let d = designer.design(&t).unwrap();
        let r = designer.sweep(&t, &[8.0], &[8.0], Pairing::Paired).unwrap();
        let v = r.rows[0].outcome.clone().unwrap();
        assert_eq!(v.gamma, d.gamma);
        assert_eq!((v.period_1_um, v.period_2_um), d.periods_um());
    }

    #[test]
    fn collapsed_bounds_return_that_point() {
        let designer = Designer::default();
        let t = request(Scheme::Type0Eee, 10.0);
        let (g, d) = designer
            .find_best_geometry(&t, &GeometryBounds::square(9.0, 9.0, 5))
            .unwrap();
        assert_eq!((g.width_um, g.depth_um), (9.0, 9.0));
        let direct = designer.design(&request(Scheme::Type0Eee, 9.0)).unwrap();
        assert_eq!(d.gamma, direct.gamma);
    }
}
