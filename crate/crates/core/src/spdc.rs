//! Down-conversion physics: energy conservation, quasi-phase-matching
//! periods, phase mismatch, relative coupling amplitudes, the degree of
//! entanglement and phase-matching spectra.
//!
//! Amplitudes are relative: the prefactor shared by both processes of a
//! dual-poled design (nonlinear coefficient, pump field, interaction time)
//! is set to one, so only ratios between processes are meaningful.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dispersion::{Material, Polarization};
use crate::error::{Error, Result};
use crate::mode_solver::WaveguideModel;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Half-maximum point of sinc²: sinc²(x) = 1/2.
pub const SINC2_HALF_POINT: f64 = 1.391_557_377_251_145;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Pump,
    Signal,
    Idler,
}

/// Source of refractive indices seen by the three interacting waves.
pub trait IndexProvider: Sync {
    fn index(&self, wave: Wave, wavelength_nm: f64, pol: Polarization) -> Result<f64>;
}

/// Guided-mode effective indices, solved per wavelength.
impl IndexProvider for WaveguideModel {
    fn index(&self, _wave: Wave, wavelength_nm: f64, pol: Polarization) -> Result<f64> {
        Ok(self.solve(wavelength_nm, pol)?.n_eff)
    }
}

/// Bulk substrate indices.
impl IndexProvider for Material {
    fn index(&self, _wave: Wave, wavelength_nm: f64, pol: Polarization) -> Result<f64> {
        self.bulk_index(pol, wavelength_nm)
    }
}

/// Indices held at fixed values regardless of wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrozenIndices {
    pub pump: f64,
    pub signal: f64,
    pub idler: f64,
}

impl IndexProvider for FrozenIndices {
    fn index(&self, wave: Wave, _wavelength_nm: f64, _pol: Polarization) -> Result<f64> {
        Ok(match wave {
            Wave::Pump => self.pump,
            Wave::Signal => self.signal,
            Wave::Idler => self.idler,
        })
    }
}

/// `λ_i = 1/(1/λ_p − 1/λ_s)`.
pub fn idler_wavelength(pump_nm: f64, signal_nm: f64) -> Result<f64> {
    if !(pump_nm > 0.0 && signal_nm > pump_nm) {
        return Err(Error::Domain(format!(
            "signal {signal_nm} nm must be longer than pump {pump_nm} nm"
        )));
    }
    Ok(pump_nm * signal_nm / (signal_nm - pump_nm))
}

/// First-order QPM period in µm, for indices at wavelengths in nm.
pub fn qpm_period(
    n_p: f64,
    n_s: f64,
    n_i: f64,
    pump_nm: f64,
    signal_nm: f64,
    idler_nm: f64,
) -> Result<f64> {
    // 1/µm
    let denominator = 1e3 * (n_p / pump_nm - n_s / signal_nm - n_i / idler_nm);
    // relative to the pump term, to catch cancellation down to rounding
    if !(denominator > 1e3 * n_p / pump_nm * 1e-12) {
        return Err(Error::PhaseMatchingImpossible {
            pump_nm,
            signal_nm,
            idler_nm,
            denominator,
        });
    }
    Ok(1.0 / denominator)
}

pub fn angular_frequency(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// Converts a wavelength width to an angular-frequency width, `2πcΔλ/λ²`.
pub fn angular_width(width_nm: f64, center_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * width_nm * 1e-9 / (center_nm * 1e-9).powi(2)
}

/// One pump → (signal, idler) conversion phase-matched by a first-order grating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpdcProcess {
    pub pump_nm: f64,
    pub signal_nm: f64,
    pub idler_nm: f64,
    pub pump_pol: Polarization,
    pub signal_pol: Polarization,
    pub idler_pol: Polarization,
    pub n_pump: f64,
    pub n_signal: f64,
    pub n_idler: f64,
    pub period_um: f64,
}

impl SpdcProcess {
    /// Builds the process and the grating period that phase-matches it exactly.
    pub fn phase_matched(
        pump_nm: f64,
        signal_nm: f64,
        [pump_pol, signal_pol, idler_pol]: [Polarization; 3],
        indices: &dyn IndexProvider,
    ) -> Result<Self> {
        let idler_nm = idler_wavelength(pump_nm, signal_nm)?;
        if signal_nm > idler_nm {
            return Err(Error::Domain(format!(
                "signal {signal_nm} nm must be the shorter member of the pair (idler {idler_nm:.2} nm)"
            )));
        }
        let n_pump = indices
            .index(Wave::Pump, pump_nm, pump_pol)
            .map_err(|e| e.context(format!("pump {pump_nm} nm")))?;
        let n_signal = indices
            .index(Wave::Signal, signal_nm, signal_pol)
            .map_err(|e| e.context(format!("signal {signal_nm} nm")))?;
        let n_idler = indices
            .index(Wave::Idler, idler_nm, idler_pol)
            .map_err(|e| e.context(format!("idler {idler_nm:.2} nm")))?;
        let period_um = qpm_period(n_pump, n_signal, n_idler, pump_nm, signal_nm, idler_nm)?;
        Ok(SpdcProcess {
            pump_nm,
            signal_nm,
            idler_nm,
            pump_pol,
            signal_pol,
            idler_pol,
            n_pump,
            n_signal,
            n_idler,
            period_um,
        })
    }

    /// Grating wavenumber `2π/Λ` in rad/µm.
    pub fn grating_wavenumber(&self) -> f64 {
        2.0 * PI / self.period_um
    }

    /// The design-point indices as a wavelength-independent provider.
    pub fn frozen_indices(&self) -> FrozenIndices {
        FrozenIndices {
            pump: self.n_pump,
            signal: self.n_signal,
            idler: self.n_idler,
        }
    }

    /// Relative energy-conservation residual `(1/λ_p − 1/λ_s − 1/λ_i)·λ_p`.
    pub fn energy_residual(&self) -> f64 {
        (1.0 / self.pump_nm - 1.0 / self.signal_nm - 1.0 / self.idler_nm) * self.pump_nm
    }
}

/// `Δk = 2π/Λ − 2π(n_p/λ_p − n_s/λ_s − n_i/λ_i)` in rad/m, at a detuned signal
/// wavelength with the idler following from energy conservation.
pub fn phase_mismatch(
    process: &SpdcProcess,
    signal_nm: f64,
    indices: &dyn IndexProvider,
) -> Result<f64> {
    let idler_nm = idler_wavelength(process.pump_nm, signal_nm)?;
    let n_p = indices.index(Wave::Pump, process.pump_nm, process.pump_pol)?;
    let n_s = indices.index(Wave::Signal, signal_nm, process.signal_pol)?;
    let n_i = indices.index(Wave::Idler, idler_nm, process.idler_pol)?;
    let grating = 1.0 / (process.period_um * 1e3);
    let material = n_p / process.pump_nm - n_s / signal_nm - n_i / idler_nm;
    Ok(2.0 * PI * (grating - material) * 1e9)
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingAmplitude {
    /// `|I| √(ω_s ω_i)/(n_s n_i) |sinc(ΔkL/2)|`, relative units.
    pub magnitude: f64,
    /// Transverse overlap, 1/µm.
    pub overlap_per_um: f64,
    pub sinc_factor: f64,
    /// rad/m
    pub phase_mismatch: f64,
    pub length_cm: f64,
}

impl CouplingAmplitude {
    /// Phase of the amplitude, `π − ΔkL/2` (the leading minus sign and the
    /// propagation phase), shifted by π when the sinc factor is negative.
    pub fn phase(&self) -> f64 {
        let propagation = -self.phase_mismatch * self.length_cm * 1e-2 / 2.0;
        let sign = if self.sinc_factor < 0.0 { PI } else { 0.0 };
        (PI + propagation + sign).rem_euclid(2.0 * PI)
    }

    /// Complex amplitude `(re, im)` reconstructed from magnitude and phase.
    pub fn complex(&self) -> (f64, f64) {
        let phi = self.phase();
        (self.magnitude * phi.cos(), self.magnitude * phi.sin())
    }
}

pub fn coupling_amplitude(
    process: &SpdcProcess,
    overlap_per_um: f64,
    phase_mismatch: f64,
    length_cm: f64,
) -> Result<CouplingAmplitude> {
    if !(length_cm > 0.0) {
        return Err(Error::Domain(format!(
            "interaction length {length_cm} cm must be positive"
        )));
    }
    let sinc_factor = sinc(phase_mismatch * length_cm * 1e-2 / 2.0);
    let omega = angular_frequency(process.signal_nm) * angular_frequency(process.idler_nm);
    let magnitude = overlap_per_um.abs() * omega.sqrt() / (process.n_signal * process.n_idler)
        * sinc_factor.abs();
    Ok(CouplingAmplitude {
        magnitude,
        overlap_per_um,
        sinc_factor,
        phase_mismatch,
        length_cm,
    })
}

/// `γ = min(|C₁|, |C₂|)/max(|C₁|, |C₂|)`.
pub fn degree_of_entanglement(a1: &CouplingAmplitude, a2: &CouplingAmplitude) -> Result<f64> {
    let (x, y) = (a1.magnitude.abs(), a2.magnitude.abs());
    if x == 0.0 && y == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    if x == y {
        return Ok(1.0);
    }
    Ok(x.min(y) / x.max(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateWeights {
    pub weights: (f64, f64),
    pub entropy_bits: f64,
}

/// Normalized populations of the two frequency pairs and the entanglement
/// entropy of the resulting two-term state.
pub fn state_weights_and_entropy(
    a1: &CouplingAmplitude,
    a2: &CouplingAmplitude,
) -> Result<StateWeights> {
    let (x, y) = (a1.magnitude.abs(), a2.magnitude.abs());
    if x == 0.0 && y == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let total = x * x + y * y;
    let (p1, p2) = (x * x / total, y * y / total);
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    let entropy_bits = if x == y { 1.0 } else { h(p1) + h(p2) };
    Ok(StateWeights {
        weights: (p1, p2),
        entropy_bits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanAxis {
    Signal,
    Idler,
}

/// Sampled `sinc²(ΔkL/2)` gain versus the signal or idler wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub axis: ScanAxis,
    pub center_nm: f64,
    pub wavelengths_nm: Vec<f64>,
    pub gain: Vec<f64>,
    /// Full width at half maximum.
    pub fwhm_nm: f64,
    /// Full width of the window `|Δk| L ≤ π`, i.e. gain ≥ 4/π².
    pub phase_window_nm: f64,
    pub length_cm: f64,
}

impl Spectrum {
    pub fn angular_fwhm(&self) -> f64 {
        angular_width(self.fwhm_nm, self.center_nm)
    }
}

fn gain_at(
    process: &SpdcProcess,
    axis: ScanAxis,
    wavelength_nm: f64,
    length_cm: f64,
    indices: &dyn IndexProvider,
) -> Result<f64> {
    let signal_nm = match axis {
        ScanAxis::Signal => wavelength_nm,
        ScanAxis::Idler => idler_wavelength(process.pump_nm, wavelength_nm)?,
    };
    let dk = phase_mismatch(process, signal_nm, indices)?;
    Ok(sinc(dk * length_cm * 1e-2 / 2.0).powi(2))
}

fn axis_center(process: &SpdcProcess, axis: ScanAxis) -> f64 {
    match axis {
        ScanAxis::Signal => process.signal_nm,
        ScanAxis::Idler => process.idler_nm,
    }
}

/// FWHM estimate from the local slope of Δk at the design point.
pub fn estimate_fwhm(
    process: &SpdcProcess,
    axis: ScanAxis,
    length_cm: f64,
    indices: &dyn IndexProvider,
) -> Result<f64> {
    let center = axis_center(process, axis);
    let step = 1e-3 * center.max(1.0) * 1e-3;
    let signal = |l: f64| match axis {
        ScanAxis::Signal => Ok(l),
        ScanAxis::Idler => idler_wavelength(process.pump_nm, l),
    };
    let up = phase_mismatch(process, signal(center + step)?, indices)?;
    let down = phase_mismatch(process, signal(center - step)?, indices)?;
    let slope = ((up - down) / (2.0 * step)).abs(); // rad/m per nm
    if !(slope > 0.0) {
        return Err(Error::Domain(
            "phase mismatch is flat at the design point; bandwidth undefined".into(),
        ));
    }
    Ok(4.0 * SINC2_HALF_POINT / (length_cm * 1e-2 * slope))
}

/// Walks out from the center sample to the first sample below `level` on
/// each side, then bisects the continuous gain between the bracketing samples.
fn width_at_level(
    level: f64,
    wavelengths: &[f64],
    gain: &[f64],
    center_index: usize,
    gain_fn: &dyn Fn(f64) -> Result<f64>,
) -> Option<Result<f64>> {
    let mut hi = center_index;
    while gain[hi] >= level {
        hi += 1;
        if hi == gain.len() {
            return None;
        }
    }
    let mut lo = center_index;
    while gain[lo] >= level {
        if lo == 0 {
            return None;
        }
        lo -= 1;
    }
    let crossing = |inside: f64, outside: f64| -> Result<f64> {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..100 {
            if (b - a).abs() < 1e-9 {
                break;
            }
            let m = 0.5 * (a + b);
            if gain_fn(m)? >= level {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    };
    let right = match crossing(wavelengths[hi - 1], wavelengths[hi]) {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    let left = match crossing(wavelengths[lo + 1], wavelengths[lo]) {
        Ok(v) => v,
        Err(e) => return Some(Err(e)),
    };
    Some(Ok(right - left))
}

/// Uniform wavelength scan centered on the phase-matched point.
pub fn spectrum_scan(
    process: &SpdcProcess,
    axis: ScanAxis,
    span_nm: f64,
    samples: usize,
    length_cm: f64,
    indices: &dyn IndexProvider,
) -> Result<Spectrum> {
    if samples < 101 {
        return Err(Error::Domain(format!(
            "spectrum needs at least 101 samples, got {samples}"
        )));
    }
    if !(span_nm > 0.0) || !(length_cm > 0.0) {
        return Err(Error::Domain(format!(
            "span {span_nm} nm and length {length_cm} cm must be positive"
        )));
    }
    // odd sample count puts a sample on the center
    let samples = samples | 1;
    let center = axis_center(process, axis);
    let start = center - span_nm / 2.0;
    let step = span_nm / (samples - 1) as f64;
    let wavelengths: Vec<f64> = (0..samples)
        .map(|k| {
            if k == samples / 2 {
                center
            } else {
                start + step * k as f64
            }
        })
        .collect();
    let gain_fn = |l: f64| gain_at(process, axis, l, length_cm, indices);
    let gain = wavelengths
        .iter()
        .map(|&l| gain_fn(l))
        .collect::<Result<Vec<f64>>>()?;

    let too_narrow = || -> Error {
        let suggested = estimate_fwhm(process, axis, length_cm, indices)
            .map(|f| 4.0 * f)
            .unwrap_or(2.0 * span_nm);
        Error::SpanTooNarrow {
            span_nm,
            suggested_nm: suggested.max(span_nm * 1.5),
        }
    };
    let mid = samples / 2;
    let fwhm_nm =
        width_at_level(0.5, &wavelengths, &gain, mid, &gain_fn).ok_or_else(too_narrow)??;
    let window_level = 4.0 / (PI * PI);
    let phase_window_nm = width_at_level(window_level, &wavelengths, &gain, mid, &gain_fn)
        .ok_or_else(too_narrow)??;
    Ok(Spectrum {
        axis,
        center_nm: center,
        wavelengths_nm: wavelengths,
        gain,
        fwhm_nm,
        phase_window_nm,
        length_cm,
    })
}

/// Scan spanning four estimated FWHMs, widened until both half-maximum
/// crossings fall inside.
pub fn spectrum_scan_auto(
    process: &SpdcProcess,
    axis: ScanAxis,
    samples: usize,
    length_cm: f64,
    indices: &dyn IndexProvider,
) -> Result<Spectrum> {
    let mut span = 4.0 * estimate_fwhm(process, axis, length_cm, indices)?;
    for _ in 0..8 {
        match spectrum_scan(process, axis, span, samples, length_cm, indices) {
            Err(Error::SpanTooNarrow { suggested_nm, .. }) => span = suggested_nm.max(2.0 * span),
            other => return other,
        }
    }
    spectrum_scan(process, axis, span, samples, length_cm, indices)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distinguishability {
    pub distinguishable: bool,
    /// Positive when the bandwidth-widened windows are disjoint.
    pub margin_nm: f64,
}

/// Two peaks are resolvable when `λ₁ − Δλ₁ ≥ λ₂ + Δλ₂` (or the mirror case),
/// with `Δλ` the FWHM.
pub fn spectral_distinguishability(s1: &Spectrum, s2: &Spectrum) -> Result<Distinguishability> {
    if s1.axis != s2.axis {
        return Err(Error::Consistency(
            "spectra scan different photons (signal vs idler)".into(),
        ));
    }
    let upper_first = (s1.center_nm - s1.fwhm_nm) - (s2.center_nm + s2.fwhm_nm);
    let upper_second = (s2.center_nm - s2.fwhm_nm) - (s1.center_nm + s1.fwhm_nm);
    let margin_nm = upper_first.max(upper_second);
    Ok(Distinguishability {
        distinguishable: margin_nm >= 0.0,
        margin_nm,
    })
}
