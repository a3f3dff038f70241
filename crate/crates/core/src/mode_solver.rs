//! Fundamental-mode solver for titanium-indiffused channel waveguides.
//!
//! The index profile is
//!
//! ```text
//! n²(y, z) = n_b² + 2 n_b Δn g(y) f(z)          z ≥ 0
//! g(y) = ½ [erf((w/2 + y)/w_d) + erf((w/2 − y)/w_d)]
//! f(z) = exp(−z²/d_z²)
//! ```
//!
//! with air (or a configured cover index) above the surface. The mode is
//! approximated by the two-parameter trial field
//! `E = exp(−α_y² y²/w²) · (z/h) · exp(−α_z² z²/h²)`, and the effective index
//! follows from maximizing the scalar Rayleigh quotient over `(α_y, α_z)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::dispersion::{Material, Polarization};
use crate::error::{Error, Result};
use crate::optimize::NelderMead;
use crate::quadrature::Quadrature;

/// Channel geometry: width and depth in µm, interaction length in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry {
    pub width_um: f64,
    pub depth_um: f64,
    pub length_cm: f64,
}

impl WaveguideGeometry {
    pub const MIN_SIZE_UM: f64 = 1.0;
    pub const MAX_SIZE_UM: f64 = 50.0;

    pub fn new(width_um: f64, depth_um: f64, length_cm: f64) -> Result<Self> {
        let g = WaveguideGeometry {
            width_um,
            depth_um,
            length_cm,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let in_regime = |v: f64| (Self::MIN_SIZE_UM..=Self::MAX_SIZE_UM).contains(&v);
        if !in_regime(self.width_um) || !in_regime(self.depth_um) {
            return Err(Error::Domain(format!(
                "waveguide width {} um and depth {} um must lie in [{}, {}] um",
                self.width_um,
                self.depth_um,
                Self::MIN_SIZE_UM,
                Self::MAX_SIZE_UM
            )));
        }
        if !(self.length_cm > 0.0 && self.length_cm.is_finite()) {
            return Err(Error::Domain(format!(
                "interaction length {} cm must be positive",
                self.length_cm
            )));
        }
        Ok(())
    }

    pub fn length_um(&self) -> f64 {
        self.length_cm * 1e4
    }
}

/// Diffusion-profile constants, expressed relative to the channel size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileShape {
    /// Lateral diffusion length `w_d` as a fraction of the width.
    pub lateral_diffusion_ratio: f64,
    /// Depth scale `d_z` of the Gaussian depth profile as a multiple of the depth.
    pub depth_scale_ratio: f64,
    pub cover_index: f64,
}

impl Default for ProfileShape {
    fn default() -> Self {
        ProfileShape {
            lateral_diffusion_ratio: 0.25,
            depth_scale_ratio: std::f64::consts::SQRT_2,
            cover_index: 1.0,
        }
    }
}

impl ProfileShape {
    pub fn validate(&self) -> Result<()> {
        if !(self.lateral_diffusion_ratio > 0.0 && self.depth_scale_ratio > 0.0) {
            return Err(Error::Config(format!(
                "profile ratios must be positive (lateral {}, depth {})",
                self.lateral_diffusion_ratio, self.depth_scale_ratio
            )));
        }
        if !(self.cover_index >= 1.0) {
            return Err(Error::Config(format!(
                "cover index {} must be >= 1",
                self.cover_index
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexProfile {
    pub bulk: f64,
    pub increment: f64,
    pub width_um: f64,
    pub depth_um: f64,
    pub shape: ProfileShape,
}

pub fn make_profile(
    geometry: &WaveguideGeometry,
    bulk: f64,
    increment: f64,
    shape: ProfileShape,
) -> Result<IndexProfile> {
    if !(increment > 0.0) {
        return Err(Error::Config(format!(
            "index increment {increment} must be positive"
        )));
    }
    if !(bulk > 1.0) {
        return Err(Error::Config(format!("bulk index {bulk} must exceed 1")));
    }
    shape.validate()?;
    Ok(IndexProfile {
        bulk,
        increment,
        width_um: geometry.width_um,
        depth_um: geometry.depth_um,
        shape,
    })
}

impl IndexProfile {
    pub fn lateral_diffusion_um(&self) -> f64 {
        self.shape.lateral_diffusion_ratio * self.width_um
    }

    pub fn depth_scale_um(&self) -> f64 {
        self.shape.depth_scale_ratio * self.depth_um
    }

    /// Lateral shape `g(y)`, even in `y`, with values in `[0, 1]`.
    pub fn lateral(&self, y: f64) -> f64 {
        let half = 0.5 * self.width_um;
        let wd = self.lateral_diffusion_um();
        0.5 * (libm::erf((half + y) / wd) + libm::erf((half - y) / wd))
    }

    /// Depth shape `f(z)`; zero in the cover.
    pub fn depth_shape(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        let d = self.depth_scale_um();
        (-(z * z) / (d * d)).exp()
    }

    pub fn index_squared(&self, y: f64, z: f64) -> f64 {
        if z < 0.0 {
            return self.shape.cover_index * self.shape.cover_index;
        }
        self.bulk * self.bulk
            + 2.0 * self.bulk * self.increment * self.lateral(y) * self.depth_shape(z)
    }

    pub fn index(&self, y: f64, z: f64) -> f64 {
        self.index_squared(y, z).sqrt()
    }
}

/// Separable trial field with unit amplitude (not normalized).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialField {
    pub alpha_y: f64,
    pub alpha_z: f64,
    pub width_um: f64,
    pub depth_um: f64,
}

impl TrialField {
    pub fn lateral(&self, y: f64) -> f64 {
        let u = self.alpha_y * y / self.width_um;
        (-u * u).exp()
    }

    pub fn lateral_slope(&self, y: f64) -> f64 {
        let a = self.alpha_y / self.width_um;
        -2.0 * a * a * y * self.lateral(y)
    }

    pub fn vertical(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        let h = self.depth_um;
        let u = self.alpha_z * z / h;
        (z / h) * (-u * u).exp()
    }

    pub fn vertical_slope(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        let h = self.depth_um;
        let u = self.alpha_z * z / h;
        (1.0 - 2.0 * u * u) * (-u * u).exp() / h
    }

    pub fn value(&self, y: f64, z: f64) -> f64 {
        self.lateral(y) * self.vertical(z)
    }

    /// Half-width of the lateral integration window.
    fn y_extent(&self, width_um: f64) -> f64 {
        (5.0 * width_um).max(6.0 * self.width_um / self.alpha_y)
    }

    fn z_extent(&self, depth_um: f64) -> f64 {
        (8.0 * depth_um).max(7.0 * self.depth_um / self.alpha_z)
    }
}

/// Per-field transverse integrals; lateral ones over `y ≥ 0` only (even integrands).
struct FieldIntegrals {
    lateral_norm: f64,
    lateral_gradient: f64,
    lateral_overlap: f64,
    vertical_norm: f64,
    vertical_gradient: f64,
    vertical_overlap: f64,
}

fn field_integrals(
    profile: &IndexProfile,
    trial: &TrialField,
    quad: &Quadrature,
) -> Result<FieldIntegrals> {
    let ymax = trial.y_extent(profile.width_um);
    let zmax = trial.z_extent(profile.depth_um);
    let lateral_norm = quad.integrate(|y| trial.lateral(y).powi(2), 0.0, ymax)?;
    let lateral_gradient = quad.integrate(|y| trial.lateral_slope(y).powi(2), 0.0, ymax)?;
    let lateral_overlap =
        quad.integrate(|y| profile.lateral(y) * trial.lateral(y).powi(2), 0.0, ymax)?;
    let vertical_norm = quad.integrate(|z| trial.vertical(z).powi(2), 0.0, zmax)?;
    let vertical_gradient = quad.integrate(|z| trial.vertical_slope(z).powi(2), 0.0, zmax)?;
    let vertical_overlap = quad.integrate(
        |z| profile.depth_shape(z) * trial.vertical(z).powi(2),
        0.0,
        zmax,
    )?;
    Ok(FieldIntegrals {
        lateral_norm,
        lateral_gradient,
        lateral_overlap,
        vertical_norm,
        vertical_gradient,
        vertical_overlap,
    })
}

/// Vacuum wavenumber in 1/µm.
pub fn vacuum_wavenumber(wavelength_nm: f64) -> f64 {
    2.0 * PI / (wavelength_nm * 1e-3)
}

#[derive(Debug, Clone, Copy)]
pub struct ModeSettings {
    pub quadrature: Quadrature,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub grid_points: usize,
    pub optimizer: NelderMead,
    pub min_increment: f64,
}

impl Default for ModeSettings {
    fn default() -> Self {
        ModeSettings {
            quadrature: Quadrature::with_rel_tol(1e-10),
            alpha_min: 0.2,
            alpha_max: 5.0,
            grid_points: 16,
            optimizer: NelderMead {
                f_tol: 1e-13,
                x_tol: 1e-6,
                max_iter: 1000,
                initial_step: 0.1,
            },
            min_increment: 1e-5,
        }
    }
}

/// Excess `n_eff² − n_b²` of the Rayleigh quotient; computed directly to
/// avoid cancellation against the bulk term.
fn quotient_excess(
    profile: &IndexProfile,
    wavelength_nm: f64,
    trial: &TrialField,
    quad: &Quadrature,
) -> Result<f64> {
    let k0 = vacuum_wavenumber(wavelength_nm);
    let i = field_integrals(profile, trial, quad)?;
    let norm = i.lateral_norm * i.vertical_norm;
    let potential = 2.0 * profile.bulk * profile.increment * i.lateral_overlap * i.vertical_overlap;
    let gradient = i.lateral_gradient * i.vertical_norm + i.lateral_norm * i.vertical_gradient;
    Ok((potential - gradient / (k0 * k0)) / norm)
}

/// Scalar variational estimate of `n_eff²` for the trial field `(α_y, α_z)`.
pub fn rayleigh_quotient(
    profile: &IndexProfile,
    wavelength_nm: f64,
    alpha_y: f64,
    alpha_z: f64,
) -> Result<f64> {
    rayleigh_quotient_with(
        profile,
        wavelength_nm,
        alpha_y,
        alpha_z,
        &ModeSettings::default().quadrature,
    )
}

pub fn rayleigh_quotient_with(
    profile: &IndexProfile,
    wavelength_nm: f64,
    alpha_y: f64,
    alpha_z: f64,
    quad: &Quadrature,
) -> Result<f64> {
    if !(alpha_y > 0.0 && alpha_z > 0.0) {
        return Err(Error::Domain(format!(
            "trial parameters must be positive, got ({alpha_y}, {alpha_z})"
        )));
    }
    let trial = TrialField {
        alpha_y,
        alpha_z,
        width_um: profile.width_um,
        depth_um: profile.depth_um,
    };
    Ok(profile.bulk * profile.bulk + quotient_excess(profile, wavelength_nm, &trial, quad)?)
}

/// A transverse field with a finite rectangle outside which it is negligible.
pub trait TransverseField {
    fn value(&self, y: f64, z: f64) -> f64;
    /// `((y_min, y_max), (z_min, z_max))`
    fn support(&self) -> ((f64, f64), (f64, f64));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    pub wavelength_nm: f64,
    pub polarization: Polarization,
    pub n_eff: f64,
    pub alpha_y: f64,
    pub alpha_z: f64,
    pub profile: IndexProfile,
    /// Multiplier giving the trial field unit L2 norm.
    pub normalization: f64,
}

impl ModeSolution {
    pub fn trial(&self) -> TrialField {
        TrialField {
            alpha_y: self.alpha_y,
            alpha_z: self.alpha_z,
            width_um: self.profile.width_um,
            depth_um: self.profile.depth_um,
        }
    }

    pub fn bulk_index(&self) -> f64 {
        self.profile.bulk
    }

    pub fn increment(&self) -> f64 {
        self.profile.increment
    }

    /// Fraction of the index increment captured by the mode.
    pub fn guidance_fraction(&self) -> f64 {
        (self.n_eff - self.profile.bulk) / self.profile.increment
    }
}

impl TransverseField for ModeSolution {
    fn value(&self, y: f64, z: f64) -> f64 {
        self.normalization * self.trial().value(y, z)
    }

    fn support(&self) -> ((f64, f64), (f64, f64)) {
        let t = self.trial();
        let y = t.y_extent(self.profile.width_um);
        ((-y, y), (0.0, t.z_extent(self.profile.depth_um)))
    }
}

fn is_on_box_edge(alpha: f64, settings: &ModeSettings) -> bool {
    const EDGE: f64 = 1e-3;
    alpha <= settings.alpha_min * (1.0 + EDGE) || alpha >= settings.alpha_max * (1.0 - EDGE)
}

pub fn solve_mode(
    profile: &IndexProfile,
    wavelength_nm: f64,
    polarization: Polarization,
) -> Result<ModeSolution> {
    solve_mode_with(
        profile,
        wavelength_nm,
        polarization,
        &ModeSettings::default(),
    )
}

/// Coarse logarithmic grid over the trial parameters, then Nelder–Mead in
/// `ln α` starting from the best grid point.
pub fn solve_mode_with(
    profile: &IndexProfile,
    wavelength_nm: f64,
    polarization: Polarization,
    settings: &ModeSettings,
) -> Result<ModeSolution> {
    let no_mode = |n_eff: f64| Error::NoGuidedMode {
        wavelength_nm,
        polarization,
        n_eff,
        bulk: profile.bulk,
    };
    if profile.increment < settings.min_increment {
        return Err(no_mode(profile.bulk));
    }
    let quad = &settings.quadrature;
    let excess = |alpha_y: f64, alpha_z: f64| {
        let trial = TrialField {
            alpha_y,
            alpha_z,
            width_um: profile.width_um,
            depth_um: profile.depth_um,
        };
        quotient_excess(profile, wavelength_nm, &trial, quad)
    };

    let (lo, hi) = (settings.alpha_min.ln(), settings.alpha_max.ln());
    let n = settings.grid_points.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64).exp())
        .collect();
    let mut best = (f64::NEG_INFINITY, grid[0], grid[0]);
    for &ay in &grid {
        for &az in &grid {
            let v = excess(ay, az)?;
            if v > best.0 {
                best = (v, ay, az);
            }
        }
    }

    // Outside a one-unit margin around the box the objective is frozen, so a
    // runaway toward the edge stays bounded and is reported below.
    let clamp = |x: f64| x.clamp(lo - 1.0, hi + 1.0);
    let mut failure = None;
    let minimum = settings.optimizer.minimize(
        |x| match excess(clamp(x[0]).exp(), clamp(x[1]).exp()) {
            Ok(v) => -v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        &[best.1.ln(), best.2.ln()],
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (mut alpha_y, mut alpha_z, mut value) = (
        clamp(minimum.x[0]).exp(),
        clamp(minimum.x[1]).exp(),
        -minimum.value,
    );
    if best.0 > value {
        (value, alpha_y, alpha_z) = best;
    }

    let n_eff = (profile.bulk * profile.bulk + value).sqrt();
    if !(n_eff > profile.bulk) {
        return Err(no_mode(n_eff));
    }
    if is_on_box_edge(alpha_y, settings) || is_on_box_edge(alpha_z, settings) {
        return Err(Error::BoundaryOptimum {
            wavelength_nm,
            polarization,
            alpha_y,
            alpha_z,
        });
    }

    let trial = TrialField {
        alpha_y,
        alpha_z,
        width_um: profile.width_um,
        depth_um: profile.depth_um,
    };
    let i = field_integrals(profile, &trial, quad)?;
    let normalization = 1.0 / (2.0 * i.lateral_norm * i.vertical_norm).sqrt();
    Ok(ModeSolution {
        wavelength_nm,
        polarization,
        n_eff,
        alpha_y,
        alpha_z,
        profile: *profile,
        normalization,
    })
}

/// `∫∫ a b c dy dz` over the intersection of the three supports.
pub fn overlap_integral(fields: [&dyn TransverseField; 3], quad: &Quadrature) -> Result<f64> {
    let mut y = (f64::NEG_INFINITY, f64::INFINITY);
    let mut z = (f64::NEG_INFINITY, f64::INFINITY);
    for f in &fields {
        let (fy, fz) = f.support();
        y = (y.0.max(fy.0), y.1.min(fy.1));
        z = (z.0.max(fz.0), z.1.min(fz.1));
    }
    if !(y.0 < y.1 && z.0 < z.1) {
        return Ok(0.0);
    }
    let [a, b, c] = fields;
    let q = Quadrature {
        abs_tol: 1e-14,
        ..*quad
    };
    q.integrate_2d(
        |yy, zz| a.value(yy, zz) * b.value(yy, zz) * c.value(yy, zz),
        y,
        z,
    )
}

/// Transverse overlap of three normalized modes of one waveguide, in 1/µm.
pub fn field_overlap(p: &ModeSolution, s: &ModeSolution, i: &ModeSolution) -> Result<f64> {
    let same = |a: &ModeSolution, b: &ModeSolution| {
        a.profile.width_um == b.profile.width_um
            && a.profile.depth_um == b.profile.depth_um
            && a.profile.shape == b.profile.shape
    };
    if !same(p, s) || !same(p, i) {
        return Err(Error::Consistency(format!(
            "overlap of modes from different waveguides ({}x{}, {}x{}, {}x{} um)",
            p.profile.width_um,
            p.profile.depth_um,
            s.profile.width_um,
            s.profile.depth_um,
            i.profile.width_um,
            i.profile.depth_um
        )));
    }
    overlap_integral([p, s, i], &ModeSettings::default().quadrature)
}

/// Material, profile constants and geometry, with a per-wavelength cache of
/// solved modes. Safe to share between threads.
#[derive(Debug)]
pub struct WaveguideModel {
    pub material: Material,
    pub shape: ProfileShape,
    pub geometry: WaveguideGeometry,
    pub settings: ModeSettings,
    cache: Mutex<HashMap<(u64, Polarization), Arc<ModeSolution>>>,
}

impl Clone for WaveguideModel {
    fn clone(&self) -> Self {
        WaveguideModel::new(self.material.clone(), self.shape, self.geometry)
            .with_settings(self.settings)
    }
}

impl WaveguideModel {
    pub fn new(material: Material, shape: ProfileShape, geometry: WaveguideGeometry) -> Self {
        WaveguideModel {
            material,
            shape,
            geometry,
            settings: ModeSettings::default(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_settings(mut self, settings: ModeSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn profile(&self, wavelength_nm: f64, pol: Polarization) -> Result<IndexProfile> {
        let bulk = self.material.bulk_index(pol, wavelength_nm)?;
        let increment = self.material.surface_increment(pol, wavelength_nm)?;
        make_profile(&self.geometry, bulk, increment, self.shape)
    }

    pub fn solve(&self, wavelength_nm: f64, pol: Polarization) -> Result<Arc<ModeSolution>> {
        let key = (wavelength_nm.to_bits(), pol);
        if let Some(hit) = self.cache.lock().expect("mode cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let profile = self.profile(wavelength_nm, pol)?;
        let mode = Arc::new(solve_mode_with(
            &profile,
            wavelength_nm,
            pol,
            &self.settings,
        )?);
        self.cache
            .lock()
            .expect("mode cache poisoned")
            .insert(key, Arc::clone(&mode));
        Ok(mode)
    }
}
