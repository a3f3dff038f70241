//! Independent oracles shared by the oracle and acceptance targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use ppln_core::mode_solver::{ModeSolution, ProfileShape, WaveguideGeometry};
use ppln_core::{make_profile, IndexProfile, Material, Polarization, PolingPattern};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const DENSE_POINTS: usize = 2001;

/// Composite trapezoid rule on an `n × n` grid.
pub fn trapezoid_2d(
    f: impl Fn(f64, f64) -> f64,
    (y0, y1): (f64, f64),
    (z0, z1): (f64, f64),
    n: usize,
) -> f64 {
    let hy = (y1 - y0) / (n - 1) as f64;
    let hz = (z1 - z0) / (n - 1) as f64;
    let weight = |k: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let mut total = 0.0;
    for j in 0..n {
        let y = y0 + hy * j as f64;
        let mut row = 0.0;
        for k in 0..n {
            row += weight(k) * f(y, z0 + hz * k as f64);
        }
        total += weight(j) * row;
    }
    total * hy * hz
}

/// `E = exp(−(α_y y/w)²) (z/h) exp(−(α_z z/h)²)` and its gradient, coded
/// from the formula rather than taken from the library.
#[derive(Debug, Clone, Copy)]
pub struct Trial {
    pub ay: f64,
    pub az: f64,
    pub w: f64,
    pub h: f64,
}

impl Trial {
    pub fn value(&self, y: f64, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        let (u, v) = (self.ay * y / self.w, self.az * z / self.h);
        (-u * u).exp() * (z / self.h) * (-v * v).exp()
    }

    pub fn gradient_squared(&self, y: f64, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        let (u, v) = (self.ay * y / self.w, self.az * z / self.h);
        let gy = (-u * u).exp();
        let gz = (z / self.h) * (-v * v).exp();
        let dy = -2.0 * self.ay * u / self.w * gy;
        let dz = (1.0 - 2.0 * v * v) * (-v * v).exp() / self.h;
        (dy * gz).powi(2) + (gy * dz).powi(2)
    }

    pub fn y_window(&self) -> f64 {
        10.0 * self.w / self.ay
    }

    pub fn z_window(&self) -> f64 {
        12.0 * self.h / self.az
    }
}

/// Dense-grid Rayleigh quotient `n_eff²` for one trial field.
pub fn rayleigh_oracle(profile: &IndexProfile, wavelength_nm: f64, ay: f64, az: f64) -> f64 {
    let t = Trial {
        ay,
        az,
        w: profile.width_um,
        h: profile.depth_um,
    };
    let k0 = 2.0 * PI / (wavelength_nm * 1e-3);
    let nb2 = profile.bulk * profile.bulk;
    let y = (0.0, t.y_window());
    let z = (0.0, t.z_window());
    let num = trapezoid_2d(
        |y, z| {
            let e = t.value(y, z);
            (profile.index_squared(y, z) - nb2) * e * e - t.gradient_squared(y, z) / (k0 * k0)
        },
        y,
        z,
        DENSE_POINTS,
    );
    let den = trapezoid_2d(|y, z| t.value(y, z).powi(2), y, z, DENSE_POINTS);
    nb2 + num / den
}

/// Dense-grid overlap of three modes, each normalized on the grid itself.
pub fn overlap_oracle(modes: [&ModeSolution; 3]) -> f64 {
    let trials = modes.map(|m| Trial {
        ay: m.alpha_y,
        az: m.alpha_z,
        w: m.profile.width_um,
        h: m.profile.depth_um,
    });
    let y = trials.iter().map(Trial::y_window).fold(0.0, f64::max);
    let z = trials.iter().map(Trial::z_window).fold(0.0, f64::max);
    let norms = trials.map(|t| {
        trapezoid_2d(
            |y, z| t.value(y, z).powi(2),
            (-y, y),
            (0.0, z),
            DENSE_POINTS,
        )
        .sqrt()
    });
    let product = trapezoid_2d(
        |y, z| trials.iter().map(|t| t.value(y, z)).product(),
        (-y, y),
        (0.0, z),
        DENSE_POINTS,
    );
    product / (norms[0] * norms[1] * norms[2])
}

pub struct RandomCase {
    pub profile: IndexProfile,
    pub geometry: WaveguideGeometry,
    pub wavelength_nm: f64,
    pub polarization: Polarization,
    pub alpha: (f64, f64),
}

/// Reproducible random profiles spanning the supported regime.
pub fn random_cases(seed: u64, count: usize) -> Vec<RandomCase> {
    let mut rng = StdRng::seed_from_u64(seed);
    let material = Material::default();
    (0..count)
        .map(|_| {
            let geometry = WaveguideGeometry::new(
                rng.random_range(5.0..14.0),
                rng.random_range(5.0..14.0),
                1.0,
            )
            .unwrap();
            let wavelength_nm = rng.random_range(520.0..1600.0);
            let polarization = if rng.random_bool(0.5) {
                Polarization::Extraordinary
            } else {
                Polarization::Ordinary
            };
            let bulk = material.bulk_index(polarization, wavelength_nm).unwrap();
            let increment = rng.random_range(0.002..0.004);
            let profile =
                make_profile(&geometry, bulk, increment, ProfileShape::default()).unwrap();
            RandomCase {
                profile,
                geometry,
                wavelength_nm,
                polarization,
                alpha: (rng.random_range(0.8..3.0), rng.random_range(0.8..3.0)),
            }
        })
        .collect()
}

/// Riemann sum of `(1/L) Σ d(x) e^{−iKx} Δx` on midpoints of a uniform grid.
pub fn dft_magnitude(sign: impl Fn(f64) -> f64, length_um: f64, k: f64, samples: usize) -> f64 {
    let dx = length_um / samples as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..samples {
        let x = (j as f64 + 0.5) * dx;
        let d = sign(x);
        re += d * (k * x).cos();
        im -= d * (k * x).sin();
    }
    (re * dx).hypot(im * dx) / length_um
}

/// The dual-period sign function sampled directly, without digitization.
pub fn ideal_dual_sign(period_1_um: f64, period_2_um: f64) -> impl Fn(f64) -> f64 {
    move |x| ((2.0 * PI * x / period_1_um).cos() - (2.0 * PI * x / period_2_um).cos()).signum()
}

pub fn pattern_sign(pattern: &PolingPattern) -> impl Fn(f64) -> f64 + '_ {
    move |x| pattern.sign_at(x)
}
