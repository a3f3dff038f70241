//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals and
//! rectangles.
//!
//! Each panel is integrated with the 15-point Kronrod rule; the embedded
//! 7-point Gauss estimate gives the panel error. The panel with the largest
//! error is bisected until the summed error drops below the tolerance.

// Nodes and weights as tabulated (QUADPACK), beyond f64 precision.
#![allow(clippy::excessive_precision)]

use std::cell::RefCell;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            initial_panels: 8,
            max_panels: 4000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut m = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (fl, fr) = (f(c - dx), f(c + dx));
        let s = fl + fr;
        k += WGK[j] * s;
        m += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Panel {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
        magnitude: m * h.abs(),
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let n = self.initial_panels.max(1);
        let step = (b - a) / n as f64;
        let mut heap: BinaryHeap<Panel> = (0..n)
            .map(|k| {
                let lo = a + step * k as f64;
                let hi = if k + 1 == n { b } else { lo + step };
                kronrod(&f, lo, hi)
            })
            .collect();
        loop {
            let value: f64 = heap.iter().map(|p| p.value).sum();
            let error: f64 = heap.iter().map(|p| p.error).sum();
            let magnitude: f64 = heap.iter().map(|p| p.magnitude).sum();
            if !value.is_finite() {
                return Err(Error::Convergence(format!(
                    "non-finite integrand on [{a}, {b}]"
                )));
            }
            // roundoff floor for integrands that cancel to nearly nothing
            let floor = 100.0 * f64::EPSILON * magnitude;
            if error <= self.abs_tol.max(self.rel_tol * value.abs()).max(floor) {
                return Ok(value);
            }
            if heap.len() >= self.max_panels {
                return Err(Error::Convergence(format!(
                    "{} panels on [{a}, {b}], estimate {value:e}, error {error:e}",
                    heap.len()
                )));
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                return Err(Error::Convergence(format!(
                    "panel [{}, {}] cannot be bisected further",
                    worst.a, worst.b
                )));
            }
            heap.push(kronrod(&f, worst.a, mid));
            heap.push(kronrod(&f, mid, worst.b));
        }
    }

    /// Iterated integral over `y ∈ [y0, y1]` (outer) and `z ∈ [z0, z1]` (inner).
    pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
        &self,
        f: F,
        (y0, y1): (f64, f64),
        (z0, z1): (f64, f64),
    ) -> Result<f64> {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let inner = |y: f64| match self.integrate(|z| f(y, z), z0, z1) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let outer = self.integrate(inner, y0, y1);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        outer
    }
}
