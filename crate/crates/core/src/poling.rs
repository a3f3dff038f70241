//! Dual-periodic poling: digitizing `sgn[cos K₁x − cos K₂x]` into domain
//! boundaries and evaluating the Fourier content of the result.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Domain boundaries along the crystal. The sign of the nonlinearity starts
/// at `initial_sign` and flips at each boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolingPattern {
    boundaries_um: Vec<f64>,
    length_um: f64,
    initial_sign: i8,
}

impl PolingPattern {
    pub fn new(boundaries_um: Vec<f64>, length_um: f64, initial_sign: i8) -> Result<Self> {
        if !(length_um > 0.0 && length_um.is_finite()) {
            return Err(Error::Domain(format!(
                "length {length_um} um must be positive"
            )));
        }
        if initial_sign != 1 && initial_sign != -1 {
            return Err(Error::Domain(format!(
                "initial sign {initial_sign} must be ±1"
            )));
        }
        if boundaries_um.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain(
                "boundaries must be strictly increasing".into(),
            ));
        }
        if let (Some(&first), Some(&last)) = (boundaries_um.first(), boundaries_um.last()) {
            if !(first > 0.0 && last < length_um) {
                return Err(Error::Domain(format!(
                    "boundaries must lie inside (0, {length_um}) um"
                )));
            }
        }
        Ok(PolingPattern {
            boundaries_um,
            length_um,
            initial_sign,
        })
    }

    pub fn boundaries_um(&self) -> &[f64] {
        &self.boundaries_um
    }

    pub fn length_um(&self) -> f64 {
        self.length_um
    }

    pub fn initial_sign(&self) -> i8 {
        self.initial_sign
    }

    /// Domains as `(start, end, sign)`.
    pub fn domains(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let edges: Vec<f64> = std::iter::once(0.0)
            .chain(self.boundaries_um.iter().copied())
            .chain(std::iter::once(self.length_um))
            .collect();
        let first = f64::from(self.initial_sign);
        (0..edges.len() - 1).map(move |k| {
            let sign = if k % 2 == 0 { first } else { -first };
            (edges[k], edges[k + 1], sign)
        })
    }

    pub fn sign_at(&self, x_um: f64) -> f64 {
        let flips = self.boundaries_um.partition_point(|&b| b <= x_um);
        let first = f64::from(self.initial_sign);
        if flips % 2 == 0 {
            first
        } else {
            -first
        }
    }

    /// One boundary position per line, in µm with six decimals.
    pub fn boundary_list(&self) -> String {
        let mut out = String::with_capacity(self.boundaries_um.len() * 16);
        for b in &self.boundaries_um {
            out.push_str(&format!("{b:.6}\n"));
        }
        out
    }
}

/// Digitizes the dual-period pattern over `length_cm`.
///
/// Boundaries are the sign changes of `cos K₁x − cos K₂x`, located on a grid of
/// `min(Λ₁, Λ₂)/200` and refined by bisection to 1 nm. Domains thinner than
/// the grid step (near beat nodes) are merged into their neighbours. The
/// first domain's sign is chosen so that the fundamental components are
/// `−4/π²` at `±K₁` and `+4/π²` at `±K₂`.
pub fn synthesize_poling(
    period_1_um: f64,
    period_2_um: f64,
    length_cm: f64,
) -> Result<PolingPattern> {
    for p in [period_1_um, period_2_um] {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!(
                "poling period {p} um must be positive"
            )));
        }
    }
    if !(length_cm > 0.0) {
        return Err(Error::Domain(format!(
            "length {length_cm} cm must be positive"
        )));
    }
    if (period_1_um - period_2_um).abs() <= 1e-12 * period_1_um {
        return Err(Error::DegeneratePattern(format!(
            "periods are equal ({period_1_um} um); a single-period grating has no dual-period form"
        )));
    }
    let length_um = length_cm * 1e4;
    let (k1, k2) = (2.0 * PI / period_1_um, 2.0 * PI / period_2_um);
    let h = |x: f64| (k1 * x).cos() - (k2 * x).cos();

    let step = period_1_um.min(period_2_um) / 200.0;
    let samples = (length_um / step).ceil() as usize;
    let mut boundaries = Vec::new();
    let mut x_prev = 0.5 * step;
    let mut h_prev = h(x_prev);
    // sign of cos K₁x − cos K₂x in the first domain
    let first_sign = h_prev.signum();
    for k in 1..=samples {
        let x = (0.5 + k as f64) * step;
        let x = x.min(length_um);
        let hx = h(x);
        if hx != 0.0 && h_prev != 0.0 && hx.signum() != h_prev.signum() {
            let (mut a, mut b) = (x_prev, x);
            while b - a > 1e-3 {
                let m = 0.5 * (a + b);
                if h(m).signum() == h_prev.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let boundary = 0.5 * (a + b);
            if boundary > 0.0 && boundary < length_um {
                boundaries.push(boundary);
            }
        }
        if hx != 0.0 {
            h_prev = hx;
        }
        x_prev = x;
        if x >= length_um {
            break;
        }
    }
    if boundaries.is_empty() {
        return Err(Error::DegeneratePattern(
            "no domain boundaries inside the crystal".into(),
        ));
    }
    // d(x) = −sgn[cos K₁x − cos K₂x] carries the stated component signs
    PolingPattern::new(boundaries, length_um, -(first_sign as i8))
}

/// `(1/L) ∫₀ᴸ d(x) e^{−iKx} dx`, integrated exactly domain by domain.
/// `k_per_um` in rad/µm. Returns `(re, im)`.
pub fn poling_fourier_component(pattern: &PolingPattern, k_per_um: f64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b, sign) in pattern.domains() {
        if k_per_um == 0.0 {
            re += sign * (b - a);
            continue;
        }
        let (sa, ca) = (k_per_um * a).sin_cos();
        let (sb, cb) = (k_per_um * b).sin_cos();
        re += sign * (sb - sa) / k_per_um;
        im += sign * (cb - ca) / k_per_um;
    }
    (re / pattern.length_um, im / pattern.length_um)
}

pub fn poling_fourier_coefficient(pattern: &PolingPattern, k_per_um: f64) -> f64 {
    let (re, im) = poling_fourier_component(pattern, k_per_um);
    re.hypot(im)
}

/// Ideal four-term expansion `(K, coefficient)`: `−4/π²` at `±K₁`, `+4/π²` at `±K₂`.
pub fn ideal_dual_poling_terms(period_1_um: f64, period_2_um: f64) -> [(f64, f64); 4] {
    let c = 4.0 / (PI * PI);
    let (k1, k2) = (2.0 * PI / period_1_um, 2.0 * PI / period_2_um);
    [(k1, -c), (-k1, -c), (k2, c), (-k2, c)]
}
