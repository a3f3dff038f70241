//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p ppln-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use ppln_core::mode_solver::overlap_integral;
use ppln_core::mode_solver::TransverseField;
use ppln_core::spdc::{angular_width, sinc};
use ppln_core::{
    degree_of_entanglement, field_overlap, idler_wavelength, poling_fourier_coefficient,
    rayleigh_quotient, spectral_distinguishability, state_weights_and_entropy, synthesize_poling,
    CouplingAmplitude, DesignRequest, Designer, DualPolingDesign, Material, ModeSolution,
    Polarization, ProfileShape, Scheme, WaveguideGeometry, WaveguideModel,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SIZES: [f64; 4] = [6.5, 8.0, 10.0, 12.0];

const TYPE0_PERIOD_1: [f64; 4] = [6.7874, 6.7903, 6.7969, 6.8027];
const TYPE0_PERIOD_2: [f64; 4] = [6.8228, 6.8251, 6.8316, 6.8374];
const TYPE0_GAMMA: [f64; 4] = [0.9351, 0.9750, 0.9817, 0.9842];
const TYPE0_PERIOD_TOL: f64 = 0.015;
const TYPE0_BUDGET: Duration = Duration::from_secs(60);

const TYPE2_PERIOD_1: [f64; 4] = [4.5672, 4.5691, 4.5726, 4.5755];
const TYPE2_PERIOD_2: [f64; 4] = [3.6412, 3.6421, 3.6440, 3.6457];
const TYPE2_GAMMA: [f64; 4] = [0.9975, 0.9876, 0.9866, 0.9864];
const TYPE2_PERIOD_TOL: f64 = 0.02;

const GAMMA_TOL: f64 = 0.05;

/// (signal 1, signal 2, idler 1, idler 2) FWHM in nm.
const TYPE0_FWHM: [f64; 4] = [1.467, 1.407, 5.799, 5.788];
const TYPE0_FWHM_TOL: f64 = 0.15;
const TYPE2_FWHM: [f64; 4] = [0.499, 1.952, 1.972, 8.032];
const TYPE2_FWHM_TOL: f64 = 0.20;
const ANGULAR_WIDTH_TOL: f64 = 0.02;

const ORACLE_TOL: f64 = 1e-6;
const CLOSED_FORM_TOL: f64 = 1e-9;
const POLING_IDEAL_TOL: f64 = 0.10;
const POLING_BALANCE_TOL: f64 = 0.05;

const SUITE_BUDGET: Duration = Duration::from_secs(300);

#[derive(Default)]
struct Check {
    failures: Vec<String>,
    summary: Vec<String>,
}

impl Check {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn within(&mut self, label: &str, got: f64, want: f64, rel_tol: f64) -> f64 {
        let rel = (got / want - 1.0).abs();
        self.require(rel <= rel_tol, || {
            format!(
                "{label}: {got:.6} vs {want} ({:.2}% > {:.1}%)",
                100.0 * rel,
                100.0 * rel_tol
            )
        });
        rel
    }

    fn note(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }
}

fn geometry(size: f64) -> WaveguideGeometry {
    WaveguideGeometry::new(size, size, 1.0).unwrap()
}

fn lean_request(scheme: Scheme, size: f64) -> DesignRequest {
    let mut r = DesignRequest::reference(scheme, geometry(size));
    r.spectrum.enabled = false;
    r
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if increasing { w[0] < w[1] } else { w[0] > w[1] })
}

fn energy_conservation(c: &mut Check) {
    let i1 = idler_wavelength(519.0, 780.0).unwrap();
    let i2 = idler_wavelength(519.0, 775.0).unwrap();
    c.require((i1 - 1551.03).abs() <= 0.01, || {
        format!("idler 1 {i1:.4} nm")
    });
    c.require((i2 - 1571.19).abs() <= 0.01, || {
        format!("idler 2 {i2:.4} nm")
    });
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let pump = rng.random_range(400.0..1500.0);
        let signal = pump * rng.random_range(1.001..2.0);
        let idler = idler_wavelength(pump, signal).unwrap();
        worst = worst.max(((1.0 / pump - 1.0 / signal - 1.0 / idler) * pump).abs());
    }
    c.require(worst <= 1e-9, || format!("energy residual {worst:e}"));
    c.note(format!(
        "idlers {i1:.2}/{i2:.2} nm, worst residual {worst:.1e} over 1000 pairs"
    ));
}

fn size_trends(
    c: &mut Check,
    scheme: Scheme,
    periods: (&[f64; 4], &[f64; 4]),
    gammas: &[f64; 4],
    period_tol: f64,
) -> Vec<DualPolingDesign> {
    let designer = Designer::default();
    let designs: Vec<DualPolingDesign> = SIZES
        .iter()
        .map(|&s| designer.design(&lean_request(scheme, s)).unwrap())
        .collect();
    let (mut worst_period, mut worst_gamma): (f64, f64) = (0.0, 0.0);
    for (k, d) in designs.iter().enumerate() {
        let (l1, l2) = d.periods_um();
        let size = SIZES[k];
        worst_period = worst_period
            .max(c.within(&format!("Λ1 at {size} um"), l1, periods.0[k], period_tol))
            .max(c.within(&format!("Λ2 at {size} um"), l2, periods.1[k], period_tol));
        let dg = (d.gamma - gammas[k]).abs();
        worst_gamma = worst_gamma.max(dg);
        c.require(dg <= GAMMA_TOL, || {
            format!(
                "γ at {size} um: {:.4} vs {} (±{GAMMA_TOL})",
                d.gamma, gammas[k]
            )
        });
    }
    let g: Vec<String> = designs.iter().map(|d| format!("{:.4}", d.gamma)).collect();
    c.note(format!(
        "γ = [{}], worst Λ error {:.2}%, worst |Δγ| {worst_gamma:.4}",
        g.join(", "),
        100.0 * worst_period
    ));
    designs
}

fn type0_size_trend(c: &mut Check) {
    let start = Instant::now();
    let designs = size_trends(
        c,
        Scheme::Type0Eee,
        (&TYPE0_PERIOD_1, &TYPE0_PERIOD_2),
        &TYPE0_GAMMA,
        TYPE0_PERIOD_TOL,
    );
    let elapsed = start.elapsed();
    let gamma: Vec<f64> = designs.iter().map(|d| d.gamma).collect();
    let l1: Vec<f64> = designs.iter().map(|d| d.periods_um().0).collect();
    let l2: Vec<f64> = designs.iter().map(|d| d.periods_um().1).collect();
    c.require(strictly(&gamma, true), || {
        format!("γ not strictly increasing: {gamma:?}")
    });
    c.require(strictly(&l1, true), || format!("Λ1 not increasing: {l1:?}"));
    c.require(strictly(&l2, true), || format!("Λ2 not increasing: {l2:?}"));
    c.require(elapsed < TYPE0_BUDGET, || {
        format!("four designs took {elapsed:?}")
    });
    c.note(format!("four designs in {:.1} s", elapsed.as_secs_f64()));
}

fn type2_size_trend(c: &mut Check) {
    let designs = size_trends(
        c,
        Scheme::Type2Cross,
        (&TYPE2_PERIOD_1, &TYPE2_PERIOD_2),
        &TYPE2_GAMMA,
        TYPE2_PERIOD_TOL,
    );
    let gamma: Vec<f64> = designs.iter().map(|d| d.gamma).collect();
    c.require(strictly(&gamma, false), || {
        format!("γ not strictly decreasing: {gamma:?}")
    });
    for (d, size) in designs.iter().zip(SIZES) {
        let (l1, l2) = d.periods_um();
        c.require(l1 > l2, || format!("Λ1 {l1} ≤ Λ2 {l2} at {size} um"));
    }
}

fn full_design(scheme: Scheme, size: f64) -> DualPolingDesign {
    Designer::default()
        .design(&DesignRequest::reference(scheme, geometry(size)))
        .unwrap()
}

fn fwhms(d: &DualPolingDesign) -> [f64; 4] {
    let w = |s: &Option<ppln_core::Spectrum>| s.as_ref().unwrap().fwhm_nm;
    [
        w(&d.process_1.signal_spectrum),
        w(&d.process_2.signal_spectrum),
        w(&d.process_1.idler_spectrum),
        w(&d.process_2.idler_spectrum),
    ]
}

fn bandwidths(c: &mut Check) {
    let labels = ["signal 1", "signal 2", "idler 1", "idler 2"];
    let mut lines = Vec::new();
    for (scheme, size, want, tol) in [
        (Scheme::Type0Eee, 10.0, TYPE0_FWHM, TYPE0_FWHM_TOL),
        (Scheme::Type2Cross, 6.5, TYPE2_FWHM, TYPE2_FWHM_TOL),
    ] {
        let d = full_design(scheme, size);
        let got = fwhms(&d);
        for k in 0..4 {
            c.within(
                &format!("{} {} FWHM", scheme.label(), labels[k]),
                got[k],
                want[k],
                tol,
            );
        }
        for p in [&d.process_1, &d.process_2] {
            let (s, i) = (
                p.signal_spectrum.as_ref().unwrap(),
                p.idler_spectrum.as_ref().unwrap(),
            );
            let (ws, wi) = (
                angular_width(s.fwhm_nm, s.center_nm),
                angular_width(i.fwhm_nm, i.center_nm),
            );
            c.require((ws / wi - 1.0).abs() <= ANGULAR_WIDTH_TOL, || {
                format!("{} Δω signal {ws:.4e} vs idler {wi:.4e}", scheme.label())
            });
        }
        let g: Vec<String> = got.iter().map(|v| format!("{v:.3}")).collect();
        lines.push(format!("{} [{}] nm", scheme.label(), g.join(", ")));
    }
    c.note(lines.join("; "));
}

fn distinguishability(c: &mut Check) {
    let mut margins = Vec::new();
    for (scheme, size) in [(Scheme::Type0Eee, 10.0), (Scheme::Type2Cross, 6.5)] {
        let d = full_design(scheme, size);
        let m = d.signal_distinguishability().unwrap().unwrap();
        c.require(m.distinguishable && m.margin_nm > 0.0, || {
            format!("{} signal margin {:.3} nm", scheme.label(), m.margin_nm)
        });
        margins.push(format!("{} {:.3} nm", scheme.label(), m.margin_nm));
        let s = d.process_1.signal_spectrum.as_ref().unwrap();
        let same = spectral_distinguishability(s, s).unwrap();
        c.require(!same.distinguishable, || {
            "identical spectra resolved".into()
        });
    }
    c.note(format!("signal margins: {}", margins.join(", ")));
}

struct Gaussian(f64);

impl TransverseField for Gaussian {
    fn value(&self, y: f64, z: f64) -> f64 {
        let s2 = self.0 * self.0;
        (-(y * y + z * z) / (2.0 * s2)).exp() / (PI * s2).sqrt()
    }
    fn support(&self) -> ((f64, f64), (f64, f64)) {
        let r = 12.0 * self.0;
        ((-r, r), (-r, r))
    }
}

fn oracles(c: &mut Check) {
    let mut worst_rq: f64 = 0.0;
    for case in random_cases(20_241_016, 5) {
        let (ay, az) = case.alpha;
        let got = rayleigh_quotient(&case.profile, case.wavelength_nm, ay, az).unwrap();
        let want = rayleigh_oracle(&case.profile, case.wavelength_nm, ay, az);
        // relative to the guiding excess over the bulk, the sensitive part
        let excess = want - case.profile.bulk.powi(2);
        worst_rq = worst_rq.max(((got - want) / excess).abs());
    }
    c.require(worst_rq <= ORACLE_TOL, || {
        format!("Rayleigh quotient off by {worst_rq:e}")
    });

    let mut worst_ov: f64 = 0.0;
    for case in random_cases(99, 5) {
        let model =
            WaveguideModel::new(Material::default(), ProfileShape::default(), case.geometry);
        let modes =
            [519.0, 780.0, 1551.03].map(|nm| model.solve(nm, Polarization::Extraordinary).unwrap());
        let got = field_overlap(&modes[0], &modes[1], &modes[2]).unwrap();
        let want = overlap_oracle([&modes[0], &modes[1], &modes[2]]);
        worst_ov = worst_ov.max((got / want - 1.0).abs());
    }
    c.require(worst_ov <= ORACLE_TOL, || {
        format!("overlap off by {worst_ov:e}")
    });

    let mut worst_cf: f64 = 0.0;
    for sigma in [0.7, 2.0, 5.5] {
        let g = Gaussian(sigma);
        let got = overlap_integral([&g, &g, &g], &Default::default()).unwrap();
        worst_cf = worst_cf.max((got / (2.0 / (3.0 * PI.sqrt() * sigma)) - 1.0).abs());
    }
    c.require(worst_cf <= CLOSED_FORM_TOL, || {
        format!("triple Gaussian off by {worst_cf:e}")
    });

    let (l1, l2) = (6.7969, 6.8316);
    let pattern = synthesize_poling(l1, l2, 1.0).unwrap();
    let ideal = 4.0 / (PI * PI);
    let c1 = poling_fourier_coefficient(&pattern, 2.0 * PI / l1);
    let c2 = poling_fourier_coefficient(&pattern, 2.0 * PI / l2);
    let d1 = dft_magnitude(
        pattern_sign(&pattern),
        pattern.length_um(),
        2.0 * PI / l1,
        1_000_000,
    );
    c.within("poling |c(K1)|", c1, ideal, POLING_IDEAL_TOL);
    c.within("poling |c(K2)|", c2, ideal, POLING_IDEAL_TOL);
    c.within("poling balance", c1, c2, POLING_BALANCE_TOL);
    c.require((d1 - c1).abs() < 2e-3, || format!("DFT {d1} vs exact {c1}"));
    c.note(format!(
        "RQ {worst_rq:.1e}, overlap {worst_ov:.1e}, closed form {worst_cf:.1e}, |c(K1,K2)| = {c1:.4}/{c2:.4} vs 4/π² = {ideal:.4}"
    ));
}

fn amp(magnitude: f64) -> CouplingAmplitude {
    CouplingAmplitude {
        magnitude,
        overlap_per_um: 0.0,
        sinc_factor: 1.0,
        phase_mismatch: 0.0,
        length_cm: 1.0,
    }
}

fn properties(c: &mut Check) {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let (a, b) = (rng.random_range(0.0..1e3), rng.random_range(1e-6..1e3));
        let k = rng.random_range(1e-3..1e3);
        let g = degree_of_entanglement(&amp(a), &amp(b)).unwrap();
        let ok = (0.0..=1.0).contains(&g)
            && g == degree_of_entanglement(&amp(b), &amp(a)).unwrap()
            && (degree_of_entanglement(&amp(k * a), &amp(k * b)).unwrap() - g).abs() < 1e-12;
        c.require(ok, || format!("γ property fails at ({a}, {b}, k={k})"));
    }

    // every mode solved for the reference designs, plus random ones
    let mut modes: Vec<ModeSolution> = Vec::new();
    for scheme in [Scheme::Type0Eee, Scheme::Type2Cross] {
        for size in SIZES {
            let d = Designer::default()
                .design(&lean_request(scheme, size))
                .unwrap();
            for p in [&d.process_1, &d.process_2] {
                modes.extend([
                    p.pump_mode.clone(),
                    p.signal_mode.clone(),
                    p.idler_mode.clone(),
                ]);
            }
        }
    }
    for case in random_cases(3, 20) {
        let model =
            WaveguideModel::new(Material::default(), ProfileShape::default(), case.geometry);
        if let Ok(m) = model.solve(case.wavelength_nm, case.polarization) {
            modes.push((*m).clone());
        }
    }
    for m in &modes {
        let nb = m.bulk_index();
        c.require(nb < m.n_eff && m.n_eff < nb + m.increment(), || {
            format!(
                "n_eff {} outside ({nb}, {}) at {} nm",
                m.n_eff,
                nb + m.increment(),
                m.wavelength_nm
            )
        });
    }

    for k in 1..=20 {
        let x = PI * f64::from(k);
        c.require(sinc(x).abs() < 1e-12, || format!("sinc not null at {k}π"));
    }

    let entropy: Vec<f64> = (1..=100)
        .map(|k| {
            state_weights_and_entropy(&amp(k as f64 / 100.0), &amp(1.0))
                .unwrap()
                .entropy_bits
        })
        .collect();
    c.require(strictly(&entropy, true), || {
        "entropy not increasing in γ".into()
    });
    c.require(entropy[99] == 1.0 && entropy[98] < 1.0, || {
        "entropy ≠ 1 bit exactly at γ = 1".into()
    });
    c.note(format!(
        "1000 γ pairs, {} modes bracketed, 20 sinc nulls, 100-point entropy grid",
        modes.len()
    ));
}

type Criterion = (&'static str, fn(&mut Check));

fn main() {
    let criteria: [Criterion; 7] = [
        ("energy conservation", energy_conservation),
        ("type-0 size trend", type0_size_trend),
        ("type-II size trend", type2_size_trend),
        ("bandwidths", bandwidths),
        ("spectral distinguishability", distinguishability),
        ("oracle suites", oracles),
        ("property suites", properties),
    ];
    let suite = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut check = Check::default();
        if let Err(panic) = catch_unwind(AssertUnwindSafe(|| run(&mut check))) {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            check.failures.push(format!("panicked: {msg}"));
        }
        if k == criteria.len() - 1 {
            let total = suite.elapsed();
            check.require(total < SUITE_BUDGET, || format!("suite took {total:?}"));
        }
        let verdict = if check.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "[{verdict}] criterion {}: {name} ({:.1} s) {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            check.summary.join("; ")
        );
        for f in &check.failures {
            println!("       {f}");
        }
        if !check.failures.is_empty() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        criteria.len() - failed,
        criteria.len(),
        suite.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
