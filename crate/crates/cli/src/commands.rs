use std::fmt::Write as _;

use ppln_core::spdc::{spectrum_scan, spectrum_scan_auto, IndexProvider, ScanAxis, Spectrum};
use ppln_core::{
    poling_fourier_coefficient, synthesize_poling, DesignRequest, Designer, DualPolingDesign,
    IndexTreatment, Pairing, Polarization, ProcessDesign, SpdcProcess, SweepResult,
};
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::format::{json, machine, report, sig};
use crate::CliError;

/// Refractive indices differ from the substrate in the fourth decimal, so
/// reports print them with more digits than other quantities.
const INDEX_DIGITS: usize = 7;

/// Text for the destination, plus an optional summary for the terminal when
/// the main output goes to a file.
pub struct Output {
    pub body: String,
    pub summary: Option<String>,
}

impl Output {
    fn plain(body: String) -> Self {
        Output {
            body,
            summary: None,
        }
    }
}

fn designer(config: &RunConfig, command: &str) -> Result<Designer, CliError> {
    Ok(Designer::new(config.material(command)?, config.shape()?))
}

fn geometry_line(request: &DesignRequest) -> String {
    let g = request.geometry;
    format!(
        "{}, w = {} um, h = {} um, L = {} cm",
        request.scheme.label(),
        report(g.width_um),
        report(g.depth_um),
        report(g.length_cm)
    )
}

fn pol(p: Polarization) -> char {
    p.symbol()
}

pub fn index(config: &RunConfig, format: Format) -> Result<Output, CliError> {
    let request = config.request("index")?;
    let designer = designer(config, "index")?;
    let model = designer.model(request.geometry);
    let [p1, p2] = request.scheme.polarizations();
    let idler = |s: f64| ppln_core::idler_wavelength(request.pump_nm, s);
    let waves = [
        ("pump", request.pump_nm, p1[0]),
        ("signal_1", request.signal_1_nm, p1[1]),
        ("idler_1", idler(request.signal_1_nm)?, p1[2]),
        ("signal_2", request.signal_2_nm, p2[1]),
        ("idler_2", idler(request.signal_2_nm)?, p2[2]),
    ];
    let mut rows = Vec::new();
    for (name, nm, p) in waves {
        let bulk = designer.material.bulk_index(p, nm)?;
        let increment = designer.material.surface_increment(p, nm)?;
        let mode = model
            .solve(nm, p)
            .map_err(|e| CliError::from(e).context(name))?;
        rows.push((name, nm, p, bulk, increment, mode.n_eff));
    }
    let body = match format {
        Format::Text => {
            let mut out = format!("# effective indices: {}\n", geometry_line(&request));
            let _ = writeln!(
                out,
                "{:<10} {:>13} {:>4} {:>10} {:>10} {:>10}",
                "wave", "wavelength_nm", "pol", "n_bulk", "delta_n", "n_eff"
            );
            for (name, nm, p, bulk, inc, n_eff) in &rows {
                let _ = writeln!(
                    out,
                    "{:<10} {:>13} {:>4} {:>10} {:>10} {:>10}",
                    name,
                    report(*nm),
                    pol(*p),
                    sig(*bulk, INDEX_DIGITS),
                    report(*inc),
                    sig(*n_eff, INDEX_DIGITS)
                );
            }
            out
        }
        Format::Records => json(Value::Array(
            rows.iter()
                .map(|(name, nm, p, bulk, inc, n_eff)| {
                    json!({
                        "wave": name,
                        "wavelength_nm": nm,
                        "polarization": p,
                        "n_bulk": bulk,
                        "delta_n": inc,
                        "n_eff": n_eff,
                    })
                })
                .collect(),
        )),
    };
    Ok(Output::plain(body))
}

fn process_record(p: &ProcessDesign) -> Value {
    let spectrum = |s: &Option<Spectrum>| {
        s.as_ref()
            .map(|s| json!({"fwhm_nm": s.fwhm_nm, "phase_window_nm": s.phase_window_nm}))
            .unwrap_or(Value::Null)
    };
    json!({
        "pump_nm": p.process.pump_nm,
        "signal_nm": p.process.signal_nm,
        "idler_nm": p.process.idler_nm,
        "polarizations": [p.process.pump_pol, p.process.signal_pol, p.process.idler_pol],
        "n_eff": [p.process.n_pump, p.process.n_signal, p.process.n_idler],
        "period_um": p.process.period_um,
        "overlap_per_um": p.amplitude.overlap_per_um,
        "amplitude": p.amplitude.magnitude,
        "signal_spectrum": spectrum(&p.signal_spectrum),
        "idler_spectrum": spectrum(&p.idler_spectrum),
    })
}

fn design_record(d: &DualPolingDesign) -> Value {
    let g = d.request.geometry;
    json!({
        "scheme": d.request.scheme,
        "geometry": {"width_um": g.width_um, "depth_um": g.depth_um, "length_cm": g.length_cm},
        "process_1": process_record(&d.process_1),
        "process_2": process_record(&d.process_2),
        "gamma": d.gamma,
        "weights": [d.state.weights.0, d.state.weights.1],
        "entropy_bits": d.state.entropy_bits,
        "signal_margin_nm": d.signal_distinguishability().transpose().ok().flatten().map(|m| m.margin_nm),
    })
}

fn design_report(d: &DualPolingDesign) -> String {
    let mut out = format!("design: {}\n", geometry_line(&d.request));
    for (k, p) in [(1, &d.process_1), (2, &d.process_2)] {
        let q = &p.process;
        let _ = writeln!(
            out,
            "process {k}: {} nm ({}) -> {} nm ({}) + {} nm ({})",
            report(q.pump_nm),
            pol(q.pump_pol),
            report(q.signal_nm),
            pol(q.signal_pol),
            report(q.idler_nm),
            pol(q.idler_pol)
        );
        let _ = writeln!(
            out,
            "  n_eff pump/signal/idler  {} / {} / {}",
            sig(q.n_pump, INDEX_DIGITS),
            sig(q.n_signal, INDEX_DIGITS),
            sig(q.n_idler, INDEX_DIGITS)
        );
        let _ = writeln!(out, "  period                   {} um", report(q.period_um));
        let _ = writeln!(
            out,
            "  overlap                  {} 1/um",
            report(p.amplitude.overlap_per_um)
        );
        let _ = writeln!(
            out,
            "  relative amplitude       {}",
            report(p.amplitude.magnitude)
        );
        if let (Some(s), Some(i)) = (&p.signal_spectrum, &p.idler_spectrum) {
            let _ = writeln!(
                out,
                "  FWHM signal/idler        {} / {} nm",
                report(s.fwhm_nm),
                report(i.fwhm_nm)
            );
        }
    }
    let _ = writeln!(out, "gamma                      {}", report(d.gamma));
    let _ = writeln!(
        out,
        "state weights              {} / {}",
        report(d.state.weights.0),
        report(d.state.weights.1)
    );
    let _ = writeln!(
        out,
        "entanglement entropy       {} bits",
        report(d.state.entropy_bits)
    );
    if let Some(Ok(m)) = d.signal_distinguishability() {
        let _ = writeln!(
            out,
            "signal spectra             {} (margin {} nm)",
            if m.distinguishable {
                "distinguishable"
            } else {
                "overlapping"
            },
            report(m.margin_nm)
        );
    }
    out
}

pub fn design(config: &RunConfig, format: Format) -> Result<Output, CliError> {
    let request = config.request("design")?;
    let d = designer(config, "design")?.design(&request)?;
    Ok(Output::plain(match format {
        Format::Text => design_report(&d),
        Format::Records => json(design_record(&d)),
    }))
}

fn csv_field(text: &str) -> String {
    format!("\"{}\"", text.replace('"', "\"\""))
}

fn sweep_body(result: &SweepResult, format: Format) -> String {
    match format {
        Format::Text => {
            let mut out = String::from("depth_um,width_um,status,gamma,period_1_um,period_2_um\n");
            for row in &result.rows {
                let (d, w) = (machine(row.depth_um), machine(row.width_um));
                let _ = match &row.outcome {
                    Ok(v) => writeln!(
                        out,
                        "{d},{w},ok,{},{},{}",
                        machine(v.gamma),
                        machine(v.period_1_um),
                        machine(v.period_2_um)
                    ),
                    Err(e) => writeln!(out, "{d},{w},{},,,", csv_field(&format!("error: {e}"))),
                };
            }
            out
        }
        Format::Records => json(json!({
            "scheme": result.scheme,
            "rows": result.rows.iter().map(|row| match &row.outcome {
                Ok(v) => json!({
                    "depth_um": row.depth_um,
                    "width_um": row.width_um,
                    "status": "ok",
                    "gamma": v.gamma,
                    "period_1_um": v.period_1_um,
                    "period_2_um": v.period_2_um,
                }),
                Err(e) => json!({
                    "depth_um": row.depth_um,
                    "width_um": row.width_um,
                    "status": "error",
                    "error": e,
                }),
            }).collect::<Vec<_>>(),
        })),
    }
}

pub struct SweepOverrides {
    pub depths_um: Option<Vec<f64>>,
    pub widths_um: Option<Vec<f64>>,
    pub pairing: Option<Pairing>,
}

pub fn sweep(
    config: &RunConfig,
    overrides: &SweepOverrides,
    format: Format,
) -> Result<Output, CliError> {
    let request = config.request("sweep")?;
    let block = config.sweep.clone().unwrap_or_default();
    let depths = overrides.depths_um.clone().unwrap_or(block.depths_um);
    let widths = overrides.widths_um.clone().unwrap_or(block.widths_um);
    let pairing = overrides.pairing.unwrap_or(block.pairing);
    if depths.is_empty() || widths.is_empty() {
        return Err(CliError::Config(
            "sweep needs non-empty depths_um and widths_um ([sweep] block or --depths/--widths)"
                .into(),
        ));
    }
    let result = designer(config, "sweep")?.sweep(&request, &depths, &widths, pairing)?;
    let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
    Ok(Output {
        body: sweep_body(&result, format),
        summary: Some(format!(
            "sweep: {} rows, {} ok, {failed} failed\n",
            result.rows.len(),
            result.rows.len() - failed
        )),
    })
}

pub struct SpectrumOverrides {
    pub process: Option<u8>,
    pub axis: Option<ScanAxis>,
    pub span_nm: Option<f64>,
    pub samples: Option<usize>,
}

pub fn spectrum(
    config: &RunConfig,
    overrides: &SpectrumOverrides,
    format: Format,
) -> Result<Output, CliError> {
    let request = config.request("spectrum")?;
    let scan = config.scan("spectrum")?;
    let which = overrides.process.unwrap_or(scan.process);
    let axis = overrides.axis.unwrap_or(scan.axis);
    let samples = overrides.samples.unwrap_or(scan.samples);
    let span = overrides.span_nm.or(scan.span_nm);
    let [p1, p2] = request.scheme.polarizations();
    let (signal_nm, pols) = match which {
        1 => (request.signal_1_nm, p1),
        2 => (request.signal_2_nm, p2),
        other => {
            return Err(CliError::Config(format!(
                "[scan] process must be 1 or 2, got {other}"
            )))
        }
    };
    let model = designer(config, "spectrum")?.model(request.geometry);
    let process = SpdcProcess::phase_matched(request.pump_nm, signal_nm, pols, &model)?;
    let frozen = process.frozen_indices();
    let indices: &dyn IndexProvider = match scan.indices {
        IndexTreatment::Frozen => &frozen,
        IndexTreatment::Waveguide => &model,
    };
    let length = request.geometry.length_cm;
    let s = match span {
        Some(span) => spectrum_scan(&process, axis, span, samples, length, indices)?,
        None => spectrum_scan_auto(&process, axis, samples, length, indices)?,
    };
    let axis_name = match axis {
        ScanAxis::Signal => "signal",
        ScanAxis::Idler => "idler",
    };
    let summary = format!(
        "# {} process {which} {axis_name} scan, center {} nm, fwhm {} nm, phase window {} nm\n",
        geometry_line(&request),
        report(s.center_nm),
        report(s.fwhm_nm),
        report(s.phase_window_nm)
    );
    let body = match format {
        Format::Text => {
            let mut out = summary.clone();
            let _ = writeln!(out, "# fwhm_nm {}", machine(s.fwhm_nm));
            let _ = writeln!(out, "# phase_window_nm {}", machine(s.phase_window_nm));
            out.push_str("# wavelength_nm gain\n");
            for (l, g) in s.wavelengths_nm.iter().zip(&s.gain) {
                let _ = writeln!(out, "{} {}", machine(*l), machine(*g));
            }
            out
        }
        Format::Records => json(json!({
            "process": which,
            "axis": axis_name,
            "center_nm": s.center_nm,
            "fwhm_nm": s.fwhm_nm,
            "phase_window_nm": s.phase_window_nm,
            "length_cm": s.length_cm,
            "wavelength_nm": s.wavelengths_nm,
            "gain": s.gain,
        })),
    };
    Ok(Output {
        body,
        summary: Some(summary.trim_start_matches("# ").to_string()),
    })
}

pub struct PolingOverrides {
    pub period_1_um: Option<f64>,
    pub period_2_um: Option<f64>,
}

pub fn poling(
    config: &RunConfig,
    overrides: &PolingOverrides,
    format: Format,
) -> Result<Output, CliError> {
    let block = config.poling.clone().unwrap_or_default();
    let given = (
        overrides.period_1_um.or(block.period_1_um),
        overrides.period_2_um.or(block.period_2_um),
    );
    let length_cm = config.geometry.as_ref().map_or(1.0, |g| g.length_cm);
    let (l1, l2) = match given {
        (Some(a), Some(b)) => (a, b),
        (None, None) => {
            let mut request = config.request("poling")?;
            request.spectrum.enabled = false;
            designer(config, "poling")?.design(&request)?.periods_um()
        }
        _ => {
            return Err(CliError::Config(
                "give both poling periods or neither (to derive them from the design)".into(),
            ))
        }
    };
    let pattern = synthesize_poling(l1, l2, length_cm)?;
    let k = |p: f64| 2.0 * std::f64::consts::PI / p;
    let (c1, c2) = (
        poling_fourier_coefficient(&pattern, k(l1)),
        poling_fourier_coefficient(&pattern, k(l2)),
    );
    let summary = format!(
        "poling: periods {} / {} um, {} boundaries over {} cm, |c(K1)| {}, |c(K2)| {}\n",
        report(l1),
        report(l2),
        pattern.boundaries_um().len(),
        report(length_cm),
        report(c1),
        report(c2)
    );
    let body = match format {
        Format::Text => pattern.boundary_list(),
        Format::Records => json(json!({
            "period_1_um": l1,
            "period_2_um": l2,
            "length_um": pattern.length_um(),
            "initial_sign": pattern.initial_sign(),
            "fourier_k1": c1,
            "fourier_k2": c2,
            "boundaries_um": pattern.boundaries_um(),
        })),
    };
    Ok(Output {
        body,
        summary: Some(summary),
    })
}
