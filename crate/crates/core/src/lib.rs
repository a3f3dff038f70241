//! Simulation and design of dual-periodically-poled titanium-indiffused
//! lithium niobate waveguides generating two-pair frequency-entangled photons
//! by spontaneous parametric down-conversion.

// Validation is written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod dispersion;
pub mod error;
pub mod mode_solver;
pub mod optimize;
pub mod poling;
pub mod quadrature;
pub mod spdc;

pub use design::{
    DesignRequest, Designer, DualPolingDesign, GeometryBounds, IndexTreatment, Pairing,
    ProcessDesign, Scheme, SpectrumSettings, SweepResult, SweepRow, SweepValues,
};
pub use dispersion::{IndexIncrementTable, Material, Polarization, SellmeierModel};
pub use error::{Error, Result};
pub use mode_solver::{
    field_overlap, make_profile, rayleigh_quotient, solve_mode, IndexProfile, ModeSolution,
    ProfileShape, WaveguideGeometry, WaveguideModel,
};
pub use poling::{
    ideal_dual_poling_terms, poling_fourier_coefficient, poling_fourier_component,
    synthesize_poling, PolingPattern,
};
pub use spdc::{
    coupling_amplitude, degree_of_entanglement, idler_wavelength, phase_mismatch, qpm_period,
    spectral_distinguishability, spectrum_scan, state_weights_and_entropy, CouplingAmplitude,
    FrozenIndices, IndexProvider, ScanAxis, SpdcProcess, Spectrum, Wave,
};
