use thiserror::Error;

use crate::dispersion::Polarization;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wavelength {wavelength_nm} nm outside the valid range [{min_nm}, {max_nm}] nm")]
    OutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error(
        "no guided mode at {wavelength_nm:.2} nm ({polarization}): n_eff {n_eff:.7} <= bulk {bulk:.7}"
    )]
    NoGuidedMode {
        wavelength_nm: f64,
        polarization: Polarization,
        n_eff: f64,
        bulk: f64,
    },

    #[error(
        "trial-field optimum on the parameter box boundary at {wavelength_nm} nm ({polarization}): \
         alpha = ({alpha_y:.4}, {alpha_z:.4}); geometry outside the trusted regime"
    )]
    BoundaryOptimum {
        wavelength_nm: f64,
        polarization: Polarization,
        alpha_y: f64,
        alpha_z: f64,
    },

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error(
        "phase matching impossible for pump {pump_nm} nm -> signal {signal_nm} nm + idler {idler_nm:.2} nm: \
         mismatch denominator {denominator:.3e} 1/um is not positive"
    )]
    PhaseMatchingImpossible {
        pump_nm: f64,
        signal_nm: f64,
        idler_nm: f64,
        denominator: f64,
    },

    #[error("both coupling amplitudes are zero; amplitude ratio undefined")]
    UndefinedRatio,

    #[error("scan span {span_nm:.4} nm too narrow to bracket the half-maximum; try at least {suggested_nm:.4} nm")]
    SpanTooNarrow { span_nm: f64, suggested_nm: f64 },

    #[error("degenerate poling pattern: {0}")]
    DegeneratePattern(String),

    #[error("no feasible design: {0}")]
    NoFeasibleDesign(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for errors caused by bad inputs or configuration rather than the physics.
    pub fn is_config(&self) -> bool {
        matches!(
            self.root(),
            Error::Config(_) | Error::Domain(_) | Error::Consistency(_)
        )
    }
}
