use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not antisymmetric (relative deviation {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("matrix is not symmetric and unitary (deviation {0:.3e})")]
    NotSymmetricUnitary(f64),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("singular matrix in {context}")]
    Singular { context: String },
    #[error("{context}: solver did not converge")]
    NoConvergence { context: String },
    #[error("det[w - H(beta)] vanishes identically (flat band or ill-posed model)")]
    IllPosed,
    #[error("defective root beta = {beta:?}: multiplicity {multiplicity} but nullspace dimension {nullity}")]
    JordanBlock { beta: [f64; 2], multiplicity: usize, nullity: usize },
    #[error("gapless or critical: roots {tied:?} tie at the selection boundary")]
    GaplessOrCritical { tied: Vec<[f64; 2]> },
    #[error("selected nullvector matrix is singular (condition {condition:.3e})")]
    SingularSelection { condition: f64 },
    #[error("singular Dyson iterate at step {step}")]
    SingularIterate { step: usize },
    #[error("w lies on the spectrum of the open chain (nearest eigenvalue distance {distance:.3e})")]
    OnSpectrum { distance: f64 },
    #[error("hopping block V is singular (condition {condition:.3e}); use the Dyson path")]
    SingularHopping { condition: f64 },
    #[error("perfectly transmitting channel: I - iVGV^dagger is singular")]
    PerfectTransmission,
    #[error("residue extraction did not converge (mismatch {mismatch:.3e}); bulk may be gapless")]
    ResidueNotConverged { mismatch: f64 },
    #[error("invariant not quantized (error {error:.3e})")]
    NotQuantized { error: f64 },
    #[error("routes disagree: {0}")]
    RouteMismatch(String),
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("perturbation theory inapplicable: degenerate roots at w = 0")]
    DegenerateRoots,
    #[error("dense solver budget exceeded: {size} > {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error("invariant does not change over the range ({left} at both ends)")]
    NoSignChange { left: i64 },
    #[error("model file: {0}")]
    ModelFile(String),
}

impl Error {
    /// Short snake-case tag used in sweep status columns.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotAntisymmetric(_) => "not_antisymmetric",
            Error::NotSymmetricUnitary(_) => "not_symmetric_unitary",
            Error::ZeroPolynomial => "zero_polynomial",
            Error::Singular { .. } => "singular",
            Error::NoConvergence { .. } => "no_convergence",
            Error::IllPosed => "ill_posed",
            Error::JordanBlock { .. } => "jordan_block",
            Error::GaplessOrCritical { .. } => "gapless_or_critical",
            Error::SingularSelection { .. } => "singular_selection",
            Error::SingularIterate { .. } => "singular_iterate",
            Error::OnSpectrum { .. } => "on_spectrum",
            Error::SingularHopping { .. } => "singular_hopping",
            Error::PerfectTransmission => "perfect_transmission",
            Error::ResidueNotConverged { .. } => "residue_not_converged",
            Error::NotQuantized { .. } => "not_quantized",
            Error::RouteMismatch(_) => "route_mismatch",
            Error::SymmetryViolation(_) => "symmetry_violation",
            Error::DegenerateRoots => "degenerate_roots",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::ModelFile(_) => "model_file",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
