use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("guard band violated: population {population:.3e} on the top two sites (n_max = {n_max})")]
    GuardBandViolation { n_max: usize, population: f64 },

    #[error("site {site} outside lattice 0..={n_max}")]
    SiteOutOfRange { site: usize, n_max: usize },

    #[error("site {site} unoccupied (population {population:.3e})")]
    SiteUnoccupied { site: usize, population: f64 },

    #[error("lattice with n_max = {n_max} is too small, need at least {required}")]
    LatticeTooSmall { n_max: usize, required: usize },

    #[error("amplitude vectors have different lengths ({up} vs {down})")]
    ShapeMismatch { up: usize, down: usize },

    #[error("quasi-energy gap closed (delta0 = {delta0:.3e}, delta_pi = {delta_pi:.3e})")]
    GapClosed { delta0: f64, delta_pi: f64 },

    #[error("no chiral axis found (residual {residual:.3e})")]
    ChiralAxisNotFound { residual: f64 },

    #[error("winding {value} is not close to an integer")]
    NonIntegerWinding { value: f64 },

    #[error("frame windings ({nu_prime}, {nu_dprime}) have even sum")]
    InconsistentWindings { nu_prime: i32, nu_dprime: i32 },

    #[error("Bloch vector undefined at k = {k} (sin E = {sin_e:.3e})")]
    DegeneratePoint { k: f64, sin_e: f64 },

    #[error("eigenphase {eigenphase} is ambiguous between 0 and pi")]
    DegenerateClassification { eigenphase: f64 },

    #[error("profile has {sites} usable sites, need at least {required}")]
    InsufficientSupport { sites: usize, required: usize },

    #[error("population loss below floor for every ramp length")]
    InsufficientLoss,

    #[error("integrator step too coarse: dt * max|H| = {product:.3e}")]
    StepTooCoarse { product: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid pulse config: {0}")]
    InvalidPulseConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
