use thiserror::Error;

/// Every failure the laboratory can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    Rank { expected: String, got: String },

    #[error("conjugate symmetry violated: {0}")]
    Symmetry(String),

    #[error("matrix outside the positivity ball: {0}")]
    OutOfRange(String),

    #[error("grid cannot resolve the requested content: {0}")]
    Resolution(String),

    #[error("energy window violated at slice l={l}: rho_l = {rho:e}")]
    EnergyWindow { l: usize, rho: f64 },

    #[error("transport step underflow: {0}")]
    TransportStiffness(String),

    #[error("accuracy budget exceeded: {0}")]
    Accuracy(String),

    #[error("amplitude outside the geometric-lemma ball at k={k:?}, l={l}, x={x:?}: |R/rho - Id| = {dist:e}")]
    AmplitudeDomain {
        k: [i32; 3],
        l: usize,
        x: [f64; 3],
        dist: f64,
    },

    #[error("schedule infeasible in strict mode: {}", .0.join("; "))]
    ScheduleInfeasible(Vec<String>),

    #[error("aliasing guard: {0}")]
    Aliasing(String),

    #[error("assembly check failed: {0}")]
    Assembly(String),

    #[error("integrator step underflow: {0}")]
    Stiffness(String),

    #[error("profile construction failed: {0}")]
    Construction(String),

    #[error("snapshot format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },

    #[error("config error in `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
