use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("basis: {0}")]
    Basis(#[from] BasisError),
    #[error("dg_forms: {0}")]
    Forms(#[from] FormsError),
    #[error("assembly: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("models: {0}")]
    Model(#[from] ModelError),
    #[error("timestepping: {0}")]
    Time(#[from] TimeError),
    #[error("verification: {0}")]
    Verification(#[from] VerificationError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from invalid input rather than a numerical
    /// breakdown.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Solver(_) | Error::Basis(BasisError::SingularGram { .. }) => false,
            Error::Verification(VerificationError::Level { source, .. }) => source.is_config(),
            _ => true,
        }
    }
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("topology: {0}")]
    Topology(String),
    #[error("invalid element {element}: {msg}")]
    Element { element: usize, msg: String },
    #[error("invalid generator input: {0}")]
    Input(String),
    #[error("voronoi generation failed after {0} retries: {1}")]
    Degenerate(usize, String),
    #[error("point ({0}, {1}) lies outside element {2}")]
    Lookup(f64, f64, usize),
}

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("polynomial degree must be at least 1 (element {element})")]
    Degree { element: usize },
    #[error("degree list has {got} entries for {expected} elements")]
    DegreeCount { got: usize, expected: usize },
    #[error("numerically singular Gram matrix on element {element}")]
    SingularGram { element: usize },
}

#[derive(Debug, Error)]
pub enum FormsError {
    #[error("nonpositive penalty input: {0}")]
    Input(String),
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("boundary face {face} (tag {tag}) has no boundary condition")]
    UntaggedBoundary { face: usize, tag: u32 },
    #[error("penalty table has {got} rows, mesh has {expected} faces")]
    PenaltyRows { got: usize, expected: usize },
    #[error("coefficient field has {got} elements, mesh has {expected}")]
    CoefficientCount { got: usize, expected: usize },
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("right-hand side length {got} does not match matrix size {expected}")]
    Length { got: usize, expected: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("relative residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    Residual { residual: f64, tol: f64 },
    #[error("non-finite value in solution")]
    NonFinite,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parameter {name} on element {element}: {msg}")]
    Parameter { name: &'static str, element: usize, msg: String },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),
    #[error("raster line {line}: {msg}")]
    RasterParse { line: usize, msg: String },
    #[error("raster is {nx}x{ny} but mesh grid is {mx}x{my}")]
    RasterShape { nx: usize, ny: usize, mx: usize, my: usize },
    #[error("source: {0}")]
    Source(String),
    #[error("scenario: {0}")]
    Scenario(String),
}

#[derive(Debug, Error)]
pub enum TimeError {
    #[error("invalid integrator configuration: {0}")]
    Config(String),
    #[error("state length mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Error)]
pub enum VerificationError {
    #[error("sweep needs at least {need} levels, got {got}")]
    InsufficientLevels { need: usize, got: usize },
    #[error("sweep aborted at level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{0}")]
    Input(String),
}
