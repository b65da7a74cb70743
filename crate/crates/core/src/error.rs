use thiserror::Error;

/// Errors raised by the algebra, geometry and conjugate-point routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{block} metric is not symmetric at ({row}, {col})")]
    AsymmetricMetric { block: MetricBlock, row: usize, col: usize },

    #[error("{block} metric is degenerate (|det| = {det:e})")]
    DegenerateMetric { block: MetricBlock, det: f64 },

    #[error("structure constants are not antisymmetric at [e{a}, e{b}] component {alpha}")]
    NonAntisymmetricStructure { a: usize, b: usize, alpha: usize },

    #[error("pseudo-H-type algebras need an even-dimensional complement, got dim v = {0}")]
    OddComplementDimension(usize),

    #[error("algebra is not of pseudo-H-type (defect {0:e})")]
    NotPseudoHType(f64),

    #[error("J_z is only defined for central z; the input has a nonzero v component")]
    NonCentralInput,

    #[error("adjoint self-test failed: <J_z x, y> and <z, [x, y]> differ by {0:e}")]
    AdjointSelfTest(f64),

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("initial velocity is zero")]
    ZeroVelocity,

    #[error("branch {branch} requires a {required} central component, got <z0,z0> = {a}")]
    WrongCausalClass {
        branch: &'static str,
        required: &'static str,
        a: f64,
    },

    #[error("branch {0} needs dim z >= 2")]
    CenterTooSmall(&'static str),

    #[error("branch {0} is undefined when <g,g> + <z0,z0> = 0")]
    DegenerateDenominator(&'static str),

    #[error("inconsistent branch membership: {0}")]
    InconsistentMembership(String),

    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(f64, f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("integrator failure at t = {t}: {reason}")]
    IntegratorFailure { t: f64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricBlock {
    Center,
    Complement,
}

impl std::fmt::Display for MetricBlock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricBlock::Center => f.write_str("center"),
            MetricBlock::Complement => f.write_str("complement"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
