use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("complete elliptic integral of the first kind diverges at k = 1")]
    Divergence,

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("grid too small: need at least {min} nodes per axis, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("field is not a solution of the Dirac system (residual {residual:.3e} > {tol:.3e})")]
    NotASolution { residual: f64, tol: f64 },

    #[error("degenerate immersion: u = {u:.3e} below threshold at node ({i}, {j})")]
    DegenerateImmersion { u: f64, i: usize, j: usize },

    #[error("chart condition fails: |psi2| = {modulus:.3e} at node ({i}, {j})")]
    Chart { modulus: f64, i: usize, j: usize },

    #[error("spinor blow-up: |(r, s)| = {norm:.3e} at x = {x:.6}")]
    BlowUp { norm: f64, x: f64 },

    #[error("trajectory is not periodic (relative endpoint mismatch {mismatch:.3e})")]
    NotPeriodic { mismatch: f64 },

    #[error("operand of the periodic antiderivative is not an exact derivative (mean {mean:.3e}, scale {scale:.3e})")]
    NonExactDerivative { mean: f64, scale: f64 },

    #[error("quartic has no positive bump: no real oscillation")]
    NoOscillation,

    #[error("turning point at p = {root:.6} is degenerate (|Q'| = {slope:.3e})")]
    TurningPointDegenerate { root: f64, slope: f64 },

    #[error("operation requires a sign-definite potential")]
    Branch,

    #[error("square root of negative quantity {value:.3e} at node {index}")]
    SqrtDomain { value: f64, index: usize },

    #[error("division guard: |{what}| = {value:.3e} at node {index}")]
    DivisionGuard {
        what: &'static str,
        value: f64,
        index: usize,
    },

    #[error("{excluded} of {total} nodes excluded by the potential floor (limit 20%)")]
    TooManyExcluded { excluded: usize, total: usize },

    #[error("flow instability: max|v| grew from {initial:.3e} to {current:.3e} at t = {t:.6}")]
    Instability { initial: f64, current: f64, t: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
