use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("field shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("curve: {0}")]
    Curve(String),

    #[error("{solver} did not converge after {iters} iterations (residual {residual:.3e})")]
    NonConvergence {
        solver: &'static str,
        iters: usize,
        residual: f64,
    },

    #[error("spin map undefined at node ({i}, {j}): u1 = u2 = 0 where eta > floor")]
    SpinUndefined { i: usize, j: usize },

    #[error("mass repair failed: achieved masses ({m1:.6e}, {m2:.6e}), wanted ({t1:.6e}, {t2:.6e})")]
    MassRepair { m1: f64, m2: f64, t1: f64, t2: f64 },

    #[error("no crossing of level {level} found")]
    NoCrossing { level: f64 },

    #[error("empty interface window")]
    EmptyWindow,

    #[error("radial configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
