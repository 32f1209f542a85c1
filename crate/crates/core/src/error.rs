use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("infeasible basis: {n_particles} fermions cannot occupy {n_orbitals} orbitals")]
    InfeasibleBasis { n_particles: usize, n_orbitals: usize },

    #[error("the {0} kernel is singular and has no pointwise value; use the local contact path")]
    UnsupportedKernel(&'static str),

    #[error("{what} did not converge after {iterations} iterations (best residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("non-finite value encountered at t = {time}: {what}")]
    NonFinite { time: f64, what: String },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
