use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(&'static str),
    #[error("argument outside the domain: {0}")]
    Domain(&'static str),
    #[error("evaluation point coincides with the source point")]
    Singular,
    #[error("ill-conditioned system ({what}), condition estimate {condition:.3e}")]
    IllConditioned { what: &'static str, condition: f64 },
    #[error("engine cannot represent this cavity: {0}")]
    EngineMismatch(&'static str),
    #[error("aperture excludes every grid direction")]
    EmptyAperture,
}
