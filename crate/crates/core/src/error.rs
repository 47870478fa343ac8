use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error("no asymptotic expansion for this regime: {0}")]
    Regime(String),
    #[error("accuracy target missed: {0}")]
    Accuracy(String),
    #[error("root paths collide: {0}")]
    Collision(String),
    #[error("step size underflow: {0}")]
    Stiffness(String),
    #[error("integrand has not decayed: {0}")]
    Truncation(String),
    #[error("imaginary residual too large: {0}")]
    ImaginaryResidual(String),
}

pub type Result<T> = std::result::Result<T, Error>;
