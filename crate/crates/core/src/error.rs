use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not interior: {constraint} has slack {slack:.3e}")]
    NotInterior { constraint: String, slack: f64 },
    #[error("point is not on the boundary: {0}")]
    NotOnBoundary(String),
    #[error("direction norm {0:.3e} is below the floor")]
    DirectionTooSmall(f64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("cone is not solid")]
    NotSolid,
    #[error("point lies in the lineality space")]
    InLineality,
    #[error("point is not in the lineality space")]
    NotInLineality,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("property violated: {0}")]
    Property(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
