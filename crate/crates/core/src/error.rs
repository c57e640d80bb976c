use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid expression: {0}")]
    Expression(String),
    #[error("point is not in the domain: {0}")]
    OutsideDomain(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("degenerate path: {0}")]
    DegeneratePath(String),
    #[error("distance search failed: {0}")]
    SearchFailure(String),
    #[error("reparametrization failed: {0}")]
    Reparametrization(String),
    #[error("certificate infeasible: path length {length} exceeds admissible {bound}")]
    CertificateInfeasible { length: f64, bound: f64 },
    #[error("gap not closed: achieved gap {achieved} but kappa budget is {budget}")]
    GapNotClosed { achieved: f64, budget: f64 },
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("localizer error: {0}")]
    Localizer(String),
    #[error("map validity error: {0}")]
    MapValidity(String),
    #[error("invalid graph subspace: {0}")]
    InvalidSubspace(String),
}

impl Error {
    /// True for errors caused by malformed user input rather than by a
    /// numerical procedure running out of budget.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Input(_) | Error::Parameter(_) | Error::Expression(_) | Error::OutsideDomain(_)
        )
    }
}
