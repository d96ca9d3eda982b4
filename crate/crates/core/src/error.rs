use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A basis change matrix with `|det P|` at or below tolerance.
    SingularBasisChange { det_abs: f64 },
    /// A metric that is not positive definite (or not finite).
    DegenerateMetric,
    /// A matrix handed in as a metric whose Hermitian defect exceeds tolerance.
    NotHermitian { deviation: f64 },
    /// Structure constants whose symmetric part in the lower indices exceeds tolerance.
    NotAntisymmetric { symmetric_part: f64 },
    /// Integrator or solver configuration outside its valid range.
    InvalidConfig(&'static str),
    /// Newton iteration hit a Jacobian that could not be solved.
    SingularJacobian,
    /// Stationary points of the solvable and SL(2,C) flows need `beta > 0`.
    NonPositiveBeta { beta: f64 },
    /// QR iteration exceeded its iteration cap.
    NoConvergence { iterations: usize },
    /// Closed-form solution queried outside its domain.
    DomainError(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularBasisChange { det_abs } => {
                write!(f, "basis change is singular (|det P| = {det_abs:e})")
            }
            Error::DegenerateMetric => write!(f, "metric is not positive definite"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (deviation {deviation:e})")
            }
            Error::NotAntisymmetric { symmetric_part } => write!(
                f,
                "structure constants are not antisymmetric in the lower indices (symmetric part {symmetric_part:e})"
            ),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::SingularJacobian => write!(f, "Jacobian is singular"),
            Error::NonPositiveBeta { beta } => {
                write!(f, "stationary points require beta > 0 (beta = {beta})")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "eigenvalue iteration did not converge after {iterations} iterations")
            }
            Error::DomainError(msg) => write!(f, "outside the domain of the closed form: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
