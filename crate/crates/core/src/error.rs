use thiserror::Error;

/// Every failure the analyzer can report. Algorithmic "Zero" outcomes are not
/// errors; they are returned as values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("undeclared symbol `{name}` at {line}:{col}")]
    UndeclaredSymbol { name: String, line: usize, col: usize },

    #[error("non-polynomial expression at {line}:{col}: {msg}")]
    NonPolynomial { line: usize, col: usize, msg: String },

    #[error("invalid constant declaration: {0}")]
    InvalidConstant(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element of the `{symbol}` layer is not invertible; the declared minimal polynomial factors over the lower field")]
    NonInvertible { symbol: String },

    #[error("precision cap of {bits} bits reached without certifying a sign")]
    PrecisionExhausted { bits: u32 },

    #[error("singular point not defined over the coefficient field ({context}); unresolved factor {residual}")]
    UnsupportedAlgebraicPoint { context: String, residual: String },

    #[error("the line at infinity is invariant-free: Y*P(X,Y,0) - X*Q(X,Y,0) vanishes identically")]
    DegenerateInfinity,

    #[error("components are not coprime (common factor {factor})")]
    NotCoprime { factor: String },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid curve specification: {0}")]
    InvalidSpec(String),

    #[error("budget of {limit} infinitely near points exhausted")]
    BudgetExceeded { limit: usize },

    #[error("no shear made the resultant degree stable after {attempts} attempts")]
    ShearFailure { attempts: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
