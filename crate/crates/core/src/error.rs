use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(i64),

    #[error("parameter violation: {0}")]
    Parameter(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("{value} is not a quadratic residue mod {modulus}")]
    NonResidue { value: i64, modulus: i64 },

    #[error("element is not invertible mod {modulus}: norm {norm} shares a factor with the modulus")]
    NotInvertible { norm: i64, modulus: u32 },

    #[error("element is not in G(Z[1/{p}]): reduced norm {norm} is not a power of {p}")]
    NotPIntegralUnit { norm: i64, p: i64 },

    #[error("class number formula does not yield an integer for D={disc}: got {value}")]
    FormulaMisuse { disc: u64, value: String },

    #[error("resource cap exceeded: {what} is {size}, cap is {cap}")]
    Resource { what: &'static str, size: usize, cap: usize },

    #[error("iterative eigensolver did not converge: residual {residual:e} after {iterations} steps")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("unknown export format `{0}`")]
    UnknownFormat(String),

    #[error("malformed graph file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
