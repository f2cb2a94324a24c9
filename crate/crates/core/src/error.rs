use thiserror::Error;

use crate::pfa::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("alphabet already contains reserved symbol `{0}`")]
    ReservedSymbol(String),

    #[error("unsuitable alphabet: {0}")]
    Alphabet(String),

    #[error("invalid automaton: {}", format_violations(.0))]
    InvalidPfa(Vec<Violation>),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("search budget exceeded: {needed} items needed, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("initial distribution is not a point mass")]
    NondeterministicInitial,

    #[error("closed form disagrees with simulation: {0}")]
    ClosedFormMismatch(String),

    #[error("{0} is not in the image of the sigma encoding")]
    NotInImage(String),

    #[error("certificate contradicted: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
