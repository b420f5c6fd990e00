use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("series length mismatch: truth has {truth}, prediction has {pred}")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("cannot aggregate an empty sample list")]
    EmptyInput,
}
