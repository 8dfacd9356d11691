use core::fmt;

use crate::Symbol;

/// Error returned by coder and model operations.
///
/// Every documented failure of a public operation maps to exactly one variant;
/// operations never abort on invalid input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoderError {
    /// Tried to encode a symbol whose frequency under the model is zero.
    FrequencyZero { symbol: Symbol },
    /// Model frequencies do not sum to `2^precision`, or cannot be made to.
    ModelNotNormalized { reason: &'static str },
    /// Symbol index outside the model's alphabet.
    SymbolOutOfRange { symbol: Symbol, alphabet_size: usize },
    /// A word does not fit in the configured word size.
    WordOutOfRange { word: u128, word_size: u32 },
    /// Seek target lies before the current decoding position.
    SeekForwardOnly { requested: usize, available: usize },
    /// Ran out of compressed data.
    InsufficientData { context: &'static str },
    /// Invalid streaming configuration or mismatched precision.
    ConfigInvalid { reason: &'static str },
}

/// Discriminant of a [`CoderError`], for matching without payloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    FrequencyZero,
    ModelNotNormalized,
    SymbolOutOfRange,
    WordOutOfRange,
    SeekForwardOnly,
    InsufficientData,
    ConfigInvalid,
}

impl CoderError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            CoderError::FrequencyZero { .. } => ErrorKind::FrequencyZero,
            CoderError::ModelNotNormalized { .. } => ErrorKind::ModelNotNormalized,
            CoderError::SymbolOutOfRange { .. } => ErrorKind::SymbolOutOfRange,
            CoderError::WordOutOfRange { .. } => ErrorKind::WordOutOfRange,
            CoderError::SeekForwardOnly { .. } => ErrorKind::SeekForwardOnly,
            CoderError::InsufficientData { .. } => ErrorKind::InsufficientData,
            CoderError::ConfigInvalid { .. } => ErrorKind::ConfigInvalid,
        }
    }
}

impl fmt::Display for CoderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoderError::FrequencyZero { symbol } => {
                write!(f, "symbol {symbol} has zero frequency and cannot be encoded")
            }
            CoderError::ModelNotNormalized { reason } => {
                write!(f, "model is not normalized: {reason}")
            }
            CoderError::SymbolOutOfRange { symbol, alphabet_size } => {
                write!(f, "symbol {symbol} out of range for alphabet of size {alphabet_size}")
            }
            CoderError::WordOutOfRange { word, word_size } => {
                write!(f, "word {word:#x} does not fit in {word_size} bits")
            }
            CoderError::SeekForwardOnly { requested, available } => {
                write!(
                    f,
                    "cannot seek to bulk length {requested} (current length {available}); \
                     seeking is forward-only"
                )
            }
            CoderError::InsufficientData { context } => {
                write!(f, "not enough compressed data: {context}")
            }
            CoderError::ConfigInvalid { reason } => {
                write!(f, "invalid configuration: {reason}")
            }
        }
    }
}

impl std::error::Error for CoderError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_match_variants() {
        let cases: Vec<(CoderError, ErrorKind)> = vec![
            (CoderError::FrequencyZero { symbol: 3 }, ErrorKind::FrequencyZero),
            (
                CoderError::ModelNotNormalized { reason: "x" },
                ErrorKind::ModelNotNormalized,
            ),
            (
                CoderError::SymbolOutOfRange { symbol: 9, alphabet_size: 3 },
                ErrorKind::SymbolOutOfRange,
            ),
            (
                CoderError::WordOutOfRange { word: 256, word_size: 8 },
                ErrorKind::WordOutOfRange,
            ),
            (
                CoderError::SeekForwardOnly { requested: 5, available: 2 },
                ErrorKind::SeekForwardOnly,
            ),
            (
                CoderError::InsufficientData { context: "x" },
                ErrorKind::InsufficientData,
            ),
            (CoderError::ConfigInvalid { reason: "x" }, ErrorKind::ConfigInvalid),
        ];
        for (err, kind) in cases {
            assert_eq!(err.kind(), kind);
            assert!(!err.to_string().is_empty());
        }
    }
}
