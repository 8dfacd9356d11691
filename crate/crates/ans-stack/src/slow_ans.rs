use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::{CoderError, EntropyModel, Symbol};

/// Big-integer bits-back coder with near-optimal bitrates.
///
/// Encoding a symbol first *decodes* an auxiliary value `z` from the
/// accumulated integer with the alphabet restricted to the symbol's subrange
/// (the bits-back step), then re-encodes `z` with base `n = 2^precision`. The
/// net cost per symbol is its information content, plus at most `precision`
/// startup bits for the first symbol of a message.
///
/// Arithmetic on the whole compressed integer makes every operation O(message
/// so far), i.e. quadratic overall. This coder is the semantic oracle for
/// [`AnsCoder`](crate::AnsCoder), not a production path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlowAnsCoder {
    precision: u32,
    compressed: BigUint,
}

impl SlowAnsCoder {
    pub fn new(precision: u32) -> Result<Self, CoderError> {
        Self::with_compressed(precision, BigUint::zero())
    }

    pub fn with_compressed(precision: u32, compressed: BigUint) -> Result<Self, CoderError> {
        if precision == 0 || precision > 32 {
            return Err(CoderError::ConfigInvalid {
                reason: "precision must be between 1 and 32",
            });
        }
        Ok(Self { precision, compressed })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Encodes one symbol: `compressed` becomes
    /// `(compressed / m[symbol]) * n + (compressed % m[symbol] + cdf[symbol])`.
    pub fn push<M: EntropyModel>(&mut self, symbol: Symbol, model: &M) -> Result<(), CoderError> {
        self.check_precision(model)?;
        let (low, freq) = model.left_cumulative(symbol)?;
        if freq == 0 {
            return Err(CoderError::FrequencyZero { symbol });
        }
        let z = (&self.compressed % freq).to_u64().expect("remainder fits u64") + low;
        self.compressed = ((&self.compressed / freq) << self.precision) + z;
        Ok(())
    }

    /// Decodes the most recently encoded symbol; exact inverse of
    /// [`push`](Self::push) for the same model.
    pub fn pop<M: EntropyModel>(&mut self, model: &M) -> Result<Symbol, CoderError> {
        self.check_precision(model)?;
        let z = (&self.compressed % model.n()).to_u64().expect("remainder fits u64");
        self.compressed >>= self.precision;
        let (symbol, offset) = model.locate(z);
        let (_, freq) = model.left_cumulative(symbol)?;
        self.compressed = &self.compressed * freq + offset;
        Ok(symbol)
    }

    pub fn get_compressed(&self) -> &BigUint {
        &self.compressed
    }

    fn check_precision<M: EntropyModel>(&self, model: &M) -> Result<(), CoderError> {
        if model.precision() != self.precision {
            return Err(CoderError::ConfigInvalid {
                reason: "model precision does not match coder precision",
            });
        }
        Ok(())
    }
}
