use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::CoderError;

/// Stack-based optimal coder for uniformly distributed symbols, backed by an
/// arbitrary-precision integer.
///
/// Encoding parses symbols as digits of a positional numeral system whose base
/// may vary per symbol: `push` computes `number * base + symbol` and `pop`
/// inverts it. A fixed-width implementation would overflow almost immediately,
/// so the accumulated number is a big integer; this coder exists as a
/// reference and as the substrate of the bits-back construction, not as a
/// production codec.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniformCoder {
    number: BigUint,
}

impl UniformCoder {
    pub fn new() -> Self {
        Self { number: BigUint::zero() }
    }

    pub fn from_number(number: BigUint) -> Self {
        Self { number }
    }

    /// Encodes `symbol` from the alphabet `{0, ..., base-1}`.
    pub fn push(&mut self, symbol: u64, base: u64) -> Result<(), CoderError> {
        if symbol >= base {
            return Err(CoderError::SymbolOutOfRange {
                symbol: symbol as usize,
                alphabet_size: base as usize,
            });
        }
        self.number = &self.number * base + symbol;
        Ok(())
    }

    /// Decodes the most recently pushed symbol for the given `base`; exact
    /// inverse of [`push`](Self::push). Popping from an empty (zero) coder
    /// yields 0 and leaves the coder unchanged.
    pub fn pop(&mut self, base: u64) -> u64 {
        assert!(base >= 1, "base must be at least 1");
        let symbol = (&self.number % base).to_u64().expect("remainder fits u64");
        self.number /= base;
        symbol
    }

    pub fn number(&self) -> &BigUint {
        &self.number
    }
}
