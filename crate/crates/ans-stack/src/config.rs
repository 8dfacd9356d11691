use core::fmt;

use crate::CoderError;

/// The triple `(precision, word_size, head_capacity)` governing a streaming
/// coder.
///
/// `precision` is the fixed-point resolution of entropy models (`n =
/// 2^precision` total frequency mass), `word_size` the bitlength of words on
/// the bulk, and `head_capacity` the bitlength of the head. A valid
/// configuration satisfies
///
/// ```text
/// 1 <= precision <= word_size  and  precision + word_size <= head_capacity
/// ```
///
/// with `precision <= 32`, `word_size <= 64`, and `head_capacity <= 128` so
/// that fixed-width machine integers suffice throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamingConfig {
    pub precision: u32,
    pub word_size: u32,
    pub head_capacity: u32,
}

impl StreamingConfig {
    /// Recommended preset `(24, 32, 64)`: near-optimal bitrates over a wide
    /// range of entropies.
    pub const DEFAULT: Self = Self::new(24, 32, 64);

    /// Preset `(12, 16, 32)` optimized for runtime and memory efficiency.
    pub const SMALL: Self = Self::new(12, 16, 32);

    /// Simple variant `(32, 32, 64)` with `word_size = precision`.
    pub const SIMPLE_32: Self = Self::new(32, 32, 64);

    /// Simple variant `(16, 16, 32)` with `word_size = precision`.
    pub const SIMPLE_16: Self = Self::new(16, 16, 32);

    /// All four named presets.
    pub const PRESETS: [Self; 4] = [Self::DEFAULT, Self::SMALL, Self::SIMPLE_32, Self::SIMPLE_16];

    pub const fn new(precision: u32, word_size: u32, head_capacity: u32) -> Self {
        Self { precision, word_size, head_capacity }
    }

    /// Checks all configuration invariants. Pure: same input, same result.
    pub fn validate(&self) -> Result<(), CoderError> {
        if self.precision == 0 {
            return Err(CoderError::ConfigInvalid { reason: "precision must be at least 1" });
        }
        if self.precision > 32 {
            return Err(CoderError::ConfigInvalid { reason: "precision must be at most 32" });
        }
        if self.word_size < self.precision {
            return Err(CoderError::ConfigInvalid {
                reason: "word_size must be at least precision",
            });
        }
        if self.word_size > 64 {
            return Err(CoderError::ConfigInvalid { reason: "word_size must be at most 64" });
        }
        if self.head_capacity < self.precision + self.word_size {
            return Err(CoderError::ConfigInvalid {
                reason: "head_capacity must be at least precision + word_size",
            });
        }
        if self.head_capacity > 128 {
            return Err(CoderError::ConfigInvalid {
                reason: "head_capacity must be at most 128",
            });
        }
        Ok(())
    }

    /// Total frequency mass `n = 2^precision`.
    pub fn n(&self) -> u64 {
        1u64 << self.precision
    }

    /// Bitmask selecting the low `word_size` bits.
    pub(crate) fn word_mask(&self) -> u128 {
        if self.word_size == 128 { u128::MAX } else { (1u128 << self.word_size) - 1 }
    }

    /// Bitmask selecting the low `precision` bits.
    pub(crate) fn precision_mask(&self) -> u128 {
        (1u128 << self.precision) - 1
    }
}

impl Default for StreamingConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for StreamingConfig {
    /// Renders as `precision/word_size/head_capacity`, e.g. `24/32/64`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.precision, self.word_size, self.head_capacity)
    }
}
