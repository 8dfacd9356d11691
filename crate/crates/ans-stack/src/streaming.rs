//! The streaming entropy coder: constant-time push/pop on a bounded `head`,
//! with whole-word transfers to and from a growable `bulk`.
//!
//! For a configuration `(precision, word_size, head_capacity)` the coder
//! upholds two invariants at every public-operation boundary:
//!
//! * (i')  `head < 2^head_capacity`; and
//! * (ii') `head >= 2^(head_capacity - word_size)` whenever `bulk` is
//!   nonempty.
//!
//! Encoding flushes one word from `head` to `bulk` exactly when encoding
//! directly would overflow `head`, i.e. when
//! `head >= m[symbol] * 2^(head_capacity - precision)`; decoding detects the
//! resulting temporary violation of (ii') and inverts the transfer. For
//! `word_size = precision` and `head_capacity = 2 * precision` this reduces to
//! the textbook `head >> precision >= m[symbol]` check.

use crate::{CoderError, EntropyModel, StreamingConfig, Symbol, Word};

/// Streaming ANS entropy coder; see the [module documentation](self).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsCoder {
    config: StreamingConfig,
    bulk: Vec<Word>,
    head: u128,
}

/// A point in a compressed stream to which a decoder can [`seek`].
///
/// [`seek`]: AnsCoder::seek
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    bulk_len: usize,
    head: u128,
}

impl Checkpoint {
    pub fn bulk_len(&self) -> usize {
        self.bulk_len
    }

    pub fn head(&self) -> u128 {
        self.head
    }
}

impl AnsCoder {
    /// Creates a coder over a copy of `compressed`, moving words from the end
    /// of the bulk into the head until invariant (ii') holds.
    pub fn new(config: StreamingConfig, compressed: &[Word]) -> Result<Self, CoderError> {
        config.validate()?;
        if config.word_size < 64 {
            let limit = 1u64 << config.word_size;
            for &word in compressed {
                if word >= limit {
                    return Err(CoderError::WordOutOfRange {
                        word: word as u128,
                        word_size: config.word_size,
                    });
                }
            }
        }
        let mut bulk = compressed.to_vec();
        let mut head: u128 = 0;
        let refill_threshold = 1u128 << (config.head_capacity - config.word_size);
        while head < refill_threshold {
            match bulk.pop() {
                Some(word) => head = (head << config.word_size) | word as u128,
                None => break,
            }
        }
        let coder = Self { config, bulk, head };
        coder.debug_assert_invariants();
        Ok(coder)
    }

    /// Like [`new`](Self::new), but appends a single `1` word first so that
    /// trailing zero words of `data` survive a later [`into_binary`] call.
    /// Use this when the compressed argument is arbitrary external data rather
    /// than the output of [`get_compressed`].
    ///
    /// [`into_binary`]: Self::into_binary
    /// [`get_compressed`]: Self::get_compressed
    pub fn from_binary(config: StreamingConfig, data: &[Word]) -> Result<Self, CoderError> {
        let mut words = data.to_vec();
        words.push(1);
        Self::new(config, &words)
    }

    /// Inverse of [`from_binary`](Self::from_binary): strips the sentinel word
    /// and returns the remaining data, exactly as originally provided.
    pub fn into_binary(self) -> Result<Vec<Word>, CoderError> {
        let mut words = self.get_compressed();
        if words.pop() != Some(1) {
            return Err(CoderError::InsufficientData {
                context: "compressed data does not end in the from_binary sentinel word",
            });
        }
        Ok(words)
    }

    pub fn config(&self) -> StreamingConfig {
        self.config
    }

    /// Words settled on the bulk (excludes data still held in the head).
    pub fn bulk(&self) -> &[Word] {
        &self.bulk
    }

    pub fn head(&self) -> u128 {
        self.head
    }

    pub fn is_empty(&self) -> bool {
        self.head == 0 && self.bulk.is_empty()
    }

    /// Encodes one symbol. Flushes one word from head to bulk first if
    /// encoding directly would violate invariant (i').
    pub fn push<M: EntropyModel>(&mut self, symbol: Symbol, model: &M) -> Result<(), CoderError> {
        self.check_precision(model)?;
        let (low, freq) = model.left_cumulative(symbol)?;
        if freq == 0 {
            return Err(CoderError::FrequencyZero { symbol });
        }
        let cfg = &self.config;
        if (self.head >> (cfg.head_capacity - cfg.precision)) as u64 >= freq {
            self.bulk.push((self.head & cfg.word_mask()) as Word);
            self.head >>= cfg.word_size;
            // Invariant (ii') is now temporarily violated; the arithmetic
            // below restores it.
        }
        let freq = freq as u128;
        let z = self.head % freq + low as u128;
        self.head = ((self.head / freq) << cfg.precision) | z;
        self.debug_assert_invariants();
        Ok(())
    }

    /// Decodes the most recently encoded symbol; exact inverse of
    /// [`push`](Self::push) for the same model. Refills the head from the bulk
    /// if invariant (ii') would be violated, which happens exactly when the
    /// mirrored push flushed.
    pub fn pop<M: EntropyModel>(&mut self, model: &M) -> Result<Symbol, CoderError> {
        self.check_precision(model)?;
        let cfg = &self.config;
        let z = (self.head & cfg.precision_mask()) as u64;
        self.head >>= cfg.precision;
        let (symbol, offset) = model.locate(z);
        let (_, freq) = model.left_cumulative(symbol)?;
        self.head = self.head * freq as u128 + offset as u128;
        if self.head < 1u128 << (cfg.head_capacity - cfg.word_size) {
            if let Some(word) = self.bulk.pop() {
                self.head = (self.head << cfg.word_size) | word as u128;
            }
        }
        self.debug_assert_invariants();
        Ok(symbol)
    }

    /// Returns the complete compressed data: the bulk followed by the head
    /// chopped into `word_size`-bit words (least significant first, leading
    /// zero words omitted). Does not mutate the coder; feeding the result to
    /// [`new`](Self::new) reproduces an identical coder state.
    pub fn get_compressed(&self) -> Vec<Word> {
        let mut compressed = self.bulk.clone();
        let mut head = self.head;
        while head != 0 {
            compressed.push((head & self.config.word_mask()) as Word);
            head >>= self.config.word_size;
        }
        compressed
    }

    /// Number of words [`get_compressed`](Self::get_compressed) would return.
    pub fn num_words(&self) -> usize {
        let mut head = self.head;
        let mut chunks = 0;
        while head != 0 {
            chunks += 1;
            head >>= self.config.word_size;
        }
        self.bulk.len() + chunks
    }

    /// Size of the compressed data in bits (whole words).
    pub fn num_bits(&self) -> u64 {
        self.num_words() as u64 * self.config.word_size as u64
    }

    /// Records the current position for later random-access decoding.
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint { bulk_len: self.bulk.len(), head: self.head }
    }

    /// Jumps to a previously taken checkpoint by truncating the bulk and
    /// restoring the head. Decoding consumes data, so seeking is only possible
    /// forward (towards smaller bulk lengths).
    pub fn seek(&mut self, checkpoint: Checkpoint) -> Result<(), CoderError> {
        if checkpoint.bulk_len > self.bulk.len() {
            return Err(CoderError::SeekForwardOnly {
                requested: checkpoint.bulk_len,
                available: self.bulk.len(),
            });
        }
        self.bulk.truncate(checkpoint.bulk_len);
        self.head = checkpoint.head;
        self.debug_assert_invariants();
        Ok(())
    }

    /// Mutation-testing hook: a push with a deliberately off-by-one flush
    /// threshold. Breaks the coder's invariants by design; used by the
    /// self-test suite to confirm that the push/pop inverse checks detect a
    /// corrupted flush rule.
    #[doc(hidden)]
    pub fn push_mutated_flush<M: EntropyModel>(
        &mut self,
        symbol: Symbol,
        model: &M,
    ) -> Result<(), CoderError> {
        self.check_precision(model)?;
        let (low, freq) = model.left_cumulative(symbol)?;
        if freq == 0 {
            return Err(CoderError::FrequencyZero { symbol });
        }
        let cfg = &self.config;
        if (self.head >> (cfg.head_capacity - cfg.precision)) as u64 >= freq.saturating_sub(1) {
            self.bulk.push((self.head & cfg.word_mask()) as Word);
            self.head >>= cfg.word_size;
        }
        let freq = freq as u128;
        let z = self.head % freq + low as u128;
        self.head = ((self.head / freq) << cfg.precision) | z;
        // No invariant assertions: this state is intentionally corrupt.
        Ok(())
    }

    fn check_precision<M: EntropyModel>(&self, model: &M) -> Result<(), CoderError> {
        if model.precision() != self.config.precision {
            return Err(CoderError::ConfigInvalid {
                reason: "model precision does not match coder precision",
            });
        }
        Ok(())
    }

    #[inline]
    fn debug_assert_invariants(&self) {
        if cfg!(debug_assertions) {
            let cfg = &self.config;
            if cfg.head_capacity < 128 {
                debug_assert!(
                    self.head < 1u128 << cfg.head_capacity,
                    "invariant (i') violated: head = {:#x}",
                    self.head
                );
            }
            debug_assert!(
                self.bulk.is_empty()
                    || self.head >= 1u128 << (cfg.head_capacity - cfg.word_size),
                "invariant (ii') violated: head = {:#x}, bulk len = {}",
                self.head,
                self.bulk.len()
            );
        }
    }
}
