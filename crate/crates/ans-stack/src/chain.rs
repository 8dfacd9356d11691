//! An ANS-like coder with separate read and write stacks.
//!
//! [`AnsCoder`](crate::AnsCoder) re-encodes part of each decoded symbol's
//! information back onto the same stack it reads from, so changing the entropy
//! model for one symbol ripples into every symbol decoded after it. The
//! [`ChainCoder`] splits the two roles: `pop` always reads one full word from
//! the `compressed` stack (a model-independent step) and writes the symbol's
//! remainder to a second stack, `remainders`. Changing the model at one
//! position therefore affects only that position's symbol.
//!
//! Only the simple streaming configuration is supported here: words carry
//! `precision` bits and the remainders head holds up to `2 * precision` bits.

use crate::{CoderError, EntropyModel, Symbol, Word};

/// Entropy coder whose decoded symbols react only locally to model changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCoder {
    precision: u32,
    /// `pop` reads whole words from the end of this stack.
    compressed: Vec<Word>,
    /// `pop` writes remainder information here (via `remainders_head`).
    remainders: Vec<Word>,
    remainders_head: u128,
}

impl ChainCoder {
    /// Creates a coder that decodes from `compressed`. The `remainders` side
    /// is usually empty initially; passing the output of
    /// [`finalize`](Self::finalize) reconstructs an equivalent coder.
    pub fn new(
        precision: u32,
        compressed: &[Word],
        remainders: &[Word],
    ) -> Result<Self, CoderError> {
        if precision == 0 || precision > 32 {
            return Err(CoderError::ConfigInvalid {
                reason: "precision must be between 1 and 32",
            });
        }
        let n = 1u64 << precision;
        for &word in remainders {
            if word >= n {
                return Err(CoderError::WordOutOfRange {
                    word: word as u128,
                    word_size: precision,
                });
            }
        }
        let mut remainders = remainders.to_vec();
        let mut remainders_head: u128 = 0;
        while remainders_head >> precision == 0 {
            match remainders.pop() {
                Some(word) => {
                    remainders_head = (remainders_head << precision) | word as u128;
                }
                None => break,
            }
        }
        let coder = Self {
            precision,
            compressed: compressed.to_vec(),
            remainders,
            remainders_head,
        };
        coder.debug_assert_invariants();
        Ok(coder)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Words not yet read by `pop`.
    pub fn compressed(&self) -> &[Word] {
        &self.compressed
    }

    pub fn remainders(&self) -> &[Word] {
        &self.remainders
    }

    pub fn remainders_head(&self) -> u128 {
        self.remainders_head
    }

    /// Decodes one symbol: reads one full word `z` from `compressed`
    /// (model-independent), identifies the symbol containing `z`, and encodes
    /// the offset within the symbol's subrange onto the remainders side.
    pub fn pop<M: EntropyModel>(&mut self, model: &M) -> Result<Symbol, CoderError> {
        self.check_precision(model)?;
        let z = self.compressed.pop().ok_or(CoderError::InsufficientData {
            context: "chain coder pop needs a word on the compressed stack",
        })?;
        if z >= 1u64 << self.precision {
            // Words are read as raw z values, so they are validated here.
            self.compressed.push(z);
            return Err(CoderError::WordOutOfRange {
                word: z as u128,
                word_size: self.precision,
            });
        }
        let (symbol, offset) = model.locate(z);
        let (_, freq) = model.left_cumulative(symbol)?;
        self.remainders_head = self.remainders_head * freq as u128 + offset as u128;
        if self.remainders_head >> (2 * self.precision) != 0 {
            // Invariant (i) is violated; flush one word to remainders.
            let mask = (1u128 << self.precision) - 1;
            self.remainders.push((self.remainders_head & mask) as Word);
            self.remainders_head >>= self.precision;
        }
        self.debug_assert_invariants();
        Ok(symbol)
    }

    /// Encodes one symbol back onto `compressed`; exact inverse of
    /// [`pop`](Self::pop) for the same model.
    pub fn push<M: EntropyModel>(&mut self, symbol: Symbol, model: &M) -> Result<(), CoderError> {
        self.check_precision(model)?;
        let (low, freq) = model.left_cumulative(symbol)?;
        if freq == 0 {
            return Err(CoderError::FrequencyZero { symbol });
        }
        let freq_wide = freq as u128;
        if !self.remainders.is_empty() && self.remainders_head < freq_wide << self.precision {
            let word = self.remainders.pop().expect("nonempty");
            self.remainders_head = (self.remainders_head << self.precision) | word as u128;
            // Invariant (i) is now violated but restored by the division.
        }
        let z = (self.remainders_head % freq_wide) as u64 + low;
        self.remainders_head /= freq_wide;
        self.compressed.push(z);
        self.debug_assert_invariants();
        Ok(())
    }

    /// Consumes the coder and returns `(compressed_rest, remainders_out)`:
    /// the unread part of the compressed stack, and the remainders stack with
    /// the remainders head chopped into precision-bit words appended (least
    /// significant first, leading zeros omitted). Passing both to
    /// [`new`](Self::new) reconstructs the exact coder state.
    pub fn finalize(self) -> (Vec<Word>, Vec<Word>) {
        let mut remainders = self.remainders;
        let mask = (1u128 << self.precision) - 1;
        let mut head = self.remainders_head;
        while head != 0 {
            remainders.push((head & mask) as Word);
            head >>= self.precision;
        }
        (self.compressed, remainders)
    }

    fn check_precision<M: EntropyModel>(&self, model: &M) -> Result<(), CoderError> {
        if model.precision() != self.precision {
            return Err(CoderError::ConfigInvalid {
                reason: "model precision does not match coder precision",
            });
        }
        Ok(())
    }

    #[inline]
    fn debug_assert_invariants(&self) {
        debug_assert!(
            self.remainders_head >> (2 * self.precision) == 0,
            "invariant (i) violated: remainders_head = {:#x}",
            self.remainders_head
        );
        debug_assert!(
            self.remainders.is_empty() || self.remainders_head >> self.precision != 0,
            "invariant (ii) violated: remainders_head = {:#x}, remainders len = {}",
            self.remainders_head,
            self.remainders.len()
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{quantize, CategoricalModel, RealModel};
    use crate::ErrorKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m_orig() -> CategoricalModel {
        CategoricalModel::from_frequencies(4, vec![7, 3, 6]).unwrap()
    }

    fn m_mod() -> CategoricalModel {
        CategoricalModel::from_frequencies(4, vec![6, 4, 6]).unwrap()
    }

    /// Linear-search transcription of the decode semantics, as an oracle.
    fn replay_pops(precision: u32, words: &[Word], models: &[&CategoricalModel]) -> Vec<Symbol> {
        let mut compressed = words.to_vec();
        let mut head: u128 = 0;
        let mut symbols = Vec::new();
        for model in models {
            let mut z = compressed.pop().unwrap();
            let mut symbol = 0;
            for (s, &freq) in model.frequencies().iter().enumerate() {
                symbol = s;
                if z >= freq {
                    z -= freq;
                } else {
                    break;
                }
            }
            head = head * model.frequencies()[symbol] as u128 + z as u128;
            if head >> (2 * precision) != 0 {
                head >>= precision;
            }
            symbols.push(symbol);
        }
        symbols
    }

    #[test]
    fn model_change_stays_local() {
        // The first word read is 6, which the two models assign to different
        // symbols.
        let words = [9, 14, 14, 6];
        let orig = m_orig();
        let modified = m_mod();

        let mut coder = ChainCoder::new(4, &words, &[]).unwrap();
        let baseline: Vec<Symbol> = (0..4).map(|_| coder.pop(&orig).unwrap()).collect();
        assert_eq!(baseline, replay_pops(4, &words, &[&orig; 4]));
        assert_eq!(baseline, vec![0, 2, 2, 1]);

        let mut coder = ChainCoder::new(4, &words, &[]).unwrap();
        let mut changed = vec![coder.pop(&modified).unwrap()];
        changed.extend((0..3).map(|_| coder.pop(&orig).unwrap()));
        assert_eq!(changed, replay_pops(4, &words, &[&modified, &orig, &orig, &orig]));
        assert_eq!(changed, vec![1, 2, 2, 1]);

        // The change affected only the symbol it was applied to.
        assert_ne!(baseline[0], changed[0]);
        assert_eq!(baseline[1..], changed[1..]);
    }

    #[test]
    fn single_symbol_model_consumes_word_directly() {
        let model = CategoricalModel::from_frequencies(4, vec![16]).unwrap();
        let mut coder = ChainCoder::new(4, &[11, 5], &[]).unwrap();
        assert_eq!(coder.pop(&model).unwrap(), 0);
        assert_eq!(coder.compressed(), &[11]);
        // offset == word, and the remainders head grew by exactly factor n.
        assert_eq!(coder.remainders_head(), 5);
    }

    #[test]
    fn pop_on_empty_compressed_errors() {
        let mut coder = ChainCoder::new(4, &[], &[]).unwrap();
        assert_eq!(
            coder.pop(&m_orig()).unwrap_err().kind(),
            ErrorKind::InsufficientData
        );
    }

    #[test]
    fn oversized_word_rejected_on_read() {
        let mut coder = ChainCoder::new(4, &[16], &[]).unwrap();
        assert_eq!(
            coder.pop(&m_orig()).unwrap_err().kind(),
            ErrorKind::WordOutOfRange
        );
        // The word stays on the stack; the coder state is unchanged.
        assert_eq!(coder.compressed(), &[16]);
    }

    #[test]
    fn oversized_remainders_word_rejected_at_construction() {
        assert_eq!(
            ChainCoder::new(4, &[], &[16]).unwrap_err().kind(),
            ErrorKind::WordOutOfRange
        );
    }

    #[test]
    fn push_with_full_range_symbol_on_fresh_coder_appends_zero() {
        let model = CategoricalModel::from_frequencies(4, vec![16]).unwrap();
        let mut coder = ChainCoder::new(4, &[], &[]).unwrap();
        coder.push(0, &model).unwrap();
        assert_eq!(coder.compressed(), &[0]);
        assert_eq!(coder.remainders_head(), 0);
    }

    #[test]
    fn pop_then_push_restores_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..1000 {
            let precision = rng.gen_range(2..=12);
            let model = random_model(&mut rng, precision);
            let mut coder = random_coder(&mut rng, precision);
            if coder.compressed().is_empty() {
                continue;
            }
            let before = coder.clone();
            let symbol = coder.pop(&model).unwrap();
            coder.push(symbol, &model).unwrap();
            assert_eq!(coder, before);
        }
    }

    #[test]
    fn push_then_pop_restores_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..1000 {
            let precision = rng.gen_range(2..=12);
            let model = random_model(&mut rng, precision);
            let mut coder = random_coder(&mut rng, precision);
            let encodable: Vec<Symbol> = model
                .frequencies()
                .iter()
                .enumerate()
                .filter(|(_, &f)| f > 0)
                .map(|(s, _)| s)
                .collect();
            let symbol = encodable[rng.gen_range(0..encodable.len())];
            let before = coder.clone();
            coder.push(symbol, &model).unwrap();
            assert_eq!(coder.pop(&model).unwrap(), symbol);
            assert_eq!(coder, before);
        }
    }

    #[test]
    fn pop_all_then_push_back_restores_word_list() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let precision = rng.gen_range(2..=10);
            let n = 1u64 << precision;
            let len = rng.gen_range(1..=30);
            let words: Vec<Word> = (0..len).map(|_| rng.gen_range(0..n)).collect();
            let models: Vec<CategoricalModel> =
                (0..len).map(|_| random_model(&mut rng, precision)).collect();

            let mut coder = ChainCoder::new(precision, &words, &[]).unwrap();
            let symbols: Vec<Symbol> =
                models.iter().map(|m| coder.pop(m).unwrap()).collect();
            for (symbol, model) in symbols.iter().zip(&models).rev() {
                coder.push(*symbol, model).unwrap();
            }
            assert_eq!(coder.compressed(), words);
            assert_eq!(coder.remainders_head(), 0);
            assert!(coder.remainders().is_empty());
        }
    }

    #[test]
    fn finalize_roundtrip() {
        // Fresh coder: finalize returns the words untouched.
        let coder = ChainCoder::new(4, &[3, 9, 1], &[]).unwrap();
        assert_eq!(coder.finalize(), (vec![3, 9, 1], vec![]));

        // Mid-decode: reconstructing from the finalized parts continues
        // exactly like the original coder would have.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let precision = rng.gen_range(2..=10);
            let n = 1u64 << precision;
            let len = rng.gen_range(4..=20);
            let words: Vec<Word> = (0..len).map(|_| rng.gen_range(0..n)).collect();
            let model = random_model(&mut rng, precision);

            let mut coder = ChainCoder::new(precision, &words, &[]).unwrap();
            for _ in 0..len / 2 {
                coder.pop(&model).unwrap();
            }
            let mut reference = coder.clone();
            let (rest, remainders) = coder.finalize();
            let mut rebuilt = ChainCoder::new(precision, &rest, &remainders).unwrap();
            assert_eq!(rebuilt, reference);
            for _ in len / 2..len {
                assert_eq!(rebuilt.pop(&model).unwrap(), reference.pop(&model).unwrap());
            }
        }
    }

    fn random_model(rng: &mut ChaCha8Rng, precision: u32) -> CategoricalModel {
        let alphabet = rng.gen_range(1..=(1usize << precision).min(12));
        let raw: Vec<f64> = (0..alphabet).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let sum: f64 = raw.iter().sum();
        let p = RealModel::new(raw.iter().map(|&w| w / sum).collect()).unwrap();
        quantize(&p, precision).unwrap()
    }

    fn random_coder(rng: &mut ChaCha8Rng, precision: u32) -> ChainCoder {
        let n = 1u64 << precision;
        let compressed: Vec<Word> =
            (0..rng.gen_range(0..10)).map(|_| rng.gen_range(0..n)).collect();
        let remainders: Vec<Word> =
            (0..rng.gen_range(0..10)).map(|_| rng.gen_range(0..n)).collect();
        ChainCoder::new(precision, &compressed, &remainders).unwrap()
    }
}
