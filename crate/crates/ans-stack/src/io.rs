//! Bit-exact serialization of word sequences, delimiter-free framing, and the
//! self-describing container format used by the CLI.
//!
//! Words are serialized little-endian; the container header stores the
//! streaming configuration and the frequency table of the entropy model, so a
//! compressed file can be decoded without out-of-band information.
//!
//! # Container layout
//!
//! | offset        | size | field                                   |
//! |---------------|------|-----------------------------------------|
//! | 0             | 4    | magic `"ANS1"`                          |
//! | 4             | 1    | precision                               |
//! | 5             | 1    | word_size                               |
//! | 6             | 1    | head_capacity                           |
//! | 7             | 4    | alphabet_size (LE)                      |
//! | 11            | 8    | message_length (LE)                     |
//! | 19            | 4×A  | frequencies `m[x]` (LE, A values)       |
//! | 19 + 4×A      | ...  | compressed words (LE, word_size bits)   |

use core::fmt;

use crate::{
    AnsCoder, CategoricalModel, CoderError, EntropyModel, StreamingConfig, Symbol, Word,
};

/// Magic bytes identifying the container format.
pub const MAGIC: [u8; 4] = *b"ANS1";

/// Byte offset at which the frequency table starts.
const HEADER_FIXED_LEN: usize = 19;

/// Serializes each word to `word_size / 8` little-endian bytes, in sequence
/// order. `word_size` must be one of 8, 16, 32, or 64.
pub fn words_to_bytes(words: &[Word], word_size: u32) -> Result<Vec<u8>, CoderError> {
    let bytes_per_word = bytes_per_word(word_size)?;
    let limit = word_limit(word_size);
    let mut out = Vec::with_capacity(words.len() * bytes_per_word);
    for &word in words {
        if word >= limit {
            return Err(CoderError::WordOutOfRange { word: word as u128, word_size });
        }
        out.extend_from_slice(&word.to_le_bytes()[..bytes_per_word]);
    }
    Ok(out)
}

/// Inverse of [`words_to_bytes`]. The byte length must be a multiple of
/// `word_size / 8`.
pub fn bytes_to_words(bytes: &[u8], word_size: u32) -> Result<Vec<Word>, CoderError> {
    let bytes_per_word = bytes_per_word(word_size)?;
    if bytes.len() % bytes_per_word != 0 {
        return Err(CoderError::InsufficientData {
            context: "byte length is not a multiple of the word size",
        });
    }
    let mut words = Vec::with_capacity(bytes.len() / bytes_per_word);
    for chunk in bytes.chunks_exact(bytes_per_word) {
        let mut buf = [0u8; 8];
        buf[..bytes_per_word].copy_from_slice(chunk);
        words.push(Word::from_le_bytes(buf));
    }
    Ok(words)
}

fn bytes_per_word(word_size: u32) -> Result<usize, CoderError> {
    match word_size {
        8 | 16 | 32 | 64 => Ok(word_size as usize / 8),
        _ => Err(CoderError::ConfigInvalid {
            reason: "byte serialization requires a word size of 8, 16, 32, or 64",
        }),
    }
}

fn word_limit(word_size: u32) -> Word {
    if word_size == 64 { Word::MAX } else { 1u64 << word_size }
}

/// Encodes `message` into a uniquely decodable frame.
///
/// The coder starts from the sentinel `compressed = [0, 1]`, so a decoder that
/// reads the frame appended to arbitrary other words can tell exactly where
/// the frame's data ends: after decoding the full message, its bulk holds
/// precisely the preceding words and its head equals `n` (see
/// [`decode_framed`]). One model per message symbol; encoding runs in reverse
/// so decoding runs forward.
pub fn encode_framed<M: EntropyModel>(
    config: StreamingConfig,
    message: &[Symbol],
    models: &[&M],
) -> Result<Vec<Word>, CoderError> {
    assert_eq!(message.len(), models.len(), "one model per message symbol");
    let mut coder = AnsCoder::new(config, &[0, 1])?;
    for (&symbol, model) in message.iter().zip(models).rev() {
        coder.push(symbol, *model)?;
    }
    Ok(coder.get_compressed())
}

/// Decodes a frame produced by [`encode_framed`] from `words`, which may be
/// the frame alone or the frame appended to an arbitrary prefix. Returns the
/// message and the recovered prefix.
///
/// Corrupted frames yield garbage symbols, not errors: like any ANS stream,
/// frames carry no integrity check.
pub fn decode_framed<M: EntropyModel>(
    config: StreamingConfig,
    words: &[Word],
    models: &[&M],
) -> Result<(Vec<Symbol>, Vec<Word>), CoderError> {
    let mut coder = AnsCoder::new(config, words)?;
    let mut message = Vec::with_capacity(models.len());
    for model in models {
        message.push(coder.pop(*model)?);
    }
    Ok((message, coder.bulk().to_vec()))
}

/// A parsed (or to-be-written) compressed container.
#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub config: StreamingConfig,
    pub model: CategoricalModel,
    pub message_length: u64,
    pub words: Vec<Word>,
}

/// Error while parsing a container, with the byte offset of the offending
/// field.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerError {
    pub offset: usize,
    pub error: CoderError,
}

impl fmt::Display for ContainerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid container at byte offset {}: {}", self.offset, self.error)
    }
}

impl std::error::Error for ContainerError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl ContainerError {
    fn new(offset: usize, error: CoderError) -> Self {
        Self { offset, error }
    }
}

/// Serializes a container to bytes (header followed by the payload words).
pub fn write_container(container: &Container) -> Result<Vec<u8>, CoderError> {
    let config = container.config;
    config.validate()?;
    if container.model.precision() != config.precision {
        return Err(CoderError::ConfigInvalid {
            reason: "model precision does not match the container configuration",
        });
    }
    let alphabet_size = container.model.alphabet_size();
    if alphabet_size > u32::MAX as usize {
        return Err(CoderError::ConfigInvalid {
            reason: "alphabet size does not fit the container header",
        });
    }

    let mut out = Vec::with_capacity(HEADER_FIXED_LEN + 4 * alphabet_size);
    out.extend_from_slice(&MAGIC);
    out.push(config.precision as u8);
    out.push(config.word_size as u8);
    out.push(config.head_capacity as u8);
    out.extend_from_slice(&(alphabet_size as u32).to_le_bytes());
    out.extend_from_slice(&container.message_length.to_le_bytes());
    for &freq in container.model.frequencies() {
        if freq > u32::MAX as u64 {
            return Err(CoderError::ConfigInvalid {
                reason: "frequency does not fit the container's 4-byte field",
            });
        }
        out.extend_from_slice(&(freq as u32).to_le_bytes());
    }
    out.extend_from_slice(&words_to_bytes(&container.words, config.word_size)?);
    Ok(out)
}

/// Parses a container from bytes, validating magic, configuration, and model
/// normalization.
pub fn read_container(bytes: &[u8]) -> Result<Container, ContainerError> {
    if bytes.len() < HEADER_FIXED_LEN {
        return Err(ContainerError::new(
            bytes.len(),
            CoderError::InsufficientData { context: "container header is truncated" },
        ));
    }
    if bytes[0..4] != MAGIC {
        return Err(ContainerError::new(
            0,
            CoderError::ConfigInvalid { reason: "bad magic, expected \"ANS1\"" },
        ));
    }
    let config = StreamingConfig::new(bytes[4] as u32, bytes[5] as u32, bytes[6] as u32);
    config.validate().map_err(|e| ContainerError::new(4, e))?;
    let alphabet_size = u32::from_le_bytes(bytes[7..11].try_into().unwrap()) as usize;
    let message_length = u64::from_le_bytes(bytes[11..19].try_into().unwrap());

    let freq_end = HEADER_FIXED_LEN + 4 * alphabet_size;
    if bytes.len() < freq_end {
        return Err(ContainerError::new(
            bytes.len(),
            CoderError::InsufficientData { context: "frequency table is truncated" },
        ));
    }
    let freqs: Vec<u64> = bytes[HEADER_FIXED_LEN..freq_end]
        .chunks_exact(4)
        .map(|chunk| u32::from_le_bytes(chunk.try_into().unwrap()) as u64)
        .collect();
    let model = CategoricalModel::from_frequencies(config.precision, freqs)
        .map_err(|e| ContainerError::new(HEADER_FIXED_LEN, e))?;

    let words = bytes_to_words(&bytes[freq_end..], config.word_size)
        .map_err(|e| ContainerError::new(freq_end, e))?;

    Ok(Container { config, model, message_length, words })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{quantize_leaky, ErrorKind, RealModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn words_to_bytes_little_endian() {
        assert_eq!(words_to_bytes(&[0x0A0B], 16).unwrap(), vec![0x0B, 0x0A]);
        assert_eq!(words_to_bytes(&[], 16).unwrap(), Vec::<u8>::new());
        assert_eq!(bytes_to_words(&[], 32).unwrap(), Vec::<Word>::new());
    }

    #[test]
    fn words_bytes_roundtrip_all_word_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for word_size in [8u32, 16, 32, 64] {
            let limit = word_limit(word_size);
            for _ in 0..20 {
                let words: Vec<Word> = (0..rng.gen_range(0..50))
                    .map(|_| {
                        if word_size == 64 {
                            rng.gen()
                        } else {
                            rng.gen_range(0..limit)
                        }
                    })
                    .collect();
                let bytes = words_to_bytes(&words, word_size).unwrap();
                assert_eq!(bytes.len(), words.len() * word_size as usize / 8);
                assert_eq!(bytes_to_words(&bytes, word_size).unwrap(), words);
            }
        }
    }

    #[test]
    fn invalid_word_size_and_oversized_words_rejected() {
        assert_eq!(
            words_to_bytes(&[0], 24).unwrap_err().kind(),
            ErrorKind::ConfigInvalid
        );
        assert_eq!(
            words_to_bytes(&[256], 8).unwrap_err().kind(),
            ErrorKind::WordOutOfRange
        );
        assert_eq!(
            bytes_to_words(&[1, 2, 3], 16).unwrap_err().kind(),
            ErrorKind::InsufficientData
        );
    }

    #[test]
    fn framed_message_recovers_prefix_and_sentinel_head() {
        let config = StreamingConfig::new(4, 4, 8);
        let model = CategoricalModel::from_frequencies(4, vec![7, 3, 6]).unwrap();
        let message = [2, 0, 2, 1, 0];
        let models = [&model; 5];
        let frame = encode_framed(config, &message, &models).unwrap();
        assert_eq!(frame, vec![8, 11, 11]);

        // Appended to an arbitrary prefix, decoding recovers both exactly.
        let prefix = [5, 7];
        let mut words = prefix.to_vec();
        words.extend_from_slice(&frame);
        let (decoded, recovered) = decode_framed(config, &words, &models).unwrap();
        assert_eq!(decoded, message);
        assert_eq!(recovered, prefix);

        // The decoder's head ends at exactly n.
        let mut coder = AnsCoder::new(config, &words).unwrap();
        for m in &models {
            coder.pop(*m).unwrap();
        }
        assert_eq!(coder.head(), 16);
        assert_eq!(coder.bulk(), prefix);
    }

    #[test]
    fn empty_framed_message() {
        let config = StreamingConfig::new(4, 4, 8);
        let models: [&CategoricalModel; 0] = [];
        let frame = encode_framed(config, &[], &models).unwrap();
        let (decoded, recovered) = decode_framed(config, &frame, &models).unwrap();
        assert!(decoded.is_empty());
        assert!(recovered.is_empty());
        let coder = AnsCoder::new(config, &frame).unwrap();
        assert_eq!(coder.head(), 16);
    }

    #[test]
    fn frame_concatenation_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let config = StreamingConfig::SMALL;
        for _ in 0..50 {
            let alphabet = rng.gen_range(2..=20);
            let raw: Vec<f64> = (0..alphabet).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let sum: f64 = raw.iter().sum();
            let p = RealModel::new(raw.iter().map(|&w| w / sum).collect()).unwrap();
            let model = quantize_leaky(&p, config.precision).unwrap();

            let message: Vec<Symbol> =
                (0..rng.gen_range(0..60)).map(|_| rng.gen_range(0..alphabet)).collect();
            let models: Vec<&CategoricalModel> = vec![&model; message.len()];
            let frame = encode_framed(config, &message, &models).unwrap();

            let prefix: Vec<Word> = (0..rng.gen_range(0..10))
                .map(|_| rng.gen_range(0..1u64 << config.word_size))
                .collect();
            let mut words = prefix.clone();
            words.extend_from_slice(&frame);
            let (decoded, recovered) = decode_framed(config, &words, &models).unwrap();
            assert_eq!(decoded, message);
            assert_eq!(recovered, prefix);
        }
    }

    fn demo_container() -> Container {
        let model = CategoricalModel::from_frequencies(4, vec![7, 3, 6]).unwrap();
        Container {
            config: StreamingConfig::new(4, 8, 16),
            model,
            message_length: 5,
            words: vec![10, 9],
        }
    }

    #[test]
    fn container_roundtrip() {
        let container = demo_container();
        let bytes = write_container(&container).unwrap();
        assert_eq!(&bytes[0..4], b"ANS1");
        assert_eq!(read_container(&bytes).unwrap(), container);
    }

    #[test]
    fn container_rejects_bad_magic() {
        let mut bytes = write_container(&demo_container()).unwrap();
        bytes[0] = b'X';
        let err = read_container(&bytes).unwrap_err();
        assert_eq!(err.offset, 0);
        assert_eq!(err.error.kind(), ErrorKind::ConfigInvalid);
        assert!(err.to_string().contains("ANS1"));
    }

    #[test]
    fn container_rejects_unnormalized_frequencies() {
        let mut bytes = write_container(&demo_container()).unwrap();
        // Frequency table starts at offset 19; corrupt the first entry.
        bytes[19] = 6;
        let err = read_container(&bytes).unwrap_err();
        assert_eq!(err.offset, 19);
        assert_eq!(err.error.kind(), ErrorKind::ModelNotNormalized);
    }

    #[test]
    fn container_rejects_truncation() {
        let bytes = write_container(&demo_container()).unwrap();
        let err = read_container(&bytes[..10]).unwrap_err();
        assert_eq!(err.error.kind(), ErrorKind::InsufficientData);
        // Ragged payload tail.
        let container = Container {
            config: StreamingConfig::new(8, 16, 32),
            model: CategoricalModel::from_frequencies(8, vec![256]).unwrap(),
            message_length: 0,
            words: vec![1],
        };
        let bytes = write_container(&container).unwrap();
        let err = read_container(&bytes[..bytes.len() - 1]).unwrap_err();
        assert_eq!(err.error.kind(), ErrorKind::InsufficientData);
    }

    #[test]
    fn container_rejects_invalid_config() {
        let mut bytes = write_container(&demo_container()).unwrap();
        bytes[4] = 16; // precision 16 > word_size 8
        let err = read_container(&bytes).unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.error.kind(), ErrorKind::ConfigInvalid);
    }
}
