//! Lossless entropy coding with stack semantics ("last in first out").
//!
//! The centerpiece is [`AnsCoder`], a streaming entropy coder whose compressed
//! data lives in a growable vector of fixed-size words (`bulk`) plus a bounded
//! integer (`head`). Encoding pushes symbols onto the stack, decoding pops them
//! off in reverse order, and both operations are exact inverses of each other
//! for any coder state. The streaming configuration (fixed-point precision,
//! word size, and head capacity) is chosen at construction, see
//! [`StreamingConfig`].
//!
//! Two big-integer reference coders are included: [`UniformCoder`], a
//! positional-numeral-system stack for uniformly distributed symbols, and
//! [`SlowAnsCoder`], which reaches near-optimal bitrates for arbitrary models
//! by spending quadratic runtime. They serve as oracles for the streaming
//! coder and are not meant for production use.
//!
//! [`ChainCoder`] is a variant with separate read and write stacks: changing
//! the entropy model for one symbol can never affect any other decoded symbol.
//!
//! Entropy models are categorical distributions in fixed-point representation
//! ([`CategoricalModel`], built from real probabilities via [`quantize`]).
//! Symbol lookup during decoding uses binary search by default or an optional
//! precomputed table ([`LookupModel`]).
//!
//! The [`io`] module serializes word sequences to byte streams and defines a
//! self-describing container format; the [`bench`] module measures bitrate
//! overhead and runtime on synthetic corpora.
//!
//! # Example
//!
//! ```
//! use ans_stack::{AnsCoder, CategoricalModel, StreamingConfig};
//!
//! let model = CategoricalModel::from_frequencies(4, vec![7, 3, 6]).unwrap();
//! let message = [2, 0, 2, 1, 0];
//!
//! // Encode in reverse so that decoding runs in forward order.
//! let mut coder = AnsCoder::new(StreamingConfig::new(4, 4, 8), &[]).unwrap();
//! for &symbol in message.iter().rev() {
//!     coder.push(symbol, &model).unwrap();
//! }
//! let compressed = coder.get_compressed();
//!
//! let mut decoder = AnsCoder::new(StreamingConfig::new(4, 4, 8), &compressed).unwrap();
//! let decoded: Vec<_> = (0..5).map(|_| decoder.pop(&model).unwrap()).collect();
//! assert_eq!(decoded, message);
//! ```

pub mod bench;
mod chain;
mod config;
mod error;
pub mod io;
mod models;
mod slow_ans;
mod streaming;
mod uniform;

pub use chain::ChainCoder;
pub use config::StreamingConfig;
pub use error::{CoderError, ErrorKind};
pub use models::{
    kl_divergence, quantize, quantize_leaky, CategoricalModel, EntropyModel, LookupModel,
    RealModel,
};
pub use slow_ans::SlowAnsCoder;
pub use streaming::{AnsCoder, Checkpoint};
pub use uniform::UniformCoder;

/// A unit of compressed data on the bulk. Only the low `word_size` bits of the
/// governing [`StreamingConfig`] may be used.
pub type Word = u64;

/// Index into a model's alphabet.
pub type Symbol = usize;
