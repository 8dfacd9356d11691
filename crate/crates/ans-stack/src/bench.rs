//! Benchmark engine: synthetic corpora over an entropy sweep, bitrate-overhead
//! decomposition, and median-of-repeats runtime measurement.
//!
//! Each benchmark row reports the total bitrate overhead over the information
//! content of the corpus (the fundamental lower bound) and the part of it due
//! to fixed-point quantization (`D_KL(P || Q)`). Runtimes are measured as the
//! median over several back-to-back double runs, timing only the second run of
//! each pair to stabilize caches and branch predictors; a checksum of the
//! decoded symbols keeps the loops from being optimized out.

use std::fmt;
use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{
    kl_divergence, quantize, AnsCoder, CategoricalModel, CoderError, EntropyModel, LookupModel,
    RealModel, StreamingConfig, Symbol,
};

/// How the decoder maps range points back to symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStrategy {
    /// Binary search over the cumulative frequencies (the default).
    BinarySearch,
    /// Precomputed table with `2^precision` entries; only valid for
    /// precision <= 16.
    LookupTable,
}

impl fmt::Display for DecodeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeStrategy::BinarySearch => write!(f, "binary_search"),
            DecodeStrategy::LookupTable => write!(f, "lookup_table"),
        }
    }
}

/// One benchmark measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub entropy_bits_per_symbol: f64,
    pub config: StreamingConfig,
    pub strategy: DecodeStrategy,
    /// Bitrate overhead of the emitted words over the corpus' information
    /// content, in percent.
    pub total_overhead_percent: f64,
    /// Overhead due to model quantization alone: `D_KL(P || Q) / H_P`, in
    /// percent.
    pub kl_overhead_percent: f64,
    pub encode_ns_per_symbol: f64,
    pub decode_ns_per_symbol: f64,
}

/// Collected benchmark rows, exportable as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub const CSV_HEADER: &'static str =
        "entropy,config,strategy,total_overhead_pct,kl_overhead_pct,encode_ns,decode_ns";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{:.6},{},{},{:.9},{:.9},{:.3},{:.3}\n",
                row.entropy_bits_per_symbol,
                row.config,
                row.strategy,
                row.total_overhead_percent,
                row.kl_overhead_percent,
                row.encode_ns_per_symbol,
                row.decode_ns_per_symbol,
            ));
        }
        out
    }
}

/// Generates a deterministic i.i.d. corpus whose source model has entropy
/// within 1% of `entropy_target` (in practice much closer; the model is found
/// by bisecting over geometrically tilted distributions).
pub fn make_corpus(
    seed: u64,
    entropy_target: f64,
    length: usize,
    alphabet_size: usize,
) -> Result<(Vec<Symbol>, RealModel), CoderError> {
    let max_entropy = (alphabet_size as f64).log2();
    if !(entropy_target > 0.0) || entropy_target > max_entropy {
        return Err(CoderError::ConfigInvalid {
            reason: "entropy target must be positive and at most log2(alphabet size)",
        });
    }

    let model = if (entropy_target - max_entropy).abs() < 1e-12 {
        RealModel::uniform(alphabet_size)
    } else {
        tilted_model(entropy_target, alphabet_size)
    };
    debug_assert!((model.entropy() - entropy_target).abs() <= 0.01 * entropy_target);

    let cdf: Vec<f64> = model
        .probs()
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = (0..length)
        .map(|_| {
            let u = rng.gen::<f64>();
            cdf.partition_point(|&c| c <= u).min(alphabet_size - 1)
        })
        .collect();
    Ok((symbols, model))
}

/// Finds `p[x] proportional to r^x` with the requested entropy by bisecting on
/// `r`; entropy grows monotonically from 0 (point mass) to `log2(alphabet)`
/// (uniform) as `r` goes from 0 to 1.
fn tilted_model(entropy_target: f64, alphabet_size: usize) -> RealModel {
    let probs_for = |r: f64| -> Vec<f64> {
        let raw: Vec<f64> = (0..alphabet_size).map(|x| r.powi(x as i32)).collect();
        let sum: f64 = raw.iter().sum();
        raw.iter().map(|&w| w / sum).collect()
    };
    let entropy_of = |probs: &[f64]| -> f64 {
        -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
    };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if entropy_of(&probs_for(mid)) < entropy_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RealModel::new(probs_for(0.5 * (lo + hi))).expect("normalized by construction")
}

/// Encodes and decodes `symbols` once for verification and once per repeat for
/// timing, returning the overhead decomposition and median runtimes.
///
/// Panics if the decoded corpus differs from the input: a roundtrip failure is
/// a coder bug, not an input error.
pub fn run_bench(
    symbols: &[Symbol],
    model: &RealModel,
    config: StreamingConfig,
    strategy: DecodeStrategy,
    repeats: usize,
) -> Result<BenchRow, CoderError> {
    config.validate()?;
    let quantized = quantize(model, config.precision)?;

    // Information content of this particular corpus under the source model.
    let log2_probs: Vec<f64> = model.probs().iter().map(|&p| p.log2()).collect();
    let info_content: f64 = symbols.iter().map(|&s| -log2_probs[s]).sum();
    let checksum = xor_checksum(symbols);

    let lookup = match strategy {
        DecodeStrategy::BinarySearch => None,
        DecodeStrategy::LookupTable => Some(LookupModel::new(quantized.clone())?),
    };

    // Verification pass.
    let coder = encode_corpus(symbols, &quantized, config)?;
    let words = coder.get_compressed();
    let emitted_bits = words.len() as f64 * config.word_size as f64;
    let decoded = match &lookup {
        None => decode_corpus(&words, &quantized, config, symbols.len())?,
        Some(lookup) => decode_corpus(&words, lookup, config, symbols.len())?,
    };
    assert_eq!(xor_checksum(&decoded), checksum, "roundtrip checksum mismatch");
    assert_eq!(decoded, symbols, "roundtrip mismatch: coder bug");

    // Timing: per repeat, run twice back to back and measure only the second
    // run.
    let mut encode_ns = Vec::with_capacity(repeats);
    let mut decode_ns = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        encode_corpus(symbols, &quantized, config)?;
        let start = Instant::now();
        let coder = encode_corpus(symbols, &quantized, config)?;
        encode_ns.push(start.elapsed().as_nanos() as f64 / symbols.len().max(1) as f64);
        black_box(coder.num_words());

        let timed: f64 = match &lookup {
            None => decode_timed(&words, &quantized, config, symbols.len(), checksum)?,
            Some(lookup) => decode_timed(&words, lookup, config, symbols.len(), checksum)?,
        };
        decode_ns.push(timed);
    }

    let entropy = model.entropy();
    let kl = kl_divergence(model, &quantized)?;
    Ok(BenchRow {
        entropy_bits_per_symbol: entropy,
        config,
        strategy,
        total_overhead_percent: 100.0 * (emitted_bits - info_content) / info_content,
        kl_overhead_percent: 100.0 * kl / entropy,
        encode_ns_per_symbol: median(encode_ns),
        decode_ns_per_symbol: median(decode_ns),
    })
}

fn encode_corpus(
    symbols: &[Symbol],
    model: &CategoricalModel,
    config: StreamingConfig,
) -> Result<AnsCoder, CoderError> {
    let mut coder = AnsCoder::new(config, &[])?;
    for &symbol in symbols.iter().rev() {
        coder.push(symbol, model)?;
    }
    Ok(coder)
}

fn decode_corpus<M: EntropyModel>(
    words: &[crate::Word],
    model: &M,
    config: StreamingConfig,
    count: usize,
) -> Result<Vec<Symbol>, CoderError> {
    let mut coder = AnsCoder::new(config, words)?;
    (0..count).map(|_| coder.pop(model)).collect()
}

/// Decodes twice back to back and returns the ns/symbol of the second run.
fn decode_timed<M: EntropyModel>(
    words: &[crate::Word],
    model: &M,
    config: StreamingConfig,
    count: usize,
    expected_checksum: u64,
) -> Result<f64, CoderError> {
    let warmup = decode_corpus(words, model, config, count)?;
    black_box(xor_checksum(&warmup));
    let start = Instant::now();
    let decoded = decode_corpus(words, model, config, count)?;
    let checksum = xor_checksum(&decoded);
    let elapsed = start.elapsed().as_nanos() as f64;
    assert_eq!(black_box(checksum), expected_checksum, "timed decode checksum mismatch");
    Ok(elapsed / count.max(1) as f64)
}

fn xor_checksum(symbols: &[Symbol]) -> u64 {
    symbols.iter().fold(0u64, |acc, &s| acc ^ s as u64)
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Parameters for a full benchmark sweep: the cartesian product of seeds,
/// entropy targets, configurations, and strategies.
#[derive(Debug, Clone)]
pub struct SweepParams {
    pub seeds: Vec<u64>,
    pub entropies: Vec<f64>,
    pub length: usize,
    pub alphabet_size: usize,
    pub configs: Vec<StreamingConfig>,
    pub strategies: Vec<DecodeStrategy>,
    pub repeats: usize,
}

/// Runs the sweep, distributing slices (seed x entropy pairs) over at most
/// `max_threads` worker threads. Each slice owns its coders; timing runs stay
/// on a single thread. Row order is deterministic regardless of thread count.
pub fn run_sweep(params: &SweepParams, max_threads: usize) -> Result<BenchReport, CoderError> {
    let slices: Vec<(u64, f64)> = params
        .seeds
        .iter()
        .flat_map(|&seed| params.entropies.iter().map(move |&e| (seed, e)))
        .collect();
    let threads = max_threads.max(1).min(slices.len().max(1));

    let run_slice = |&(seed, entropy): &(u64, f64)| -> Result<Vec<BenchRow>, CoderError> {
        let (symbols, model) = make_corpus(seed, entropy, params.length, params.alphabet_size)?;
        let mut rows = Vec::new();
        for &config in &params.configs {
            for &strategy in &params.strategies {
                rows.push(run_bench(&symbols, &model, config, strategy, params.repeats)?);
            }
        }
        Ok(rows)
    };

    let mut results: Vec<Option<Result<Vec<BenchRow>, CoderError>>> = Vec::new();
    results.resize_with(slices.len(), || None);
    if threads <= 1 {
        for (i, slice) in slices.iter().enumerate() {
            results[i] = Some(run_slice(slice));
        }
    } else {
        std::thread::scope(|scope| {
            let mut chunks: Vec<_> =
                results.chunks_mut(slices.len().div_ceil(threads)).collect();
            let mut offset = 0;
            let mut handles = Vec::new();
            for chunk in chunks.drain(..) {
                let len = chunk.len();
                let slice_range = &slices[offset..offset + len];
                offset += len;
                handles.push(scope.spawn(move || {
                    for (result, slice) in chunk.iter_mut().zip(slice_range) {
                        *result = Some(run_slice(slice));
                    }
                }));
            }
        });
    }

    let mut report = BenchReport::default();
    for result in results {
        report.rows.extend(result.expect("all slices ran")?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ErrorKind;

    #[test]
    fn uniform_target_is_exact() {
        let (_, model) = make_corpus(1, 8.0, 100, 256).unwrap();
        assert_eq!(model.probs(), RealModel::uniform(256).probs());
        assert!((model.entropy() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn low_entropy_target_approaches_point_mass() {
        let (_, model) = make_corpus(1, 0.01, 100, 2).unwrap();
        assert!(model.probs()[0] > 0.999);
        assert!((model.entropy() - 0.01).abs() < 1e-4);
    }

    #[test]
    fn corpus_is_deterministic_per_seed() {
        let (a, _) = make_corpus(7, 2.5, 5000, 64).unwrap();
        let (b, _) = make_corpus(7, 2.5, 5000, 64).unwrap();
        let (c, _) = make_corpus(8, 2.5, 5000, 64).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn corpus_entropy_within_one_percent_across_sweep() {
        for target in [0.001, 0.1, 0.5, 1.0, 4.0, 7.9] {
            let (_, model) = make_corpus(3, target, 10, 256).unwrap();
            assert!(
                (model.entropy() - target).abs() <= 0.01 * target,
                "target {target}, got {}",
                model.entropy()
            );
        }
    }

    #[test]
    fn infeasible_targets_rejected() {
        assert_eq!(
            make_corpus(1, 0.0, 10, 4).unwrap_err().kind(),
            ErrorKind::ConfigInvalid
        );
        assert_eq!(
            make_corpus(1, 2.1, 10, 4).unwrap_err().kind(),
            ErrorKind::ConfigInvalid
        );
    }

    #[test]
    fn overhead_decomposition_ordering() {
        let (symbols, model) = make_corpus(5, 1.0, 50_000, 256).unwrap();
        let row = run_bench(&symbols, &model, StreamingConfig::DEFAULT, DecodeStrategy::BinarySearch, 1)
            .unwrap();
        assert!(row.total_overhead_percent >= row.kl_overhead_percent);
        assert!(row.kl_overhead_percent >= -1e-9);
        assert!(row.entropy_bits_per_symbol > 0.0);
        assert!(row.encode_ns_per_symbol > 0.0);
        assert!(row.decode_ns_per_symbol > 0.0);
    }

    #[test]
    fn lookup_strategy_matches_binary_search_bitrate() {
        let (symbols, model) = make_corpus(6, 3.0, 20_000, 64).unwrap();
        let binary = run_bench(&symbols, &model, StreamingConfig::SMALL, DecodeStrategy::BinarySearch, 1)
            .unwrap();
        let lookup = run_bench(&symbols, &model, StreamingConfig::SMALL, DecodeStrategy::LookupTable, 1)
            .unwrap();
        assert_eq!(binary.total_overhead_percent, lookup.total_overhead_percent);
        assert_eq!(binary.kl_overhead_percent, lookup.kl_overhead_percent);
    }

    #[test]
    fn lookup_decode_competitive_at_high_entropy() {
        // With a large alphabet the table lookup must not be slower than
        // binary search by more than 2x (it is usually faster).
        let (symbols, model) = make_corpus(9, 10.0, 200_000, 2048).unwrap();
        let config = StreamingConfig::new(12, 16, 32);
        let binary =
            run_bench(&symbols, &model, config, DecodeStrategy::BinarySearch, 5).unwrap();
        let lookup =
            run_bench(&symbols, &model, config, DecodeStrategy::LookupTable, 5).unwrap();
        assert!(
            lookup.decode_ns_per_symbol <= 2.0 * binary.decode_ns_per_symbol,
            "lookup {} ns vs binary {} ns",
            lookup.decode_ns_per_symbol,
            binary.decode_ns_per_symbol
        );
    }

    #[test]
    fn csv_header_is_stable() {
        let report = BenchReport::default();
        assert_eq!(
            report.to_csv(),
            "entropy,config,strategy,total_overhead_pct,kl_overhead_pct,encode_ns,decode_ns\n"
        );
    }

    #[test]
    fn csv_row_count_matches_grid() {
        let params = SweepParams {
            seeds: vec![1, 2],
            entropies: vec![1.0, 2.0, 3.0],
            length: 2000,
            alphabet_size: 16,
            configs: vec![StreamingConfig::DEFAULT, StreamingConfig::SMALL],
            strategies: vec![DecodeStrategy::BinarySearch],
            repeats: 1,
        };
        let report = run_sweep(&params, 4).unwrap();
        assert_eq!(report.rows.len(), 2 * 3 * 2);
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 1 + 12);

        // Same rows (modulo timing) regardless of thread count.
        let sequential = run_sweep(&params, 1).unwrap();
        let key = |r: &BenchRow| {
            (
                r.entropy_bits_per_symbol.to_bits(),
                r.config,
                r.total_overhead_percent.to_bits(),
            )
        };
        assert_eq!(
            report.rows.iter().map(key).collect::<Vec<_>>(),
            sequential.rows.iter().map(key).collect::<Vec<_>>()
        );
    }
}
