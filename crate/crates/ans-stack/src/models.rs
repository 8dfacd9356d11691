//! Fixed-point categorical entropy models.
//!
//! A [`CategoricalModel`] assigns each symbol `x` an integer frequency `m[x]`
//! with `sum(m) = n = 2^precision`, which partitions the range `{0, ..., n-1}`
//! into subranges of size `m[x]` (left edge `cdf[x]`). Coders only interact
//! with models through [`EntropyModel`]: mapping a symbol to its subrange
//! (`left_cumulative`) and mapping a point in the range back to its symbol
//! (`locate`). Models are immutable after construction and freely shareable
//! across threads.

use std::collections::BinaryHeap;

use crate::{CoderError, Symbol};

/// Fixed-point categorical distribution usable by all coders in this crate.
pub trait EntropyModel {
    /// Fixed-point precision; frequencies sum to `2^precision`.
    fn precision(&self) -> u32;

    fn alphabet_size(&self) -> usize;

    /// Returns `(cdf[symbol], m[symbol])`, the left edge and size of the
    /// symbol's subrange. The frequency may be zero; encoding such a symbol is
    /// rejected downstream.
    fn left_cumulative(&self, symbol: Symbol) -> Result<(u64, u64), CoderError>;

    /// Maps `z` in `{0, ..., n-1}` to the unique symbol whose subrange
    /// contains it, together with the offset `z - cdf[symbol]`.
    fn locate(&self, z: u64) -> (Symbol, u64);

    /// Total frequency mass `n = 2^precision`.
    fn n(&self) -> u64 {
        1u64 << self.precision()
    }
}

/// Categorical model with integer frequencies summing to `2^precision`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalModel {
    precision: u32,
    freqs: Vec<u64>,
    /// `cdf[s] = sum(freqs[..s])`; length `alphabet_size + 1`, ends at `n`.
    cdf: Vec<u64>,
}

impl CategoricalModel {
    /// Builds a model from explicit frequencies. Fails with
    /// `ModelNotNormalized` unless they sum to exactly `2^precision`.
    pub fn from_frequencies(precision: u32, freqs: Vec<u64>) -> Result<Self, CoderError> {
        if precision == 0 || precision > 32 {
            return Err(CoderError::ConfigInvalid {
                reason: "model precision must be between 1 and 32",
            });
        }
        if freqs.is_empty() {
            return Err(CoderError::ModelNotNormalized { reason: "alphabet is empty" });
        }
        let n = 1u64 << precision;
        let mut cdf = Vec::with_capacity(freqs.len() + 1);
        let mut acc: u64 = 0;
        cdf.push(0);
        for &f in &freqs {
            acc = acc.checked_add(f).ok_or(CoderError::ModelNotNormalized {
                reason: "frequencies overflow",
            })?;
            if acc > n {
                return Err(CoderError::ModelNotNormalized {
                    reason: "frequencies sum to more than 2^precision",
                });
            }
            cdf.push(acc);
        }
        if acc != n {
            return Err(CoderError::ModelNotNormalized {
                reason: "frequencies sum to less than 2^precision",
            });
        }
        Ok(Self { precision, freqs, cdf })
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.freqs
    }

    /// Cumulative frequencies; `cdf()[s]` is the left edge of symbol `s`'s
    /// subrange and `cdf()[alphabet_size]` equals `n`.
    pub fn cdf(&self) -> &[u64] {
        &self.cdf
    }

    /// Bit cost of `symbol` under this model: `precision - log2(m[symbol])`.
    pub fn information_content(&self, symbol: Symbol) -> Result<f64, CoderError> {
        let (_, freq) = self.left_cumulative(symbol)?;
        if freq == 0 {
            return Err(CoderError::FrequencyZero { symbol });
        }
        Ok(self.precision as f64 - (freq as f64).log2())
    }
}

impl EntropyModel for CategoricalModel {
    fn precision(&self) -> u32 {
        self.precision
    }

    fn alphabet_size(&self) -> usize {
        self.freqs.len()
    }

    fn left_cumulative(&self, symbol: Symbol) -> Result<(u64, u64), CoderError> {
        if symbol >= self.freqs.len() {
            return Err(CoderError::SymbolOutOfRange {
                symbol,
                alphabet_size: self.freqs.len(),
            });
        }
        Ok((self.cdf[symbol], self.freqs[symbol]))
    }

    fn locate(&self, z: u64) -> (Symbol, u64) {
        debug_assert!(z < self.n(), "z = {z} outside range of precision {}", self.precision);
        // Last index with cdf[x] <= z; zero-width subranges are skipped, so the
        // returned symbol always has nonzero frequency.
        let symbol = self.cdf.partition_point(|&c| c <= z) - 1;
        (symbol, z - self.cdf[symbol])
    }
}

/// Categorical model with a precomputed `z -> symbol` table for O(1) decoding.
///
/// The table has `2^precision` entries, so construction is refused for
/// precision above 16.
#[derive(Debug, Clone)]
pub struct LookupModel {
    base: CategoricalModel,
    table: Vec<u32>,
}

impl LookupModel {
    pub fn new(base: CategoricalModel) -> Result<Self, CoderError> {
        if base.precision() > 16 {
            return Err(CoderError::ConfigInvalid {
                reason: "lookup tables are only supported for precision <= 16",
            });
        }
        let n = base.n() as usize;
        let mut table = vec![0u32; n];
        for (symbol, window) in base.cdf.windows(2).enumerate() {
            for slot in &mut table[window[0] as usize..window[1] as usize] {
                *slot = symbol as u32;
            }
        }
        Ok(Self { base, table })
    }

    pub fn base(&self) -> &CategoricalModel {
        &self.base
    }
}

impl EntropyModel for LookupModel {
    fn precision(&self) -> u32 {
        self.base.precision()
    }

    fn alphabet_size(&self) -> usize {
        self.base.alphabet_size()
    }

    fn left_cumulative(&self, symbol: Symbol) -> Result<(u64, u64), CoderError> {
        self.base.left_cumulative(symbol)
    }

    fn locate(&self, z: u64) -> (Symbol, u64) {
        debug_assert!(z < self.n());
        let symbol = self.table[z as usize] as Symbol;
        (symbol, z - self.base.cdf[symbol])
    }
}

/// Real-valued probability vector (the true per-symbol source model).
#[derive(Debug, Clone, PartialEq)]
pub struct RealModel {
    probs: Vec<f64>,
}

impl RealModel {
    /// Probabilities must be nonnegative and sum to 1 within `1e-9`.
    pub fn new(probs: Vec<f64>) -> Result<Self, CoderError> {
        if probs.is_empty() {
            return Err(CoderError::ModelNotNormalized { reason: "alphabet is empty" });
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(CoderError::ModelNotNormalized {
                reason: "probabilities must be nonnegative",
            });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CoderError::ModelNotNormalized {
                reason: "probabilities must sum to 1 within 1e-9",
            });
        }
        Ok(Self { probs })
    }

    pub fn uniform(alphabet_size: usize) -> Self {
        Self { probs: vec![1.0 / alphabet_size as f64; alphabet_size] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Shannon entropy in bits per symbol, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    }
}

/// Quantizes real probabilities to integer frequencies summing to
/// `2^precision`.
///
/// The rounded cumulative distribution determines the raw frequencies; any
/// symbol with `p > 0` that rounded to zero is then raised to frequency 1,
/// with the deficit taken from the largest slots. Symbols with `p = 0` keep
/// frequency 0.
pub fn quantize(p: &RealModel, precision: u32) -> Result<CategoricalModel, CoderError> {
    quantize_impl(p, precision, false)
}

/// Like [`quantize`] but guarantees `m[x] >= 1` for *every* symbol, including
/// those with `p[x] = 0`, so that any symbol of the alphabet stays encodable.
pub fn quantize_leaky(p: &RealModel, precision: u32) -> Result<CategoricalModel, CoderError> {
    quantize_impl(p, precision, true)
}

fn quantize_impl(p: &RealModel, precision: u32, leaky: bool) -> Result<CategoricalModel, CoderError> {
    if precision == 0 || precision > 32 {
        return Err(CoderError::ConfigInvalid {
            reason: "model precision must be between 1 and 32",
        });
    }
    let n = 1u64 << precision;
    let probs = p.probs();
    if probs.len() as u128 > n as u128 {
        return Err(CoderError::ModelNotNormalized {
            reason: "alphabet is larger than 2^precision",
        });
    }

    // Round the cumulative distribution, then take differences. Rounding a
    // nondecreasing sequence stays nondecreasing, so all frequencies are >= 0.
    // The final tick is pinned to n, which makes the sum exact.
    let nf = n as f64;
    let mut freqs = vec![0u64; probs.len()];
    let mut acc = 0.0f64;
    let mut prev_tick = 0u64;
    for (x, &px) in probs.iter().enumerate() {
        acc += px;
        let tick = if x == probs.len() - 1 {
            n
        } else {
            ((acc * nf).round_ties_even() as u64).clamp(prev_tick, n)
        };
        freqs[x] = tick - prev_tick;
        prev_tick = tick;
    }

    let supported = |x: usize| leaky || probs[x] > 0.0;

    // Raise supported zero slots to 1 ...
    let mut deficit: u64 = 0;
    for x in 0..freqs.len() {
        if freqs[x] == 0 && supported(x) {
            freqs[x] = 1;
            deficit += 1;
        }
    }

    // ... and take the deficit from the largest slots. A slot can give one
    // unit iff it stays >= 1 when supported (>= 0 otherwise).
    if deficit > 0 {
        let mut heap: BinaryHeap<(u64, usize)> = freqs
            .iter()
            .enumerate()
            .filter(|&(x, &f)| f >= if supported(x) { 2 } else { 1 })
            .map(|(x, &f)| (f, x))
            .collect();
        while deficit > 0 {
            let Some((f, x)) = heap.pop() else {
                return Err(CoderError::ModelNotNormalized {
                    reason: "more nonzero-probability symbols than 2^precision",
                });
            };
            debug_assert_eq!(freqs[x], f);
            freqs[x] -= 1;
            deficit -= 1;
            if freqs[x] >= if supported(x) { 2 } else { 1 } {
                heap.push((freqs[x], x));
            }
        }
    }

    CategoricalModel::from_frequencies(precision, freqs)
}

/// `D_KL(P || Q)` in bits per symbol: `sum_x p[x] * log2(p[x] * n / m[x])`
/// with `0 log 0 = 0`. This is the bitrate overhead caused by coding data from
/// `P` with the fixed-point approximation `Q`.
pub fn kl_divergence(p: &RealModel, q: &CategoricalModel) -> Result<f64, CoderError> {
    if p.len() != q.alphabet_size() {
        return Err(CoderError::SymbolOutOfRange {
            symbol: p.len().max(q.alphabet_size()) - 1,
            alphabet_size: p.len().min(q.alphabet_size()),
        });
    }
    let nf = q.n() as f64;
    let mut sum = 0.0f64;
    for (x, &px) in p.probs().iter().enumerate() {
        if px > 0.0 {
            let m = q.frequencies()[x];
            if m == 0 {
                return Err(CoderError::FrequencyZero { symbol: x });
            }
            sum += px * (px * nf / m as f64).log2();
        }
    }
    Ok(sum)
}
