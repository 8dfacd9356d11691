//! Invariant self-test suites, runnable from the installed binary.
//!
//! Five suites with a fixed seed: the push-then-pop and pop-then-push
//! state-restoration scenarios, invariant preservation under random operation
//! sequences, chain coder locality, and frame concatenation. The flush
//! threshold of the streaming coder can be deliberately corrupted to confirm
//! the suites detect a broken coder.

use ans_stack::{
    io, quantize, AnsCoder, CategoricalModel, ChainCoder, EntropyModel, RealModel,
    StreamingConfig, Symbol, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
}

/// Configurations exercised by the scenario suites: all presets plus a tiny
/// config where boundary cases are dense.
fn suite_configs() -> Vec<StreamingConfig> {
    let mut configs = StreamingConfig::PRESETS.to_vec();
    configs.push(StreamingConfig::new(4, 4, 8));
    configs
}

fn random_model(rng: &mut ChaCha8Rng, precision: u32, max_alphabet: usize) -> CategoricalModel {
    let alphabet = rng.gen_range(1..=max_alphabet.min(1 << precision.min(24)));
    let raw: Vec<f64> = (0..alphabet).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    let p = RealModel::new(raw.iter().map(|&w| w / sum).collect()).unwrap();
    quantize(&p, precision).unwrap()
}

fn sample(rng: &mut ChaCha8Rng, model: &CategoricalModel) -> Symbol {
    model.locate(rng.gen_range(0..model.n())).0
}

fn random_word(rng: &mut ChaCha8Rng, bits: u32) -> Word {
    if bits == 64 { rng.gen() } else { rng.gen_range(0..1u64 << bits) }
}

fn random_state(rng: &mut ChaCha8Rng, config: StreamingConfig) -> AnsCoder {
    let words: Vec<Word> =
        (0..rng.gen_range(0..8)).map(|_| random_word(rng, config.word_size)).collect();
    let mut coder = AnsCoder::new(config, &words).unwrap();
    for _ in 0..rng.gen_range(0..6) {
        let model = random_model(rng, config.precision, 10);
        if rng.gen_bool(0.5) {
            let symbol = sample(rng, &model);
            coder.push(symbol, &model).unwrap();
        } else {
            coder.pop(&model).unwrap();
        }
    }
    coder
}

fn holds_invariants(coder: &AnsCoder) -> bool {
    let cfg = coder.config();
    let i_prime = cfg.head_capacity == 128 || coder.head() < 1u128 << cfg.head_capacity;
    let ii_prime = coder.bulk().is_empty()
        || coder.head() >= 1u128 << (cfg.head_capacity - cfg.word_size);
    i_prime && ii_prime
}

/// Scenario (a): push followed by pop returns the symbol and restores the
/// full coder state, with both invariants holding at each boundary. With
/// `mutate_flush` the push uses a corrupted flush threshold and the suite is
/// expected to report failures.
pub fn scenario_a(seed: u64, trials_per_config: usize, mutate_flush: bool) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials = 0;
    let mut failures = 0;
    for config in suite_configs() {
        for _ in 0..trials_per_config {
            trials += 1;
            let mut coder = random_state(&mut rng, config);
            let model = random_model(&mut rng, config.precision, 10);
            let symbol = sample(&mut rng, &model);
            let before = coder.clone();

            let push_result = if mutate_flush {
                coder.push_mutated_flush(symbol, &model)
            } else {
                coder.push(symbol, &model)
            };
            if push_result.is_err() || !holds_invariants(&coder) {
                failures += 1;
                continue;
            }
            let popped = coder.pop(&model);
            if popped != Ok(symbol) || !holds_invariants(&coder) || coder != before {
                failures += 1;
            }
        }
    }
    SuiteResult { name: "scenario_a_push_pop", trials, failures }
}

/// Scenario (b): pop followed by push of the returned symbol restores the
/// full coder state.
pub fn scenario_b(seed: u64, trials_per_config: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut trials = 0;
    let mut failures = 0;
    for config in suite_configs() {
        for _ in 0..trials_per_config {
            trials += 1;
            let mut coder = random_state(&mut rng, config);
            let model = random_model(&mut rng, config.precision, 10);
            let before = coder.clone();

            let Ok(symbol) = coder.pop(&model) else {
                failures += 1;
                continue;
            };
            if !holds_invariants(&coder)
                || coder.push(symbol, &model).is_err()
                || !holds_invariants(&coder)
                || coder != before
            {
                failures += 1;
            }
        }
    }
    SuiteResult { name: "scenario_b_pop_push", trials, failures }
}

/// Random operation sequences must uphold both invariants after every single
/// operation.
pub fn invariant_preservation(seed: u64, trials_per_config: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut trials = 0;
    let mut failures = 0;
    for config in suite_configs() {
        for _ in 0..trials_per_config / 10 {
            let words: Vec<Word> =
                (0..rng.gen_range(0..8)).map(|_| random_word(&mut rng, config.word_size)).collect();
            let mut coder = AnsCoder::new(config, &words).unwrap();
            for _ in 0..10 {
                trials += 1;
                let model = random_model(&mut rng, config.precision, 10);
                let ok = if rng.gen_bool(0.5) {
                    let symbol = sample(&mut rng, &model);
                    coder.push(symbol, &model).is_ok()
                } else {
                    coder.pop(&model).is_ok()
                };
                if !ok || !holds_invariants(&coder) {
                    failures += 1;
                }
            }
        }
    }
    SuiteResult { name: "invariant_preservation", trials, failures }
}

/// Changing the model at one position of a chain coder decode must not change
/// any other decoded symbol.
pub fn chain_locality(seed: u64, trials: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let mut failures = 0;
    for _ in 0..trials {
        let precision = rng.gen_range(2..=12);
        let n = 1u64 << precision;
        let len = rng.gen_range(1..=20);
        let words: Vec<Word> = (0..len).map(|_| rng.gen_range(0..n)).collect();
        let models: Vec<CategoricalModel> =
            (0..len).map(|_| random_model(&mut rng, precision, 10)).collect();
        let position = rng.gen_range(0..len);
        let perturbed = random_model(&mut rng, precision, 10);

        let decode = |models: Vec<&CategoricalModel>| -> Vec<Symbol> {
            let mut coder = ChainCoder::new(precision, &words, &[]).unwrap();
            models.iter().map(|m| coder.pop(*m).unwrap()).collect()
        };
        let baseline = decode(models.iter().collect());
        let mut swapped: Vec<&CategoricalModel> = models.iter().collect();
        swapped[position] = &perturbed;
        let changed = decode(swapped);

        let local = baseline
            .iter()
            .zip(&changed)
            .enumerate()
            .all(|(i, (a, b))| i == position || a == b);
        if !local {
            failures += 1;
        }
    }
    SuiteResult { name: "chain_locality", trials, failures }
}

/// Framed messages appended to arbitrary prefixes must decode to the message
/// and recover the prefix exactly, with the decoder's head ending at `n`.
pub fn frame_concatenation(seed: u64, trials: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let config = StreamingConfig::SIMPLE_16;
    let mut failures = 0;
    for _ in 0..trials {
        let model = random_model(&mut rng, config.precision, 40);
        let message: Vec<Symbol> =
            (0..rng.gen_range(0..50)).map(|_| sample(&mut rng, &model)).collect();
        let models: Vec<&CategoricalModel> = vec![&model; message.len()];
        let frame = match io::encode_framed(config, &message, &models) {
            Ok(frame) => frame,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let prefix: Vec<Word> = (0..rng.gen_range(0..10))
            .map(|_| random_word(&mut rng, config.word_size))
            .collect();
        let mut words = prefix.clone();
        words.extend_from_slice(&frame);

        let mut coder = AnsCoder::new(config, &words).unwrap();
        let decoded: Result<Vec<Symbol>, _> =
            (0..message.len()).map(|_| coder.pop(&model)).collect();
        let ok = decoded.as_deref() == Ok(&message[..])
            && coder.bulk() == prefix
            && coder.head() == model.n() as u128;
        if !ok {
            failures += 1;
        }
    }
    SuiteResult { name: "frame_concatenation", trials, failures }
}

/// Runs all suites and prints one line per suite plus a summary; returns
/// whether everything passed.
pub fn run_all(seed: u64, mutate_flush: bool) -> bool {
    let results = [
        scenario_a(seed, 2_000, mutate_flush),
        scenario_b(seed, 2_000),
        invariant_preservation(seed, 2_000),
        chain_locality(seed, 2_000),
        frame_concatenation(seed, 500),
    ];
    let mut total_trials = 0;
    let mut total_failures = 0;
    for result in &results {
        println!(
            "{:<24} {:>6} trials  {:>3} failures",
            result.name, result.trials, result.failures
        );
        total_trials += result.trials;
        total_failures += result.failures;
    }
    if total_failures == 0 {
        println!("selftest: PASS ({total_trials} trials)");
        true
    } else {
        println!("selftest: FAIL ({total_failures} of {total_trials} trials failed)");
        false
    }
}
