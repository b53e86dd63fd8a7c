//! Finite-shot Monte Carlo of the measurement protocols.
//!
//! Every random draw comes from a ChaCha20 stream. Repeat `r` of a run with
//! seed `s` is seeded with `s + r` (wrapping); independent series within one
//! repeat, such as the points of a time grid, use distinct ChaCha stream ids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::dynamics::Propagator;
use crate::error::{Error, Result};
use crate::hilbert::DensityOperator;
use crate::otoc::OtocSpec;
use crate::protocol::{combine_rotated, rotated_expectations, OutcomeSequence, ProbabilityTable, RotationAngles};

/// Generator name recorded in output metadata.
pub const GENERATOR: &str = "ChaCha20 (rand_chacha 0.9; seed_from_u64(seed+repeat), stream=point)";

pub fn substream(seed: u64, repeat: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(repeat));
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub n_shots: u64,
    pub seed: u64,
    pub n_repeats: u64,
    /// ChaCha stream id shared by all repeats.
    pub stream: u64,
}

impl SampleConfig {
    pub fn new(n_shots: u64, seed: u64, n_repeats: u64) -> Result<Self> {
        let cfg = Self { n_shots, seed, n_repeats, stream: 0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_shots == 0 {
            return Err(Error::InvalidSampling("n_shots must be at least 1".into()));
        }
        if self.n_repeats == 0 {
            return Err(Error::InvalidSampling("n_repeats must be at least 1".into()));
        }
        Ok(())
    }

    fn rng(&self, repeat: u64) -> ChaCha20Rng {
        substream(self.seed, repeat, self.stream)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_shots: u64,
}

/// Histogram of outcome sequences, indexed like [`ProbabilityTable`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OutcomeCounts {
    counts: [u64; 16],
}

impl OutcomeCounts {
    pub fn new(counts: [u64; 16]) -> Self {
        Self { counts }
    }

    pub fn get(&self, seq: OutcomeSequence) -> u64 {
        self.counts[seq.index()]
    }

    pub fn counts(&self) -> &[u64; 16] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn record(&mut self, seq: OutcomeSequence) {
        self.counts[seq.index()] += 1;
    }
}

/// One shot: inverse CDF over the sixteen outcomes in index order.
pub fn draw_sequence<R: Rng + ?Sized>(table: &ProbabilityTable, rng: &mut R) -> OutcomeSequence {
    let probs = table.probabilities();
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            last = k;
            acc += p;
            if u < acc {
                return OutcomeSequence::from_index(k);
            }
        }
    }
    // Rounding can leave u a hair above the running sum.
    OutcomeSequence::from_index(last)
}

pub fn sample_sequences_with<R: Rng + ?Sized>(table: &ProbabilityTable, n_shots: u64, rng: &mut R) -> OutcomeCounts {
    let mut counts = OutcomeCounts::default();
    for _ in 0..n_shots {
        counts.record(draw_sequence(table, rng));
    }
    counts
}

/// `n_shots` outcome sequences from repeat 0 of `cfg`.
pub fn sample_sequences(table: &ProbabilityTable, cfg: &SampleConfig) -> Result<OutcomeCounts> {
    cfg.validate()?;
    let sum: f64 = table.probabilities().iter().sum();
    if (sum - 1.0).abs() > crate::protocol::NORM_TOL {
        return Err(Error::UnnormalizedTable { sum });
    }
    Ok(sample_sequences_with(table, cfg.n_shots, &mut cfg.rng(0)))
}

/// Mean and plug-in standard error of ±1 shots, given the number of `+1`s.
fn sign_statistics(plus: u64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let mean = (2.0 * plus as f64 - nf) / nf;
    // Plug-in variance of ±1 data is 1 − mean².
    let std = (1.0 - mean * mean).max(0.0).sqrt();
    (mean, std / nf.sqrt())
}

/// `2𝒞̂ − 1` with the per-shot product `o₁o₂o₃o₄` as the sample.
pub fn estimate_re_otoc(counts: &OutcomeCounts) -> Result<Estimate> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::EmptyCounts);
    }
    let plus: u64 = OutcomeSequence::all()
        .filter(|seq| seq.parity() > 0.0)
        .map(|seq| counts.get(seq))
        .sum();
    let (corr, stderr) = sign_statistics(plus, n);
    Ok(Estimate { value: 2.0 * corr - 1.0, stderr: 2.0 * stderr, n_shots: n })
}

/// `n_repeats` independent estimates, in repeat order.
pub fn repeated_estimates(table: &ProbabilityTable, cfg: &SampleConfig) -> Result<Vec<Estimate>> {
    cfg.validate()?;
    (0..cfg.n_repeats)
        .into_par_iter()
        .map(|r| estimate_re_otoc(&sample_sequences_with(table, cfg.n_shots, &mut cfg.rng(r))))
        .collect()
}

/// Sample standard deviation (`n − 1` denominator), summed in order.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Spread of `2𝒞̂ − 1` across `n_repeats` samples of `n_shots` each.
pub fn error_band(table: &ProbabilityTable, cfg: &SampleConfig) -> Result<f64> {
    if cfg.n_repeats < 2 {
        return Err(Error::InvalidSampling("an error band needs at least 2 repeats".into()));
    }
    let values: Vec<f64> = repeated_estimates(table, cfg)?.iter().map(|e| e.value).collect();
    Ok(sample_std(&values))
}

/// Shot-sampled `Im C` from four expectation values, drawing `n_shots` ±1
/// outcomes per angle set from `rng`.
pub fn sample_rotation_with<R: Rng + ?Sized>(
    expectations: &[f64; 4],
    angles: &RotationAngles,
    n_shots: u64,
    rng: &mut R,
) -> Result<Estimate> {
    if n_shots == 0 {
        return Err(Error::EmptyCounts);
    }
    let prefactor = angles.prefactor();
    let mut means = [0.0; 4];
    let mut variance = 0.0;
    for (k, expectation) in expectations.iter().enumerate() {
        let p_plus = (0.5 * (1.0 + expectation)).clamp(0.0, 1.0);
        let plus = (0..n_shots).filter(|_| rng.random::<f64>() < p_plus).count() as u64;
        let (mean, se) = sign_statistics(plus, n_shots);
        means[k] = mean;
        variance += se * se;
    }
    let value = combine_rotated(&means, angles)?;
    Ok(Estimate { value, stderr: variance.sqrt() / prefactor.abs(), n_shots })
}

/// Finite-shot estimate of `Im C(t)` from the rotation protocol, using
/// repeat 0 of `cfg`.
pub fn sample_rotation_protocol(
    rho: &DensityOperator,
    spec: &OtocSpec,
    prop: &Propagator,
    t: f64,
    angles: &RotationAngles,
    cfg: &SampleConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let expectations = rotated_expectations(rho, spec, prop, t, angles)?;
    sample_rotation_with(&expectations, angles, cfg.n_shots, &mut cfg.rng(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generic_table() -> ProbabilityTable {
        let mut probs = [0.0; 16];
        for (k, p) in probs.iter_mut().enumerate() {
            *p = (k as f64 + 1.0).sqrt();
        }
        let total: f64 = probs.iter().sum();
        ProbabilityTable::new(probs.map(|p| p / total)).unwrap()
    }

    #[test]
    fn certain_table_puts_every_shot_on_one_sequence() {
        let seq = OutcomeSequence::from_index(0);
        let cfg = SampleConfig::new(500, 3, 1).unwrap();
        let counts = sample_sequences(&ProbabilityTable::certain(seq), &cfg).unwrap();
        assert_eq!(counts.get(seq), 500);
        assert_eq!(counts.total(), 500);
        let est = estimate_re_otoc(&counts).unwrap();
        assert_eq!((est.value, est.stderr), (1.0, 0.0));
    }

    #[test]
    fn uniform_counts_within_five_sigma() {
        let cfg = SampleConfig::new(16_000, 2024, 1).unwrap();
        let counts = sample_sequences(&ProbabilityTable::uniform(), &cfg).unwrap();
        let p: f64 = 1.0 / 16.0;
        let sigma = (16_000.0 * p * (1.0 - p)).sqrt();
        for c in counts.counts() {
            assert!((*c as f64 - 1000.0).abs() < 5.0 * sigma, "{c}");
        }
    }

    #[test]
    fn uniform_counts_give_zero_correlation() {
        let counts = OutcomeCounts::new([10; 16]);
        let est = estimate_re_otoc(&counts).unwrap();
        // 𝒞̂ = 0 exactly, so 2𝒞̂ − 1 = −1.
        assert_eq!(est.value, -1.0);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let cfg = SampleConfig::new(1000, 42, 1).unwrap();
        let table = generic_table();
        assert_eq!(sample_sequences(&table, &cfg).unwrap(), sample_sequences(&table, &cfg).unwrap());
        let other = SampleConfig { seed: 43, ..cfg };
        assert_ne!(sample_sequences(&table, &cfg).unwrap(), sample_sequences(&table, &other).unwrap());
        let shifted = cfg.with_stream(1);
        assert_ne!(sample_sequences(&table, &cfg).unwrap(), sample_sequences(&table, &shifted).unwrap());
    }

    #[test]
    fn empty_counts_rejected() {
        assert_eq!(estimate_re_otoc(&OutcomeCounts::default()), Err(Error::EmptyCounts));
        assert!(SampleConfig::new(0, 1, 1).is_err());
        assert!(SampleConfig::new(1, 1, 0).is_err());
    }

    #[test]
    fn error_band_examples() {
        let det = ProbabilityTable::certain(OutcomeSequence::from_index(5));
        let cfg = SampleConfig::new(100, 8, 50).unwrap();
        assert_eq!(error_band(&det, &cfg).unwrap(), 0.0);
        assert!(error_band(&det, &SampleConfig::new(100, 8, 1).unwrap()).is_err());

        let table = generic_table();
        let small = error_band(&table, &SampleConfig::new(100, 1, 400).unwrap()).unwrap();
        let large = error_band(&table, &SampleConfig::new(1000, 1, 400).unwrap()).unwrap();
        let ratio = small / large;
        let target = 10f64.sqrt();
        assert!(ratio > 0.75 * target && ratio < 1.25 * target, "{ratio}");
    }

    #[test]
    fn repeats_are_bitwise_reproducible() {
        let cfg = SampleConfig::new(200, 99, 16).unwrap();
        let table = generic_table();
        assert_eq!(repeated_estimates(&table, &cfg).unwrap(), repeated_estimates(&table, &cfg).unwrap());
    }

    #[test]
    fn deterministic_expectations_have_zero_variance() {
        let angles = RotationAngles::default();
        let mut rng = substream(5, 0, 0);
        let est = sample_rotation_with(&[1.0, -1.0, 1.0, -1.0], &angles, 300, &mut rng).unwrap();
        assert_eq!(est.stderr, 0.0);
        // (1 − (−1) − 1 + (−1)) / 2
        assert_eq!(est.value, 0.0);
        let est = sample_rotation_with(&[1.0, -1.0, -1.0, 1.0], &angles, 300, &mut rng).unwrap();
        assert_eq!((est.value, est.stderr), (2.0, 0.0));
    }

    #[test]
    fn sample_std_matches_hand_computation() {
        assert!((sample_std(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
