//! Shot-by-shot simulation of the protocol. Each attempt draws one noise
//! realization from its own counter-derived RNG stream, so the result depends
//! only on the seed and the shot count.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;

use super::experiment::{Experiment, Gamma};
use super::prepare::{prepare, NoiseRealization, ISBS_PREP_CNOTS, SQD_PREP_CNOTS};
use super::{max_subset_witness, outcome_differences, ProtocolConfig, RunStatistics, WitnessReport};
use crate::channels::NoiseMode;
use crate::error::{Error, Result};
use crate::hilbert::sample_outcome;
use crate::objectivity::Framework;

/// Attempts per stall check: a window without a single success aborts the run.
pub const STALL_WINDOW: u64 = 100_000;
const BOOTSTRAP_RESAMPLES: usize = 1000;
const BOOTSTRAP_STREAM: u64 = 2;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream(seed: u64, branch: u64, index: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(seed ^ splitmix64(branch)) ^ splitmix64(index ^ 0x5A5A));
    ChaCha8Rng::seed_from_u64(key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Identity = 0,
    Gamma = 1,
}

struct Sampler<'a> {
    config: &'a ProtocolConfig,
    exp: &'a Experiment,
    prep_cnots: usize,
    prep_f: f64,
    noisy_parity: bool,
    /// Outcome distribution on `S ∪ F` with the null probability appended, per realization.
    cache: BTreeMap<(u8, u32, u32, u32), Vec<f64>>,
}

impl Sampler<'_> {
    fn draw_bits<R: Rng>(rng: &mut R, count: usize, probability: f64) -> u32 {
        (0..count).fold(0, |acc, k| {
            if rng.gen::<f64>() < probability {
                acc | (1 << k)
            } else {
                acc
            }
        })
    }

    /// `None` when a gate failed and the attempt is discarded.
    fn attempt(&mut self, branch: Branch, index: u64) -> Result<Option<usize>> {
        let noise = self.config.noise;
        let mut rng = stream(self.config.seed, branch as u64, index);
        if (0..self.prep_cnots).any(|_| rng.gen::<f64>() >= noise.p_cnot) {
            return Ok(None);
        }
        let prep_bits = Self::draw_bits(&mut rng, self.prep_cnots, 1.0 - self.prep_f);
        let photons = self.exp.layout().len();
        let noise_bits = match noise.mode {
            NoiseMode::MixGlobal => Self::draw_bits(&mut rng, 1, noise.p),
            NoiseMode::DepolarizeLocal => Self::draw_bits(&mut rng, photons, noise.p),
        };
        let mut parity_bits = 0;
        if branch == Branch::Gamma {
            let checks = self.exp.parity_cnots() / 2;
            let check_success = noise.p_cnot * noise.p_cnot;
            if (0..checks).any(|_| rng.gen::<f64>() >= check_success) {
                return Ok(None);
            }
            if self.noisy_parity {
                parity_bits = Self::draw_bits(&mut rng, self.exp.parity_cnots(), 1.0 - noise.f);
            }
        }
        let key = (branch as u8, prep_bits, noise_bits, parity_bits);
        if !self.cache.contains_key(&key) {
            let dist = self.distribution(branch, prep_bits, noise_bits, parity_bits)?;
            self.cache.insert(key, dist);
        }
        let dist = &self.cache[&key];
        Ok(Some(sample_outcome(dist, &mut rng)?))
    }

    fn distribution(&self, branch: Branch, prep_bits: u32, noise_bits: u32, parity_bits: u32) -> Result<Vec<f64>> {
        let weight = |bits: u32, k: usize| if bits & (1 << k) != 0 { 0.0 } else { 1.0 };
        let prep_f: Vec<f64> = (0..self.prep_cnots).map(|k| weight(prep_bits, k)).collect();
        let realization = match self.config.noise.mode {
            NoiseMode::MixGlobal => NoiseRealization::Global(noise_bits != 0),
            NoiseMode::DepolarizeLocal => NoiseRealization::Local(noise_bits),
        };
        let rho = prepare(self.config.framework, &prep_f, realization)?;
        let parity_f: Vec<f64> = (0..self.exp.parity_cnots())
            .map(|k| weight(parity_bits, k))
            .collect();
        let gamma = match branch {
            Branch::Identity => Gamma::Skip,
            Branch::Gamma if self.noisy_parity => Gamma::NoisyParity(&parity_f),
            Branch::Gamma => Gamma::Ideal,
        };
        let mut dist = self.exp.marginalize(&self.exp.run_branch_with(&rho, gamma)?);
        let total: f64 = dist.iter().sum();
        dist.push((1.0 - total).max(0.0));
        Ok(dist)
    }

    /// Counts per outcome (null last) after `target` successful runs, and the attempts used.
    fn run(&mut self, branch: Branch, target: u64) -> Result<(Vec<u64>, u64)> {
        let mut counts = alloc::vec![0u64; self.exp.sf_dim() + 1];
        let (mut successes, mut attempts, mut at_window_start) = (0u64, 0u64, 0u64);
        while successes < target {
            if let Some(o) = self.attempt(branch, attempts)? {
                counts[o] += 1;
                successes += 1;
            }
            attempts += 1;
            if attempts % STALL_WINDOW == 0 {
                if successes == at_window_start {
                    return Err(Error::Stalled {
                        successes: 0,
                        window: STALL_WINDOW,
                        attempts,
                        completed: successes,
                    });
                }
                at_window_start = successes;
            }
        }
        Ok((counts, attempts))
    }
}

fn frequencies(counts: &[u64], outcomes: usize, total: u64) -> Vec<f64> {
    counts[..outcomes]
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect()
}

/// Multinomial resample of `counts` with the same total, as a chain of binomials.
fn resample<R: Rng>(counts: &[u64], rng: &mut R) -> Vec<u64> {
    let mut remaining: u64 = counts.iter().sum();
    let mut mass = remaining;
    let mut out = alloc::vec![0u64; counts.len()];
    for (slot, &c) in out.iter_mut().zip(counts) {
        if remaining == 0 || mass == 0 {
            break;
        }
        let p = (c as f64 / mass as f64).min(1.0);
        let k = Binomial::new(remaining, p).map_or(0, |b| rng.sample(b));
        *slot = k;
        remaining -= k;
        mass -= c;
    }
    out
}

fn bootstrap_stderr(id: &[u64], gamma: &[u64], outcomes: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, BOOTSTRAP_STREAM, 0);
    let (n_id, n_g) = (id.iter().sum::<u64>(), gamma.iter().sum::<u64>());
    let stats: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let a = frequencies(&resample(id, &mut rng), outcomes, n_id);
            let b = frequencies(&resample(gamma, &mut rng), outcomes, n_g);
            max_subset_witness(&outcome_differences(&a, &b))
        })
        .collect();
    let n = stats.len() as f64;
    let mean = stats.iter().sum::<f64>() / n;
    let var = stats.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}

/// Sampled estimate of the witness from `config.shots` successful runs,
/// split between the branches by `identity_share`. Failed gates discard the
/// attempt; failed projections count as runs with no outcome.
pub fn witness_monte_carlo(config: &ProtocolConfig) -> Result<WitnessReport> {
    if config.shots == 0 {
        return Err(Error::InvalidArgument(
            "Monte Carlo evaluation needs shots > 0".into(),
        ));
    }
    let exp = config.experiment()?;
    let prep_cnots = match config.framework {
        Framework::Sqd => SQD_PREP_CNOTS.len(),
        Framework::Isbs => ISBS_PREP_CNOTS.len(),
    };
    let mut sampler = Sampler {
        config,
        exp: &exp,
        prep_cnots,
        prep_f: config.prep_f(),
        noisy_parity: config.noisy_parity(),
        cache: BTreeMap::new(),
    };
    let (n_id, n_g) = config.branch_shots();
    let (id_counts, id_attempts) = sampler.run(Branch::Identity, n_id)?;
    let (g_counts, g_attempts) = sampler.run(Branch::Gamma, n_g)?;
    let outcomes = exp.sf_dim();
    let measure = exp.measure(&config.prepare()?)?;
    let mut report = WitnessReport::assemble(
        config,
        &exp,
        frequencies(&id_counts, outcomes, n_id),
        frequencies(&g_counts, outcomes, n_g),
        measure,
    );
    report.stderr_max_subset = Some(bootstrap_stderr(&id_counts, &g_counts, outcomes, config.seed));
    report.successful_runs = n_id + n_g;
    report.runs = Some(RunStatistics {
        identity_runs: n_id,
        gamma_runs: n_g,
        gamma_null_runs: g_counts[outcomes],
        attempts: id_attempts + g_attempts,
    });
    Ok(report)
}
