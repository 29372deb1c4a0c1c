use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::{Povm, PovmProbabilities};
use crate::error::{Error, Result};
use crate::random::{derive_seed, rng_from_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Expected rates `shots·p`, no sampling.
    Exact,
    /// `Binomial(shots, p)` per configuration.
    Binomial,
    /// `Poisson(shots·p)` per configuration.
    Poisson,
}

impl std::str::FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NoiseMode::Exact),
            "binomial" => Ok(NoiseMode::Binomial),
            "poisson" => Ok(NoiseMode::Poisson),
            _ => Err(Error::input(format!("unknown noise mode '{s}'"))),
        }
    }
}

/// Counting statistics for simulated coincidence rates.
///
/// `shots` is the number of trials per POVM configuration, so one overlap
/// costs `4·shots` and one distance `12·shots`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub mode: NoiseMode,
    pub shots: u64,
    pub seed: u64,
    /// Treat `f_II` as the known, state-independent trial count instead of
    /// measuring it.
    #[serde(default)]
    pub known_rate: bool,
}

impl NoiseModel {
    pub fn exact() -> Self {
        NoiseModel { mode: NoiseMode::Exact, shots: 1, seed: 0, known_rate: false }
    }

    pub fn binomial(shots: u64, seed: u64) -> Self {
        NoiseModel { mode: NoiseMode::Binomial, shots, seed, known_rate: false }
    }

    pub fn poisson(shots: u64, seed: u64) -> Self {
        NoiseModel { mode: NoiseMode::Poisson, shots, seed, known_rate: false }
    }

    pub fn with_known_rate(mut self, known: bool) -> Self {
        self.known_rate = known;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.mode == NoiseMode::Exact
    }

    /// Independent noise model for a sub-measurement identified by `key`.
    pub fn child(&self, key: u64) -> Self {
        NoiseModel { seed: derive_seed(self.seed, key), ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::input("shots must be at least 1"));
        }
        Ok(())
    }
}

/// Coincidence rates for the four POVM configurations of one overlap.
///
/// Stochastic modes produce integral values; exact mode carries the expected
/// rates unrounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    pub f_ii: f64,
    pub f_si: f64,
    pub f_is: f64,
    pub f_ss: f64,
    /// Trials per configuration.
    pub trials: f64,
    pub mode: NoiseMode,
    pub known_rate: bool,
}

impl CoincidenceCounts {
    pub fn get(&self, povm: Povm) -> f64 {
        match povm {
            Povm::II => self.f_ii,
            Povm::SI => self.f_si,
            Povm::IS => self.f_is,
            Povm::SS => self.f_ss,
        }
    }

    /// Accumulates another block of counts taken under the same mode.
    pub(crate) fn accumulate(&mut self, other: &CoincidenceCounts) {
        self.f_ii += other.f_ii;
        self.f_si += other.f_si;
        self.f_is += other.f_is;
        self.f_ss += other.f_ss;
        self.trials += other.trials;
    }

    pub(crate) fn empty(mode: NoiseMode, known_rate: bool) -> Self {
        CoincidenceCounts {
            f_ii: 0.0,
            f_si: 0.0,
            f_is: 0.0,
            f_ss: 0.0,
            trials: 0.0,
            mode,
            known_rate,
        }
    }
}

fn check_probability(p: f64) -> Result<f64> {
    const SLACK: f64 = 1e-9;
    if !(-SLACK..=1.0 + SLACK).contains(&p) {
        return Err(Error::input(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Draws one configuration. `trials` may be fractional only in exact and
/// Poisson modes.
pub(crate) fn draw(
    probs: &PovmProbabilities,
    mode: NoiseMode,
    trials: f64,
    seed: u64,
    known_rate: bool,
) -> Result<CoincidenceCounts> {
    let mut out = CoincidenceCounts::empty(mode, known_rate);
    out.trials = trials;
    for povm in Povm::ALL {
        let p = check_probability(probs.get(povm))?;
        let value = if povm == Povm::II && known_rate {
            trials
        } else {
            let mut rng = rng_from_seed(derive_seed(seed, povm.index() as u64));
            match mode {
                NoiseMode::Exact => trials * p,
                NoiseMode::Binomial => Binomial::new(trials.round() as u64, p)
                    .map_err(|e| Error::input(e.to_string()))?
                    .sample(&mut rng) as f64,
                NoiseMode::Poisson => {
                    let lambda = trials * p;
                    if lambda > 0.0 {
                        Poisson::new(lambda).map_err(|e| Error::input(e.to_string()))?.sample(&mut rng)
                    } else {
                        0.0
                    }
                }
            }
        };
        match povm {
            Povm::II => out.f_ii = value,
            Povm::SI => out.f_si = value,
            Povm::IS => out.f_is = value,
            Povm::SS => out.f_ss = value,
        }
    }
    Ok(out)
}

/// Simulated rates for one overlap; configuration `k` draws from the substream
/// `(noise.seed, k)`.
pub fn sample_counts(probs: &PovmProbabilities, noise: &NoiseModel) -> Result<CoincidenceCounts> {
    noise.validate()?;
    draw(probs, noise.mode, noise.shots as f64, noise.seed, noise.known_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUARTER: PovmProbabilities = PovmProbabilities { ii: 1.0, si: 0.25, is: 0.25, ss: 1.0 / 16.0 };

    #[test]
    fn exact_counts_are_expected_rates() {
        let noise = NoiseModel { shots: 1600, ..NoiseModel::exact() };
        let c = sample_counts(&QUARTER, &noise).unwrap();
        assert_eq!((c.f_ii, c.f_si, c.f_is, c.f_ss), (1600.0, 400.0, 400.0, 100.0));
        assert_eq!(c.trials, 1600.0);
    }

    #[test]
    fn seeded_draws_repeat() {
        for noise in [NoiseModel::binomial(5000, 99), NoiseModel::poisson(5000, 99)] {
            let a = sample_counts(&QUARTER, &noise).unwrap();
            let b = sample_counts(&QUARTER, &noise).unwrap();
            assert_eq!(a, b);
            let c = sample_counts(&QUARTER, &noise.child(1)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn binomial_counts_bounded() {
        let c = sample_counts(&QUARTER, &NoiseModel::binomial(100, 3)).unwrap();
        assert_eq!(c.f_ii, 100.0);
        for v in [c.f_si, c.f_is, c.f_ss] {
            assert!((0.0..=100.0).contains(&v) && v.fract() == 0.0);
        }
    }

    #[test]
    fn binomial_mean_matches_probability() {
        let shots = 1000u64;
        let runs = 10_000u64;
        let base = NoiseModel::binomial(shots, 2024);
        let mean = (0..runs)
            .map(|r| sample_counts(&QUARTER, &base.child(r)).unwrap().f_si / shots as f64)
            .sum::<f64>()
            / runs as f64;
        let sigma = (0.25f64 * 0.75 / (shots * runs) as f64).sqrt();
        assert!((mean - 0.25).abs() <= 3.0 * sigma, "mean {mean}, sigma {sigma}");
    }

    #[test]
    fn known_rate_pins_normalization() {
        let noise = NoiseModel::poisson(1000, 1).with_known_rate(true);
        let c = sample_counts(&QUARTER, &noise).unwrap();
        assert_eq!(c.f_ii, 1000.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = PovmProbabilities { si: 1.5, ..QUARTER };
        assert!(sample_counts(&bad, &NoiseModel::binomial(10, 0)).is_err());
        assert!(sample_counts(&QUARTER, &NoiseModel::binomial(0, 0)).is_err());
        assert_eq!("poisson".parse::<NoiseMode>().unwrap(), NoiseMode::Poisson);
        assert!("gaussian".parse::<NoiseMode>().is_err());
    }
}
