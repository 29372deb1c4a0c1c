use serde::{Deserialize, Serialize};

use super::noise::{draw, CoincidenceCounts, NoiseMode, NoiseModel};
use super::povm_probabilities;
use crate::error::{Error, Result};
use crate::state::{hsd_from_overlaps, make_bell, make_separable, BellKind, DensityMatrix, OverlapDistance};

/// `Tr(ρᵢρⱼ)` estimated from coincidence rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Set when the estimate falls outside `[0, 1]`; the value is reported
    /// as computed.
    pub unphysical: bool,
    pub counts: CoincidenceCounts,
}

/// `O = 1 − 2(f_SI + f_IS − 2f_SS)/f_II`, with first-order error propagation
/// over the four counts treated as independent.
pub fn estimate_overlap(counts: &CoincidenceCounts) -> Result<OverlapEstimate> {
    let n = counts.f_ii;
    if !(n > 0.0) {
        return Err(Error::Estimation(format!("normalization rate f_II = {n}")));
    }
    let singlet = counts.f_si + counts.f_is - 2.0 * counts.f_ss;
    let value = 1.0 - 2.0 * singlet / n;

    let variance = |f: f64| match counts.mode {
        NoiseMode::Exact => 0.0,
        NoiseMode::Binomial if counts.trials > 0.0 => (f * (1.0 - f / counts.trials)).max(0.0),
        NoiseMode::Binomial => 0.0,
        NoiseMode::Poisson => f,
    };
    let var_n = if counts.known_rate { 0.0 } else { variance(n) };
    let g = 2.0 / n;
    let var = g * g * (variance(counts.f_si) + variance(counts.f_is) + 4.0 * variance(counts.f_ss))
        + (2.0 * singlet / (n * n)).powi(2) * var_n;

    Ok(OverlapEstimate {
        value,
        std_error: var.sqrt(),
        unphysical: !(0.0..=1.0).contains(&value),
        counts: *counts,
    })
}

/// The three overlap estimates behind one distance and the combined result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsdMeasurement {
    /// `O(ρ₁,ρ₁)`, `O(ρ₂,ρ₂)`, `O(ρ₁,ρ₂)`.
    pub overlaps: [OverlapEstimate; 3],
    pub distance: OverlapDistance,
    /// Standard error of the squared distance.
    pub squared_std_error: f64,
}

fn measure_overlap(a: &DensityMatrix, b: &DensityMatrix, noise: &NoiseModel) -> Result<OverlapEstimate> {
    let probs = povm_probabilities(a, b)?;
    let counts = draw(&probs, noise.mode, noise.shots as f64, noise.seed, noise.known_rate)?;
    estimate_overlap(&counts)
}

/// Three-step distance measurement; step `k` uses `noise.child(k)`.
pub fn measure_hsd(rho1: &DensityMatrix, rho2: &DensityMatrix, noise: &NoiseModel) -> Result<HsdMeasurement> {
    noise.validate()?;
    let pairs = [(rho1, rho1), (rho2, rho2), (rho1, rho2)];
    let mut overlaps = Vec::with_capacity(3);
    for (step, (a, b)) in pairs.into_iter().enumerate() {
        overlaps.push(measure_overlap(a, b, &noise.child(step as u64))?);
    }
    let overlaps: [OverlapEstimate; 3] = overlaps.try_into().expect("three steps");
    let distance = hsd_from_overlaps(overlaps[0].value, overlaps[1].value, overlaps[2].value);
    let squared_std_error = (overlaps[0].std_error.powi(2)
        + overlaps[1].std_error.powi(2)
        + 4.0 * overlaps[2].std_error.powi(2))
    .sqrt();
    Ok(HsdMeasurement { overlaps, distance, squared_std_error })
}

/// A mixed state given as a weighted list of components, measured component
/// by component.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSpec {
    members: Vec<(f64, DensityMatrix)>,
}

impl EnsembleSpec {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::input("ensemble needs at least one member"));
        }
        let mut total = 0.0;
        for (w, rho) in &members {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::input(format!("ensemble weight {w} outside [0, 1]")));
            }
            if rho.dim() != 4 {
                return Err(Error::DimensionMismatch { left: rho.dim(), right: 4 });
            }
            rho.validate()?;
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("ensemble weights sum to {total}")));
        }
        Ok(EnsembleSpec { members })
    }

    pub fn single(state: DensityMatrix) -> Result<Self> {
        Self::new(vec![(1.0, state)])
    }

    /// Werner state as `Φ⁺` plus an equal mixture of the four Bell states.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("ensemble Werner weight p = {p} outside [0, 1]")));
        }
        let rest = (1.0 - p) / 4.0;
        let members = BellKind::ALL
            .into_iter()
            .map(|k| (if k == BellKind::PhiPlus { p + rest } else { rest }, make_bell(k)))
            .collect();
        Self::new(members)
    }

    pub fn horodecki(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::input(format!("Horodecki weight q = {q} outside [0, 1]")));
        }
        Self::new(vec![(q, make_bell(BellKind::PhiMinus)), (1.0 - q, make_separable("01")?)])
    }

    pub fn members(&self) -> &[(f64, DensityMatrix)] {
        &self.members
    }

    pub fn average(&self) -> DensityMatrix {
        let refs: Vec<(f64, &DensityMatrix)> = self.members.iter().map(|(w, r)| (*w, r)).collect();
        DensityMatrix::mixture(&refs).expect("validated on construction")
    }
}

/// Overlap of two ensembles from accumulated coincidence rates.
///
/// Member pair `(i, j)` receives `shots·wᵢ·wⱼ` trials (rounded in binomial
/// mode) from substream `i·|spec2| + j`; all pairs' counts are summed before
/// estimating.
pub fn ensemble_measure(spec1: &EnsembleSpec, spec2: &EnsembleSpec, noise: &NoiseModel) -> Result<OverlapEstimate> {
    noise.validate()?;
    let mut total = CoincidenceCounts::empty(noise.mode, noise.known_rate);
    let width = spec2.members.len();
    for (i, (w1, a)) in spec1.members.iter().enumerate() {
        for (j, (w2, b)) in spec2.members.iter().enumerate() {
            let mut trials = noise.shots as f64 * w1 * w2;
            if noise.mode == NoiseMode::Binomial {
                trials = trials.round();
            }
            if trials <= 0.0 {
                continue;
            }
            let probs = povm_probabilities(a, b)?;
            let seed = noise.child((i * width + j) as u64).seed;
            total.accumulate(&draw(&probs, noise.mode, trials, seed, noise.known_rate)?);
        }
    }
    estimate_overlap(&total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMethod {
    Overlap,
    Tomography,
}

/// Number of measurement settings needed for one distance between two
/// `n_qubits`-qubit states.
///
/// The overlap route needs three overlaps of four POVMs each regardless of
/// size. Tomography of both states needs `D²` settings per state, i.e.
/// `2(D²−1) + 2`.
pub fn plan_measurements(n_qubits: u32, method: MeasurementMethod) -> Result<u64> {
    if !(1..=31).contains(&n_qubits) {
        return Err(Error::input(format!("n_qubits must be in 1..=31, got {n_qubits}")));
    }
    Ok(match method {
        MeasurementMethod::Overlap => 3 * 4,
        MeasurementMethod::Tomography => {
            let d2 = 1u64 << (2 * n_qubits);
            2 * (d2 - 1) + 2
        }
    })
}
