//! POVM-level model of the two-photon overlap measurement.
//!
//! Two two-qubit states are carried by two photons. Qubit 0 of each state rides
//! photon A and qubit 1 rides photon B, so after regrouping the joint register
//! reads `(pol_A, spa_A, pol_B, spa_B)`: state 1 lives in polarization, state 2
//! in the spatial mode. Each photon is then measured with the identity `Î` or
//! the singlet projection `Ŝ = |Ψ⁻⟩⟨Ψ⁻|` across its two degrees of freedom.
//!
//! Because `Î − 2Ŝ` is the SWAP of the two qubits on one photon, the product
//! of the two photon-local SWAPs exchanges the states, and
//! `Tr(ρ₁ρ₂) = 1 − 2(p_SI + p_IS − 2p_SS)`.

mod estimate;
mod noise;
mod report;

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{permute_qubits, tensor, trace_product, CMatrix, DensityMatrix, QubitPermutation};

pub use estimate::{
    ensemble_measure, estimate_overlap, measure_hsd, plan_measurements, EnsembleSpec, HsdMeasurement,
    MeasurementMethod, OverlapEstimate,
};
pub use noise::{sample_counts, CoincidenceCounts, NoiseMode, NoiseModel};
pub use report::{ExactValues, MeasurementPlan, SimulationReport, StepReport, REPORT_SCHEMA_VERSION};

/// Per-photon measurement choice pair, photon A first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Povm {
    II,
    SI,
    IS,
    SS,
}

impl Povm {
    pub const ALL: [Povm; 4] = [Povm::II, Povm::SI, Povm::IS, Povm::SS];

    pub fn index(self) -> usize {
        self as usize
    }

    fn singlet_on(self) -> (bool, bool) {
        match self {
            Povm::II => (false, false),
            Povm::SI => (true, false),
            Povm::IS => (false, true),
            Povm::SS => (true, true),
        }
    }
}

impl fmt::Display for Povm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Probabilities of the four POVM configurations for one overlap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmProbabilities {
    pub ii: f64,
    pub si: f64,
    pub is: f64,
    pub ss: f64,
}

impl PovmProbabilities {
    pub fn get(&self, povm: Povm) -> f64 {
        match povm {
            Povm::II => self.ii,
            Povm::SI => self.si,
            Povm::IS => self.is,
            Povm::SS => self.ss,
        }
    }

    /// Overlap from exact probabilities, `1 − 2(p_SI + p_IS − 2p_SS)/p_II`.
    pub fn overlap(&self) -> f64 {
        1.0 - 2.0 * (self.si + self.is - 2.0 * self.ss) / self.ii
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Photon-grouping permutation `(pol_A, pol_B, spa_A, spa_B) → (pol_A, spa_A, pol_B, spa_B)`.
pub fn photon_grouping() -> QubitPermutation {
    QubitPermutation::new(vec![0, 2, 1, 3]).expect("valid permutation")
}

/// `ρ₁ ⊗ ρ₂` regrouped by photon.
pub fn arrange_joint_state(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<DensityMatrix> {
    for rho in [rho1, rho2] {
        if rho.dim() != 4 {
            return Err(Error::DimensionMismatch { left: rho.dim(), right: 4 });
        }
    }
    permute_qubits(&tensor(rho1, rho2), &photon_grouping())
}

fn singlet_ket() -> [Complex64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [c(0.0), c(h), c(-h), c(0.0)]
}

/// `|Ψ⁻⟩⟨Ψ⁻|` on the (pol, spa) pair of one photon.
pub fn singlet_projector() -> CMatrix {
    let k = singlet_ket();
    CMatrix::from_fn(4, 4, |i, j| k[i] * k[j].conj())
}

/// Permutation matrix exchanging the two qubits of a 4-dimensional space.
pub fn swap_operator() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(i, j)] = c(1.0);
    }
    m
}

/// The 16×16 operator `X̂_A ⊗ Ŷ_B` for a POVM configuration.
pub fn povm_operator(povm: Povm) -> &'static CMatrix {
    static OPS: OnceLock<[CMatrix; 4]> = OnceLock::new();
    let ops = OPS.get_or_init(|| {
        let id = CMatrix::identity(4, 4);
        let s = singlet_projector();
        Povm::ALL.map(|p| {
            let (a, b) = p.singlet_on();
            let left = if a { &s } else { &id };
            let right = if b { &s } else { &id };
            left.kronecker(right)
        })
    });
    &ops[povm.index()]
}

pub fn povm_probabilities(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<PovmProbabilities> {
    let joint = arrange_joint_state(rho1, rho2)?;
    Ok(probabilities_of_joint(&joint))
}

pub(crate) fn probabilities_of_joint(joint: &DensityMatrix) -> PovmProbabilities {
    let p = |povm| trace_product(povm_operator(povm), joint.entries()).re;
    PovmProbabilities {
        ii: p(Povm::II),
        si: p(Povm::SI),
        is: p(Povm::IS),
        ss: p(Povm::SS),
    }
}

/// One rank-1 product projection, `|a⟩_A ⊗ |b⟩_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct VonNeumannProjection {
    pub label: String,
    pub photon_a: [Complex64; 4],
    pub photon_b: [Complex64; 4],
}

impl VonNeumannProjection {
    pub fn ket(&self) -> Vec<Complex64> {
        self.photon_a
            .iter()
            .flat_map(|a| self.photon_b.iter().map(move |b| a * b))
            .collect()
    }

    pub fn projector(&self) -> CMatrix {
        let k = self.ket();
        CMatrix::from_fn(16, 16, |i, j| k[i] * k[j].conj())
    }

    /// `⟨ψ|ρ|ψ⟩` for a photon-grouped joint state.
    pub fn probability(&self, joint: &DensityMatrix) -> f64 {
        let k = self.ket();
        let m = joint.entries();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..16 {
            if k[i] == c(0.0) {
                continue;
            }
            for j in 0..16 {
                acc += k[i].conj() * m[(i, j)] * k[j];
            }
        }
        acc.re
    }
}

fn local_options(singlet: bool) -> Vec<(String, [Complex64; 4])> {
    if singlet {
        return vec![("S".to_string(), singlet_ket())];
    }
    (0..4)
        .map(|idx| {
            let mut k = [c(0.0); 4];
            k[idx] = c(1.0);
            (format!("{}{}", if idx & 2 == 0 { 'H' } else { 'V' }, idx & 1), k)
        })
        .collect()
}

/// Decomposition of a POVM into rank-1 product projections.
///
/// Computational outcomes on a photon are labelled by polarization and spatial
/// bit, e.g. `V0` for vertical polarization in spatial mode 0.
pub fn von_neumann_projections(povm: Povm) -> Vec<VonNeumannProjection> {
    let (sa, sb) = povm.singlet_on();
    let mut out = Vec::new();
    for (la, ka) in local_options(sa) {
        for (lb, kb) in local_options(sb) {
            out.push(VonNeumannProjection {
                label: format!("A:{la} B:{lb}"),
                photon_a: ka,
                photon_b: kb,
            });
        }
    }
    out
}
