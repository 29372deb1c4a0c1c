use serde::{Deserialize, Serialize};

use super::estimate::{measure_hsd, plan_measurements, MeasurementMethod, OverlapEstimate};
use super::noise::NoiseModel;
use super::{povm_probabilities, PovmProbabilities};
use crate::error::Result;
use crate::schema::StateDescriptor;
use crate::state::{hsd_squared_exact, overlap_exact, purity};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// `"rho1,rho1"`, `"rho2,rho2"` or `"rho1,rho2"`.
    pub configuration: String,
    pub probabilities: PovmProbabilities,
    pub estimate: OverlapEstimate,
    pub exact_overlap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactValues {
    pub hsd: f64,
    pub hsd_squared: f64,
    pub purity_a: f64,
    pub purity_b: f64,
    pub overlap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub n_qubits: u32,
    pub overlap_settings: u64,
    pub tomography_settings: u64,
    pub shots_per_setting: u64,
    pub total_shots: u64,
}

/// Full record of one simulated distance measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub state_a: StateDescriptor,
    pub state_b: StateDescriptor,
    pub noise: NoiseModel,
    pub steps: Vec<StepReport>,
    pub hsd: f64,
    pub hsd_squared: f64,
    pub hsd_squared_std_error: f64,
    pub clamped: bool,
    pub exact: ExactValues,
    pub plan: MeasurementPlan,
}

impl SimulationReport {
    pub fn run(state_a: &StateDescriptor, state_b: &StateDescriptor, noise: &NoiseModel) -> Result<Self> {
        let a = state_a.build()?;
        let b = state_b.build()?;
        let measured = measure_hsd(&a, &b, noise)?;
        let pairs = [("rho1,rho1", &a, &a), ("rho2,rho2", &b, &b), ("rho1,rho2", &a, &b)];
        let mut steps = Vec::with_capacity(3);
        for ((label, x, y), estimate) in pairs.into_iter().zip(measured.overlaps) {
            steps.push(StepReport {
                configuration: label.to_string(),
                probabilities: povm_probabilities(x, y)?,
                estimate,
                exact_overlap: overlap_exact(x, y)?,
            });
        }
        let hsd_squared = hsd_squared_exact(&a, &b)?;
        let overlap_settings = plan_measurements(2, MeasurementMethod::Overlap)?;
        Ok(SimulationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            state_a: state_a.clone(),
            state_b: state_b.clone(),
            noise: *noise,
            steps,
            hsd: measured.distance.distance,
            hsd_squared: measured.distance.squared,
            hsd_squared_std_error: measured.squared_std_error,
            clamped: measured.distance.clamped,
            exact: ExactValues {
                hsd: hsd_squared.sqrt(),
                hsd_squared,
                purity_a: purity(&a),
                purity_b: purity(&b),
                overlap: overlap_exact(&a, &b)?,
            },
            plan: MeasurementPlan {
                n_qubits: 2,
                overlap_settings,
                tomography_settings: plan_measurements(2, MeasurementMethod::Tomography)?,
                shots_per_setting: noise.shots,
                total_shots: overlap_settings * noise.shots,
            },
        })
    }
}
