use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use hsd_core::interferometry::{povm_probabilities, MeasurementPlan, SimulationReport};
use hsd_core::state::hsd_squared_exact;
use hsd_core::{
    estimate_overlap, measure_hsd, overlap_exact, plan_measurements, purity, sample_counts, DensityMatrix, MeasurementMethod,
    NoiseModel, OverlapEstimate, StateDescriptor,
};
use serde::Serialize;

use crate::output::{csv_bytes, emit, num};
use crate::Common;

const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Args)]
pub struct PairArgs {
    /// First state: inline (`werner:p=0.5`, `bell:phi+`, `separable:01`, `horodecki:q=1`) or JSON file.
    pub state_a: String,
    /// Second state, same forms.
    pub state_b: String,
}

#[derive(Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Matrix oracle.
    Exact,
    /// Three overlap measurements under the noise model.
    Simulated,
}

#[derive(Args)]
pub struct PlanArgs {
    #[arg(long, default_value_t = 2)]
    pub qubits: u32,
}

struct Pair {
    desc_a: StateDescriptor,
    desc_b: StateDescriptor,
    a: DensityMatrix,
    b: DensityMatrix,
}

fn load_pair(args: &PairArgs) -> Result<Pair> {
    let desc_a = StateDescriptor::load(&args.state_a).with_context(|| format!("state '{}'", args.state_a))?;
    let desc_b = StateDescriptor::load(&args.state_b).with_context(|| format!("state '{}'", args.state_b))?;
    let (a, b) = (desc_a.build()?, desc_b.build()?);
    Ok(Pair { desc_a, desc_b, a, b })
}

fn checked_noise(common: &Common) -> Result<NoiseModel> {
    let noise = common.noise();
    noise.validate()?;
    Ok(noise)
}

#[derive(Serialize)]
struct Overlaps {
    rho1_rho1: f64,
    rho2_rho2: f64,
    rho1_rho2: f64,
}

#[derive(Serialize)]
struct DistanceReport {
    schema_version: u32,
    mode: Mode,
    state_a: StateDescriptor,
    state_b: StateDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseModel>,
    hsd: f64,
    hsd_squared: f64,
    hsd_squared_std_error: f64,
    overlaps: Overlaps,
    overlap_std_errors: Overlaps,
    clamped: bool,
}

pub fn distance(args: &DistanceArgs, common: &Common) -> Result<()> {
    let pair = load_pair(&args.pair)?;
    let report = match args.mode {
        Mode::Exact => {
            let hsd_squared = hsd_squared_exact(&pair.a, &pair.b)?;
            DistanceReport {
                schema_version: REPORT_SCHEMA_VERSION,
                mode: Mode::Exact,
                state_a: pair.desc_a,
                state_b: pair.desc_b,
                noise: None,
                hsd: hsd_squared.max(0.0).sqrt(),
                hsd_squared,
                hsd_squared_std_error: 0.0,
                overlaps: Overlaps {
                    rho1_rho1: purity(&pair.a),
                    rho2_rho2: purity(&pair.b),
                    rho1_rho2: overlap_exact(&pair.a, &pair.b)?,
                },
                overlap_std_errors: Overlaps { rho1_rho1: 0.0, rho2_rho2: 0.0, rho1_rho2: 0.0 },
                clamped: false,
            }
        }
        Mode::Simulated => {
            let noise = checked_noise(common)?;
            let m = measure_hsd(&pair.a, &pair.b, &noise)?;
            DistanceReport {
                schema_version: REPORT_SCHEMA_VERSION,
                mode: Mode::Simulated,
                state_a: pair.desc_a,
                state_b: pair.desc_b,
                noise: Some(noise),
                hsd: m.distance.distance,
                hsd_squared: m.distance.squared,
                hsd_squared_std_error: m.squared_std_error,
                overlaps: Overlaps {
                    rho1_rho1: m.overlaps[0].value,
                    rho2_rho2: m.overlaps[1].value,
                    rho1_rho2: m.overlaps[2].value,
                },
                overlap_std_errors: Overlaps {
                    rho1_rho1: m.overlaps[0].std_error,
                    rho2_rho2: m.overlaps[1].std_error,
                    rho1_rho2: m.overlaps[2].std_error,
                },
                clamped: m.distance.clamped,
            }
        }
    };
    emit(common, "distance", &report, || {
        let r = &report;
        csv_bytes(
            &["mode", "hsd", "hsd_squared", "hsd_squared_std_error", "o11", "o22", "o12", "clamped"],
            &[vec![
                format!("{:?}", r.mode).to_lowercase(),
                num(r.hsd),
                num(r.hsd_squared),
                num(r.hsd_squared_std_error),
                num(r.overlaps.rho1_rho1),
                num(r.overlaps.rho2_rho2),
                num(r.overlaps.rho1_rho2),
                r.clamped.to_string(),
            ]],
        )
    })
}

#[derive(Serialize)]
struct OverlapReport {
    schema_version: u32,
    state_a: StateDescriptor,
    state_b: StateDescriptor,
    noise: NoiseModel,
    exact: f64,
    estimate: OverlapEstimate,
}

pub fn overlap(args: &PairArgs, common: &Common) -> Result<()> {
    let pair = load_pair(args)?;
    let noise = checked_noise(common)?;
    let probs = povm_probabilities(&pair.a, &pair.b)?;
    let estimate = estimate_overlap(&sample_counts(&probs, &noise)?)?;
    let report = OverlapReport {
        schema_version: REPORT_SCHEMA_VERSION,
        exact: overlap_exact(&pair.a, &pair.b)?,
        state_a: pair.desc_a,
        state_b: pair.desc_b,
        noise,
        estimate,
    };
    emit(common, "overlap", &report, || {
        let e = &report.estimate;
        csv_bytes(
            &["exact", "estimate", "std_error", "unphysical", "f_ii", "f_si", "f_is", "f_ss"],
            &[vec![
                num(report.exact),
                num(e.value),
                num(e.std_error),
                e.unphysical.to_string(),
                num(e.counts.f_ii),
                num(e.counts.f_si),
                num(e.counts.f_is),
                num(e.counts.f_ss),
            ]],
        )
    })
}

pub fn simulate(args: &PairArgs, common: &Common) -> Result<()> {
    let pair = load_pair(args)?;
    let noise = checked_noise(common)?;
    let report = SimulationReport::run(&pair.desc_a, &pair.desc_b, &noise)?;
    emit(common, "simulation", &report, || {
        let rows: Vec<Vec<String>> = report
            .steps
            .iter()
            .map(|s| {
                let (p, c) = (&s.probabilities, &s.estimate.counts);
                vec![
                    s.configuration.clone(),
                    num(p.ii),
                    num(p.si),
                    num(p.is),
                    num(p.ss),
                    num(c.f_ii),
                    num(c.f_si),
                    num(c.f_is),
                    num(c.f_ss),
                    num(s.estimate.value),
                    num(s.estimate.std_error),
                    num(s.exact_overlap),
                ]
            })
            .collect();
        csv_bytes(
            &[
                "configuration", "p_ii", "p_si", "p_is", "p_ss", "f_ii", "f_si", "f_is", "f_ss", "estimate", "std_error",
                "exact_overlap",
            ],
            &rows,
        )
    })
}

pub fn plan(args: &PlanArgs, common: &Common) -> Result<()> {
    let overlap_settings = plan_measurements(args.qubits, MeasurementMethod::Overlap)?;
    let plan = MeasurementPlan {
        n_qubits: args.qubits,
        overlap_settings,
        tomography_settings: plan_measurements(args.qubits, MeasurementMethod::Tomography)?,
        shots_per_setting: common.shots,
        total_shots: overlap_settings * common.shots,
    };
    emit(common, "plan", &plan, || {
        csv_bytes(
            &["n_qubits", "overlap_settings", "tomography_settings", "shots_per_setting", "total_shots"],
            &[vec![
                plan.n_qubits.to_string(),
                plan.overlap_settings.to_string(),
                plan.tomography_settings.to_string(),
                plan.shots_per_setting.to_string(),
                plan.total_shots.to_string(),
            ]],
        )
    })
}
