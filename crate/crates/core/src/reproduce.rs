//! Squared-distance tables and grids for the canonical state families, and
//! the two-cluster demonstration data set.
//!
//! Every entry carries the matrix-oracle value `Tr[(ρ₁−ρ₂)²]` next to the
//! value obtained through the overlap-measurement path under the requested
//! noise model (which reduces to the exact overlap identity in exact mode).

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::clustering::{kmeans, DistanceBackend, KMeansConfig, KMeansResult};
use crate::encoding::FeatureVector;
use crate::error::Result;
use crate::interferometry::{ensemble_measure, measure_hsd, EnsembleSpec, NoiseModel};
use crate::random::rng_from_seed;
use crate::state::{
    hsd_squared_exact, make_bell, make_horodecki, make_separable, make_werner, overlap_exact, purity, BellKind,
    DensityMatrix,
};

pub const GRID_POINTS: usize = 21;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceTable {
    pub labels: Vec<String>,
    /// `exact[i][j]`: matrix-oracle D².
    pub exact: Vec<Vec<f64>>,
    /// D² from three overlap estimates (unclamped radicand).
    pub measured: Vec<Vec<f64>>,
    pub std_error: Vec<Vec<f64>>,
}

fn table(states: Vec<(String, DensityMatrix)>, noise: &NoiseModel) -> Result<DistanceTable> {
    let n = states.len();
    let mut t = DistanceTable {
        labels: states.iter().map(|(l, _)| l.clone()).collect(),
        exact: vec![vec![0.0; n]; n],
        measured: vec![vec![0.0; n]; n],
        std_error: vec![vec![0.0; n]; n],
    };
    for (i, (_, a)) in states.iter().enumerate() {
        for (j, (_, b)) in states.iter().enumerate() {
            t.exact[i][j] = hsd_squared_exact(a, b)?;
            let m = measure_hsd(a, b, &noise.child((i * n + j) as u64))?;
            t.measured[i][j] = m.distance.squared;
            t.std_error[i][j] = m.squared_std_error;
        }
    }
    Ok(t)
}

/// D² between the four Bell states.
pub fn bell_table(noise: &NoiseModel) -> Result<DistanceTable> {
    table(BellKind::ALL.iter().map(|&k| (k.label().to_string(), make_bell(k))).collect(), noise)
}

/// D² between the computational basis states `00, 11, 01, 10`.
pub fn separable_table(noise: &NoiseModel) -> Result<DistanceTable> {
    let states = ["00", "11", "01", "10"]
        .iter()
        .map(|b| Ok((b.to_string(), make_separable(b)?)))
        .collect::<Result<Vec<_>>>()?;
    table(states, noise)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub x: f64,
    pub y: f64,
    /// Matrix oracle.
    pub d2_exact: f64,
    /// `purity(a) + purity(b) − 2·overlap(a, b)` from exact overlaps.
    pub d2_overlaps: f64,
    /// Closed form where one is known (Werner vs Werner).
    pub d2_closed_form: Option<f64>,
    /// Ensemble measurement path under the requested noise model.
    pub d2_measured: f64,
    pub std_error: f64,
}

pub fn grid_axis(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn grid(
    n: usize,
    noise: &NoiseModel,
    first: impl Fn(f64) -> Result<(DensityMatrix, EnsembleSpec)>,
    second: impl Fn(f64) -> Result<(DensityMatrix, EnsembleSpec)>,
    closed_form: impl Fn(f64, f64) -> Option<f64>,
) -> Result<Vec<GridEntry>> {
    let axis = grid_axis(n);
    let mut out = Vec::with_capacity(n * n);
    for (i, &x) in axis.iter().enumerate() {
        let (a, ea) = first(x)?;
        for (j, &y) in axis.iter().enumerate() {
            let (b, eb) = second(y)?;
            let cell = noise.child((i * n + j) as u64);
            let o11 = ensemble_measure(&ea, &ea, &cell.child(0))?;
            let o22 = ensemble_measure(&eb, &eb, &cell.child(1))?;
            let o12 = ensemble_measure(&ea, &eb, &cell.child(2))?;
            out.push(GridEntry {
                x,
                y,
                d2_exact: hsd_squared_exact(&a, &b)?,
                d2_overlaps: purity(&a) + purity(&b) - 2.0 * overlap_exact(&a, &b)?,
                d2_closed_form: closed_form(x, y),
                d2_measured: o11.value + o22.value - 2.0 * o12.value,
                std_error: (o11.std_error.powi(2) + o22.std_error.powi(2) + 4.0 * o12.std_error.powi(2)).sqrt(),
            });
        }
    }
    Ok(out)
}

fn werner_pair(p: f64) -> Result<(DensityMatrix, EnsembleSpec)> {
    Ok((make_werner(p)?, EnsembleSpec::werner(p)?))
}

fn horodecki_pair(q: f64) -> Result<(DensityMatrix, EnsembleSpec)> {
    Ok((make_horodecki(q)?, EnsembleSpec::horodecki(q)?))
}

/// D²(p_x, p_y) between two Werner states on an `n × n` grid over `[0, 1]²`.
pub fn werner_grid(n: usize, noise: &NoiseModel) -> Result<Vec<GridEntry>> {
    grid(n, noise, werner_pair, werner_pair, |x, y| Some(0.75 * (x - y) * (x - y)))
}

/// D²(p, q) between a Werner and a Horodecki state on an `n × n` grid.
pub fn werner_horodecki_grid(n: usize, noise: &NoiseModel) -> Result<Vec<GridEntry>> {
    grid(n, noise, werner_pair, horodecki_pair, |_, _| None)
}

/// Two isotropic Gaussian blobs in the radius-½ Bloch ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoGaussians {
    pub centers: [[f64; 3]; 2],
    pub sigma: f64,
    /// Samples outside this radius are redrawn.
    pub radius: f64,
}

impl Default for TwoGaussians {
    fn default() -> Self {
        TwoGaussians {
            centers: [[0.2, 0.1, 0.05], [-0.15, -0.15, -0.05]],
            sigma: 0.07,
            radius: 0.5,
        }
    }
}

impl TwoGaussians {
    /// `n` points alternating between the blobs, plus the blob each came from.
    pub fn sample(&self, n: usize, seed: u64) -> (Vec<FeatureVector>, Vec<usize>) {
        let mut rng = rng_from_seed(seed);
        let normal = Normal::new(0.0, self.sigma).expect("positive sigma");
        let mut points = Vec::with_capacity(n);
        let mut source = Vec::with_capacity(n);
        for i in 0..n {
            let c = self.centers[i % 2];
            let p = loop {
                let p: Vec<f64> = c.iter().map(|m| m + normal.sample(&mut rng)).collect();
                if p.iter().map(|x| x * x).sum::<f64>().sqrt() <= self.radius {
                    break p;
                }
            };
            points.push(FeatureVector::new(p).expect("three components"));
            source.push(i % 2);
        }
        (points, source)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterDemo {
    pub generator: TwoGaussians,
    pub points: Vec<FeatureVector>,
    pub source: Vec<usize>,
    pub euclidean: KMeansResult,
    pub hsd_exact: KMeansResult,
    /// Present when the noise model is stochastic.
    pub hsd_simulated: Option<KMeansResult>,
}

/// Runs k = 2 under each backend from the same initialization.
pub fn clusters_demo(n_points: usize, seed: u64, noise: &NoiseModel, max_iter: usize) -> Result<ClusterDemo> {
    let generator = TwoGaussians::default();
    let (points, source) = generator.sample(n_points, seed);
    let cfg = KMeansConfig { max_iter, ..KMeansConfig::new(2, seed) };
    let euclidean = kmeans(&points, &cfg, &DistanceBackend::Euclidean)?;
    let hsd_exact = kmeans(&points, &cfg, &DistanceBackend::HsdExact)?;
    let hsd_simulated = if noise.is_exact() {
        None
    } else {
        Some(kmeans(&points, &cfg, &DistanceBackend::HsdSimulated { noise: *noise })?)
    };
    Ok(ClusterDemo { generator, points, source, euclidean, hsd_exact, hsd_simulated })
}
