//! Lloyd's k-means over feature vectors with a pluggable distance.
//!
//! Under [`DistanceBackend::HsdExact`] points and centroids are encoded as
//! density matrices and compared by squared Hilbert-Schmidt distance, which is
//! exactly twice the squared Euclidean distance; argmins, and therefore labels,
//! match the Euclidean backend. [`DistanceBackend::HsdSimulated`] replaces the
//! exact distance with the three-overlap interferometric estimate.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{encode, squared_euclidean, FeatureVector};
use crate::error::{Error, Result};
use crate::interferometry::{measure_hsd, NoiseModel};
use crate::random::rng_from_seed;
use crate::state::{hsd_squared_exact, DensityMatrix};

/// Dimension the simulated backend measures in: the two-photon, two-qubit setup.
pub const SIMULATED_DIM: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistanceBackend {
    Euclidean,
    HsdExact,
    /// Single-qubit vectors are lifted to two qubits as `ρ ⊗ Î/2`.
    HsdSimulated { noise: NoiseModel },
}

impl DistanceBackend {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, DistanceBackend::HsdSimulated { noise } if !noise.is_exact())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub centroids: Vec<FeatureVector>,
    /// Number of centroid updates applied so far.
    pub iteration: usize,
}

impl ClusterModel {
    pub fn new(centroids: Vec<FeatureVector>) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::input("need at least one centroid"));
        }
        let len = centroids[0].len();
        if centroids.iter().any(|c| c.len() != len) {
            return Err(Error::input("centroids differ in dimension"));
        }
        Ok(ClusterModel { k: centroids.len(), centroids, iteration: 0 })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub labels: Vec<usize>,
}

/// Points prepared once for repeated assignment passes.
struct Prepared<'a> {
    points: &'a [FeatureVector],
    encoded: Option<Vec<DensityMatrix>>,
}

impl<'a> Prepared<'a> {
    fn new(points: &'a [FeatureVector], backend: &DistanceBackend) -> Result<Self> {
        check_points(points)?;
        let encoded = match backend {
            DistanceBackend::Euclidean => None,
            DistanceBackend::HsdExact => Some(encode_all(points, encode)?),
            DistanceBackend::HsdSimulated { noise } => {
                noise.validate()?;
                Some(encode_all(points, |p| encode(&p.lift(SIMULATED_DIM)?))?)
            }
        };
        Ok(Prepared { points, encoded })
    }

    fn assign(&self, centroids: &[FeatureVector], backend: &DistanceBackend, iteration: usize) -> Result<Vec<usize>> {
        if centroids.is_empty() {
            return Err(Error::input("need at least one centroid"));
        }
        if let Some(c) = centroids.iter().find(|c| c.len() != self.points[0].len()) {
            return Err(Error::DimensionMismatch { left: self.points[0].len(), right: c.len() });
        }
        let encoded_centroids = match backend {
            DistanceBackend::Euclidean => None,
            DistanceBackend::HsdExact => Some(encode_centroids(centroids, encode)?),
            DistanceBackend::HsdSimulated { .. } => {
                Some(encode_centroids(centroids, |c| encode(&c.lift(SIMULATED_DIM)?))?)
            }
        };

        (0..self.points.len())
            .into_par_iter()
            .map(|i| {
                let mut best = (0usize, f64::INFINITY);
                for j in 0..centroids.len() {
                    let d = match (backend, &self.encoded, &encoded_centroids) {
                        (DistanceBackend::HsdExact, Some(p), Some(c)) => hsd_squared_exact(&p[i], &c[j])?,
                        (DistanceBackend::HsdSimulated { noise }, Some(p), Some(c)) => {
                            let sub = noise.child(iteration as u64).child(i as u64).child(j as u64);
                            measure_hsd(&p[i], &c[j], &sub).map_err(|e| Error::at_point(i, e))?.distance.squared
                        }
                        _ => squared_euclidean(self.points[i].components(), centroids[j].components()),
                    };
                    if d < best.1 {
                        best = (j, d);
                    }
                }
                Ok(best.0)
            })
            .collect()
    }
}

fn check_points(points: &[FeatureVector]) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::input("no points"));
    };
    if let Some(p) = points.iter().find(|p| p.len() != first.len()) {
        return Err(Error::DimensionMismatch { left: first.len(), right: p.len() });
    }
    Ok(())
}

fn encode_all(points: &[FeatureVector], f: impl Fn(&FeatureVector) -> Result<DensityMatrix> + Sync) -> Result<Vec<DensityMatrix>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| f(p).map_err(|e| Error::at_point(i, e)))
        .collect()
}

fn encode_centroids(centroids: &[FeatureVector], f: impl Fn(&FeatureVector) -> Result<DensityMatrix>) -> Result<Vec<DensityMatrix>> {
    centroids
        .iter()
        .enumerate()
        .map(|(j, c)| f(c).map_err(|e| Error::input(format!("centroid {j}: {e}"))))
        .collect()
}

/// Nearest-centroid labels; ties go to the lowest index.
///
/// The simulated backend draws from substreams keyed by
/// `(model.iteration, point, centroid)`.
pub fn assign(points: &[FeatureVector], model: &ClusterModel, backend: &DistanceBackend) -> Result<Assignment> {
    let prepared = Prepared::new(points, backend)?;
    let labels = prepared.assign(&model.centroids, backend, model.iteration)?;
    Ok(Assignment { labels })
}

/// Mean of each cluster. A cluster left empty is re-seeded at the point
/// farthest from its previous centroid.
pub fn update_centroids(points: &[FeatureVector], labels: &[usize], previous: &ClusterModel) -> Result<ClusterModel> {
    check_points(points)?;
    if labels.len() != points.len() {
        return Err(Error::input(format!("{} labels for {} points", labels.len(), points.len())));
    }
    let k = previous.k;
    let dim = points[0].len();
    // running means: m += (x − m)/n reproduces identical inputs exactly
    let mut means = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        if l >= k {
            return Err(Error::input(format!("label {l} out of range for k = {k}")));
        }
        counts[l] += 1;
        let n = counts[l] as f64;
        for (m, x) in means[l].iter_mut().zip(p.components()) {
            *m += (x - *m) / n;
        }
    }
    let mut reseeded: HashSet<usize> = HashSet::new();
    let mut centroids = Vec::with_capacity(k);
    for j in 0..k {
        if counts[j] > 0 {
            centroids.push(FeatureVector::new(std::mem::take(&mut means[j]))?);
        } else {
            let old = previous.centroids[j].components();
            let far = (0..points.len())
                .filter(|i| !reseeded.contains(i))
                .fold(None, |best: Option<(usize, f64)>, i| {
                    let d = squared_euclidean(points[i].components(), old);
                    match best {
                        Some((_, bd)) if bd >= d => best,
                        _ => Some((i, d)),
                    }
                })
                .map(|(i, _)| i)
                .unwrap_or(0);
            reseeded.insert(far);
            centroids.push(points[far].clone());
        }
    }
    Ok(ClusterModel { k, centroids, iteration: previous.iteration + 1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// `k` distinct input points chosen uniformly.
    RandomPoints,
    /// k-means++ seeding by squared Euclidean distance.
    PlusPlus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub init: Init,
    /// Consecutive unchanged assignment passes required to stop. Defaults to
    /// 1 for exact backends and 3 for the stochastic one.
    pub patience: Option<usize>,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig { k, seed, max_iter: 100, init: Init::RandomPoints, patience: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared Euclidean distances for this pass.
    pub cost: f64,
    pub changed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub model: ClusterModel,
    pub assignment: Assignment,
    /// Assignment passes performed.
    pub iterations: usize,
    pub converged: bool,
    pub cost: f64,
    pub trace: Vec<IterationRecord>,
}

/// Within-cluster sum of squared Euclidean distances.
pub fn within_cluster_cost(points: &[FeatureVector], labels: &[usize], centroids: &[FeatureVector]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| squared_euclidean(p.components(), centroids[l].components()))
        .sum()
}

fn distinct_count(points: &[FeatureVector]) -> usize {
    points
        .iter()
        .map(|p| p.components().iter().map(|x| x.to_bits()).collect::<Vec<u64>>())
        .collect::<HashSet<_>>()
        .len()
}

pub fn initial_centroids(points: &[FeatureVector], k: usize, init: Init, seed: u64) -> Result<Vec<FeatureVector>> {
    let mut rng = rng_from_seed(seed);
    match init {
        Init::RandomPoints => {
            let mut order: Vec<usize> = (0..points.len()).collect();
            order.shuffle(&mut rng);
            let mut seen = HashSet::new();
            let chosen: Vec<FeatureVector> = order
                .into_iter()
                .filter(|&i| seen.insert(points[i].components().iter().map(|x| x.to_bits()).collect::<Vec<_>>()))
                .take(k)
                .map(|i| points[i].clone())
                .collect();
            if chosen.len() < k {
                return Err(Error::input(format!("k = {k} exceeds the number of distinct points")));
            }
            Ok(chosen)
        }
        Init::PlusPlus => {
            let mut chosen = vec![points[rng.random_range(0..points.len())].clone()];
            let mut nearest: Vec<f64> =
                points.iter().map(|p| squared_euclidean(p.components(), chosen[0].components())).collect();
            while chosen.len() < k {
                let total: f64 = nearest.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::input(format!("k = {k} exceeds the number of distinct points")));
                }
                let mut target = rng.random::<f64>() * total;
                let mut pick = nearest.iter().rposition(|&w| w > 0.0).unwrap_or(0);
                for (i, &w) in nearest.iter().enumerate() {
                    if w > 0.0 && target < w {
                        pick = i;
                        break;
                    }
                    target -= w;
                }
                let c = points[pick].clone();
                for (n, p) in nearest.iter_mut().zip(points) {
                    *n = n.min(squared_euclidean(p.components(), c.components()));
                }
                chosen.push(c);
            }
            Ok(chosen)
        }
    }
}

/// Alternates assignment and mean updates until labels stop changing for
/// `patience` consecutive passes or `max_iter` passes have run.
pub fn kmeans(points: &[FeatureVector], cfg: &KMeansConfig, backend: &DistanceBackend) -> Result<KMeansResult> {
    if cfg.k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    if cfg.max_iter == 0 {
        return Err(Error::input("max_iter must be at least 1"));
    }
    check_points(points)?;
    if distinct_count(points) < cfg.k {
        return Err(Error::input(format!("k = {} exceeds the number of distinct points", cfg.k)));
    }
    let patience = cfg.patience.unwrap_or(if backend.is_stochastic() { 3 } else { 1 }).max(1);

    let prepared = Prepared::new(points, backend)?;
    let mut model = ClusterModel::new(initial_centroids(points, cfg.k, cfg.init, cfg.seed)?)?;
    let mut previous: Option<Vec<usize>> = None;
    let mut stable = 0;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        let labels = prepared.assign(&model.centroids, backend, model.iteration)?;
        iterations += 1;
        let changed = match &previous {
            Some(prev) => prev.iter().zip(&labels).filter(|(a, b)| a != b).count(),
            None => labels.len(),
        };
        trace.push(IterationRecord {
            iteration: iterations,
            centroids: model.centroids.iter().map(|c| c.components().to_vec()).collect(),
            cost: within_cluster_cost(points, &labels, &model.centroids),
            changed,
        });
        if previous.is_some() && changed == 0 {
            stable += 1;
        } else {
            stable = 0;
        }
        if stable >= patience {
            converged = true;
            previous = Some(labels);
            break;
        }
        model = update_centroids(points, &labels, &model)?;
        previous = Some(labels);
    }

    let labels = previous.expect("at least one pass");
    let cost = within_cluster_cost(points, &labels, &model.centroids);
    Ok(KMeansResult {
        model,
        assignment: Assignment { labels },
        iterations,
        converged,
        cost,
        trace,
    })
}
