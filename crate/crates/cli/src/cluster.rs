use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use hsd_core::clustering::{kmeans, DistanceBackend, Init, KMeansConfig};
use hsd_core::encoding::{dim_for_len, EmbeddingConfig, EmbeddingMode};
use hsd_core::io::{read_points, write_labels_to};
use hsd_core::FeatureVector;
use serde::Serialize;

use crate::output::{json_bytes, write_file};
use crate::Common;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Args)]
pub struct ClusterArgs {
    /// CSV with one point per row and D²−1 columns.
    pub points: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Euclidean)]
    pub backend: BackendArg,
    #[arg(long, value_enum, default_value_t = InitArg::Random)]
    pub init: InitArg,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Unchanged passes required to stop (default 1, or 3 for hsd-simulated).
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long, value_enum, default_value_t = EmbeddingArg::Ball)]
    pub embedding: EmbeddingArg,
    /// Half-side of the data hypercube for `--embedding hypercube`.
    #[arg(long, default_value_t = 1.0)]
    pub half_side: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Euclidean,
    HsdExact,
    HsdSimulated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    PlusPlus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EmbeddingArg {
    Ball,
    Hypercube,
}

#[derive(Serialize)]
struct ModelFile {
    schema_version: u32,
    k: usize,
    seed: u64,
    backend: DistanceBackend,
    init: Init,
    embedding: EmbeddingConfig,
    /// Feature = scale · data.
    scale: f64,
    iterations: usize,
    converged: bool,
    /// Within-cluster sum of squares in feature coordinates.
    cost: f64,
    /// Centroids in input coordinates.
    centroids: Vec<Vec<f64>>,
    feature_centroids: Vec<Vec<f64>>,
    cost_trace: Vec<f64>,
}

pub fn run(args: &ClusterArgs, common: &Common) -> Result<()> {
    let out_dir = common
        .out_dir
        .as_ref()
        .ok_or_else(|| hsd_core::Error::InvalidInput("cluster needs --out-dir".into()))?;
    let rows = read_points(&args.points).with_context(|| format!("reading {}", args.points.display()))?;
    let dim = dim_for_len(rows[0].len())?;

    let embedding = match args.embedding {
        EmbeddingArg::Ball => EmbeddingConfig::ball(),
        EmbeddingArg::Hypercube => EmbeddingConfig::hypercube(args.half_side)?,
    };
    let points = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != rows[0].len() {
                return Err(hsd_core::Error::InvalidInput(format!(
                    "row {} has {} columns, expected {}",
                    i + 1,
                    r.len(),
                    rows[0].len()
                )));
            }
            embedding.embed(r)
        })
        .collect::<Result<Vec<FeatureVector>, _>>()?;

    let backend = match args.backend {
        BackendArg::Euclidean => DistanceBackend::Euclidean,
        BackendArg::HsdExact => DistanceBackend::HsdExact,
        BackendArg::HsdSimulated => {
            let noise = common.noise();
            noise.validate()?;
            DistanceBackend::HsdSimulated { noise }
        }
    };
    let cfg = KMeansConfig {
        k: args.k,
        seed: common.seed,
        max_iter: args.max_iter,
        init: match args.init {
            InitArg::Random => Init::RandomPoints,
            InitArg::PlusPlus => Init::PlusPlus,
        },
        patience: args.patience,
    };
    let result = kmeans(&points, &cfg, &backend)?;

    let scale = embedding.scale(dim);
    let feature_centroids: Vec<Vec<f64>> = result.model.centroids.iter().map(|c| c.components().to_vec()).collect();
    let centroids = match embedding.mode {
        EmbeddingMode::Ball => feature_centroids.clone(),
        EmbeddingMode::Hypercube => feature_centroids.iter().map(|c| c.iter().map(|x| x / scale).collect()).collect(),
    };
    let model = ModelFile {
        schema_version: MODEL_SCHEMA_VERSION,
        k: args.k,
        seed: common.seed,
        backend,
        init: cfg.init,
        embedding,
        scale,
        iterations: result.iterations,
        converged: result.converged,
        cost: result.cost,
        centroids,
        feature_centroids,
        cost_trace: result.trace.iter().map(|t| t.cost).collect(),
    };

    let mut labels = Vec::new();
    write_labels_to(&mut labels, &[("label", &result.assignment.labels)])?;
    write_file(out_dir, "labels.csv", &labels)?;
    write_file(out_dir, "model.json", &json_bytes(&model)?)
}
