//! Hilbert-Schmidt distance between qubit states.
//!
//! - [`state`]: density matrices, Bell / separable / Werner / Horodecki
//!   families, exact overlaps and distances.
//! - [`encoding`]: feature vectors as generalized Bloch vectors, with HSD equal
//!   to `√2` times Euclidean distance.
//! - [`interferometry`]: POVM-level simulation of the two-photon overlap
//!   measurement, counting noise, and estimators.
//! - [`clustering`]: k-means with Euclidean, exact-HSD or simulated-HSD
//!   distances.
//! - [`reproduce`]: distance tables, parameter grids and the two-cluster demo.

pub mod clustering;
pub mod encoding;
pub mod error;
pub mod interferometry;
pub mod io;
pub mod random;
pub mod reproduce;
pub mod schema;
pub mod state;

pub use clustering::{assign, kmeans, update_centroids, Assignment, ClusterModel, DistanceBackend, Init, KMeansConfig, KMeansResult};
pub use encoding::{decode, encode, generator_basis, max_ball_radius, safe_radius, EmbeddingConfig, EmbeddingMode, FeatureVector, GeneratorBasis};
pub use error::{Error, ErrorKind, Result};
pub use interferometry::{
    estimate_overlap, measure_hsd, plan_measurements, sample_counts, CoincidenceCounts, EnsembleSpec, HsdMeasurement,
    MeasurementMethod, NoiseMode, NoiseModel, OverlapEstimate,
};
pub use schema::StateDescriptor;
pub use state::{
    hsd_exact, hsd_from_overlaps, make_bell, make_horodecki, make_separable, make_werner, overlap_exact, permute_qubits,
    purity, tensor, BellKind, DensityMatrix, QubitPermutation,
};
