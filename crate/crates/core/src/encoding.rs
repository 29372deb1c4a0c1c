//! Feature vectors as generalized Bloch vectors.
//!
//! A vector `u` of length `D²−1` maps to `ρ = Î/D + Σᵢ uᵢGᵢ`, where the
//! generators are tensor products of Pauli matrices scaled so that
//! `Tr(GᵢGⱼ) = 2δᵢⱼ` for every qubit count. With that normalization
//! `hsd(encode(u), encode(v)) = √2·|u − v|` in any dimension, and
//! `purity(encode(u)) = 1/D + 2|u|²`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{trace_product, CMatrix, DensityMatrix, PSD_FLOOR};

pub const MAX_QUBITS: usize = 4;

/// Traceless Hermitian generators with `Tr(GᵢGⱼ) = 2δᵢⱼ`.
///
/// Ordering is lexicographic over tensor letters with `I < X < Y < Z`, qubit 0
/// first, skipping the all-identity word. For two qubits that gives
/// `IX, IY, IZ, XI, XX, …, ZZ`.
#[derive(Clone, Debug)]
pub struct GeneratorBasis {
    n_qubits: usize,
    labels: Vec<String>,
    generators: Vec<CMatrix>,
}

impl GeneratorBasis {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    /// Pauli words such as `"XZ"`, aligned with [`generators`](Self::generators).
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Process-wide cached basis for `n_qubits`.
    pub fn shared(n_qubits: usize) -> Result<&'static GeneratorBasis> {
        static CACHE: [OnceLock<GeneratorBasis>; MAX_QUBITS] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        check_qubits(n_qubits)?;
        Ok(CACHE[n_qubits - 1].get_or_init(|| build_basis(n_qubits)))
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::input(format!("generator basis supports 1..={MAX_QUBITS} qubits, got {n_qubits}")));
    }
    Ok(())
}

fn pauli(letter: u8) -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match letter {
        0 => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        1 => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        2 => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        3 => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => unreachable!(),
    }
}

fn build_basis(n_qubits: usize) -> GeneratorBasis {
    let words = 1usize << (2 * n_qubits);
    let scale = Complex64::new(1.0 / ((1u64 << (n_qubits - 1)) as f64).sqrt(), 0.0);
    let mut labels = Vec::with_capacity(words - 1);
    let mut generators = Vec::with_capacity(words - 1);
    for word in 1..words {
        let letters: Vec<u8> = (0..n_qubits)
            .map(|q| ((word >> (2 * (n_qubits - 1 - q))) & 3) as u8)
            .collect();
        let mut m = CMatrix::identity(1, 1);
        for &l in &letters {
            m = m.kronecker(&pauli(l));
        }
        labels.push(letters.iter().map(|&l| b"IXYZ"[l as usize] as char).collect());
        generators.push(m * scale);
    }
    GeneratorBasis { n_qubits, labels, generators }
}

pub fn generator_basis(n_qubits: usize) -> Result<GeneratorBasis> {
    check_qubits(n_qubits)?;
    Ok(build_basis(n_qubits))
}

/// Hilbert-space dimension `D` for a feature vector of length `D²−1`.
pub fn dim_for_len(len: usize) -> Result<usize> {
    (1..=MAX_QUBITS)
        .map(|n| 1usize << n)
        .find(|d| d * d - 1 == len)
        .ok_or_else(|| Error::input(format!("feature length {len} is not D²−1 for D in 2, 4, 8, 16")))
}

/// Outer radius `√((D−1)/(2D))` of the generalized Bloch ball; pure states
/// lie on it.
pub fn max_ball_radius(dim: usize) -> f64 {
    debug_assert!(dim >= 2);
    let d = dim as f64;
    ((d - 1.0) / (2.0 * d)).sqrt()
}

/// Radius `1/√(2D(D−1))` of the largest ball inside the positive cone.
///
/// Tight along `−decode(ψ)` for any pure ψ; equal to the outer radius at D = 2.
pub fn safe_radius(dim: usize) -> f64 {
    debug_assert!(dim >= 2);
    let d = dim as f64;
    1.0 / (2.0 * d * (d - 1.0)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    components: Vec<f64>,
    target_dim: usize,
}

impl FeatureVector {
    /// Infers the target dimension from the length.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let target_dim = dim_for_len(components.len())?;
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("feature vector has non-finite components"));
        }
        Ok(FeatureVector { components, target_dim })
    }

    pub fn zeros(target_dim: usize) -> Result<Self> {
        Self::new(vec![0.0; target_dim * target_dim - 1])
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<f64> {
        self.components
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn within_ball(&self) -> bool {
        self.norm() <= max_ball_radius(self.target_dim) + 1e-12
    }

    pub fn distance(&self, other: &FeatureVector) -> f64 {
        squared_euclidean(&self.components, &other.components).sqrt()
    }

    /// Coordinates of `encode(self) ⊗ Î/m` in a dimension `m` times larger.
    ///
    /// Tensoring with the maximally mixed state keeps every encodable vector
    /// encodable and scales all squared HSDs by `1/m`, so nearest-centroid
    /// decisions are unchanged.
    pub fn lift(&self, target_dim: usize) -> Result<FeatureVector> {
        let d = self.target_dim;
        if target_dim < d || !target_dim.is_multiple_of(d) || dim_for_len(target_dim * target_dim - 1).is_err() {
            return Err(Error::input(format!("cannot lift dimension {d} into {target_dim}")));
        }
        if target_dim == d {
            return Ok(self.clone());
        }
        let mixed = DensityMatrix::maximally_mixed(target_dim / d);
        decode(&crate::state::tensor(&encode_unchecked(self), &mixed))
    }
}

pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `Î/D + Σ uᵢGᵢ` without the eigenvalue check.
pub fn encode_unchecked(u: &FeatureVector) -> DensityMatrix {
    let dim = u.target_dim();
    let basis = GeneratorBasis::shared(dim.trailing_zeros() as usize).expect("FeatureVector dimension is supported");
    let mut m = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
    for (g, &x) in basis.generators().iter().zip(u.components()) {
        if x != 0.0 {
            m += g * Complex64::new(x, 0.0);
        }
    }
    DensityMatrix::new_unchecked(m)
}

/// Encodes and verifies positivity.
pub fn encode(u: &FeatureVector) -> Result<DensityMatrix> {
    let rho = encode_unchecked(u);
    let min_eigenvalue = rho.min_eigenvalue();
    if min_eigenvalue < PSD_FLOOR {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(rho)
}

/// `uᵢ = Tr(ρGᵢ)/2`.
pub fn decode(rho: &DensityMatrix) -> Result<FeatureVector> {
    let n = rho
        .n_qubits()
        .ok_or_else(|| Error::input(format!("dimension {} has no qubit generator basis", rho.dim())))?;
    let basis = GeneratorBasis::shared(n)?;
    let components = basis
        .generators()
        .iter()
        .map(|g| trace_product(rho.entries(), g).re / 2.0)
        .collect();
    FeatureVector::new(components)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    /// Vectors are used as given and checked for positivity on encode.
    Ball,
    /// Data in `[−l, l]^(D²−1)` is scaled uniformly into the safe ball.
    Hypercube,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub mode: EmbeddingMode,
    /// Half-side `l` of the data hypercube; ignored in ball mode.
    pub half_side: f64,
}

impl EmbeddingConfig {
    pub fn ball() -> Self {
        EmbeddingConfig { mode: EmbeddingMode::Ball, half_side: 1.0 }
    }

    pub fn hypercube(half_side: f64) -> Result<Self> {
        if !(half_side > 0.0 && half_side.is_finite()) {
            return Err(Error::input(format!("hypercube half-side must be positive, got {half_side}")));
        }
        Ok(EmbeddingConfig { mode: EmbeddingMode::Hypercube, half_side })
    }

    /// Data-to-feature scale factor for dimension `dim`.
    pub fn scale(&self, dim: usize) -> f64 {
        match self.mode {
            EmbeddingMode::Ball => 1.0,
            EmbeddingMode::Hypercube => {
                safe_radius(dim) / (self.half_side * ((dim * dim - 1) as f64).sqrt())
            }
        }
    }

    pub fn embed(&self, x: &[f64]) -> Result<FeatureVector> {
        match self.mode {
            EmbeddingMode::Ball => FeatureVector::new(x.to_vec()),
            EmbeddingMode::Hypercube => embed_hypercube(x, self),
        }
    }
}

/// `u = s·x` with `s = safe_radius(D)/(l·√(D²−1))`; every point of the cube
/// lands inside the safe ball.
pub fn embed_hypercube(x: &[f64], cfg: &EmbeddingConfig) -> Result<FeatureVector> {
    let dim = dim_for_len(x.len())?;
    let l = cfg.half_side;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::input(format!("hypercube half-side must be positive, got {l}")));
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(v.abs() <= l)) {
        return Err(Error::input(format!("component {i} = {v} outside [-{l}, {l}]")));
    }
    let s = safe_radius(dim) / (l * ((dim * dim - 1) as f64).sqrt());
    FeatureVector::new(x.iter().map(|v| v * s).collect())
}
