//! Density matrices, the canonical two-qubit state families, and the exact
//! overlap / purity / Hilbert-Schmidt distance routines every other module is
//! checked against.
//!
//! Qubit 0 is the most significant bit of a basis index, so `tensor(a, b)`
//! puts the qubits of `a` first.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest tolerated `|a_ij - conj(a_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest tolerated `|Tr(a) - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-9;
/// Two states are considered equal when their HSD is at most this.
pub const EQUALITY_TOL: f64 = 1e-8;

/// A Hermitian, unit-trace, positive-semidefinite matrix.
///
/// Values are immutable once built. [`DensityMatrix::new`] validates;
/// [`DensityMatrix::new_unchecked`] skips validation for hot loops where the
/// caller already knows the input is physical.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(entries);
        rho.validate()?;
        Ok(rho)
    }

    pub fn new_unchecked(entries: CMatrix) -> Self {
        DensityMatrix { entries }
    }

    /// Projector onto the normalized ket.
    pub fn from_ket(ket: &[Complex64]) -> Result<Self> {
        let norm = ket.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if ket.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::input("ket must be nonzero and finite"));
        }
        let dim = ket.len();
        let entries = CMatrix::from_fn(dim, dim, |i, j| ket[i] * ket[j].conj() / (norm * norm));
        Ok(Self::new_unchecked(entries))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Self::new_unchecked(CMatrix::identity(dim, dim) * w)
    }

    /// Convex combination `Σ wᵢ ρᵢ`. Weights must be nonnegative and sum to one.
    pub fn mixture(members: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::input("empty mixture"));
        };
        let dim = first.dim();
        let mut total = 0.0;
        let mut acc = CMatrix::zeros(dim, dim);
        for (w, rho) in members {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: rho.dim() });
            }
            if !(*w >= 0.0) {
                return Err(Error::input(format!("negative mixture weight {w}")));
            }
            total += w;
            acc += rho.entries.map(|c| c * *w);
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("mixture weights sum to {total}, expected 1")));
        }
        Ok(Self::new_unchecked(acc))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `log2(dim)` when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        // symmetric_eigenvalues only reads the lower triangle; symmetrize first
        // so tiny anti-Hermitian noise cannot bias the spectrum.
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(f64::NAN)
    }

    pub fn validate(&self) -> Result<()> {
        let (r, c) = self.entries.shape();
        if r == 0 || r != c {
            return Err(Error::InvalidState(format!("matrix must be square and nonempty, got {r}x{c}")));
        }
        if self.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let mut asym = 0.0f64;
        for i in 0..r {
            for j in 0..=i {
                asym = asym.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {asym:e})")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = self.min_eigenvalue();
        if min < PSD_FLOOR {
            return Err(Error::InvalidState(format!("not positive semidefinite (smallest eigenvalue {min:e})")));
        }
        Ok(())
    }

    /// Metric equality: `hsd_exact(self, other) <= EQUALITY_TOL`.
    pub fn approx_eq(&self, other: &DensityMatrix) -> bool {
        hsd_exact(self, other).is_ok_and(|d| d <= EQUALITY_TOL)
    }
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn ket(self) -> [Complex64; 4] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellKind::PhiPlus => [h, z, z, h],
            BellKind::PhiMinus => [h, z, z, -h],
            BellKind::PsiPlus => [z, h, h, z],
            BellKind::PsiMinus => [z, h, -h, z],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s
            .to_ascii_lowercase()
            .replace('+', "plus")
            .replace('-', "minus")
            .replace('_', "");
        match key.as_str() {
            "phiplus" => Ok(BellKind::PhiPlus),
            "phiminus" => Ok(BellKind::PhiMinus),
            "psiplus" => Ok(BellKind::PsiPlus),
            "psiminus" => Ok(BellKind::PsiMinus),
            _ => Err(Error::input(format!("unknown Bell state '{s}'"))),
        }
    }
}

/// Output qubit `i` carries input qubit `order[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitPermutation {
    order: Vec<usize>,
}

impl QubitPermutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &q in &order {
            if q >= order.len() || std::mem::replace(&mut seen[q], true) {
                return Err(Error::input(format!("{order:?} is not a permutation of 0..{}", order.len())));
            }
        }
        Ok(QubitPermutation { order })
    }

    pub fn identity(n: usize) -> Self {
        QubitPermutation { order: (0..n).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Maps an output basis index to the input basis index it reads from.
    fn source_index(&self, out: usize) -> usize {
        let n = self.order.len();
        let mut src = 0;
        for (pos, &from) in self.order.iter().enumerate() {
            let bit = (out >> (n - 1 - pos)) & 1;
            src |= bit << (n - 1 - from);
        }
        src
    }
}

pub fn make_bell(kind: BellKind) -> DensityMatrix {
    DensityMatrix::from_ket(&kind.ket()).expect("Bell kets are normalized")
}

/// Computational-basis projector `|b₁b₂⟩⟨b₁b₂|` for a two-character bit string.
pub fn make_separable(bits: &str) -> Result<DensityMatrix> {
    let index = match bits {
        "00" => 0,
        "01" => 1,
        "10" => 2,
        "11" => 3,
        _ => return Err(Error::input(format!("separable state needs one of 00/01/10/11, got '{bits}'"))),
    };
    let mut m = CMatrix::zeros(4, 4);
    m[(index, index)] = Complex64::new(1.0, 0.0);
    Ok(DensityMatrix::new_unchecked(m))
}

/// `p|Φ⁺⟩⟨Φ⁺| + (1−p)Î/4`, physical for `p ∈ [−1/3, 1]`.
pub fn make_werner(p: f64) -> Result<DensityMatrix> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::input(format!("Werner weight p = {p} outside [-1/3, 1]")));
    }
    let bell = make_bell(BellKind::PhiPlus);
    let m = bell.entries.map(|c| c * p) + CMatrix::identity(4, 4) * Complex64::new((1.0 - p) / 4.0, 0.0);
    Ok(DensityMatrix::new_unchecked(m))
}

/// `q|Φ⁻⟩⟨Φ⁻| + (1−q)|01⟩⟨01|`.
pub fn make_horodecki(q: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::input(format!("Horodecki weight q = {q} outside [0, 1]")));
    }
    let bell = make_bell(BellKind::PhiMinus);
    let sep = make_separable("01")?;
    DensityMatrix::mixture(&[(q, &bell), (1.0 - q, &sep)])
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// `Tr(a·b) = Σᵢⱼ aᵢⱼ bⱼᵢ`, real part.
pub fn overlap_exact(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a, b)?;
    Ok(trace_product(a.entries(), b.entries()).re)
}

pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn purity(a: &DensityMatrix) -> f64 {
    trace_product(a.entries(), a.entries()).re
}

/// `Tr[(a−b)²]` computed from the difference matrix directly.
pub fn hsd_squared_exact(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a, b)?;
    let diff = a.entries() - b.entries();
    Ok(trace_product(&diff, &diff).re.max(0.0))
}

pub fn hsd_exact(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    hsd_squared_exact(a, b).map(f64::sqrt)
}

/// Distance assembled from three overlaps, with the raw radicand kept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapDistance {
    /// `√max(0, squared)`.
    pub distance: f64,
    /// `o11 + o22 − 2·o12`, unclamped; may be negative for noisy inputs.
    pub squared: f64,
    pub clamped: bool,
}

pub fn hsd_from_overlaps(o11: f64, o22: f64, o12: f64) -> OverlapDistance {
    let squared = o11 + o22 - 2.0 * o12;
    let clamped = squared < 0.0;
    OverlapDistance {
        distance: squared.max(0.0).sqrt(),
        squared,
        clamped,
    }
}

/// Kronecker product; `a`'s qubits come first.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new_unchecked(a.entries().kronecker(b.entries()))
}

pub fn permute_qubits(a: &DensityMatrix, perm: &QubitPermutation) -> Result<DensityMatrix> {
    let n = a
        .n_qubits()
        .ok_or_else(|| Error::input(format!("dimension {} is not a power of two", a.dim())))?;
    if perm.len() != n {
        return Err(Error::input(format!("permutation of {} qubits applied to {n}-qubit state", perm.len())));
    }
    let dim = a.dim();
    let src: Vec<usize> = (0..dim).map(|i| perm.source_index(i)).collect();
    let m = CMatrix::from_fn(dim, dim, |r, c| a.entries()[(src[r], src[c])]);
    Ok(DensityMatrix::new_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn qubit(bit: usize) -> DensityMatrix {
        let mut m = CMatrix::zeros(2, 2);
        m[(bit, bit)] = c(1.0);
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn phi_plus_entries() {
        let rho = make_bell(BellKind::PhiPlus);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if [0, 3].contains(&i) && [0, 3].contains(&j) { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(rho.entries()[(i, j)].re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(rho.entries()[(i, j)].im, 0.0);
            }
        }
        rho.validate().unwrap();
    }

    #[test]
    fn bell_states_are_orthonormal() {
        for a in BellKind::ALL {
            for b in BellKind::ALL {
                let o = overlap_exact(&make_bell(a), &make_bell(b)).unwrap();
                assert_abs_diff_eq!(o, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bell_kind_parses_common_spellings() {
        assert_eq!("phi+".parse::<BellKind>().unwrap(), BellKind::PhiPlus);
        assert_eq!("phi_minus".parse::<BellKind>().unwrap(), BellKind::PhiMinus);
        assert_eq!("PsiPlus".parse::<BellKind>().unwrap(), BellKind::PsiPlus);
        assert_eq!("psi-".parse::<BellKind>().unwrap(), BellKind::PsiMinus);
        assert!("chi+".parse::<BellKind>().is_err());
    }

    #[test]
    fn separable_states() {
        let rho = make_separable("01").unwrap();
        let diag: Vec<f64> = (0..4).map(|i| rho.entries()[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 0.0, 0.0]);
        let d = hsd_exact(&make_separable("00").unwrap(), &make_separable("01").unwrap()).unwrap();
        assert_abs_diff_eq!(d * d, 2.0, epsilon = 1e-12);
        let s = make_separable("10").unwrap();
        assert_eq!(hsd_exact(&s, &s).unwrap(), 0.0);
        for bad in ["", "0", "012", "ab", "2"] {
            assert!(matches!(make_separable(bad), Err(Error::InvalidInput(_))));
        }
    }

    #[test]
    fn werner_limits_and_purity() {
        assert!(make_werner(0.0).unwrap().approx_eq(&DensityMatrix::maximally_mixed(4)));
        assert!(make_werner(1.0).unwrap().approx_eq(&make_bell(BellKind::PhiPlus)));
        assert_abs_diff_eq!(purity(&make_werner(0.5).unwrap()), 0.4375, epsilon = 1e-12);
        make_werner(-1.0 / 3.0).unwrap().validate().unwrap();
        assert!(make_werner(-0.34).is_err());
        assert!(make_werner(1.0001).is_err());
        assert!(make_werner(f64::NAN).is_err());
    }

    #[test]
    fn horodecki_limits() {
        assert!(make_horodecki(1.0).unwrap().approx_eq(&make_bell(BellKind::PhiMinus)));
        assert!(make_horodecki(0.0).unwrap().approx_eq(&make_separable("01").unwrap()));
        assert_abs_diff_eq!(purity(&make_horodecki(0.5).unwrap()), 0.5, epsilon = 1e-12);
        let d = hsd_exact(&make_horodecki(0.0).unwrap(), &make_werner(0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(d * d, 0.75, epsilon = 1e-12);
        assert!(make_horodecki(-0.1).is_err());
        assert!(make_horodecki(1.1).is_err());
    }

    #[test]
    fn families_valid_on_grid() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            make_werner(t).unwrap().validate().unwrap();
            make_werner(-1.0 / 3.0 + t * 4.0 / 3.0).unwrap().validate().unwrap();
            make_horodecki(t).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn overlaps_and_purity() {
        let mixed = DensityMatrix::maximally_mixed(4);
        assert_abs_diff_eq!(overlap_exact(&mixed, &mixed).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(purity(&mixed), 0.25, epsilon = 1e-15);
        for k in BellKind::ALL {
            assert_abs_diff_eq!(purity(&make_bell(k)), 1.0, epsilon = 1e-15);
        }
        let err = overlap_exact(&mixed, &DensityMatrix::maximally_mixed(2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { left: 4, right: 2 }));
        assert!(hsd_exact(&mixed, &DensityMatrix::maximally_mixed(2)).is_err());
    }

    #[test]
    fn werner_overlap_closed_form() {
        // brute-force product of the explicit matrices against 1/4 + 3p²/4
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let w = make_werner(p).unwrap();
            let brute = (w.entries() * w.entries()).trace().re;
            assert_abs_diff_eq!(brute, 0.25 + 0.75 * p * p, epsilon = 1e-12);
            assert_abs_diff_eq!(overlap_exact(&w, &w).unwrap(), brute, epsilon = 1e-14);
        }
    }

    #[test]
    fn orthogonal_bell_distance() {
        let d = hsd_exact(&make_bell(BellKind::PhiPlus), &make_bell(BellKind::PsiMinus)).unwrap();
        assert_abs_diff_eq!(d * d, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn overlap_distance_clamps() {
        assert_eq!(hsd_from_overlaps(1.0, 1.0, 1.0).distance, 0.0);
        let d = hsd_from_overlaps(1.0, 1.0, 0.0);
        assert_abs_diff_eq!(d.distance, 2f64.sqrt(), epsilon = 1e-15);
        assert!(!d.clamped);
        let noisy = hsd_from_overlaps(0.25, 0.25, 0.26);
        assert_eq!(noisy.distance, 0.0);
        assert!(noisy.clamped);
        assert_abs_diff_eq!(noisy.squared, -0.02, epsilon = 1e-15);
    }

    #[test]
    fn tensor_products() {
        let half = DensityMatrix::maximally_mixed(2);
        assert!(tensor(&half, &half).approx_eq(&DensityMatrix::maximally_mixed(4)));
        assert!(tensor(&qubit(0), &qubit(1)).approx_eq(&make_separable("01").unwrap()));
    }

    #[test]
    fn permutation_validation() {
        assert!(QubitPermutation::new(vec![0, 0]).is_err());
        assert!(QubitPermutation::new(vec![0, 2]).is_err());
        let swap = QubitPermutation::new(vec![1, 0]).unwrap();
        let rho = make_werner(0.3).unwrap();
        assert!(permute_qubits(&rho, &QubitPermutation::identity(3)).is_err());
        assert!(permute_qubits(&DensityMatrix::maximally_mixed(3), &swap).is_err());
    }

    #[test]
    fn swap_permutation_exchanges_factors() {
        let swap = QubitPermutation::new(vec![1, 0]).unwrap();
        let plus = DensityMatrix::from_ket(&[c(1.0), c(1.0)]).unwrap();
        let y = DensityMatrix::from_ket(&[c(1.0), Complex64::new(0.0, 1.0)]).unwrap();
        let swapped = permute_qubits(&tensor(&plus, &y), &swap).unwrap();
        assert!(swapped.approx_eq(&tensor(&y, &plus)));
        let rho = make_horodecki(0.4).unwrap();
        assert_eq!(permute_qubits(&rho, &QubitPermutation::identity(2)).unwrap(), rho);
    }

    #[test]
    fn validation_rejects_unphysical() {
        let mut m = CMatrix::identity(2, 2) * c(0.5);
        m[(0, 1)] = Complex64::new(0.1, 0.1);
        assert!(DensityMatrix::new(m.clone()).is_err()); // not Hermitian
        m[(1, 0)] = m[(0, 1)].conj();
        DensityMatrix::new(m).unwrap();
        assert!(DensityMatrix::new(CMatrix::identity(2, 2)).is_err()); // trace 2
        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5), c(-0.5)]));
        assert!(DensityMatrix::new(neg).is_err());
        assert!(DensityMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }
}
