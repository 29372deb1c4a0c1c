//! Random states and seeded substreams.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::state::{CMatrix, DensityMatrix};

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Pure state from a normalized complex Gaussian vector (Haar distributed).
pub fn pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let ket: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    DensityMatrix::from_ket(&ket).expect("gaussian vector is nonzero")
}

/// Full-rank mixed state `AA†/Tr(AA†)` with complex Gaussian `A`.
pub fn mixed_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| gaussian_complex(rng));
    let aa = &a * a.adjoint();
    let tr = aa.trace().re;
    DensityMatrix::new_unchecked(aa / Complex64::new(tr, 0.0))
}

/// Uniform direction on the unit sphere in `dim` real dimensions.
pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point in the closed ball of the given radius.
pub fn point_in_ball<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    unit_vector(dim, rng).into_iter().map(|x| x * r).collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a key. Children of distinct
/// keys are independent for practical purposes; derivation order never
/// matters.
pub fn derive_seed(seed: u64, key: u64) -> u64 {
    splitmix64(seed ^ splitmix64(key.wrapping_add(0x632B_E59B_D9B4_E019)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_states_are_valid() {
        let mut rng = rng_from_seed(7);
        for dim in [2, 4, 16] {
            for _ in 0..20 {
                pure_state(dim, &mut rng).validate().unwrap();
                mixed_state(dim, &mut rng).validate().unwrap();
            }
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(0, 0);
        let b = derive_seed(0, 1);
        let c = derive_seed(1, 0);
        assert!(a != b && b != c && a != c);
        assert_eq!(derive_seed(42, 3), derive_seed(42, 3));
    }

    #[test]
    fn ball_points_stay_inside() {
        let mut rng = rng_from_seed(1);
        for _ in 0..500 {
            let p = point_in_ball(3, 0.5, &mut rng);
            assert!(p.iter().map(|x| x * x).sum::<f64>().sqrt() <= 0.5 + 1e-15);
        }
    }
}
