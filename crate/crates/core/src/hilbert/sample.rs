//! Seedable random states and measurements for property checks.

use num_complex::Complex64;
use rand::Rng;

use super::{projector_from_vector, ComplexMatrix, DensityOperator, ProjectiveMeasurement};

pub fn uniform_index<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    rng.gen_range(0..n)
}

/// Vector with entries uniform in the square `[-1, 1] + i[-1, 1]`; never zero.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6 {
            return v;
        }
    }
}

/// `G G† / tr(G G†)` for a random square `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let gg = g.matmul(&g.adjoint()).expect("square");
    let tr = gg.trace().re;
    DensityOperator::new(gg.scale(Complex64::new(1.0 / tr, 0.0)))
        .expect("G G† is a valid unnormalized state")
}

/// Orthonormal basis from Gram-Schmidt on random vectors.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = random_vector(rng, dim);
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        basis.push(v);
    }
    basis
}

/// Non-degenerate projective measurement in a random basis.
pub fn random_measurement<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ProjectiveMeasurement {
    let ps = random_basis(rng, dim)
        .iter()
        .map(|v| projector_from_vector(v).expect("unit vector"))
        .collect();
    ProjectiveMeasurement::new(ps).expect("orthonormal basis")
}
