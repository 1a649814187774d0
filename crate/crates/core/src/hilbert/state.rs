use num_complex::Complex64;
use serde::Serialize;

use super::{
    ComplexMatrix, HilbertError, ProjectiveMeasurement, CONSTRUCTION_TOL, EIGENVALUE_FLOOR,
};

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, HilbertError> {
        if !matrix.is_square() {
            return Err(HilbertError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if !matrix.is_hermitian(CONSTRUCTION_TOL) {
            return Err(HilbertError::NotDensity("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > CONSTRUCTION_TOL {
            return Err(HilbertError::NotDensity(format!("trace is {tr}")));
        }
        let min_ev = matrix.hermitian_eigenvalues()?[0];
        if min_ev < EIGENVALUE_FLOOR {
            return Err(HilbertError::NotDensity(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(DensityOperator(matrix))
    }

    /// `|ψ⟩⟨ψ|` for the normalized `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self, HilbertError> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm_sqr == 0.0 {
            return Err(HilbertError::ZeroVector);
        }
        let m = ComplexMatrix::outer(psi, psi).scale(Complex64::new(1.0 / norm_sqr, 0.0));
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator(ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator(self.0.kron(&other.0))
    }

    /// Born probabilities `tr(ρ P_i)`.
    pub fn probabilities(&self, m: &ProjectiveMeasurement) -> Result<Vec<f64>, HilbertError> {
        m.projectors()
            .iter()
            .map(|p| Ok(self.0.trace_product(p.matrix())?.re))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Reduced state of one factor of `C^dim_a ⊗ C^dim_b`.
pub fn partial_trace(
    rho: &DensityOperator,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<DensityOperator, HilbertError> {
    if dim_a == 0 || dim_b == 0 || rho.dim() != dim_a * dim_b {
        return Err(HilbertError::DimensionMismatch(format!(
            "state of dimension {} is not {dim_a}x{dim_b}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let reduced = match keep {
        Subsystem::First => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b)
                .map(|k| m.get(i * dim_b + k, j * dim_b + k))
                .sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(dim_b, dim_b, |k, l| {
            (0..dim_a)
                .map(|i| m.get(i * dim_b + k, i * dim_b + l))
                .sum()
        }),
    };
    DensityOperator::new(reduced)
}

fn check_joint_dims(
    rho: &DensityOperator,
    m_a: &ProjectiveMeasurement,
    m_b: &ProjectiveMeasurement,
) -> Result<(), HilbertError> {
    if m_a.dim() * m_b.dim() != rho.dim() {
        return Err(HilbertError::DimensionMismatch(format!(
            "measurements on {}x{} do not fit a state of dimension {}",
            m_a.dim(),
            m_b.dim(),
            rho.dim()
        )));
    }
    Ok(())
}

/// Distribution of A-outcomes when A and B are measured jointly:
/// `p(i) = Σ_j tr(ρ (P^A_i ⊗ P^B_j))`.
pub fn marginal_distribution(
    rho: &DensityOperator,
    m_a: &ProjectiveMeasurement,
    m_b: &ProjectiveMeasurement,
) -> Result<Vec<f64>, HilbertError> {
    check_joint_dims(rho, m_a, m_b)?;
    m_a.projectors()
        .iter()
        .map(|pa| {
            m_b.projectors().iter().try_fold(0.0, |acc, pb| {
                let joint = pa.matrix().kron(pb.matrix());
                Ok(acc + rho.matrix().trace_product(&joint)?.re)
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoSignalingReport {
    /// Both comparisons are within tolerance.
    pub consistent: bool,
    /// Largest difference between the A-marginals in the two contexts.
    pub max_deviation: f64,
    /// Largest difference between either marginal and `tr(ρ₁ P^A_i)`.
    pub partial_trace_deviation: f64,
    pub marginal_b: Vec<f64>,
    pub marginal_b2: Vec<f64>,
    pub reduced_prediction: Vec<f64>,
}

/// Compares A's statistics in the context `{A, B}` against `{A, B′}`, and both
/// against the reduced state of the first subsystem.
pub fn no_signaling_check(
    rho: &DensityOperator,
    m_a: &ProjectiveMeasurement,
    m_b: &ProjectiveMeasurement,
    m_b2: &ProjectiveMeasurement,
    tol: f64,
) -> Result<NoSignalingReport, HilbertError> {
    if m_b.dim() != m_b2.dim() {
        return Err(HilbertError::DimensionMismatch(format!(
            "companion measurements act on dimensions {} and {}",
            m_b.dim(),
            m_b2.dim()
        )));
    }
    let marginal_b = marginal_distribution(rho, m_a, m_b)?;
    let marginal_b2 = marginal_distribution(rho, m_a, m_b2)?;
    let reduced = partial_trace(rho, m_a.dim(), m_b.dim(), Subsystem::First)?;
    let reduced_prediction = reduced.probabilities(m_a)?;

    let max_dev = |x: &[f64], y: &[f64]| {
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let max_deviation = max_dev(&marginal_b, &marginal_b2);
    let partial_trace_deviation =
        max_dev(&marginal_b, &reduced_prediction).max(max_dev(&marginal_b2, &reduced_prediction));
    Ok(NoSignalingReport {
        consistent: max_deviation <= tol && partial_trace_deviation <= tol,
        max_deviation,
        partial_trace_deviation,
        marginal_b,
        marginal_b2,
        reduced_prediction,
    })
}
