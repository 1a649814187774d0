use num_complex::Complex64;

use super::{ComplexMatrix, HilbertError, CONSTRUCTION_TOL};

/// An orthogonal projector: `P·P = P` and `P = P†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(ComplexMatrix);

impl Projector {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, HilbertError> {
        if !matrix.is_square() {
            return Err(HilbertError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if !matrix.is_hermitian(CONSTRUCTION_TOL) {
            return Err(HilbertError::NotProjector("not self-adjoint".into()));
        }
        let idem = matrix.matmul(&matrix)?.max_abs_diff(&matrix)?;
        if idem > CONSTRUCTION_TOL {
            return Err(HilbertError::NotProjector(format!(
                "P·P differs from P by {idem:e}"
            )));
        }
        Ok(Projector(matrix))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// Rank of a projector equals its trace.
    pub fn rank(&self) -> usize {
        self.0.trace().re.round() as usize
    }
}

/// Rank-1 projector `v v† / ‖v‖²`.
pub fn projector_from_vector(v: &[Complex64]) -> Result<Projector, HilbertError> {
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if v.is_empty() || norm_sqr == 0.0 {
        return Err(HilbertError::ZeroVector);
    }
    let m = ComplexMatrix::outer(v, v).scale(Complex64::new(1.0 / norm_sqr, 0.0));
    Ok(Projector(m))
}

/// A complete set of mutually orthogonal projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    projectors: Vec<Projector>,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<Projector>) -> Result<Self, HilbertError> {
        let Some(first) = projectors.first() else {
            return Err(HilbertError::IncompleteMeasurement { deviation: 1.0 });
        };
        let dim = first.dim();
        if let Some(p) = projectors.iter().find(|p| p.dim() != dim) {
            return Err(HilbertError::DimensionMismatch(format!(
                "measurement mixes dimensions {dim} and {}",
                p.dim()
            )));
        }
        for i in 0..projectors.len() {
            for j in i + 1..projectors.len() {
                let overlap = projectors[i].0.matmul(&projectors[j].0)?.max_abs();
                if overlap > CONSTRUCTION_TOL {
                    return Err(HilbertError::NotOrthogonal {
                        first: i,
                        second: j,
                        overlap,
                    });
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for p in &projectors {
            sum = sum.add(&p.0)?;
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if deviation > CONSTRUCTION_TOL {
            return Err(HilbertError::IncompleteMeasurement { deviation });
        }
        Ok(ProjectiveMeasurement { projectors })
    }

    /// Measurement in the eigenbasis given by the columns of `basis`.
    pub fn from_basis(basis: &[Vec<Complex64>]) -> Result<Self, HilbertError> {
        let ps = basis
            .iter()
            .map(|v| projector_from_vector(v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ps)
    }

    /// Measurement in the computational basis of `C^dim`.
    pub fn computational(dim: usize) -> Self {
        let ps = (0..dim)
            .map(|i| {
                let mut d = vec![0.0; dim];
                d[i] = 1.0;
                Projector(ComplexMatrix::from_real_diagonal(&d))
            })
            .collect();
        ProjectiveMeasurement { projectors: ps }
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn outcome_count(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }
}

/// `Σ value_i · P_i`, requiring the projectors to form a measurement.
pub fn observable_from_spectrum(pairs: &[(f64, Projector)]) -> Result<ComplexMatrix, HilbertError> {
    let measurement = ProjectiveMeasurement::new(pairs.iter().map(|(_, p)| p.clone()).collect())?;
    let dim = measurement.dim();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (value, p) in pairs {
        out = out.add(&p.0.scale(Complex64::new(*value, 0.0)))?;
    }
    Ok(out)
}
