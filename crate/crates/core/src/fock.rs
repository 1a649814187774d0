//! n-particle tensor spaces, the symmetrizer σⁿ and antisymmetrizer τⁿ,
//! Fock-sector dimensions, and the two-fermion position density.
//!
//! Both σⁿ and τⁿ carry the `1/n!` projector normalization, so they are
//! idempotent; use [`SymmetrizedState::normalized`] for unit-norm states.
//!
//! Basis states of `(C^d)^{⊗n}` are indexed row-major: particle 1 is the most
//! significant base-`d` digit, matching [`ComplexMatrix::kron`].

use itertools::Itertools;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::ComplexMatrix;

/// Largest supported `dⁿ`.
pub const MAX_TOTAL_DIM: usize = 4096;
/// Invariance checks on symmetrized states.
pub const SECTOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("single-particle dimension must be at least 1")]
    ZeroDimension,
    #[error("{d}^{n} exceeds the supported tensor dimension {max}")]
    CapacityExceeded { d: usize, n: usize, max: usize },
    #[error("expected {expected} amplitudes, got {found}")]
    AmplitudeLength { expected: usize, found: usize },
    #[error("state is not in the {0:?} sector (deviation {1:e})")]
    SectorViolation(Sector, f64),
    #[error("wavefunctions live on different grids")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("packet width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("separations must be non-negative and strictly ascending")]
    InvalidSeparations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NParticleSpace {
    single_dim: usize,
    particles: usize,
    total_dim: usize,
}

impl NParticleSpace {
    pub fn new(single_dim: usize, particles: usize) -> Result<Self, FockError> {
        if single_dim == 0 {
            return Err(FockError::ZeroDimension);
        }
        let exceeded = FockError::CapacityExceeded {
            d: single_dim,
            n: particles,
            max: MAX_TOTAL_DIM,
        };
        let total_dim = u32::try_from(particles)
            .ok()
            .and_then(|n| single_dim.checked_pow(n))
            .filter(|&t| t <= MAX_TOTAL_DIM)
            .ok_or(exceeded)?;
        Ok(NParticleSpace {
            single_dim,
            particles,
            total_dim,
        })
    }

    pub fn single_dim(&self) -> usize {
        self.single_dim
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Per-particle single-state labels of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.particles];
        for slot in out.iter_mut().rev() {
            *slot = index % self.single_dim;
            index /= self.single_dim;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &k| acc * self.single_dim + k)
    }

    /// Basis index reached by relabelling particles: slot `k` of the result
    /// takes the label of slot `perm[k]`.
    pub fn permute_index(&self, index: usize, perm: &[usize]) -> usize {
        let digits = self.digits(index);
        self.index(&perm.iter().map(|&p| digits[p]).collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Symmetric,
    Antisymmetric,
    None,
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

/// `+1` for even permutations, `−1` for odd ones, by counting inversions.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Matrix of the particle relabelling `perm` on `space`.
pub fn permutation_matrix(space: &NParticleSpace, perm: &[usize]) -> ComplexMatrix {
    let dim = space.total_dim();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m.set(i, space.permute_index(i, perm), Complex64::new(1.0, 0.0));
    }
    m
}

fn signed_permutation_sum(space: &NParticleSpace, signed: bool) -> ComplexMatrix {
    let dim = space.total_dim();
    let mut acc = vec![0.0f64; dim * dim];
    for perm in permutations(space.particles()) {
        let s = if signed {
            permutation_sign(&perm) as f64
        } else {
            1.0
        };
        for i in 0..dim {
            acc[i * dim + space.permute_index(i, &perm)] += s;
        }
    }
    let norm = factorial(space.particles());
    ComplexMatrix::new(
        dim,
        dim,
        acc.into_iter()
            .map(|x| Complex64::new(x / norm, 0.0))
            .collect(),
    )
    .expect("square")
}

/// σⁿ = (1/n!) Σ_P P, built from the permutation sum.
pub fn symmetrizer_matrix(space: &NParticleSpace) -> ComplexMatrix {
    signed_permutation_sum(space, false)
}

/// τⁿ = (1/n!) Σ_P s^P P, built from the signed permutation sum.
pub fn antisymmetrizer_matrix(space: &NParticleSpace) -> ComplexMatrix {
    signed_permutation_sum(space, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedState {
    space: NParticleSpace,
    amplitudes: Vec<Complex64>,
    sector: Sector,
}

impl SymmetrizedState {
    /// Wraps amplitudes, checking the claimed sector within [`SECTOR_TOL`].
    pub fn new(
        space: NParticleSpace,
        amplitudes: Vec<Complex64>,
        sector: Sector,
    ) -> Result<Self, FockError> {
        if amplitudes.len() != space.total_dim() {
            return Err(FockError::AmplitudeLength {
                expected: space.total_dim(),
                found: amplitudes.len(),
            });
        }
        let state = SymmetrizedState {
            space,
            amplitudes,
            sector,
        };
        let dev = state.sector_deviation(sector);
        if dev > SECTOR_TOL {
            return Err(FockError::SectorViolation(sector, dev));
        }
        Ok(state)
    }

    /// `v_1 ⊗ v_2 ⊗ … ⊗ v_n`, with no symmetry imposed.
    pub fn product(factors: &[Vec<Complex64>]) -> Result<Self, FockError> {
        let d = factors.first().map_or(1, Vec::len);
        if let Some(bad) = factors.iter().find(|f| f.len() != d) {
            return Err(FockError::AmplitudeLength {
                expected: d,
                found: bad.len(),
            });
        }
        let space = NParticleSpace::new(d, factors.len())?;
        let amplitudes = (0..space.total_dim())
            .map(|i| {
                space
                    .digits(i)
                    .iter()
                    .zip(factors)
                    .map(|(&k, f)| f[k])
                    .product()
            })
            .collect();
        Ok(SymmetrizedState {
            space,
            amplitudes,
            sector: Sector::None,
        })
    }

    pub fn space(&self) -> &NParticleSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// The same ray with unit norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<SymmetrizedState> {
        let n = self.norm();
        (n > 0.0).then(|| SymmetrizedState {
            amplitudes: self.amplitudes.iter().map(|z| z / n).collect(),
            ..self.clone()
        })
    }

    /// Relabels particles by `perm`. The sector tag is kept, since σ and τ
    /// outputs map to ± themselves.
    pub fn permuted(&self, perm: &[usize]) -> SymmetrizedState {
        let mut amplitudes = vec![Complex64::zero(); self.amplitudes.len()];
        for (i, a) in amplitudes.iter_mut().enumerate() {
            *a = self.amplitudes[self.space.permute_index(i, perm)];
        }
        SymmetrizedState {
            amplitudes,
            ..self.clone()
        }
    }

    /// Largest deviation from the sector's transposition rule, over all
    /// adjacent transpositions.
    pub fn sector_deviation(&self, sector: Sector) -> f64 {
        let sign = match sector {
            Sector::None => return 0.0,
            Sector::Symmetric => 1.0,
            Sector::Antisymmetric => -1.0,
        };
        let n = self.space.particles();
        let mut worst: f64 = 0.0;
        for k in 0..n.saturating_sub(1) {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(k, k + 1);
            for i in 0..self.amplitudes.len() {
                let swapped = self.amplitudes[self.space.permute_index(i, &perm)];
                worst = worst.max((swapped - self.amplitudes[i] * sign).norm());
            }
        }
        worst
    }
}

/// Groups basis indices by the multiset of their single-particle labels.
fn orbits(space: &NParticleSpace) -> Vec<Vec<usize>> {
    let mut keyed: Vec<(Vec<usize>, usize)> = (0..space.total_dim())
        .map(|i| {
            let mut key = space.digits(i);
            key.sort_unstable();
            (key, i)
        })
        .collect();
    keyed.sort();
    keyed
        .into_iter()
        .chunk_by(|(k, _)| k.clone())
        .into_iter()
        .map(|(_, g)| g.map(|(_, i)| i).collect())
        .collect()
}

/// Applies σⁿ. Every permutation of a multi-index lands on each distinct
/// rearrangement equally often, so σⁿ averages amplitudes over each orbit.
pub fn symmetrize(v: &SymmetrizedState) -> SymmetrizedState {
    let mut amplitudes = vec![Complex64::zero(); v.amplitudes.len()];
    for orbit in orbits(&v.space) {
        let mean = orbit.iter().map(|&i| v.amplitudes[i]).sum::<Complex64>() / orbit.len() as f64;
        for i in orbit {
            amplitudes[i] = mean;
        }
    }
    SymmetrizedState {
        space: v.space,
        amplitudes,
        sector: Sector::Symmetric,
    }
}

/// Applies τⁿ. Multi-indices with a repeated label are annihilated (a
/// transposition fixes them and flips the sign); on the rest, τⁿ is the
/// signed orbit sum divided by n!.
pub fn antisymmetrize(v: &SymmetrizedState) -> SymmetrizedState {
    let mut amplitudes = vec![Complex64::zero(); v.amplitudes.len()];
    let n = v.space.particles();
    let norm = factorial(n);
    for orbit in orbits(&v.space) {
        let digits = v.space.digits(orbit[0]);
        if digits.iter().duplicates().next().is_some() {
            continue;
        }
        let signs: Vec<f64> = orbit
            .iter()
            .map(|&i| permutation_sign(&v.space.digits(i)) as f64)
            .collect();
        let signed_sum: Complex64 = orbit
            .iter()
            .zip(&signs)
            .map(|(&i, &s)| v.amplitudes[i] * s)
            .sum();
        for (&i, &s) in orbit.iter().zip(&signs) {
            amplitudes[i] = signed_sum * s / norm;
        }
    }
    SymmetrizedState {
        space: v.space,
        amplitudes,
        sector: Sector::Antisymmetric,
    }
}

/// Tolerance on pivots when counting projector ranks.
pub const RANK_TOL: f64 = 1e-9;

/// Deviations from the projector laws for σⁿ and τⁿ, with their ranks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectorLaws {
    pub single_dim: usize,
    pub particles: usize,
    /// `max|σ² − σ|`.
    pub sym_idempotency: f64,
    /// `max|τ² − τ|`.
    pub anti_idempotency: f64,
    /// `max|στ|`; only meaningful for two or more particles, where the sectors
    /// are disjoint.
    pub cross_product: Option<f64>,
    pub sym_rank: usize,
    pub anti_rank: usize,
}

/// Builds σⁿ and τⁿ by permutation sums and measures the projector laws.
pub fn projector_laws(space: &NParticleSpace) -> ProjectorLaws {
    let sym = symmetrizer_matrix(space);
    let anti = antisymmetrizer_matrix(space);
    let sq = |m: &ComplexMatrix| {
        m.matmul(m)
            .expect("square")
            .max_abs_diff(m)
            .expect("same shape")
    };
    let cross_product =
        (space.particles() >= 2).then(|| sym.matmul(&anti).expect("same shape").max_abs());
    ProjectorLaws {
        single_dim: space.single_dim(),
        particles: space.particles(),
        sym_idempotency: sq(&sym),
        anti_idempotency: sq(&anti),
        cross_product,
        sym_rank: sym.rank(RANK_TOL),
        anti_rank: anti.rank(RANK_TOL),
    }
}

/// Exact binomial coefficient.
///
/// # Panics
/// When the result does not fit in a `u64`; see [`checked_binomial`].
pub fn binomial(n: u64, k: u64) -> u64 {
    checked_binomial(n, k).expect("binomial coefficient overflows u64")
}

/// Exact binomial coefficient, or `None` when it does not fit in a `u64`.
pub fn checked_binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    // Every partial product C(n, i+1) is exact; u128 holds the intermediate.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
        u64::try_from(acc).ok()?;
    }
    u64::try_from(acc).ok()
}

/// `(dim H^n_σ, dim H^n_τ) = (C(d+n−1, n), C(d, n))`.
pub fn sector_dimensions(d: u64, n: u64) -> (u64, u64) {
    checked_sector_dimensions(d, n).expect("sector dimension overflows u64")
}

pub fn checked_sector_dimensions(d: u64, n: u64) -> Option<(u64, u64)> {
    let sym = if d == 0 {
        u64::from(n == 0)
    } else {
        checked_binomial((d - 1).checked_add(n)?, n)?
    };
    Some((sym, checked_binomial(d, n)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistics {
    Boson,
    Fermion,
}

/// Sector dimensions for `n = 0..=nmax`; `n = 0` is the vacuum, `C`.
pub fn fock_truncation(d: u64, nmax: u64, statistics: Statistics) -> Vec<u64> {
    (0..=nmax)
        .map(|n| {
            let (sym, anti) = sector_dimensions(d, n);
            match statistics {
                Statistics::Boson => sym,
                Statistics::Fermion => anti,
            }
        })
        .collect()
}

/// Uniformly spaced sample points `start + k·spacing`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    start: f64,
    spacing: f64,
    len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, spacing: f64, len: usize) -> Result<Self, FockError> {
        if !(spacing > 0.0 && spacing.is_finite()) || !start.is_finite() {
            return Err(FockError::InvalidGrid(format!(
                "start {start}, spacing {spacing}"
            )));
        }
        if len < 2 {
            return Err(FockError::InvalidGrid("need at least two points".into()));
        }
        Ok(UniformGrid {
            start,
            spacing,
            len,
        })
    }

    /// Grid over `[lo, hi]` with `points_per_unit` samples per unit length.
    pub fn spanning(lo: f64, hi: f64, points_per_unit: f64) -> Result<Self, FockError> {
        if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
            return Err(FockError::InvalidGrid(format!(
                "empty interval [{lo}, {hi}]"
            )));
        }
        let intervals = ((hi - lo) * points_per_unit).ceil().max(1.0) as usize;
        Self::new(lo, (hi - lo) / intervals as f64, intervals + 1)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.spacing
    }

    /// Trapezoidal weights.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![self.spacing; self.len];
        w[0] *= 0.5;
        w[self.len - 1] *= 0.5;
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self, FockError> {
        if values.len() != grid.len() {
            return Err(FockError::AmplitudeLength {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(FockError::InvalidGrid("non-finite sample".into()));
        }
        Ok(GridWavefunction { grid, values })
    }

    /// Gaussian packet whose density `|ψ|²` is normal with mean `center` and
    /// standard deviation `sigma`.
    pub fn gaussian(grid: UniformGrid, center: f64, sigma: f64) -> Result<Self, FockError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(FockError::InvalidWidth(sigma));
        }
        let amp = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
        let values = (0..grid.len())
            .map(|k| {
                let x = grid.point(k) - center;
                Complex64::new(amp * (-x * x / (4.0 * sigma * sigma)).exp(), 0.0)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `∫|ψ|²` by the trapezoidal rule.
    pub fn norm_sqr(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, z)| w * z.norm_sqr())
            .sum()
    }
}

/// `|ψ(x,y)|²` for `ψ = (ψ_a(x)ψ_b(y) − ψ_b(x)ψ_a(y))/√2`, split into its
/// terms. All grids are `m×m`, row index `x`, column index `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFermionDensity {
    pub size: usize,
    /// `|ψ_a(x)ψ_b(y)|²`.
    pub direct_ab: Vec<f64>,
    /// `|ψ_b(x)ψ_a(y)|²`.
    pub direct_ba: Vec<f64>,
    /// `2ℜ(ψ_a(x)ψ_b(y)ψ_b*(x)ψ_a*(y))`.
    pub interference: Vec<f64>,
    /// `½(direct_ab + direct_ba − interference)`.
    pub density: Vec<f64>,
}

impl TwoFermionDensity {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.density[x * self.size + y]
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.size)
            .map(|k| self.at(k, k).abs())
            .fold(0.0, f64::max)
    }
}

fn same_grid(a: &GridWavefunction, b: &GridWavefunction) -> Result<(), FockError> {
    if a.grid != b.grid {
        return Err(FockError::GridMismatch);
    }
    Ok(())
}

pub fn two_fermion_density(
    psi_a: &GridWavefunction,
    psi_b: &GridWavefunction,
) -> Result<TwoFermionDensity, FockError> {
    same_grid(psi_a, psi_b)?;
    let m = psi_a.grid.len();
    let (a, b) = (&psi_a.values, &psi_b.values);
    let mut out = TwoFermionDensity {
        size: m,
        direct_ab: Vec::with_capacity(m * m),
        direct_ba: Vec::with_capacity(m * m),
        interference: Vec::with_capacity(m * m),
        density: Vec::with_capacity(m * m),
    };
    for x in 0..m {
        for y in 0..m {
            let d1 = (a[x] * b[y]).norm_sqr();
            let d2 = (b[x] * a[y]).norm_sqr();
            let cross = 2.0 * (a[x] * b[y] * b[x].conj() * a[y].conj()).re;
            out.direct_ab.push(d1);
            out.direct_ba.push(d2);
            out.interference.push(cross);
            out.density.push(0.5 * (d1 + d2 - cross));
        }
    }
    Ok(out)
}

/// `∫∫ ½|interference| / ∫∫ ½(direct_ab + direct_ba)` by 2-D trapezoid.
/// It is 1 for coincident packets and tends to 0 as their supports separate.
pub fn interference_fraction(
    psi_a: &GridWavefunction,
    psi_b: &GridWavefunction,
) -> Result<f64, FockError> {
    same_grid(psi_a, psi_b)?;
    let w = psi_a.grid.weights();
    let (a, b) = (&psi_a.values, &psi_b.values);
    // The interference term factorizes through f(x) = ψ_a(x)ψ_b*(x); the
    // direct terms separate, and so do their trapezoid sums.
    let f: Vec<Complex64> = a.iter().zip(b).map(|(p, q)| p * q.conj()).collect();
    let mut cross = 0.0;
    for x in 0..w.len() {
        let row: f64 = f
            .iter()
            .zip(&w)
            .map(|(fy, wy)| wy * (f[x] * fy.conj()).re.abs())
            .sum();
        cross += w[x] * row;
    }
    let direct = psi_a.norm_sqr() * psi_b.norm_sqr();
    Ok(cross / direct)
}

/// Points per `sigma` on the quadrature grid.
pub const POINTS_PER_SIGMA: f64 = 64.0;
/// Grid margin beyond each packet centre, in units of `sigma`.
pub const GRID_MARGIN_SIGMAS: f64 = 8.0;

/// Interference fraction of two unit-norm Gaussian packets of width `sigma`
/// centred at `±separation/2`.
pub fn packet_interference(sigma: f64, separation: f64) -> Result<f64, FockError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(FockError::InvalidWidth(sigma));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(FockError::InvalidSeparations);
    }
    let half = separation / 2.0 + GRID_MARGIN_SIGMAS * sigma;
    let grid = UniformGrid::spanning(-half, half, POINTS_PER_SIGMA / sigma)?;
    let a = GridWavefunction::gaussian(grid, -separation / 2.0, sigma)?;
    let b = GridWavefunction::gaussian(grid, separation / 2.0, sigma)?;
    interference_fraction(&a, &b)
}

pub fn overlap_decay_curve(sigma: f64, separations: &[f64]) -> Result<Vec<(f64, f64)>, FockError> {
    if separations.iter().any(|s| s.is_nan() || *s < 0.0)
        || separations.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(FockError::InvalidSeparations);
    }
    separations
        .iter()
        .map(|&s| Ok((s, packet_interference(sigma, s)?)))
        .collect()
}

/// `separation,fraction` CSV with 17 significant digits.
pub fn curve_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("separation,fraction\n");
    for (s, f) in curve {
        out.push_str(&format!("{s:.16e},{f:.16e}\n"));
    }
    out
}
