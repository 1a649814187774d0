//! The correlation inequality `−1 ≤ XY + XZ + YZ ≤ 3` for three ±1 variables.
//!
//! Under the classical theory of identity `X`, `Y`, `Z` keep their value across
//! the contexts `{X,Y}`, `{X,Z}`, `{Y,Z}`, so the product of the three
//! pairwise products is always `+1`. If instead each context draws its own
//! indistinguishable copy (`X′Y′`, `X″Z′`, `Y″Z″`), the three products are
//! independent and the rows with product `−1` become reachable.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qset::{assign, exhaust, make_class, QPair};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InequalityError {
    #[error("expectation {name} = {value} is outside [-1, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    /// Ordered first, so rows read `+1` before `−1`.
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Outcome index 0 is `+1`, index 1 is `−1`.
    pub fn from_outcome(index: usize) -> Option<Sign> {
        match index {
            0 => Some(Sign::Plus),
            1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn outcome(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("{other} is not a sign")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "1",
            Sign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignTriple {
    pub x: Sign,
    pub y: Sign,
    pub z: Sign,
}

impl SignTriple {
    pub fn products(self) -> ProductTriple {
        ProductTriple {
            xy: self.x * self.y,
            xz: self.x * self.z,
            yz: self.y * self.z,
            origin: Origin::Classical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Classical,
    Quasi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductTriple {
    pub xy: Sign,
    pub xz: Sign,
    pub yz: Sign,
    pub origin: Origin,
}

impl ProductTriple {
    pub fn quasi(xy: Sign, xz: Sign, yz: Sign) -> Self {
        ProductTriple {
            xy,
            xz,
            yz,
            origin: Origin::Quasi,
        }
    }

    /// `XY + XZ + YZ`.
    pub fn sum(self) -> i32 {
        [self.xy, self.xz, self.yz]
            .iter()
            .map(|s| s.value() as i32)
            .sum()
    }

    /// `XY · XZ · YZ`; always `+1` for a classical valuation.
    pub fn triple_product(self) -> Sign {
        self.xy * self.xz * self.yz
    }

    pub fn signs(self) -> (Sign, Sign, Sign) {
        (self.xy, self.xz, self.yz)
    }
}

fn sign_triples() -> impl Iterator<Item = (Sign, Sign, Sign)> {
    Sign::BOTH.into_iter().flat_map(|a| {
        Sign::BOTH
            .into_iter()
            .flat_map(move |b| Sign::BOTH.into_iter().map(move |c| (a, b, c)))
    })
}

/// All eight context-independent valuations with their products.
pub fn classical_table() -> Vec<(SignTriple, ProductTriple)> {
    sign_triples()
        .map(|(x, y, z)| {
            let t = SignTriple { x, y, z };
            (t, t.products())
        })
        .collect()
}

fn bounds(sums: impl Iterator<Item = i32>) -> (i32, i32) {
    sums.fold((i32::MAX, i32::MIN), |(lo, hi), s| (lo.min(s), hi.max(s)))
}

pub fn classical_bounds() -> (i32, i32) {
    bounds(classical_table().into_iter().map(|(_, p)| p.sum()))
}

/// Values of the pairwise products when every context measures its own
/// indistinguishable copy of each variable.
///
/// The classes `[X]`, `[Y]`, `[Z]` each hold two copies; the copies are
/// picked as strong singletons and valued independently through quasi-pairs.
/// The result is the set of reachable `(X′Y′, X″Z′, Y″Z″)` rows, sorted.
pub fn quasi_table() -> Vec<ProductTriple> {
    let [x1, x2]: [_; 2] = exhaust(&make_class("X", 2)).try_into().expect("two copies");
    let [y1, y2]: [_; 2] = exhaust(&make_class("Y", 2)).try_into().expect("two copies");
    let [z1, z2]: [_; 2] = exhaust(&make_class("Z", 2)).try_into().expect("two copies");
    let copies = [&x1, &x2, &y1, &y2, &z1, &z2];

    let sign = |p: &QPair| Sign::from_outcome(p.value()).expect("dichotomic");
    let mut rows = Vec::new();
    for bits in 0u32..1 << copies.len() {
        let pairs: Vec<QPair> = copies
            .iter()
            .enumerate()
            .map(|(k, s)| assign(s, ((bits >> k) & 1) as usize, 2).expect("outcome in range"))
            .collect();
        let [vx1, vx2, vy1, vy2, vz1, vz2] = [0, 1, 2, 3, 4, 5].map(|k| sign(&pairs[k]));
        rows.push(ProductTriple::quasi(vx1 * vy1, vx2 * vz1, vy2 * vz2));
    }
    rows.sort();
    rows.dedup();
    rows
}

/// Quasi rows no classical valuation produces: triple product `−1`.
pub fn forbidden_rows() -> Vec<ProductTriple> {
    quasi_table()
        .into_iter()
        .filter(|r| r.triple_product() == Sign::Minus)
        .collect()
}

pub fn quasi_bounds() -> (i32, i32) {
    bounds(quasi_table().into_iter().map(ProductTriple::sum))
}

/// Expectation values `⟨XY⟩, ⟨XZ⟩, ⟨YZ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Behavior {
    exy: f64,
    exz: f64,
    eyz: f64,
}

impl Behavior {
    pub fn new(exy: f64, exz: f64, eyz: f64) -> Result<Self, InequalityError> {
        for (name, value) in [("<XY>", exy), ("<XZ>", exz), ("<YZ>", eyz)] {
            if !(-1.0..=1.0).contains(&value) {
                return Err(InequalityError::OutOfRange { name, value });
            }
        }
        Ok(Behavior { exy, exz, eyz })
    }

    pub fn components(&self) -> [f64; 3] {
        [self.exy, self.exz, self.eyz]
    }

    pub fn sum(&self) -> f64 {
        self.exy + self.exz + self.eyz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realizability {
    pub realizable: bool,
    /// Vertex weights, aligned with [`classical_vertices`]. Present only when
    /// the behavior is realizable.
    pub weights: Option<[f64; 4]>,
    /// The barycentric solution whether or not it is a valid mixture.
    pub barycentric: [f64; 4],
}

/// The distinct classical product triples, in table order.
pub fn classical_vertices() -> Vec<ProductTriple> {
    let mut v: Vec<ProductTriple> = classical_table().into_iter().map(|(_, p)| p).collect();
    v.sort();
    v.dedup();
    v
}

/// Solves `A w = b` for a square system by Gaussian elimination with partial
/// pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for (off, row) in rest.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[col + 1 + off] -= f * b[col];
        }
    }
    let mut w = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = (row + 1..4).map(|k| a[row][k] * w[k]).sum();
        w[row] = (b[row] - tail) / a[row][row];
    }
    w
}

/// Whether `b` is a mixture of classical valuations: solve for the weights on
/// the four classical vertices (three expectation equations plus
/// normalization) and accept when every weight is at least `−tol`.
pub fn is_classically_realizable(b: &Behavior, tol: f64) -> Result<Realizability, InequalityError> {
    if tol < 0.0 || tol.is_nan() {
        return Err(InequalityError::NegativeTolerance(tol));
    }
    let vertices = classical_vertices();
    debug_assert_eq!(vertices.len(), 4);
    let mut a = [[0.0; 4]; 4];
    for (j, v) in vertices.iter().enumerate() {
        a[0][j] = v.xy.value() as f64;
        a[1][j] = v.xz.value() as f64;
        a[2][j] = v.yz.value() as f64;
        a[3][j] = 1.0;
    }
    let w = solve4(a, [b.exy, b.exz, b.eyz, 1.0]);
    let realizable = w.iter().all(|&x| x >= -tol);
    Ok(Realizability {
        realizable,
        weights: realizable.then_some(w),
        barycentric: w,
    })
}
