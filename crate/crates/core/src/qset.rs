//! A finite fragment of quasi-set theory.
//!
//! A [`QSet`] is an indistinguishability class: it knows its kind (a class
//! label) and how many elements it has (the quasi-cardinal), but never which
//! element is which. Picking "one element" is modelled by a
//! [`StrongSingleton`], and valuations are built from [`QPair`]s and
//! [`QFunction`]s.
//!
//! Nothing in this module carries per-element identity. Two singletons of the
//! same class are indistinguishable (`≡`) and there is no way to ask whether
//! they are equal (`=`): `StrongSingleton` deliberately implements neither
//! `PartialEq` nor `Hash`, and its `Debug` output only shows the class.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSetError {
    #[error("cannot extract a strong singleton from an empty class `{0}`")]
    EmptyClass(ClassLabel),
    #[error("a quasi-function needs at least one outcome")]
    InvalidOutcomeCount,
    #[error("outcome {value} is out of range for {outcomes} outcomes")]
    OutcomeOutOfRange { value: usize, outcomes: usize },
    #[error("singleton of class `{found}` is not a member of class `{expected}`")]
    ForeignSingleton {
        expected: ClassLabel,
        found: ClassLabel,
    },
}

/// Label of an indistinguishability kind. Labels are global: two classes
/// with the same label are the same kind.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel(Arc<str>);

impl ClassLabel {
    pub fn new(label: impl AsRef<str>) -> Self {
        ClassLabel(Arc::from(label.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An indistinguishability class with a quasi-cardinal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSet {
    label: ClassLabel,
    qcard: usize,
}

impl QSet {
    pub fn label(&self) -> &ClassLabel {
        &self.label
    }

    /// The quasi-cardinal: how many elements, without saying which.
    pub fn qcard(&self) -> usize {
        self.qcard
    }

    pub fn is_empty(&self) -> bool {
        self.qcard == 0
    }

    /// Membership of a singleton's element in this class. Since elements have
    /// no identity, membership only depends on the kind.
    pub fn contains(&self, s: &StrongSingleton) -> bool {
        s.parent == self.label
    }
}

/// Builds a class of the given kind with `qcard` elements.
pub fn make_class(label: impl AsRef<str>, qcard: usize) -> QSet {
    QSet {
        label: ClassLabel::new(label),
        qcard,
    }
}

/// A sub-quasi-set of quasi-cardinal 1 whose element belongs to `parent`.
#[derive(Clone)]
pub struct StrongSingleton {
    parent: ClassLabel,
}

impl StrongSingleton {
    pub fn parent(&self) -> &ClassLabel {
        &self.parent
    }

    pub fn qcard(&self) -> usize {
        1
    }
}

impl fmt::Debug for StrongSingleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}]]", self.parent)
    }
}

/// `a ≡ b`: both singletons were taken from the same kind. Says nothing about
/// `a = b`, which is not expressible.
pub fn indistinguishable(a: &StrongSingleton, b: &StrongSingleton) -> bool {
    a.parent == b.parent
}

/// Picks one (unidentified) element out of `qs`, returning it as a strong
/// singleton together with the remaining class.
pub fn extract_strong_singleton(qs: &QSet) -> Result<(StrongSingleton, QSet), QSetError> {
    if qs.qcard == 0 {
        return Err(QSetError::EmptyClass(qs.label.clone()));
    }
    let singleton = StrongSingleton {
        parent: qs.label.clone(),
    };
    let rest = QSet {
        label: qs.label.clone(),
        qcard: qs.qcard - 1,
    };
    Ok((singleton, rest))
}

/// Extracts every element of `qs` as a singleton. The order of the returned
/// vector carries no information about the elements.
pub fn exhaust(qs: &QSet) -> Vec<StrongSingleton> {
    let mut out = Vec::with_capacity(qs.qcard);
    let mut rest = qs.clone();
    while let Ok((s, r)) = extract_strong_singleton(&rest) {
        out.push(s);
        rest = r;
    }
    out
}

/// The quasi-pair `⟨[[X]]; j⟩`: value `j` assigned to one context.
#[derive(Debug, Clone)]
pub struct QPair {
    singleton: StrongSingleton,
    value: usize,
    outcomes: usize,
}

impl QPair {
    pub fn singleton(&self) -> &StrongSingleton {
        &self.singleton
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// A quasi-pair has exactly two components.
    pub fn len(&self) -> usize {
        2
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Assigns outcome `j` (out of `outcomes`) to a singleton. Assignments to
/// different singletons of one class are independent of each other.
pub fn assign(s: &StrongSingleton, j: usize, outcomes: usize) -> Result<QPair, QSetError> {
    if j >= outcomes {
        return Err(QSetError::OutcomeOutOfRange { value: j, outcomes });
    }
    Ok(QPair {
        singleton: s.clone(),
        value: j,
        outcomes,
    })
}

/// A quasi-function from a class into `{0, …, d−1}`. Because the elements of
/// the domain cannot be told apart, the function is constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QFunction {
    domain: QSet,
    codomain_size: usize,
    constant_value: usize,
}

impl QFunction {
    pub fn domain(&self) -> &QSet {
        &self.domain
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain_size
    }

    pub fn constant_value(&self) -> usize {
        self.constant_value
    }

    pub fn eval(&self, s: &StrongSingleton) -> Result<usize, QSetError> {
        if !self.domain.contains(s) {
            return Err(QSetError::ForeignSingleton {
                expected: self.domain.label.clone(),
                found: s.parent.clone(),
            });
        }
        Ok(self.constant_value)
    }

    /// The function seen as the quasi-pair `⟨[A], j⟩`.
    pub fn as_pair(&self) -> (&ClassLabel, usize) {
        (&self.domain.label, self.constant_value)
    }
}

/// All quasi-functions `qs → {0, …, d−1}`, ascending by value.
pub fn enumerate_qfunctions(qs: &QSet, d: usize) -> Result<Vec<QFunction>, QSetError> {
    if d == 0 {
        return Err(QSetError::InvalidOutcomeCount);
    }
    Ok((0..d)
        .map(|v| QFunction {
            domain: qs.clone(),
            codomain_size: d,
            constant_value: v,
        })
        .collect())
}

/// Number of ordinary functions from a `qcard`-element set to `d` outcomes,
/// `d^qcard`.
pub fn classical_function_count(qcard: usize, d: usize) -> Result<BigUint, QSetError> {
    if d == 0 {
        return Err(QSetError::InvalidOutcomeCount);
    }
    let exp = u32::try_from(qcard).expect("quasi-cardinal exceeds u32 exponent range");
    Ok(BigUint::from(d).pow(exp))
}
