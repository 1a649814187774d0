//! Kochen-Specker non-colourability.
//!
//! A `ks_coloring` scenario asks for a {0, 1} value per observable such that
//! every context has exactly one observable set to 1. [`parity_check`] gives
//! the counting argument (every observable appears an even number of times
//! but there is an odd number of contexts), [`exhaustive_coloring`] settles
//! the question by backtracking, and [`validate_realization`] checks that a
//! set of vectors really turns each context into a resolution of the identity.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{self, projector_from_vector, ComplexMatrix};
use crate::scenario::{Scenario, ScenarioKind};

/// Largest scenario [`exhaustive_coloring`] accepts.
pub const MAX_SEARCH_OBSERVABLES: usize = 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KsError {
    #[error("expected a ks_coloring scenario, got {0}")]
    WrongScenarioKind(ScenarioKind),
    #[error("{count} observables exceed the search bound of {max}")]
    TooLarge { count: usize, max: usize },
    #[error("no vector given for observable `{0}`")]
    MissingVector(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector for `{0}` is zero")]
    ZeroVector(String),
    #[error("vector file line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn require_coloring(s: &Scenario) -> Result<(), KsError> {
    match s.kind() {
        ScenarioKind::KsColoring => Ok(()),
        other => Err(KsError::WrongScenarioKind(other)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityCertificate {
    pub context_count: usize,
    pub per_observable_occurrences: BTreeMap<String, usize>,
    pub all_even: bool,
    pub contexts_odd: bool,
    pub contradiction_established: bool,
}

/// Summing "exactly one true per context" over all contexts gives the context
/// count; summing per observable gives an even number when every observable
/// occurs evenly often. Odd context count then rules out any colouring.
pub fn parity_check(s: &Scenario) -> Result<ParityCertificate, KsError> {
    require_coloring(s)?;
    let per_observable_occurrences = s.occurrence_counts();
    let all_even = per_observable_occurrences.values().all(|c| c % 2 == 0);
    let context_count = s.contexts().len();
    let contexts_odd = context_count % 2 == 1;
    Ok(ParityCertificate {
        context_count,
        per_observable_occurrences,
        all_even,
        contexts_odd,
        contradiction_established: all_even && contexts_odd,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringResult {
    pub satisfiable: bool,
    /// Values in observable declaration order.
    pub witness: Option<Vec<(String, u8)>>,
    /// Number of single-variable value trials made by the search.
    pub assignments_examined: u64,
}

struct Search {
    /// Context indices per observable.
    incidence: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    ones: Vec<usize>,
    assigned: Vec<usize>,
    values: Vec<u8>,
    examined: u64,
}

impl Search {
    fn fits(&self, var: usize, value: u8) -> bool {
        self.incidence[var].iter().all(|&c| {
            let ones = self.ones[c] + value as usize;
            let assigned = self.assigned[c] + 1;
            ones <= 1 && (assigned < self.sizes[c] || ones == 1)
        })
    }

    fn set(&mut self, var: usize, value: u8) {
        for &c in &self.incidence[var] {
            self.ones[c] += value as usize;
            self.assigned[c] += 1;
        }
        self.values[var] = value;
    }

    fn unset(&mut self, var: usize) {
        let value = self.values[var] as usize;
        for &c in &self.incidence[var] {
            self.ones[c] -= value;
            self.assigned[c] -= 1;
        }
    }

    fn run(&mut self, var: usize) -> bool {
        if var == self.values.len() {
            return true;
        }
        for value in [1u8, 0] {
            self.examined += 1;
            if !self.fits(var, value) {
                continue;
            }
            self.set(var, value);
            if self.run(var + 1) {
                return true;
            }
            self.unset(var);
        }
        false
    }
}

/// Backtracking search for a colouring with exactly one 1 per context.
/// Observables are branched in declaration order, trying 1 before 0, so the
/// result (including the trial count) is deterministic.
pub fn exhaustive_coloring(s: &Scenario) -> Result<ColoringResult, KsError> {
    require_coloring(s)?;
    let n = s.observables().len();
    if n > MAX_SEARCH_OBSERVABLES {
        return Err(KsError::TooLarge {
            count: n,
            max: MAX_SEARCH_OBSERVABLES,
        });
    }
    let mut incidence = vec![Vec::new(); n];
    for (c, ctx) in s.contexts().iter().enumerate() {
        for m in &ctx.members {
            incidence[s.index_of(m).expect("validated scenario")].push(c);
        }
    }
    let k = s.contexts().len();
    let mut search = Search {
        incidence,
        sizes: s.contexts().iter().map(|c| c.len()).collect(),
        ones: vec![0; k],
        assigned: vec![0; k],
        values: vec![0; n],
        examined: 0,
    };
    let satisfiable = search.run(0);
    let witness = satisfiable.then(|| {
        s.observables()
            .iter()
            .zip(&search.values)
            .map(|(o, &v)| (o.id.clone(), v))
            .collect()
    });
    Ok(ColoringResult {
        satisfiable,
        witness,
        assignments_examined: search.examined,
    })
}

/// Vectors in `C^dimension` attached to observable ids.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorRealization {
    dimension: usize,
    vectors: BTreeMap<String, Vec<Complex64>>,
}

impl VectorRealization {
    pub fn new(vectors: BTreeMap<String, Vec<Complex64>>) -> Result<Self, KsError> {
        let mut dimension = None;
        for (id, v) in &vectors {
            match dimension {
                None => dimension = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(KsError::DimensionMismatch(format!(
                        "vector `{id}` has {} components, expected {d}",
                        v.len()
                    )))
                }
                _ => {}
            }
            if v.iter().all(|z| z.norm_sqr() == 0.0) {
                return Err(KsError::ZeroVector(id.clone()));
            }
        }
        Ok(VectorRealization {
            dimension: dimension.unwrap_or(0),
            vectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vector(&self, id: &str) -> Option<&[Complex64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Parses `vec <id> <re,im> <re,im> ...` lines; `#` starts a comment.
pub fn parse_realization(text: &str) -> Result<VectorRealization, KsError> {
    let mut vectors = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| KsError::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            [] => continue,
            ["vec", id, comps @ ..] if !comps.is_empty() => {
                let v = comps
                    .iter()
                    .map(|t| {
                        hilbert::io::parse_complex(t)
                            .ok_or_else(|| err(format!("invalid component `{t}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if vectors.insert(id.to_string(), v).is_some() {
                    return Err(err(format!("duplicate vector `{id}`")));
                }
            }
            _ => return Err(err("expected `vec <id> <re,im> ...`".into())),
        }
    }
    VectorRealization::new(vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextCheck {
    pub members: Vec<String>,
    /// Largest `|⟨u,v⟩| / (‖u‖‖v‖)` over member pairs.
    pub orthogonality: f64,
    /// Largest entrywise deviation of `Σ P_i` from the identity.
    pub identity_deviation: f64,
    pub worst_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationReport {
    pub valid: bool,
    pub tolerance: f64,
    pub contexts: Vec<ContextCheck>,
}

fn normalized_overlap(u: &[Complex64], v: &[Complex64]) -> f64 {
    let dot: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    let nu = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (nu * nv)
}

/// Checks every context: members pairwise orthogonal and their rank-1
/// projectors summing to the identity, both within `tol`.
pub fn validate_realization(
    s: &Scenario,
    r: &VectorRealization,
    tol: f64,
) -> Result<RealizationReport, KsError> {
    for o in s.observables() {
        if r.vector(&o.id).is_none() {
            return Err(KsError::MissingVector(o.id.clone()));
        }
    }
    let dim = r.dimension();
    let identity = ComplexMatrix::identity(dim);
    let mut contexts = Vec::with_capacity(s.contexts().len());
    for ctx in s.contexts() {
        let vs: Vec<&[Complex64]> = ctx
            .members
            .iter()
            .map(|m| r.vector(m).expect("checked above"))
            .collect();
        let mut orthogonality: f64 = 0.0;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                orthogonality = orthogonality.max(normalized_overlap(vs[i], vs[j]));
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (m, v) in ctx.members.iter().zip(&vs) {
            let p = projector_from_vector(v).map_err(|_| KsError::ZeroVector(m.clone()))?;
            sum = sum
                .add(p.matrix())
                .map_err(|e| KsError::DimensionMismatch(e.to_string()))?;
        }
        let identity_deviation = sum
            .max_abs_diff(&identity)
            .map_err(|e| KsError::DimensionMismatch(e.to_string()))?;
        let worst_deviation = orthogonality.max(identity_deviation);
        contexts.push(ContextCheck {
            members: ctx.members.clone(),
            orthogonality,
            identity_deviation,
            worst_deviation,
            passed: worst_deviation <= tol,
        });
    }
    Ok(RealizationReport {
        valid: contexts.iter().all(|c| c.passed),
        tolerance: tol,
        contexts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, Context, Observable};
    use proptest::prelude::*;

    fn ks(n: usize, contexts: &[&[usize]]) -> Scenario {
        let obs = (0..n)
            .map(|i| Observable {
                id: format!("P{}", i + 1),
                outcome_count: 2,
            })
            .collect();
        let ctxs = contexts
            .iter()
            .map(|c| Context::new(c.iter().map(|i| format!("P{}", i + 1))))
            .collect();
        Scenario::new(ScenarioKind::KsColoring, obs, ctxs).unwrap()
    }

    /// Independent oracle: enumerate all 2^n assignments.
    fn brute_force_colorings(s: &Scenario) -> Vec<Vec<u8>> {
        let n = s.observables().len();
        let idx: Vec<Vec<usize>> = s
            .contexts()
            .iter()
            .map(|c| c.members.iter().map(|m| s.index_of(m).unwrap()).collect())
            .collect();
        (0u64..1 << n)
            .map(|bits| (0..n).map(|i| ((bits >> i) & 1) as u8).collect::<Vec<u8>>())
            .filter(|vals| {
                idx.iter()
                    .all(|c| c.iter().map(|&i| vals[i] as usize).sum::<usize>() == 1)
            })
            .collect()
    }

    #[test]
    fn two_even_contexts_do_not_certify() {
        let s = ks(2, &[&[0, 1], &[0, 1]]);
        let cert = parity_check(&s).unwrap();
        assert!(cert.all_even);
        assert!(!cert.contexts_odd);
        assert!(!cert.contradiction_established);
        assert!(exhaustive_coloring(&s).unwrap().satisfiable);
    }

    #[test]
    fn odd_occurrence_breaks_all_even() {
        let s = ks(3, &[&[0, 1], &[1, 2], &[0, 1, 2]]);
        let cert = parity_check(&s).unwrap();
        assert!(!cert.all_even);
        assert!(!cert.contradiction_established);
    }

    #[test]
    fn single_context_has_four_colorings_and_reports_the_first() {
        let s = ks(4, &[&[0, 1, 2, 3]]);
        assert_eq!(brute_force_colorings(&s).len(), 4);
        let r = exhaustive_coloring(&s).unwrap();
        assert!(r.satisfiable);
        let w = r.witness.unwrap();
        assert_eq!(
            w,
            vec![
                ("P1".into(), 1),
                ("P2".into(), 0),
                ("P3".into(), 0),
                ("P4".into(), 0)
            ]
        );
    }

    #[test]
    fn triangle_of_pairs_is_uncolorable() {
        // X, Y, Z with contexts {X,Y},{X,Z},{Y,Z}: checked against all 8 assignments.
        let s = parse_scenario(
            "scenario ks_coloring\nobs X 2\nobs Y 2\nobs Z 2\nctx X Y\nctx X Z\nctx Y Z\n",
        )
        .unwrap();
        assert!(brute_force_colorings(&s).is_empty());
        assert!(parity_check(&s).unwrap().contradiction_established);
        let r = exhaustive_coloring(&s).unwrap();
        assert!(!r.satisfiable);
        assert!(r.witness.is_none());
        // A full binary tree over three variables has 2 + 4 + 8 trial nodes.
        assert!(r.assignments_examined <= 14);
    }

    #[test]
    fn wrong_kind_and_size_bounds() {
        let s = ks(2, &[&[0, 1]]).with_kind(ScenarioKind::Correlation);
        assert_eq!(
            parity_check(&s).unwrap_err(),
            KsError::WrongScenarioKind(ScenarioKind::Correlation)
        );
        assert!(matches!(
            exhaustive_coloring(&s),
            Err(KsError::WrongScenarioKind(_))
        ));
        let big = ks(31, &[&[0, 30]]);
        assert_eq!(
            exhaustive_coloring(&big).unwrap_err(),
            KsError::TooLarge { count: 31, max: 30 }
        );
    }

    #[test]
    fn search_is_deterministic() {
        let s = ks(6, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 0], &[1, 3, 5]]);
        let a = exhaustive_coloring(&s).unwrap();
        let b = exhaustive_coloring(&s).unwrap();
        assert_eq!(a, b);
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_basis_realization_is_exact() {
        let s = ks(4, &[&[0, 1, 2, 3]]);
        let vectors = (0..4)
            .map(|i| {
                let mut v = vec![c(0.0); 4];
                v[i] = c(1.0);
                (format!("P{}", i + 1), v)
            })
            .collect();
        let r = VectorRealization::new(vectors).unwrap();
        let rep = validate_realization(&s, &r, 0.0).unwrap();
        assert!(rep.valid);
        assert_eq!(rep.contexts[0].worst_deviation, 0.0);
    }

    #[test]
    fn repeated_vector_fails_validation() {
        let s = ks(4, &[&[0, 1, 2, 3]]);
        let text = "vec P1 1,0 0,0 0,0 0,0\nvec P2 1,0 0,0 0,0 0,0\nvec P3 0,0 0,0 1,0 0,0\nvec P4 0,0 0,0 0,0 1,0\n";
        let r = parse_realization(text).unwrap();
        let rep = validate_realization(&s, &r, 1e-12).unwrap();
        assert!(!rep.valid);
        // The doubled projector leaves eigenvalue 2 on e1: deviation exactly 1.
        assert_eq!(rep.contexts[0].identity_deviation, 1.0);
        assert_eq!(rep.contexts[0].orthogonality, 1.0);
    }

    #[test]
    fn realization_errors() {
        let s = ks(2, &[&[0, 1]]);
        let only_one = parse_realization("vec P1 1,0 0,0\n").unwrap();
        assert_eq!(
            validate_realization(&s, &only_one, 1e-12).unwrap_err(),
            KsError::MissingVector("P2".into())
        );
        assert!(matches!(
            parse_realization("vec P1 1,0 0,0\nvec P2 1,0\n"),
            Err(KsError::DimensionMismatch(_))
        ));
        assert!(matches!(
            parse_realization("vec P1 0,0 0,0\n"),
            Err(KsError::ZeroVector(_))
        ));
        assert!(matches!(
            parse_realization("vec P1 1;0\n"),
            Err(KsError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_realization("\nvector P1 1,0\n"),
            Err(KsError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_realization("vec P1 1,0\nvec P1 1,0\n"),
            Err(KsError::Parse { .. })
        ));
    }

    /// Scenarios where every observable sits in exactly two distinct contexts
    /// and the number of contexts is odd.
    fn even_odd_scenario() -> impl Strategy<Value = Scenario> {
        (1usize..=4, 2usize..=20)
            .prop_flat_map(|(half, n)| {
                let k = 2 * half + 1;
                prop::collection::vec((0..k, 1..k), n).prop_map(move |pairs| (k, pairs))
            })
            .prop_filter_map("every context must be nonempty", |(k, pairs)| {
                let mut ctxs = vec![Vec::new(); k];
                for (i, &(a, off)) in pairs.iter().enumerate() {
                    ctxs[a].push(i);
                    ctxs[(a + off) % k].push(i);
                }
                if ctxs.iter().any(Vec::is_empty) {
                    return None;
                }
                let refs: Vec<&[usize]> = ctxs.iter().map(Vec::as_slice).collect();
                Some(ks(pairs.len(), &refs))
            })
    }

    proptest! {
        #[test]
        fn parity_is_sound(s in even_odd_scenario()) {
            prop_assert!(parity_check(&s).unwrap().contradiction_established);
            let r = exhaustive_coloring(&s).unwrap();
            prop_assert!(!r.satisfiable);
            prop_assert_eq!(r, exhaustive_coloring(&s).unwrap());
        }

        #[test]
        fn search_agrees_with_brute_force(
            n in 1usize..=10,
            raw in prop::collection::vec(prop::collection::vec(0usize..10, 1..5), 1..6),
        ) {
            let ctxs: Vec<Vec<usize>> = raw
                .into_iter()
                .map(|c| {
                    let mut c: Vec<usize> = c.into_iter().map(|i| i % n).collect();
                    c.sort();
                    c.dedup();
                    c
                })
                .collect();
            let refs: Vec<&[usize]> = ctxs.iter().map(Vec::as_slice).collect();
            let s = ks(n, &refs);
            let all = brute_force_colorings(&s);
            let r = exhaustive_coloring(&s).unwrap();
            prop_assert_eq!(r.satisfiable, !all.is_empty());
            if let Some(w) = r.witness {
                let vals: Vec<u8> = w.iter().map(|(_, v)| *v).collect();
                prop_assert!(all.contains(&vals));
                // 1 is tried first, so the witness is the largest colouring
                // reading values in declaration order.
                prop_assert_eq!(Some(&vals), all.iter().max_by(|a, b| a.cmp(b)));
            }
        }
    }
}
