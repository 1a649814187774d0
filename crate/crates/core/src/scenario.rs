//! Measurement scenarios: observables, contexts, and the line-oriented
//! `.scn` text format.
//!
//! ```text
//! scenario ks_coloring
//! obs P1 2
//! obs P2 2
//! ctx P1 P2
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::qset::{make_class, QSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("unknown observable `{0}`")]
    UnknownObservable(String),
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        column,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    /// Dichotomic projectors with values in {0, 1}; exactly one true per context.
    KsColoring,
    /// Dichotomic random variables with values in {−1, +1}.
    Correlation,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::KsColoring => "ks_coloring",
            ScenarioKind::Correlation => "correlation",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ks_coloring" => Ok(ScenarioKind::KsColoring),
            "correlation" => Ok(ScenarioKind::Correlation),
            other => Err(format!("unknown scenario kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observable {
    pub id: String,
    pub outcome_count: usize,
}

/// A jointly measurable group of observables, kept in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Context {
    pub members: Vec<String>,
}

impl Context {
    pub fn new<S: Into<String>>(members: impl IntoIterator<Item = S>) -> Self {
        Context {
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.iter().any(|m| m == id)
    }

    /// Equality up to member order.
    pub fn same_members(&self, other: &Context) -> bool {
        let mut a: Vec<_> = self.members.iter().collect();
        let mut b: Vec<_> = other.members.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.members.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    kind: ScenarioKind,
    observables: Vec<Observable>,
    contexts: Vec<Context>,
}

impl Scenario {
    /// Builds a scenario and checks every structural invariant.
    pub fn new(
        kind: ScenarioKind,
        observables: Vec<Observable>,
        contexts: Vec<Context>,
    ) -> Result<Self, ScenarioError> {
        let mut seen = HashSet::new();
        for o in &observables {
            if !seen.insert(o.id.as_str()) {
                return Err(ScenarioError::Validation(format!(
                    "duplicate observable id `{}`",
                    o.id
                )));
            }
            if o.outcome_count != 2 {
                return Err(ScenarioError::Validation(format!(
                    "observable `{}` has outcome_count {}, {} scenarios are dichotomic",
                    o.id, o.outcome_count, kind
                )));
            }
        }
        for (k, c) in contexts.iter().enumerate() {
            if c.is_empty() {
                return Err(ScenarioError::Validation(format!(
                    "context {} is empty",
                    k + 1
                )));
            }
            let mut members = HashSet::new();
            for m in &c.members {
                if !seen.contains(m.as_str()) {
                    return Err(ScenarioError::Validation(format!(
                        "context {} references undeclared observable `{m}`",
                        k + 1
                    )));
                }
                if !members.insert(m.as_str()) {
                    return Err(ScenarioError::Validation(format!(
                        "context {} lists `{m}` twice",
                        k + 1
                    )));
                }
            }
        }
        Ok(Scenario {
            kind,
            observables,
            contexts,
        })
    }

    pub fn kind(&self) -> ScenarioKind {
        self.kind
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn observable(&self, id: &str) -> Option<&Observable> {
        self.observables.iter().find(|o| o.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.observables.iter().position(|o| o.id == id)
    }

    /// The same incidence structure under another kind.
    pub fn with_kind(&self, kind: ScenarioKind) -> Scenario {
        Scenario {
            kind,
            ..self.clone()
        }
    }

    /// Equality that ignores member order inside contexts.
    pub fn same_structure(&self, other: &Scenario) -> bool {
        self.kind == other.kind
            && self.observables == other.observables
            && self.contexts.len() == other.contexts.len()
            && self
                .contexts
                .iter()
                .zip(&other.contexts)
                .all(|(a, b)| a.same_members(b))
    }

    /// Number of contexts each observable belongs to.
    pub fn occurrence_counts(&self) -> BTreeMap<String, usize> {
        let mut counts: BTreeMap<String, usize> =
            self.observables.iter().map(|o| (o.id.clone(), 0)).collect();
        for c in &self.contexts {
            for m in &c.members {
                *counts.get_mut(m).expect("validated member") += 1;
            }
        }
        counts
    }

    /// Contexts containing `id`, in declaration order.
    pub fn contexts_of(&self, id: &str) -> Result<Vec<&Context>, ScenarioError> {
        if self.observable(id).is_none() {
            return Err(ScenarioError::UnknownObservable(id.to_string()));
        }
        Ok(self.contexts.iter().filter(|c| c.contains(id)).collect())
    }

    /// Canonical text form: observables then contexts in declaration order.
    pub fn to_text(&self) -> String {
        let mut out = format!("scenario {}\n", self.kind);
        for o in &self.observables {
            out.push_str(&format!("obs {} {}\n", o.id, o.outcome_count));
        }
        for c in &self.contexts {
            out.push_str("ctx ");
            out.push_str(&c.members.join(" "));
            out.push('\n');
        }
        out
    }
}

impl FromStr for Scenario {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scenario(s)
    }
}

/// Splits a line into whitespace-separated tokens with their 1-based columns,
/// dropping anything after `#`.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &content[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &content[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut kind = None;
    let mut observables = Vec::new();
    let mut contexts = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let toks = tokens(raw);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        match (keyword, kind.is_some()) {
            ("scenario", false) => {
                if toks.len() != 2 {
                    return Err(parse_err(line_no, col, "expected `scenario <kind>`"));
                }
                let (kcol, ktok) = toks[1];
                kind = Some(
                    ktok.parse::<ScenarioKind>()
                        .map_err(|m| parse_err(line_no, kcol, m))?,
                );
            }
            ("scenario", true) => {
                return Err(parse_err(line_no, col, "duplicate `scenario` header"));
            }
            (_, false) => {
                return Err(parse_err(
                    line_no,
                    col,
                    "the first directive must be `scenario <kind>`",
                ));
            }
            ("obs", true) => {
                if toks.len() != 3 {
                    return Err(parse_err(
                        line_no,
                        col,
                        "expected `obs <id> <outcome_count>`",
                    ));
                }
                let (ccol, ctok) = toks[2];
                let outcome_count = ctok.parse::<usize>().map_err(|_| {
                    parse_err(line_no, ccol, format!("invalid outcome count `{ctok}`"))
                })?;
                observables.push(Observable {
                    id: toks[1].1.to_string(),
                    outcome_count,
                });
            }
            ("ctx", true) => {
                if toks.len() < 2 {
                    return Err(parse_err(
                        line_no,
                        col,
                        "a context needs at least one member",
                    ));
                }
                contexts.push(Context::new(toks[1..].iter().map(|&(_, t)| t)));
            }
            (other, true) => {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }

    let kind = kind.ok_or_else(|| parse_err(1, 1, "missing `scenario <kind>` header"))?;
    Scenario::new(kind, observables, contexts)
}

/// All contexts in which one subsystem observable `A` can be measured: one
/// per partner observable `B` on the other subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextFamily {
    base_observable: String,
    companions: Vec<String>,
}

impl ContextFamily {
    pub fn new<S: Into<String>>(
        base_observable: impl Into<String>,
        companions: impl IntoIterator<Item = S>,
    ) -> Result<Self, ScenarioError> {
        let companions: Vec<String> = companions.into_iter().map(Into::into).collect();
        if companions.is_empty() {
            return Err(ScenarioError::Validation(
                "a context family needs at least one companion".into(),
            ));
        }
        Ok(ContextFamily {
            base_observable: base_observable.into(),
            companions,
        })
    }

    pub fn base_observable(&self) -> &str {
        &self.base_observable
    }

    pub fn companions(&self) -> &[String] {
        &self.companions
    }

    /// `{A, B}` for each companion `B`.
    pub fn contexts(&self) -> Vec<Context> {
        self.companions
            .iter()
            .map(|b| Context::new([self.base_observable.as_str(), b.as_str()]))
            .collect()
    }

    /// The indistinguishability class `[A]`: one element per context.
    pub fn quasi_class(&self) -> QSet {
        make_class(&self.base_observable, self.companions.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const XYZ: &str =
        "scenario correlation\nobs X 2\nobs Y 2\nobs Z 2\nctx X Y\nctx X Z\nctx Y Z\n";

    #[test]
    fn parses_xyz() {
        let s = parse_scenario(XYZ).unwrap();
        assert_eq!(s.kind(), ScenarioKind::Correlation);
        assert_eq!(s.observables().len(), 3);
        assert_eq!(s.contexts().len(), 3);
        assert!(s.occurrence_counts().values().all(|&c| c == 2));
        assert_eq!(s.to_text(), XYZ);
    }

    #[test]
    fn contexts_of_in_declaration_order() {
        let s = parse_scenario(XYZ).unwrap();
        let cs = s.contexts_of("X").unwrap();
        assert_eq!(
            cs,
            vec![&Context::new(["X", "Y"]), &Context::new(["X", "Z"])]
        );
        assert_eq!(
            s.contexts_of("W").unwrap_err(),
            ScenarioError::UnknownObservable("W".into())
        );
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header comment\n\nscenario ks_coloring # trailing\nobs a 2\n\n  obs b 2\nctx a b # one context\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(
            s.occurrence_counts().values().copied().collect::<Vec<_>>(),
            vec![1, 1]
        );
        assert_eq!(
            s.to_text(),
            "scenario ks_coloring\nobs a 2\nobs b 2\nctx a b\n"
        );
    }

    #[test]
    fn dangling_reference_is_a_validation_error() {
        let err = parse_scenario("scenario correlation\nobs X 2\nctx X Q\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Validation(m) if m.contains("`Q`")));
    }

    #[test]
    fn validation_errors() {
        let dup = parse_scenario("scenario correlation\nobs X 2\nobs X 2\n").unwrap_err();
        assert!(matches!(dup, ScenarioError::Validation(m) if m.contains("duplicate")));
        let bad = parse_scenario("scenario ks_coloring\nobs X 3\n").unwrap_err();
        assert!(matches!(bad, ScenarioError::Validation(m) if m.contains("outcome_count 3")));
        let twice = parse_scenario("scenario ks_coloring\nobs X 2\nctx X X\n").unwrap_err();
        assert!(matches!(twice, ScenarioError::Validation(_)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_scenario("obs X 2\n").unwrap_err(),
            parse_err(1, 1, "the first directive must be `scenario <kind>`")
        );
        assert!(matches!(
            parse_scenario("scenario bogus\n").unwrap_err(),
            ScenarioError::Parse {
                line: 1,
                column: 10,
                ..
            }
        ));
        assert!(matches!(
            parse_scenario("scenario correlation\nobs X two\n").unwrap_err(),
            ScenarioError::Parse {
                line: 2,
                column: 7,
                ..
            }
        ));
        assert!(matches!(
            parse_scenario("scenario correlation\n  frob X\n").unwrap_err(),
            ScenarioError::Parse {
                line: 2,
                column: 3,
                ..
            }
        ));
        assert!(matches!(
            parse_scenario("scenario correlation\nctx\n").unwrap_err(),
            ScenarioError::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_scenario("# nothing\n").unwrap_err(),
            ScenarioError::Parse { .. }
        ));
    }

    #[test]
    fn single_context_counts_once() {
        let s =
            parse_scenario("scenario ks_coloring\nobs a 2\nobs b 2\nobs c 2\nctx c a b\n").unwrap();
        assert!(s.occurrence_counts().values().all(|&c| c == 1));
    }

    #[test]
    fn semantic_equality_ignores_member_order() {
        let a = parse_scenario("scenario correlation\nobs X 2\nobs Y 2\nctx X Y\n").unwrap();
        let b = parse_scenario("scenario correlation\nobs X 2\nobs Y 2\nctx Y X\n").unwrap();
        assert_ne!(a, b);
        assert!(a.same_structure(&b));
    }

    #[test]
    fn context_family() {
        let fam = ContextFamily::new("A", ["B", "B'"]).unwrap();
        assert_eq!(
            fam.contexts(),
            vec![Context::new(["A", "B"]), Context::new(["A", "B'"])]
        );
        assert_eq!(fam.quasi_class().qcard(), 2);
        assert_eq!(fam.quasi_class().label().as_str(), "A");
        assert!(ContextFamily::new("A", Vec::<String>::new()).is_err());
    }

    fn arb_scenario() -> impl Strategy<Value = Scenario> {
        (1usize..10, any::<bool>()).prop_flat_map(|(n, ks)| {
            let kind = if ks {
                ScenarioKind::KsColoring
            } else {
                ScenarioKind::Correlation
            };
            prop::collection::vec(
                prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n),
                0..8,
            )
            .prop_map(move |ctxs| {
                let obs = (0..n)
                    .map(|i| Observable {
                        id: format!("o{i}"),
                        outcome_count: 2,
                    })
                    .collect();
                let ctxs = ctxs
                    .into_iter()
                    .map(|m| Context::new(m.into_iter().rev().map(|i| format!("o{i}"))))
                    .collect();
                Scenario::new(kind, obs, ctxs).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(s in arb_scenario()) {
            let text = s.to_text();
            let back = parse_scenario(&text).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(back.to_text(), text);
        }

        #[test]
        fn occurrence_total_matches_context_sizes(s in arb_scenario()) {
            let total: usize = s.occurrence_counts().values().sum();
            prop_assert_eq!(total, s.contexts().iter().map(Context::len).sum::<usize>());
        }
    }
}
