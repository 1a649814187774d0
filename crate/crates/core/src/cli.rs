//! The `qontext` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
//! input or parse errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::fock::{self, NParticleSpace, Statistics};
use crate::hilbert::{self, DensityOperator, ProjectiveMeasurement, Projector};
use crate::inequality::{self, Behavior, ProductTriple, Sign};
use crate::ks;
use crate::qset;
use crate::report::{InputDigest, Report, Table};
use crate::scenario::{parse_scenario, ScenarioKind};

/// Overrides the bundled data directory.
pub const DATA_DIR_ENV: &str = "QONTEXT_DATA_DIR";
/// Largest `dⁿ` for which `fock` builds the projector matrices.
pub const MAX_PROJECTOR_CHECK_DIM: u64 = 256;
/// Largest outcome count whose quasi-functions are listed one per row.
const MAX_LISTED_QFUNCTIONS: usize = 32;

pub fn bundled_data_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

/// An existing path is used as given; otherwise the name is looked up in
/// `$QONTEXT_DATA_DIR`, falling back to the bundled data directory.
pub fn resolve_data_path(name: &str) -> PathBuf {
    let p = Path::new(name);
    if p.exists() {
        return p.to_path_buf();
    }
    let dir = std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(bundled_data_dir);
    dir.join(name)
}

#[derive(Debug, Parser)]
#[command(
    name = "qontext",
    version,
    about = "Contextuality and indistinguishability checks"
)]
struct Cli {
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Include the generation time in the report.
    #[arg(long, global = true)]
    timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableChoice {
    All,
    Classical,
    Quasi,
    Forbidden,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parity argument and exhaustive colouring search for a KS scenario.
    KsVerify {
        scenario: String,
        /// Vector realization to validate against the contexts.
        #[arg(long)]
        vectors: Option<String>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Classical and quasi tables for XY + XZ + YZ.
    Inequality {
        #[arg(long, value_enum, default_value_t = TableChoice::All)]
        table: TableChoice,
        /// Decide classical realizability of `exy,exz,eyz`.
        #[arg(long, value_name = "EXY,EXZ,EYZ", allow_hyphen_values = true)]
        behavior: Option<String>,
    },
    /// Quasi-function versus classical function counts.
    Qfunctions {
        #[arg(long)]
        qcard: usize,
        #[arg(long)]
        outcomes: usize,
        #[arg(long, default_value = "A")]
        label: String,
    },
    /// Sector dimensions and projector checks for n particles.
    Fock {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        particles: usize,
    },
    /// Interference fraction of two Gaussian packets against separation.
    Overlap {
        #[arg(long)]
        sigma: f64,
        /// Comma-separated, strictly increasing separations.
        #[arg(long, value_name = "CSV")]
        separations: String,
        /// Also write the curve as CSV to this path.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// A-marginals in the contexts {A,B} and {A,B'} of a bipartite state.
    Nosignal {
        #[arg(long)]
        state: String,
        #[arg(long = "measA", num_args = 1.., required = true)]
        meas_a: Vec<String>,
        #[arg(long = "measB", num_args = 1.., required = true)]
        meas_b: Vec<String>,
        #[arg(long = "measB2", num_args = 1.., required = true)]
        meas_b2: Vec<String>,
        #[arg(long, default_value_t = hilbert::AGGREGATE_TOL)]
        tol: f64,
    },
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn fail(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

/// Runs the command line, writing the text report to `out` and diagnostics
/// to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut report = match execute(&cli.command) {
        Ok(r) => r,
        Err(CliError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    if cli.timestamps {
        report.generated_at_unix = Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        );
    }
    if let Some(path) = &cli.json {
        if let Err(e) = fs::write(path, report.to_json()) {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if out.write_all(report.to_text().as_bytes()).is_err() {
        return 2;
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::KsVerify {
            scenario,
            vectors,
            tol,
        } => ks_verify(scenario, vectors.as_deref(), *tol),
        Command::Inequality { table, behavior } => inequality_report(*table, behavior.as_deref()),
        Command::Qfunctions {
            qcard,
            outcomes,
            label,
        } => qfunctions(*qcard, *outcomes, label),
        Command::Fock { dim, particles } => fock_report(*dim, *particles),
        Command::Overlap {
            sigma,
            separations,
            csv,
        } => overlap(*sigma, separations, csv.as_deref()),
        Command::Nosignal {
            state,
            meas_a,
            meas_b,
            meas_b2,
            tol,
        } => nosignal(state, meas_a, meas_b, meas_b2, *tol),
    }
}

/// Reads an input, recording its digest under the name it was given by.
fn load(name: &str, report: &mut Report) -> Result<String, CliError> {
    let path = resolve_data_path(name);
    let bytes =
        fs::read(&path).map_err(|e| fail(format!("cannot read {}: {e}", path.display())))?;
    report.input(InputDigest::of(name, &bytes));
    String::from_utf8(bytes).map_err(|_| fail(format!("{name} is not UTF-8 text")))
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn ks_verify(scenario: &str, vectors: Option<&str>, tol: f64) -> Result<Report, CliError> {
    let mut r = Report::new("ks-verify");
    let s =
        parse_scenario(&load(scenario, &mut r)?).map_err(|e| fail(format!("{scenario}: {e}")))?;
    if s.kind() != ScenarioKind::KsColoring {
        return Err(fail(format!(
            "{scenario}: expected a ks_coloring scenario, found {}",
            s.kind()
        )));
    }
    r.note("observables", s.observables().len());
    r.note("contexts", s.contexts().len());

    let cert = ks::parity_check(&s)?;
    let mut occ = Table::new("occurrences", ["observable", "contexts"]);
    for o in s.observables() {
        occ.push([
            o.id.clone(),
            cert.per_observable_occurrences[&o.id].to_string(),
        ]);
    }
    r.note("parity_all_even", cert.all_even);
    r.note("parity_contexts_odd", cert.contexts_odd);
    r.note("parity_contradiction", cert.contradiction_established);

    let search = ks::exhaustive_coloring(&s)?;
    r.note("satisfiable", search.satisfiable);
    r.note("assignments_examined", search.assignments_examined);
    r.check(
        "parity_agrees_with_search",
        !(cert.contradiction_established && search.satisfiable),
        !(cert.contradiction_established && search.satisfiable),
    );
    r.table(occ);
    if let Some(w) = &search.witness {
        let value = |id: &str| {
            w.iter()
                .find(|(k, _)| k == id)
                .map(|(_, v)| *v)
                .unwrap_or(0)
        };
        let ok = s
            .contexts()
            .iter()
            .all(|c| c.members.iter().filter(|m| value(m) == 1).count() == 1);
        r.check("witness_valid", ok, ok);
        let mut t = Table::new("witness", ["observable", "value"]);
        for (id, v) in w {
            t.push([id.clone(), v.to_string()]);
        }
        r.table(t);
    }

    if let Some(vectors) = vectors {
        let real = ks::parse_realization(&load(vectors, &mut r)?)
            .map_err(|e| fail(format!("{vectors}: {e}")))?;
        let rep = ks::validate_realization(&s, &real, tol)?;
        r.note("realization_dimension", real.dimension());
        r.note("realization_tolerance", sci(tol));
        let worst = rep
            .contexts
            .iter()
            .map(|c| c.worst_deviation)
            .fold(0.0, f64::max);
        r.check("realization_valid", rep.valid, rep.valid);
        r.note("realization_worst_deviation", sci(worst));
        let mut t = Table::new(
            "realization",
            [
                "context",
                "members",
                "orthogonality",
                "identity_deviation",
                "status",
            ],
        );
        for (k, c) in rep.contexts.iter().enumerate() {
            t.push([
                (k + 1).to_string(),
                c.members.join(" "),
                sci(c.orthogonality),
                sci(c.identity_deviation),
                if c.passed { "PASS" } else { "FAIL" }.to_string(),
            ]);
        }
        r.table(t);
    }
    Ok(r)
}

fn origin_tag(p: &ProductTriple) -> &'static str {
    match p.origin {
        inequality::Origin::Classical => "classical",
        inequality::Origin::Quasi => "quasi",
    }
}

fn product_table(name: &str, rows: &[ProductTriple]) -> Table {
    let mut t = Table::new(name, ["XY", "XZ", "YZ", "sum", "XY*XZ*YZ", "origin"]);
    for p in rows {
        t.push([
            p.xy.to_string(),
            p.xz.to_string(),
            p.yz.to_string(),
            p.sum().to_string(),
            p.triple_product().to_string(),
            origin_tag(p).to_string(),
        ]);
    }
    t
}

fn bounds_of(rows: impl Iterator<Item = i32> + Clone) -> (i32, i32) {
    (rows.clone().min().unwrap_or(0), rows.max().unwrap_or(0))
}

fn inequality_report(choice: TableChoice, behavior: Option<&str>) -> Result<Report, CliError> {
    let mut r = Report::new("inequality");
    let classical = inequality::classical_table();
    let quasi = inequality::quasi_table();
    let forbidden = inequality::forbidden_rows();

    let cb = inequality::classical_bounds();
    let cb_rows = bounds_of(classical.iter().map(|(_, p)| p.sum()));
    r.check(
        "classical_bounds",
        format!("({}, {})", cb.0, cb.1),
        cb == cb_rows,
    );
    let qb = inequality::quasi_bounds();
    let qb_rows = bounds_of(quasi.iter().map(|p| p.sum()));
    r.check(
        "quasi_bounds",
        format!("({}, {})", qb.0, qb.1),
        qb == qb_rows,
    );
    r.note("classical_rows", classical.len());
    r.note("quasi_rows", quasi.len());
    let forbidden_ok = forbidden.iter().all(|p| p.triple_product() == Sign::Minus)
        && classical
            .iter()
            .all(|(_, p)| p.triple_product() == Sign::Plus);
    r.check("forbidden_rows", forbidden.len(), forbidden_ok);
    r.check("quasi_violates_classical_bound", qb.0 < cb.0, qb.0 < cb.0);

    if matches!(choice, TableChoice::All | TableChoice::Classical) {
        let mut t = Table::new(
            "classical",
            ["X", "Y", "Z", "XY", "XZ", "YZ", "sum", "origin"],
        );
        for (v, p) in &classical {
            t.push([
                v.x.to_string(),
                v.y.to_string(),
                v.z.to_string(),
                p.xy.to_string(),
                p.xz.to_string(),
                p.yz.to_string(),
                p.sum().to_string(),
                origin_tag(p).to_string(),
            ]);
        }
        r.table(t);
    }
    if matches!(choice, TableChoice::All | TableChoice::Quasi) {
        r.table(product_table("quasi", &quasi));
    }
    if matches!(choice, TableChoice::All | TableChoice::Forbidden) {
        r.table(product_table("forbidden", &forbidden));
    }

    if let Some(text) = behavior {
        let vals: Vec<f64> = text
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| fail(format!("invalid behavior `{text}`")))?;
        let [exy, exz, eyz] = vals[..] else {
            return Err(fail(format!(
                "behavior needs three values, got {}",
                vals.len()
            )));
        };
        let b = Behavior::new(exy, exz, eyz)?;
        let real = inequality::is_classically_realizable(&b, hilbert::AGGREGATE_TOL)?;
        r.note("behavior_sum", format!("{:.12}", b.sum()));
        r.note("behavior_classically_realizable", real.realizable);
        let mut t = Table::new("behavior_weights", ["XY", "XZ", "YZ", "weight"]);
        for (v, w) in inequality::classical_vertices()
            .iter()
            .zip(real.barycentric)
        {
            t.push([
                v.xy.to_string(),
                v.xz.to_string(),
                v.yz.to_string(),
                format!("{w:.12}"),
            ]);
        }
        r.table(t);
    }
    Ok(r)
}

fn qfunctions(qcard: usize, outcomes: usize, label: &str) -> Result<Report, CliError> {
    let mut r = Report::new("qfunctions");
    let class = qset::make_class(label, qcard);
    let fs = qset::enumerate_qfunctions(&class, outcomes)?;
    let classical = qset::classical_function_count(qcard, outcomes)?;
    r.note("qcard", qcard);
    r.note("outcomes", outcomes);
    r.check("quasi_function_count", fs.len(), fs.len() == outcomes);
    r.note("classical_function_count", &classical);
    let domains_ok = fs.iter().all(|f| f.domain().qcard() == qcard);
    r.check("domain_qcard_preserved", domains_ok, domains_ok);
    if qcard >= 1 {
        let factor = BigUint::from(outcomes).pow(qcard as u32 - 1);
        let ok = BigUint::from(fs.len()) * &factor == classical;
        r.check("collapse_factor", factor, ok);
    }
    if outcomes <= MAX_LISTED_QFUNCTIONS {
        let mut t = Table::new("quasi_functions", ["function", "pair"]);
        for (k, f) in fs.iter().enumerate() {
            let (l, j) = f.as_pair();
            t.push([format!("f{k}"), format!("<[{l}], {j}>")]);
        }
        r.table(t);
    }
    Ok(r)
}

fn fock_report(dim: usize, particles: usize) -> Result<Report, CliError> {
    let mut r = Report::new("fock");
    if dim == 0 {
        return Err(fail("single-particle dimension must be positive"));
    }
    let (d, n) = (dim as u64, particles as u64);
    let (sym, anti) = fock::checked_sector_dimensions(d, n)
        .ok_or_else(|| fail("sector dimensions overflow u64"))?;
    r.note("single_dim", dim);
    r.note("particles", particles);
    r.note("symmetric_dim", sym);
    r.note("antisymmetric_dim", anti);

    match d
        .checked_pow(particles as u32)
        .filter(|&t| t <= MAX_PROJECTOR_CHECK_DIM)
    {
        Some(_) if particles >= 1 => {
            let laws = fock::projector_laws(&NParticleSpace::new(dim, particles)?);
            let tol = fock::SECTOR_TOL;
            r.check(
                "sym_idempotency",
                sci(laws.sym_idempotency),
                laws.sym_idempotency <= tol,
            );
            r.check(
                "anti_idempotency",
                sci(laws.anti_idempotency),
                laws.anti_idempotency <= tol,
            );
            match laws.cross_product {
                Some(c) => r.check("sym_anti_product", sci(c), c <= tol),
                None => r.note("sym_anti_product", "n/a (one particle)"),
            }
            r.check("sym_rank", laws.sym_rank, laws.sym_rank as u64 == sym);
            r.check("anti_rank", laws.anti_rank, laws.anti_rank as u64 == anti);
        }
        Some(_) => r.note("projector_checks", "n/a (no particles)"),
        None => r.note(
            "projector_checks",
            format!("skipped (d^n > {MAX_PROJECTOR_CHECK_DIM})"),
        ),
    }

    let bosons = fock::fock_truncation(d, n, Statistics::Boson);
    let fermions = fock::fock_truncation(d, n, Statistics::Fermion);
    let mut t = Table::new("fock_truncation", ["n", "boson", "fermion"]);
    for (k, (b, f)) in bosons.iter().zip(&fermions).enumerate() {
        t.push([k.to_string(), b.to_string(), f.to_string()]);
    }
    r.table(t);
    Ok(r)
}

fn overlap(sigma: f64, separations: &str, csv: Option<&Path>) -> Result<Report, CliError> {
    let mut r = Report::new("overlap");
    let seps: Vec<f64> = separations
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| fail(format!("invalid separation list `{separations}`")))?;
    let curve = fock::overlap_decay_curve(sigma, &seps)?;
    r.note("sigma", sigma);
    r.note("points", curve.len());
    let decreasing = curve.windows(2).all(|w| w[1].1 < w[0].1);
    r.check("strictly_decreasing", decreasing, decreasing);
    if let Some(&(s, f)) = curve.last() {
        r.note("tail_fraction", sci(f));
        if s >= 10.0 * sigma {
            r.check("distinguishable_beyond_10_sigma", f < 1e-9, f < 1e-9);
        }
    }
    let mut t = Table::new("curve", ["separation", "fraction"]);
    for (s, f) in &curve {
        t.push([format!("{s:.16e}"), format!("{f:.16e}")]);
    }
    r.table(t);
    if let Some(path) = csv {
        fs::write(path, fock::curve_csv(&curve))
            .map_err(|e| fail(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(r)
}

fn load_matrices(
    names: &[String],
    r: &mut Report,
) -> Result<Vec<hilbert::ComplexMatrix>, CliError> {
    let mut out = Vec::new();
    for name in names {
        let ms = hilbert::io::parse_matrices(&load(name, r)?)
            .map_err(|e| fail(format!("{name}: {e}")))?;
        out.extend(ms);
    }
    Ok(out)
}

fn load_measurement(names: &[String], r: &mut Report) -> Result<ProjectiveMeasurement, CliError> {
    let projectors = load_matrices(names, r)?
        .into_iter()
        .map(Projector::new)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProjectiveMeasurement::new(projectors)?)
}

fn probs(p: &[f64]) -> String {
    let items: Vec<String> = p.iter().map(|x| format!("{x:.12}")).collect();
    format!("[{}]", items.join(", "))
}

fn nosignal(
    state: &str,
    meas_a: &[String],
    meas_b: &[String],
    meas_b2: &[String],
    tol: f64,
) -> Result<Report, CliError> {
    let mut r = Report::new("nosignal");
    let mut states = load_matrices(&[state.to_string()], &mut r)?;
    if states.len() != 1 {
        return Err(fail(format!(
            "{state}: expected one matrix, found {}",
            states.len()
        )));
    }
    let rho = DensityOperator::new(states.remove(0))?;
    let a = load_measurement(meas_a, &mut r)?;
    let b = load_measurement(meas_b, &mut r)?;
    let b2 = load_measurement(meas_b2, &mut r)?;
    if a.dim() * b.dim() != rho.dim() {
        return Err(fail(format!(
            "state dimension {} is not {} x {}",
            rho.dim(),
            a.dim(),
            b.dim()
        )));
    }
    let rep = hilbert::no_signaling_check(&rho, &a, &b, &b2, tol)?;
    r.note("tolerance", sci(tol));
    r.note("marginal_with_b", probs(&rep.marginal_b));
    r.note("marginal_with_b2", probs(&rep.marginal_b2));
    r.note("reduced_prediction", probs(&rep.reduced_prediction));
    r.check(
        "max_deviation",
        sci(rep.max_deviation),
        rep.max_deviation <= tol,
    );
    r.check(
        "partial_trace_deviation",
        sci(rep.partial_trace_deviation),
        rep.partial_trace_deviation <= tol,
    );
    let mut t = Table::new("marginals", ["outcome", "with_b", "with_b2", "reduced"]);
    for k in 0..a.outcome_count() {
        t.push([
            k.to_string(),
            format!("{:.12}", rep.marginal_b[k]),
            format!("{:.12}", rep.marginal_b2[k]),
            format!("{:.12}", rep.reduced_prediction[k]),
        ]);
    }
    r.table(t);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("qontext").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, out, err) = run_capture(&["no-such-command"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(!err.is_empty());
        assert_eq!(
            run_capture(&["qfunctions", "--qcard", "x", "--outcomes", "2"]).0,
            2
        );
        assert_eq!(
            run_capture(&["qfunctions", "--qcard", "3", "--outcomes", "0"]).0,
            2
        );
        assert_eq!(
            run_capture(&["fock", "--dim", "0", "--particles", "2"]).0,
            2
        );
        assert_eq!(
            run_capture(&["overlap", "--sigma", "1", "--separations", "2,1"]).0,
            2
        );
        assert_eq!(run_capture(&["ks-verify", "missing.scn"]).0, 2);
        assert_eq!(run_capture(&["ks-verify", "xyz.scn"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("ks-verify"));
    }

    #[test]
    fn qfunctions_example() {
        let (code, out, _) = run_capture(&["qfunctions", "--qcard", "9", "--outcomes", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains("[PASS] quasi_function_count = 4\n"));
        assert!(out.contains("[INFO] classical_function_count = 262144\n"));
        assert!(out.contains("[PASS] collapse_factor = 65536\n"));
        assert!(out.contains("<[A], 3>"));
    }

    #[test]
    fn inequality_table_selection() {
        let (code, out, _) = run_capture(&["inequality", "--table", "forbidden"]);
        assert_eq!(code, 0);
        assert!(out.contains("table forbidden (4 rows)"));
        assert!(!out.contains("table classical"));
        let (code, out, _) = run_capture(&["inequality", "--behavior", "-1,-1,-1"]);
        assert_eq!(code, 0);
        assert!(out.contains("[INFO] behavior_classically_realizable = false\n"));
    }

    #[test]
    fn fock_reports_projector_checks() {
        let (code, out, _) = run_capture(&["fock", "--dim", "3", "--particles", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("[INFO] symmetric_dim = 6\n"));
        assert!(out.contains("[INFO] antisymmetric_dim = 3\n"));
        assert!(out.contains("[PASS] sym_rank = 6\n"));
        let (code, out, _) = run_capture(&["fock", "--dim", "10", "--particles", "4"]);
        assert_eq!(code, 0);
        assert!(out.contains("skipped"));
    }

    #[test]
    fn data_path_falls_back_to_bundle() {
        assert_eq!(
            resolve_data_path("xyz.scn"),
            bundled_data_dir().join("xyz.scn")
        );
        assert!(resolve_data_path("cabello18.scn").exists());
    }
}
