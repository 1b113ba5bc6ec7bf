//! Command line interface.
//!
//! Human summaries go to standard output and diagnostics to standard error;
//! `--report` writes the full JSON. Exit codes: 0 success, 1 validation
//! violations or mismatch, 2 malformed input or I/O failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::builders::{self, KummerParams, Triangulation};
use crate::degeneration::{DegenerationError, DegenerationFiber};
use crate::exact_linalg::{self, IntMatrix};
use crate::motivic_integral::{self, IntegralError, IntegralReport, RamifiedParams};
use crate::weight_ss;

#[derive(Parser, Debug)]
#[command(name = "k3motive", version, about = "Motivic integrals of semi-stable K3 degenerations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an example fiber document.
    Build {
        family: Family,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Number of double curves in a type II chain.
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        m1: usize,
        #[arg(long, default_value_t = 2)]
        m2: usize,
        /// tetrahedron, octahedron, icosahedron or file:<path>.
        #[arg(long, default_value = "tetrahedron")]
        triangulation: String,
        /// Comma separated component invariants.
        #[arg(long, value_delimiter = ',')]
        a_profile: Option<Vec<u64>>,
        /// Ramification index for the recorded closed form.
        #[arg(long, default_value_t = 1)]
        e: u64,
    },
    /// Validate a fiber and report its combinatorial and cohomological data.
    Analyze {
        input: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare the motivic integral of a fiber with its closed form.
    Verify {
        #[arg(required_unless_present = "all")]
        input: Option<PathBuf>,
        /// Verify every `*.json` file in a directory.
        #[arg(long, conflicts_with = "input")]
        all: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        e: u64,
    },
    /// Smith normal form of an integer matrix.
    Snf {
        matrix: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Type2,
    Type3,
    Kummer,
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn malformed(message: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn violation(message: impl std::fmt::Display) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

fn integral_failure(e: IntegralError) -> Failure {
    match e {
        IntegralError::Fiber(DegenerationError::Invalid(v)) => {
            violation(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n"))
        }
        other => violation(other),
    }
}

/// What `build` writes; `analyze` and `verify` also accept a bare fiber.
#[derive(Serialize, Deserialize, Clone, Debug)]
struct Document {
    fiber: DegenerationFiber,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expectations: Option<Expectations>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kummer: Option<KummerParams>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
struct Expectations {
    s: u8,
    r: Option<String>,
    e: u64,
    closed_form: crate::motive_ring::MotiveClass,
}

fn read_document(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let parsed = if value.get("fiber").is_some() {
        serde_json::from_value::<Document>(value)
    } else {
        serde_json::from_value::<DegenerationFiber>(value).map(|fiber| Document { fiber, expectations: None, kummer: None })
    };
    parsed.map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(malformed)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Build { family, out: path, m, m1, m2, triangulation, a_profile, e } => {
            build(family, path.as_deref(), m, (m1, m2), &triangulation, a_profile.as_deref(), e, out)
        }
        Command::Analyze { input, report } => analyze(&input, report.as_deref(), out),
        Command::Verify { input, all, report, e } => match (input, all) {
            (_, Some(dir)) => verify_all(&dir, report.as_deref(), e, out, err),
            (Some(input), None) => verify_one(&input, report.as_deref(), e, out),
            (None, None) => Err(malformed("verify needs an input or --all")),
        },
        Command::Snf { matrix, report } => snf(&matrix, report.as_deref(), out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn build(
    family: Family,
    path: Option<&Path>,
    m: usize,
    (m1, m2): (usize, usize),
    triangulation: &str,
    a_profile: Option<&[u64]>,
    e: u64,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let doc = match family {
        Family::Type2 | Family::Type3 => {
            let fiber = match family {
                Family::Type2 => builders::build_type2_chain(m, a_profile).map_err(malformed)?,
                _ => {
                    let tri = load_triangulation(triangulation)?;
                    builders::build_type3(&tri, a_profile).map_err(malformed)?
                }
            };
            let report = motivic_integral::integral_report(&fiber, e).map_err(integral_failure)?;
            let closed_form = report.closed_form_e.as_ref().map(|c| c.class.clone()).unwrap_or(report.closed_form);
            let expectations = Expectations { s: report.s, r: report.r.map(|r| r.to_string()), e, closed_form };
            Document { fiber, expectations: Some(expectations), kummer: None }
        }
        Family::Kummer => {
            let params = KummerParams { m1, m2 };
            let k = builders::build_kummer(params).map_err(malformed)?;
            let closed_form =
                motivic_integral::theorem1_closed_form(&RamifiedParams::type3(e, k.r2_kummer.clone())).map_err(malformed)?;
            let expectations = Expectations { s: 3, r: Some(k.r2_kummer.to_string()), e, closed_form };
            Document { fiber: k.fiber, expectations: Some(expectations), kummer: Some(params) }
        }
    };
    match path {
        Some(p) => {
            write_json(p, &doc)?;
            let _ = writeln!(out, "wrote {} ({})", p.display(), doc.fiber.label);
        }
        None => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).map_err(malformed)?);
        }
    }
    Ok(())
}

fn load_triangulation(spec: &str) -> Result<crate::complexes::DeltaSet, Failure> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text = fs::read_to_string(path).map_err(|e| malformed(format!("{path}: {e}")))?;
        return builders::parse_triangulation(&text).map_err(|e| malformed(format!("{path}: {e}")));
    }
    Triangulation::builtin(spec)
        .map(|t| t.complex())
        .ok_or_else(|| malformed(format!("unknown triangulation {spec:?}")))
}

fn analyze(input: &Path, report_path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let doc = read_document(input)?;
    let f = &doc.fiber;
    let violations = f.validate();
    if !violations.is_empty() {
        let list = violations.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n");
        return Err(violation(format!("{}: {} violation(s)\n{list}", f.label, violations.len())));
    }
    let nerve = f.clemens_polytope().map_err(violation)?;
    let homology = nerve.homology_all();
    let homotopy = nerve.recognize();
    let _ = writeln!(out, "fiber {}", f.label);
    let _ = writeln!(out, "  dual complex: counts {:?}, {:?}", nerve.counts(), homotopy);
    let mut report = json!({
        "fiber_label": f.label,
        "dual_complex": {
            "counts": nerve.counts(),
            "euler_characteristic": nerve.euler_characteristic(),
            "homology": homology,
            "homotopy_type": homotopy,
        },
    });
    if let Some(params) = doc.kummer {
        let k = builders::build_kummer(params).map_err(malformed)?;
        let _ = writeln!(out, "  kummer {}x{}: {} generic, {} special", params.m1, params.m2, k.component_census.generic, k.component_census.special);
        let _ = writeln!(out, "  integral {}", k.integral);
        report["kummer"] = json!({
            "params": params,
            "component_census": k.component_census,
            "lattice_pairing": k.lattice_pairing.to_string(),
            "r2_abelian": k.r2_abelian.to_string(),
            "r2_kummer": k.r2_kummer.to_string(),
            "grid_coefficient_sum": k.grid_coefficient_sum.to_string(),
            "integral": k.integral,
        });
    } else {
        let s = f.degeneration_type().map_err(violation)?;
        let strata = f.strata_classes().map_err(violation)?;
        let smooth = f.smooth_locus_class().map_err(violation)?;
        let lim = motivic_integral::lim_class(f).map_err(integral_failure)?;
        let page = weight_ss::e1_page(f).map_err(violation)?;
        let (cochain, chain) = weight_ss::boundary_rows(f).map_err(violation)?;
        let e2 = weight_ss::e2_report(&[cochain, chain]).map_err(violation)?;
        let chi = motivic_integral::acampo_chi(f).map_err(integral_failure)?;
        let serre_ok = motivic_integral::serre_hodge_check(f).map_err(integral_failure)?;
        let _ = writeln!(out, "  type {}", ["I", "II", "III"][s as usize - 1]);
        let _ = writeln!(out, "  smooth locus {smooth}");
        let _ = writeln!(out, "  chi {chi}, E1 alternating sum {}, serre check {serre_ok}", page.alternating_sum());
        report["s"] = json!(s);
        report["strata"] = json!({ "y0": strata.y0, "y1": strata.y1, "y2": strata.y2 });
        report["smooth_locus"] = json!(smooth);
        report["lim_class"] = json!(lim);
        report["chi"] = json!(chi.to_string());
        report["serre_ok"] = json!(serre_ok);
        report["e1_page"] = page
            .entries
            .iter()
            .map(|(&(p, q), summands)| json!({ "p": p, "q": q, "rank": page.rank(p, q), "summands": summands }))
            .collect();
        report["e1_alternating_sum"] = json!(page.alternating_sum());
        report["boundary_rows_e2"] = json!(e2);
        match s {
            2 => {
                let row = weight_ss::type2_h1_row(f.double_curves.len()).map_err(violation)?;
                let _ = writeln!(out, "  r1 {}", row.r1);
                report["r1"] = json!(row.r1.to_string());
                report["monodromy_n"] = json!(row.n);
            }
            3 => {
                let g = weight_ss::monodromy_gram(f).map_err(violation)?;
                let _ = writeln!(out, "  r2 {}", g.r_d);
                report["r2"] = json!(g.r_d.to_string());
                report["monodromy_gram"] = json!(g.gram);
                report["cycle_generators"] = json!(g.basis);
            }
            _ => {}
        }
    }
    if let Some(p) = report_path {
        write_json(p, &report)?;
    }
    Ok(())
}

/// Report for one document; `Err` only for unreadable input.
fn verify_report(doc: &Document, e: u64) -> Result<(Value, bool, Vec<String>), Failure> {
    let mut notes = vec![];
    let mut warnings = vec![];
    let (mut value, mut ok, computed) = match doc.kummer {
        Some(params) => {
            let k = builders::build_kummer(params).map_err(malformed)?;
            if k.fiber != doc.fiber {
                notes.push(format!("fiber does not match the kummer {}x{} construction", params.m1, params.m2));
            }
            let p = RamifiedParams::type3(1, k.r2_kummer.clone());
            let closed_form = motivic_integral::theorem1_closed_form(&p).map_err(integral_failure)?;
            let e_poly = k.integral.e_polynomial().map_err(malformed)?;
            let chi = e_poly.eval_at_one();
            let serre_ok = k.integral.serre_reduce().map_err(malformed)? == motivic_integral::limit_hodge_reduction(3);
            let matches = k.integral == closed_form;
            let mut v = json!({
                "fiber_label": doc.fiber.label,
                "s": 3,
                "r": k.r2_kummer.to_string(),
                "integral": k.integral,
                "closed_form": closed_form,
                "match": matches,
                "chi": chi.to_string(),
                "serre_ok": serre_ok,
            });
            if e != 1 {
                let ramified = RamifiedParams::type3(e, k.r2_kummer.clone());
                let class = motivic_integral::theorem1_closed_form(&ramified).map_err(integral_failure)?;
                v["closed_form_e"] = json!({ "e": e, "class": class });
                warnings.extend(ramified.warnings());
            }
            let expected = Expectations { s: 3, r: Some(k.r2_kummer.to_string()), e, closed_form: ramified_or(&p, e)? };
            let ok = matches && serre_ok && chi == BigInt::from(24);
            (v, ok, Some(expected))
        }
        None => match motivic_integral::integral_report(&doc.fiber, e) {
            Ok(r) => {
                warnings.extend(r.warnings.iter().cloned());
                let expected = Expectations {
                    s: r.s,
                    r: r.r.as_ref().map(|x| x.to_string()),
                    e,
                    closed_form: r.closed_form_e.as_ref().map(|c| c.class.clone()).unwrap_or_else(|| r.closed_form.clone()),
                };
                (report_value(&r), r.passed(), Some(expected))
            }
            Err(err) => {
                let failure = integral_failure(err);
                notes.push(failure.message);
                (json!({ "fiber_label": doc.fiber.label, "match": false }), false, None)
            }
        },
    };
    if let (Some(want), Some(got)) = (&doc.expectations, &computed) {
        if want.e == got.e && want != got {
            notes.push("recorded expectations differ from the computed values".into());
            ok = false;
        }
    }
    if !notes.is_empty() {
        ok = false;
        value["notes"] = json!(notes);
    }
    if !warnings.is_empty() {
        value["warnings"] = json!(warnings);
    }
    Ok((value, ok, notes))
}

fn ramified_or(p: &RamifiedParams, e: u64) -> Result<crate::motive_ring::MotiveClass, Failure> {
    motivic_integral::theorem1_closed_form(&RamifiedParams { e, ..p.clone() }).map_err(integral_failure)
}

fn report_value(r: &IntegralReport) -> Value {
    let mut v = json!({
        "fiber_label": r.fiber_label,
        "s": r.s,
        "r": r.r.as_ref().map(|x| x.to_string()),
        "integral": r.integral,
        "closed_form": r.closed_form,
        "match": r.matches,
        "chi": r.chi.to_string(),
        "serre_ok": r.serre_ok,
    });
    if let Some(c) = &r.closed_form_e {
        v["closed_form_e"] = json!(c);
    }
    v
}

fn summary_line(v: &Value, ok: bool) -> String {
    let r = v.get("r").and_then(Value::as_str).unwrap_or("-");
    format!(
        "{} {}: s={} r={} match={} chi={} serre_ok={}",
        if ok { "ok  " } else { "FAIL" },
        v["fiber_label"].as_str().unwrap_or("?"),
        v.get("s").map(|s| s.to_string()).unwrap_or_else(|| "?".into()),
        r,
        v["match"],
        v.get("chi").and_then(Value::as_str).unwrap_or("?"),
        v.get("serre_ok").map(|s| s.to_string()).unwrap_or_else(|| "?".into()),
    )
}

fn verify_one(input: &Path, report_path: Option<&Path>, e: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let doc = read_document(input)?;
    let (value, ok, notes) = verify_report(&doc, e)?;
    let _ = writeln!(out, "{}", summary_line(&value, ok));
    if let Some(p) = report_path {
        write_json(p, &value)?;
    }
    if ok {
        Ok(())
    } else {
        Err(violation(if notes.is_empty() { format!("{}: closed form mismatch", doc.fiber.label) } else { notes.join("\n") }))
    }
}

fn verify_all(dir: &Path, report_path: Option<&Path>, e: u64, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut paths = fs::read_dir(dir)
        .map_err(|x| malformed(format!("{}: {x}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect::<Vec<_>>();
    paths.sort();
    let results: Vec<_> = paths.par_iter().map(|p| read_document(p).and_then(|doc| verify_report(&doc, e))).collect();
    let mut code = 0;
    let mut reports = vec![];
    for (path, result) in paths.iter().zip(results) {
        match result {
            Ok((value, ok, notes)) => {
                let _ = writeln!(out, "{}  [{}]", summary_line(&value, ok), path.display());
                if !ok {
                    code = code.max(1);
                    for n in notes {
                        let _ = writeln!(err, "{}: {n}", path.display());
                    }
                }
                reports.push(json!({ "path": path.display().to_string(), "report": value }));
            }
            Err(f) => {
                let _ = writeln!(err, "{}", f.message);
                code = code.max(f.code);
            }
        }
    }
    if let Some(p) = report_path {
        write_json(p, &reports)?;
    }
    match code {
        0 => Ok(()),
        c => Err(Failure { code: c, message: format!("{} file(s) checked, not all passed", paths.len()) }),
    }
}

/// A matrix given either as `{rows, cols, entries}` or as a list of rows.
fn parse_matrix(text: &str) -> Result<IntMatrix, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if value.is_object() {
        return serde_json::from_value(value).map_err(|e| e.to_string());
    }
    let rows = value.as_array().ok_or("expected an object or a list of rows")?;
    let mut entries = vec![];
    let cols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    for row in rows {
        let row = row.as_array().ok_or("rows must be lists")?;
        if row.len() != cols {
            return Err("rows have different lengths".into());
        }
        for x in row {
            let n = match x {
                Value::Number(n) => n.to_string().parse::<BigInt>().map_err(|e| e.to_string())?,
                Value::String(s) => s.trim().parse::<BigInt>().map_err(|e| format!("bad integer {s:?}: {e}"))?,
                _ => return Err(format!("not an integer: {x}")),
            };
            entries.push(n);
        }
    }
    IntMatrix::new(rows.len(), cols, entries).map_err(|e| e.to_string())
}

fn snf(path: &Path, report_path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let a = parse_matrix(&text).map_err(|e| malformed(format!("{}: {e}", path.display())))?;
    let d = exact_linalg::smith_normal_form(&a);
    let diag = d.diagonal.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let _ = writeln!(out, "diagonal ({diag})");
    let _ = writeln!(out, "rank {}", d.rank());
    if let Some(p) = report_path {
        write_json(p, &d)?;
    }
    Ok(())
}
