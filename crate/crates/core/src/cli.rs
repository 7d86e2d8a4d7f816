//! The command layer behind the `windmill` binary.
//!
//! Every command writes canonical JSON (sorted keys) or DOT, so identical inputs give
//! byte-identical outputs. Exit codes: 0 when all checks pass, 1 when failures are reported,
//! 2 for usage or input errors, 3 for contradictions of verified invariants.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::axioms::{check_axioms, AxiomReport};
use crate::complex::build_projection_complex;
use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::instance::{load_system_str, serialize_system, LoadOptions};
use crate::ladder::{calibrate_constants, ConstantLadder};
use crate::metrics::{DerivedMetrics, Space};
use crate::models::graph_product::GraphProductModel;
use crate::models::oracle::{membership_oracle, OracleVerdict};
use crate::models::spec::{gen_model, Model, ModelSpec};
use crate::properties::{check_exact_equality, check_properties, PropertyOutcome, PropertyReport};
use crate::rational;
use crate::rotors::family::{FamilyOptions, FamilyReport, RotatingFamily};
use crate::rotors::greendlinger::{greendlinger, ShorteningOptions};
use crate::rotors::presentation::{presentation, PresentationDoc, PresentationForm};
use crate::rotors::tree::TreeOptions;
use crate::rotors::windmill::{run_windmill, WindmillRun};
use crate::system::CompositeSystem;

#[derive(Parser, Debug)]
#[command(name = "windmill", version, about = "Composite projection systems and the windmill process")]
struct Cli {
    /// Treat load warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
    /// Output file (or directory for `windmill`); standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Axioms and modified-distance properties of an instance or model spec.
    Check {
        input: PathBuf,
        /// Base constant to check at, as "p/q"; the instance's own value when absent.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Constant ladder of an instance or model spec.
    Calibrate { input: PathBuf },
    /// Projection complex of one coordinate as DOT.
    Complex {
        input: PathBuf,
        #[arg(long)]
        coord: usize,
        #[arg(long = "K")]
        k: String,
    },
    /// Generates a model and writes it as an instance file.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Model parameters as inline JSON.
        #[arg(long, conflicts_with = "params_file")]
        params: Option<String>,
        /// Model parameters read from a JSON file.
        #[arg(long)]
        params_file: Option<PathBuf>,
    },
    /// Runs the windmill process on a graph-product model.
    Windmill {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        radius: Option<u32>,
        #[arg(long, default_value_t = 32)]
        budget: usize,
        #[arg(long, value_enum, default_value = "transversal")]
        form: Form,
        /// Longest conjugating word in the transversal form; the radius when absent.
        #[arg(long)]
        word_budget: Option<usize>,
    },
    /// Shortens a word of the rotation subgroup.
    Greendlinger {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        radius: Option<u32>,
        #[arg(long, default_value_t = 1)]
        start_coord: usize,
    },
    /// Presentation read off a finished windmill.
    Present {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "transversal")]
        form: Form,
        #[arg(long)]
        radius: Option<u32>,
        #[arg(long, default_value_t = 32)]
        budget: usize,
        #[arg(long)]
        word_budget: Option<usize>,
    },
    /// Membership of a word in the rotation subgroup.
    Oracle {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        word: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    TreeSegments,
    GraphProduct,
    Adversarial,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Form {
    Transversal,
    Closure,
}

impl From<Form> for PresentationForm {
    fn from(f: Form) -> Self {
        match f {
            Form::Transversal => PresentationForm::Transversal,
            Form::Closure => PresentationForm::Closure,
        }
    }
}

/// Outcome of one command.
#[derive(Clone, Debug, Default)]
pub struct CommandResult {
    pub exit_code: i32,
    /// Files written.
    pub reports: Vec<PathBuf>,
    /// Text destined for standard output when no `--out` was given.
    pub stdout: String,
    pub stderr: String,
}

/// Canonical JSON: keys sorted, two-space indentation, trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidInstance(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes a report as canonical JSON.
pub fn export_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    write_atomic(path, &canonical_json(report)?)
}

/// Writes DOT text.
pub fn export_dot(dot: &str, path: &Path) -> Result<()> {
    write_atomic(path, dot)
}

enum Input {
    Instance { system: CompositeSystem, warnings: Vec<String> },
    Model(Model),
}

fn load_input(path: &Path, strict: bool) -> Result<Input> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("kind").is_some() {
        let spec = ModelSpec::from_json(&text).map_err(|e| Error::Parse(e.to_string()))?;
        return Ok(Input::Model(gen_model(&spec)?));
    }
    let loaded = load_system_str(&text, LoadOptions { strict })?;
    Ok(Input::Instance { system: loaded.system, warnings: loaded.warnings })
}

fn load_graph_product(path: &Path, radius: Option<u32>) -> Result<GraphProductModel> {
    let spec = ModelSpec::load(path).map_err(|e| match e {
        Error::Json(j) => Error::Parse(j.to_string()),
        other => other,
    })?;
    let ModelSpec::GraphProduct { mut params, .. } = spec else {
        return Err(Error::InvalidInstance("this command needs a graph-product model spec".into()));
    };
    if let Some(r) = radius {
        params.radius = r;
    }
    GraphProductModel::new(params)
}

#[derive(Serialize)]
struct CheckReport {
    input: String,
    seed: Option<u64>,
    warnings: Vec<String>,
    axioms: AxiomReport,
    ladder: Option<ConstantLadder>,
    calibration_error: Option<String>,
    properties: Option<PropertyReport>,
    /// Equality of modified and raw distances; enforced only for disjoint-interior segments.
    exact: Option<PropertyOutcome>,
    rotating_family: Option<FamilyReport>,
    passes: bool,
}

fn check(input: &Path, theta: Option<&str>, strict: bool) -> Result<(CheckReport, bool)> {
    let loaded = load_input(input, strict)?;
    let (warnings, seed) = match &loaded {
        Input::Instance { warnings, .. } => (warnings.clone(), None),
        Input::Model(m) => (vec![], Some(m.seed())),
    };
    let base = match &loaded {
        Input::Instance { system, .. } => system,
        Input::Model(m) => m.system(),
    };
    let system = match theta {
        Some(t) => base.with_theta(rational::parse(t)?),
        None => base.clone(),
    };
    let axioms = check_axioms(&system, system.theta());
    let mut report = CheckReport {
        input: input.display().to_string(),
        seed,
        warnings,
        passes: axioms.passes(),
        axioms,
        ladder: None,
        calibration_error: None,
        properties: None,
        exact: None,
        rotating_family: None,
    };
    if let Input::Model(Model::Adversarial(a)) = &loaded {
        if let Some(params) = &a.rotation_params {
            let model = GraphProductModel::new_unrestricted(params.clone())?;
            let fam = RotatingFamily::new(&model).verify(&FamilyOptions::default());
            report.passes &= fam.passes();
            report.rotating_family = Some(fam);
        }
    }
    if report.axioms.passes() {
        let exact = DerivedMetrics::exact(&system);
        let sp = Space::new(&system, &exact);
        match calibrate_constants(&sp) {
            Ok(ladder) => {
                let props = check_properties(&sp, &ladder);
                report.passes &= props.passes();
                if let Input::Model(Model::Tree { segments, .. }) = &loaded {
                    let eq = check_exact_equality(&sp);
                    if segments.overlap == 0 {
                        report.passes &= eq.passes();
                    }
                    report.exact = Some(eq);
                }
                report.properties = Some(props);
                report.ladder = Some(ladder);
            }
            Err(e) => {
                report.passes = false;
                report.calibration_error = Some(e.to_string());
            }
        }
    }
    let ok = report.passes;
    Ok((report, ok))
}

fn calibrate(input: &Path, strict: bool) -> Result<ConstantLadder> {
    match load_input(input, strict)? {
        Input::Model(Model::GraphProduct(m)) => Ok(m.ladder().clone()),
        Input::Model(m) => calibrate_constants(&Space::new(m.system(), &DerivedMetrics::exact(m.system()))),
        Input::Instance { system, .. } => calibrate_constants(&Space::new(&system, &DerivedMetrics::exact(&system))),
    }
}

fn complex(input: &Path, coord: usize, k: &str, strict: bool) -> Result<String> {
    let k = rational::parse(k)?;
    let loaded = load_input(input, strict)?;
    let label = |sys: &CompositeSystem, p: usize| sys.id(p).to_string().replace(':', "_");
    let dot = |sp: &Space| {
        if coord == 0 || coord > sp.sys.m() {
            return Err(Error::InvalidInstance(format!("coordinate {coord} outside 1..={}", sp.sys.m())));
        }
        Ok(build_projection_complex(sp, coord, &k).to_dot(|p| label(sp.sys, p)))
    };
    match &loaded {
        Input::Model(Model::GraphProduct(m)) => dot(&m.space()),
        Input::Model(m) => dot(&Space::new(m.system(), &DerivedMetrics::exact(m.system()))),
        Input::Instance { system, .. } => dot(&Space::new(system, &DerivedMetrics::exact(system))),
    }
}

fn gen(kind: GenKind, seed: u64, params: Option<String>) -> Result<String> {
    let params: Option<serde_json::Value> = match params {
        Some(p) => Some(serde_json::from_str(&p).map_err(|e| Error::Parse(e.to_string()))?),
        None => None,
    };
    let kind = match kind {
        GenKind::TreeSegments => "tree-segments",
        GenKind::GraphProduct => "graph-product",
        GenKind::Adversarial => "adversarial",
    };
    let mut spec = serde_json::json!({ "kind": kind, "seed": seed });
    if let Some(p) = params {
        spec["params"] = p;
    }
    let spec = ModelSpec::from_json(&spec.to_string()).map_err(|e| Error::Parse(e.to_string()))?;
    serialize_system(gen_model(&spec)?.system()).map(|s| s + "\n")
}

#[derive(Serialize)]
struct WindmillReport {
    model: String,
    q: i64,
    elements: usize,
    ladder: ConstantLadder,
    family: FamilyReport,
    steps: usize,
    absorbed: bool,
    region_sizes: Vec<usize>,
    representatives: Vec<String>,
    presentation: PresentationDoc,
}

fn windmill_pipeline(
    model: &GraphProductModel,
    budget: usize,
    form: PresentationForm,
    word_budget: Option<usize>,
) -> Result<(WindmillReport, WindmillRun, bool)> {
    let fam = RotatingFamily::new(model);
    let family = fam.verify(&FamilyOptions::default());
    if !family.passes() {
        return Err(Error::Invariant(format!("rotating family fails on the truncation: {family:?}")));
    }
    let run = run_windmill(&fam, budget, &TreeOptions::default())?;
    let words = word_budget.unwrap_or(model.params().radius as usize);
    let doc = presentation(model, &run.windmill, form, words)?;
    let ok = doc.verified && doc.complete_within_radius && run.windmill.absorbed();
    let report = WindmillReport {
        model: format!("{model:?}"),
        q: model.q(),
        elements: model.system().len(),
        ladder: model.ladder().clone(),
        family,
        steps: run.trace.len(),
        absorbed: run.windmill.absorbed(),
        region_sizes: run.windmill.region_sizes(model),
        representatives: run.windmill.representatives.iter().map(|&p| model.label(model.coset(p))).collect(),
        presentation: doc,
    };
    Ok((report, run, ok))
}

fn read_word(model: &GraphProductModel, text: &str) -> Result<GroupWord> {
    let raw = GroupWord::parse(text, model.q())?;
    model.group().word(raw.syllables())
}

fn dispatch(cli: Cli, out: &mut CommandResult) -> Result<i32> {
    let emit = |out: &mut CommandResult, name: Option<&str>, text: String| -> Result<()> {
        match (&cli.out, name) {
            (Some(dir), Some(n)) => {
                std::fs::create_dir_all(dir)?;
                let p = dir.join(n);
                write_atomic(&p, &text)?;
                out.reports.push(p);
            }
            (Some(p), None) => {
                write_atomic(p, &text)?;
                out.reports.push(p.clone());
            }
            (None, _) => out.stdout.push_str(&text),
        }
        Ok(())
    };
    match &cli.command {
        Command::Check { input, theta } => {
            let (report, ok) = check(input, theta.as_deref(), cli.strict)?;
            emit(out, None, canonical_json(&report)?)?;
            Ok(i32::from(!ok))
        }
        Command::Calibrate { input } => {
            emit(out, None, canonical_json(&calibrate(input, cli.strict)?)?)?;
            Ok(0)
        }
        Command::Complex { input, coord, k } => {
            emit(out, None, complex(input, *coord, k, cli.strict)?)?;
            Ok(0)
        }
        Command::Gen { kind, seed, params, params_file } => {
            let params = match params_file {
                Some(p) => Some(std::fs::read_to_string(p)?),
                None => params.clone(),
            };
            emit(out, None, gen(*kind, *seed, params)?)?;
            Ok(0)
        }
        Command::Windmill { model, radius, budget, form, word_budget } => {
            let m = load_graph_product(model, *radius)?;
            let (report, run, ok) = windmill_pipeline(&m, *budget, (*form).into(), *word_budget)?;
            if cli.out.is_some() {
                emit(out, Some("trace.jsonl"), run.trace_jsonl())?;
                emit(out, Some("presentation.json"), canonical_json(&report.presentation)?)?;
                emit(out, Some("report.json"), canonical_json(&report)?)?;
            } else {
                emit(out, None, canonical_json(&report)?)?;
            }
            Ok(i32::from(!ok))
        }
        Command::Greendlinger { model, word, radius, start_coord } => {
            let m = load_graph_product(model, *radius)?;
            let w = read_word(&m, word)?;
            let opts = ShorteningOptions { start_coord: *start_coord, max_steps: None };
            let report = greendlinger(&RotatingFamily::new(&m), &w, &opts)?;
            emit(out, None, canonical_json(&report)?)?;
            Ok(0)
        }
        Command::Present { model, form, radius, budget, word_budget } => {
            let m = load_graph_product(model, *radius)?;
            let (report, _, ok) = windmill_pipeline(&m, *budget, (*form).into(), *word_budget)?;
            emit(out, None, canonical_json(&report.presentation)?)?;
            Ok(i32::from(!ok))
        }
        Command::Oracle { model, word } => {
            let m = load_graph_product(model, Some(0))?;
            let w = GroupWord::parse(word, m.q())?;
            m.group().validate(w.syllables())?;
            let v: OracleVerdict = membership_oracle(m.group(), m.q(), w.syllables());
            emit(out, None, canonical_json(&v)?)?;
            Ok(0)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("WINDMILL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // The global pool can only be configured once per process; later calls keep the first setting.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    configure_threads();
    let mut out = CommandResult::default();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            out.exit_code = if e.use_stderr() { 2 } else { 0 };
            if e.use_stderr() {
                out.stderr = text;
            } else {
                out.stdout = text;
            }
            return out;
        }
    };
    match dispatch(cli, &mut out) {
        Ok(code) => out.exit_code = code,
        Err(e) => {
            out.exit_code = e.exit_code();
            out.stderr = format!("error: {e}\n");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_command(["windmill", "frobnicate"]).exit_code, 2);
        assert_eq!(run_command(["windmill", "check", "x.json", "--bogus"]).exit_code, 2);
        let r = run_command(["windmill", "gen", "--kind", "tree-segments", "--params", "{}", "--params-file", "p.json"]);
        assert_eq!(r.exit_code, 2);
        assert_eq!(run_command(["windmill", "check", "/nonexistent.json"]).exit_code, 2);
        assert_eq!(run_command(["windmill", "--help"]).exit_code, 0);
    }

    #[test]
    fn gen_then_check_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tree.json");
        let r = run_command(["windmill", "gen", "--kind", "tree-segments", "--seed", "3", "--out", path.to_str().unwrap()]);
        assert_eq!(r.exit_code, 0, "{}", r.stderr);
        let r = run_command(["windmill", "check", path.to_str().unwrap()]);
        assert_eq!(r.exit_code, 0, "{}", r.stderr);
        assert!(r.stdout.contains("\"minimal_theta\""));
    }

    #[test]
    fn failing_checks_exit_one_and_windmill_writes_its_reports() {
        let dir = tempfile::tempdir().unwrap();
        let adv = dir.path().join("adv.json");
        std::fs::write(&adv, r#"{"kind": "adversarial", "params": {"adversarial": "behrstock-break"}}"#).unwrap();
        let r = run_command(["windmill", "check", adv.to_str().unwrap()]);
        assert_eq!(r.exit_code, 1, "{}", r.stderr);

        let spec = dir.path().join("fp2.json");
        std::fs::write(&spec, r#"{"kind": "graph-product", "params": {"m": 2, "radius": 3}}"#).unwrap();
        let out = dir.path().join("run");
        let r = run_command(["windmill", "windmill", "--model", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(r.exit_code, 0, "{}", r.stderr);
        assert_eq!(r.reports.len(), 3);
        let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
        assert_eq!(report["absorbed"], serde_json::Value::Bool(true));
        assert_eq!(report["presentation"]["relators"].as_array().unwrap().len(), 0);

        let r = run_command(["windmill", "oracle", "--model", spec.to_str().unwrap(), "--word", "a1^q a2"]);
        assert_eq!(r.exit_code, 0);
        assert!(r.stdout.contains("\"in_kernel\": false"));
    }
}
