//! Batch runner: loads a run configuration, executes the requested checks
//! on one scenario and writes every report to a single file.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use folia::scenarios::{self, Scenario, Trig};
use folia::verify::{self, Settings, Verdict, VerificationReport};
use folia::GeometryError;

/// One requested check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Check {
    Reeb,
    Main(usize),
    Leaf(usize),
    Pointwise,
    Codazzi,
    TraceIdentities,
    ClosedFormC,
    ClosedFormEinstein,
    Umbilical,
    DivergenceSelftest,
    Sigma2Image,
}

impl Check {
    /// Every check that applies to a scenario with leaf dimension `n`.
    pub fn all(n: usize, has_leaves: bool) -> Vec<Check> {
        let mut out = vec![Check::DivergenceSelftest, Check::Reeb];
        out.extend((0..n).map(Check::Main));
        if has_leaves {
            out.extend((0..n).map(Check::Leaf));
        }
        out.extend([
            Check::Pointwise,
            Check::Codazzi,
            Check::TraceIdentities,
            Check::ClosedFormC,
            Check::ClosedFormEinstein,
            Check::Umbilical,
            Check::Sigma2Image,
        ]);
        out
    }

    fn needs_scenario(self) -> bool {
        !matches!(self, Check::ClosedFormEinstein | Check::Umbilical)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Reeb => write!(f, "reeb"),
            Check::Main(r) => write!(f, "main:{r}"),
            Check::Leaf(r) => write!(f, "leaf:{r}"),
            Check::Pointwise => write!(f, "pointwise"),
            Check::Codazzi => write!(f, "codazzi"),
            Check::TraceIdentities => write!(f, "trace-identities"),
            Check::ClosedFormC => write!(f, "closed-form-c"),
            Check::ClosedFormEinstein => write!(f, "closed-form-einstein"),
            Check::Umbilical => write!(f, "umbilical"),
            Check::DivergenceSelftest => write!(f, "divergence-selftest"),
            Check::Sigma2Image => write!(f, "sigma2-image"),
        }
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let order = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| format!("check {s:?}: order {t:?} is not a non-negative integer"))
        };
        match s.split_once(':') {
            Some(("main", r)) => return Ok(Check::Main(order(r)?)),
            Some(("leaf", r)) => return Ok(Check::Leaf(order(r)?)),
            _ => {}
        }
        Ok(match s {
            "reeb" => Check::Reeb,
            "pointwise" => Check::Pointwise,
            "codazzi" => Check::Codazzi,
            "trace-identities" => Check::TraceIdentities,
            "closed-form-c" => Check::ClosedFormC,
            "closed-form-einstein" => Check::ClosedFormEinstein,
            "umbilical" => Check::Umbilical,
            "divergence-selftest" => Check::DivergenceSelftest,
            "sigma2-image" => Check::Sigma2Image,
            _ => return Err(format!("unknown check {s:?}")),
        })
    }
}

impl TryFrom<String> for Check {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Check> for String {
    fn from(c: Check) -> String {
        c.to_string()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Table,
    Structured,
}

/// Warp and rotation profiles replacing the catalog defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profiles {
    pub a: Option<Trig>,
    pub b: Option<Trig>,
    pub theta: Option<Trig>,
}

/// Parameters of the combinatorial corollary check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EinsteinParams {
    pub n: usize,
    pub c: f64,
    pub volume: f64,
}

impl Default for EinsteinParams {
    fn default() -> Self {
        EinsteinParams {
            n: 4,
            c: 1.0,
            volume: 1.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog name; may be omitted when only combinatorial checks run.
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub profiles: Option<Profiles>,
    /// Empty means every applicable check.
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub grid: Option<Vec<usize>>,
    /// Replaces the calibrated tolerance of integral checks.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Leaves for `leaf:r`; empty means every declared leaf.
    #[serde(default)]
    pub leaves: Vec<String>,
    /// Curvature constant for `closed-form-c` and `sigma2-image`.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub einstein: EinsteinParams,
    #[serde(default = "default_samples")]
    pub umbilical_samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Rerun integral checks on the doubled grid.
    #[serde(default)]
    pub convergence_gate: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_samples() -> usize {
    1000
}

/// Errors that are not verification outcomes.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Construction(GeometryError),
    Evaluation { check: String, source: GeometryError },
    Io(std::io::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Construction(e) => write!(f, "scenario construction failed: {e}"),
            RunError::Evaluation { check, source } => write!(f, "check {check} failed to evaluate: {source}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| {
            RunError::Config(format!("line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(RunError::Io)?;
        Self::from_json(&text).map_err(|e| match e {
            RunError::Config(m) => RunError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

/// Builds the configured scenario, applying profile overrides.
pub fn build_scenario(name: &str, profiles: Option<&Profiles>) -> Result<Scenario, RunError> {
    let Some(p) = profiles else {
        return scenarios::build(name).map_err(RunError::Construction);
    };
    let a = p.a.unwrap_or_else(Trig::default_a);
    let b = p.b.unwrap_or_else(Trig::default_b);
    let reject = |what: &str| {
        Err(RunError::Config(format!("scenario {name} takes no {what} profile")))
    };
    let built = match name {
        "warped_torus_3" | "warped_torus_4" => {
            if p.theta.is_some() {
                return reject("theta");
            }
            let m = if name == "warped_torus_3" { 3 } else { 4 };
            scenarios::build_warped_torus(m, a, b)
        }
        "warped_torus_4_umbilical" => {
            if p.b.is_some() || p.theta.is_some() {
                return reject("b or theta");
            }
            scenarios::build_warped_torus(4, a, a)
        }
        "warped_torus_3_riemannian" => {
            if p.b.is_some() || p.theta.is_some() {
                return reject("b or theta");
            }
            scenarios::build_warped_torus_riemannian(a)
        }
        "tilted_torus" => {
            if p.a.is_some() || p.b.is_some() {
                return reject("warp");
            }
            scenarios::build_tilted_torus(p.theta.unwrap_or_else(Trig::default_tilt))
        }
        other => return Err(RunError::Config(format!("scenario {other} takes no profiles"))),
    };
    built.map_err(RunError::Construction)
}

/// Counts of each verdict.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inadmissible: usize,
    pub precondition_violated: usize,
    pub diagnostic: usize,
}

impl Summary {
    pub fn of(reports: &[VerificationReport]) -> Self {
        let mut s = Summary::default();
        for r in reports {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Inadmissible => s.inadmissible += 1,
                Verdict::PreconditionViolated => s.precondition_violated += 1,
                Verdict::Diagnostic => s.diagnostic += 1,
            }
        }
        s
    }

    pub fn warnings(&self) -> usize {
        self.inadmissible + self.precondition_violated
    }
}

/// Everything one run produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Option<String>,
    pub checks: Vec<Check>,
    pub reports: Vec<VerificationReport>,
    pub summary: Summary,
}

impl RunReport {
    /// Exit status: 0 unless some check failed.
    pub fn exit_code(&self) -> u8 {
        if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn render(&self, format: Format, verbose: bool) -> String {
        match format {
            Format::Structured => self.to_json(),
            Format::Table => self.table(verbose),
        }
    }

    /// Fixed-width text table, one row per report.
    pub fn table(&self, verbose: bool) -> String {
        let mut out = String::new();
        if let Some(s) = &self.scenario {
            out.push_str(&format!("scenario: {s}\n"));
        }
        out.push_str(&format!(
            "{:<28} {:>14} {:>10} {:>10} {:<22}\n",
            "formula", "residual", "tolerance", "admiss.", "verdict"
        ));
        for r in &self.reports {
            let label = match r.grid.as_ref().and_then(|g| g.backend.strip_prefix("leaf ")) {
                Some(leaf) => format!("{} [{leaf}]", r.formula),
                None => r.formula.clone(),
            };
            out.push_str(&format!(
                "{:<28} {:>14.6e} {:>10.1e} {:>10.2e} {:<22}\n",
                label,
                r.residual,
                r.tolerance,
                r.admissibility_max,
                verdict_name(r.verdict)
            ));
            if verbose {
                for t in &r.terms {
                    out.push_str(&format!("    {:<36} {:>+18.10e}\n", t.name, t.value));
                }
                for n in &r.notes {
                    out.push_str(&format!("    note: {n}\n"));
                }
            }
        }
        let s = &self.summary;
        out.push_str(&format!(
            "pass {} fail {} inadmissible {} precondition_violated {} diagnostic {}\n",
            s.pass, s.fail, s.inadmissible, s.precondition_violated, s.diagnostic
        ));
        out
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inadmissible => "inadmissible",
        Verdict::PreconditionViolated => "precondition_violated",
        Verdict::Diagnostic => "diagnostic",
    }
}

fn eval(check: Check, r: folia::Result<VerificationReport>) -> Result<VerificationReport, RunError> {
    r.map_err(|source| RunError::Evaluation {
        check: check.to_string(),
        source,
    })
}

fn run_integral<F>(config: &RunConfig, settings: &Settings, check: Check, f: F) -> Result<VerificationReport, RunError>
where
    F: Fn(&Settings) -> folia::Result<VerificationReport>,
{
    if config.convergence_gate {
        eval(check, verify::with_convergence_gate(settings, f))
    } else {
        eval(check, f(settings))
    }
}

/// Executes every configured check; verification failures are reported in
/// the result, everything else is an error.
pub fn execute(config: &RunConfig) -> Result<RunReport, RunError> {
    if let Some(t) = config.tolerance {
        if !(t.is_finite() && t > 0.0) {
            return Err(RunError::Config(format!("tolerance must be positive, got {t}")));
        }
    }
    let scenario = match &config.scenario {
        Some(name) => Some(build_scenario(name, config.profiles.as_ref())?),
        None => None,
    };
    let checks = if config.checks.is_empty() {
        match &scenario {
            Some(s) => Check::all(s.leaf_dim(), !s.leaves.is_empty()),
            None => vec![Check::ClosedFormEinstein, Check::Umbilical],
        }
    } else {
        config.checks.clone()
    };
    let mut reports = Vec::new();
    for &check in &checks {
        if let Some(s) = &scenario {
            validate(check, s)?;
        }
        match (&scenario, check.needs_scenario()) {
            (None, true) => {
                return Err(RunError::Config(format!("check {check} needs a scenario")));
            }
            (Some(s), _) => reports.extend(run_check(config, s, check)?),
            (None, false) => reports.extend(run_combinatorial(config, check)?),
        }
    }
    let summary = Summary::of(&reports);
    Ok(RunReport {
        scenario: scenario.map(|s| s.name),
        checks,
        reports,
        summary,
    })
}

fn validate(check: Check, s: &Scenario) -> Result<(), RunError> {
    let n = s.leaf_dim();
    match check {
        Check::Main(r) | Check::Leaf(r) if r + 1 > n => Err(RunError::Config(format!(
            "check {check}: order must lie in 0..={} for scenario {}",
            n - 1,
            s.name
        ))),
        _ => Ok(()),
    }
}

fn run_combinatorial(config: &RunConfig, check: Check) -> Result<Vec<VerificationReport>, RunError> {
    Ok(match check {
        Check::ClosedFormEinstein => {
            let e = &config.einstein;
            vec![
                eval(check, verify::verify_closed_form_einstein(e.n, e.c, e.volume))?,
                eval(check, verify::verify_closed_form_suite(10, e.volume))?,
            ]
        }
        Check::Umbilical => vec![eval(
            check,
            verify::verify_umbilical_suite(config.umbilical_samples, config.seed),
        )?],
        _ => unreachable!("scenario checks are dispatched by run_check"),
    })
}

fn run_check(config: &RunConfig, s: &Scenario, check: Check) -> Result<Vec<VerificationReport>, RunError> {
    let mut settings = Settings::new(s, config.grid.as_deref()).map_err(|e| RunError::Config(e.to_string()))?;
    settings.tolerance = config.tolerance;
    let c = config.c.or(s.flags.pcurv_c).unwrap_or(0.0);
    Ok(match check {
        Check::Reeb => vec![run_integral(config, &settings, check, |st| verify::verify_reeb(s, st))?],
        Check::Main(r) => vec![run_integral(config, &settings, check, |st| verify::verify_main(s, r, st))?],
        Check::Leaf(r) => {
            let names: Vec<String> = if config.leaves.is_empty() {
                s.leaves.iter().map(|l| l.name.clone()).collect()
            } else {
                config.leaves.clone()
            };
            if names.is_empty() {
                return Err(RunError::Evaluation {
                    check: check.to_string(),
                    source: GeometryError::UnsupportedLeaf(format!("scenario {} declares no closed leaves", s.name)),
                });
            }
            let mut out = Vec::new();
            for leaf in names {
                let mut rep = run_integral(config, &settings, check, |st| verify::verify_leaf(s, r, &leaf, st))?;
                rep.notes.insert(0, format!("leaf {leaf}"));
                out.push(rep);
            }
            out
        }
        Check::Pointwise => eval_all(check, verify::verify_pointwise(s, &settings))?,
        Check::Codazzi => vec![eval(check, verify::verify_codazzi(s, &settings))?],
        Check::TraceIdentities => vec![eval(check, verify::verify_trace_identities(s, &settings))?],
        Check::ClosedFormC => {
            let mut out = vec![run_integral(config, &settings, check, |st| verify::verify_closed_form_c(s, c, st))?];
            out.push(eval(check, verify::verify_closed_form_suite(10, 1.0))?);
            out
        }
        Check::DivergenceSelftest => {
            let field = verify::self_test_field(s);
            let tol = config.tolerance.unwrap_or(folia::tolerances::DIFFERENTIAL);
            vec![
                eval(check, verify::verify_divergence_theorem(s, &field, &settings.grid, tol))?,
                run_integral(config, &settings, check, |st| verify::verify_sigma1_normal(s, st))?,
            ]
        }
        Check::Sigma2Image => vec![eval(check, verify::sigma2_image_diagnostic(s, c, &settings))?],
        Check::ClosedFormEinstein | Check::Umbilical => run_combinatorial(config, check)?,
    })
}

fn eval_all(check: Check, r: folia::Result<Vec<VerificationReport>>) -> Result<Vec<VerificationReport>, RunError> {
    r.map_err(|source| RunError::Evaluation {
        check: check.to_string(),
        source,
    })
}

/// Writes `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("report");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Runs a configuration and writes its report file when an output path is
/// set. Returns the report and the exit code.
pub fn run(config: &RunConfig, verbose: bool) -> Result<(RunReport, u8), RunError> {
    let report = execute(config)?;
    if let Some(path) = &config.output {
        write_atomic(path, &report.render(config.format, verbose)).map_err(RunError::Io)?;
    }
    let code = report.exit_code();
    Ok((report, code))
}

/// Sorted catalog listing.
pub fn list_scenarios() -> Result<Vec<scenarios::CatalogEntry>, RunError> {
    scenarios::catalog().map_err(RunError::Construction)
}

/// Exit status for errors that are not verification outcomes.
pub const EXIT_ERROR: u8 = 2;
