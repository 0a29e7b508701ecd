//! Declarative blur → deblur experiments.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use deblur_core::{
    blur, decompose, generate_image, lw_deblur, make_circulant_matrix, make_kernel_3bin,
    make_kernel_5bin, null_space_ratio, quality_report, rl_deblur, rl_regularized, svd,
    tsvd_deblur, BasisSide, BlurKernel, BlurMatrix, DegenerateGroup, Generator, ImageVec, Init,
    LwParams, QualityReport, RlParams, SolverConfig, SolverRun, SvdFactorization, TraceRow,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result, SolverContext};
use crate::output::{to_json, write_atomic, Cell, CsvTable};

/// Null-space tolerance used for reports.
pub const REPORT_NULL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuiltinKernel {
    #[serde(rename = "3bin")]
    ThreeBin,
    #[serde(rename = "5bin")]
    FiveBin,
}

/// Exactly one of `builtin` or `taps`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<BuiltinKernel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taps: Option<BlurKernel>,
}

impl KernelSpec {
    pub fn builtin(kind: BuiltinKernel) -> Self {
        Self {
            builtin: Some(kind),
            taps: None,
        }
    }

    pub fn taps(kernel: BlurKernel) -> Self {
        Self {
            builtin: None,
            taps: Some(kernel),
        }
    }

    pub fn resolve(&self) -> Result<BlurKernel> {
        match (&self.builtin, &self.taps) {
            (Some(BuiltinKernel::ThreeBin), None) => Ok(make_kernel_3bin()),
            (Some(BuiltinKernel::FiveBin), None) => Ok(make_kernel_5bin()),
            (None, Some(k)) => Ok(k.clone()),
            _ => Err(HarnessError::config(
                "kernel",
                "give exactly one of `builtin` or `taps`",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "rl")]
    Rl,
    #[serde(rename = "rl-reg")]
    RlReg,
    #[serde(rename = "lw")]
    Lw,
    #[serde(rename = "tsvd")]
    Tsvd,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rl => "rl",
            Method::RlReg => "rl-reg",
            Method::Lw => "lw",
            Method::Tsvd => "tsvd",
        }
    }

    pub fn is_iterative(self) -> bool {
        self != Method::Tsvd
    }
}

/// Method parameters; which fields are allowed depends on the method.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Restored,
    Trace,
    Spectrum,
    Coefficients,
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub target: Target,
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub n: usize,
    pub kernel: KernelSpec,
    pub original: Generator,
    pub method: Method,
    #[serde(default)]
    pub params: MethodParams,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| HarnessError::Json {
            context: context.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    /// Checks field consistency; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }

    fn prepare(&self) -> Result<Prepared> {
        if self.name.trim().is_empty() {
            return Err(HarnessError::config("name", "must not be empty"));
        }
        if self.n == 0 {
            return Err(HarnessError::config("n", "must be positive"));
        }
        let kernel = self.kernel.resolve()?;
        let t = make_circulant_matrix(&kernel, self.n)
            .map_err(|e| HarnessError::config("kernel", e.to_string()))?;
        let original = generate_image(&self.original, self.n)
            .map_err(|e| HarnessError::config("original", e.to_string()))?;
        let factors = svd(&t).context("factorizing the blurring matrix")?;

        let p = &self.params;
        let forbid = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(HarnessError::config(
                    format!("params.{field}"),
                    format!("not accepted by method `{}`", self.method.name()),
                ))
            } else {
                Ok(())
            }
        };
        let solve = match self.method {
            Method::Rl => {
                forbid("lambda", p.lambda.is_some())?;
                forbid("beta", p.beta.is_some())?;
                forbid("epsilon", p.epsilon.is_some())?;
                forbid("m", p.m.is_some())?;
                Solve::Rl
            }
            Method::RlReg => {
                forbid("beta", p.beta.is_some())?;
                forbid("epsilon", p.epsilon.is_some())?;
                forbid("m", p.m.is_some())?;
                let lambda = p.lambda.ok_or_else(|| {
                    HarnessError::config("params.lambda", "required by method `rl-reg`")
                })?;
                let params = RlParams::new(lambda)
                    .map_err(|e| HarnessError::config("params.lambda", e.to_string()))?;
                Solve::RlReg(params)
            }
            Method::Lw => {
                forbid("lambda", p.lambda.is_some())?;
                forbid("m", p.m.is_some())?;
                let beta = p.beta.unwrap_or(1.0);
                let bound = 2.0 / factors.sigma_max().powi(2);
                if !(beta > 0.0 && beta < bound) {
                    return Err(HarnessError::config(
                        "params.beta",
                        format!("{beta} outside (0, {bound})"),
                    ));
                }
                let epsilon = p.epsilon.unwrap_or(0.0);
                if !(epsilon >= 0.0 && epsilon.is_finite()) {
                    return Err(HarnessError::config(
                        "params.epsilon",
                        format!("{epsilon} must be >= 0"),
                    ));
                }
                Solve::Lw(LwParams::new(beta, epsilon).with_sigma_max(factors.sigma_max()))
            }
            Method::Tsvd => {
                forbid("lambda", p.lambda.is_some())?;
                forbid("beta", p.beta.is_some())?;
                forbid("epsilon", p.epsilon.is_some())?;
                let m = p
                    .m
                    .ok_or_else(|| HarnessError::config("params.m", "required by method `tsvd`"))?;
                if m == 0 || m > self.n {
                    return Err(HarnessError::config(
                        "params.m",
                        format!("{m} outside [1, {}]", self.n),
                    ));
                }
                Solve::Tsvd(m)
            }
        };

        if self.method.is_iterative() {
            self.solver
                .validate()
                .map_err(|e| HarnessError::config("solver", e.to_string()))?;
            if let Init::Custom(f0) = &self.solver.init {
                if f0.len() != self.n {
                    return Err(HarnessError::config(
                        "solver.init",
                        format!("custom init has {} pixels, expected {}", f0.len(), self.n),
                    ));
                }
            }
        }

        let mut seen = HashSet::new();
        for (i, out) in self.outputs.iter().enumerate() {
            if out.path.as_os_str().is_empty() {
                return Err(HarnessError::config(
                    format!("outputs[{i}].path"),
                    "must not be empty",
                ));
            }
            if !seen.insert(out.path.clone()) {
                return Err(HarnessError::config(
                    format!("outputs[{i}].path"),
                    format!("{} is written twice", out.path.display()),
                ));
            }
            if out.target == Target::Trace && !self.method.is_iterative() {
                return Err(HarnessError::config(
                    format!("outputs[{i}].target"),
                    "trace requires an iterative method",
                ));
            }
            if out.target == Target::Trace && !self.solver.record_trace {
                return Err(HarnessError::config(
                    format!("outputs[{i}].target"),
                    "trace requested but solver.record_trace is false",
                ));
            }
        }

        Ok(Prepared {
            t,
            original,
            factors,
            solve,
        })
    }
}

enum Solve {
    Rl,
    RlReg(RlParams),
    Lw(LwParams),
    Tsvd(usize),
}

struct Prepared {
    t: BlurMatrix,
    original: ImageVec,
    factors: SvdFactorization,
    solve: Solve,
}

/// Summary written by the `report` target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub method: Method,
    pub iterations: usize,
    pub converged: bool,
    pub quality: QualityReport,
    pub null_space_ratio: Option<f64>,
}

/// Pixel columns written by the `restored` target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestoredRecord {
    pub original: Vec<f64>,
    pub blurred: Vec<f64>,
    pub restored: Vec<f64>,
}

/// The `spectrum` target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub sigma: Vec<f64>,
    pub groups: Vec<DegenerateGroup>,
}

/// One row of the `coefficients` target: right-singular-basis coefficients at iteration `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub k: usize,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub original: ImageVec,
    pub blurred: ImageVec,
    pub restored: ImageVec,
    /// Absent for truncated SVD.
    pub run: Option<SolverRun>,
    pub svd: SvdFactorization,
    pub report: ExperimentReport,
}

/// Runs the experiment without writing any files.
pub fn execute(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let Prepared {
        t,
        original,
        factors,
        solve,
    } = spec.prepare()?;
    let blurred = blur(&t, &original).context("blurring")?;
    let ctx = format!("{} ({})", spec.name, spec.method.name());
    let (restored, run) = match solve {
        Solve::Rl => {
            let run = rl_deblur(&blurred, &t, &spec.solver).context(ctx)?;
            (run.restored.clone(), Some(run))
        }
        Solve::RlReg(p) => {
            let run = rl_regularized(&blurred, &t, p, &spec.solver).context(ctx)?;
            (run.restored.clone(), Some(run))
        }
        Solve::Lw(p) => {
            let run = lw_deblur(&blurred, &t, p, &spec.solver).context(ctx)?;
            (run.restored.clone(), Some(run))
        }
        Solve::Tsvd(m) => (tsvd_deblur(&blurred, &factors, m).context(ctx)?, None),
    };
    let quality = quality_report(&restored, &original, &factors, REPORT_NULL_TOL)
        .context("quality report")?;
    let ratio = null_space_ratio(&restored, &original, &factors, REPORT_NULL_TOL)
        .context("null-space ratio")?;
    let report = ExperimentReport {
        name: spec.name.clone(),
        method: spec.method,
        iterations: run.as_ref().map_or(0, |r| r.iterations_done),
        converged: run.as_ref().is_none_or(|r| r.converged),
        quality,
        null_space_ratio: ratio,
    };
    Ok(ExperimentOutcome {
        original,
        blurred,
        restored,
        run,
        svd: factors,
        report,
    })
}

/// Renders one output target.
pub fn render(outcome: &ExperimentOutcome, target: Target, format: Format) -> Result<String> {
    match (target, format) {
        (Target::Restored, Format::Csv) => {
            let mut t = CsvTable::new(&["i", "F", "g", "f"]);
            for i in 0..outcome.restored.len() {
                t.row(vec![
                    i.into(),
                    outcome.original[i].into(),
                    outcome.blurred[i].into(),
                    outcome.restored[i].into(),
                ]);
            }
            Ok(t.finish())
        }
        (Target::Restored, Format::Json) => to_json(&RestoredRecord {
            original: outcome.original.to_vec(),
            blurred: outcome.blurred.to_vec(),
            restored: outcome.restored.to_vec(),
        }),
        (Target::Trace, format) => {
            let trace = trace_rows(outcome)?;
            match format {
                Format::Json => to_json(&trace),
                Format::Csv => {
                    let mut t = CsvTable::new(&["k", "i", "value"]);
                    for row in trace {
                        for (i, &v) in row.values.iter().enumerate() {
                            t.row(vec![row.iteration.into(), i.into(), v.into()]);
                        }
                    }
                    Ok(t.finish())
                }
            }
        }
        (Target::Spectrum, Format::Csv) => Ok(spectrum_csv(&outcome.svd)),
        (Target::Spectrum, Format::Json) => to_json(&SpectrumRecord {
            sigma: outcome.svd.sigma.clone(),
            groups: outcome.svd.degenerate_groups(),
        }),
        (Target::Coefficients, format) => {
            let rows = coefficient_rows(outcome)?;
            match format {
                Format::Json => to_json(&rows),
                Format::Csv => {
                    let mut t = CsvTable::new(&["k", "alpha", "value"]);
                    for row in rows {
                        for (alpha, &v) in row.coefficients.iter().enumerate() {
                            t.row(vec![row.k.into(), alpha.into(), v.into()]);
                        }
                    }
                    Ok(t.finish())
                }
            }
        }
        (Target::Report, Format::Json) => to_json(&outcome.report),
        (Target::Report, Format::Csv) => {
            let r = &outcome.report;
            let q = &r.quality;
            let mut t = CsvTable::new(&["metric", "value"]);
            t.row(vec!["iterations".into(), r.iterations.into()]);
            t.row(vec![
                "converged".into(),
                Cell::Text(r.converged.to_string()),
            ]);
            t.row(vec!["l2_error".into(), q.l2_error.into()]);
            t.row(vec!["linf_error".into(), q.linf_error.into()]);
            t.row(vec!["nullspace_error".into(), q.nullspace_error.into()]);
            t.row(vec!["rowspace_error".into(), q.rowspace_error.into()]);
            t.row(vec!["negativity".into(), q.negativity.into()]);
            t.row(vec!["null_space_ratio".into(), r.null_space_ratio.into()]);
            Ok(t.finish())
        }
    }
}

pub fn spectrum_csv(factors: &SvdFactorization) -> String {
    let mut t = CsvTable::new(&["alpha", "sigma"]);
    for (alpha, &s) in factors.sigma.iter().enumerate() {
        t.row(vec![alpha.into(), s.into()]);
    }
    t.finish()
}

fn trace_rows(outcome: &ExperimentOutcome) -> Result<&[TraceRow]> {
    match &outcome.run {
        Some(run) if run.has_trace() => Ok(&run.trace),
        _ => Err(HarnessError::config("outputs", "no trace was recorded")),
    }
}

fn coefficient_rows(outcome: &ExperimentOutcome) -> Result<Vec<CoefficientRow>> {
    let images: Vec<(usize, ImageVec)> = match &outcome.run {
        Some(run) if run.has_trace() => run
            .trace
            .iter()
            .map(|r| {
                Ok((
                    r.iteration,
                    ImageVec::new(r.values.clone()).context("trace row")?,
                ))
            })
            .collect::<Result<_>>()?,
        Some(run) => vec![(run.iterations_done, run.restored.clone())],
        None => vec![(0, outcome.restored.clone())],
    };
    images
        .into_iter()
        .map(|(k, f)| {
            Ok(CoefficientRow {
                k,
                coefficients: decompose(&f, &outcome.svd, BasisSide::Right)
                    .context("coefficients")?
                    .coeffs,
            })
        })
        .collect()
}

/// Runs `spec` and writes its outputs. Relative output paths resolve against `base_dir`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    base_dir: &Path,
) -> Result<(ExperimentOutcome, Vec<PathBuf>)> {
    let outcome = execute(spec)?;
    let mut written = Vec::with_capacity(spec.outputs.len());
    for out in &spec.outputs {
        let path = base_dir.join(&out.path);
        if path.is_dir() {
            return Err(HarnessError::config(
                "outputs.path",
                format!("{} is a directory", path.display()),
            ));
        }
        write_atomic(&path, &render(&outcome, out.target, out.format)?)?;
        written.push(path);
    }
    Ok((outcome, written))
}
