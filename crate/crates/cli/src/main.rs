use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use deblur_cli::error::SolverContext;
use deblur_cli::experiment::{run_experiment, ExperimentSpec};
use deblur_cli::imagearg::{parse_image, parse_kernel};
use deblur_cli::output::{to_json, write_atomic, CsvTable};
use deblur_cli::reproduce::{reproduce, Status, CASES};
use deblur_cli::{HarnessError, Result};
use deblur_core::{
    blur, lw_deblur, make_circulant_matrix, rl_deblur, rl_regularized, svd, tsvd_deblur,
    BlurMatrix, ImageVec, Init, LwParams, RlParams, SolverConfig,
};

#[derive(Parser)]
#[command(
    name = "deblur",
    version,
    about = "One-dimensional cyclic blurring and deblurring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Blur an image with a cyclic kernel.
    Blur(BlurArgs),
    /// Restore a blurred image.
    Deblur(DeblurArgs),
    /// Singular values (and optionally vectors) of the blurring matrix.
    Svd(SvdArgs),
    /// Execute a JSON experiment spec.
    Run(RunArgs),
    /// Run the bundled reproduction suite.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct Common {
    /// 5bin, 3bin, identity or taps:OFF=W,...
    #[arg(long, default_value = "5bin")]
    kernel: String,
    /// Number of pixels (inferred from @file images).
    #[arg(long)]
    n: Option<usize>,
    /// Write here (.csv or .json); stdout JSON otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BlurArgs {
    #[command(flatten)]
    common: Common,
    /// delta:I, ramp:START:LEN, bgdelta:BG:I:BUMP, bgramp:BG:START:LEN:BUMP, uniform:V or @file
    #[arg(long)]
    image: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Rl,
    RlReg,
    Lw,
    Tsvd,
}

#[derive(Args)]
struct DeblurArgs {
    #[command(flatten)]
    common: Common,
    /// Blurred image, same syntax as `blur --image`.
    #[arg(long)]
    image: String,
    #[arg(long, value_enum, default_value = "rl")]
    method: MethodArg,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of singular vectors kept by tsvd.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    iters: usize,
    /// Stop when the ∞-norm change per iteration drops below this.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// uniform, blurred or an image descriptor.
    #[arg(long, default_value = "uniform")]
    init: String,
}

#[derive(Args)]
struct SvdArgs {
    #[arg(long, default_value = "5bin")]
    kernel: String,
    #[arg(long)]
    n: usize,
    /// Spectrum CSV (alpha,sigma); stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Singular vectors CSV (alpha,i,u,v).
    #[arg(long)]
    vectors: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    spec: PathBuf,
    /// Base directory for relative output paths (defaults to the spec's directory).
    #[arg(long)]
    base_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Case to run; repeatable. All cases when omitted.
    #[arg(long = "case")]
    cases: Vec<String>,
    #[arg(long, default_value = "reproduce-out")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::Blur(a) => cmd_blur(a),
        Command::Deblur(a) => cmd_deblur(a),
        Command::Svd(a) => cmd_svd(a),
        Command::Run(a) => cmd_run(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    }
}

fn matrix(kernel: &str, n: usize) -> Result<BlurMatrix> {
    let k = parse_kernel(kernel)?;
    make_circulant_matrix(&k, n)
        .map_err(|e| HarnessError::Usage(format!("--kernel {kernel} with n = {n}: {e}")))
}

fn emit_image(image: &ImageVec, out: Option<&Path>) -> Result<()> {
    let text = match out {
        Some(p) if p.extension().is_some_and(|e| e == "csv") => {
            let mut t = CsvTable::new(&["i", "value"]);
            for (i, &v) in image.iter().enumerate() {
                t.row(vec![i.into(), v.into()]);
            }
            t.finish()
        }
        _ => to_json(&image.as_slice())?,
    };
    match out {
        Some(p) => write_atomic(p, &text),
        None => print_stdout(&text),
    }
}

fn print_stdout(text: &str) -> Result<()> {
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| HarnessError::io("<stdout>", e))
}

fn cmd_blur(a: BlurArgs) -> Result<u8> {
    let f = parse_image(&a.image, a.common.n)?;
    let t = matrix(&a.common.kernel, f.len())?;
    let g = blur(&t, &f).context("blur")?;
    emit_image(&g, a.common.out.as_deref())?;
    Ok(0)
}

fn reject(flag: &str, present: bool, method: &str) -> Result<()> {
    if present {
        Err(HarnessError::Usage(format!(
            "--{flag} is not accepted by --method {method}"
        )))
    } else {
        Ok(())
    }
}

fn cmd_deblur(a: DeblurArgs) -> Result<u8> {
    let g = parse_image(&a.image, a.common.n)?;
    let n = g.len();
    let t = matrix(&a.common.kernel, n)?;
    let init = match a.init.as_str() {
        "uniform" => Init::Uniform,
        "blurred" => Init::Blurred,
        other => Init::Custom(parse_image(other, Some(n))?),
    };
    let cfg = SolverConfig::default()
        .with_max_iters(a.iters)
        .with_conv_tol(a.tol)
        .with_init(init)
        .without_trace();
    let restored = match a.method {
        MethodArg::Rl => {
            reject("lambda", a.lambda.is_some(), "rl")?;
            reject("beta", a.beta.is_some() || a.epsilon.is_some(), "rl")?;
            reject("m", a.m.is_some(), "rl")?;
            rl_deblur(&g, &t, &cfg).context("rl")?.restored
        }
        MethodArg::RlReg => {
            reject("beta", a.beta.is_some() || a.epsilon.is_some(), "rl-reg")?;
            reject("m", a.m.is_some(), "rl-reg")?;
            let lambda = a
                .lambda
                .ok_or_else(|| HarnessError::Usage("--method rl-reg needs --lambda".into()))?;
            let p = RlParams::new(lambda).map_err(|e| HarnessError::Usage(e.to_string()))?;
            rl_regularized(&g, &t, p, &cfg).context("rl-reg")?.restored
        }
        MethodArg::Lw => {
            reject("lambda", a.lambda.is_some(), "lw")?;
            reject("m", a.m.is_some(), "lw")?;
            let params = LwParams::new(a.beta.unwrap_or(1.0), a.epsilon.unwrap_or(0.0));
            lw_deblur(&g, &t, params, &cfg).context("lw")?.restored
        }
        MethodArg::Tsvd => {
            reject("lambda", a.lambda.is_some(), "tsvd")?;
            reject("beta", a.beta.is_some() || a.epsilon.is_some(), "tsvd")?;
            let m =
                a.m.ok_or_else(|| HarnessError::Usage("--method tsvd needs --m".into()))?;
            let factors = svd(&t).context("svd")?;
            tsvd_deblur(&g, &factors, m).context("tsvd")?
        }
    };
    emit_image(&restored, a.common.out.as_deref())?;
    Ok(0)
}

fn cmd_svd(a: SvdArgs) -> Result<u8> {
    let t = matrix(&a.kernel, a.n)?;
    let factors = svd(&t).context("svd")?;
    let spectrum = deblur_cli::experiment::spectrum_csv(&factors);
    match &a.out {
        Some(p) => write_atomic(p, &spectrum)?,
        None => print_stdout(&spectrum)?,
    }
    if let Some(p) = &a.vectors {
        let mut csv = CsvTable::new(&["alpha", "i", "u", "v"]);
        for alpha in 0..factors.n() {
            let (u, v) = (factors.u_col(alpha), factors.v_col(alpha));
            for i in 0..factors.n() {
                csv.row(vec![alpha.into(), i.into(), u[i].into(), v[i].into()]);
            }
        }
        write_atomic(p, &csv.finish())?;
    }
    Ok(0)
}

fn cmd_run(a: RunArgs) -> Result<u8> {
    let spec = ExperimentSpec::load(&a.spec)?;
    let base = a
        .base_dir
        .or_else(|| a.spec.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    let (outcome, written) = run_experiment(&spec, &base)?;
    let r = &outcome.report;
    println!(
        "{}: {} iterations, converged = {}, l2 error {:.6e}, max error {:.6e}",
        r.name, r.iterations, r.converged, r.quality.l2_error, r.quality.linf_error
    );
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn cmd_reproduce(a: ReproduceArgs) -> Result<u8> {
    let names: Vec<&str> = if a.cases.is_empty() {
        CASES.to_vec()
    } else {
        a.cases.iter().map(String::as_str).collect()
    };
    let reports = reproduce(&names)?;
    let (mut pass, mut fail, mut info) = (0, 0, 0);
    for r in &reports {
        r.write_to(&a.out_dir)?;
        for line in r.summary_lines() {
            println!("{line}");
        }
        for c in &r.checks {
            match c.status {
                Status::Pass => pass += 1,
                Status::Fail => fail += 1,
                Status::Info => info += 1,
            }
        }
    }
    println!(
        "{pass} passed, {fail} failed, {info} informational; artifacts in {}",
        a.out_dir.display()
    );
    Ok(if fail == 0 { 0 } else { 1 })
}
