//! Command-line front end.
//!
//! [`run`] parses arguments, resolves the configuration (file first, then
//! flag overrides), runs one command and writes its report. It returns the
//! process exit code instead of exiting so the whole path is testable
//! in-process.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 numeric or I/O failure,
//! 4 optimiser did not converge, 5 channel validation failed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::channel::{analyze, validate_channel, ChannelDiagnostics};
use crate::extended_real;
use crate::lambda::{channel_map, LambdaParams};
use crate::sweep::{
    self, figure_preset, maximize_ic, Axis, FigureId, FreeParam, InputState, Optimum, Param,
    SweepError, SweepResult, SweepSpec, DEFAULT_FIGURE_POINTS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

/// Environment variable capping the sweep worker count (0 or unset = auto).
pub const THREADS_ENV: &str = "LAMBDA_CAPACITY_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("optimizer did not converge")]
    NoConvergence,
    #[error("channel validation failed")]
    Validation,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
            CliError::NoConvergence => EXIT_NO_CONVERGENCE,
            CliError::Validation => EXIT_VALIDATION,
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::InvalidSpec(_)
            | SweepError::UnknownFigure(_)
            | SweepError::UnknownParameter(_)
            | SweepError::InvalidStateAtPoint { .. }
            | SweepError::Lambda(crate::lambda::LambdaError::InvalidAngle { .. })
            | SweepError::Lambda(crate::lambda::LambdaError::InvalidParameter { .. }) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// I_c, S_out, S_e and both spectra at one parameter point
    Compute,
    /// Evaluate I_c over a 1- or 2-axis grid
    Sweep,
    /// Evaluate one of the preset figure grids
    Figure,
    /// Maximise I_c over free parameters
    Optimize,
    /// Check trace preservation, Hermiticity pairing and Choi positivity
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub free: Vec<FreeParam>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    pub id: FigureId,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    DEFAULT_FIGURE_POINTS
}

/// Everything one invocation needs; the on-disk config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub params: LambdaParams,
    #[serde(default)]
    pub input_state: InputState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            params: LambdaParams::default(),
            input_state: InputState::default(),
            sweep: None,
            optimize: None,
            figure: None,
            output_path: None,
            format: OutputFormat::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks the parameters and that the command's section is present.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate().map_err(|e| match e.parameter() {
            Some(key) => CliError::Config(format!("params.{key}: {e}")),
            None => CliError::Config(e.to_string()),
        })?;
        if self.command != Command::Figure {
            self.input_state
                .check()
                .map_err(|e| CliError::Config(format!("input_state: {e}")))?;
        }
        match self.command {
            Command::Sweep => {
                if self.sweep.as_ref().is_none_or(|s| s.axes.is_empty()) {
                    return Err(CliError::Config("sweep: no axes given".into()));
                }
            }
            Command::Optimize => {
                if self.optimize.as_ref().is_none_or(|o| o.free.is_empty()) {
                    return Err(CliError::Config(
                        "optimize: no free parameters given".into(),
                    ));
                }
            }
            Command::Figure => {
                if self.figure.is_none() {
                    return Err(CliError::Config("figure: no figure id given".into()));
                }
            }
            Command::Compute | Command::Validate => {}
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lambda-capacity",
    version,
    about = "Coherent information of the Lambda-system to photon-field channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Total pulse area (accepts e.g. `pi`, `pi/2`, `2pi`)
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Field distribution angle in [0, pi/2]
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    chi: Option<f64>,
    /// Relative pulse phase
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Dimensionless decay time, or `inf`
    #[arg(long = "gamma-t", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    gamma_t: Option<f64>,
    /// Decay asymmetry gamma23/gamma13
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    asym: Option<f64>,
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    rho11: Option<f64>,
    #[arg(long = "re-rho12", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    re_rho12: Option<f64>,
    #[arg(long = "im-rho12", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    im_rho12: Option<f64>,
    /// Figure preset: fig1a, fig1b, fig2a or fig2b
    #[arg(long, global = true)]
    figure: Option<String>,
    /// Grid points per axis for figure presets
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Sweep axis `name:start:stop:points` (repeatable, at most two)
    #[arg(long = "axis", global = true, value_parser = parse_axis, allow_hyphen_values = true)]
    axes: Vec<Axis>,
    /// Free parameter `name:lower:upper` (repeatable)
    #[arg(long = "free", global = true, value_parser = parse_free, allow_hyphen_values = true)]
    free: Vec<FreeParam>,
    /// Print the resolved configuration as JSON and exit
    #[arg(long = "dump-config", global = true)]
    dump_config: bool,
    /// Scale s_11 by (1 - x) before validating (test hook)
    #[arg(long = "inject-trace-defect", global = true, hide = true, value_parser = parse_real)]
    inject_trace_defect: Option<f64>,
}

/// Parses a real number, `inf`, or a multiple/fraction of `pi` such as
/// `pi`, `2pi`, `-pi/2`, `0.5*pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Some(v) = extended_real::parse(&t) {
        return Ok(v);
    }
    let err = || format!("'{s}' is not a number");
    let (head, divisor) = match t.split_once('/') {
        Some((h, d)) => (h.to_string(), d.trim().parse::<f64>().map_err(|_| err())?),
        None => (t.clone(), 1.0),
    };
    let coeff = head.strip_suffix("pi").ok_or_else(err)?;
    let coeff = coeff.trim().trim_end_matches('*').trim();
    let k = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| err())?,
    };
    let v = k * std::f64::consts::PI / divisor;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err())
    }
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, start, stop, points] = parts.as_slice() else {
        return Err(format!("axis '{s}' must look like name:start:stop:points"));
    };
    Ok(Axis::new(
        name.parse::<Param>().map_err(|e| e.to_string())?,
        parse_real(start)?,
        parse_real(stop)?,
        points
            .parse()
            .map_err(|_| format!("'{points}' is not a point count"))?,
    ))
}

fn parse_free(s: &str) -> Result<FreeParam, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, lower, upper] = parts.as_slice() else {
        return Err(format!(
            "free parameter '{s}' must look like name:lower:upper"
        ));
    };
    Ok(FreeParam::new(
        name.parse::<Param>().map_err(|e| e.to_string())?,
        parse_real(lower)?,
        parse_real(upper)?,
    ))
}

/// Fixed six-decimal rendering used for every reported number.
pub fn fmt6(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v.is_nan() {
        return "nan".into();
    }
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn fmt_sci(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.5e}")
    } else {
        fmt6(v)
    }
}

/// JSON value for a reported number, rounded to six decimals.
fn json_number(v: f64) -> Value {
    if v.is_finite() {
        let rounded: f64 = fmt6(v).parse().expect("formatted float parses");
        json!(rounded)
    } else {
        json!(fmt6(v))
    }
}

fn resolve(cli: Cli) -> Result<(RunConfig, bool, Option<f64>), CliError> {
    let o = cli.opts;
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(cli.command),
    };
    cfg.command = cli.command;
    if let Some(v) = o.theta {
        cfg.params.theta = v;
    }
    if let Some(v) = o.chi {
        cfg.params.chi = v;
    }
    if let Some(v) = o.phi {
        cfg.params.phi = v;
    }
    if let Some(v) = o.gamma_t {
        cfg.params.gamma_t = v;
    }
    if let Some(v) = o.asym {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::Config(format!(
                "asym: {v} must be finite and non-negative"
            )));
        }
        cfg.params.set_asymmetry(v);
    }
    if let Some(v) = o.rho11 {
        cfg.input_state.rho11 = v;
    }
    if let Some(v) = o.re_rho12 {
        cfg.input_state.re_rho12 = v;
    }
    if let Some(v) = o.im_rho12 {
        cfg.input_state.im_rho12 = v;
    }
    if let Some(id) = &o.figure {
        let id: FigureId = id
            .parse()
            .map_err(|e: SweepError| CliError::Config(e.to_string()))?;
        cfg.figure = Some(FigureSection {
            id,
            points: cfg
                .figure
                .as_ref()
                .map_or(DEFAULT_FIGURE_POINTS, |f| f.points),
        });
    }
    if let (Some(points), Some(fig)) = (o.points, cfg.figure.as_mut()) {
        fig.points = points;
    }
    if !o.axes.is_empty() {
        cfg.sweep = Some(SweepSection { axes: o.axes });
    }
    if !o.free.is_empty() {
        cfg.optimize = Some(OptimizeSection { free: o.free });
    }
    if let Some(path) = o.out {
        cfg.output_path = Some(path);
    }
    if let Some(format) = o.format {
        cfg.format = format;
    }
    Ok((cfg, o.dump_config, o.inject_trace_defect))
}

fn thread_cap() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}='{v}' is not a thread count"))),
        Err(_) => Ok(0),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Reports go to `stdout` unless an output path is
/// configured; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "lambda-capacity: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (cfg, dump, defect) = resolve(cli)?;
    if dump {
        let text = cfg.to_json() + "\n";
        return emit(&text, None, stdout);
    }
    cfg.validate()?;
    let outcome = match cfg.command {
        Command::Compute => run_compute(&cfg).map(|r| (r, Ok(()))),
        Command::Sweep => run_sweep(&cfg).map(|r| (r, Ok(()))),
        Command::Figure => run_figure(&cfg).map(|r| (r, Ok(()))),
        Command::Optimize => run_optimize(&cfg),
        Command::Validate => run_validate(&cfg, defect),
    };
    let (report, status) = outcome?;
    emit(&report, cfg.output_path.as_deref(), stdout)?;
    status
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Single-point report: I_c, S_out, S_e and both spectra.
pub fn run_compute(cfg: &RunConfig) -> Result<String, CliError> {
    let rho = cfg.input_state.density().map_err(CliError::Config)?;
    let map = channel_map(&cfg.params).map_err(|e| CliError::Config(e.to_string()))?;
    let info = analyze(&map, &rho).map_err(|e| CliError::Numeric(e.to_string()))?;
    let join = |v: &[f64]| v.iter().map(|x| fmt6(*x)).collect::<Vec<_>>().join(" ");
    Ok(match cfg.format {
        OutputFormat::Csv => format!(
            "Ic {}\nS_out {}\nS_e {}\nrho_out_spectrum {}\nrho_alpha_spectrum {}\n",
            fmt6(info.coherent_information),
            fmt6(info.output_entropy),
            fmt6(info.entropy_exchange),
            join(&info.output_spectrum),
            join(&info.joint_spectrum),
        ),
        OutputFormat::Json => {
            let v = json!({
                "Ic": json_number(info.coherent_information),
                "S_out": json_number(info.output_entropy),
                "S_e": json_number(info.entropy_exchange),
                "rho_out_spectrum": info.output_spectrum.iter().map(|x| json_number(*x)).collect::<Vec<_>>(),
                "rho_alpha_spectrum": info.joint_spectrum.iter().map(|x| json_number(*x)).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    })
}

pub fn run_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let axes = cfg
        .sweep
        .as_ref()
        .map(|s| s.axes.clone())
        .ok_or_else(|| CliError::Config("sweep: no axes given".into()))?;
    let spec = SweepSpec {
        axes,
        params: cfg.params,
        input: cfg.input_state,
    };
    let result = sweep::grid_sweep_with_threads(&spec, thread_cap()?)?;
    Ok(format_sweep(&result, cfg.format))
}

pub fn run_figure(cfg: &RunConfig) -> Result<String, CliError> {
    let fig = cfg
        .figure
        .as_ref()
        .ok_or_else(|| CliError::Config("figure: no figure id given".into()))?;
    let spec = figure_preset(fig.id, fig.points);
    let result = sweep::grid_sweep_with_threads(&spec, thread_cap()?)?;
    Ok(format_sweep(&result, cfg.format))
}

fn describe(point: &[(Param, f64)]) -> String {
    point
        .iter()
        .map(|(p, v)| format!("{p}={}", fmt6(*v)))
        .collect::<Vec<_>>()
        .join(",")
}

/// CSV (header, rows in grid order, trailing `# max` comment) or JSON.
pub fn format_sweep(result: &SweepResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            let names: Vec<&str> = result.spec.axes.iter().map(|a| a.param.name()).collect();
            out.push_str(&names.join(","));
            out.push_str(",Ic\n");
            for (idx, v) in result.values.iter().enumerate() {
                for (_, coord) in result.point(idx) {
                    out.push_str(&fmt6(coord));
                    out.push(',');
                }
                out.push_str(&fmt6(*v));
                out.push('\n');
            }
            out.push_str(&format!(
                "# max Ic={} at {}\n",
                fmt6(result.max_value),
                describe(&result.argmax)
            ));
            out
        }
        OutputFormat::Json => {
            let axes: Vec<Value> = result
                .spec
                .axes
                .iter()
                .zip(&result.axis_values)
                .map(|(a, vals)| {
                    json!({
                        "name": a.param.name(),
                        "values": vals.iter().map(|v| json_number(*v)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let values: Value = if result.axis_values.len() == 1 {
                result.values.iter().map(|v| json_number(*v)).collect()
            } else {
                let cols = result.axis_values[1].len();
                result
                    .values
                    .chunks(cols)
                    .map(|row| row.iter().map(|v| json_number(*v)).collect::<Value>())
                    .collect()
            };
            let mut at = Map::new();
            for (p, v) in &result.argmax {
                at.insert(p.name().to_string(), json_number(*v));
            }
            let v = json!({
                "axes": axes,
                "values": values,
                "max": { "Ic": json_number(result.max_value), "at": at },
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    }
}

fn format_optimum(opt: &Optimum, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => format!(
            "argmax {}\nIc {}\niterations {}\nconverged {}\n",
            describe(&opt.point),
            fmt6(opt.value),
            opt.iterations,
            opt.converged
        ),
        OutputFormat::Json => {
            let mut at = Map::new();
            for (p, v) in &opt.point {
                at.insert(p.name().to_string(), json_number(*v));
            }
            let v = json!({
                "argmax": at,
                "Ic": json_number(opt.value),
                "iterations": opt.iterations,
                "converged": opt.converged,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    }
}

/// Returns the report plus the command status; a non-converged optimum
/// still produces a report.
pub fn run_optimize(cfg: &RunConfig) -> Result<(String, Result<(), CliError>), CliError> {
    let free = cfg
        .optimize
        .as_ref()
        .map(|o| o.free.clone())
        .filter(|f| !f.is_empty())
        .ok_or_else(|| CliError::Config("optimize: no free parameters given".into()))?;
    match maximize_ic(&free, &cfg.params, &cfg.input_state) {
        Ok(opt) => Ok((format_optimum(&opt, cfg.format), Ok(()))),
        Err(SweepError::NoConvergence(best)) => Ok((
            format_optimum(&best, cfg.format),
            Err(CliError::NoConvergence),
        )),
        Err(e) => Err(e.into()),
    }
}

pub fn format_diagnostics(d: &ChannelDiagnostics, format: OutputFormat) -> String {
    let status = if d.passed() { "pass" } else { "fail" };
    let violations: Vec<String> = d.violations.iter().map(|v| format!("{v:?}")).collect();
    match format {
        OutputFormat::Csv => {
            let mut s = format!(
                "max_trace_deviation {}\nmax_hermiticity_deviation {}\nmin_choi_eigenvalue {}\nstatus {status}\n",
                fmt_sci(d.max_trace_deviation),
                fmt_sci(d.max_hermiticity_deviation),
                fmt_sci(d.min_choi_eigenvalue),
            );
            for v in &violations {
                s.push_str(&format!("violation {v}\n"));
            }
            s
        }
        OutputFormat::Json => {
            let v = json!({
                "max_trace_deviation": d.max_trace_deviation,
                "max_hermiticity_deviation": d.max_hermiticity_deviation,
                "min_choi_eigenvalue": d.min_choi_eigenvalue,
                "status": status,
                "violations": violations,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    }
}

/// Validates the channel built from `cfg.params`. `trace_defect` scales
/// `ŝ_11` by `1 − x` first, to exercise the failure path.
pub fn run_validate(
    cfg: &RunConfig,
    trace_defect: Option<f64>,
) -> Result<(String, Result<(), CliError>), CliError> {
    let mut map = channel_map(&cfg.params).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(x) = trace_defect {
        let s = map.op(0, 0).scale(Complex64::new(1.0 - x, 0.0));
        *map.op_mut(0, 0) = s;
    }
    let d = validate_channel(&map);
    let status = if d.passed() {
        Ok(())
    } else {
        Err(CliError::Validation)
    };
    Ok((format_diagnostics(&d, cfg.format), status))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn real_parser() {
        assert_eq!(parse_real("1.5").unwrap(), 1.5);
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_real("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_real("inf").unwrap(), f64::INFINITY);
        assert!(parse_real("tau").is_err());
        assert!(parse_real("pi/0").is_err());
    }

    #[test]
    fn axis_and_free_parsers() {
        let a = parse_axis("theta:0:2pi:41").unwrap();
        assert_eq!(a, Axis::new(Param::Theta, 0.0, 2.0 * PI, 41));
        let a = parse_axis("gamma_t:0:inf:5").unwrap();
        assert_eq!(a.stop, f64::INFINITY);
        assert!(parse_axis("theta:0:1").is_err());
        let f = parse_free("chi:0:pi/2").unwrap();
        assert_eq!(f, FreeParam::new(Param::Chi, 0.0, PI / 2.0));
        assert!(parse_free("omega:0:1").is_err());
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt6(0.6887218755), "0.688722");
        assert_eq!(fmt6(1.5), "1.500000");
        assert_eq!(fmt6(-1.0), "-1.000000");
        assert_eq!(fmt6(-1e-12), "0.000000");
        assert_eq!(fmt6(f64::INFINITY), "inf");
    }

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::Numeric(String::new()).exit_code(), 3);
        assert_eq!(CliError::Io(String::new()).exit_code(), 3);
        assert_eq!(CliError::NoConvergence.exit_code(), 4);
        assert_eq!(CliError::Validation.exit_code(), 5);
    }

    #[test]
    fn in_process_run_matches_binary_contract() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            ["lambda-capacity", "compute", "--theta", "0"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_OK);
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with("Ic -1.000000\n"));

        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            ["lambda-capacity", "compute", "--chi", "2pi"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_CONFIG);
        assert!(out.is_empty());
        assert!(String::from_utf8(err).unwrap().contains("chi"));
    }

    #[test]
    fn config_requires_command_sections() {
        let cfg = RunConfig::new(Command::Sweep);
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let cfg = RunConfig::new(Command::Optimize);
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let cfg = RunConfig::new(Command::Figure);
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        assert!(RunConfig::new(Command::Compute).validate().is_ok());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(RunConfig::from_json(r#"{"command": "compute", "colour": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"command": "compute", "params": {"omega": 1}}"#).is_err());
        assert!(RunConfig::from_json(
            r#"{"command": "compute", "input_state": {"rho11": 0.5, "rho22": 0.5}}"#
        )
        .is_err());
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = RunConfig::new(Command::Sweep);
        cfg.params.gamma_t = f64::INFINITY;
        cfg.params.chi = 0.3;
        cfg.input_state = InputState {
            rho11: 0.3,
            re_rho12: 0.1,
            im_rho12: -0.2,
        };
        cfg.sweep = Some(SweepSection {
            axes: vec![
                Axis::new(Param::Theta, 0.0, 2.0 * PI, 11),
                Axis::new(Param::GammaT, 0.0, f64::INFINITY, 4),
            ],
        });
        cfg.optimize = Some(OptimizeSection {
            free: vec![FreeParam::new(Param::Theta, 0.0, PI)],
        });
        cfg.figure = Some(FigureSection {
            id: FigureId::Fig2a,
            points: 7,
        });
        cfg.output_path = Some(PathBuf::from("/tmp/out.csv"));
        cfg.format = OutputFormat::Json;
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn gamma_t_spelled_inf_in_config() {
        let cfg = RunConfig::from_json(
            r#"{"command": "compute", "params": {"gamma_t": "inf", "theta": 3.141592653589793}}"#,
        )
        .unwrap();
        assert_eq!(cfg.params.gamma_t, f64::INFINITY);
        assert_eq!(cfg.params.gamma13, 1.0);
    }
}
