//! Front-end for the `bubblering` binary: argument parsing, shape loading
//! and report writing. Every report embeds the run configuration and the
//! library version so that it can be reproduced.

use std::fs;
use std::path::{Path, PathBuf};

use bubblering::certify::{certify_shape, norbury_scaling_probe, CertifyError};
use bubblering::geometry::{geometry_report, normalize_shape, CrossSection, GeometryError};
use bubblering::streamsolver::search::SEARCH_RESOLUTION;
use bubblering::streamsolver::{
    dynamic_residual, optimal_lambda, residual_minimize, solve_dirichlet, SearchOptions, ShapeFamily, SolverError,
};
use bubblering::suite::{run_suites, SuiteSizes};
use bubblering::VERSION;
use clap::{Parser, ValueEnum};
use serde::Serialize;
use thiserror::Error;

pub const UNITS: &str = "normalized, a=1, β=1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Bound,
    Solve,
    Search,
    VerifyLemmas,
    NorburyTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Command-line arguments.
#[derive(Debug, Clone, Parser)]
#[command(name = "bubblering", version, about = "Steady bubble ring cross-sections: geometry, Weber bounds and residual search")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Shape JSON file, or the JSON itself when it starts with `{`.
    #[arg(long)]
    pub shape: Option<String>,
    #[arg(long)]
    pub we: Option<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Translation speed for `solve`.
    #[arg(long, default_value_t = 0.0)]
    pub w: f64,
    /// Bernoulli constant for `solve`; the L²-optimal `λ ≥ 0` when omitted.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Search family: `thick-disk`, `ellipse` or `fourier-star:K`.
    #[arg(long, default_value = "thick-disk")]
    pub family: String,
    /// Comma-separated `ε/R₀` values for `norbury-table`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])]
    pub eps: Vec<f64>,
    /// Scale factor on the case counts of `verify-lemmas`.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub shape_path: Option<String>,
    pub we: Option<f64>,
    pub seed: u64,
    pub budget: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub resolution: Option<usize>,
    pub w: f64,
    pub lambda: Option<f64>,
    pub family: String,
    pub eps: Vec<f64>,
    pub scale: f64,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> RunConfig {
        RunConfig {
            command: cli.command,
            shape_path: cli.shape,
            we: cli.we,
            seed: cli.seed,
            budget: cli.budget,
            output_path: cli.out,
            format: cli.format,
            resolution: cli.resolution,
            w: cli.w,
            lambda: cli.lambda,
            family: cli.family,
            eps: cli.eps,
            scale: cli.scale,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("checks failed: {0}")]
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::ChecksFailed(_) => 1,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> CliError {
        match e {
            GeometryError::QuadratureNotConverged { .. } => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> CliError {
        match e {
            SolverError::Geometry(g) => g.into(),
            SolverError::InvalidInput(_) | SolverError::PolygonNotSupported => CliError::Validation(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<CertifyError> for CliError {
    fn from(e: CertifyError) -> CliError {
        match e {
            CertifyError::Geometry(g) => g.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Validation(format!("{}: {e}", path.display()))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    units: &'static str,
    config: &'a RunConfig,
    resolution: Option<usize>,
    result: T,
}

/// Destination (`None` is standard output) and contents.
pub type OutputFile = (Option<PathBuf>, Vec<u8>);

/// Files produced by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<OutputFile>,
}

impl RunOutput {
    pub fn write(&self) -> Result<(), CliError> {
        use std::io::Write;
        for (path, bytes) in &self.files {
            match path {
                Some(p) => fs::write(p, bytes).map_err(|e| io_error(p, e))?,
                None => std::io::stdout()
                    .write_all(bytes)
                    .map_err(|e| io_error(Path::new("<stdout>"), e))?,
            }
        }
        Ok(())
    }
}

/// Parses a shape given as a path or as inline JSON and applies the
/// resolution override.
pub fn load_shape(spec: &str, resolution: Option<usize>) -> Result<CrossSection, CliError> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec).map_err(|e| io_error(Path::new(spec), e))?
    };
    let shape: CrossSection =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("shape file: {e}")))?;
    match resolution {
        Some(n) if !shape.is_polygon() => Ok(shape.with_resolution(n)?),
        _ => Ok(shape),
    }
}

pub fn parse_family(text: &str) -> Result<ShapeFamily, CliError> {
    match text {
        "thick-disk" => Ok(ShapeFamily::ThickDisk),
        "ellipse" => Ok(ShapeFamily::Ellipse),
        _ => {
            let modes = text
                .strip_prefix("fourier-star:")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| *k >= 1)
                .ok_or_else(|| CliError::Validation(format!("unknown family {text:?}")))?;
            Ok(ShapeFamily::FourierStar { modes })
        }
    }
}

impl RunConfig {
    fn shape(&self) -> Result<CrossSection, CliError> {
        let spec = self
            .shape_path
            .as_deref()
            .ok_or_else(|| CliError::Validation(format!("--shape is required for {:?}", self.command)))?;
        load_shape(spec, self.resolution)
    }

    fn we(&self) -> Result<f64, CliError> {
        match self.we {
            Some(we) if we > 0.0 && we.is_finite() => Ok(we),
            Some(we) => Err(CliError::Validation(format!("--we must be positive, got {we}"))),
            None => Err(CliError::Validation(format!("--we is required for {:?}", self.command))),
        }
    }

    fn optional_we(&self) -> Result<Option<f64>, CliError> {
        self.we.map(|_| self.we()).transpose()
    }

    fn json<T: Serialize>(&self, resolution: Option<usize>, result: T) -> Result<Vec<u8>, CliError> {
        let envelope = Envelope {
            tool: "bubblering",
            version: VERSION,
            units: UNITS,
            config: self,
            resolution,
            result,
        };
        let mut bytes = serde_json::to_vec_pretty(&envelope).map_err(|e| CliError::Solver(e.to_string()))?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    fn csv_preamble(&self, resolution: Option<usize>) -> Result<Vec<u8>, CliError> {
        let config = serde_json::to_string(self).map_err(|e| CliError::Solver(e.to_string()))?;
        let resolution = resolution.map_or("none".to_string(), |r| r.to_string());
        Ok(format!(
            "# bubblering {VERSION}\n# units: {UNITS}\n# seed: {}\n# resolution: {resolution}\n# config: {config}\n",
            self.seed
        )
        .into_bytes())
    }
}

fn csv_bytes<F>(preamble: Vec<u8>, fill: F) -> Result<Vec<u8>, CliError>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut buf = preamble;
    {
        let mut writer = csv::Writer::from_writer(&mut buf);
        fill(&mut writer).map_err(|e| CliError::Solver(e.to_string()))?;
        writer.flush().map_err(|e| CliError::Solver(e.to_string()))?;
    }
    Ok(buf)
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// Executes one command and returns the files it would write.
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let out = config.output_path.clone();
    let files = match config.command {
        Command::Analyze => {
            let shape = config.shape()?;
            let report = geometry_report(&shape)?;
            let res = report.resolution;
            vec![(out, config.json(Some(res), report)?)]
        }
        Command::Bound => {
            let shape = config.shape()?;
            let we = config.optional_we()?;
            let cert = certify_shape(&shape)?;
            #[derive(Serialize)]
            struct Bound {
                certificate: bubblering::BoundCertificate,
                universal_we_min: f64,
                measured_we_min: Option<f64>,
                /// `√(2π)`: `μ_sqrt_area = μ / √(2π)`.
                mu_conversion: f64,
                we: Option<f64>,
                verdict: Option<bubblering::Verdict>,
                measured_verdict: Option<bubblering::Verdict>,
            }
            let result = Bound {
                universal_we_min: cert.we_min,
                measured_we_min: cert.measured.as_ref().map(|m| m.we_min),
                mu_conversion: (2.0 * std::f64::consts::PI).sqrt(),
                we,
                verdict: we.map(|w| cert.verdict(w)),
                measured_verdict: we.and_then(|w| cert.measured_verdict(w)),
                certificate: cert,
            };
            vec![(out, config.json(shape_resolution(&shape), result)?)]
        }
        Command::Solve => {
            let we = config.we()?;
            let shape = config.shape()?;
            let normalized = normalize_shape(&shape)?;
            let solution = solve_dirichlet(&normalized.shape, config.w)?;
            let lambda = match config.lambda {
                Some(l) => l,
                None => optimal_lambda(&normalized.shape, &solution, we)?,
            };
            let residual = dynamic_residual(&normalized.shape, &solution, we, lambda)?;
            #[derive(Serialize)]
            struct Solve {
                minor_radius: f64,
                normalized_shape: CrossSection,
                residual: bubblering::ResidualReport,
                solution: bubblering::BoundarySolution,
            }
            let res = solution.resolution;
            let result = Solve {
                minor_radius: normalized.minor_radius,
                normalized_shape: normalized.shape,
                residual,
                solution,
            };
            vec![(out, config.json(Some(res), result)?)]
        }
        Command::Search => search(config)?,
        Command::VerifyLemmas => {
            if !(config.scale > 0.0 && config.scale.is_finite()) {
                return Err(CliError::Validation(format!("--scale must be positive, got {}", config.scale)));
            }
            let report = run_suites(config.seed, SuiteSizes::full().scaled(config.scale));
            let bytes = match config.format {
                Format::Json => config.json(None, &report)?,
                Format::Csv => csv_bytes(config.csv_preamble(None)?, |w| {
                    w.write_record(["suite", "cases", "violations", "worst_margin", "tolerance", "passed"])?;
                    for s in &report.suites {
                        w.write_record([
                            s.name.clone(),
                            s.cases.to_string(),
                            s.violations.to_string(),
                            fmt(s.worst_margin),
                            fmt(s.tolerance),
                            s.passed.to_string(),
                        ])?;
                    }
                    Ok(())
                })?,
            };
            let output = RunOutput {
                files: vec![(out, bytes)],
            };
            if !report.passed {
                output.write()?;
                let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
                return Err(CliError::ChecksFailed(failed.join(", ")));
            }
            return Ok(output);
        }
        Command::NorburyTable => {
            let rows = norbury_scaling_probe(1.0, &config.eps)?;
            let bytes = match config.format {
                Format::Json => config.json(None, &rows)?,
                Format::Csv => csv_bytes(config.csv_preamble(None)?, |w| {
                    for row in &rows {
                        w.serialize(row)?;
                    }
                    Ok(())
                })?,
            };
            vec![(out, bytes)]
        }
    };
    Ok(RunOutput { files })
}

fn shape_resolution(shape: &CrossSection) -> Option<usize> {
    (!shape.is_polygon()).then(|| shape.resolution())
}

fn search(config: &RunConfig) -> Result<Vec<OutputFile>, CliError> {
    let we = config.we()?;
    if config.budget == 0 {
        return Err(CliError::Validation("--budget must be at least 1".into()));
    }
    let family = parse_family(&config.family)?;
    let resolution = config.resolution.unwrap_or(SEARCH_RESOLUTION);
    if resolution < 8 || !resolution.is_multiple_of(2) {
        return Err(CliError::Validation(format!("--resolution must be even and at least 8, got {resolution}")));
    }
    let options = SearchOptions {
        resolution,
        ..SearchOptions::new(family.clone(), we, config.budget, config.seed)
    };
    let result = residual_minimize(&options)?;
    let certificate = certify_shape(&result.shape)?;

    let names = family.parameter_names();
    let log = csv_bytes(config.csv_preamble(Some(resolution))?, |w| {
        let mut header = vec!["index".to_string()];
        header.extend(names.iter().cloned());
        header.extend(["W", "lambda", "dyn_residual_l2", "dyn_residual_max", "objective", "penalized"].map(String::from));
        w.write_record(&header)?;
        for e in &result.evaluations {
            let mut row = vec![e.index.to_string()];
            row.extend(e.params[..names.len()].iter().map(|p| fmt(*p)));
            row.extend([fmt(e.w), fmt(e.lambda), fmt(e.dyn_residual_l2), fmt(e.dyn_residual_max), fmt(e.objective)]);
            row.push(e.penalized.to_string());
            w.write_record(&row)?;
        }
        Ok(())
    })?;

    #[derive(Serialize)]
    struct Incumbent<'a> {
        family: &'a ShapeFamily,
        we: f64,
        evaluations: usize,
        best_params: &'a [f64],
        #[serde(rename = "W")]
        w: f64,
        lambda: f64,
        shape: &'a CrossSection,
        report: &'a bubblering::ResidualReport,
        certificate: bubblering::BoundCertificate,
        below_certificate: bool,
    }
    let incumbent = Incumbent {
        family: &family,
        we,
        evaluations: result.evaluations.len(),
        best_params: &result.best_params,
        w: result.w,
        lambda: result.lambda,
        shape: &result.shape,
        report: &result.report,
        below_certificate: we < certificate.we_min,
        certificate,
    };
    let json = config.json(Some(resolution), incumbent)?;
    let out = config.output_path.clone();
    Ok(match config.format {
        Format::Json => {
            let log_path = out.as_ref().map(|p| p.with_extension("log.csv"));
            let mut files = vec![(out, json)];
            if log_path.is_some() {
                files.push((log_path, log));
            }
            files
        }
        Format::Csv => {
            let json_path = out.as_ref().map(|p| p.with_extension("json"));
            let mut files = vec![(out, log)];
            if json_path.is_some() {
                files.push((json_path, json));
            }
            files
        }
    })
}

/// Parses arguments, runs, writes outputs and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let config = RunConfig::from(cli);
    match run(&config).and_then(|output| output.write()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
