//! Command-line front end.
//!
//! Values are resolved in order of precedence: command-line flags, then the
//! JSON file given by `--config` (keys mirror the long flag names), then
//! built-in defaults. The resolved configuration is echoed into every output
//! so a run can be replayed with `--config`.

mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{intensity_series, time_grid};
use crate::entanglement::entanglement_series;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectral::eigenfrequencies;
use crate::stability::{
    classify_analytic, classify_spectral, threshold_chi_squared, trace_boundary, RegimeTag,
    DEFAULT_MARGIN, DEFAULT_TOL,
};
use crate::validate;

pub use output::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "parampli", version, about = "Atom-optical parametric amplifier with collisions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenfrequencies, regime and rates at one parameter point
    Spectrum(Flags),
    /// Analytic and spectral regime classification at one parameter point
    Classify(Flags),
    /// Instability boundary χ²(δ) for a list of collision parameters
    StabilityMap(Flags),
    /// Atom and light intensities over time
    Intensity(Flags),
    /// Atom-photon entanglement coefficient over time
    Entanglement(Flags),
    /// Randomized property suite
    Validate(Flags),
}

impl Command {
    fn flags(&self) -> &Flags {
        match self {
            Command::Spectrum(f)
            | Command::Classify(f)
            | Command::StabilityMap(f)
            | Command::Intensity(f)
            | Command::Entanglement(f)
            | Command::Validate(f) => f,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Classify(_) => "classify",
            Command::StabilityMap(_) => "stability-map",
            Command::Intensity(_) => "intensity",
            Command::Entanglement(_) => "entanglement",
            Command::Validate(_) => "validate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every option is optional here so that unset flags fall through to the
/// config file.
#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Flags {
    /// Detuning δ in units of the trap frequency
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Collision parameter κ, in [0, 1)
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Effective coupling χ ≥ 0
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<f64>,
    /// Real part of the initial coherent light amplitude
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    /// Imaginary part of the initial coherent light amplitude
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    /// End of the time grid (starts at 0)
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Number of time samples
    #[arg(long)]
    pub t_points: Option<usize>,
    /// Lower end of the δ range for stability-map
    #[arg(long, allow_hyphen_values = true)]
    pub delta_min: Option<f64>,
    /// Upper end of the δ range for stability-map
    #[arg(long, allow_hyphen_values = true)]
    pub delta_max: Option<f64>,
    /// Number of δ samples for stability-map
    #[arg(long)]
    pub delta_points: Option<usize>,
    /// Comma-separated collision parameters for stability-map
    #[arg(long, value_delimiter = ',')]
    pub kappas: Option<Vec<f64>>,
    /// χ² offset above the boundary at which stability-map probes the regime
    #[arg(long)]
    pub probe_offset: Option<f64>,
    /// Tolerance on spectrum real/imaginary parts; for validate, replaces
    /// every property tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// NearThreshold band width in χ²
    #[arg(long)]
    pub margin: Option<f64>,
    /// Seed for the validate sweep
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Also write an SVG line plot of the main series
    #[arg(long)]
    #[serde(skip)]
    pub svg: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, env = "PARAMPLI_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// JSON file with defaults for any of the flags above
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run configuration; echoed into output metadata.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub delta: f64,
    pub kappa: f64,
    pub chi: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub kappas: Vec<f64>,
    pub probe_offset: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub margin: f64,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            delta: 0.5,
            kappa: 0.0,
            chi: 1.0,
            alpha_re: 2.0,
            alpha_im: 0.0,
            t_max: 15.0,
            t_points: 1500,
            delta_min: -3.0,
            delta_max: 1.0,
            delta_points: 201,
            kappas: vec![0.0, 0.4, 0.8],
            probe_offset: 0.05,
            tol: None,
            margin: DEFAULT_MARGIN,
            seed: validate::DEFAULT_SEED,
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.delta, self.kappa, self.chi)
    }

    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha_re, self.alpha_im)
    }

    pub fn spectral_tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn check(&self) -> Result<()> {
        let reals = [
            ("alpha-re", self.alpha_re),
            ("alpha-im", self.alpha_im),
            ("t-max", self.t_max),
            ("delta-min", self.delta_min),
            ("delta-max", self.delta_max),
            ("probe-offset", self.probe_offset),
            ("margin", self.margin),
        ];
        for (name, v) in reals {
            if !v.is_finite() {
                return Err(Error::Config(format!("--{name} must be finite, got {v}")));
            }
        }
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(Error::Config(format!("--tol must be finite and nonnegative, got {tol}")));
            }
        }
        if self.margin < 0.0 {
            return Err(Error::Config("--margin must be nonnegative".into()));
        }
        if self.t_points < 2 {
            return Err(Error::Config(format!("--t-points must be >= 2, got {}", self.t_points)));
        }
        if self.t_max <= 0.0 {
            return Err(Error::Config(format!("--t-max must be positive, got {}", self.t_max)));
        }
        if self.delta_points < 2 {
            return Err(Error::Config(format!("--delta-points must be >= 2, got {}", self.delta_points)));
        }
        if self.delta_min >= self.delta_max {
            return Err(Error::Config("--delta-min must be below --delta-max".into()));
        }
        if self.kappas.is_empty() {
            return Err(Error::Config("--kappas must list at least one value".into()));
        }
        Ok(())
    }
}

fn read_config_file(path: &Path) -> Result<Flags> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))
}

/// Flags over config file over defaults.
pub fn resolve(flags: &Flags) -> Result<RunConfig> {
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Flags::default(),
    };
    let d = RunConfig::default();
    macro_rules! pick {
        ($field:ident) => {
            flags.$field.clone().or(file.$field.clone()).unwrap_or(d.$field.clone())
        };
    }
    let cfg = RunConfig {
        delta: pick!(delta),
        kappa: pick!(kappa),
        chi: pick!(chi),
        alpha_re: pick!(alpha_re),
        alpha_im: pick!(alpha_im),
        t_max: pick!(t_max),
        t_points: pick!(t_points),
        delta_min: pick!(delta_min),
        delta_max: pick!(delta_max),
        delta_points: pick!(delta_points),
        kappas: pick!(kappas),
        probe_offset: pick!(probe_offset),
        tol: flags.tol.or(file.tol),
        margin: pick!(margin),
        seed: pick!(seed),
        format: pick!(format),
    };
    cfg.check()?;
    Ok(cfg)
}

/// Runs one subcommand; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let flags = cli.command.flags();
    let cfg = resolve(flags)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(flags.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let start = Instant::now();
    let (table, code) = pool.install(|| execute(&cli.command, &cfg))?;
    let elapsed = start.elapsed();

    let meta = output::Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        config: &cfg,
    };
    let text = match cfg.format {
        Format::Csv => table.to_csv(&meta)?,
        Format::Json => table.to_json(&meta)?,
    };
    match &flags.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &flags.svg {
        std::fs::write(path, table.to_svg())?;
    }
    eprintln!("{}: wall time {:.3} s", cli.command.name(), elapsed.as_secs_f64());
    Ok(code)
}

/// Computes the rows for a subcommand.
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<(Table, i32)> {
    match command {
        Command::Spectrum(_) => cmd_spectrum(cfg).map(|t| (t, 0)),
        Command::Classify(_) => cmd_classify(cfg).map(|t| (t, 0)),
        Command::StabilityMap(_) => cmd_stability_map(cfg).map(|t| (t, 0)),
        Command::Intensity(_) => cmd_intensity(cfg).map(|t| (t, 0)),
        Command::Entanglement(_) => cmd_entanglement(cfg).map(|t| (t, 0)),
        Command::Validate(_) => cmd_validate(cfg),
    }
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Table> {
    let params = cfg.params()?;
    let spectrum = eigenfrequencies(&params)?;
    let regime = classify_analytic(&params, cfg.margin)?;
    let mut columns = Vec::new();
    let mut row = Vec::new();
    for (k, w) in spectrum.omegas.iter().enumerate() {
        columns.push(format!("omega{}_re", k + 1));
        columns.push(format!("omega{}_im", k + 1));
        row.push(Cell::Num(w.re));
        row.push(Cell::Num(w.im));
    }
    for c in ["regime", "gamma", "omega_rot", "gap", "degenerate"] {
        columns.push(c.to_string());
    }
    row.extend([
        Cell::Text(regime.tag.to_string()),
        Cell::Num(regime.gamma),
        Cell::Num(regime.omega_rot),
        Cell::Num(spectrum.gap),
        Cell::Bool(spectrum.degenerate),
    ]);
    Ok(Table::new(columns, vec![row]))
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<Table> {
    let params = cfg.params()?;
    let analytic = classify_analytic(&params, cfg.margin)?;
    let spectrum = eigenfrequencies(&params)?;
    let spectral = classify_spectral(&spectrum, cfg.spectral_tol())?;
    if analytic.tag != RegimeTag::NearThreshold && analytic.tag != spectral.tag {
        return Err(Error::Inconsistency {
            what: format!("classification: analytic {} vs spectral {}", analytic.tag, spectral.tag),
            residual: 1.0,
            tol: 0.0,
        });
    }
    let threshold = threshold_chi_squared(params.delta, params.kappa);
    let columns = ["delta", "kappa", "chi", "chi2", "chi2_threshold", "regime_analytic", "regime_spectral", "gamma", "omega_rot"];
    let row = vec![
        Cell::Num(params.delta),
        Cell::Num(params.kappa),
        Cell::Num(params.chi),
        Cell::Num(params.chi_squared()),
        threshold.map_or(Cell::Empty, Cell::Num),
        Cell::Text(analytic.tag.to_string()),
        Cell::Text(spectral.tag.to_string()),
        Cell::Num(spectral.gamma),
        Cell::Num(spectral.omega_rot),
    ];
    Ok(Table::new(columns.map(String::from).to_vec(), vec![row]))
}

pub fn cmd_stability_map(cfg: &RunConfig) -> Result<Table> {
    let curves = cfg
        .kappas
        .par_iter()
        .map(|&k| trace_boundary(k, cfg.delta_min, cfg.delta_max, cfg.delta_points))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let tol = cfg.spectral_tol();
    for curve in &curves {
        for pt in &curve.points {
            let probe = ModelParams::new(pt.delta, curve.kappa, (pt.chi2_analytic + cfg.probe_offset).sqrt())?;
            let regime = classify_spectral(&eigenfrequencies(&probe)?, tol)?;
            rows.push(vec![
                Cell::Num(curve.kappa),
                Cell::Num(pt.delta),
                Cell::Num(pt.chi2_analytic),
                Cell::Num(pt.chi2_bisect),
                Cell::Text(regime.tag.to_string()),
            ]);
        }
    }
    let columns = ["kappa", "delta", "chi2_analytic", "chi2_bisect", "regime_at_probe"];
    Ok(Table::new(columns.map(String::from).to_vec(), rows).with_plot(output::Plot::boundary()))
}

pub fn cmd_intensity(cfg: &RunConfig) -> Result<Table> {
    let params = cfg.params()?;
    let recs = intensity_series(&params, cfg.alpha(), &time_grid(cfg.t_max, cfg.t_points))?;
    let rows = recs
        .iter()
        .map(|r| {
            vec![
                Cell::Num(r.t),
                Cell::Num(r.i_atom),
                Cell::Num(r.i_light),
                Cell::Num(r.i_light.log10()),
            ]
        })
        .collect();
    let columns = ["t", "i_atom", "i_light", "log10_i_light"];
    Ok(Table::new(columns.map(String::from).to_vec(), rows).with_plot(output::Plot::series(0, 3)))
}

pub fn cmd_entanglement(cfg: &RunConfig) -> Result<Table> {
    let params = cfg.params()?;
    let recs = entanglement_series(&params, &time_grid(cfg.t_max, cfg.t_points))?;
    let rows = recs
        .iter()
        .map(|r| vec![Cell::Num(r.t), Cell::Num(r.y), Cell::Num(r.y_closed), Cell::Num(r.y_covariance)])
        .collect();
    let columns = ["t", "y", "y_closed", "y_covariance"];
    Ok(Table::new(columns.map(String::from).to_vec(), rows).with_plot(output::Plot::series(0, 1)))
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<(Table, i32)> {
    let report = validate::run(cfg.seed, cfg.tol)?;
    eprint!("{}", report.to_text());
    let rows = report
        .properties
        .iter()
        .map(|p| {
            vec![
                Cell::Text(p.name.to_string()),
                Cell::Text(if p.pass { "pass" } else { "fail" }.to_string()),
                Cell::Num(p.worst),
                Cell::Num(p.tol),
                Cell::Int(p.samples as i64),
            ]
        })
        .collect();
    let columns = ["property", "result", "worst", "tol", "samples"];
    let code = if report.all_pass() { 0 } else { 1 };
    Ok((Table::new(columns.map(String::from).to_vec(), rows), code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"delta": -1.0, "chi": 0.7, "t-points": 50}"#).unwrap();
        let flags = Flags { chi: Some(0.3), config: Some(path), ..Default::default() };
        let cfg = resolve(&flags).unwrap();
        assert_eq!(cfg.delta, -1.0);
        assert_eq!(cfg.chi, 0.3);
        assert_eq!(cfg.t_points, 50);
        assert_eq!(cfg.kappa, 0.0);
        assert_eq!(cfg.t_max, 15.0);
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"detla": 1.0}"#).unwrap();
        let flags = Flags { config: Some(path), ..Default::default() };
        let err = resolve(&flags).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_grid_counts_rejected() {
        let flags = Flags { t_points: Some(1), ..Default::default() };
        assert_eq!(resolve(&flags).unwrap_err().exit_code(), 2);
        let flags = Flags { delta_points: Some(0), ..Default::default() };
        assert!(resolve(&flags).is_err());
        let flags = Flags { tol: Some(f64::NAN), ..Default::default() };
        assert!(resolve(&flags).is_err());
    }

    #[test]
    fn spectrum_region_one_row() {
        let cfg = RunConfig { delta: 0.5, kappa: 0.0, chi: 1.0, ..Default::default() };
        let t = cmd_spectrum(&cfg).unwrap();
        let regime = t.column("regime").unwrap();
        assert_eq!(regime[0], Cell::Text("RegionI".into()));
        let Cell::Num(g) = t.column("gamma").unwrap()[0] else { panic!() };
        assert!((g - 0.915_471_184_057_670_5).abs() < 1e-12);
    }

    #[test]
    fn invalid_kappa_exit_code() {
        let cfg = RunConfig { kappa: 1.2, ..Default::default() };
        assert_eq!(cmd_spectrum(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn stability_map_anchors() {
        let cfg = RunConfig { delta_points: 201, ..Default::default() };
        let t = cmd_stability_map(&cfg).unwrap();
        // δ = 0 dropped from each of the three curves
        assert_eq!(t.rows.len(), 3 * 200);
        let row = t
            .rows
            .iter()
            .find(|r| r[0] == Cell::Num(0.0) && r[1] == Cell::Num(1.0))
            .unwrap();
        assert_eq!(row[2], Cell::Num(0.25));
        assert_eq!(row[4], Cell::Text("RegionI".into()));
    }
}
