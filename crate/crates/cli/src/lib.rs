//! Command implementations behind the `localfield` binary. Each command
//! returns its rendered output and exit status instead of printing, so the
//! binary stays a thin shell and tests can drive commands directly.

pub mod config;
pub mod output;

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use localfield::rmin_solver::DEFAULT_SCAN_POINTS;
use localfield::{
    commutator_coefficient, kk_residual, rates_for_medium, rmin_curve, validity_margin, CavityGeometry, Dielectric,
    LorentzMedium, Medium, SpectrumGrid, Validity, DEFAULT_COUPLING,
};

pub use config::{OutputFormat, RawOptions, RunConfig};
pub use output::{RminRecord, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: msg.into() }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: msg.into() }
    }

    pub fn from_core_usage(e: localfield::Error) -> Self {
        Self::usage(e.to_string())
    }

    pub fn from_core_numerical(e: localfield::Error) -> Self {
        Self::numerical(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Rendered command result.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommandOutput {
    pub text: String,
    pub exit_code: i32,
    pub warnings: Vec<String>,
}

fn run_parallel<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::usage(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Commutator-margin check shared by every command under `--strict`.
fn strictness(cfg: &RunConfig, medium: &Medium, out: &mut CommandOutput) -> Result<(), CliError> {
    let eps_s = match medium.static_epsilon(cfg.static_from_lowest) {
        Ok(v) => v,
        Err(e) => {
            out.warnings.push(format!("commutator check skipped: {e}"));
            return Ok(());
        }
    };
    let margin = validity_margin(eps_s, cfg.structure_constant).map_err(CliError::from_core_usage)?;
    match margin.class {
        Validity::Strict => {}
        Validity::Marginal => out
            .warnings
            .push(format!("commutator margin {:.4} is marginal (eps_S = {eps_s})", margin.rho)),
        Validity::Violated => {
            out.warnings
                .push(format!("commutator margin {:.4} violates the consistency condition (eps_S = {eps_s})", margin.rho));
            if cfg.strict {
                out.exit_code = EXIT_VIOLATION;
            }
        }
    }
    Ok(())
}

fn sweep_row<D: Dielectric + ?Sized>(medium: &D, omega: f64, geom: &CavityGeometry) -> Result<SweepRow, CliError> {
    let (eps, n, rates) = rates_for_medium(medium, omega, geom).map_err(CliError::from_core_numerical)?;
    Ok(SweepRow::new(omega, eps, n, &rates))
}

fn sweep_rows<D: Dielectric + ?Sized>(
    medium: &D,
    grid: &SpectrumGrid,
    geom: &CavityGeometry,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, CliError> {
    run_parallel(threads, || {
        grid.points()
            .par_iter()
            .map(|&w| sweep_row(medium, w, geom))
            .collect::<Result<Vec<_>, _>>()
    })?
}

fn render<T: Serialize>(format: OutputFormat, header: &str, rows: &[T], csv_line: impl Fn(&T) -> String) -> String {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from(header);
            s.push('\n');
            for row in rows {
                s.push_str(&csv_line(row));
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
            s.push('\n');
            s
        }
    }
}

/// Single transition frequency.
pub fn cmd_eval(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let omega = cfg.omega.ok_or_else(|| CliError::usage("eval requires --omega"))?;
    let medium = cfg.single_medium()?;
    let geom = cfg.geometry()?;
    let mut out = CommandOutput::default();
    strictness(cfg, &medium, &mut out)?;
    let row = sweep_row(&medium, omega, &geom)?;
    out.text = match cfg.format {
        OutputFormat::Csv => format!("{}\n{}\n", SweepRow::HEADER, row.to_csv()),
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&row).expect("row serializes")),
    };
    Ok(out)
}

/// Frequency sweep over the configured grid, one row per point.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let medium = cfg.single_medium()?;
    let geom = cfg.geometry()?;
    let grid = cfg.grid(config::FIGURE_POINTS)?;
    let mut out = CommandOutput::default();
    strictness(cfg, &medium, &mut out)?;
    let rows = sweep_rows(&medium, &grid, &geom, cfg.threads)?;
    let negative = rows.iter().filter(|r| r.gamma_perp < 0.0).count();
    if negative > 0 {
        out.warnings
            .push(format!("{negative} of {} rows have a negative transverse rate", rows.len()));
    }
    out.text = render(cfg.format, SweepRow::HEADER, &rows, SweepRow::to_csv);
    Ok(out)
}

fn lorentz_base(cfg: &RunConfig) -> Result<(LorentzMedium, Vec<f64>), CliError> {
    match &cfg.medium {
        config::MediumSource::Lorentz { omega_t, coupling, gammas } => {
            // gamma is overwritten per row
            let base = LorentzMedium::new(*omega_t, *coupling, 0.0).map_err(CliError::from_core_usage)?;
            Ok((base, gammas.clone()))
        }
        config::MediumSource::Table { .. } => Err(CliError::usage("rmin over a damping list needs the lorentz medium")),
    }
}

fn rmin_records(base: &LorentzMedium, gammas: &[f64], grid: &SpectrumGrid, tol: f64) -> Vec<RminRecord> {
    rmin_curve(base, gammas, grid, tol).into_iter().map(RminRecord::from).collect()
}

/// `r_min` for each damping value (lorentz), or for the table medium.
pub fn cmd_rmin(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let grid = cfg.rmin_grid()?;
    let records = match &cfg.medium {
        config::MediumSource::Lorentz { .. } => {
            let (base, gammas) = lorentz_base(cfg)?;
            if gammas.is_empty() {
                return Err(CliError::usage("rmin requires a nonempty --gamma list"));
            }
            run_parallel(cfg.threads, || rmin_records(&base, &gammas, &grid, cfg.tol))?
        }
        config::MediumSource::Table { .. } => {
            let medium = cfg.single_medium()?;
            let outcome = localfield::find_r_min(&medium, &grid, cfg.tol);
            vec![RminRecord::from(localfield::RminRow { gamma: f64::NAN, outcome })]
        }
    };
    let mut out = CommandOutput::default();
    for r in records.iter().filter(|r| r.status != "ok") {
        let label = r.gamma.map(|g| format!("gamma = {g}")).unwrap_or_else(|| "table".into());
        out.warnings.push(format!("{label}: {}", r.status));
    }
    out.text = render(cfg.format, RminRecord::HEADER, &records, RminRecord::to_csv);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub eps_static: Option<f64>,
    pub alpha: f64,
    pub commutator_coefficient: Option<f64>,
    pub rho: Option<f64>,
    pub classification: Option<String>,
    pub kk_max_residual: Option<f64>,
    pub kk_points: Option<usize>,
}

impl CheckReport {
    fn fields(&self) -> Vec<(&'static str, String)> {
        let num = |v: Option<f64>| v.map(output::fmt_num).unwrap_or_default();
        vec![
            ("eps_static", num(self.eps_static)),
            ("alpha", output::fmt_num(self.alpha)),
            ("commutator_coefficient", num(self.commutator_coefficient)),
            ("rho", num(self.rho)),
            ("classification", self.classification.clone().unwrap_or_default()),
            ("kk_max_residual", num(self.kk_max_residual)),
            ("kk_points", self.kk_points.map(|n| n.to_string()).unwrap_or_default()),
        ]
    }
}

/// Commutator consistency (and Kramers–Kronig residual for tables).
pub fn cmd_check(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let medium = cfg.single_medium()?;
    let s = cfg.structure_constant;
    let mut out = CommandOutput::default();
    let mut report = CheckReport {
        eps_static: None,
        alpha: s.alpha(),
        commutator_coefficient: None,
        rho: None,
        classification: None,
        kk_max_residual: None,
        kk_points: None,
    };
    match medium.static_epsilon(cfg.static_from_lowest) {
        Ok(eps_s) => {
            let margin = validity_margin(eps_s, s).map_err(CliError::from_core_usage)?;
            report.eps_static = Some(eps_s);
            report.commutator_coefficient = Some(commutator_coefficient(eps_s, s).map_err(CliError::from_core_usage)?);
            report.rho = Some(margin.rho);
            report.classification = Some(margin.class.to_string());
            if margin.class == Validity::Violated {
                out.warnings.push("consistency condition violated".into());
                if cfg.strict {
                    out.exit_code = EXIT_VIOLATION;
                }
            }
        }
        Err(e) => out.warnings.push(format!("commutator check skipped: {e}")),
    }
    if let Medium::Table(table) = &medium {
        let kk = kk_residual(table).map_err(CliError::from_core_numerical)?;
        report.kk_max_residual = Some(kk.max_abs);
        report.kk_points = Some(kk.residuals.len());
    }
    out.text = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("quantity,value\n");
            for (k, v) in report.fields() {
                s.push_str(&format!("{k},{v}\n"));
            }
            s
        }
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes")),
    };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigurePreset {
    pub const ALL: [FigurePreset; 4] = [FigurePreset::Fig1, FigurePreset::Fig2, FigurePreset::Fig3, FigurePreset::Fig4];
    pub const FIGURE_RS: [f64; 3] = [10.0, 20.0, 30.0];

    pub fn parse(s: &str) -> Result<Vec<FigurePreset>, CliError> {
        match s {
            "fig1" => Ok(vec![FigurePreset::Fig1]),
            "fig2" => Ok(vec![FigurePreset::Fig2]),
            "fig3" => Ok(vec![FigurePreset::Fig3]),
            "fig4" => Ok(vec![FigurePreset::Fig4]),
            "all" => Ok(Self::ALL.to_vec()),
            other => Err(CliError::usage(format!("unknown preset '{other}' (fig1|fig2|fig3|fig4|all)"))),
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            FigurePreset::Fig1 => "fig1.csv",
            FigurePreset::Fig2 => "fig2.csv",
            FigurePreset::Fig3 => "fig3.csv",
            FigurePreset::Fig4 => "fig4.csv",
        }
    }

    /// Damping of the rate-curve presets.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            FigurePreset::Fig1 => Some(0.01),
            FigurePreset::Fig2 => Some(0.05),
            FigurePreset::Fig3 => Some(0.1),
            FigurePreset::Fig4 => None,
        }
    }

    /// Damping values of the r_min curve: 0.005 to 0.2 in steps of 0.005.
    pub fn rmin_gammas() -> Vec<f64> {
        (1..=40).map(|i| 0.005 * i as f64).collect()
    }
}

/// Rate curves for one damping: three `r` series plus the classical one.
pub fn figure_rate_csv(gamma: f64, grid: &SpectrumGrid, threads: Option<usize>) -> Result<String, CliError> {
    let medium = LorentzMedium::new(1.0, DEFAULT_COUPLING, gamma).map_err(CliError::from_core_usage)?;
    let mut text = format!("series,r,{}\n", SweepRow::HEADER);
    let mut classical = None;
    for r in FigurePreset::FIGURE_RS {
        let geom = CavityGeometry::from_r(r, 1.0).map_err(CliError::from_core_usage)?;
        let rows = sweep_rows(&medium, grid, &geom, threads)?;
        for row in &rows {
            text.push_str(&format!("r{r},{},{}\n", output::fmt_num(r), row.to_csv()));
        }
        classical.get_or_insert(rows);
    }
    for row in classical.unwrap_or_default() {
        text.push_str(&format!("classical,,{}\n", row.classical_transverse().to_csv()));
    }
    Ok(text)
}

pub fn figure_rmin_csv(grid: &SpectrumGrid, tol: f64, threads: Option<usize>) -> Result<String, CliError> {
    let base = LorentzMedium::new(1.0, DEFAULT_COUPLING, 0.0).map_err(CliError::from_core_usage)?;
    let gammas = FigurePreset::rmin_gammas();
    let records = run_parallel(threads, || rmin_records(&base, &gammas, grid, tol))?;
    Ok(render(OutputFormat::Csv, RminRecord::HEADER, &records, RminRecord::to_csv))
}

/// Writes `figN.csv` files for the requested presets into `outdir`.
pub fn cmd_figures(presets: &[FigurePreset], outdir: &Path, threads: Option<usize>) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(outdir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", outdir.display())))?;
    let mut written = Vec::new();
    for preset in presets {
        let text = match preset.gamma() {
            Some(gamma) => {
                let grid = SpectrumGrid::around_resonance(1.0, config::FIGURE_POINTS).map_err(CliError::from_core_usage)?;
                figure_rate_csv(gamma, &grid, threads)?
            }
            None => {
                let grid = SpectrumGrid::around_resonance(1.0, DEFAULT_SCAN_POINTS).map_err(CliError::from_core_usage)?;
                figure_rmin_csv(&grid, localfield::rmin_solver::DEFAULT_TOL, threads)?
            }
        };
        let path = outdir.join(preset.file_name());
        std::fs::write(&path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
