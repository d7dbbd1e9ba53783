use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use localfield::rmin_solver::{DEFAULT_SCAN_POINTS, DEFAULT_TOL};
use localfield::{
    CavityGeometry, LorentzMedium, Medium, SpectrumGrid, StructureConstant, TabulatedMedium, DEFAULT_COUPLING,
};

use crate::CliError;

/// Damping used when none is given on the command line or in a config file.
pub const DEFAULT_GAMMA: f64 = 0.1;
pub const FIGURE_POINTS: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumKind {
    Lorentz,
    Table,
}

impl FromStr for MediumKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lorentz" => Ok(MediumKind::Lorentz),
            "table" => Ok(MediumKind::Table),
            other => Err(format!("unknown medium '{other}' (expected lorentz or table)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometrySpec {
    /// Dimensionless `r = lambda_T / R`.
    R(f64),
    /// Cavity radius in units of `c / omega_T`.
    Radius(f64),
}

/// Options as given on the command line or in a config file; `None` means
/// "not specified" so that layers can be merged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawOptions {
    pub medium: Option<MediumKind>,
    pub table_file: Option<PathBuf>,
    pub gamma: Option<Vec<f64>>,
    pub coupling: Option<f64>,
    pub omega_t: Option<f64>,
    pub r: Option<f64>,
    pub rbar: Option<f64>,
    pub omega: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega_steps: Option<usize>,
    pub structure_constant: Option<f64>,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
    pub strict: Option<bool>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub static_from_lowest: Option<bool>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::usage(format!("config key '{key}': cannot parse '{value}': {e}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

impl RawOptions {
    /// Flat `key = value` text; keys are the long flag names. `#` starts a
    /// comment line.
    pub fn parse_config(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", idx + 1)))?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut raw = RawOptions::default();
        for (key, value) in &map {
            let v = value.as_str();
            match key.as_str() {
                "medium" => raw.medium = Some(parse_value(key, v)?),
                "table-file" => raw.table_file = Some(PathBuf::from(v)),
                "gamma" => raw.gamma = Some(parse_list(key, v)?),
                "coupling" => raw.coupling = Some(parse_value(key, v)?),
                "omega-t" => raw.omega_t = Some(parse_value(key, v)?),
                "r" => raw.r = Some(parse_value(key, v)?),
                "rbar" => raw.rbar = Some(parse_value(key, v)?),
                "omega" => raw.omega = Some(parse_value(key, v)?),
                "omega-min" => raw.omega_min = Some(parse_value(key, v)?),
                "omega-max" => raw.omega_max = Some(parse_value(key, v)?),
                "omega-steps" => raw.omega_steps = Some(parse_value(key, v)?),
                "structure-constant" => raw.structure_constant = Some(parse_value(key, v)?),
                "format" => raw.format = Some(parse_value(key, v)?),
                "output" => raw.output = Some(PathBuf::from(v)),
                "strict" => raw.strict = Some(parse_value(key, v)?),
                "tol" => raw.tol = Some(parse_value(key, v)?),
                "threads" => raw.threads = Some(parse_value(key, v)?),
                "static-from-lowest" => raw.static_from_lowest = Some(parse_value(key, v)?),
                other => return Err(CliError::usage(format!("unknown config key '{other}'"))),
            }
        }
        Ok(raw)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_config(&text)
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn layered_over(self, lower: RawOptions) -> RawOptions {
        RawOptions {
            medium: self.medium.or(lower.medium),
            table_file: self.table_file.or(lower.table_file),
            gamma: self.gamma.or(lower.gamma),
            coupling: self.coupling.or(lower.coupling),
            omega_t: self.omega_t.or(lower.omega_t),
            r: self.r.or(lower.r),
            rbar: self.rbar.or(lower.rbar),
            omega: self.omega.or(lower.omega),
            omega_min: self.omega_min.or(lower.omega_min),
            omega_max: self.omega_max.or(lower.omega_max),
            omega_steps: self.omega_steps.or(lower.omega_steps),
            structure_constant: self.structure_constant.or(lower.structure_constant),
            format: self.format.or(lower.format),
            output: self.output.or(lower.output),
            strict: self.strict.or(lower.strict),
            tol: self.tol.or(lower.tol),
            threads: self.threads.or(lower.threads),
            static_from_lowest: self.static_from_lowest.or(lower.static_from_lowest),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MediumSource {
    Lorentz { omega_t: f64, coupling: f64, gammas: Vec<f64> },
    Table { path: PathBuf, omega_t: f64 },
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub medium: MediumSource,
    pub geometry: Option<GeometrySpec>,
    pub omega: Option<f64>,
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_steps: Option<usize>,
    pub structure_constant: StructureConstant,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub strict: bool,
    pub tol: f64,
    pub threads: Option<usize>,
    pub static_from_lowest: bool,
}

impl RunConfig {
    pub fn resolve(raw: RawOptions) -> Result<Self, CliError> {
        let omega_t = raw.omega_t.unwrap_or(1.0);
        if !(omega_t.is_finite() && omega_t > 0.0) {
            return Err(CliError::usage(format!("--omega-t must be > 0, got {omega_t}")));
        }
        let kind = match (raw.medium, &raw.table_file) {
            (Some(k), _) => k,
            (None, Some(_)) => MediumKind::Table,
            (None, None) => MediumKind::Lorentz,
        };
        let medium = match kind {
            MediumKind::Lorentz => {
                if raw.table_file.is_some() {
                    return Err(CliError::usage("--table-file given with --medium lorentz; choose one medium source"));
                }
                MediumSource::Lorentz {
                    omega_t,
                    coupling: raw.coupling.unwrap_or(DEFAULT_COUPLING),
                    gammas: raw.gamma.unwrap_or_else(|| vec![DEFAULT_GAMMA]),
                }
            }
            MediumKind::Table => {
                let path = raw
                    .table_file
                    .ok_or_else(|| CliError::usage("--medium table requires --table-file"))?;
                if raw.gamma.is_some() || raw.coupling.is_some() {
                    return Err(CliError::usage("--gamma/--coupling apply to the lorentz medium only"));
                }
                MediumSource::Table { path, omega_t }
            }
        };
        let geometry = match (raw.r, raw.rbar) {
            (Some(_), Some(_)) => return Err(CliError::usage("give exactly one of --r and --rbar")),
            (Some(r), None) => Some(GeometrySpec::R(r)),
            (None, Some(rb)) => Some(GeometrySpec::Radius(rb)),
            (None, None) => None,
        };
        let tol = raw.tol.unwrap_or(DEFAULT_TOL);
        Ok(RunConfig {
            medium,
            geometry,
            omega: raw.omega,
            omega_min: raw.omega_min.unwrap_or(0.5 * omega_t),
            omega_max: raw.omega_max.unwrap_or(1.5 * omega_t),
            omega_steps: raw.omega_steps,
            structure_constant: StructureConstant::new(raw.structure_constant.unwrap_or(0.0))
                .map_err(CliError::from_core_usage)?,
            format: raw.format.unwrap_or(OutputFormat::Csv),
            output: raw.output,
            strict: raw.strict.unwrap_or(false),
            tol,
            threads: raw.threads,
            static_from_lowest: raw.static_from_lowest.unwrap_or(false),
        })
    }

    pub fn omega_t(&self) -> f64 {
        match &self.medium {
            MediumSource::Lorentz { omega_t, .. } | MediumSource::Table { omega_t, .. } => *omega_t,
        }
    }

    /// The single medium for eval/sweep/check.
    pub fn single_medium(&self) -> Result<Medium, CliError> {
        match &self.medium {
            MediumSource::Lorentz { omega_t, coupling, gammas } => {
                let gamma = match gammas.as_slice() {
                    [g] => *g,
                    [] => return Err(CliError::usage("--gamma list is empty")),
                    _ => return Err(CliError::usage("this command takes a single --gamma value")),
                };
                LorentzMedium::new(*omega_t, *coupling, gamma)
                    .map(Medium::Lorentz)
                    .map_err(CliError::from_core_usage)
            }
            MediumSource::Table { path, omega_t } => TabulatedMedium::from_path(path)
                .and_then(|t| t.with_omega_t(*omega_t))
                .map(Medium::Table)
                .map_err(CliError::from_core_usage),
        }
    }

    pub fn geometry(&self) -> Result<CavityGeometry, CliError> {
        let omega_t = self.omega_t();
        match self.geometry {
            Some(GeometrySpec::R(r)) => CavityGeometry::from_r(r, omega_t),
            Some(GeometrySpec::Radius(rb)) => CavityGeometry::from_radius(rb, omega_t),
            None => return Err(CliError::usage("one of --r or --rbar is required")),
        }
        .map_err(CliError::from_core_usage)
    }

    pub fn grid(&self, default_steps: usize) -> Result<SpectrumGrid, CliError> {
        SpectrumGrid::new(self.omega_min, self.omega_max, self.omega_steps.unwrap_or(default_steps))
            .map_err(CliError::from_core_usage)
    }

    pub fn rmin_grid(&self) -> Result<SpectrumGrid, CliError> {
        self.grid(DEFAULT_SCAN_POINTS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let raw = RawOptions::parse_config("# comment\ngamma = 0.01, 0.02\nr=20\nformat = json\nstrict=true\n").unwrap();
        assert_eq!(raw.gamma, Some(vec![0.01, 0.02]));
        assert_eq!(raw.r, Some(20.0));
        assert_eq!(raw.format, Some(OutputFormat::Json));
        assert_eq!(raw.strict, Some(true));
        assert!(RawOptions::parse_config("bogus = 1").is_err());
        assert!(RawOptions::parse_config("gamma").is_err());
        assert!(RawOptions::parse_config("r = abc").is_err());
    }

    #[test]
    fn flags_override_file_override_defaults() {
        let file = RawOptions::parse_config("gamma = 0.05\ncoupling = 1.0\nr = 30").unwrap();
        let flags = RawOptions { gamma: Some(vec![0.2]), ..Default::default() };
        let cfg = RunConfig::resolve(flags.layered_over(file)).unwrap();
        assert_eq!(
            cfg.medium,
            MediumSource::Lorentz { omega_t: 1.0, coupling: 1.0, gammas: vec![0.2] }
        );
        assert_eq!(cfg.geometry, Some(GeometrySpec::R(30.0)));
        assert_eq!(cfg.tol, DEFAULT_TOL);
        assert_eq!((cfg.omega_min, cfg.omega_max), (0.5, 1.5));
    }

    #[test]
    fn exclusive_options() {
        let both = RawOptions { r: Some(1.0), rbar: Some(1.0), ..Default::default() };
        assert!(RunConfig::resolve(both).is_err());
        let table_no_file = RawOptions { medium: Some(MediumKind::Table), ..Default::default() };
        assert!(RunConfig::resolve(table_no_file).is_err());
        let mixed = RawOptions {
            medium: Some(MediumKind::Lorentz),
            table_file: Some("x".into()),
            ..Default::default()
        };
        assert!(RunConfig::resolve(mixed).is_err());
        let no_geom = RunConfig::resolve(RawOptions::default()).unwrap();
        assert!(no_geom.geometry().is_err());
    }
}
