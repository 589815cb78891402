//! Run configuration from flags and `key = value` files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use pairci_core::crossover::DEFAULT_THRESHOLD;
use pairci_core::solver::OmegaChoice;
use pairci_core::{Grid, OmegaSearchConfig, PotentialSpec};

use crate::error::{CliError, Result};

/// Keys accepted in config files. Flags use the same names with `-` in
/// place of `_`.
pub const KEYS: &[&str] = &[
    "potential",
    "a",
    "coefficients",
    "g",
    "g_min",
    "g_max",
    "points",
    "spacing",
    "g_values",
    "K",
    "n_states",
    "omega",
    "omega_lo",
    "omega_hi",
    "omega_rel_tol",
    "grid_half_width",
    "grid_points",
    "format",
    "out",
    "workers",
    "threshold",
    "rel_tol",
    "count",
    "type",
];

pub const DEFAULT_CUTOFF: usize = 40;
pub const DEFAULT_STATES: usize = 3;
pub const DEFAULT_COUNT: usize = 8;
pub const DEFAULT_REL_TOL: f64 = 1e-4;

fn normalize_key(raw: &str) -> String {
    let k = raw.trim().replace('-', "_");
    if k == "k" {
        "K".to_string()
    } else {
        k
    }
}

/// Raw string settings, merged from a file and then from flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Settings::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value, got {line:?}", n + 1)))?;
            let key = normalize_key(key);
            if out.values.contains_key(&key) {
                return Err(CliError::Config(format!("line {}: duplicate key {key}", n + 1)));
            }
            out.set(&key, value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {}", n + 1, e.message())))?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Settings::parse(&text)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown key {key}")));
        }
        self.values.insert(key, value.to_string());
        Ok(())
    }

    /// Entries of `other` replace those already present.
    pub fn overlay(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Config(format!("{key}: expected a finite number, got {v:?}")))
            })
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| v.parse::<usize>().map_err(|_| CliError::Config(format!("{key}: expected a nonnegative integer, got {v:?}"))))
            .transpose()
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        let s = s.trim();
                        s.parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| CliError::Config(format!("{key}: bad entry {s:?}")))
                    })
                    .collect()
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Tg,
    ExactHarmonic,
    Grid2d,
    Grid1d,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Tg => "tg",
            OracleKind::ExactHarmonic => "exact-harmonic",
            OracleKind::Grid2d => "grid2d",
            OracleKind::Grid1d => "grid1d",
        }
    }
}

/// Validated configuration shared by all subcommands. Fields that only
/// some subcommands need are checked by the `require_*` accessors.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub g: Option<f64>,
    pub g_values: Option<Vec<f64>>,
    pub g_bracket: Option<(f64, f64)>,
    pub spacing: Spacing,
    pub cutoff: usize,
    pub n_states: usize,
    pub omega: OmegaChoice,
    pub grid: Option<Grid>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub threshold: f64,
    pub rel_tol: f64,
    pub count: usize,
    pub oracle: Option<OracleKind>,
}

fn potential_from(s: &Settings) -> Result<PotentialSpec> {
    let a = s.f64("a")?;
    let coefficients = s.list("coefficients")?;
    let name = s.get("potential").unwrap_or(if coefficients.is_some() { "custom" } else { "harmonic" });
    let need_a = || a.ok_or_else(|| CliError::Config(format!("potential {name} needs the shape parameter a")));
    let reject = |what: &str| Err(CliError::Config(format!("{what} given for potential {name}")));
    let v = match name {
        "harmonic" => {
            if a.is_some() {
                return reject("a");
            }
            if coefficients.is_some() {
                return reject("coefficients");
            }
            PotentialSpec::harmonic()
        }
        "double_well" | "triple_well" => {
            if coefficients.is_some() {
                return reject("coefficients");
            }
            if name == "double_well" {
                PotentialSpec::double_well(need_a()?)?
            } else {
                PotentialSpec::triple_well(need_a()?)?
            }
        }
        "custom" => {
            if a.is_some() {
                return reject("a");
            }
            let c = coefficients.ok_or_else(|| CliError::Config("custom potential needs coefficients".into()))?;
            PotentialSpec::from_coefficients(c)?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown potential {other:?} (harmonic, double_well, triple_well, custom)"
            )))
        }
    };
    Ok(v)
}

fn g_range(s: &Settings, spacing: Spacing) -> Result<Option<Vec<f64>>> {
    if let Some(v) = s.list("g_values")? {
        if v.is_empty() {
            return Err(CliError::Config("g_values is empty".into()));
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("g_values must be strictly ascending".into()));
        }
        return Ok(Some(v));
    }
    let (Some(lo), Some(hi)) = (s.f64("g_min")?, s.f64("g_max")?) else {
        return Ok(None);
    };
    let n = s.usize("points")?.unwrap_or(21);
    if n == 0 {
        return Err(CliError::Config("points must be at least 1".into()));
    }
    if lo > hi || (n > 1 && lo == hi) {
        return Err(CliError::Config(format!("empty g range [{lo}, {hi}]")));
    }
    if n == 1 {
        return Ok(Some(vec![lo]));
    }
    let t = |i: usize| i as f64 / (n - 1) as f64;
    let values = match spacing {
        Spacing::Linear => (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * t(i) }).collect(),
        Spacing::Log => {
            if lo <= 0.0 {
                return Err(CliError::Config("log spacing needs g_min > 0".into()));
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    _ if i == n - 1 => hi,
                    _ => (a + (b - a) * t(i)).exp(),
                })
                .collect()
        }
    };
    Ok(Some(values))
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let potential = potential_from(s)?;
        let spacing = match s.get("spacing").unwrap_or("lin") {
            "lin" | "linear" => Spacing::Linear,
            "log" => Spacing::Log,
            other => return Err(CliError::Config(format!("spacing must be lin or log, got {other:?}"))),
        };
        let cutoff = s.usize("K")?.unwrap_or(DEFAULT_CUTOFF);
        if cutoff == 0 {
            return Err(CliError::Config("K must be at least 1".into()));
        }
        let n_states = s.usize("n_states")?.unwrap_or(DEFAULT_STATES);
        if n_states == 0 {
            return Err(CliError::Config("n_states must be at least 1".into()));
        }

        let mut search = OmegaSearchConfig::default();
        if let Some(lo) = s.f64("omega_lo")? {
            search.lo = lo;
        }
        if let Some(hi) = s.f64("omega_hi")? {
            search.hi = hi;
        }
        if let Some(t) = s.f64("omega_rel_tol")? {
            search.rel_tol = t;
        }
        search.validate()?;
        let omega = match s.get("omega").unwrap_or("auto") {
            "auto" => OmegaChoice::Optimize(search),
            v => match v.parse::<f64>() {
                Ok(w) if w.is_finite() && w > 0.0 => OmegaChoice::Fixed(w),
                _ => return Err(CliError::Config(format!("omega must be auto or a positive number, got {v:?}"))),
            },
        };

        let grid = match (s.f64("grid_half_width")?, s.usize("grid_points")?) {
            (None, None) => None,
            (Some(l), Some(m)) => Some(Grid::new(l, m)?),
            _ => return Err(CliError::Config("grid_half_width and grid_points go together".into())),
        };
        let format = match s.get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::Config(format!("format must be csv or json, got {other:?}"))),
        };
        let workers = s.usize("workers")?;
        if workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        let threshold = s.f64("threshold")?.unwrap_or(DEFAULT_THRESHOLD);
        let rel_tol = s.f64("rel_tol")?.unwrap_or(DEFAULT_REL_TOL);
        if rel_tol <= 0.0 {
            return Err(CliError::Config("rel_tol must be positive".into()));
        }
        let count = s.usize("count")?.unwrap_or(DEFAULT_COUNT);
        if count == 0 {
            return Err(CliError::Config("count must be at least 1".into()));
        }
        let oracle = s
            .get("type")
            .map(|t| match t {
                "tg" => Ok(OracleKind::Tg),
                "exact-harmonic" | "exact_harmonic" => Ok(OracleKind::ExactHarmonic),
                "grid2d" => Ok(OracleKind::Grid2d),
                "grid1d" => Ok(OracleKind::Grid1d),
                other => Err(CliError::Config(format!(
                    "oracle type must be tg, exact-harmonic, grid2d or grid1d, got {other:?}"
                ))),
            })
            .transpose()?;
        let g_bracket = match (s.f64("g_min")?, s.f64("g_max")?) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => None,
        };

        Ok(RunConfig {
            potential,
            g: s.f64("g")?,
            g_values: g_range(s, spacing)?,
            g_bracket,
            spacing,
            cutoff,
            n_states,
            omega,
            grid,
            format,
            out: s.get("out").map(PathBuf::from),
            workers,
            threshold,
            rel_tol,
            count,
            oracle,
        })
    }

    pub fn require_g(&self) -> Result<f64> {
        self.g.ok_or_else(|| CliError::Config("g is required".into()))
    }

    pub fn require_g_values(&self) -> Result<&[f64]> {
        self.g_values
            .as_deref()
            .ok_or_else(|| CliError::Config("sweep needs g_values or g_min, g_max (and points)".into()))
    }

    pub fn require_bracket(&self) -> Result<(f64, f64)> {
        let (lo, hi) = self
            .g_bracket
            .ok_or_else(|| CliError::Config("crossover needs g_min and g_max".into()))?;
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(CliError::Config(format!("empty bracket [{lo}, {hi}]")));
        }
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        let mut s = Settings::new();
        for (k, v) in pairs {
            s.set(k, v).unwrap();
        }
        s
    }

    #[test]
    fn file_syntax() {
        let s = Settings::parse("# comment\npotential = double_well\n\na=0.025  # trailing\nk = 60\n").unwrap();
        assert_eq!(s.get("potential"), Some("double_well"));
        assert_eq!(s.get("a"), Some("0.025"));
        assert_eq!(s.get("K"), Some("60"));
        assert!(Settings::parse("K = 1\nK = 2\n").is_err());
        assert!(Settings::parse("nonsense = 1\n").is_err());
        assert!(Settings::parse("just text\n").is_err());
    }

    #[test]
    fn overlay_lets_later_entries_win() {
        let mut file = settings(&[("g", "1"), ("K", "20")]);
        file.overlay(&settings(&[("g", "2")]));
        assert_eq!(file.get("g"), Some("2"));
        assert_eq!(file.get("K"), Some("20"));
    }

    #[test]
    fn potentials() {
        let c = RunConfig::from_settings(&settings(&[("potential", "triple_well"), ("a", "0.025")])).unwrap();
        assert_eq!(c.potential, PotentialSpec::triple_well(0.025).unwrap());
        assert!(RunConfig::from_settings(&settings(&[("potential", "double_well")])).is_err());
        assert!(RunConfig::from_settings(&settings(&[("potential", "harmonic"), ("a", "1")])).is_err());
        let c = RunConfig::from_settings(&settings(&[("coefficients", "0, 0, 0.5")])).unwrap();
        assert_eq!(c.potential.coefficients(), &[0.0, 0.0, 0.5]);
        assert!(RunConfig::from_settings(&settings(&[("coefficients", "0, 1")])).is_err());
        assert!(RunConfig::from_settings(&settings(&[("potential", "quartic")])).is_err());
    }

    #[test]
    fn ranges() {
        let c = RunConfig::from_settings(&settings(&[("g_min", "0"), ("g_max", "20"), ("points", "41")])).unwrap();
        let g = c.require_g_values().unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!((g[0], g[1], g[40]), (0.0, 0.5, 20.0));
        let c = RunConfig::from_settings(&settings(&[
            ("g_min", "1e-9"),
            ("g_max", "1e-6"),
            ("points", "4"),
            ("spacing", "log"),
        ]))
        .unwrap();
        let g = c.require_g_values().unwrap();
        assert_eq!((g[0], g[3]), (1e-9, 1e-6));
        assert!((g[1] / 1e-8 - 1.0).abs() < 1e-12);
        let bad = |p: &[(&str, &str)]| RunConfig::from_settings(&settings(p)).is_err();
        assert!(bad(&[("g_min", "0"), ("g_max", "1"), ("spacing", "log")]));
        assert!(bad(&[("g_min", "2"), ("g_max", "1")]));
        assert!(bad(&[("g_values", "0, 2, 1")]));
        assert!(bad(&[("g_min", "0"), ("g_max", "1"), ("points", "0")]));
    }

    #[test]
    fn scalar_options() {
        let bad = |p: &[(&str, &str)]| RunConfig::from_settings(&settings(p)).is_err();
        assert!(bad(&[("omega", "-1")]));
        assert!(bad(&[("omega", "fast")]));
        assert!(bad(&[("K", "0")]));
        assert!(bad(&[("K", "1.5")]));
        assert!(bad(&[("format", "xml")]));
        assert!(bad(&[("grid_points", "11")]));
        assert!(bad(&[("workers", "0")]));
        assert!(bad(&[("type", "magic")]));
        assert!(bad(&[("g", "nan")]));
        let c = RunConfig::from_settings(&settings(&[("omega", "0.5"), ("format", "json")])).unwrap();
        assert_eq!(c.omega, OmegaChoice::Fixed(0.5));
        assert_eq!(c.format, Format::Json);
        assert!(c.require_g().is_err());
    }
}
