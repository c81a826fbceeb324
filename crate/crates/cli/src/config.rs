//! Run configuration: a flat `key = value` file with `[section]` headers.
//!
//! Every key is listed in [`KEYS`] with its default. Unknown sections and
//! keys are rejected with the line they appear on. Values given on the
//! command line are applied after the file and win over it.
//!
//! ```text
//! [system]
//! V_eV = 0.3
//! E_eV = 0.001
//! L_nm = 4.0
//!
//! [scan]
//! L_grid = 1:12:23
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Where a value came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    CommandLine,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::CommandLine => f.write_str("command line"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: cannot parse `{text}` (expected `key = value` or `[section]`)")]
    Syntax { origin: Origin, text: String },
    #[error("{origin}: unknown section `[{section}]`")]
    UnknownSection { origin: Origin, section: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("{origin}: `{key}` is given twice")]
    DuplicateKey { origin: Origin, key: String },
    #[error("{origin}: `{key}` expects {expected}, found `{found}`")]
    TypeError {
        origin: Origin,
        key: String,
        expected: &'static str,
        found: String,
    },
    #[error("missing required key `{key}`")]
    MissingRequired { key: String },
    #[error("{origin}: invalid `{key}`: {reason}")]
    Invalid { origin: Origin, key: String, reason: String },
}

/// Kind of value a key holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Positive,
    NonNegative,
    Count,
    Grid,
    List,
    Text,
}

impl Kind {
    fn describe(self) -> &'static str {
        match self {
            Kind::Positive => "a positive number",
            Kind::NonNegative => "a non-negative number",
            Kind::Count => "a positive integer",
            Kind::Grid => "a grid `start:stop:count[:log]`",
            Kind::List => "a comma-separated list of numbers",
            Kind::Text => "text",
        }
    }
}

/// One recognised key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    /// `None` for required keys and for defaults derived from other keys.
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: Option<&'static str>, doc: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind,
        default,
        doc,
    }
}

/// Every accepted key with its default, in provenance order.
pub const KEYS: &[KeySpec] = &[
    key("system.V_eV", Kind::Positive, None, "barrier height (eV), required"),
    key("system.E_eV", Kind::Positive, None, "incidence energy (eV), required"),
    key("system.L_nm", Kind::Positive, None, "barrier width (nm), required"),
    key("system.mass_ratio", Kind::Positive, Some("0.067"), "effective mass over the electron mass"),
    key("numerics.tol", Kind::Positive, Some("1e-10"), "relative truncation tolerance"),
    key("numerics.max_poles", Kind::Count, Some("512"), "largest number of pole pairs"),
    key("numerics.underflow_guard", Kind::Positive, Some("1e-150"), "smallest |Ψ| for ω_av and σ"),
    key("window.t_lo", Kind::Positive, Some("0.01"), "start of the peak search (fs)"),
    key("window.t_hi", Kind::Positive, Some("50"), "end of the peak search (fs)"),
    key("window.points", Kind::Count, Some("2000"), "coarse search points, log spaced"),
    key("window.ripple", Kind::NonNegative, Some("1e-6"), "smallest peak relative to the stationary density"),
    key("evolve.x_nm", Kind::NonNegative, None, "observation point (nm); defaults to L"),
    key("evolve.times", Kind::Grid, Some("0.01:50:500:log"), "time grid (fs)"),
    key("poles.count", Kind::Count, Some("16"), "pole pairs to list"),
    key("scan.L_grid", Kind::Grid, Some("1:12:23"), "barrier widths (nm)"),
    key("scan.x_over_L", Kind::Grid, Some("0.25:6:24"), "positions in units of L"),
    key("scan.alpha_grid", Kind::Grid, Some("1:5:41"), "opacities"),
    key("scan.u", Kind::List, Some("300"), "ratios V/E for the opacity scans"),
    key("scan.V_ref_eV", Kind::Positive, None, "barrier height of the opacity scans; defaults to V"),
    key("scan.crossing_tol", Kind::Positive, Some("1e-3"), "bisection tolerance on α"),
    key("oracle.probes_over_L", Kind::List, Some("0.5,1,2"), "probe positions in units of L"),
    key("oracle.times", Kind::Grid, Some("1:30:117"), "comparison times (fs)"),
    key("oracle.dx_nm", Kind::Positive, None, "grid step (nm); defaults to about 0.01 with L on the grid"),
    key("oracle.dt_fs", Kind::Positive, Some("0.002"), "largest time step (fs)"),
    key("output.path", Kind::Text, Some("-"), "output file, `-` for standard output"),
];

fn spec(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

/// `start:stop:count`, optionally with `:log` or `:lin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err("expected start:stop:count[:log]".into());
        }
        let number = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
        let start = number(parts[0])?;
        let stop = number(parts[1])?;
        let count: usize = parts[2].parse().map_err(|_| format!("`{}` is not a count", parts[2]))?;
        let log = match parts.get(3) {
            None | Some(&"lin") => false,
            Some(&"log") => true,
            Some(other) => return Err(format!("unknown spacing `{other}`")),
        };
        if !(start.is_finite() && stop.is_finite()) || count == 0 {
            return Err("bounds must be finite and count at least 1".into());
        }
        if stop < start || (count > 1 && stop == start) {
            return Err("stop must exceed start".into());
        }
        if log && start <= 0.0 {
            return Err("log spacing needs a positive start".into());
        }
        Ok(Self { start, stop, count, log })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / last;
                if i + 1 == self.count {
                    self.stop
                } else if self.log {
                    self.start * (self.stop / self.start).powf(f)
                } else {
                    self.start + (self.stop - self.start) * f
                }
            })
            .collect()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}:{}", self.start, self.stop, self.count)?;
        if self.log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemBlock {
    pub v_ev: f64,
    pub e_ev: f64,
    pub l_nm: f64,
    pub mass_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericsBlock {
    pub tol: f64,
    pub max_poles: usize,
    pub underflow_guard: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowBlock {
    pub t_lo: f64,
    pub t_hi: f64,
    pub points: usize,
    pub ripple: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveBlock {
    pub x_nm: f64,
    pub times: GridSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanBlock {
    pub l_grid: GridSpec,
    pub x_over_l: GridSpec,
    pub alpha_grid: GridSpec,
    pub u: Vec<f64>,
    pub v_ref_ev: f64,
    pub crossing_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleBlock {
    pub probes_over_l: Vec<f64>,
    pub times: GridSpec,
    pub dx_nm: f64,
    pub dt_fs: f64,
}

/// A fully validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemBlock,
    pub numerics: NumericsBlock,
    pub window: WindowBlock,
    pub evolve: EvolveBlock,
    pub poles_count: usize,
    pub scan: ScanBlock,
    pub oracle: OracleBlock,
    pub output: String,
}

struct Raw {
    value: String,
    origin: Origin,
}

/// Splits the text into `section.key → value` entries.
fn read_entries(text: &str, into: &mut BTreeMap<String, Raw>) -> Result<(), ConfigError> {
    let mut section = String::new();
    for (i, line) in text.lines().enumerate() {
        let origin = Origin::Line(i + 1);
        let content = line.split(['#', ';']).next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if !KEYS.iter().any(|k| k.name.split('.').next() == Some(name)) {
                return Err(ConfigError::UnknownSection {
                    origin,
                    section: name.to_string(),
                });
            }
            section = name.to_string();
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                origin,
                text: line.trim().to_string(),
            });
        };
        let k = k.trim();
        let name = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
        if k.is_empty() || spec(&name).is_none() {
            return Err(ConfigError::UnknownKey { origin, key: name });
        }
        if into.contains_key(&name) {
            return Err(ConfigError::DuplicateKey { origin, key: name });
        }
        into.insert(
            name,
            Raw {
                value: v.trim().to_string(),
                origin,
            },
        );
    }
    Ok(())
}

/// Parses a configuration file with no command-line overrides.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::build(Some(text), &[])
}

impl RunConfig {
    /// File values first, then `overrides` (`section.key`, value) on top.
    pub fn build(text: Option<&str>, overrides: &[(String, String)]) -> Result<Self, ConfigError> {
        let mut raw = BTreeMap::new();
        if let Some(text) = text {
            read_entries(text, &mut raw)?;
        }
        for (k, v) in overrides {
            if spec(k).is_none() {
                return Err(ConfigError::UnknownKey {
                    origin: Origin::CommandLine,
                    key: k.clone(),
                });
            }
            raw.insert(
                k.clone(),
                Raw {
                    value: v.trim().to_string(),
                    origin: Origin::CommandLine,
                },
            );
        }
        Reader { raw }.finish()
    }

    /// Rebuilds the configuration recorded in a CSV provenance line.
    pub fn from_provenance(line: &str) -> Result<Self, ConfigError> {
        Self::build(None, &Provenance::parse(line).entries)
    }

    /// Every key with its effective value, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let num = |v: f64| format!("{v:?}");
        let list = |v: &[f64]| v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(",");
        KEYS.iter()
            .map(|k| {
                let value = match k.name {
                    "system.V_eV" => num(self.system.v_ev),
                    "system.E_eV" => num(self.system.e_ev),
                    "system.L_nm" => num(self.system.l_nm),
                    "system.mass_ratio" => num(self.system.mass_ratio),
                    "numerics.tol" => num(self.numerics.tol),
                    "numerics.max_poles" => self.numerics.max_poles.to_string(),
                    "numerics.underflow_guard" => num(self.numerics.underflow_guard),
                    "window.t_lo" => num(self.window.t_lo),
                    "window.t_hi" => num(self.window.t_hi),
                    "window.points" => self.window.points.to_string(),
                    "window.ripple" => num(self.window.ripple),
                    "evolve.x_nm" => num(self.evolve.x_nm),
                    "evolve.times" => self.evolve.times.to_string(),
                    "poles.count" => self.poles_count.to_string(),
                    "scan.L_grid" => self.scan.l_grid.to_string(),
                    "scan.x_over_L" => self.scan.x_over_l.to_string(),
                    "scan.alpha_grid" => self.scan.alpha_grid.to_string(),
                    "scan.u" => list(&self.scan.u),
                    "scan.V_ref_eV" => num(self.scan.v_ref_ev),
                    "scan.crossing_tol" => num(self.scan.crossing_tol),
                    "oracle.probes_over_L" => list(&self.oracle.probes_over_l),
                    "oracle.times" => self.oracle.times.to_string(),
                    "oracle.dx_nm" => num(self.oracle.dx_nm),
                    "oracle.dt_fs" => num(self.oracle.dt_fs),
                    "output.path" => self.output.clone(),
                    other => unreachable!("key {other} has no accessor"),
                };
                (k.name, value)
            })
            .collect()
    }
}

/// The `command=` token and `section.key=value` pairs of a provenance line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub command: Option<String>,
    pub entries: Vec<(String, String)>,
}

impl Provenance {
    /// True for the first line of a file written by this tool.
    pub fn is_provenance(line: &str) -> bool {
        line.trim_start_matches('#').trim_start().starts_with("qshutter ")
    }

    pub fn parse(line: &str) -> Self {
        let mut out = Self::default();
        for (k, v) in line.trim_start_matches('#').split_whitespace().filter_map(|t| t.split_once('=')) {
            if k == "command" {
                out.command = Some(v.to_string());
            } else if k.contains('.') {
                out.entries.push((k.to_string(), v.to_string()));
            }
        }
        out
    }
}

struct Reader {
    raw: BTreeMap<String, Raw>,
}

impl Reader {
    fn text(&self, name: &'static str) -> Option<(&str, Origin)> {
        self.raw
            .get(name)
            .map(|r| (r.value.as_str(), r.origin))
            .or_else(|| spec(name).and_then(|s| s.default).map(|d| (d, Origin::Default)))
    }

    fn type_error(name: &str, origin: Origin, found: &str) -> ConfigError {
        ConfigError::TypeError {
            origin,
            key: name.to_string(),
            expected: spec(name).map_or("a value", |s| s.kind.describe()),
            found: found.to_string(),
        }
    }

    fn invalid(name: &str, origin: Origin, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            origin,
            key: name.to_string(),
            reason: reason.into(),
        }
    }

    fn number(&self, name: &'static str) -> Result<Option<f64>, ConfigError> {
        let Some((text, origin)) = self.text(name) else {
            return Ok(None);
        };
        let v: f64 = text.parse().map_err(|_| Self::type_error(name, origin, text))?;
        let ok = match spec(name).map(|s| s.kind) {
            Some(Kind::NonNegative) => v.is_finite() && v >= 0.0,
            _ => v.is_finite() && v > 0.0,
        };
        if !ok {
            let kind = spec(name).map_or("valid", |s| s.kind.describe());
            return Err(Self::invalid(name, origin, format!("{v} is not {kind}")));
        }
        Ok(Some(v))
    }

    fn required(&self, name: &'static str) -> Result<f64, ConfigError> {
        self.number(name)?.ok_or(ConfigError::MissingRequired { key: name.to_string() })
    }

    fn with_default(&self, name: &'static str, fallback: f64) -> Result<f64, ConfigError> {
        Ok(self.number(name)?.unwrap_or(fallback))
    }

    fn count(&self, name: &'static str) -> Result<usize, ConfigError> {
        let (text, origin) = self.text(name).expect("count keys have defaults");
        match text.parse::<usize>() {
            Ok(0) => Err(Self::invalid(name, origin, "must be at least 1")),
            Ok(n) => Ok(n),
            Err(_) => Err(Self::type_error(name, origin, text)),
        }
    }

    fn grid(&self, name: &'static str) -> Result<GridSpec, ConfigError> {
        let (text, origin) = self.text(name).expect("grid keys have defaults");
        if text.split(':').count() < 3 {
            return Err(Self::type_error(name, origin, text));
        }
        GridSpec::parse(text).map_err(|reason| Self::invalid(name, origin, reason))
    }

    fn list(&self, name: &'static str) -> Result<Vec<f64>, ConfigError> {
        let (text, origin) = self.text(name).expect("list keys have defaults");
        let values = text
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Self::type_error(name, origin, text))?;
        if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Self::invalid(name, origin, "values must be positive"));
        }
        Ok(values)
    }

    fn finish(self) -> Result<RunConfig, ConfigError> {
        let system = SystemBlock {
            v_ev: self.required("system.V_eV")?,
            e_ev: self.required("system.E_eV")?,
            l_nm: self.required("system.L_nm")?,
            mass_ratio: self.required("system.mass_ratio")?,
        };
        if (system.v_ev - system.e_ev).abs() <= 1e-14 * system.v_ev {
            let origin = self.text("system.E_eV").map_or(Origin::Default, |t| t.1);
            return Err(Self::invalid("system.E_eV", origin, "E must differ from V"));
        }
        let window = WindowBlock {
            t_lo: self.required("window.t_lo")?,
            t_hi: self.required("window.t_hi")?,
            points: self.count("window.points")?,
            ripple: self.required("window.ripple")?,
        };
        if window.t_hi <= window.t_lo {
            let origin = self.text("window.t_hi").map_or(Origin::Default, |t| t.1);
            return Err(Self::invalid("window.t_hi", origin, "must exceed window.t_lo"));
        }
        if window.points < 3 {
            let origin = self.text("window.points").map_or(Origin::Default, |t| t.1);
            return Err(Self::invalid("window.points", origin, "at least 3 points are needed"));
        }
        let times_positive = |name: &'static str, g: GridSpec| {
            if g.start > 0.0 {
                Ok(g)
            } else {
                let origin = self.text(name).map_or(Origin::Default, |t| t.1);
                Err(Self::invalid(name, origin, "times must be positive"))
            }
        };
        let l = system.l_nm;
        let default_dx = l / (l / 0.01).ceil();
        Ok(RunConfig {
            numerics: NumericsBlock {
                tol: self.required("numerics.tol")?,
                max_poles: self.count("numerics.max_poles")?,
                underflow_guard: self.required("numerics.underflow_guard")?,
            },
            window,
            evolve: EvolveBlock {
                x_nm: self.with_default("evolve.x_nm", l)?,
                times: times_positive("evolve.times", self.grid("evolve.times")?)?,
            },
            poles_count: self.count("poles.count")?,
            scan: ScanBlock {
                l_grid: self.positive_grid("scan.L_grid")?,
                x_over_l: self.positive_grid("scan.x_over_L")?,
                alpha_grid: self.positive_grid("scan.alpha_grid")?,
                u: self.list("scan.u")?,
                v_ref_ev: self.with_default("scan.V_ref_eV", system.v_ev)?,
                crossing_tol: self.required("scan.crossing_tol")?,
            },
            oracle: OracleBlock {
                probes_over_l: self.list("oracle.probes_over_L")?,
                times: times_positive("oracle.times", self.grid("oracle.times")?)?,
                dx_nm: self.with_default("oracle.dx_nm", default_dx)?,
                dt_fs: self.required("oracle.dt_fs")?,
            },
            output: self.output_path()?,
            system,
        })
    }

    fn output_path(&self) -> Result<String, ConfigError> {
        let (text, origin) = self.text("output.path").expect("output.path has a default");
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(Self::invalid("output.path", origin, "must be non-empty and contain no whitespace"));
        }
        Ok(text.to_string())
    }

    fn positive_grid(&self, name: &'static str) -> Result<GridSpec, ConfigError> {
        let g = self.grid(name)?;
        if g.start > 0.0 {
            Ok(g)
        } else {
            let origin = self.text(name).map_or(Origin::Default, |t| t.1);
            Err(Self::invalid(name, origin, "values must be positive"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[system]\nV_eV = 0.3\nE_eV = 0.001\nL_nm = 4.0\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.system.mass_ratio, 0.067);
        assert_eq!(cfg.numerics.tol, 1e-10);
        assert_eq!(cfg.numerics.max_poles, 512);
        assert_eq!(cfg.evolve.x_nm, 4.0);
        assert_eq!(cfg.scan.v_ref_ev, 0.3);
        assert_eq!(cfg.output, "-");
    }

    #[test]
    fn negative_height_names_the_key() {
        let err = parse_config("[system]\nV_eV = -0.3\nE_eV = 0.001\nL_nm = 4\n").unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, origin: Origin::Line(2), .. } if key == "system.V_eV"));
        assert!(err.to_string().contains("V_eV"));
    }

    #[test]
    fn missing_and_unknown_keys() {
        let err = parse_config("[system]\nV_eV = 0.3\nL_nm = 4\n").unwrap_err();
        assert_eq!(err, ConfigError::MissingRequired { key: "system.E_eV".into() });
        let err = parse_config(&format!("{MINIMAL}V = 1\n")).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { origin: Origin::Line(5), .. }));
        let err = parse_config(&format!("{MINIMAL}[plot]\n")).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownSection { .. }));
        let err = parse_config(&format!("{MINIMAL}L_nm = 5\n")).unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { .. }));
        let err = parse_config(&format!("{MINIMAL}oops\n")).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { origin: Origin::Line(5), .. }));
    }

    #[test]
    fn type_errors_name_key_and_line() {
        let err = parse_config(&format!("{MINIMAL}[numerics]\nmax_poles = many\n")).unwrap_err();
        match err {
            ConfigError::TypeError { key, origin, .. } => {
                assert_eq!(key, "numerics.max_poles");
                assert_eq!(origin, Origin::Line(6));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn command_line_wins() {
        let cfg = RunConfig::build(Some(MINIMAL), &[("system.E_eV".into(), "0.01".into())]).unwrap();
        assert_eq!(cfg.system.e_ev, 0.01);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# a run\n\n[system] ; trailing\nV_eV = 0.3 # eV\nE_eV=0.001\nL_nm = 4\n";
        assert_eq!(parse_config(text).unwrap().system.v_ev, 0.3);
    }

    #[test]
    fn grids() {
        let g = GridSpec::parse("1:12:23").unwrap();
        let v = g.values();
        assert_eq!(v.len(), 23);
        assert_eq!((v[0], v[22]), (1.0, 12.0));
        assert!((v[1] - 1.5).abs() < 1e-15);
        let g = GridSpec::parse("0.01:50:5:log").unwrap();
        let v = g.values();
        assert!((v[1] / v[0] - v[2] / v[1]).abs() < 1e-12);
        assert_eq!(GridSpec::parse(&g.to_string()).unwrap(), g);
        for bad in ["1:2", "2:1:3", "0:1:3:log", "1:2:0", "1:2:3:cubic"] {
            assert!(GridSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn provenance_round_trip() {
        let cfg = RunConfig::build(
            Some(MINIMAL),
            &[("scan.u".into(), "5,10,300".into()), ("evolve.times".into(), "0.1:3:7:log".into())],
        )
        .unwrap();
        let line: String = cfg.entries().iter().map(|(k, v)| format!(" {k}={v}")).collect();
        assert_eq!(RunConfig::from_provenance(&format!("# qshutter 0.1.0 command=tmax{line}")).unwrap(), cfg);
    }
}
