//! Run configuration: flat `key = value` files overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("invalid value {value:?} for {key}: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("q must satisfy 0 < q <= 1 (got {0})")]
    QOutOfRange(f64),
    #[error("cutoff L must be a half-integer >= 5/2 (got {0})")]
    BadCutoff(String),
    #[error("buffer B must satisfy 1 <= B < L (got {0})")]
    BadBuffer(i32),
    #[error("tolerance {key} must be positive (got {value})")]
    NonPositiveTolerance { key: String, value: f64 },
    #[error("cannot read config file {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Mucalc,
    Hopf,
    Spectrum,
    Expansion,
    Regularity,
    Zeta,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Mucalc, Suite::Hopf, Suite::Spectrum, Suite::Expansion, Suite::Regularity, Suite::Zeta];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Mucalc => "mucalc",
            Suite::Hopf => "hopf",
            Suite::Spectrum => "spectrum",
            Suite::Expansion => "expansion",
            Suite::Regularity => "regularity",
            Suite::Zeta => "zeta",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("expected json or csv, got {s:?}")),
        }
    }
}

/// Thresholds used by the suites. Keys in files and flags are the field
/// names with `tol_` / `--tol-` prefixes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative agreement of the contour oracle with the closed form.
    pub contour: f64,
    /// Transported relation residuals on interior vectors.
    pub relation: f64,
    /// Classical spectrum and Casimir-discrepancy constancy.
    pub spectrum: f64,
    /// Absolute error of analytic-order estimates with known answers.
    pub order: f64,
    /// Relative spread of elliptic constants across cutoffs.
    pub elliptic: f64,
    /// Leading expansion term against `θ^{2z}(Y)Δ̂^z`.
    pub leading: f64,
    /// Required drop of the remainder order per unit of `n`.
    pub remainder_drop: f64,
    /// Relative variation of regularity norms between the two cutoffs.
    pub regularity: f64,
    /// Tail bound of the zeta partial sums.
    pub zeta_tail: f64,
    /// Absolute error of fitted pole orders.
    pub pole: f64,
    /// Relative agreement of the residue with the geometric model.
    pub residue: f64,
    /// Relative twisted-trace defect.
    pub defect: f64,
    /// Residue of a finitely supported operator.
    pub finite_residue: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            contour: 1e-8,
            relation: 1e-12,
            spectrum: 1e-10,
            order: 0.05,
            elliptic: 0.05,
            leading: 1e-8,
            remainder_drop: 0.8,
            regularity: 0.1,
            zeta_tail: 1e-6,
            pole: 0.2,
            residue: 1e-4,
            defect: 1e-3,
            finite_residue: 1e-6,
        }
    }
}

impl Tolerances {
    pub const KEYS: [&'static str; 13] = [
        "contour",
        "relation",
        "spectrum",
        "order",
        "elliptic",
        "leading",
        "remainder_drop",
        "regularity",
        "zeta_tail",
        "pole",
        "residue",
        "defect",
        "finite_residue",
    ];

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "contour" => &mut self.contour,
            "relation" => &mut self.relation,
            "spectrum" => &mut self.spectrum,
            "order" => &mut self.order,
            "elliptic" => &mut self.elliptic,
            "leading" => &mut self.leading,
            "remainder_drop" => &mut self.remainder_drop,
            "regularity" => &mut self.regularity,
            "zeta_tail" => &mut self.zeta_tail,
            "pole" => &mut self.pole,
            "residue" => &mut self.residue,
            "defect" => &mut self.defect,
            "finite_residue" => &mut self.finite_residue,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        let full = format!("tol_{key}");
        let slot = self.slot(key).ok_or(ConfigError::UnknownKey(full.clone()))?;
        if !(value > 0.0) {
            return Err(ConfigError::NonPositiveTolerance { key: full, value });
        }
        *slot = value;
        Ok(())
    }
}

/// Deformation parameter as given: rationals are kept verbatim for the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub text: String,
    pub value: f64,
}

impl QValue {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let value = parse_number(s).map_err(|reason| ConfigError::BadValue {
            key: "q".into(),
            value: s.into(),
            reason,
        })?;
        if !(value > 0.0 && value <= 1.0) {
            return Err(ConfigError::QOutOfRange(value));
        }
        Ok(QValue { text: s.trim().to_string(), value })
    }
}

/// Accepts `a/b` or a decimal.
fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|e| format!("{e}"))?;
        let d: f64 = d.trim().parse().map_err(|e| format!("{e}"))?;
        if d == 0.0 {
            return Err("zero denominator".into());
        }
        Ok(n / d)
    } else {
        s.parse().map_err(|e| format!("{e}"))
    }
}

/// Cutoff `L` as a doubled integer; accepts `21/2`, `10.5` or `10`.
pub fn parse_cutoff(s: &str) -> Result<i32, ConfigError> {
    let bad = || ConfigError::BadCutoff(s.to_string());
    let v = parse_number(s).map_err(|_| bad())?;
    let doubled = 2.0 * v;
    if (doubled - doubled.round()).abs() > 1e-9 || doubled < 5.0 || doubled > 1e6 {
        return Err(bad());
    }
    Ok(doubled.round() as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub q: QValue,
    /// Doubled cutoff `2L`.
    pub cutoff2: i32,
    pub buffer: i32,
    /// Largest expansion order `n_max`.
    pub depth: usize,
    /// `ρ = K̂_m^p Δ̂^{−p/2}`; `None` selects the smallest simple-pole `p`.
    pub rho_exp: Option<i32>,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub out: Option<String>,
    pub format: Format,
    pub suites: Vec<Suite>,
    pub seed: u64,
    #[serde(skip)]
    pub parallel: bool,
    /// Include wall-clock times in emitted reports (breaks byte-determinism).
    #[serde(skip)]
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: QValue { text: "0.5".into(), value: 0.5 },
            cutoff2: 21,
            buffer: 2,
            depth: 2,
            rho_exp: None,
            tolerances: Tolerances::default(),
            out: None,
            format: Format::Json,
            suites: Suite::ALL.to_vec(),
            seed: 0,
            parallel: false,
            timings: false,
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} L={}/2 B={} depth={}", self.q.text, self.cutoff2, self.buffer, self.depth)
    }
}

fn bad(key: &str, value: &str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), reason: reason.to_string() }
}

impl RunConfig {
    /// Applies one `key = value` setting; file keys and flags share this.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "q" => self.q = QValue::parse(value)?,
            "cutoff" => self.cutoff2 = parse_cutoff(value)?,
            "buffer" => self.buffer = value.parse().map_err(|e| bad(key, value, e))?,
            "depth" => self.depth = value.parse().map_err(|e| bad(key, value, e))?,
            "rho_exp" => {
                self.rho_exp = if value == "auto" { None } else { Some(value.parse().map_err(|e| bad(key, value, e))?) }
            }
            "format" => self.format = value.parse().map_err(|e: String| bad(key, value, e))?,
            "out" => self.out = Some(value.to_string()),
            "seed" => self.seed = value.parse().map_err(|e| bad(key, value, e))?,
            "parallel" => self.parallel = value.parse().map_err(|e| bad(key, value, e))?,
            "timings" => self.timings = value.parse().map_err(|e| bad(key, value, e))?,
            "suite" | "suites" => {
                self.suites = if value == "all" {
                    Suite::ALL.to_vec()
                } else {
                    let mut s: Vec<Suite> = value
                        .split(',')
                        .map(|x| x.trim().parse())
                        .collect::<Result<_, String>>()
                        .map_err(|e| bad(key, value, e))?;
                    s.sort();
                    s.dedup();
                    s
                }
            }
            _ => {
                let Some(tol) = key.strip_prefix("tol_") else {
                    return Err(ConfigError::UnknownKey(key.to_string()));
                };
                let v = parse_number(value).map_err(|e| bad(key, value, e))?;
                self.tolerances.set(tol, v)?;
            }
        }
        Ok(())
    }

    /// Parses a flat `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.into() })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.q.value > 0.0 && self.q.value <= 1.0) {
            return Err(ConfigError::QOutOfRange(self.q.value));
        }
        if self.cutoff2 < 5 {
            return Err(ConfigError::BadCutoff(format!("{}/2", self.cutoff2)));
        }
        if self.buffer < 1 || 2 * self.buffer >= self.cutoff2 {
            return Err(ConfigError::BadBuffer(self.buffer));
        }
        Ok(())
    }

    /// Settings as sorted `key = value` pairs, e.g. for echoing a run.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("q".into(), self.q.text.clone());
        m.insert("cutoff".into(), format!("{}/2", self.cutoff2));
        m.insert("buffer".into(), self.buffer.to_string());
        m.insert("depth".into(), self.depth.to_string());
        m.insert("rho_exp".into(), self.rho_exp.map_or("auto".into(), |p| p.to_string()));
        m.insert("seed".into(), self.seed.to_string());
        m.insert("suites".into(), self.suites.iter().map(|s| s.name()).collect::<Vec<_>>().join(","));
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_files_and_rejects_unknown_keys() {
        let mut c = RunConfig::default();
        c.apply_file_text("q = 1/3\ncutoff = 15/2 # comment\n\ntol_defect = 1e-4\nsuite = zeta, spectrum\n").unwrap();
        assert!((c.q.value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.q.text, "1/3");
        assert_eq!(c.cutoff2, 15);
        assert_eq!(c.tolerances.defect, 1e-4);
        assert_eq!(c.suites, vec![Suite::Spectrum, Suite::Zeta]);
        assert_eq!(c.apply_file_text("colour = red"), Err(ConfigError::UnknownKey("colour".into())));
        assert_eq!(c.apply_file_text("tol_nonsense = 1"), Err(ConfigError::UnknownKey("tol_nonsense".into())));
        assert!(matches!(c.apply_file_text("just words"), Err(ConfigError::Syntax { line: 1, .. })));
    }

    #[test]
    fn validates_ranges() {
        let mut c = RunConfig::default();
        assert_eq!(c.set("q", "1.5"), Err(ConfigError::QOutOfRange(1.5)));
        assert!(matches!(c.set("cutoff", "2"), Err(ConfigError::BadCutoff(_))));
        assert!(matches!(c.set("cutoff", "10.25"), Err(ConfigError::BadCutoff(_))));
        assert!(matches!(c.set("tol_relation", "-1"), Err(ConfigError::NonPositiveTolerance { .. })));
        c.set("buffer", "20").unwrap();
        assert_eq!(c.validate(), Err(ConfigError::BadBuffer(20)));
        assert_eq!(parse_cutoff("10.5"), Ok(21));
        assert_eq!(parse_cutoff("21/2"), Ok(21));
        assert_eq!(parse_cutoff("10"), Ok(20));
    }
}
