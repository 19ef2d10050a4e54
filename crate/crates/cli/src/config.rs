//! Benchmark configuration from flat `key = value` files and flag overrides.
//!
//! Both commands share one tiny format: one assignment per line, `#` starts
//! a comment, list values are comma-separated. Command-line flags carry the
//! same keys and win over file values. Anything malformed is reported with
//! the offending line and field so a bad config fails before any run starts.

use std::fmt;
use std::path::{Path, PathBuf};

use hilreg::iteration::Method;
use hilreg::problems::Variant;

/// Where `alpha_1` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartRule {
    /// Residual-based upper bound for the discrepancy parameter.
    Bound,
    /// Fixed `alpha_1 = 1`.
    One,
}

impl StartRule {
    pub const ALL: [StartRule; 2] = [StartRule::Bound, StartRule::One];

    pub fn tag(self) -> &'static str {
        match self {
            StartRule::Bound => "bound",
            StartRule::One => "one",
        }
    }

    pub fn from_tag(tag: &str) -> Option<StartRule> {
        match tag {
            "bound" => Some(StartRule::Bound),
            "one" => Some(StartRule::One),
            _ => None,
        }
    }
}

impl fmt::Display for StartRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line in the config file; `None` for flag values and
    /// cross-field checks.
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(
                f,
                "config error at line {l}, field `{}`: {}",
                self.field, self.message
            ),
            None => write!(f, "config error in field `{}`: {}", self.field, self.message),
        }
    }
}

/// Splits config text into `(line_number, key, value)` triples.
pub fn parse_assignments(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::new(Some(line_no), line, "expected `key = value`")
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::new(
                Some(line_no),
                key,
                "key and value must both be non-empty",
            ));
        }
        out.push((line_no, key.to_string(), value.to_string()));
    }
    Ok(out)
}

fn read_config_text(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| {
        ConfigError::new(None, "config", format!("cannot read {}: {e}", path.display()))
    })
}

fn parse_f64(line: Option<usize>, field: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|_| ConfigError::new(line, field, format!("`{value}` is not a number")))
}

fn parse_usize(line: Option<usize>, field: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| ConfigError::new(line, field, format!("`{value}` is not a whole number")))
}

fn parse_seed_list(line: Option<usize>, value: &str) -> Result<Vec<u64>, ConfigError> {
    let mut seeds = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        let seed = part
            .parse::<u64>()
            .map_err(|_| ConfigError::new(line, "seed", format!("`{part}` is not a seed")))?;
        seeds.push(seed);
    }
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}

fn parse_method_list(line: Option<usize>, value: &str) -> Result<Vec<Method>, ConfigError> {
    let mut methods = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        let method = Method::from_tag(part).ok_or_else(|| {
            ConfigError::new(
                line,
                "method",
                format!("`{part}` is not one of TI/DP, IIM/A1, IIM/GS"),
            )
        })?;
        if !methods.contains(&method) {
            methods.push(method);
        }
    }
    // Fixed presentation order regardless of how the list was written.
    methods.sort_by_key(|m| Method::ALL.iter().position(|a| a == m));
    Ok(methods)
}

fn parse_level_list(line: Option<usize>, value: &str) -> Result<Vec<f64>, ConfigError> {
    let mut levels = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        levels.push(parse_f64(line, "levels", part)?);
    }
    Ok(levels)
}

/// Settings for `tables` and `solve`: one variant, one noise level, a seed
/// set, and the shared solver constants.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub m: usize,
    /// Relative noise level; the absolute level is `sigma * |y|`.
    pub sigma: f64,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    /// Used by `solve`; `tables` always reports both start rules.
    pub start: StartRule,
    /// Smoothness index of the penalty norm.
    pub s: f64,
    /// Discrepancy constant: stop once `d <= c * delta`.
    pub c: f64,
    /// Ratio of the geometric parameter sequence.
    pub q: f64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            variant: Variant::Sine,
            m: 400,
            sigma: 0.01,
            seeds: (1..=10).collect(),
            methods: Method::ALL.to_vec(),
            start: StartRule::Bound,
            s: 1.0,
            c: 1.1,
            q: 0.5,
            out: PathBuf::from("."),
        }
    }
}

impl ExperimentConfig {
    pub fn apply(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        match key {
            "variant" => {
                self.variant = Variant::from_tag(value).ok_or_else(|| {
                    ConfigError::new(line, key, format!("`{value}` is not one of i, ii, iii"))
                })?;
            }
            "m" => self.m = parse_usize(line, key, value)?,
            "sigma" => self.sigma = parse_f64(line, key, value)?,
            "seed" => self.seeds = parse_seed_list(line, value)?,
            "method" => self.methods = parse_method_list(line, value)?,
            "start" => {
                self.start = StartRule::from_tag(value).ok_or_else(|| {
                    ConfigError::new(line, key, format!("`{value}` is not `bound` or `one`"))
                })?;
            }
            "s" => self.s = parse_f64(line, key, value)?,
            "C" => self.c = parse_f64(line, key, value)?,
            "q" => self.q = parse_f64(line, key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(ConfigError::new(line, key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |field: &str, msg: String| Err(ConfigError::new(None, field, msg));
        if self.m < 2 {
            return err("m", format!("needs at least 2 cells, got {}", self.m));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return err("sigma", format!("must be finite and >= 0, got {}", self.sigma));
        }
        if self.seeds.is_empty() {
            return err("seed", "need at least one seed".to_string());
        }
        if self.methods.is_empty() {
            return err("method", "need at least one method".to_string());
        }
        if !self.s.is_finite() || self.s < 0.0 {
            return err("s", format!("must be finite and >= 0, got {}", self.s));
        }
        if !self.c.is_finite() || self.c < 1.0 {
            return err("C", format!("must be >= 1, got {}", self.c));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return err("q", format!("must be in (0, 1), got {}", self.q));
        }
        Ok(())
    }

    /// File values first, then overrides, then the cross-field checks.
    pub fn from_sources(
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = file {
            for (line, key, value) in parse_assignments(&read_config_text(path)?)? {
                cfg.apply(&key, &value, Some(line))?;
            }
        }
        for (key, value) in overrides {
            cfg.apply(key, value, None)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Settings for the noise-ladder rate study.
#[derive(Debug, Clone)]
pub struct RateStudyConfig {
    pub variant: Variant,
    pub m: usize,
    /// Relative noise levels, strictly decreasing.
    pub levels: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub s: f64,
    pub c: f64,
    pub out: PathBuf,
}

impl Default for RateStudyConfig {
    fn default() -> Self {
        RateStudyConfig {
            variant: Variant::Sine,
            m: 400,
            levels: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
            seeds: (1..=10).collect(),
            methods: vec![Method::IimA1],
            s: 1.0,
            c: 1.1,
            out: PathBuf::from("."),
        }
    }
}

impl RateStudyConfig {
    pub fn apply(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        match key {
            "variant" => {
                self.variant = Variant::from_tag(value).ok_or_else(|| {
                    ConfigError::new(line, key, format!("`{value}` is not one of i, ii, iii"))
                })?;
            }
            "m" => self.m = parse_usize(line, key, value)?,
            "levels" => self.levels = parse_level_list(line, value)?,
            "seed" => self.seeds = parse_seed_list(line, value)?,
            "method" => self.methods = parse_method_list(line, value)?,
            "s" => self.s = parse_f64(line, key, value)?,
            "C" => self.c = parse_f64(line, key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(ConfigError::new(line, key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |field: &str, msg: String| Err(ConfigError::new(None, field, msg));
        if self.m < 2 {
            return err("m", format!("needs at least 2 cells, got {}", self.m));
        }
        if self.levels.len() < 4 {
            return err(
                "levels",
                format!("need at least 4 noise levels, got {}", self.levels.len()),
            );
        }
        for w in self.levels.windows(2) {
            if !(w[1] < w[0]) {
                return err(
                    "levels",
                    format!("must be strictly decreasing, got {} then {}", w[0], w[1]),
                );
            }
        }
        if self.levels.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return err("levels", "every level must be positive and finite".to_string());
        }
        if self.seeds.is_empty() {
            return err("seed", "need at least one seed".to_string());
        }
        if self.methods.is_empty() {
            return err("method", "need at least one method".to_string());
        }
        if !self.s.is_finite() || self.s < 0.0 {
            return err("s", format!("must be finite and >= 0, got {}", self.s));
        }
        if !self.c.is_finite() || self.c < 1.0 {
            return err("C", format!("must be >= 1, got {}", self.c));
        }
        Ok(())
    }

    pub fn from_sources(
        file: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<RateStudyConfig, ConfigError> {
        let mut cfg = RateStudyConfig::default();
        if let Some(path) = file {
            for (line, key, value) in parse_assignments(&read_config_text(path)?)? {
                cfg.apply(&key, &value, Some(line))?;
            }
        }
        for (key, value) in overrides {
            cfg.apply(key, value, None)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Theoretical error-vs-noise exponent `p / (a + p)` for this problem:
    /// the forward operator smooths by `a = 2` and `p` is the solution's
    /// smoothness grade. `None` when the grade is unbounded (the observable
    /// rate is then capped by the methods, not the solution).
    pub fn expected_slope(&self) -> Option<f64> {
        let p = self.variant.smoothness_limit();
        if p.is_finite() {
            Some(p / (2.0 + p))
        } else {
            None
        }
    }
}
