//! Run configuration: defaults, `key = value` file parsing, flag overrides.
//!
//! A configuration file holds one `key = value` pair per line; `#` starts a
//! comment (whole-line or trailing), blank lines are skipped. Accepted keys
//! are `example`, `M`, `L`, `n_max`, `q`, `j0`, `T`, `emit`, `slice`, and
//! `out`. Command-line flags override file values, so a file can pin a
//! problem while sweeps vary `M` from the shell.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use upsolve_core::{SliceAxis, SliceSpec};

/// What a run writes besides the standard-output summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitKind {
    /// Error-norm table (stdout always; CSV with `out`).
    Table,
    /// Full sample grid as CSV.
    Grid,
    /// One coordinate frozen, a plot-ready CSV.
    Slice,
}

impl fmt::Display for EmitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmitKind::Table => "table",
            EmitKind::Grid => "grid",
            EmitKind::Slice => "slice",
        })
    }
}

impl FromStr for EmitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(EmitKind::Table),
            "grid" => Ok(EmitKind::Grid),
            "slice" => Ok(EmitKind::Slice),
            other => Err(format!("emit must be table, grid, or slice, got {other:?}")),
        }
    }
}

/// Partial settings collected from one source (file or flags). `None` means
/// "not specified here"; merging lets flags override file values.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    pub example: Option<String>,
    pub m_steps: Option<usize>,
    pub l_intervals: Option<usize>,
    pub n_max: Option<usize>,
    pub q: Option<usize>,
    pub j0: Option<usize>,
    pub horizon: Option<f64>,
    pub emit: Option<String>,
    pub slice: Option<String>,
    pub out: Option<PathBuf>,
}

/// Fully validated configuration for a single solve.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub example: usize,
    pub m_steps: usize,
    pub l_intervals: usize,
    pub n_max: usize,
    /// Fixed sweep count; `None` iterates to a 1e-10 increment.
    pub q: Option<usize>,
    /// Quadrature index: state-dependent terms integrate with j0 + 1 points.
    pub j0: usize,
    pub horizon: Option<f64>,
    pub emit: EmitKind,
    pub slice: Option<SliceSpec>,
    pub out: Option<PathBuf>,
    pub compare_published: bool,
}

impl Settings {
    /// Parse a configuration file's text. I/O is the caller's problem; this
    /// only sees the content.
    pub fn from_file_text(text: &str, path: &str) -> Result<Settings, String> {
        let mut settings = Settings::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((content, _comment)) => content,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "{path}:{}: expected `key = value`, got {raw:?}",
                    lineno + 1
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(format!("{path}:{}: duplicate key {key:?}", lineno + 1));
            }
            seen.push(key.to_string());
            let at = |what: &str| format!("{path}:{}: {what}", lineno + 1);
            match key {
                "example" => settings.example = Some(value.to_string()),
                "M" => settings.m_steps = Some(parse_count(value, "M").map_err(|e| at(&e))?),
                "L" => settings.l_intervals = Some(parse_count(value, "L").map_err(|e| at(&e))?),
                "n_max" => settings.n_max = Some(parse_count(value, "n_max").map_err(|e| at(&e))?),
                "q" => settings.q = Some(parse_count(value, "q").map_err(|e| at(&e))?),
                "j0" => settings.j0 = Some(parse_count(value, "j0").map_err(|e| at(&e))?),
                "T" => settings.horizon = Some(parse_horizon(value).map_err(|e| at(&e))?),
                "emit" => settings.emit = Some(value.to_string()),
                "slice" => settings.slice = Some(value.to_string()),
                "out" => settings.out = Some(PathBuf::from(value)),
                other => return Err(at(&format!("unknown key {other:?}"))),
            }
        }
        Ok(settings)
    }

    /// `self` wins over `base` wherever both specify a value.
    pub fn merge_over(self, base: Settings) -> Settings {
        Settings {
            example: self.example.or(base.example),
            m_steps: self.m_steps.or(base.m_steps),
            l_intervals: self.l_intervals.or(base.l_intervals),
            n_max: self.n_max.or(base.n_max),
            q: self.q.or(base.q),
            j0: self.j0.or(base.j0),
            horizon: self.horizon.or(base.horizon),
            emit: self.emit.or(base.emit),
            slice: self.slice.or(base.slice),
            out: self.out.or(base.out),
        }
    }

    /// Validate and fill defaults. `compare_published` comes straight from
    /// the flag (it is not a file key).
    pub fn resolve(self, compare_published: bool) -> Result<RunConfig, String> {
        let example = match self.example.as_deref() {
            None => return Err("no problem selected; pass --example N (1-4)".into()),
            Some("custom") => {
                return Err(
                    "custom problems are defined against the library API (LinearProblem / \
                     NonlinearProblem); the command line exposes the built-in entries 1-4"
                        .into(),
                )
            }
            Some(text) => match text.parse::<usize>() {
                Ok(id @ 1..=4) => id,
                _ => return Err(format!("example must be 1-4, got {text:?}")),
            },
        };
        let m_steps = match self.m_steps {
            Some(m) if m >= 1 => m,
            Some(m) => return Err(format!("M must be at least 1, got {m}")),
            None => return Err("M (time steps per axis) is required, e.g. --M 100".into()),
        };
        let l_intervals = self.l_intervals.unwrap_or(20);
        if l_intervals == 0 {
            return Err("L must be at least 1".into());
        }
        let n_max = self.n_max.unwrap_or(8);
        if n_max == 0 {
            return Err("nmax must be at least 1".into());
        }
        if let Some(0) = self.q {
            return Err("q must be at least 1 when given".into());
        }
        let j0 = self.j0.unwrap_or(5);
        if let Some(t) = self.horizon {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("T must be finite and positive, got {t}"));
            }
        }
        let slice = match &self.slice {
            Some(text) => Some(parse_slice(text)?),
            None => None,
        };
        let emit = match &self.emit {
            Some(text) => text.parse::<EmitKind>()?,
            // A slice spec without an explicit emit mode implies slice
            // emission.
            None if slice.is_some() => EmitKind::Slice,
            None => EmitKind::Table,
        };
        if slice.is_some() && emit != EmitKind::Slice {
            return Err(format!("a slice spec only applies to --emit slice, not {emit}"));
        }
        if matches!(emit, EmitKind::Grid | EmitKind::Slice) && self.out.is_none() {
            return Err(format!("writing a {emit} CSV needs --out PATH"));
        }
        if compare_published && emit != EmitKind::Table {
            return Err("--compare-published only applies to table emission".into());
        }
        Ok(RunConfig {
            example,
            m_steps,
            l_intervals,
            n_max,
            q: self.q,
            j0,
            horizon: self.horizon,
            emit,
            slice,
            out: self.out,
            compare_published,
        })
    }
}

fn parse_count(value: &str, key: &str) -> Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("{key} must be a non-negative integer, got {value:?}"))
}

fn parse_horizon(value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("T must be a number, got {value:?}"))
}

/// Parse `axis=value` with axis one of x, t, s.
pub fn parse_slice(text: &str) -> Result<SliceSpec, String> {
    let Some((axis, value)) = text.split_once('=') else {
        return Err(format!(
            "slice spec must look like t=0.5 or x=0.785, got {text:?}"
        ));
    };
    let axis = SliceAxis::from_str(axis.trim()).map_err(|e| e.to_string())?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("slice value must be a number, got {value:?}"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!("slice value must be finite and non-negative, got {value}"));
    }
    Ok(SliceSpec { axis, value })
}
