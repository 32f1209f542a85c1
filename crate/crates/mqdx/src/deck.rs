//! `key = value` input decks.
//!
//! Lines starting with `!` are comments, as is anything after an unquoted `!`.
//! Values are Fortran-flavoured: `1.0d0` exponents, `.T.`/`.F.` booleans,
//! `(re,im)` pairs and optionally quoted strings. Namelist group markers
//! (`&NAME`, `/`) and trailing commas are tolerated so decks copied from
//! namelist files still parse.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use log::warn;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Complex(f64, f64),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) => write!(f, "{}", fortran_real(*x)),
            Value::Bool(b) => f.write_str(if *b { ".T." } else { ".F." }),
            Value::Complex(re, im) => write!(f, "({},{})", fortran_real(*re), fortran_real(*im)),
            Value::Str(s) => write!(f, "'{s}'"),
        }
    }
}

/// Shortest round-tripping decimal with a Fortran double exponent.
fn fortran_real(x: f64) -> String {
    let s = format!("{x:e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent format always has an e");
    let mantissa = if mantissa.contains('.') {
        mantissa.to_string()
    } else {
        format!("{mantissa}.0")
    };
    format!("{mantissa}d{exp}")
}

/// Keys of the run deck.
const RUN_KEYS: &[&str] = &[
    "JOB_TYPE",
    "Npar",
    "Morb",
    "xlambda_0",
    "mass",
    "Job_Prefactor",
    "GUESS",
    "Binary_Start_Time",
    "DIM_MCTDH",
    "NDVR_X",
    "NDVR_Y",
    "NDVR_Z",
    "x_initial",
    "x_final",
    "y_initial",
    "y_final",
    "z_initial",
    "z_final",
    "Time_Begin",
    "Time_Final",
    "Output_TimeStep",
    "Integration_Stepsize",
    "Write_ASCII",
    "Coefficients_Integrator",
    "Orbital_Integrator",
    "whichpot",
    "Interaction_Type",
    "which_interaction",
];

/// Keys of the analysis deck.
const ANALYSIS_KEYS: &[&str] = &[
    "Total_Energy",
    "Time_From",
    "Time_To",
    "Time_Points",
    "Density_x",
    "Density_k",
    "Correlations_X",
    "xstart",
    "xend",
];

fn is_known_key(key: &str) -> bool {
    if RUN_KEYS.contains(&key) || ANALYSIS_KEYS.contains(&key) {
        return true;
    }
    let indexed = |prefix: &str, max: usize| {
        key.strip_prefix(prefix)
            .and_then(|rest| rest.parse::<usize>().ok())
            .is_some_and(|i| (1..=max).contains(&i))
    };
    indexed("parameter", 30) || indexed("Interaction_Parameter", 30)
}

/// Ordered key-value map read from a deck.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InputDeck {
    entries: BTreeMap<String, Value>,
}

impl InputDeck {
    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_str(&text).map_err(|e| match e {
            CliError::Parse { line, message, .. } => CliError::Parse {
                source_name: path.display().to_string(),
                line,
                message,
            },
            other => other,
        })
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| CliError::Parse {
                source_name: "<deck>".into(),
                line: line_no,
                message,
            };
            let line = strip_comment(raw).trim();
            let line = line.trim_end_matches(',').trim();
            if line.is_empty() || line.starts_with('&') || line == "/" {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(err(format!("malformed key `{key}`")));
            }
            let value = parse_value(value.trim()).map_err(err)?;
            if !is_known_key(key) {
                warn!("line {line_no}: unknown key `{key}` ignored by this version");
            }
            entries.insert(key.to_string(), value);
        }
        Ok(Self { entries })
    }

    /// One `key = value` line per entry, in key order.
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.entries.insert(key.to_string(), value);
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn require(&self, key: &str) -> Result<&Value> {
        self.get(key).ok_or_else(|| CliError::MissingKey(key.to_string()))
    }

    fn mismatch(key: &str, expected: &str, v: &Value) -> CliError {
        CliError::BadValue {
            key: key.to_string(),
            message: format!("expected {expected}, got {v}"),
        }
    }

    pub fn int(&self, key: &str) -> Result<i64> {
        match self.require(key)? {
            Value::Int(i) => Ok(*i),
            Value::Real(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Ok(*x as i64),
            v => Err(Self::mismatch(key, "an integer", v)),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let i = self.int(key)?;
        usize::try_from(i).map_err(|_| CliError::BadValue {
            key: key.to_string(),
            message: format!("must be nonnegative, got {i}"),
        })
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        match self.require(key)? {
            Value::Real(x) => Ok(*x),
            Value::Int(i) => Ok(*i as f64),
            v => Err(Self::mismatch(key, "a number", v)),
        }
    }

    pub fn real_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.contains(key) {
            self.real(key)
        } else {
            Ok(default)
        }
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.require(key)? {
            Value::Bool(b) => Ok(*b),
            v => Err(Self::mismatch(key, "a logical (.T. or .F.)", v)),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        if self.contains(key) {
            self.bool(key)
        } else {
            Ok(default)
        }
    }

    pub fn complex(&self, key: &str) -> Result<(f64, f64)> {
        match self.require(key)? {
            Value::Complex(re, im) => Ok((*re, *im)),
            Value::Real(x) => Ok((*x, 0.0)),
            Value::Int(i) => Ok((*i as f64, 0.0)),
            v => Err(Self::mismatch(key, "a complex pair (re,im)", v)),
        }
    }

    pub fn string(&self, key: &str) -> Result<&str> {
        match self.require(key)? {
            Value::Str(s) => Ok(s),
            v => Err(Self::mismatch(key, "a string", v)),
        }
    }

    /// Values of `prefix1`, `prefix2`, ... up to `max`; missing entries are zero.
    pub fn indexed_reals(&self, prefix: &str, max: usize) -> Result<Vec<f64>> {
        (1..=max)
            .map(|i| self.real_or(&format!("{prefix}{i}"), 0.0))
            .collect()
    }
}

/// Drops a `!` comment that is not inside quotes.
fn strip_comment(line: &str) -> &str {
    let mut quote: Option<char> = None;
    for (i, ch) in line.char_indices() {
        match (quote, ch) {
            (None, '!') => return &line[..i],
            (None, '\'' | '"') => quote = Some(ch),
            (Some(q), c) if c == q => quote = None,
            _ => {}
        }
    }
    line
}

fn parse_real(s: &str) -> Option<f64> {
    let t = s.trim();
    if t.is_empty() {
        return None;
    }
    let normalized: String = t
        .chars()
        .map(|c| if matches!(c, 'd' | 'D') { 'e' } else { c })
        .collect();
    // reject things like "inf" or "nan" that Rust would accept
    if !normalized
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
    {
        return None;
    }
    normalized.parse().ok()
}

fn parse_value(s: &str) -> std::result::Result<Value, String> {
    if s.is_empty() {
        return Err("missing value".into());
    }
    for quote in ['\'', '"'] {
        if let Some(rest) = s.strip_prefix(quote) {
            return rest
                .strip_suffix(quote)
                .map(|inner| Value::Str(inner.to_string()))
                .ok_or_else(|| format!("unterminated string `{s}`"));
        }
    }
    match s.to_ascii_uppercase().as_str() {
        ".T." | ".TRUE." => return Ok(Value::Bool(true)),
        ".F." | ".FALSE." => return Ok(Value::Bool(false)),
        _ => {}
    }
    if let Some(inner) = s.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| format!("unterminated complex literal `{s}`"))?;
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| format!("complex literal needs two parts: `{s}`"))?;
        return match (parse_real(re), parse_real(im)) {
            (Some(re), Some(im)) => Ok(Value::Complex(re, im)),
            _ => Err(format!("malformed complex literal `{s}`")),
        };
    }
    let looks_numeric = s.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '+' | '-' | '.'));
    if looks_numeric {
        if let Ok(i) = s.parse::<i64>() {
            return Ok(Value::Int(i));
        }
        return parse_real(s)
            .map(Value::Real)
            .ok_or_else(|| format!("malformed number `{s}`"));
    }
    // bare words are accepted as strings (whichpot=HO1D)
    if s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '-' | '.')) {
        return Ok(Value::Str(s.to_string()));
    }
    Err(format!("cannot parse value `{s}`"))
}
