//! Flag parsing helpers and the error-to-exit-code mapping.

use std::fmt;

use nla_core::NlaError;
use num_complex::Complex64;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Invariant(String),
    NonConvergent(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::NonConvergent(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant failure: {m}"),
            CliError::NonConvergent(m) => write!(f, "{m}"),
        }
    }
}

impl From<NlaError> for CliError {
    fn from(e: NlaError) -> Self {
        match e {
            NlaError::NonConvergent(_) => CliError::NonConvergent(e.to_string()),
            NlaError::InvalidParameter(_)
            | NlaError::InvalidMode { .. }
            | NlaError::Truncation { .. }
            | NlaError::OracleLimit { .. } => CliError::Config(e.to_string()),
            // everything else means the numerics broke an invariant
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("output: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// `re,im` or a bare real number.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("'{p}' is not a number"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected re,im but got '{s}'")),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(z)
}

/// `name=start:stop:steps`, evaluated as `steps` evenly spaced points including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.start + h * k as f64).collect()
    }

    /// Errors unless the sweep variable is one `allowed` for the command.
    pub fn check_name(&self, allowed: &[&str]) -> CliResult<()> {
        if allowed.contains(&self.name.as_str()) {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "cannot sweep '{}' here; choose one of: {}",
                self.name,
                allowed.join(", ")
            )))
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}:{}:{}", self.name, self.start, self.stop, self.steps)
    }
}

pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let (name, range) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=start:stop:steps, got '{s}'"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(format!("expected start:stop:steps, got '{range}'"));
    };
    let start: f64 = start.parse().map_err(|_| format!("bad sweep start '{start}'"))?;
    let stop: f64 = stop.parse().map_err(|_| format!("bad sweep stop '{stop}'"))?;
    let steps: usize = steps.parse().map_err(|_| format!("bad sweep step count '{steps}'"))?;
    if steps == 0 || !start.is_finite() || !stop.is_finite() {
        return Err("sweep needs finite bounds and at least one step".into());
    }
    if name.is_empty() {
        return Err("sweep variable name is empty".into());
    }
    Ok(Sweep {
        name: name.to_string(),
        start,
        stop,
        steps,
    })
}

/// Integer sweep values must land on whole numbers.
pub fn as_count(name: &str, v: f64) -> CliResult<usize> {
    if v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(CliError::Config(format!("{name} must be a non-negative integer, got {v}")))
    }
}
