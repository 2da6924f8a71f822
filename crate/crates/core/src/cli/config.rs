//! Flat `key = value` run configuration.
//!
//! Every value is validated when it is set, whether it comes from a file or
//! from a command-line override. Real-valued fields keep their decimal text
//! so that they can be parsed again at the working precision.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::a2a::CriticalMode;
use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::mps::GateLine;
use crate::noise::ChannelSpec;
use crate::numerics::PrecisionContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    AllToAll,
    Chain,
}

impl FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a2a" => Ok(Self::AllToAll),
            "1d" => Ok(Self::Chain),
            _ => Err(Error::Parse(format!("unknown geometry '{s}', expected a2a or 1d"))),
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AllToAll => "a2a",
            Self::Chain => "1d",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// 53-bit floats.
    Fast,
    /// MPFR floats at `precision_bits`.
    Accurate,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Self::Fast),
            "accurate" => Ok(Self::Accurate),
            _ => Err(Error::Parse(format!("unknown mode '{s}', expected fast or accurate"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fast => "fast",
            Self::Accurate => "accurate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Parse(format!("unknown format '{s}', expected csv or json"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

/// Recognised keys, in canonical order.
pub const KEYS: [&str; 22] = [
    "geometry",
    "sites",
    "qudit_dim",
    "gate",
    "noise",
    "eps_n",
    "depth",
    "two_copy",
    "eigs",
    "eps_grid",
    "alphas",
    "line",
    "method",
    "precision_bits",
    "mode",
    "trunc",
    "bond_cap",
    "krylov_dim",
    "restarts",
    "seed",
    "format",
    "out",
];

/// Everything a subcommand may need. Unset fields fall back to the
/// documented defaults through the accessor methods.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub geometry: Option<Geometry>,
    pub sites: Option<usize>,
    pub qudit_dim: Option<u32>,
    pub gate: Option<GateSpec>,
    pub noise: Option<ChannelSpec>,
    pub eps_n: Option<String>,
    pub depth: Option<usize>,
    pub two_copy: Option<bool>,
    pub eigs: Option<usize>,
    pub eps_grid: Option<Vec<String>>,
    pub alphas: Option<Vec<String>>,
    pub line: Option<GateLine>,
    pub method: Option<CriticalMode>,
    pub precision_bits: Option<u32>,
    pub mode: Option<Mode>,
    pub trunc: Option<String>,
    pub bond_cap: Option<usize>,
    pub krylov_dim: Option<usize>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

fn int_in<N>(key: &str, v: &str, lo: N, hi: N) -> Result<N>
where
    N: FromStr + PartialOrd + fmt::Display + Copy,
{
    let x: N = v.parse().map_err(|_| Error::Parse(format!("{key}: '{v}' is not an integer")))?;
    if x < lo || x > hi {
        return Err(Error::InvalidParameter(format!("{key} = {x} outside [{lo}, {hi}]")));
    }
    Ok(x)
}

/// A decimal literal checked at double precision; the text is kept.
fn decimal(key: &str, v: &str, lo: f64, hi: f64) -> Result<String> {
    let bad = || Error::Parse(format!("{key}: '{v}' is not a number"));
    let x: f64 = match v.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().map_err(|_| bad())? / b.trim().parse::<f64>().map_err(|_| bad())?,
        None => v.parse().map_err(|_| bad())?,
    };
    if !x.is_finite() || x < lo || x > hi {
        return Err(Error::InvalidParameter(format!("{key} = {v} outside [{lo}, {hi}]")));
    }
    Ok(v.to_string())
}

fn decimal_list(key: &str, v: &str, lo: f64, hi: f64) -> Result<Vec<String>> {
    let items: Vec<String> =
        v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| decimal(key, s, lo, hi)).collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Parse(format!("{key}: empty list")));
    }
    Ok(items)
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse(format!("{key}: '{v}' is not a boolean"))),
    }
}

impl RunConfig {
    pub const DEFAULT_SITES: usize = 40;
    pub const DEFAULT_DEPTH: usize = 100;
    pub const DEFAULT_EIGS: usize = 7;
    pub const DEFAULT_KRYLOV_DIM: usize = 20;
    pub const DEFAULT_RESTARTS: usize = 10;
    pub const MAX_SITES: usize = 4096;

    /// Parses a configuration file body. Blank lines and lines starting
    /// with `#` are skipped; repeated and unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let k = k.trim();
            if seen.contains(&k.to_string()) {
                return Err(Error::Parse(format!("line {}: duplicate key '{k}'", lineno + 1)));
            }
            seen.push(k.to_string());
            cfg.set(k, v.trim()).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("line {}: {m}", lineno + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "geometry" => self.geometry = Some(v.parse()?),
            "sites" => {
                let n = int_in(key, v, 2, Self::MAX_SITES)?;
                if n % 2 != 0 {
                    return Err(Error::InvalidParameter(format!("sites must be even, got {n}")));
                }
                self.sites = Some(n);
            }
            "qudit_dim" => self.qudit_dim = Some(int_in(key, v, 2, 64)?),
            "gate" => self.gate = Some(GateSpec::parse(v)?),
            "noise" => self.noise = Some(ChannelSpec::parse(v)?),
            "eps_n" => self.eps_n = Some(decimal(key, v, 0.0, f64::MAX)?),
            "depth" => self.depth = Some(int_in(key, v, 0, 1_000_000)?),
            "two_copy" => self.two_copy = Some(boolean(key, v)?),
            "eigs" => self.eigs = Some(int_in(key, v, 1, 10_000)?),
            "eps_grid" => self.eps_grid = Some(decimal_list(key, v, 0.0, f64::MAX)?),
            "alphas" => self.alphas = Some(decimal_list(key, v, 0.0, 64.0)?),
            "line" => self.line = Some(v.parse()?),
            "method" => self.method = Some(v.parse()?),
            "precision_bits" => self.precision_bits = Some(int_in(key, v, PrecisionContext::DOUBLE_BITS, 1 << 16)?),
            "mode" => self.mode = Some(v.parse()?),
            "trunc" => self.trunc = Some(decimal(key, v, 0.0, 1.0)?),
            "bond_cap" => self.bond_cap = Some(int_in(key, v, 1, 1 << 16)?),
            "krylov_dim" => self.krylov_dim = Some(int_in(key, v, 3, 1000)?),
            "restarts" => self.restarts = Some(int_in(key, v, 0, 10_000)?),
            "seed" => self.seed = Some(int_in(key, v, 0, u64::MAX)?),
            "format" => self.format = Some(v.parse()?),
            "out" => {
                if v.is_empty() {
                    return Err(Error::Parse("out: empty path".into()));
                }
                self.out = Some(PathBuf::from(v));
            }
            _ => return Err(Error::Parse(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Text form of one key, `None` when unset.
    pub fn get(&self, key: &str) -> Option<String> {
        let list = |v: &Vec<String>| v.join(",");
        match key {
            "geometry" => self.geometry.map(|x| x.to_string()),
            "sites" => self.sites.map(|x| x.to_string()),
            "qudit_dim" => self.qudit_dim.map(|x| x.to_string()),
            "gate" => self.gate.as_ref().map(|x| x.to_string()),
            "noise" => self.noise.as_ref().map(|x| x.to_string()),
            "eps_n" => self.eps_n.clone(),
            "depth" => self.depth.map(|x| x.to_string()),
            "two_copy" => self.two_copy.map(|x| x.to_string()),
            "eigs" => self.eigs.map(|x| x.to_string()),
            "eps_grid" => self.eps_grid.as_ref().map(list),
            "alphas" => self.alphas.as_ref().map(list),
            "line" => self.line.map(|x| x.to_string()),
            "method" => self.method.map(|x| x.to_string()),
            "precision_bits" => self.precision_bits.map(|x| x.to_string()),
            "mode" => self.mode.map(|x| x.to_string()),
            "trunc" => self.trunc.clone(),
            "bond_cap" => self.bond_cap.map(|x| x.to_string()),
            "krylov_dim" => self.krylov_dim.map(|x| x.to_string()),
            "restarts" => self.restarts.map(|x| x.to_string()),
            "seed" => self.seed.map(|x| x.to_string()),
            "format" => self.format.map(|x| x.to_string()),
            "out" => self.out.as_ref().map(|p| p.display().to_string()),
            _ => None,
        }
    }

    /// Values of `other` take precedence.
    pub fn merge(&mut self, other: &RunConfig) -> Result<()> {
        for key in KEYS {
            if let Some(v) = other.get(key) {
                self.set(key, &v)?;
            }
        }
        Ok(())
    }

    /// Set keys in canonical order, one `key = value` per line.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            if let Some(v) = self.get(key) {
                out.push_str(key);
                out.push_str(" = ");
                out.push_str(&v);
                out.push('\n');
            }
        }
        out
    }

    /// SHA-256 of the subcommand name and the canonical form, minus the
    /// output keys, which do not change results.
    pub fn hash(&self, command: &str) -> String {
        let mut c = self.clone();
        c.out = None;
        c.format = None;
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(b"\n");
        h.update(c.serialize().as_bytes());
        format!("{:x}", h.finalize())
    }

    /// Rejects combinations that no subcommand accepts.
    pub fn validate(&self) -> Result<()> {
        if self.noise.is_some() && self.eps_n.is_some() {
            return Err(Error::InvalidParameter("set either noise or eps_n, not both".into()));
        }
        if self.mode == Some(Mode::Fast) && self.precision_bits.is_some_and(|b| b != PrecisionContext::DOUBLE_BITS) {
            return Err(Error::InvalidParameter(format!(
                "fast mode runs at {} bits; drop precision_bits or use accurate mode",
                PrecisionContext::DOUBLE_BITS
            )));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry.unwrap_or(Geometry::AllToAll)
    }

    pub fn sites(&self) -> usize {
        self.sites.unwrap_or(Self::DEFAULT_SITES)
    }

    pub fn q(&self) -> u32 {
        self.qudit_dim.unwrap_or(2)
    }

    pub fn gate(&self) -> GateSpec {
        self.gate.clone().unwrap_or(GateSpec::Haar)
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(Self::DEFAULT_DEPTH)
    }

    pub fn eigs(&self) -> usize {
        self.eigs.unwrap_or(Self::DEFAULT_EIGS)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    /// Fast mode, or an explicit 53-bit request, selects `f64`.
    pub fn context(&self) -> Result<PrecisionContext> {
        self.validate()?;
        match (self.mode, self.precision_bits) {
            (Some(Mode::Fast), _) => Ok(PrecisionContext::double()),
            (_, Some(b)) if b == PrecisionContext::DOUBLE_BITS => Ok(PrecisionContext::double()),
            (_, b) => PrecisionContext::new(b.unwrap_or(PrecisionContext::DEFAULT_BITS)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_canonical() {
        let text = "# run\n  depth=12\ngate =  cnot\n\nsites = 8\neps_grid = 0.1, 0.5,2\n";
        let cfg = RunConfig::parse(text).unwrap();
        let canon = cfg.serialize();
        assert_eq!(canon, "sites = 8\ngate = cnot\ndepth = 12\neps_grid = 0.1,0.5,2\n");
        assert_eq!(RunConfig::parse(&canon).unwrap().serialize(), canon);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("colour = red"), Err(Error::Parse(_))));
        assert!(RunConfig::parse("sites = 7").is_err());
        assert!(RunConfig::parse("sites = 4\nsites = 6").is_err());
        assert!(RunConfig::parse("depth").is_err());
        assert!(RunConfig::parse("trunc = 2").is_err());
        assert!(RunConfig::parse("noise = depol:0.01\neps_n = 1").unwrap().validate().is_err());
        assert!(RunConfig::parse("mode = fast\nprecision_bits = 128").unwrap().context().is_err());
    }

    #[test]
    fn hash_ignores_output_keys() {
        let a = RunConfig::parse("sites = 8\nout = a.csv").unwrap();
        let b = RunConfig::parse("sites = 8\nformat = json").unwrap();
        assert_eq!(a.hash("evolve"), b.hash("evolve"));
        assert_ne!(a.hash("evolve"), a.hash("spectrum"));
    }

    #[test]
    fn overrides_win() {
        let mut a = RunConfig::parse("sites = 8\ndepth = 3").unwrap();
        a.merge(&RunConfig::parse("depth = 5").unwrap()).unwrap();
        assert_eq!(a.depth(), 5);
        assert_eq!(a.sites(), 8);
    }

    #[test]
    fn precision_selection() {
        assert_eq!(RunConfig::default().context().unwrap().bits(), 256);
        assert_eq!(RunConfig::parse("mode = fast").unwrap().context().unwrap().bits(), 53);
        assert_eq!(RunConfig::parse("precision_bits = 128").unwrap().context().unwrap().bits(), 128);
    }
}
