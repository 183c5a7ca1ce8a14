//! Flag and config-file resolution. A config file holds `key = value` lines
//! using the long flag names (`t-end`, `tol-zero`, ...); `#` starts a comment.
//! Flags given on the command line take precedence over the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rollmeasure_core::density::{ChartOrientation, DivergenceSample};
use rollmeasure_core::dynamics::{k_from_omega, ReducedState};
use rollmeasure_core::{SemiAxes, Vec3};
use serde::Serialize;

use crate::error::CliError;
use crate::BodyArgs;

const KNOWN_KEYS: &[&str] = &[
    "a",
    "b",
    "c",
    "m",
    "grid",
    "tol-zero",
    "mode",
    "dt",
    "t-end",
    "seed",
    "out",
    "density",
    "samples",
    "trajectories",
    "omega-max",
    "gamma",
    "omega",
];

#[derive(Debug, Default)]
pub struct FileValues(BTreeMap<String, String>);

impl FileValues {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{}`", n + 1, k.trim()));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::config(format!("config key `{key}`: {e}"))),
        }
    }

    /// Flag value if present, else the file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

pub fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::config(format!("missing required --{flag} (give it as a flag or in --config)")))
}

pub fn positive(v: f64, flag: &str) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!("--{flag} must be finite and positive, got {v}")))
    }
}

/// Three comma-separated numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple(pub [f64; 3]);

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        match parts.as_slice() {
            [Ok(x), Ok(y), Ok(z)] if x.is_finite() && y.is_finite() && z.is_finite() => Ok(Triple([*x, *y, *z])),
            _ => Err(format!("expected three finite comma-separated numbers, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BodyConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub m: f64,
}

impl BodyConfig {
    pub fn resolve(args: &BodyArgs, file: &FileValues) -> Result<(Self, SemiAxes), CliError> {
        let a = require(file.pick(args.a, "a")?, "a")?;
        let b = require(file.pick(args.b, "b")?, "b")?;
        let c = require(file.pick(args.c, "c")?, "c")?;
        let m = require(file.pick(args.m, "m")?, "m")?;
        let ax = SemiAxes::new(a, b, c, m)?;
        Ok((Self { a, b, c, m }, ax))
    }
}

pub fn resolve_out(args: &BodyArgs, file: &FileValues) -> Result<PathBuf, CliError> {
    Ok(file
        .pick(args.out.clone(), "out")?
        .unwrap_or_else(|| PathBuf::from("rollmeasure-out")))
}

/// Five uniform variates from the seeded stream.
pub fn uniform5(rng: &mut ChaCha8Rng) -> [f64; 5] {
    std::array::from_fn(|_| rng.random())
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Initial data as given, or drawn from the seed when neither vector is given.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InitialData {
    pub gamma: [f64; 3],
    pub omega: [f64; 3],
    pub drawn_from_seed: bool,
}

pub const DEFAULT_OMEGA_MAX: f64 = 2.0;

impl InitialData {
    pub fn resolve(gamma: Option<Triple>, omega: Option<Triple>, seed: Option<u64>, omega_max: f64) -> Result<Self, CliError> {
        match (gamma, omega) {
            (Some(g), Some(o)) => {
                let gv = Vec3::from(g.0);
                let n = gv.norm();
                if n == 0.0 {
                    return Err(CliError::config("--gamma must be nonzero"));
                }
                let gv = gv / n;
                Ok(Self {
                    gamma: [gv.x, gv.y, gv.z],
                    omega: o.0,
                    drawn_from_seed: false,
                })
            }
            (None, None) => {
                let seed = seed.ok_or_else(|| CliError::config("give --gamma and --omega, or --seed to draw them at random"))?;
                let s = DivergenceSample::from_uniform(uniform5(&mut seeded(seed)), omega_max);
                let g = s.gamma(ChartOrientation::Standard);
                Ok(Self {
                    gamma: [g.x, g.y, g.z],
                    omega: [s.omega.x, s.omega.y, s.omega.z],
                    drawn_from_seed: true,
                })
            }
            _ => Err(CliError::config("--gamma and --omega must be given together")),
        }
    }

    pub fn state(&self, ax: &SemiAxes) -> ReducedState {
        let g = Vec3::from(self.gamma);
        ReducedState::new(g, k_from_omega(ax, &g, &Vec3::from(self.omega)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let f = FileValues::parse("a = 1\n# comment\nt_end=2.5 # trailing\n\nmode = both\n").unwrap();
        assert_eq!(f.get::<f64>("a").unwrap(), Some(1.0));
        assert_eq!(f.get::<f64>("t-end").unwrap(), Some(2.5));
        assert_eq!(f.pick(Some(3.0), "t-end").unwrap(), Some(3.0));
        assert_eq!(f.get::<String>("mode").unwrap().as_deref(), Some("both"));
    }

    #[test]
    fn rejects_unknown_and_malformed_lines() {
        assert!(FileValues::parse("alpha = 1").is_err());
        assert!(FileValues::parse("just words").is_err());
        let f = FileValues::parse("dt = fast").unwrap();
        assert!(f.get::<f64>("dt").is_err());
    }

    #[test]
    fn triples() {
        assert_eq!("1, 2,3".parse::<Triple>().unwrap(), Triple([1.0, 2.0, 3.0]));
        assert!("1,2".parse::<Triple>().is_err());
        assert!("1,nan,2".parse::<Triple>().is_err());
    }

    #[test]
    fn initial_data_rules() {
        assert!(InitialData::resolve(None, None, None, 2.0).is_err());
        assert!(InitialData::resolve(Some(Triple([0.0, 0.0, 1.0])), None, Some(1), 2.0).is_err());
        let d = InitialData::resolve(Some(Triple([0.0, 0.0, 2.0])), Some(Triple([0.0, 0.0, 1.0])), None, 2.0).unwrap();
        assert_eq!(d.gamma, [0.0, 0.0, 1.0]);
        let r1 = InitialData::resolve(None, None, Some(9), 2.0).unwrap();
        let r2 = InitialData::resolve(None, None, Some(9), 2.0).unwrap();
        assert_eq!(r1.omega, r2.omega);
        assert!(Vec3::from(r1.omega).norm() <= 2.0);
    }
}
