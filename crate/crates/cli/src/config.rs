//! Flat `key = value` configuration files.
//!
//! One setting per line; blank lines and lines starting with `#` are
//! ignored. Reals accept `pi` factors (`pi/2`, `0.5*pi`), coordinate lists
//! are comma separated and lists of vectors are separated by `;`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};

/// A usage or configuration problem (exit code 1).
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

macro_rules! usage {
    ($($arg:tt)*) => { $crate::config::UsageError(format!($($arg)*)) };
}
pub(crate) use usage;

type Result<T> = std::result::Result<T, UsageError>;

/// Every accepted key with a one-line description.
pub const KEYS: &[(&str, &str)] = &[
    ("seed", "RNG seed (u64)"),
    ("delta", "partition step δ"),
    ("out", "output directory"),
    ("tolerance_scale", "multiplier applied to every check tolerance"),
    ("space", "run: line | euclidean | sphere"),
    ("sphere_radius", "radius of the sphere backend"),
    ("t0", "start of the time interval"),
    ("t1", "end of the time interval"),
    ("gamma_from", "driving geodesic start (coordinates)"),
    ("gamma_to", "driving geodesic end (coordinates)"),
    ("radius", "ball radius r"),
    ("start", "initial point (coordinates)"),
    ("start2", "second initial point (coordinates)"),
    ("convergence_deltas", "comma-separated steps for the refinement study"),
    ("min_order", "smallest accepted fitted convergence order"),
    ("expect_end", "expected end point (coordinates)"),
    ("expect_tol", "tolerance for expect_end"),
    ("pipeline", "retract: cone | phi | psi | radial"),
    ("p", "base point (coordinates)"),
    ("domain_radius", "sampling cap radius around p / quadratic domain radius"),
    ("k_kind", "cone: sector | ray | circular | halfspaces"),
    ("k_a", "first sector generator"),
    ("k_b", "second sector generator"),
    ("k_axis", "circular cone axis"),
    ("k_half_angle", "circular cone half angle"),
    ("k_normals", "halfspace normals, `;`-separated"),
    ("k_start", "phi: arc interface start"),
    ("k_end", "phi: arc interface end"),
    ("gate_file", "phi: CSV of gate coordinates, one per row"),
    ("gate_mesh", "declared covering radius of gate_file"),
    ("eps_k", "interface gate mesh ε_K"),
    ("cap_radius", "psi: radius of the cap U around p"),
    ("pairs", "number of sampled pairs"),
    ("pair_mode", "independent | local | mixed"),
    ("pair_scale", "distance scale of local pairs"),
    ("fixed_probes", "number of probes for the fixed-point check"),
    ("max_ratio_tol", "accepted excess of the Lipschitz ratio over 1"),
    ("fixed_tol", "accepted retraction error"),
    ("family", "flow: quadratic | shifted | drag"),
    ("center", "centre of the quadratic family"),
    ("center2", "centre of the second quadratic family"),
    ("witnesses", "EVI witness points, `;`-separated"),
    ("evi_tol", "EVI tolerance as a multiple of δ"),
    ("estimate_c", "allowed excess C in C·δ for the distance estimate"),
    ("estimate_tol", "accepted deviation of ℓ(t) from the exact law"),
    ("corrupt", "displace the middle point by this multiple of δ"),
    ("c3_pairs", "verify-all: pairs for the hemisphere shortness check"),
    ("c4_pairs", "verify-all: pairs for the contraction trend"),
    ("c7_pairs", "verify-all: pairs for the glued retraction"),
    ("c8_pairs", "verify-all: pairs for the diagonal retraction"),
    ("c8_probes", "verify-all: diagonal probes"),
    ("c9_pairs", "verify-all: pairs for the cone retraction"),
    ("c10_probes", "verify-all: probes for the gate-mesh study"),
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage!("line {}: expected `key = value`", i + 1))?;
            let k = k.trim();
            if cfg.values.contains_key(k) {
                return Err(usage!("line {}: duplicate key `{k}`", i + 1));
            }
            cfg.set(k, v.trim()).map_err(|e| usage!("line {}: {e}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    /// Sets or overrides a key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(usage!("unknown key `{key}`"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Sorted `key=value` lines; the hash is taken over this form. The output
    /// directory is left out so that reruns elsewhere hash the same.
    pub fn canonical(&self) -> String {
        self.values
            .iter()
            .filter(|(k, _)| k.as_str() != "out")
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| real(key, v))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| real(key, v)).transpose()
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse().map_err(|_| usage!("`{key}`: expected a nonnegative integer, got `{v}`"))
        })
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse().map_err(|_| usage!("`{key}`: expected a nonnegative integer, got `{v}`"))
        })
    }

    pub fn coords(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key).map(|v| list(key, v)).transpose()
    }

    pub fn coords_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        Ok(self.coords(key)?.unwrap_or_else(|| default.to_vec()))
    }

    pub fn vectors(&self, key: &str) -> Result<Option<Vec<Vec<f64>>>> {
        self.get(key)
            .map(|v| v.split(';').map(|part| list(key, part)).collect())
            .transpose()
    }

    /// `seed`, `delta` and `tolerance_scale` checked up front. Upper
    /// tolerances are multiplied by `tolerance_scale` and lower bounds divided
    /// by it, so a scale below 1 tightens every check.
    pub fn common(&self) -> Result<Common> {
        let seed = self.u64_or("seed", 0)?;
        let delta = self.opt_f64("delta")?;
        if let Some(d) = delta {
            positive("delta", d)?;
        }
        let tolerance_scale = self.f64_or("tolerance_scale", 1.0)?;
        positive("tolerance_scale", tolerance_scale)?;
        Ok(Common {
            seed,
            delta,
            tolerance_scale,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Common {
    pub seed: u64,
    pub delta: Option<f64>,
    pub tolerance_scale: f64,
}

pub fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage!("`{key}` must be positive and finite, got {v}"))
    }
}

/// A real number, optionally with `pi` factors: `pi`, `-pi/2`, `0.5*pi`, `pi/200`.
pub fn real(key: &str, text: &str) -> Result<f64> {
    let bad = || usage!("`{key}`: cannot read `{text}` as a number");
    let t = text.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t, None),
    };
    let product = |s: &str| -> Result<f64> {
        s.split('*').try_fold(1.0, |acc, f| {
            let f = f.trim();
            let v = if f.eq_ignore_ascii_case("pi") { PI } else { f.parse::<f64>().map_err(|_| bad())? };
            Ok(acc * v)
        })
    };
    let mut v = product(num)?;
    if let Some(d) = den {
        v /= product(d)?;
    }
    Ok(if neg { -v } else { v })
}

pub fn list(key: &str, text: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = text.split(',').map(|c| real(key, c)).collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(usage!("`{key}` is empty"));
    }
    Ok(out)
}
