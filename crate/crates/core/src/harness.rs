//! Verification campaigns behind the `pcf` binary: configuration, the five
//! commands, CSV artifacts and `manifest.json`.
//!
//! A config file is flat `key = value` text; `#` starts a comment. Keys:
//!
//! | key | value |
//! |-----|-------|
//! | `delta` | real in `(0, pi/5)` |
//! | `lambda_grid` | `mod:arg, mod:arg, ...` or `moduli x args` with `;`-separated lists |
//! | `x_grid` | `min, max, count[, uniform|geometric]` |
//! | `variants` | subset of `0 + - *`, comma separated |
//! | `ceiling.NAME` | positive real |
//! | `tol.NAME` | positive real |
//! | `output_dir` | path |
//! | `seed`, `jobs`, `random_probes` | integers |
//! | `olver`, `plot_data` | `true` / `false` |
//!
//! Arguments accept `pi`, `pi/k` and `k*pi/m` besides plain numbers, and
//! `delta` as a symbol (`delta/2`, `pi-delta`). Unset keys take
//! command-specific defaults, see [`CampaignConfig::resolve`].

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arc_integrals::{arc_bound_sweep, ArcBound};
use crate::bounds::{estimate_sweep, olver_ratio_with, AnuFromPsi, EstimateRecord, PsiPair, SolutionVariant};
use crate::domains::{arg_z_e, check_delta, default_epsilon, in_domain, DomainSpec};
use crate::error::PcfError;
use crate::lemmas::{self, LemmaGrid};
use crate::picard::{
    asymptotic_sector, calibrate_kernel_sign, run_picard, PicardOptions, Potential, RESOLVED_KERNEL_SIGN,
};
use crate::quasiclassical::{gamma_contour, x_of_z, SpectralParameter};
use crate::specfun::airy_scaled;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "PCF_OUT";

/// Derived spot value of the variant-0 ratio at `lambda = 1`, `x = 2`.
pub const SPOT_RATIO: f64 = 0.087;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => EXIT_CONFIG,
            _ => EXIT_INTERNAL,
        }
    }
}

impl From<PcfError> for HarnessError {
    fn from(e: PcfError) -> Self {
        HarnessError::Internal(e.to_string())
    }
}

type HResult<T> = std::result::Result<T, HarnessError>;

fn config_err<T>(msg: impl Into<String>) -> HResult<T> {
    Err(HarnessError::Config(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyLemmas,
    SweepEstimates,
    Picard,
    AppendixB,
    GammaTrace,
}

impl Command {
    pub const ALL: [Command; 5] =
        [Command::VerifyLemmas, Command::SweepEstimates, Command::Picard, Command::AppendixB, Command::GammaTrace];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyLemmas => "verify-lemmas",
            Command::SweepEstimates => "sweep-estimates",
            Command::Picard => "picard",
            Command::AppendixB => "appendix-b",
            Command::GammaTrace => "gamma-trace",
        }
    }

    pub fn parse(s: &str) -> HResult<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    Uniform,
    /// Log-uniform; needs `min > 0`.
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub grading: Grading,
}

impl XGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let f = k as f64 / n;
                match self.grading {
                    Grading::Uniform => self.min + (self.max - self.min) * f,
                    Grading::Geometric => self.min * (self.max / self.min).powf(f),
                }
            })
            .collect()
    }

    fn validate(&self) -> HResult<()> {
        if self.count == 0 {
            return config_err("x_grid is empty");
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min >= 0.0 && self.max >= self.min) {
            return config_err(format!("x_grid bounds {}..{} invalid", self.min, self.max));
        }
        if self.grading == Grading::Geometric && self.min <= 0.0 {
            return config_err("geometric x_grid needs min > 0");
        }
        Ok(())
    }
}

/// Names accepted after `ceiling.`; all default to 10.
pub const CEILING_NAMES: [&str; 13] = [
    "estimate_zero",
    "estimate_plus",
    "estimate_minus",
    "estimate_star",
    "olver",
    "derivative_bound",
    "exp_decay",
    "exp_grow",
    "power_tail",
    "mixed_tail",
    "power_head",
    "v0",
    "lemmas",
];

/// Names accepted after `tol.` with their defaults.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 5] = [
    ("spot", 1e-3),
    ("picard_gap", 1e-2),
    ("picard_iteration", 1e-10),
    ("contraction_factor", 3.0),
    ("round_trip", 1e-8),
];

const DEFAULT_CEILING: f64 = 10.0;

/// Fully resolved campaign settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub command: Command,
    pub delta: f64,
    /// `(|lambda|, arg lambda)` pairs.
    pub lambda_grid: Vec<(f64, f64)>,
    pub x_grid: XGrid,
    pub variants: Vec<SolutionVariant>,
    pub tolerances: BTreeMap<String, f64>,
    pub ceilings: BTreeMap<String, f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub olver: bool,
    pub plot_data: bool,
    /// Seeded random Picard probes on top of the fixed ones.
    pub random_probes: usize,
}

/// Splits config text into `(key, value)` pairs, rejecting duplicates.
pub fn parse_config_text(text: &str) -> HResult<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return config_err(format!("line {}: expected key = value", no + 1));
        };
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if out.iter().any(|(q, _)| *q == k) {
            return config_err(format!("line {}: duplicate key {k}", no + 1));
        }
        out.push((k, v));
    }
    Ok(out)
}

/// Evaluates an angle expression: a number, `pi`, `pi/4`, `3*pi/4`,
/// `delta`, `delta/2`, `pi-delta`, `pi/2-delta/2`.
pub fn parse_angle(s: &str, delta: f64) -> HResult<f64> {
    let s = s.trim();
    // Left-to-right sum of terms, each term a product/quotient of atoms.
    let mut total = 0.0;
    let mut sign = 1.0;
    let mut term = String::new();
    let flush = |term: &str, sign: f64| -> HResult<f64> {
        let mut val: Option<f64> = None;
        let mut op = '*';
        let mut atom = String::new();
        let apply = |val: Option<f64>, op: char, atom: &str| -> HResult<f64> {
            let a = match atom.trim() {
                "pi" => PI,
                "delta" => delta,
                t => t.parse::<f64>().map_err(|_| HarnessError::Config(format!("bad number {t:?} in {s:?}")))?,
            };
            Ok(match (val, op) {
                (None, _) => a,
                (Some(v), '*') => v * a,
                (Some(v), _) => v / a,
            })
        };
        for c in term.chars() {
            if c == '*' || c == '/' {
                val = Some(apply(val, op, &atom)?);
                atom.clear();
                op = c;
            } else {
                atom.push(c);
            }
        }
        Ok(sign * apply(val, op, &atom)?)
    };
    for (i, c) in s.chars().enumerate() {
        let exponent = i > 0 && term.ends_with(['e', 'E']) && term[..term.len() - 1].parse::<f64>().is_ok();
        if (c == '+' || c == '-') && !term.trim().is_empty() && !exponent {
            total += flush(&term, sign)?;
            term.clear();
            sign = if c == '-' { -1.0 } else { 1.0 };
        } else if (c == '-' || c == '+') && term.trim().is_empty() {
            sign *= if c == '-' { -1.0 } else { 1.0 };
        } else {
            term.push(c);
        }
    }
    if term.trim().is_empty() {
        return config_err(format!("empty expression {s:?}"));
    }
    Ok(total + flush(&term, sign)?)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> HResult<T> {
    v.trim().parse::<T>().map_err(|_| HarnessError::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> HResult<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => config_err(format!("{key}: expected true/false, got {v:?}")),
    }
}

/// `mod:arg, mod:arg` or `m1;m2 x a1;a2` (Cartesian product).
pub fn parse_lambda_grid(v: &str, delta: f64) -> HResult<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    if let Some((ms, args)) = v.split_once(" x ") {
        let ms: Vec<f64> =
            ms.split(';').filter(|s| !s.trim().is_empty()).map(|m| parse_num("lambda_grid", m)).collect::<HResult<_>>()?;
        let args: Vec<f64> =
            args.split(';').filter(|s| !s.trim().is_empty()).map(|a| parse_angle(a, delta)).collect::<HResult<_>>()?;
        for m in &ms {
            for a in &args {
                out.push((*m, *a));
            }
        }
    } else {
        for item in v.split(',').filter(|s| !s.trim().is_empty()) {
            let Some((m, a)) = item.split_once(':') else {
                return config_err(format!("lambda_grid entry {item:?} is not mod:arg"));
            };
            out.push((parse_num("lambda_grid", m)?, parse_angle(a, delta)?));
        }
    }
    Ok(out)
}

pub fn parse_x_grid(v: &str) -> HResult<XGrid> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() < 3 || parts.len() > 4 {
        return config_err(format!("x_grid {v:?}: expected min, max, count[, grading]"));
    }
    let grading = match parts.get(3).copied().unwrap_or("uniform") {
        "uniform" => Grading::Uniform,
        "geometric" => Grading::Geometric,
        g => return config_err(format!("x_grid grading {g:?}")),
    };
    Ok(XGrid {
        min: parse_num("x_grid", parts[0])?,
        max: parse_num("x_grid", parts[1])?,
        count: parse_num("x_grid", parts[2])?,
        grading,
    })
}

fn product(ms: &[f64], args: &[f64]) -> Vec<(f64, f64)> {
    ms.iter().flat_map(|m| args.iter().map(move |a| (*m, *a))).collect()
}

fn default_lambda_grid(command: Command, delta: f64) -> Vec<(f64, f64)> {
    match command {
        Command::VerifyLemmas => (0..=6).map(|k| (1.0, k as f64 * PI / 6.0)).collect(),
        Command::SweepEstimates => product(
            &[1.0, 4.0, 9.0, 16.0, 25.0, 36.0],
            &[0.0, delta / 2.0, delta, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI - delta, PI],
        ),
        Command::Picard => vec![(2.0, FRAC_PI_2), (4.0, 3.0 * FRAC_PI_4), (4.0, 0.3)],
        Command::AppendixB => product(&[1.0, 10.0, 100.0], &[0.0, delta, FRAC_PI_2, PI - delta]),
        Command::GammaTrace => vec![(1.0, 0.0), (4.0, FRAC_PI_4), (4.0, FRAC_PI_2), (16.0, 3.0 * FRAC_PI_4), (16.0, PI)],
    }
}

fn default_x_grid(command: Command) -> XGrid {
    let (min, max, count, grading) = match command {
        Command::VerifyLemmas => (0.0, 10.0, 1601, Grading::Uniform),
        Command::SweepEstimates => (0.0, 6.0, 121, Grading::Uniform),
        Command::Picard => (0.7, 5.0, 3, Grading::Geometric),
        Command::AppendixB => (0.0, 3.0, 31, Grading::Uniform),
        Command::GammaTrace => (0.0, 6.0, 400, Grading::Uniform),
    };
    XGrid { min, max, count, grading }
}

impl CampaignConfig {
    /// Builds the config from file entries, then CLI overrides (same keys;
    /// later wins), then the `PCF_OUT` fallback for the output directory.
    pub fn resolve(
        command: Command,
        file: &[(String, String)],
        overrides: &[(String, String)],
        env_out: Option<String>,
    ) -> HResult<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (k, v) in file.iter().chain(overrides) {
            kv.insert(k.clone(), v.clone());
        }
        let delta = match kv.get("delta") {
            Some(v) => parse_angle(v, f64::NAN)?,
            None => PI / 6.0,
        };
        if check_delta(delta).is_err() {
            return config_err(format!("delta = {delta} outside (0, pi/5)"));
        }
        let mut cfg = CampaignConfig {
            command,
            delta,
            lambda_grid: default_lambda_grid(command, delta),
            x_grid: default_x_grid(command),
            variants: SolutionVariant::ALL.to_vec(),
            tolerances: TOLERANCE_DEFAULTS.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ceilings: CEILING_NAMES.iter().map(|k| (k.to_string(), DEFAULT_CEILING)).collect(),
            output_dir: PathBuf::from(env_out.unwrap_or_else(|| "pcf_out".into())),
            seed: 0,
            jobs: None,
            olver: true,
            plot_data: false,
            random_probes: 8,
        };
        for (k, v) in &kv {
            match k.as_str() {
                "delta" => {}
                "lambda_grid" => cfg.lambda_grid = parse_lambda_grid(v, delta)?,
                "x_grid" => cfg.x_grid = parse_x_grid(v)?,
                "variants" => {
                    cfg.variants = v
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| SolutionVariant::parse(s).map_err(|e| HarnessError::Config(e.to_string())))
                        .collect::<HResult<_>>()?;
                    cfg.variants.dedup();
                }
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                "seed" => cfg.seed = parse_num(k, v)?,
                "jobs" => cfg.jobs = Some(parse_num(k, v)?),
                "olver" => cfg.olver = parse_bool(k, v)?,
                "plot_data" => cfg.plot_data = parse_bool(k, v)?,
                "random_probes" => cfg.random_probes = parse_num(k, v)?,
                _ => {
                    if let Some(name) = k.strip_prefix("ceiling.") {
                        if !CEILING_NAMES.contains(&name) {
                            return config_err(format!("unknown ceiling {name:?}"));
                        }
                        cfg.ceilings.insert(name.to_string(), parse_num(k, v)?);
                    } else if let Some(name) = k.strip_prefix("tol.") {
                        if !TOLERANCE_DEFAULTS.iter().any(|(n, _)| *n == name) {
                            return config_err(format!("unknown tolerance {name:?}"));
                        }
                        cfg.tolerances.insert(name.to_string(), parse_num(k, v)?);
                    } else {
                        return config_err(format!("unknown key {k:?}"));
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> HResult<()> {
        if check_delta(self.delta).is_err() {
            return config_err(format!("delta = {} outside (0, pi/5)", self.delta));
        }
        if self.lambda_grid.is_empty() {
            return config_err("lambda_grid is empty");
        }
        for &(m, a) in &self.lambda_grid {
            if SpectralParameter::from_polar(m, a).is_err() {
                return config_err(format!("lambda {m}:{a} needs |lambda| >= 1/2 and arg in [0, pi]"));
            }
        }
        self.x_grid.validate()?;
        if self.variants.is_empty() {
            return config_err("variants is empty");
        }
        for (k, v) in self.ceilings.iter().chain(&self.tolerances) {
            if !(*v > 0.0 && v.is_finite()) {
                return config_err(format!("{k} = {v} must be positive"));
            }
        }
        if self.jobs == Some(0) {
            return config_err("jobs must be at least 1");
        }
        if self.command == Command::VerifyLemmas && self.x_grid.min != 0.0 {
            return config_err("verify-lemmas samples r from 0; x_grid min must be 0");
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<SpectralParameter> {
        self.lambda_grid
            .iter()
            .map(|&(m, a)| SpectralParameter::from_polar(m, a).expect("validated"))
            .collect()
    }

    pub fn ceiling(&self, name: &str) -> f64 {
        self.ceilings[name]
    }

    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// Resolved settings as strings, for the manifest.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("command".into(), self.command.name().into());
        m.insert("delta".into(), self.delta.to_string());
        let grid: Vec<String> = self.lambda_grid.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        m.insert("lambda_grid".into(), grid.join(","));
        let g = &self.x_grid;
        m.insert("x_grid".into(), format!("{},{},{},{:?}", g.min, g.max, g.count, g.grading).to_lowercase());
        let vs: Vec<&str> = self.variants.iter().map(|v| v.tag()).collect();
        m.insert("variants".into(), vs.join(","));
        for (k, v) in &self.ceilings {
            m.insert(format!("ceiling.{k}"), v.to_string());
        }
        for (k, v) in &self.tolerances {
            m.insert(format!("tol.{k}"), v.to_string());
        }
        m.insert("output_dir".into(), self.output_dir.display().to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("jobs".into(), self.jobs.map_or("default".into(), |j| j.to_string()));
        m.insert("olver".into(), self.olver.to_string());
        m.insert("plot_data".into(), self.plot_data.to_string());
        m.insert("random_probes".into(), self.random_probes.to_string());
        m
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStatus {
    pub name: String,
    pub status: &'static str,
    /// Worst observed value; `null` in JSON when not finite.
    pub observed: f64,
    pub limit: f64,
    /// `"<="` or `">="`: how `observed` is compared with `limit`.
    pub comparison: &'static str,
    pub samples: usize,
    pub detail: String,
}

impl CheckStatus {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    /// `observed <= limit` with every sample valid.
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64, samples: usize, failures: usize) -> Self {
        let ok = samples > 0 && failures == 0 && observed <= limit;
        Self::build(name.into(), ok, observed, limit, "<=", samples, failures)
    }

    /// `observed >= limit` with every sample valid.
    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64, samples: usize, failures: usize) -> Self {
        let ok = samples > 0 && failures == 0 && observed >= limit;
        Self::build(name.into(), ok, observed, limit, ">=", samples, failures)
    }

    fn build(name: String, ok: bool, observed: f64, limit: f64, cmp: &'static str, samples: usize, failures: usize) -> Self {
        let detail = if samples == 0 {
            "no samples".to_string()
        } else if failures > 0 {
            format!("{failures} of {samples} samples failed to evaluate")
        } else {
            String::new()
        };
        Self { name, status: if ok { "pass" } else { "fail" }, observed, limit, comparison: cmp, samples, detail }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        let d = d.into();
        self.detail = if self.detail.is_empty() { d } else { format!("{}; {d}", self.detail) };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelInfo {
    pub resolved_sign: f64,
    pub calibrated_sign: f64,
    /// `J(z, s) = prefactor (Ai(s) Bi(z) - Ai(z) Bi(s)) e^{(2/3)(z^{3/2} - s^{3/2})}`.
    pub j_prefactor: f64,
    pub airy_wronskian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportManifest {
    pub version: &'static str,
    pub command: &'static str,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub checks: Vec<CheckStatus>,
    pub artifacts: Vec<String>,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelInfo>,
}

impl ReportManifest {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckStatus::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckStatus> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Formats one CSV field: floats via `Display` (shortest round trip),
/// text quoted when needed.
pub trait CsvField {
    fn csv(&self) -> String;
}

impl CsvField for f64 {
    fn csv(&self) -> String {
        // Both forms print the shortest digits that round-trip.
        let a = self.abs();
        if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
            self.to_string()
        } else {
            format!("{self:e}")
        }
    }
}

impl CsvField for usize {
    fn csv(&self) -> String {
        self.to_string()
    }
}

impl CsvField for bool {
    fn csv(&self) -> String {
        self.to_string()
    }
}

impl CsvField for &str {
    fn csv(&self) -> String {
        if self.contains([',', '"', '\n', '\r']) {
            format!("\"{}\"", self.replace('"', "\"\""))
        } else {
            self.to_string()
        }
    }
}

impl CsvField for String {
    fn csv(&self) -> String {
        self.as_str().csv()
    }
}

impl CsvField for Option<String> {
    fn csv(&self) -> String {
        self.as_deref().unwrap_or("").csv()
    }
}

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$(CsvField::csv(&$x)),*] };
}

/// Artifact and check collector for one run; single writer.
struct Campaign<'a> {
    cfg: &'a CampaignConfig,
    checks: Vec<CheckStatus>,
    artifacts: Vec<String>,
    kernel: Option<KernelInfo>,
}

impl<'a> Campaign<'a> {
    fn new(cfg: &'a CampaignConfig) -> Self {
        Self { cfg, checks: Vec::new(), artifacts: Vec::new(), kernel: None }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> HResult<()> {
        let p = self.path(name);
        fs::write(&p, bytes).map_err(|source| HarnessError::Io { path: p, source })?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> HResult<()> {
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.write(name, s.as_bytes())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> HResult<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Internal(e.to_string()))?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    fn check(&mut self, c: CheckStatus) -> HResult<()> {
        if self.checks.iter().any(|d| d.name == c.name) {
            return Err(HarnessError::Internal(format!("check {} reported twice", c.name)));
        }
        self.checks.push(c);
        Ok(())
    }
}

/// File-name form of a variant.
pub fn variant_slug(v: SolutionVariant) -> &'static str {
    match v {
        SolutionVariant::Zero => "zero",
        SolutionVariant::Plus => "plus",
        SolutionVariant::Minus => "minus",
        SolutionVariant::Star => "star",
    }
}

/// Whether the variant is defined for `lambda` at this `delta`.
pub fn variant_defined(v: SolutionVariant, lambda: &SpectralParameter, delta: f64) -> bool {
    DomainSpec::new(v.domain_kind(), *lambda, delta).is_ok()
}

fn sup(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

/// Runs the configured command in a pool of `jobs` threads and writes
/// `manifest.json`. Check failures are reported in the manifest, not as
/// errors.
pub fn run(cfg: &CampaignConfig) -> HResult<ReportManifest> {
    cfg.validate()?;
    let start = Instant::now();
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|source| HarnessError::Io { path: cfg.output_dir.clone(), source })?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| HarnessError::Internal(e.to_string()))?;
    let mut camp = Campaign::new(cfg);
    pool.install(|| match cfg.command {
        Command::VerifyLemmas => verify_lemmas(&mut camp),
        Command::SweepEstimates => sweep_estimates(&mut camp),
        Command::Picard => picard(&mut camp),
        Command::AppendixB => appendix_b(&mut camp),
        Command::GammaTrace => gamma_trace(&mut camp),
    })?;
    let mut manifest = ReportManifest {
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        config: cfg.echo(),
        seed: cfg.seed,
        checks: camp.checks,
        artifacts: camp.artifacts,
        wall_clock_seconds: 0.0,
        kernel: camp.kernel,
    };
    manifest.artifacts.push("manifest.json".into());
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    let p = cfg.output_dir.join("manifest.json");
    let mut s = serde_json::to_string_pretty(&manifest).map_err(|e| HarnessError::Internal(e.to_string()))?;
    s.push('\n');
    fs::write(&p, s).map_err(|source| HarnessError::Io { path: p, source })?;
    Ok(manifest)
}

fn verify_lemmas(camp: &mut Campaign) -> HResult<()> {
    let cfg = camp.cfg;
    let mut thetas: Vec<f64> = cfg.lambda_grid.iter().map(|&(_, a)| a / 2.0).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    let grid = LemmaGrid {
        thetas,
        r_max: cfg.x_grid.max,
        r_count: cfg.x_grid.count,
        delta: cfg.delta,
        ceiling: cfg.ceiling("lemmas"),
    };
    let suites = lemmas::all_suites(&grid)?;
    for s in &suites {
        let rows: Vec<Vec<String>> = s
            .clauses
            .iter()
            .map(|c| row![c.clause, c.samples, c.min_margin, c.tol, c.at.0, c.at.1, c.passed()])
            .collect();
        camp.csv(
            &format!("lemma_{}.csv", s.name),
            &["clause", "samples", "min_margin", "tol", "at_a", "at_b", "passed"],
            &rows,
        )?;
        for c in &s.clauses {
            camp.check(
                CheckStatus::at_least(format!("{}.{}", s.name, c.clause), c.min_margin, -c.tol, c.samples, 0)
                    .with_detail(format!("suite samples {}", s.samples)),
            )?;
        }
    }
    Ok(())
}

/// Summary of one variant's sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub variant: &'static str,
    pub points: usize,
    pub in_range_points: usize,
    pub in_range_sup: f64,
    pub in_domain_points: usize,
    pub in_domain_sup: f64,
    pub errors: usize,
}

pub fn summarize_sweep(v: SolutionVariant, recs: &[EstimateRecord]) -> SweepSummary {
    let ok = |r: &&EstimateRecord| r.error.is_none() && r.ratio.is_finite();
    let in_range: Vec<&EstimateRecord> = recs.iter().filter(|r| r.in_range).collect();
    let in_dom: Vec<&EstimateRecord> = recs.iter().filter(|r| r.in_domain).collect();
    SweepSummary {
        variant: v.tag(),
        points: recs.len(),
        in_range_points: in_range.len(),
        in_range_sup: sup(in_range.iter().filter(|r| ok(r)).map(|r| r.ratio)),
        in_domain_points: in_dom.len(),
        in_domain_sup: sup(in_dom.iter().filter(|r| ok(r)).map(|r| r.ratio)),
        errors: recs.iter().filter(|r| r.error.is_some()).count(),
    }
}

fn sweep_estimates(camp: &mut Campaign) -> HResult<()> {
    let cfg = camp.cfg;
    let lambdas = cfg.lambdas();
    let xs = cfg.x_grid.points();
    let points: Vec<(f64, SpectralParameter)> =
        lambdas.iter().flat_map(|l| xs.iter().map(move |x| (*x, *l))).collect();
    let mut summaries = Vec::new();
    for &v in &cfg.variants {
        let recs = estimate_sweep(&points, v, cfg.delta);
        let rows: Vec<Vec<String>> = recs
            .iter()
            .map(|r| {
                let l = r.lambda.value();
                row![r.x, l.re, l.im, r.lhs, r.rhs, r.ratio, r.in_domain, r.in_range, r.error.clone()]
            })
            .collect();
        let slug = variant_slug(v);
        camp.csv(
            &format!("estimates_{slug}.csv"),
            &["x", "re_lambda", "im_lambda", "lhs", "rhs", "ratio", "in_domain", "in_range", "error"],
            &rows,
        )?;
        let s = summarize_sweep(v, &recs);
        let bad = recs.iter().filter(|r| r.in_range && (r.error.is_some() || !r.ratio.is_finite())).count();
        let name = format!("estimate_{slug}");
        camp.check(
            CheckStatus::at_most(&name, s.in_range_sup, cfg.ceiling(&name), s.in_range_points, bad)
                .with_detail(format!("in-domain sup {} over {} points", s.in_domain_sup, s.in_domain_points)),
        )?;
        summaries.push(s);
    }
    camp.json("sweep_summary.json", &summaries)?;

    if cfg.variants.contains(&SolutionVariant::Zero) {
        let one = SpectralParameter::new(1.0, 0.0)?;
        let r = &estimate_sweep(&[(2.0, one)], SolutionVariant::Zero, cfg.delta)[0];
        let gap = (r.ratio - SPOT_RATIO).abs();
        camp.check(
            CheckStatus::at_most("estimate_spot", gap, cfg.tol("spot"), 1, r.error.is_some() as usize)
                .with_detail(format!("ratio {} at lambda = 1, x = 2; expected {SPOT_RATIO}", r.ratio)),
        )?;
    }

    if cfg.olver {
        let pairs: Vec<std::result::Result<PsiPair, String>> =
            lambdas.par_iter().map(|l| PsiPair::new(l).map_err(|e| e.to_string())).collect();
        let jobs: Vec<(usize, f64)> = (0..lambdas.len()).flat_map(|k| xs.iter().map(move |x| (k, *x))).collect();
        let res: Vec<std::result::Result<(f64, f64), String>> = jobs
            .par_iter()
            .map(|&(k, x)| match &pairs[k] {
                Ok(p) => olver_ratio_with(p, x).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            })
            .collect();
        let mut rows = Vec::with_capacity(jobs.len());
        let (mut worst, mut bad) = (f64::NEG_INFINITY, 0);
        for (&(k, x), r) in jobs.iter().zip(&res) {
            let l = lambdas[k].value();
            match r {
                Ok((a, b)) => {
                    if a.is_finite() && b.is_finite() {
                        worst = worst.max(a.max(*b));
                    } else {
                        bad += 1;
                    }
                    rows.push(row![x, l.re, l.im, *a, *b, ""]);
                }
                Err(e) => {
                    bad += 1;
                    rows.push(row![x, l.re, l.im, f64::NAN, f64::NAN, e.clone()]);
                }
            }
        }
        camp.csv("olver.csv", &["x", "re_lambda", "im_lambda", "ratio_psi", "ratio_dpsi", "error"], &rows)?;
        camp.check(CheckStatus::at_most("olver", worst, cfg.ceiling("olver"), jobs.len(), bad))?;
    }

    if cfg.plot_data {
        for l in &lambdas {
            write_gamma(camp, l, cfg.x_grid.max, 400)?;
            for &v in &cfg.variants {
                if variant_defined(v, l, cfg.delta) {
                    let pts = domain_boundary(v, l, cfg.delta)?;
                    let rows: Vec<Vec<String>> = pts.iter().map(|z| row![z.re, z.im]).collect();
                    camp.csv(&format!("domain_{}_{}.csv", variant_slug(v), l.tag()), &["re", "im"], &rows)?;
                }
            }
        }
    }
    Ok(())
}

/// Points where membership in the variant's domain changes along rays from
/// the origin: a point cloud of the boundary for plotting.
pub fn domain_boundary(v: SolutionVariant, lambda: &SpectralParameter, delta: f64) -> HResult<Vec<Complex64>> {
    const RAYS: usize = 120;
    const RADII: usize = 100;
    let spec = DomainSpec::new(v.domain_kind(), *lambda, delta)?;
    let lo = arg_z_e(lambda);
    let r_max = 4.0 * (1.0 + lambda.modulus().powf(2.0 / 3.0));
    let radius = |k: usize| 0.02 * (r_max / 0.02).powf(k as f64 / (RADII - 1) as f64);
    let per_ray: Vec<crate::error::Result<Vec<Complex64>>> = (0..RAYS)
        .into_par_iter()
        .map(|j| {
            let a = lo + 2.0 * PI * (j as f64 + 0.5) / RAYS as f64;
            let mut out = Vec::new();
            let mut prev: Option<bool> = None;
            for k in 0..RADII {
                let z = Complex64::from_polar(radius(k), a);
                let inside = in_domain(&spec, z)?;
                if prev.is_some_and(|p| p != inside) {
                    out.push(Complex64::from_polar(0.5 * (radius(k - 1) + radius(k)), a));
                }
                prev = Some(inside);
            }
            Ok(out)
        })
        .collect();
    let mut pts = Vec::new();
    for r in per_ray {
        pts.extend(r?);
    }
    Ok(pts)
}

fn write_gamma(camp: &mut Campaign, lambda: &SpectralParameter, x_max: f64, n: usize) -> HResult<(f64, usize)> {
    let g = gamma_contour(lambda, x_max, n.max(16))?;
    let rows: Vec<Vec<String>> = g.nodes.iter().map(|z| row![z.re, z.im]).collect();
    camp.csv(&format!("gamma_{}.csv", lambda.tag()), &["re", "im"], &rows)?;
    let errs: Vec<f64> = g
        .nodes
        .par_iter()
        .zip(&g.x_params)
        .map(|(z, x)| match x_of_z(*z, lambda) {
            Ok(w) => (w - x).norm() / (1.0 + x),
            Err(_) => f64::NAN,
        })
        .collect();
    let bad = errs.iter().filter(|e| !e.is_finite()).count() + g.nodes.iter().filter(|z| !z.is_finite()).count();
    Ok((sup(errs.into_iter().filter(|e| e.is_finite())), bad))
}

fn gamma_trace(camp: &mut Campaign) -> HResult<()> {
    let cfg = camp.cfg;
    for l in cfg.lambdas() {
        let (err, bad) = write_gamma(camp, &l, cfg.x_grid.max, cfg.x_grid.count)?;
        camp.check(
            CheckStatus::at_most(format!("gamma_{}", l.tag()), err, cfg.tol("round_trip"), cfg.x_grid.count.max(16), bad)
                .with_detail("relative x_of_z round trip over the nodes"),
        )?;
    }
    Ok(())
}

fn appendix_b(camp: &mut Campaign) -> HResult<()> {
    let cfg = camp.cfg;
    let lambdas = cfg.lambdas();
    let r_values = cfg.x_grid.points();
    for b in ArcBound::ALL {
        let recs = arc_bound_sweep(b, &lambdas, &r_values, b.default_alphas(), cfg.delta)?;
        let rows: Vec<Vec<String>> = recs
            .iter()
            .map(|r| {
                let l = r.lambda.value();
                row![l.re, l.im, r.x, r.z.re, r.z.im, r.alpha, r.lhs, r.rhs, r.ratio, r.error.clone()]
            })
            .collect();
        camp.csv(
            &format!("arc_{}.csv", b.tag()),
            &["re_lambda", "im_lambda", "x", "re_z", "im_z", "alpha", "lhs", "rhs", "ratio", "error"],
            &rows,
        )?;
        let bad = recs.iter().filter(|r| r.error.is_some() || !r.ratio.is_finite()).count();
        let worst = sup(recs.iter().filter(|r| r.ratio.is_finite()).map(|r| r.ratio));
        camp.check(CheckStatus::at_most(b.tag(), worst, cfg.ceiling(b.tag()), recs.len(), bad))?;
    }
    Ok(())
}

/// One Picard probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardProbe {
    pub lambda: SpectralParameter,
    pub variant: SolutionVariant,
    pub z: Complex64,
}

/// Fixed probes: three directions across each variant's asymptotic sector
/// times the `x_grid` moduli, then `random` seeded probes.
pub fn picard_probes(cfg: &CampaignConfig, random: usize) -> HResult<Vec<PicardProbe>> {
    let eps = default_epsilon(cfg.delta)?;
    let moduli = cfg.x_grid.points();
    let lambdas = cfg.lambdas();
    let mut out = Vec::new();
    let mut defined = Vec::new();
    for l in &lambdas {
        for &v in &cfg.variants {
            if !variant_defined(v, l, cfg.delta) {
                continue;
            }
            defined.push((*l, v));
            let (lo, hi) = asymptotic_sector(v, l, cfg.delta, eps);
            for f in [0.1, 0.5, 0.9] {
                for &r in &moduli {
                    out.push(PicardProbe { lambda: *l, variant: v, z: Complex64::from_polar(r, lo + f * (hi - lo)) });
                }
            }
        }
    }
    if defined.is_empty() {
        return config_err("no variant is defined on the lambda grid");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..random {
        let (l, v) = defined[rng.gen_range(0..defined.len())];
        let (lo, hi) = asymptotic_sector(v, &l, cfg.delta, eps);
        let f: f64 = rng.gen_range(0.05..0.95);
        let r = if cfg.x_grid.max > cfg.x_grid.min { rng.gen_range(cfg.x_grid.min..cfg.x_grid.max) } else { cfg.x_grid.min };
        out.push(PicardProbe { lambda: l, variant: v, z: Complex64::from_polar(r.max(0.1), lo + f * (hi - lo)) });
    }
    Ok(out)
}

/// Picard solve next to the psi-oracle value at one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardRecord {
    pub probe: PicardProbe,
    pub abs_a: f64,
    /// `|d a / dz| (1+|z|)^{5/4}` from the Picard solution.
    pub derivative_bound: f64,
    /// The same from the psi oracle.
    pub derivative_bound_psi: f64,
    pub iterations: usize,
    pub final_change: f64,
    pub converged: bool,
    /// `|a - a_psi| / |a_psi|`.
    pub oracle_gap: f64,
    pub error: Option<String>,
}

pub fn picard_records(cfg: &CampaignConfig, probes: &[PicardProbe]) -> Vec<PicardRecord> {
    let lambdas = cfg.lambdas();
    let oracles: Vec<std::result::Result<AnuFromPsi, String>> =
        lambdas.par_iter().map(|l| AnuFromPsi::new(l).map_err(|e| e.to_string())).collect();
    let opts = PicardOptions { delta: cfg.delta, tol: cfg.tol("picard_iteration"), ..PicardOptions::default() };
    probes
        .par_iter()
        .map(|p| {
            let mut rec = PicardRecord {
                probe: *p,
                abs_a: f64::NAN,
                derivative_bound: f64::NAN,
                derivative_bound_psi: f64::NAN,
                iterations: 0,
                final_change: f64::NAN,
                converged: false,
                oracle_gap: f64::NAN,
                error: None,
            };
            let weight = (1.0 + p.z.norm()).powf(1.25);
            let k = lambdas.iter().position(|l| *l == p.lambda);
            let mut solve = || -> std::result::Result<(), String> {
                let run = run_picard(p.variant, p.z, &p.lambda, &opts).map_err(|e| e.to_string())?;
                rec.abs_a = run.a_value.norm();
                rec.derivative_bound = run.a_derivative.norm() * weight;
                rec.iterations = run.iterates.len();
                rec.final_change = run.iterates.last().copied().unwrap_or(f64::NAN);
                rec.converged = run.converged;
                let oracle = match k.map(|k| &oracles[k]) {
                    Some(Ok(o)) => o,
                    Some(Err(e)) => return Err(e.clone()),
                    None => return Err("lambda not on the grid".into()),
                };
                let (a, da) = oracle.a_with_derivative(p.z, p.variant).map_err(|e| e.to_string())?;
                rec.derivative_bound_psi = da.norm() * weight;
                rec.oracle_gap = (run.a_value - a).norm() / a.norm();
                Ok(())
            };
            if let Err(e) = solve() {
                rec.error = Some(e);
            }
            rec
        })
        .collect()
}

/// Contraction of the first Picard step at the fixed anchor `z = 1 + 0.3i`,
/// `arg lambda = 0`, for each modulus: `(|lambda|, r, r |lambda|^{2/3})`.
pub fn contraction_table(moduli: &[f64], delta: f64) -> HResult<Vec<(f64, f64, f64)>> {
    let z = Complex64::new(1.0, 0.3);
    let opts = PicardOptions { delta, ..PicardOptions::default() };
    moduli
        .par_iter()
        .map(|&m| {
            let l = SpectralParameter::new(m, 0.0)?;
            let run = run_picard(SolutionVariant::Zero, z, &l, &opts)?;
            let r = run.contraction().unwrap_or(f64::NAN);
            Ok((m, r, r * m.powf(2.0 / 3.0)))
        })
        .collect::<crate::error::Result<Vec<_>>>()
        .map_err(HarnessError::from)
}

fn picard(camp: &mut Campaign) -> HResult<()> {
    let cfg = camp.cfg;
    let probes = picard_probes(cfg, cfg.random_probes)?;
    let recs = picard_records(cfg, &probes);
    let rows: Vec<Vec<String>> = recs
        .iter()
        .map(|r| {
            let (l, z) = (r.probe.lambda.value(), r.probe.z);
            row![
                l.re,
                l.im,
                z.re,
                z.im,
                r.probe.variant.tag(),
                r.abs_a,
                r.derivative_bound,
                r.derivative_bound_psi,
                r.iterations,
                r.final_change,
                r.converged,
                r.oracle_gap,
                r.error.clone()
            ]
        })
        .collect();
    camp.csv(
        "picard.csv",
        &[
            "re_lambda",
            "im_lambda",
            "re_z",
            "im_z",
            "variant",
            "abs_a",
            "derivative_bound",
            "derivative_bound_psi",
            "iterations",
            "final_change",
            "converged",
            "oracle_gap",
            "error",
        ],
        &rows,
    )?;
    let n = recs.len();
    let bad = recs.iter().filter(|r| r.error.is_some() || !r.oracle_gap.is_finite()).count();
    let gap = sup(recs.iter().filter(|r| r.oracle_gap.is_finite()).map(|r| r.oracle_gap));
    camp.check(CheckStatus::at_most("picard_oracle_gap", gap, cfg.tol("picard_gap"), n, bad))?;
    let unconverged = recs.iter().filter(|r| !r.converged).count();
    camp.check(CheckStatus::at_most("picard_converged", unconverged as f64, 0.0, n, 0))?;
    let dbad = recs
        .iter()
        .filter(|r| !(r.derivative_bound.is_finite() && r.derivative_bound_psi.is_finite()))
        .count();
    let dsup = sup(recs
        .iter()
        .flat_map(|r| [r.derivative_bound, r.derivative_bound_psi])
        .filter(|d| d.is_finite()));
    camp.check(CheckStatus::at_most("derivative_bound", dsup, cfg.ceiling("derivative_bound"), n, dbad))?;

    // V_0 = 0 must return the Airy seed exactly.
    let l = SpectralParameter::from_polar(4.0, 0.6)?;
    let z = Complex64::new(1.2, 0.4);
    let opts = PicardOptions { delta: cfg.delta, potential: Potential::Zero, ..PicardOptions::default() };
    let seed_gap = match run_picard(SolutionVariant::Zero, z, &l, &opts) {
        Ok(run) => (run.a_value - airy_scaled(z).ai).norm(),
        Err(_) => f64::NAN,
    };
    camp.check(CheckStatus::at_most("picard_zero_potential", seed_gap, 0.0, 1, seed_gap.is_nan() as usize))?;

    let table = contraction_table(&[4.0, 16.0, 64.0], cfg.delta)?;
    let rows: Vec<Vec<String>> = table.iter().map(|(m, r, s)| row![*m, *r, *s]).collect();
    camp.csv("picard_contraction.csv", &["modulus", "contraction", "scaled"], &rows)?;
    let scaled: Vec<f64> = table.iter().map(|t| t.2).collect();
    let spread = sup(scaled.iter().copied()) / scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let sbad = scaled.iter().filter(|s| !(s.is_finite() && **s > 0.0)).count();
    camp.check(
        CheckStatus::at_most("picard_contraction_scaling", spread, cfg.tol("contraction_factor"), scaled.len(), sbad)
            .with_detail("max/min of contraction * |lambda|^{2/3} over |lambda| = 4, 16, 64"),
    )?;

    let calibrated = calibrate_kernel_sign(&SpectralParameter::new(4.0, 0.0)?)?;
    camp.check(
        CheckStatus::at_most("picard_kernel_sign", (calibrated - RESOLVED_KERNEL_SIGN).abs(), 0.0, 1, 0)
            .with_detail(format!("calibrated {calibrated}, resolved {RESOLVED_KERNEL_SIGN}")),
    )?;
    camp.kernel = Some(KernelInfo {
        resolved_sign: RESOLVED_KERNEL_SIGN,
        calibrated_sign: calibrated,
        j_prefactor: PI,
        airy_wronskian: 1.0 / PI,
    });
    Ok(())
}

/// Reads a config file, mapping failures to config errors.
pub fn read_config_file(path: &Path) -> HResult<Vec<(String, String)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}
