//! Seeded experiments: x-sweeps over one instance and bound-verification
//! campaigns over many.
//!
//! Configuration is a flat `key = value` text file:
//!
//! ```text
//! # comments start with '#'
//! sizes     = 3,3          # block sizes (required for sweeps)
//! seed      = 11
//! min_entry = 0            # floor for within-block entries
//! x_grid    = 0:0.05:21    # min:max:points, inclusive
//! x_list    = 0,0.01,0.02  # alternative to x_grid
//! modes     = oracle_epsilon,known_sizes,empirical,approx_one
//! norm      = frobenius    # or spectral
//! side      = right        # or left
//! format    = csv          # or jsonl
//! out       = sweep.csv
//! gap_tol   = 1e-10
//! timestamp = true         # false gives byte-reproducible output
//! instances = 100          # verify-bounds only
//! max_n     = 40           # verify-bounds only, when sizes are not given
//! ```
//!
//! Every point of a sweep or campaign is independent and runs through
//! [`crate::exec`]; output order never depends on completion order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{epsilon_bound, exact_recovery_xmax, lemma1_validate, theorem3_validate, weyl_envelope, BoundCertificate, CertContext};
use crate::chain::{generate_decoupled, generate_perturbation, PerturbationInstance};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::io::format_f64;
use crate::recovery::{
    partition_match, recover_empirical, recover_exact, recover_one_approx, symdiff_min, NormChoice, RecoveryOptions,
    Threshold,
};
use crate::spectral::{symmetrize, Side, DEFAULT_GAP_TOL};

pub const SWEEP_SCHEMA: &str = "blockrec-sweep";
pub const CERT_SCHEMA: &str = "blockrec-certificates";
pub const SCHEMA_VERSION: u32 = 1;

/// Slack on the Weyl-derived alpha/beta handed to the symmetric lemma check,
/// so that singular values sitting exactly on the envelope are not rejected
/// for rounding.
const HYPOTHESIS_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum XGrid {
    Range { min: f64, max: f64, points: usize },
    List(Vec<f64>),
}

impl XGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            XGrid::Range { min, max, points } => {
                if *points == 1 {
                    return vec![*min];
                }
                let step = (max - min) / (*points - 1) as f64;
                (0..*points).map(|i| if i + 1 == *points { *max } else { min + step * i as f64 }).collect()
            }
            XGrid::List(v) => v.clone(),
        }
    }
}

impl FromStr for XGrid {
    type Err = Error;

    /// `min:max:points`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("x grid {s:?} is not min:max:points")));
        }
        let min = parse_value::<f64>("x_grid", parts[0])?;
        let max = parse_value::<f64>("x_grid", parts[1])?;
        let points = parse_value::<usize>("x_grid", parts[2])?;
        if points == 0 {
            return Err(Error::Config("x grid needs at least one point".into()));
        }
        if !(min <= max) {
            return Err(Error::Config(format!("x grid min {min} exceeds max {max}")));
        }
        Ok(XGrid::Range { min, max, points })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    OracleEpsilon,
    KnownSizes,
    Empirical,
    ApproxOne,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::OracleEpsilon => "oracle_epsilon",
            SweepMode::KnownSizes => "known_sizes",
            SweepMode::Empirical => "empirical",
            SweepMode::ApproxOne => "approx_one",
        }
    }

    pub fn is_partition_mode(self) -> bool {
        self != SweepMode::ApproxOne
    }
}

impl FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "oracle_epsilon" | "oracle" => Ok(SweepMode::OracleEpsilon),
            "known_sizes" => Ok(SweepMode::KnownSizes),
            "empirical" => Ok(SweepMode::Empirical),
            "approx_one" | "approx" => Ok(SweepMode::ApproxOne),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

impl FromStr for NormChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "frobenius" => Ok(NormChoice::Frobenius),
            "spectral" => Ok(NormChoice::Spectral),
            other => Err(Error::Config(format!("unknown norm {other:?}"))),
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::Config(format!("unknown side {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub sizes: Option<Vec<usize>>,
    pub seed: u64,
    pub min_entry: f64,
    pub x_grid: Option<XGrid>,
    pub modes: Vec<SweepMode>,
    pub norm: NormChoice,
    pub side: Side,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub gap_tol: f64,
    pub timestamp: bool,
    pub instances: usize,
    pub max_n: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sizes: None,
            seed: 0,
            min_entry: 0.0,
            x_grid: None,
            modes: vec![SweepMode::OracleEpsilon, SweepMode::KnownSizes, SweepMode::Empirical, SweepMode::ApproxOne],
            norm: NormChoice::Frobenius,
            side: Side::Right,
            format: OutputFormat::Csv,
            out: None,
            gap_tol: DEFAULT_GAP_TOL,
            timestamp: true,
            instances: 100,
            max_n: 40,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
}

pub fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_value(key, s)).collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", ln + 1)))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", ln + 1)));
            }
            cfg.set(key, value.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key; shared by the file parser and CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "sizes" => self.sizes = Some(parse_list(key, value)?),
            "seed" => self.seed = parse_value(key, value)?,
            "min_entry" => self.min_entry = parse_value(key, value)?,
            "x_grid" => self.x_grid = Some(value.parse()?),
            "x_list" => self.x_grid = Some(XGrid::List(parse_list(key, value)?)),
            "modes" => self.modes = parse_list(key, value)?,
            "norm" => self.norm = value.parse()?,
            "side" => self.side = value.parse()?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "gap_tol" => self.gap_tol = parse_value(key, value)?,
            "timestamp" => self.timestamp = parse_value(key, value)?,
            "instances" => self.instances = parse_value(key, value)?,
            "max_n" => self.max_n = parse_value(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    fn recovery_options(&self, exec: Execution) -> RecoveryOptions {
        RecoveryOptions { side: self.side, gap_tol: self.gap_tol, norm: self.norm, exec }
    }

    fn check_grid(&self, x_max: f64) -> Result<()> {
        if let Some(grid) = &self.x_grid {
            let values = grid.values();
            if values.is_empty() {
                return Err(Error::Config("x grid is empty".into()));
            }
            if let Some(x) = values.iter().find(|x| !(0.0..=x_max).contains(*x)) {
                return Err(Error::Config(format!("x = {x} outside [0, {x_max}]")));
            }
        }
        Ok(())
    }
}

/// One (x, mode) outcome of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub x: f64,
    /// `None` when x is out of regime.
    pub epsilon: Option<f64>,
    pub mode: SweepMode,
    pub exact_success: Option<bool>,
    pub symdiff: Option<usize>,
    pub tried_gaps: Option<usize>,
    pub runtime_ms: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub n: usize,
    pub k: usize,
    pub sigma_gap: f64,
    pub norm_e: f64,
    pub x_star: Option<f64>,
    pub records: Vec<SweepRecord>,
}

/// Instance for a sweep config.
pub fn sweep_instance(cfg: &ExperimentConfig) -> Result<PerturbationInstance> {
    let sizes = cfg.sizes.as_ref().ok_or_else(|| Error::Config("sweep requires `sizes`".into()))?;
    let chain = generate_decoupled(sizes, cfg.seed, cfg.min_entry)?;
    generate_perturbation(&chain, cfg.seed)
}

/// Runs every mode at every grid point against the config's seeded instance.
pub fn run_sweep(cfg: &ExperimentConfig, exec: Execution) -> Result<SweepOutput> {
    if cfg.modes.is_empty() {
        return Err(Error::Config("mode list is empty".into()));
    }
    let inst = sweep_instance(cfg)?;
    cfg.check_grid(inst.x_max())?;
    let grid = cfg.x_grid.as_ref().ok_or_else(|| Error::Config("sweep requires `x_grid` or `x_list`".into()))?;
    let mut xs = grid.values();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut modes = cfg.modes.clone();
    modes.sort();
    modes.dedup();

    let norm_e = inst.norm_e();
    let sigma_gap = inst.sigma_gap();
    let truth = inst.base().partition();
    let x_star = if truth.k() >= 2 { Some(exact_recovery_xmax(truth, sigma_gap, norm_e)?) } else { None };
    let points: Vec<(f64, SweepMode)> = xs.iter().flat_map(|&x| modes.iter().map(move |&m| (x, m))).collect();
    let opts = cfg.recovery_options(exec);
    let records = map_slice(exec, &points, |&(x, mode)| {
        let started = Instant::now();
        let mut rec = sweep_point(&inst, x, mode, norm_e, sigma_gap, &opts);
        if cfg.timestamp {
            rec.runtime_ms = Some(started.elapsed().as_secs_f64() * 1e3);
        }
        rec
    });
    Ok(SweepOutput { n: inst.n(), k: inst.k(), sigma_gap, norm_e, x_star, records })
}

fn sweep_point(
    inst: &PerturbationInstance,
    x: f64,
    mode: SweepMode,
    norm_e: f64,
    sigma_gap: f64,
    opts: &RecoveryOptions,
) -> SweepRecord {
    let epsilon = epsilon_bound(x, norm_e, sigma_gap).ok().map(|e| e.epsilon);
    let mut rec = SweepRecord {
        x,
        epsilon,
        mode,
        exact_success: None,
        symdiff: None,
        tried_gaps: None,
        runtime_ms: None,
        error: None,
    };
    let truth = inst.base().partition();
    let k = inst.k();
    let outcome = (|| -> Result<()> {
        let t = inst.transition_at(x)?;
        let need_eps = || epsilon.ok_or(Error::OutOfRegime { lhs: 2.0 * x * norm_e, sigma_gap });
        match mode {
            SweepMode::OracleEpsilon => {
                let r = recover_exact(&t, k, Threshold::OracleEpsilon { epsilon: need_eps()? }, opts)?;
                rec.exact_success = Some(partition_match(&r.partition, truth)?);
            }
            SweepMode::KnownSizes => {
                let sizes = truth.sizes_desc();
                if sizes.len() < 2 {
                    return Err(Error::Parameter("known_sizes needs at least two blocks".into()));
                }
                let th = Threshold::KnownSizes { n1: sizes[0], n2: sizes[1] };
                let r = recover_exact(&t, k, th, opts)?;
                rec.exact_success = Some(partition_match(&r.partition, truth)?);
            }
            SweepMode::Empirical => {
                let r = recover_empirical(&t, k, opts)?;
                rec.tried_gaps = Some(r.diagnostics.tried.len());
                rec.exact_success = Some(partition_match(&r.partition, truth)?);
            }
            SweepMode::ApproxOne => {
                let r = recover_one_approx(&t, k, need_eps()?, opts)?;
                rec.symdiff = Some(symdiff_min(&r.s_hat, truth).1);
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        if mode.is_partition_mode() {
            rec.exact_success = Some(false);
        }
        rec.error = Some(e.to_string());
    }
    rec
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn unix_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Renders sweep records. With `timestamp`, a generation-time line is added
/// after the schema line.
pub fn render_sweep(out: &SweepOutput, format: OutputFormat, timestamp: bool) -> String {
    let mut s = String::new();
    match format {
        OutputFormat::Csv => {
            s.push_str(&format!("# schema={SWEEP_SCHEMA} version={SCHEMA_VERSION}\n"));
            if timestamp {
                s.push_str(&format!("# generated_unix={}\n", unix_seconds()));
            }
            s.push_str("x,epsilon,mode,exact_success,symdiff,tried_gaps,runtime_ms,error\n");
            for r in &out.records {
                let eps = r.epsilon.map(format_f64).unwrap_or_else(|| "out_of_regime".into());
                let row = [
                    format_f64(r.x),
                    eps,
                    r.mode.name().to_string(),
                    opt(&r.exact_success),
                    opt(&r.symdiff),
                    opt(&r.tried_gaps),
                    r.runtime_ms.map(|v| format!("{v:.3}")).unwrap_or_default(),
                    csv_field(r.error.as_deref().unwrap_or("")),
                ];
                s.push_str(&row.join(","));
                s.push('\n');
            }
        }
        OutputFormat::Jsonl => {
            let mut header = serde_json::json!({"schema": SWEEP_SCHEMA, "version": SCHEMA_VERSION});
            if timestamp {
                header["generated_unix"] = unix_seconds().into();
            }
            s.push_str(&header.to_string());
            s.push('\n');
            for r in &out.records {
                s.push_str(&serde_json::to_string(r).expect("plain data"));
                s.push('\n');
            }
        }
    }
    s
}

/// One line of a verification campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateRecord {
    pub name: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub satisfied: Option<bool>,
    pub n: usize,
    pub k: usize,
    pub x: f64,
    pub seed: u64,
    /// 2 x ||E|| < sigma_{n-k}(I - T_0).
    pub in_regime: bool,
    pub note: Option<String>,
}

impl CertificateRecord {
    fn from_cert(c: &BoundCertificate, x: f64, seed: u64, in_regime: bool) -> Self {
        CertificateRecord {
            name: c.name.clone(),
            lhs: Some(c.lhs),
            rhs: Some(c.rhs),
            satisfied: Some(c.satisfied),
            n: c.context.n,
            k: c.context.k,
            x,
            seed,
            in_regime,
            note: None,
        }
    }

    fn note(name: &str, ctx: (usize, usize, f64, u64), in_regime: bool, note: String) -> Self {
        CertificateRecord {
            name: name.into(),
            lhs: None,
            rhs: None,
            satisfied: None,
            n: ctx.0,
            k: ctx.1,
            x: ctx.2,
            seed: ctx.3,
            in_regime,
            note: Some(note),
        }
    }

    /// An in-regime row that failed its inequality or could not be evaluated.
    pub fn is_violation(&self) -> bool {
        self.in_regime && self.satisfied != Some(true) && !self.is_not_applicable()
    }

    fn is_not_applicable(&self) -> bool {
        self.note.as_deref().is_some_and(|n| n.starts_with("not applicable"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub instances: usize,
    pub certificates: usize,
    pub in_regime: usize,
    pub satisfied: usize,
    pub violations: usize,
    pub out_of_regime: usize,
}

impl fmt::Display for CampaignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instances={} certificates={} in_regime={} satisfied={} violations={} out_of_regime={}",
            self.instances, self.certificates, self.in_regime, self.satisfied, self.violations, self.out_of_regime
        )
    }
}

#[derive(Clone, Debug)]
pub struct CampaignOutput {
    pub records: Vec<CertificateRecord>,
    pub summary: CampaignSummary,
}

/// `points` values of x evenly spaced on [0, 0.95 x_reg] where
/// x_reg = sigma_gap / (2 ||E||) is the edge of the bound's regime.
pub fn in_regime_grid(inst: &PerturbationInstance, points: usize) -> Vec<f64> {
    let edge = (0.95 * inst.sigma_gap() / (2.0 * inst.norm_e())).min(inst.x_max());
    XGrid::Range { min: 0.0, max: edge, points: points.max(1) }.values()
}

/// Random block sizes for campaign instance `seed`: k in {2, 3, 4}, each
/// block of size 2..=max_n/k.
pub fn campaign_sizes(seed: u64, max_n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let k = rng.random_range(2..=4usize);
    let cap = (max_n / k).max(2);
    (0..k).map(|_| rng.random_range(2..=cap)).collect()
}

/// Certificates for one instance at one x.
pub fn certify_point(inst: &PerturbationInstance, x: f64, seed: u64) -> Vec<CertificateRecord> {
    let (n, k) = (inst.n(), inst.k());
    let norm_e = inst.norm_e();
    let sigma_gap = inst.sigma_gap();
    let in_regime = 2.0 * x * norm_e < sigma_gap;
    let ctx = (n, k, x, seed);
    let mut out = Vec::new();

    match weyl_envelope(inst, x, k, Some(seed)) {
        Ok(certs) => out.extend(certs.iter().map(|c| CertificateRecord::from_cert(c, x, seed, in_regime))),
        Err(e) => out.push(CertificateRecord::note("weyl", ctx, in_regime, e.to_string())),
    }

    match theorem3_validate(inst, x, Some(seed)) {
        Ok(r) => out.push(CertificateRecord::from_cert(&r.certificate, x, seed, true)),
        Err(Error::OutOfRegime { .. }) => {
            out.push(CertificateRecord::note("theorem3", ctx, false, "out of regime".into()))
        }
        Err(e) => out.push(CertificateRecord::note("theorem3", ctx, in_regime, e.to_string())),
    }

    // The symmetric lemma applied to S(I - T_0) and S(I - T(x)) with the
    // Weyl-derived alpha and beta; needs alpha > 0, so x > 0.
    if !in_regime {
        out.push(CertificateRecord::note("lemma1", ctx, false, "out of regime".into()));
    } else if x == 0.0 {
        out.push(CertificateRecord::note("lemma1", ctx, true, "not applicable at x = 0 (alpha = 0)".into()));
    } else {
        let alpha = x * norm_e + HYPOTHESIS_SLACK;
        let beta = sigma_gap - x * norm_e - HYPOTHESIS_SLACK;
        let run = || -> Result<BoundCertificate> {
            let a = symmetrize(&inst.base().matrix().laplacian()?)?;
            let b = symmetrize(&inst.transition_at(x)?.laplacian()?)?;
            let mut c = lemma1_validate(&a, &b, 2 * k, alpha, beta)?;
            c.context = CertContext { n, k, x: Some(x), seed: Some(seed) };
            Ok(c)
        };
        match run() {
            Ok(c) => out.push(CertificateRecord::from_cert(&c, x, seed, true)),
            Err(e) => out.push(CertificateRecord::note("lemma1", ctx, true, e.to_string())),
        }
    }
    out
}

/// Verification campaign over `cfg.instances` seeded instances
/// (seeds `cfg.seed`, `cfg.seed + 1`, ...).
pub fn run_campaign(cfg: &ExperimentConfig, exec: Execution) -> Result<CampaignOutput> {
    if cfg.instances == 0 {
        return Err(Error::Config("instances must be positive".into()));
    }
    if let Some(sizes) = &cfg.sizes {
        if sizes.len() < 2 {
            return Err(Error::Config("verify-bounds needs at least two blocks".into()));
        }
    }
    cfg.check_grid(1.0)?;
    let seeds: Vec<u64> = (0..cfg.instances as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let per_instance = map_slice(exec, &seeds, |&seed| -> Result<Vec<CertificateRecord>> {
        let sizes = cfg.sizes.clone().unwrap_or_else(|| campaign_sizes(seed, cfg.max_n));
        let chain = generate_decoupled(&sizes, seed, cfg.min_entry)?;
        let inst = generate_perturbation(&chain, seed)?;
        let xs = match &cfg.x_grid {
            Some(g) => g.values(),
            None => in_regime_grid(&inst, 20),
        };
        Ok(xs.iter().flat_map(|&x| certify_point(&inst, x, seed)).collect())
    });
    let mut records = Vec::new();
    for r in per_instance {
        records.extend(r?);
    }
    let summary = CampaignSummary {
        instances: cfg.instances,
        certificates: records.len(),
        in_regime: records.iter().filter(|r| r.in_regime).count(),
        satisfied: records.iter().filter(|r| r.satisfied == Some(true)).count(),
        violations: records.iter().filter(|r| r.is_violation()).count(),
        out_of_regime: records.iter().filter(|r| !r.in_regime).count(),
    };
    Ok(CampaignOutput { records, summary })
}

/// JSON lines, one certificate per line, after a schema header line.
pub fn render_certificates(out: &CampaignOutput, timestamp: bool) -> String {
    let mut header = serde_json::json!({"schema": CERT_SCHEMA, "version": SCHEMA_VERSION});
    if timestamp {
        header["generated_unix"] = unix_seconds().into();
    }
    let mut s = header.to_string();
    s.push('\n');
    for r in &out.records {
        s.push_str(&serde_json::to_string(r).expect("plain data"));
        s.push('\n');
    }
    s
}
