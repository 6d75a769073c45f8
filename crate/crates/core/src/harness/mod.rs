//! Configuration, orchestration and persistence for command-line runs.
//!
//! A configuration is a flat `key = value` text file. `schema = 1` is
//! mandatory, `#` starts a comment, lists are comma separated and numbers
//! may be written as fractions (`1/16`). Unknown or repeated keys are
//! errors.

mod field_io;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{LfppError, Result};
use crate::estimators::{
    self, bilip_compare, estimate_Q, estimate_a, estimate_cr, gamma_from_Q, ratio_scan,
    subadditive_rate, BilipConfig, EstimateRecord, EventStudy, Params, Sampling, ScaleLadder,
};
use crate::gff::{sample_field, SamplerConfig};

pub use field_io::{load_field, read_field, save_field, write_field, HEADER_LEN, MAGIC};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SampleField,
    EstimateA,
    EstimateQ,
    EstimateCr,
    RatioScan,
    Events,
    Multiscale,
    Compare,
    SubaddDemo,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        Self::SampleField,
        Self::EstimateA,
        Self::EstimateQ,
        Self::EstimateCr,
        Self::RatioScan,
        Self::Events,
        Self::Multiscale,
        Self::Compare,
        Self::SubaddDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SampleField => "sample-field",
            Self::EstimateA => "estimate-a",
            Self::EstimateQ => "estimate-q",
            Self::EstimateCr => "estimate-cr",
            Self::RatioScan => "ratio-scan",
            Self::Events => "events",
            Self::Multiscale => "multiscale",
            Self::Compare => "compare",
            Self::SubaddDemo => "subadd-demo",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = LfppError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LfppError::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub length: f64,
    pub spectral_cutoff: Option<usize>,
    pub amplitude_override: bool,
    pub xi: f64,
    pub zeta: f64,
    pub q: f64,
    pub eps: Vec<f64>,
    pub radii: Vec<f64>,
    pub cs: Vec<f64>,
    /// Surrogate scale for the limit metric; three lattice spacings if unset.
    pub eps_fine: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub pairs: usize,
    pub region_side: f64,
    pub ball_radius: Option<f64>,
    pub a_coarse: Option<f64>,
    pub a_fine: Option<f64>,
    pub sequence: Vec<f64>,
    pub slack: f64,
}

const KEYS: &[&str] = &[
    "schema", "kind", "n", "L", "spectral_cutoff", "amplitude_override", "xi", "zeta", "q", "eps",
    "r", "C", "eps_fine", "samples", "seed", "workers", "out", "pairs", "region_side", "ball_radius",
    "a_coarse", "a_fine", "sequence", "slack",
];

fn cfg_err(msg: impl Into<String>) -> LfppError {
    LfppError::Config(msg.into())
}

fn parse_number(key: &str, s: &str) -> Result<f64> {
    let bad = || cfg_err(format!("`{key}`: cannot parse `{s}` as a number"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_number(key, t.trim())).collect()
}

fn parse_int<T: FromStr>(key: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| cfg_err(format!("`{key}`: cannot parse `{s}` as an integer")))
}

fn parse_bool(key: &str, s: &str) -> Result<bool> {
    match s {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(cfg_err(format!("`{key}`: expected true or false, got `{s}`"))),
    }
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self {
            kind,
            n: 1024,
            length: 8.0,
            spectral_cutoff: None,
            amplitude_override: false,
            xi: 1.0 / 6f64.sqrt(),
            zeta: 0.25,
            q: crate::mollify::DEFAULT_Q,
            eps: Vec::new(),
            radii: Vec::new(),
            cs: Vec::new(),
            eps_fine: None,
            samples: 10,
            seed: 0,
            workers: 1,
            out: PathBuf::from("out"),
            pairs: 50,
            region_side: 1.0,
            ball_radius: None,
            a_coarse: None,
            a_fine: None,
            sequence: Vec::new(),
            slack: 0.0,
        }
    }

    /// Parses a configuration text. `kind` overrides or supplies the
    /// experiment kind; a conflicting `kind` key is an error.
    pub fn parse(text: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(cfg_err(format!("line {}: unknown key `{k}`", lineno + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(cfg_err(format!("line {}: key `{k}` repeated", lineno + 1)));
            }
        }
        match entries.get("schema") {
            None => return Err(cfg_err("missing `schema` key")),
            Some(v) if parse_int::<u32>("schema", v)? != SCHEMA_VERSION => {
                return Err(cfg_err(format!("unsupported schema version {v}, expected {SCHEMA_VERSION}")))
            }
            Some(_) => {}
        }
        let file_kind = entries.get("kind").map(|s| s.parse::<ExperimentKind>()).transpose()?;
        let kind = match (kind, file_kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(cfg_err(format!("command kind `{a}` conflicts with configured kind `{b}`")))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(cfg_err("no experiment kind given")),
        };
        let mut c = Self::defaults(kind);
        for (k, v) in &entries {
            let v = v.as_str();
            match k.as_str() {
                "schema" | "kind" => {}
                "n" => c.n = parse_int(k, v)?,
                "L" => c.length = parse_number(k, v)?,
                "spectral_cutoff" => c.spectral_cutoff = Some(parse_int(k, v)?),
                "amplitude_override" => c.amplitude_override = parse_bool(k, v)?,
                "xi" => c.xi = parse_number(k, v)?,
                "zeta" => c.zeta = parse_number(k, v)?,
                "q" => c.q = parse_number(k, v)?,
                "eps" => c.eps = parse_list(k, v)?,
                "r" => c.radii = parse_list(k, v)?,
                "C" => c.cs = parse_list(k, v)?,
                "eps_fine" => c.eps_fine = Some(parse_number(k, v)?),
                "samples" => c.samples = parse_int(k, v)?,
                "seed" => c.seed = parse_int(k, v)?,
                "workers" => c.workers = parse_int(k, v)?,
                "out" => c.out = PathBuf::from(v),
                "pairs" => c.pairs = parse_int(k, v)?,
                "region_side" => c.region_side = parse_number(k, v)?,
                "ball_radius" => c.ball_radius = Some(parse_number(k, v)?),
                "a_coarse" => c.a_coarse = Some(parse_number(k, v)?),
                "a_fine" => c.a_fine = Some(parse_number(k, v)?),
                "sequence" => c.sequence = parse_list(k, v)?,
                "slack" => c.slack = parse_number(k, v)?,
                _ => unreachable!("key list checked above"),
            }
        }
        Ok(c)
    }

    pub fn from_file(path: &Path, kind: Option<ExperimentKind>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, kind)
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            spectral_cutoff: self.spectral_cutoff,
            amplitude_override: self.amplitude_override,
            ..SamplerConfig::new(self.n, self.length, self.seed)
        }
    }

    pub fn eps_fine(&self) -> f64 {
        self.eps_fine.unwrap_or(3.0 * self.length / self.n as f64)
    }

    /// Every setting that influences numeric output; `workers` and `out`
    /// are excluded.
    pub fn canonical(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        m.insert("schema", SCHEMA_VERSION.to_string());
        m.insert("kind", self.kind.to_string());
        m.insert("n", self.n.to_string());
        m.insert("L", self.length.to_string());
        m.insert("spectral_cutoff", self.spectral_cutoff.map(|c| c.to_string()).unwrap_or_default());
        m.insert("amplitude_override", self.amplitude_override.to_string());
        m.insert("xi", self.xi.to_string());
        m.insert("zeta", self.zeta.to_string());
        m.insert("q", self.q.to_string());
        m.insert("eps", list(&self.eps));
        m.insert("r", list(&self.radii));
        m.insert("C", list(&self.cs));
        m.insert("eps_fine", self.eps_fine().to_string());
        m.insert("samples", self.samples.to_string());
        m.insert("seed", self.seed.to_string());
        m.insert("pairs", self.pairs.to_string());
        m.insert("region_side", self.region_side.to_string());
        m.insert("ball_radius", opt(self.ball_radius));
        m.insert("a_coarse", opt(self.a_coarse));
        m.insert("a_fine", opt(self.a_fine));
        m.insert("sequence", list(&self.sequence));
        m.insert("slack", self.slack.to_string());
        m.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn sampling(&self) -> Sampling {
        Sampling::new(self.samples, self.seed).with_workers(self.workers).with_hash(self.config_hash())
    }

    fn need(&self, ok: bool, msg: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(cfg_err(format!("{}: {msg}", self.kind)))
        }
    }

    /// Checks every precondition that can be checked without sampling.
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        self.need(self.workers >= 1, "workers must be at least 1")?;
        if self.kind == SubaddDemo {
            return self.need(self.slack >= 0.0, "slack must be nonnegative");
        }
        self.sampler().validate()?;
        self.need(self.samples >= 1, "samples must be at least 1")?;
        self.need(self.xi > 0.0, "xi must be positive")?;
        let mesh = self.length / self.n as f64;
        let fine_ok = |e: f64| e >= 3.0 * mesh * (1.0 - 1e-12);
        self.need(self.eps.iter().all(|&e| fine_ok(e) && e < 1.0), "every eps must lie in [3 mesh, 1)")?;
        match self.kind {
            SampleField | SubaddDemo => {}
            EstimateA => self.need(!self.eps.is_empty(), "eps list is empty")?,
            EstimateQ => {
                let mut e = self.eps.clone();
                e.sort_by(f64::total_cmp);
                e.dedup();
                self.need(e.len() >= 3, "needs at least 3 distinct eps values")?;
            }
            EstimateCr => {
                self.need(!self.radii.is_empty(), "r list is empty")?;
                self.need(fine_ok(self.eps_fine()), "eps_fine below three lattice spacings")?;
                self.need(
                    self.radii.iter().all(|&r| self.eps_fine() <= r / 8.0 * (1.0 + 1e-12)),
                    "eps_fine must be at most r / 8 for every r",
                )?;
            }
            RatioScan | Events | Multiscale => {
                self.need(self.eps.len() == 1, "exactly one eps value is required")?;
                self.need(self.zeta > 0.0 && self.zeta < 1.0, "zeta must lie in (0, 1)")?;
                self.ladder()?;
                if self.kind != RatioScan {
                    self.need(!self.cs.is_empty(), "C list is empty")?;
                    self.need(self.cs.iter().all(|&c| c > 0.0), "every C must be positive")?;
                    self.need(self.q > 0.0, "q must be positive")?;
                }
            }
            Compare => {
                self.need(self.eps.len() == 2, "eps must list the coarse and the fine scale")?;
                self.need(self.zeta > 0.0 && self.zeta < 1.0, "zeta must lie in (0, 1)")?;
                self.need(self.pairs >= 1, "pairs must be at least 1")?;
            }
        }
        Ok(())
    }

    /// Ladder for the scale-dependent kinds: the `r` list if given,
    /// otherwise the clamped default ladder.
    pub fn ladder(&self) -> Result<ScaleLadder> {
        let eps = *self.eps.first().ok_or_else(|| cfg_err("eps list is empty"))?;
        let l = if self.radii.is_empty() {
            ScaleLadder::new(eps, self.zeta)
        } else {
            ScaleLadder::custom(eps, self.zeta, self.radii.clone())
        };
        l.map_err(|e| cfg_err(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub schema: u32,
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub tool_version: String,
    pub seed: u64,
    pub workers: usize,
    pub wall_clock_seconds: f64,
    pub stages: Vec<(String, f64)>,
    pub files: Vec<FileEntry>,
    /// Set when the run aborted; `files` then lists what was written.
    pub partial: bool,
    pub error: Option<String>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

fn file_entry(dir: &Path, name: &str) -> Result<FileEntry> {
    let bytes = std::fs::read(dir.join(name))?;
    Ok(FileEntry { path: name.to_string(), bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(&bytes)) })
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    stages: Vec<(String, f64)>,
}

impl Outputs {
    fn write(&mut self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        body(&mut buf)?;
        std::fs::write(self.dir.join(name), &buf)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn records(&mut self, records: &[EstimateRecord]) -> Result<()> {
        self.write("estimates.csv", |b| Ok(estimators::write_csv(records, b)?))?;
        self.write("estimates.jsonl", |b| Ok(estimators::write_json_lines(records, b)?))
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f();
        self.stages.push((name.to_string(), t.elapsed().as_secs_f64()));
        out
    }
}

/// Runs the experiment and writes its outputs and `manifest.json` into
/// `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    std::fs::create_dir_all(&config.out)?;
    let start = Instant::now();
    let mut outs = Outputs { dir: config.out.clone(), files: Vec::new(), stages: Vec::new() };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute(config, &mut outs)));
    let error = match result {
        Ok(Ok(())) => None,
        Ok(Err(e)) => Some(e),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "worker panicked".into());
            Some(LfppError::Algorithm(format!("worker panic: {msg}")))
        }
    };
    let files = outs.files.iter().map(|f| file_entry(&config.out, f)).collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        schema: SCHEMA_VERSION,
        kind: config.kind,
        config_hash: config.config_hash(),
        tool_version: TOOL_VERSION.to_string(),
        seed: config.seed,
        workers: config.workers,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        stages: outs.stages,
        files,
        partial: error.is_some(),
        error: error.as_ref().map(|e| e.to_string()),
    };
    let mut f = std::fs::File::create(config.out.join(MANIFEST_NAME))?;
    serde_json::to_writer_pretty(&mut f, &manifest).map_err(std::io::Error::from)?;
    writeln!(f)?;
    match error {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}

fn execute(c: &ExperimentConfig, outs: &mut Outputs) -> Result<()> {
    use ExperimentKind::*;
    let cfg = c.sampler();
    let s = c.sampling();
    let hash = s.config_hash.clone();
    match c.kind {
        SampleField => {
            let field = outs.stage("sample", || sample_field(&cfg))?;
            outs.write("field.lfppfld", |b| write_field(&field, b))
        }
        EstimateA => {
            let recs = outs.stage("estimate_a", || estimate_a(c.xi, &c.eps, &cfg, &s))?;
            outs.records(&recs)
        }
        EstimateQ => {
            let mut recs = outs.stage("estimate_a", || estimate_a(c.xi, &c.eps, &cfg, &s))?;
            let q = estimate_Q(&recs, c.xi)?;
            if let Ok(g) = gamma_from_Q(q.estimate) {
                // Interval endpoints below 2 have no gamma; clamp to the critical value.
                let lo = gamma_from_Q(q.hi90).unwrap_or(g);
                let hi = gamma_from_Q(q.lo90.max(2.0)).unwrap_or(g);
                recs.push(q.clone());
                recs.push(EstimateRecord::derived("gamma", Params::xi(c.xi), g, (lo, hi), q.n_samples, c.seed, &hash));
            } else {
                recs.push(q);
            }
            outs.records(&recs)
        }
        EstimateCr => {
            let recs = outs.stage("estimate_cr", || estimate_cr(c.xi, &c.radii, c.eps_fine(), &cfg, &s))?;
            outs.records(&recs)
        }
        RatioScan => {
            let ladder = c.ladder()?;
            let scan = outs.stage("ratio_scan", || ratio_scan(c.xi, &ladder, c.eps_fine(), &cfg, &s))?;
            let mut recs = vec![scan.a_eps.clone()];
            recs.extend(scan.a_rescaled.iter().cloned());
            recs.extend(scan.c_r.iter().cloned());
            recs.extend(scan.rho.iter().cloned());
            let base = Params::xi(c.xi).eps(ladder.eps).zeta(ladder.zeta);
            recs.push(EstimateRecord::derived("rho_spread", base, scan.spread, (scan.spread, scan.spread), c.samples, c.seed, &hash));
            outs.records(&recs)
        }
        Events | Multiscale => {
            let ladder = c.ladder()?;
            let eps = ladder.eps;
            let study = outs.stage("events", || {
                EventStudy::run(c.xi, eps, c.q, c.eps_fine().min(eps), &ladder.radii, &cfg, &s)
            })?;
            let plugs: Vec<_> = (0..ladder.radii.len()).map(|k| study.plug_in(k)).collect();
            let mut recs = Vec::new();
            for &cc in &c.cs {
                if c.kind == Events {
                    for (k, plug) in plugs.iter().enumerate() {
                        recs.push(study.probability(k, plug, cc)?);
                    }
                } else {
                    let ks: Vec<usize> = (0..plugs.len()).collect();
                    let mut r = study.multiscale(&ks, &plugs, cc)?;
                    r.params.zeta = Some(ladder.zeta);
                    recs.push(r);
                }
            }
            outs.records(&recs)
        }
        Compare => {
            let (coarse, fine) = (c.eps[0], c.eps[1]);
            let (a_coarse, a_fine) = match (c.a_coarse, c.a_fine) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    let a = outs.stage("estimate_a", || estimate_a(c.xi, &[coarse, fine], &cfg, &s))?;
                    (c.a_coarse.unwrap_or(a[0].estimate), c.a_fine.unwrap_or(a[1].estimate))
                }
            };
            let bc = BilipConfig {
                xi: c.xi,
                eps_coarse: coarse,
                eps_fine: fine,
                zeta: c.zeta,
                radius: c.ball_radius,
                region_center: [0.0, 0.0],
                region_side: c.region_side,
                pairs: c.pairs,
                a_coarse,
                a_fine,
            };
            let rep = outs.stage("compare", || bilip_compare(&bc, &cfg, &s))?;
            outs.records(std::slice::from_ref(&rep.record))?;
            outs.write("ratios.csv", |b| {
                writeln!(b, "pair,upper,lower")?;
                for (k, (u, l)) in rep.upper_ratios.iter().zip(&rep.lower_ratios).enumerate() {
                    writeln!(b, "{k},{u},{l}")?;
                }
                writeln!(b, "# skipped,{}", rep.pairs_skipped)?;
                Ok(())
            })
        }
        SubaddDemo => {
            let x = if c.sequence.is_empty() {
                (1..=20).map(|n| 3.0 * n as f64 + if n % 2 == 0 { 1.0 } else { -1.0 }).collect()
            } else {
                c.sequence.clone()
            };
            let cert = subadditive_rate(&x, c.slack)?;
            let rec = EstimateRecord::derived("alpha", Params::default().c(cert.minimal_c), cert.alpha, (cert.alpha, cert.alpha), x.len(), c.seed, &hash);
            outs.records(std::slice::from_ref(&rec))?;
            outs.write("certificate.json", |b| {
                serde_json::to_writer_pretty(&mut *b, &cert).map_err(std::io::Error::from)?;
                writeln!(b)?;
                Ok(())
            })
        }
    }
}

/// Process exit status for an error: 2 for configuration problems, 3 for
/// everything that fails at run time.
pub fn exit_code(e: &LfppError) -> i32 {
    match e {
        LfppError::Config(_) => 2,
        _ => 3,
    }
}

/// One-line JSON error report.
pub fn error_report(e: &LfppError) -> String {
    let kind = match e {
        LfppError::Config(_) => "config",
        LfppError::Geometry(_) => "geometry",
        LfppError::Resolution(_) => "resolution",
        LfppError::Argument(_) => "argument",
        LfppError::Domain(_) => "domain",
        LfppError::Format { .. } => "format",
        LfppError::Algorithm(_) => "algorithm",
        LfppError::Io(_) => "io",
    };
    serde_json::json!({ "status": "error", "code": exit_code(e), "kind": kind, "message": e.to_string() })
        .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_unknown_and_repeated_keys() {
        let ok = "schema = 1\nkind = estimate-a\neps = 1/4, 1/8 # two scales\nn = 256\n";
        let c = ExperimentConfig::parse(ok, None).unwrap();
        assert_eq!(c.eps, vec![0.25, 0.125]);
        assert_eq!(c.n, 256);
        assert!(ExperimentConfig::parse("schema = 1\nkind = events\nbogus = 3\n", None).is_err());
        assert!(ExperimentConfig::parse("schema = 1\nn = 2\nn = 4\n", Some(ExperimentKind::EstimateA)).is_err());
        assert!(ExperimentConfig::parse("kind = estimate-a\n", None).is_err());
        assert!(ExperimentConfig::parse("schema = 2\nkind = estimate-a\n", None).is_err());
        assert!(ExperimentConfig::parse(ok, Some(ExperimentKind::Events)).is_err());
    }

    #[test]
    fn hash_ignores_workers_and_output() {
        let mut a = ExperimentConfig::defaults(ExperimentKind::EstimateA);
        a.eps = vec![0.25];
        let mut b = a.clone();
        b.workers = 8;
        b.out = PathBuf::from("elsewhere");
        assert_eq!(a.config_hash(), b.config_hash());
        b.seed = 1;
        assert_ne!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn validation_is_up_front() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::EstimateQ);
        c.eps = vec![0.25, 0.125];
        assert!(matches!(c.validate(), Err(LfppError::Config(_))));
        c.eps = vec![0.25, 0.125, 0.001];
        assert!(matches!(c.validate(), Err(LfppError::Config(_))));
        c.eps = vec![0.25, 0.125, 0.0625];
        assert!(c.validate().is_ok());
    }
}
