//! Batch driver behind the `nuframe` binary.
//!
//! Every command returns an [`Outcome`] holding the report text and the exit
//! code, so the binary only parses arguments and writes output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::estimators::{self, BoundReport, EstimateError, Theorem};
use crate::lattice::{lambda_range, omega_set, validate_params, ParamError, SpectralPairParams};
use crate::oracle::{self, OracleError};
use crate::profile::{self, StepProfile};
use crate::rational::{self, int};

/// Tolerance for the sandwich and identity checks.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    CheckFailure = 1,
    Config = 2,
    NotCertified = 3,
    Truncation = 4,
    Internal = 5,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessError {
    pub exit: Exit,
    pub message: String,
}

impl HarnessError {
    fn new(exit: Exit, message: impl Into<String>) -> Self {
        HarnessError { exit, message: message.into() }
    }

    fn config(message: impl Into<String>) -> Self {
        Self::new(Exit::Config, message)
    }
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ParamError> for HarnessError {
    fn from(e: ParamError) -> Self {
        HarnessError::config(format!("invalid parameters: {e}"))
    }
}

impl From<EstimateError> for HarnessError {
    fn from(e: EstimateError) -> Self {
        HarnessError::new(Exit::Truncation, e.to_string())
    }
}

impl From<OracleError> for HarnessError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::NotAnnular(_) => HarnessError::new(Exit::Truncation, e.to_string()),
            _ => HarnessError::new(Exit::Internal, e.to_string()),
        }
    }
}

/// Report text plus exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit: Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format, HarnessError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(HarnessError::config(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletSource {
    Catalog(String),
    Literal(PathBuf),
}

impl WaveletSource {
    /// A catalog name if one matches, otherwise a path to a profile literal.
    pub fn parse(s: &str) -> WaveletSource {
        match catalog::lookup(s) {
            Some(e) => WaveletSource::Catalog(e.name.to_string()),
            None => WaveletSource::Literal(PathBuf::from(s)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WaveletSource::Catalog(n) => n.clone(),
            WaveletSource::Literal(p) => p.display().to_string(),
        }
    }

    pub fn load(&self, params: &SpectralPairParams) -> Result<StepProfile, HarnessError> {
        match self {
            WaveletSource::Catalog(name) => catalog::lookup(name)
                .map(|e| e.build(params))
                .ok_or_else(|| HarnessError::config(format!("unknown catalog wavelet {name:?}"))),
            WaveletSource::Literal(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    HarnessError::config(format!("wavelet {:?} is neither a catalog name nor a readable file: {e}", path))
                })?;
                profile::parse_literal(&text).map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConfig {
    pub enabled: bool,
    pub seed: u64,
    pub num_test_functions: usize,
    pub piece_count: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { enabled: true, seed: 0, num_test_functions: 20, piece_count: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub params: SpectralPairParams,
    pub wavelet: WaveletSource,
    pub theorems: Vec<Theorem>,
    pub oracle: OracleConfig,
    pub output: OutputConfig,
}

/// The TOML config file; every key is optional and command-line flags win.
///
/// ```toml
/// theorems = ["t24", "baseline"]
///
/// [params]
/// n = 2
/// r = 3
///
/// [wavelet]
/// name = "rough_meyer"     # or: path = "psi.json"
///
/// [oracle]
/// seed = 0
/// num_test_functions = 20
/// piece_count = 6
///
/// [output]
/// format = "json"
/// path = "report.json"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub theorems: Option<Vec<String>>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub wavelet: WaveletSection,
    #[serde(default)]
    pub oracle: OracleSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub n: Option<i64>,
    pub r: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSection {
    pub name: Option<String>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub enabled: Option<bool>,
    pub seed: Option<u64>,
    pub num_test_functions: Option<usize>,
    pub piece_count: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<String>,
    pub path: Option<PathBuf>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<ConfigFile, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| HarnessError::config(format!("config {}: {e}", path.display())))
    }
}

/// Command-line values that override the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<i64>,
    pub r: Option<i64>,
    pub wavelet: Option<String>,
    pub theorems: Option<String>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub pieces: Option<usize>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

pub fn parse_theorems(list: &[String]) -> Result<Vec<Theorem>, HarnessError> {
    let mut out = Vec::new();
    for s in list.iter().filter(|s| !s.trim().is_empty()) {
        let t = Theorem::parse(s)
            .ok_or_else(|| HarnessError::config(format!("unknown theorem {s:?} (expected t23, t24, t26, baseline)")))?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

pub fn resolve_params(n: Option<i64>, r: Option<i64>) -> Result<SpectralPairParams, HarnessError> {
    let n = n.ok_or_else(|| HarnessError::config("N is required (-N or [params] n)"))?;
    let r = r.unwrap_or(1);
    Ok(validate_params(n, r)?)
}

impl ExperimentConfig {
    pub fn build(file: ConfigFile, o: Overrides) -> Result<ExperimentConfig, HarnessError> {
        let params = resolve_params(o.n.or(file.params.n), o.r.or(file.params.r))?;
        let wavelet = match (o.wavelet, file.wavelet.name, file.wavelet.path) {
            (Some(w), _, _) => WaveletSource::parse(&w),
            (None, Some(_), Some(_)) => {
                return Err(HarnessError::config("[wavelet] takes either name or path, not both"))
            }
            (None, Some(name), None) => WaveletSource::Catalog(name),
            (None, None, Some(path)) => WaveletSource::Literal(path),
            (None, None, None) => return Err(HarnessError::config("a wavelet is required (--wavelet)")),
        };
        let theorems = match (o.theorems, file.theorems) {
            (Some(list), _) => parse_theorems(&list.split(',').map(String::from).collect::<Vec<_>>())?,
            (None, Some(list)) => parse_theorems(&list)?,
            (None, None) => Theorem::ALL.to_vec(),
        };
        let d = OracleConfig::default();
        let oracle = OracleConfig {
            enabled: file.oracle.enabled.unwrap_or(d.enabled),
            seed: o.seed.or(file.oracle.seed).unwrap_or(d.seed),
            num_test_functions: o.count.or(file.oracle.num_test_functions).unwrap_or(d.num_test_functions),
            piece_count: o.pieces.or(file.oracle.piece_count).unwrap_or(d.piece_count),
        };
        let format = match o.format.or(file.output.format) {
            Some(f) => Format::parse(&f)?,
            None => Format::Csv,
        };
        Ok(ExperimentConfig {
            params,
            wavelet,
            theorems,
            oracle,
            output: OutputConfig { format, path: o.out.or(file.output.path) },
        })
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn json_text<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub n: i64,
    pub r: i64,
}

impl From<&SpectralPairParams> for ParamsRecord {
    fn from(p: &SpectralPairParams) -> Self {
        ParamsRecord { n: p.n(), r: p.r() }
    }
}

/// The JSON document written by `bounds` and read back by `verify --bounds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsDocument {
    pub params: ParamsRecord,
    pub wavelet: String,
    pub reports: Vec<BoundReport>,
}

impl BoundsDocument {
    pub fn read(path: &Path) -> Result<BoundsDocument, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::config(format!("cannot read bounds file {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::config(format!("bounds file {}: {e}", path.display())))
    }
}

pub fn validate(n: i64, r: i64) -> Result<Outcome, HarnessError> {
    let p = validate_params(n, r)?;
    let a = p.dilation();
    let lam = lambda_range(&p, &int(0), &int(a)).expect("[0, 2N) is nonempty");
    let lam: Vec<String> = lam.iter().map(|l| rational::format(&l.value)).collect();
    let omega: Vec<String> = omega_set(&p, 1).iter().map(|m| m.to_string()).collect();
    let mut text = String::new();
    writeln!(text, "N = {n}, r = {r}, dilation 2N = {a}").unwrap();
    writeln!(text, "Lambda in [0, {a}): {{{}}}", lam.join(", ")).unwrap();
    writeln!(text, "Omega, k <= 1: {{{}}}", omega.join(", ")).unwrap();
    Ok(Outcome { text, exit: Exit::Success })
}

fn compute_bounds(psi: &StepProfile, params: &SpectralPairParams, theorems: &[Theorem]) -> Result<Vec<BoundReport>, HarnessError> {
    theorems
        .iter()
        .map(|&t| {
            info!("computing {} bounds", t.name());
            estimators::bounds_for(psi, params, t).map_err(HarnessError::from)
        })
        .collect()
}

fn bounds_rows(reports: &[BoundReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            let t = &r.truncation;
            let opt = |v: Option<String>| v.unwrap_or_default();
            vec![
                r.theorem.name().to_string(),
                fmt_f64(r.lower),
                fmt_f64(r.upper),
                r.lower_positive.to_string(),
                fmt_f64(r.cross_term_total),
                t.alpha_count.to_string(),
                r.partition_cells.to_string(),
                opt(t.k_max.map(|k| k.to_string())),
                opt(t.j_window.map(|w| w.0.to_string())),
                opt(t.j_window.map(|w| w.1.to_string())),
                opt(t.offset_bound.map(|b| b.to_string())),
                opt(r.literal_upper.map(fmt_f64)),
            ]
        })
        .collect()
}

const BOUNDS_HEADER: [&str; 12] = [
    "theorem",
    "lower",
    "upper",
    "lower_positive",
    "cross_term_total",
    "alpha_count",
    "partition_cells",
    "k_max",
    "j_lo",
    "j_hi",
    "offset_bound",
    "literal_upper",
];

pub fn bounds(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    if cfg.theorems.is_empty() {
        return Err(HarnessError::config("select at least one theorem"));
    }
    let psi = cfg.wavelet.load(&cfg.params)?;
    let reports = compute_bounds(&psi, &cfg.params, &cfg.theorems)?;
    let exit = if reports.iter().all(|r| r.lower_positive) { Exit::Success } else { Exit::NotCertified };
    let text = match cfg.output.format {
        Format::Csv => csv_text(&BOUNDS_HEADER, &bounds_rows(&reports)),
        Format::Json => json_text(&BoundsDocument {
            params: (&cfg.params).into(),
            wavelet: cfg.wavelet.label(),
            reports,
        }),
    };
    Ok(Outcome { text, exit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichResult {
    pub theorem: Theorem,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub seed: u64,
    pub ratio: f64,
    pub identity_abs_error: f64,
    pub identity_pass: bool,
    pub sandwich: Vec<SandwichResult>,
}

impl VerifyRow {
    pub fn pass(&self) -> bool {
        self.identity_pass && self.sandwich.iter().all(|s| s.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyDocument {
    pub params: ParamsRecord,
    pub wavelet: String,
    pub piece_count: usize,
    pub bounds: Vec<BoundReport>,
    pub rows: Vec<VerifyRow>,
}

/// Runs the oracle on seeds `seed, seed + 1, …` against the given bounds.
pub fn verify_rows(
    psi: &StepProfile,
    params: &SpectralPairParams,
    bounds: &[BoundReport],
    oracle: &OracleConfig,
) -> Result<Vec<VerifyRow>, HarnessError> {
    let ann = match profile::support(psi) {
        profile::Support::Annular(a) => a,
        profile::Support::Empty => {
            return Err(HarnessError::new(Exit::Truncation, "wavelet is zero, no support to draw test functions from"))
        }
        profile::Support::TouchesZero => return Err(EstimateError::NoAnnulus.into()),
    };
    let seeds: Vec<u64> = (0..oracle.num_test_functions as u64).map(|i| oracle.seed + i).collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let f = oracle::random_test_function(seed, params, oracle.piece_count, &ann);
            let id = oracle::identity_check(&f, psi, params)?;
            let ratio = id.lhs / f.norm_sqr();
            let sandwich = bounds
                .iter()
                .map(|b| SandwichResult {
                    theorem: b.theorem,
                    pass: b.lower - TOLERANCE <= ratio && ratio <= b.upper + TOLERANCE,
                })
                .collect();
            debug!("seed {seed}: ratio {ratio}, identity error {}", id.abs_error);
            Ok(VerifyRow {
                seed,
                ratio,
                identity_abs_error: id.abs_error,
                identity_pass: id.abs_error <= TOLERANCE * id.lhs.max(1.0),
                sandwich,
            })
        })
        .collect()
}

pub fn verify(cfg: &ExperimentConfig, bounds_file: Option<&Path>) -> Result<Outcome, HarnessError> {
    if !cfg.oracle.enabled {
        return Err(HarnessError::config("verify needs the oracle enabled"));
    }
    if cfg.oracle.num_test_functions == 0 {
        return Err(HarnessError::config("num_test_functions must be at least 1"));
    }
    if cfg.oracle.piece_count == 0 {
        return Err(HarnessError::config("piece_count must be at least 1"));
    }
    let psi = cfg.wavelet.load(&cfg.params)?;
    let bounds = match bounds_file {
        Some(path) => {
            let doc = BoundsDocument::read(path)?;
            if doc.params != ParamsRecord::from(&cfg.params) {
                return Err(HarnessError::config(format!(
                    "bounds file is for N = {}, r = {}",
                    doc.params.n, doc.params.r
                )));
            }
            doc.reports.into_iter().filter(|r| cfg.theorems.contains(&r.theorem)).collect()
        }
        None => compute_bounds(&psi, &cfg.params, &cfg.theorems)?,
    };
    info!("verifying {} test functions", cfg.oracle.num_test_functions);
    let rows = verify_rows(&psi, &cfg.params, &bounds, &cfg.oracle)?;
    let exit = if rows.iter().all(VerifyRow::pass) { Exit::Success } else { Exit::CheckFailure };
    let text = match cfg.output.format {
        Format::Csv => {
            let mut header = vec!["seed", "ratio", "identity_abs_error", "identity"];
            header.extend(bounds.iter().map(|b| b.theorem.name()));
            let verdict = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v = vec![
                        r.seed.to_string(),
                        fmt_f64(r.ratio),
                        fmt_f64(r.identity_abs_error),
                        verdict(r.identity_pass),
                    ];
                    v.extend(r.sandwich.iter().map(|s| verdict(s.pass)));
                    v
                })
                .collect();
            csv_text(&header, &rows)
        }
        Format::Json => json_text(&VerifyDocument {
            params: (&cfg.params).into(),
            wavelet: cfg.wavelet.label(),
            piece_count: cfg.oracle.piece_count,
            bounds,
            rows,
        }),
    };
    Ok(Outcome { text, exit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareDocument {
    pub params: ParamsRecord,
    pub wavelet: String,
    pub reports: Vec<BoundReport>,
    /// Baseline lower ≤ T24 lower.
    pub lower_ordered: bool,
    /// T24 upper ≤ baseline upper.
    pub upper_ordered: bool,
}

pub fn compare(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    let psi = cfg.wavelet.load(&cfg.params)?;
    let reports = compute_bounds(&psi, &cfg.params, &Theorem::ALL)?;
    let get = |t: Theorem| reports.iter().find(|r| r.theorem == t).expect("all theorems computed");
    let (t24, base) = (get(Theorem::T24), get(Theorem::Baseline));
    let lower_ordered = base.lower <= t24.lower;
    let upper_ordered = t24.upper <= base.upper;
    let exit = if lower_ordered && upper_ordered { Exit::Success } else { Exit::CheckFailure };
    let text = match cfg.output.format {
        Format::Csv => {
            let mut t = csv_text(&BOUNDS_HEADER, &bounds_rows(&reports));
            writeln!(t, "# baseline lower <= T24 lower: {lower_ordered}").unwrap();
            writeln!(t, "# T24 upper <= baseline upper: {upper_ordered}").unwrap();
            t
        }
        Format::Json => json_text(&CompareDocument {
            params: (&cfg.params).into(),
            wavelet: cfg.wavelet.label(),
            reports,
            lower_ordered,
            upper_ordered,
        }),
    };
    Ok(Outcome { text, exit })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub summary: String,
    pub xi_min: String,
    pub xi_max: String,
    pub calderon_min: f64,
    pub calderon_max: f64,
}

/// Catalog entries with their support and Calderón range at the given parameters.
pub fn catalog_listing(params: &SpectralPairParams, format: Format) -> Result<Outcome, HarnessError> {
    let mut rows = Vec::new();
    for e in catalog::entries() {
        let psi = e.build(params);
        let ann = profile::annulus(&psi)
            .map_err(|err| HarnessError::new(Exit::Internal, err.to_string()))?
            .ok_or_else(|| HarnessError::new(Exit::Internal, format!("{} has no support", e.name)))?;
        let cal = profile::calderon_sum(&psi, params).map_err(|err| HarnessError::new(Exit::Internal, err.to_string()))?;
        let (lo, hi) = cal
            .extrema_on(&profile::fundamental_domain(params), |v| v.to_complex().re)
            .map_err(|err| HarnessError::new(Exit::Internal, err.to_string()))?;
        rows.push(CatalogRow {
            name: e.name.into(),
            summary: e.summary.into(),
            xi_min: rational::format(&ann.xi_min),
            xi_max: rational::format(&ann.xi_max),
            calderon_min: lo,
            calderon_max: hi,
        });
    }
    let text = match format {
        Format::Csv => csv_text(
            &["name", "xi_min", "xi_max", "calderon_min", "calderon_max", "summary"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        r.xi_min.clone(),
                        r.xi_max.clone(),
                        fmt_f64(r.calderon_min),
                        fmt_f64(r.calderon_max),
                        r.summary.clone(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => json_text(&rows),
    };
    Ok(Outcome { text, exit: Exit::Success })
}
