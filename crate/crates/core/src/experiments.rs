//! Manifest-driven Monte Carlo studies.
//!
//! Every run is a pure function of its manifest: replicate `r` draws from
//! stream `(seed, r)` and results are aggregated in replicate order, so
//! re-runs produce byte-identical output.
//!
//! Manifests are `key = value` files:
//!
//! ```text
//! name = clt
//! experiment = histogram
//! model = cw,p=4,n=2000
//! beta = 0.75
//! replicates = 5000
//! seed = 1
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::io::parse_key_values;
use crate::landscape::{
    asymptotic_variance, beta_star_cw, beta_star_er, beta_star_hsbm, beta_star_partite, sup_phi_hsbm, threshold_limit_cdf_p2,
    threshold_point,
};
use crate::models::{BlockTensor, Family, ModelSpec};
use crate::mple::{cw_confidence_interval, mple, phi_p};
use crate::oracle::averaged_hsbm_log_partition;
use crate::rng::{stream_rng, Purpose};
use crate::sampler::{sample, CwLevelSampler, Route, Schedule, DEFAULT_BURN_IN, DEFAULT_THIN};
use crate::stats::{ecdf_sup_distance, ks_normal, mean, quantile, variance, KsResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Histogram,
    ConsistencySweep,
    ThresholdMixture,
    PhaseScan,
    Coverage,
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "histogram" => ExperimentKind::Histogram,
            "consistency" | "consistency-sweep" => ExperimentKind::ConsistencySweep,
            "threshold-mixture" | "threshold" => ExperimentKind::ThresholdMixture,
            "phase-scan" => ExperimentKind::PhaseScan,
            "coverage" => ExperimentKind::Coverage,
            other => return Err(Error::InvalidArgument(format!("unknown experiment '{other}'"))),
        })
    }
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Histogram => "histogram",
            ExperimentKind::ConsistencySweep => "consistency",
            ExperimentKind::ThresholdMixture => "threshold-mixture",
            ExperimentKind::PhaseScan => "phase-scan",
            ExperimentKind::Coverage => "coverage",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSpec {
    Value(f64),
    /// The estimability threshold of the model family.
    Threshold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentManifest {
    pub name: String,
    pub experiment: ExperimentKind,
    pub model: ModelSpec,
    pub beta: BetaSpec,
    /// Inverse temperatures for phase scans.
    pub beta_grid: Vec<f64>,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub level: f64,
    /// Half-width of the zero neighbourhood for threshold splits; defaults to `m*/2`.
    pub zero_radius: Option<f64>,
    pub burn_in: usize,
    pub thin: usize,
    /// SHA-256 of the manifest text.
    pub hash: String,
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Error::InvalidArgument(format!("bad entry '{s}' for {key}"))))
        .collect()
}

fn scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| Error::InvalidArgument(format!("bad value '{v}' for {key}")))
}

impl ExperimentManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let kv = parse_key_values(text)?;
        let get = |k: &str| kv.iter().find(|(q, _)| q == k).map(|(_, v)| v.as_str());
        const KEYS: [&str; 13] = [
            "name", "experiment", "model", "beta", "beta_grid", "n_values", "replicates", "seed", "output_dir", "level",
            "zero_radius", "burn_in", "thin",
        ];
        if let Some((k, _)) = kv.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidArgument(format!("unknown manifest key '{k}'")));
        }
        let experiment: ExperimentKind = get("experiment").ok_or_else(|| Error::InvalidArgument("manifest needs experiment".into()))?.parse()?;
        let model: ModelSpec = get("model").ok_or_else(|| Error::InvalidArgument("manifest needs model".into()))?.parse()?;
        let beta = match get("beta") {
            None => BetaSpec::Value(0.0),
            Some("threshold") => BetaSpec::Threshold,
            Some(v) => BetaSpec::Value(scalar("beta", v)?),
        };
        if let BetaSpec::Value(b) = beta {
            if !(b >= 0.0) || !b.is_finite() {
                return Err(Error::InvalidArgument(format!("beta = {b} must be finite and nonnegative")));
            }
        }
        let replicates = get("replicates").map(|v| scalar("replicates", v)).transpose()?.unwrap_or(1);
        if replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be at least 1".into()));
        }
        let n_values = get("n_values").map(|v| list("n_values", v)).transpose()?.unwrap_or_else(|| vec![model.n]);
        if n_values.is_empty() {
            return Err(Error::InvalidArgument("n_values is empty".into()));
        }
        let level = get("level").map(|v| scalar("level", v)).transpose()?.unwrap_or(0.95);
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidArgument(format!("level {level} outside (0, 1)")));
        }
        let thin = get("thin").map(|v| scalar("thin", v)).transpose()?.unwrap_or(DEFAULT_THIN);
        if thin == 0 {
            return Err(Error::InvalidArgument("thin must be at least 1".into()));
        }
        Ok(Self {
            name: get("name").unwrap_or(experiment.as_str()).to_string(),
            experiment,
            model,
            beta,
            beta_grid: get("beta_grid").map(|v| list("beta_grid", v)).transpose()?.unwrap_or_default(),
            n_values,
            replicates,
            seed: get("seed").map(|v| scalar("seed", v)).transpose()?.unwrap_or(0),
            output_dir: PathBuf::from(get("output_dir").unwrap_or(".")),
            level,
            zero_radius: get("zero_radius").map(|v| scalar("zero_radius", v)).transpose()?,
            burn_in: get("burn_in").map(|v| scalar("burn_in", v)).transpose()?.unwrap_or(DEFAULT_BURN_IN),
            thin,
            hash: hex(&Sha256::digest(text.as_bytes())),
        })
    }

    fn schedule(&self) -> Schedule {
        Schedule { burn_in: self.burn_in, thin: self.thin, route: Route::Auto }
    }

    fn model_at(&self, n: usize) -> ModelSpec {
        let mut m = self.model.clone();
        m.n = n;
        m
    }

    pub fn resolved_beta(&self) -> Result<f64> {
        match self.beta {
            BetaSpec::Value(b) => Ok(b),
            BetaSpec::Threshold => family_threshold(&self.model),
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Estimability threshold for the families that have a closed variational form.
pub fn family_threshold(model: &ModelSpec) -> Result<f64> {
    match model.family {
        Family::CurieWeiss => beta_star_cw(model.p),
        Family::ErdosRenyi => beta_star_er(model.p, model.theta),
        Family::Hsbm => Ok(beta_star_hsbm(&model.lambda, model.block_theta.as_ref().unwrap())?.beta_star),
        Family::PPartite => {
            let sizes = model.partite_sizes()?;
            let lambda: Vec<f64> = sizes.iter().map(|&s| s as f64 / model.n as f64).collect();
            // the product functional counts each edge once; the tensor has p! orderings
            Ok(beta_star_partite(&lambda, model.theta)? / factorial(model.p))
        }
        _ => Err(Error::InvalidArgument(format!("no threshold available for family {}", model.family))),
    }
}

/// Draws one estimate per replicate at size `n`: `(mean spin, beta_hat)`.
fn draw_estimates(m: &ExperimentManifest, n: usize, beta: f64) -> Result<Vec<(f64, f64)>> {
    let spec = m.model_at(n);
    if spec.family == Family::CurieWeiss {
        let sampler = CwLevelSampler::new(spec.p, n, beta)?;
        let p = spec.p;
        return (0..m.replicates)
            .into_par_iter()
            .map(|r| {
                let mut rng = stream_rng(m.seed, Purpose::Replicate, r as u64);
                let k = sampler.draw_level(&mut rng);
                let xbar = (2 * k) as f64 / n as f64 - 1.0;
                Ok((xbar, phi_p(xbar, p)?))
            })
            .collect();
    }
    let (tensor, _) = spec.build()?;
    let schedule = m.schedule();
    (0..m.replicates)
        .into_par_iter()
        .map(|r| {
            let x = sample(&tensor, beta, 1, schedule, m.seed, r as u64)?.pop().expect("one sample");
            Ok((x.mean(), mple(&tensor, &x)?.beta_hat))
        })
        .collect()
}

fn scaled(n: usize, beta_hat: f64, beta: f64) -> f64 {
    (n as f64).sqrt() * (beta_hat - beta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub xbar: f64,
    pub beta_hat: f64,
    /// `sqrt(N) (beta_hat - beta)`, `inf` for divergent estimates.
    pub scaled: f64,
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSummary {
    pub alpha: Option<f64>,
    pub zero_radius: Option<f64>,
    pub divergent_fraction: f64,
    pub conditional_count: usize,
    pub conditional_variance: f64,
    pub conditional_ks: Option<KsResult>,
    /// Sup distance to the `p = 2` limit law.
    pub limit_cdf_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    pub n: usize,
    pub p: usize,
    pub beta: f64,
    pub rows: Vec<ReplicateRow>,
    pub infinite_count: usize,
    /// Moments over finite estimates only.
    pub mean: f64,
    pub variance: f64,
    pub target_variance: Option<f64>,
    pub ks: Option<KsResult>,
    pub threshold: Option<ThresholdSummary>,
}

impl HistogramReport {
    pub fn finite_scaled(&self) -> Vec<f64> {
        self.rows.iter().filter(|r| r.scaled.is_finite()).map(|r| r.scaled).collect()
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("replicate,xbar,beta_hat,scaled,divergent\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.replicate, r.xbar, r.beta_hat, r.scaled, r.divergent as u8);
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}\np = {}\nbeta = {}\nreplicates = {}", self.n, self.p, self.beta, self.rows.len());
        let _ = writeln!(s, "infinite = {}\nmean = {}\nvariance = {}", self.infinite_count, self.mean, self.variance);
        let _ = writeln!(s, "target_variance = {}", opt(self.target_variance));
        if let Some(ks) = &self.ks {
            let _ = writeln!(s, "ks_statistic = {}\nks_p_value = {}", ks.statistic, ks.p_value);
        }
        if let Some(t) = &self.threshold {
            let _ = writeln!(s, "alpha = {}\nzero_radius = {}", opt(t.alpha), opt(t.zero_radius));
            let _ = writeln!(s, "divergent_fraction = {}\nconditional_count = {}", t.divergent_fraction, t.conditional_count);
            let _ = writeln!(s, "conditional_variance = {}", t.conditional_variance);
            if let Some(ks) = &t.conditional_ks {
                let _ = writeln!(s, "conditional_ks_statistic = {}\nconditional_ks_p_value = {}", ks.statistic, ks.p_value);
            }
            if let Some(d) = t.limit_cdf_distance {
                let _ = writeln!(s, "limit_cdf_sup_distance = {d}");
            }
        }
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| x.to_string())
}

/// Fluctuation histogram of `sqrt(N)(beta_hat - beta)` at the first entry of
/// `n_values`. Threshold manifests split off the divergent branch.
pub fn run_histogram(m: &ExperimentManifest) -> Result<HistogramReport> {
    let n = m.n_values[0];
    let beta = m.resolved_beta()?;
    let p = m.model.p;
    let is_cw = m.model.family == Family::CurieWeiss;
    let at_threshold = m.experiment == ExperimentKind::ThresholdMixture || m.beta == BetaSpec::Threshold;
    let bstar = if is_cw { Some(beta_star_cw(p)?) } else { None };
    let target_variance = match (is_cw, at_threshold) {
        (true, false) => {
            if beta <= bstar.unwrap() {
                return Err(Error::InvalidArgument(format!(
                    "beta = {beta} is not above the threshold {}; no Gaussian target",
                    bstar.unwrap()
                )));
            }
            Some(asymptotic_variance(beta, p)?)
        }
        (true, true) if p >= 3 => Some(threshold_point(p)?.variance),
        _ => None,
    };
    let radius = match (m.zero_radius, at_threshold && is_cw && p >= 3) {
        (Some(r), _) => Some(r),
        (None, true) => Some(threshold_point(p)?.m_star / 2.0),
        _ => None,
    };
    let draws = draw_estimates(m, n, beta)?;
    let rows: Vec<ReplicateRow> = draws
        .iter()
        .enumerate()
        .map(|(r, &(xbar, bh))| {
            let divergent = bh.is_infinite() || radius.is_some_and(|rad| xbar.abs() < rad);
            ReplicateRow { replicate: r, xbar, beta_hat: bh, scaled: scaled(n, bh, beta), divergent }
        })
        .collect();
    let finite: Vec<f64> = rows.iter().filter(|r| r.scaled.is_finite()).map(|r| r.scaled).collect();
    let infinite_count = rows.len() - finite.len();
    let threshold = if at_threshold {
        let cond: Vec<f64> = rows.iter().filter(|r| !r.divergent).map(|r| r.scaled).collect();
        Some(ThresholdSummary {
            alpha: if is_cw && p >= 3 { Some(threshold_point(p)?.alpha) } else { None },
            zero_radius: radius,
            divergent_fraction: rows.iter().filter(|r| r.divergent).count() as f64 / rows.len() as f64,
            conditional_count: cond.len(),
            conditional_variance: variance(&cond),
            conditional_ks: target_variance.filter(|_| !cond.is_empty()).map(|v| ks_normal(&cond, v)),
            limit_cdf_distance: (is_cw && p == 2)
                .then(|| ecdf_sup_distance(&rows.iter().map(|r| r.scaled).collect::<Vec<_>>(), threshold_limit_cdf_p2)),
        })
    } else {
        None
    };
    let ks = if at_threshold { None } else { target_variance.map(|v| ks_normal(&finite, v)) };
    Ok(HistogramReport {
        n,
        p,
        beta,
        mean: mean(&finite),
        variance: variance(&finite),
        rows,
        infinite_count,
        target_variance,
        ks,
        threshold,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyRow {
    pub n: usize,
    pub infinite_count: usize,
    pub q50: f64,
    pub q90: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub beta: f64,
    pub rows: Vec<ConsistencyRow>,
    /// `None` when the sweep does not apply (`beta = 0`).
    pub bounded: Option<bool>,
}

impl ConsistencyReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("n,infinite,q50,q90\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{},{}", r.n, r.infinite_count, r.q50, r.q90);
        }
        s
    }

    pub fn summary(&self) -> String {
        let verdict = match self.bounded {
            None => "not-applicable",
            Some(true) => "bounded",
            Some(false) => "growing",
        };
        format!("beta = {}\nsizes = {}\nverdict = {verdict}\n", self.beta, self.rows.len())
    }
}

/// Quantiles of `sqrt(N) |beta_hat - beta|` across `n_values`; bounded when
/// the 90th percentile at the largest size is within 1.5x of the smallest.
pub fn run_consistency_sweep(m: &ExperimentManifest) -> Result<ConsistencyReport> {
    let beta = m.resolved_beta()?;
    let mut rows = Vec::new();
    for &n in &m.n_values {
        let errs: Vec<f64> = draw_estimates(m, n, beta)?.iter().map(|&(_, bh)| scaled(n, bh, beta).abs()).collect();
        rows.push(ConsistencyRow {
            n,
            infinite_count: errs.iter().filter(|e| e.is_infinite()).count(),
            q50: quantile(&errs, 0.5),
            q90: quantile(&errs, 0.9),
        });
    }
    let bounded = if beta == 0.0 {
        None
    } else {
        let first = rows.iter().min_by_key(|r| r.n).unwrap().q90;
        let last = rows.iter().max_by_key(|r| r.n).unwrap().q90;
        Some(last <= 1.5 * first)
    };
    Ok(ConsistencyReport { beta, rows, bounded })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRow {
    pub beta: f64,
    pub n: usize,
    pub log_partition: f64,
    pub offdiagonal_log_partition: f64,
    pub diagonal_correction: f64,
    pub meanfield_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScanReport {
    pub rows: Vec<PhaseRow>,
    pub beta_star: f64,
    /// Per grid point: growth rate of the log-partition per unit `N` and
    /// whether it departs from 0.
    pub growth: Vec<(f64, f64, bool)>,
    /// Midpoint between the last flat and first growing grid point.
    pub transition: Option<f64>,
}

impl PhaseScanReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("beta,n,log_partition,offdiagonal_log_partition,diagonal_correction,meanfield_bound\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.beta, r.n, r.log_partition, r.offdiagonal_log_partition, r.diagonal_correction, r.meanfield_bound
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!("beta_star = {}\ntransition = {}\n", self.beta_star, opt(self.transition));
        for (b, slope, grows) in &self.growth {
            let _ = writeln!(s, "beta {b}: slope = {slope}, grows = {grows}");
        }
        s
    }
}

/// Block-model form `(lambda, Theta)` of a family.
pub fn block_form(model: &ModelSpec) -> Result<(Vec<f64>, BlockTensor)> {
    match model.family {
        Family::CurieWeiss => Ok((vec![1.0], BlockTensor::constant(1, model.p, 1.0)?)),
        Family::ErdosRenyi => Ok((vec![1.0], BlockTensor::constant(1, model.p, model.theta)?)),
        Family::Hsbm => Ok((model.lambda.clone(), model.block_theta.clone().unwrap())),
        _ => Err(Error::InvalidArgument(format!("phase scans need a block model, got {}", model.family))),
    }
}

/// Slope per unit `N` above which the log-partition counts as growing.
pub const GROWTH_SLOPE: f64 = 1e-3;

pub fn run_phase_scan(m: &ExperimentManifest) -> Result<PhaseScanReport> {
    let (lambda, theta) = block_form(&m.model)?;
    let p = m.model.p;
    let beta_star = beta_star_hsbm(&lambda, &theta)?.beta_star;
    let grid = if m.beta_grid.is_empty() { vec![m.resolved_beta()?] } else { m.beta_grid.clone() };
    let mut rows = Vec::new();
    let mut growth = Vec::new();
    for &beta in &grid {
        let sup = sup_phi_hsbm(&lambda, &theta, beta)?.0;
        let mut at_beta = Vec::new();
        for &n in &m.n_values {
            let a = averaged_hsbm_log_partition(p, n, &lambda, &theta, beta)?;
            at_beta.push(PhaseRow {
                beta,
                n,
                log_partition: a.log_partition,
                offdiagonal_log_partition: a.offdiagonal_log_partition,
                diagonal_correction: a.diagonal_correction,
                meanfield_bound: n as f64 * sup,
            });
        }
        let lo = at_beta.iter().min_by_key(|r| r.n).unwrap();
        let hi = at_beta.iter().max_by_key(|r| r.n).unwrap();
        let slope = if hi.n > lo.n { (hi.log_partition - lo.log_partition) / (hi.n - lo.n) as f64 } else { 0.0 };
        growth.push((beta, slope, slope > GROWTH_SLOPE));
        rows.extend(at_beta);
    }
    let mut order: Vec<&(f64, f64, bool)> = growth.iter().collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let transition = order.windows(2).find(|w| !w[0].2 && w[1].2).map(|w| 0.5 * (w[0].0 + w[1].0));
    Ok(PhaseScanReport { rows, beta_star, growth, transition })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub level: f64,
    pub replicates: usize,
    pub covered: usize,
    /// Replicates whose interval was undefined, counted as not covering.
    pub undefined: usize,
    pub coverage: f64,
    pub standard_error: f64,
    pub rows: Vec<(f64, f64, f64, bool)>,
}

impl CoverageReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("replicate,xbar,lo,hi,covered\n");
        for (r, (x, lo, hi, c)) in self.rows.iter().enumerate() {
            let _ = writeln!(s, "{r},{x},{lo},{hi},{}", *c as u8);
        }
        s
    }

    pub fn summary(&self) -> String {
        format!(
            "level = {}\nreplicates = {}\ncovered = {}\nundefined = {}\ncoverage = {}\nstandard_error = {}\n",
            self.level, self.replicates, self.covered, self.undefined, self.coverage, self.standard_error
        )
    }
}

pub fn run_coverage(m: &ExperimentManifest) -> Result<CoverageReport> {
    if m.model.family != Family::CurieWeiss {
        return Err(Error::InvalidArgument("coverage runs need the Curie-Weiss family".into()));
    }
    let beta = m.resolved_beta()?;
    let p = m.model.p;
    let bstar = beta_star_cw(p)?;
    if beta <= bstar {
        return Err(Error::InvalidArgument(format!("beta = {beta} is below the threshold {bstar}; the interval has no coverage guarantee")));
    }
    let n = m.n_values[0];
    let draws = draw_estimates(m, n, beta)?;
    let rows: Vec<(f64, f64, f64, bool)> = draws
        .iter()
        .map(|&(xbar, _)| match cw_confidence_interval(xbar, p, n, m.level) {
            Ok(ci) => (xbar, ci.lo, ci.hi, ci.contains(beta)),
            Err(_) => (xbar, f64::NAN, f64::NAN, false),
        })
        .collect();
    let covered = rows.iter().filter(|r| r.3).count();
    let undefined = rows.iter().filter(|r| r.1.is_nan()).count();
    let coverage = covered as f64 / rows.len() as f64;
    Ok(CoverageReport {
        level: m.level,
        replicates: rows.len(),
        covered,
        undefined,
        coverage,
        standard_error: (coverage * (1.0 - coverage) / rows.len() as f64).sqrt(),
        rows,
    })
}

/// Text artefacts of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub summary: String,
    pub meta: String,
}

pub fn run(m: &ExperimentManifest) -> Result<RunOutput> {
    let (csv, summary) = match m.experiment {
        ExperimentKind::Histogram | ExperimentKind::ThresholdMixture => {
            let r = run_histogram(m)?;
            (r.csv(), r.summary())
        }
        ExperimentKind::ConsistencySweep => {
            let r = run_consistency_sweep(m)?;
            (r.csv(), r.summary())
        }
        ExperimentKind::PhaseScan => {
            let r = run_phase_scan(m)?;
            (r.csv(), r.summary())
        }
        ExperimentKind::Coverage => {
            let r = run_coverage(m)?;
            (r.csv(), r.summary())
        }
    };
    let meta = format!(
        "manifest_sha256 = {}\nexperiment = {}\nmodel = {}\nseed = {}\nreplicates = {}\nversion = {}\n",
        m.hash,
        m.experiment.as_str(),
        m.model.to_spec_string(),
        m.seed,
        m.replicates,
        env!("CARGO_PKG_VERSION")
    );
    Ok(RunOutput { csv, summary: format!("experiment = {}\n{summary}", m.experiment.as_str()), meta })
}

/// Runs the manifest and writes `<name>.csv`, `<name>.summary.txt` and
/// `<name>.meta` under `base` joined with the manifest's output directory.
pub fn run_and_write(m: &ExperimentManifest, base: &Path) -> Result<Vec<PathBuf>> {
    let out = run(m)?;
    let dir = base.join(&m.output_dir);
    std::fs::create_dir_all(&dir)?;
    let files = [("csv", &out.csv), ("summary.txt", &out.summary), ("meta", &out.meta)];
    let mut paths = Vec::new();
    for (ext, body) in files {
        let path = dir.join(format!("{}.{ext}", m.name));
        std::fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}
