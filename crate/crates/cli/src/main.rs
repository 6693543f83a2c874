use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tensor_ising::experiments::{family_threshold, run_and_write, ExperimentManifest};
use tensor_ising::io::{metadata_json, parse_spins, parse_tensor, write_spins, write_tensor};
use tensor_ising::landscape::{beta_star_cw_with_tol, m_star, BlockFunctional};
use tensor_ising::models::{BlockTensor, Scaling};
use tensor_ising::mple::{cw_confidence_interval, mple_with, DEFAULT_B_MAX, DEFAULT_TOL};
use tensor_ising::oracle::{
    averaged_hsbm_log_partition, exact_log_partition, exact_magnetization_pmf, exact_mple_distribution, kl_divergence,
    meanfield_lower_bound, ENUMERATION_LIMIT, MAX_AVERAGED_BLOCKS, MAX_BLOCK_LATTICE, MPLE_ENUMERATION_LIMIT,
};
use tensor_ising::sampler::{sample, Route, Schedule, DEFAULT_BURN_IN, DEFAULT_THIN};
use tensor_ising::{Family, InteractionTensor, ModelSpec};

#[derive(Parser)]
#[command(name = "tising", version, about = "Simulate and estimate p-tensor Ising models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a tensor from a model spec and write it with a metadata sidecar.
    Generate {
        /// Model spec, e.g. `er,p=3,n=100,theta=0.5,seed=7`.
        #[arg(long)]
        model: String,
        /// Overrides the family's default weight normalization.
        #[arg(long)]
        scale: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw configurations, one per line.
    Sample {
        #[command(flatten)]
        source: TensorSource,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
        /// Burn-in in sweeps of N site updates.
        #[arg(long, default_value_t = DEFAULT_BURN_IN)]
        burn_in: usize,
        /// Sweeps between draws.
        #[arg(long, default_value_t = DEFAULT_THIN)]
        thin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        chain: u64,
        /// Force Glauber dynamics even for Curie-Weiss tensors.
        #[arg(long)]
        glauber: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum pseudo-likelihood estimate for every configuration in a sample file.
    Estimate {
        #[command(flatten)]
        source: TensorSource,
        #[arg(long)]
        sample_file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_B_MAX)]
        b_max: f64,
        /// Confidence level for the Curie-Weiss interval.
        #[arg(long)]
        ci_level: Option<f64>,
    },
    /// Estimability threshold of a model family.
    Threshold(ThresholdArgs),
    /// Exact enumeration references.
    Oracle {
        #[command(subcommand)]
        verb: OracleVerb,
    },
    /// Manifest-driven experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TensorSource {
    /// Model spec to build in memory.
    #[arg(long)]
    model: Option<String>,
    /// Tensor file as written by `generate`.
    #[arg(long)]
    tensor_file: Option<PathBuf>,
}

impl TensorSource {
    fn load(&self) -> Result<(InteractionTensor, Option<ModelSpec>)> {
        if let Some(m) = &self.model {
            let spec: ModelSpec = m.parse()?;
            return Ok((spec.build()?.0, Some(spec)));
        }
        let path = self.tensor_file.as_ref().expect("clap enforces one source");
        Ok((read_tensor(path)?, None))
    }
}

fn read_tensor(path: &Path) -> Result<InteractionTensor> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_tensor(&text).with_context(|| format!("parsing {}", path.display()))?.tensor)
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    p: usize,
    /// Edge probability (er, partite) or the flattened block tensor (hsbm), colon separated.
    #[arg(long)]
    theta: Option<String>,
    /// Block or part proportions, colon separated.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum OracleVerb {
    /// Log partition function by enumeration.
    #[command(name = "logZ", alias = "logz")]
    LogZ {
        #[arg(long)]
        tensor_file: PathBuf,
        #[arg(long)]
        beta: f64,
    },
    /// Exact Curie-Weiss magnetization law as CSV.
    Magpmf {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
    },
    /// Exact law of the MPL estimate as CSV.
    Mplepmf {
        #[arg(long)]
        tensor_file: PathBuf,
        #[arg(long)]
        beta: f64,
    },
    /// KL divergence between the models at two inverse temperatures.
    Kl {
        #[arg(long)]
        tensor_file: PathBuf,
        #[arg(long)]
        beta1: f64,
        #[arg(long)]
        beta2: f64,
    },
    /// Log partition function of the averaged block model.
    AvgHsbm {
        #[command(flatten)]
        block: BlockArgs,
        #[arg(long)]
        p: usize,
    },
    /// Mean-field lower bound `N sup phi`.
    MfBound {
        #[command(flatten)]
        block: BlockArgs,
        #[arg(long)]
        p: usize,
    },
}

#[derive(Args)]
struct BlockArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    lambda: String,
    /// Flattened block tensor, colon separated.
    #[arg(long)]
    theta: String,
}

impl BlockArgs {
    fn parse(&self, p: usize) -> Result<(Vec<f64>, BlockTensor)> {
        let lambda = colon_list(&self.lambda)?;
        let theta = BlockTensor::new(lambda.len(), p, colon_list(&self.theta)?)?;
        Ok((lambda, theta))
    }
}

#[derive(Subcommand)]
enum ExperimentAction {
    /// Run a manifest and write `<name>.csv`, `<name>.summary.txt`, `<name>.meta`.
    Run {
        manifest: PathBuf,
        /// Base directory for the manifest's output_dir.
        #[arg(long, default_value = ".")]
        base: PathBuf,
    },
}

fn colon_list(s: &str) -> Result<Vec<f64>> {
    s.split(':').map(|v| v.trim().parse::<f64>().with_context(|| format!("bad number '{v}'"))).collect()
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else if x < 0.0 {
        json!("-inf")
    } else {
        json!("nan")
    }
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn generate(model: &str, scale: Option<&str>, out: &Path) -> Result<()> {
    let mut spec: ModelSpec = model.parse()?;
    match scale {
        None => {}
        Some("ncount") => spec.scaling = Scaling::EdgeCount,
        Some("default") => spec.scaling = Scaling::Default,
        Some(other) => bail!("unknown scale '{other}' (expected default or ncount)"),
    }
    let (tensor, _) = spec.build()?;
    emit(Some(out), &write_tensor(&tensor, spec.family.as_str()))?;
    let mut meta = out.as_os_str().to_owned();
    meta.push(".meta.json");
    emit(Some(Path::new(&meta)), &metadata_json(&spec, &tensor))?;
    Ok(())
}

/// Relative distance from the family threshold below which mixing is slow.
const NEAR_CRITICAL: f64 = 0.1;

#[allow(clippy::too_many_arguments)]
fn run_sample(
    source: &TensorSource,
    beta: f64,
    samples: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
    chain: u64,
    glauber: bool,
    out: Option<&Path>,
) -> Result<()> {
    let (tensor, spec) = source.load()?;
    let cw = tensor.is_curie_weiss();
    let route = if glauber { Route::Glauber } else { Route::Auto };
    if !cw || glauber {
        if let Some(bstar) = spec.as_ref().and_then(|s| family_threshold(s).ok()) {
            if (beta - bstar).abs() <= NEAR_CRITICAL * bstar {
                eprintln!(
                    "warning: beta = {beta} is near the threshold {bstar:.6}; Glauber mixing is slow here{}",
                    if spec.as_ref().is_some_and(|s| s.family == Family::CurieWeiss) {
                        ", the exact Curie-Weiss sampler is recommended"
                    } else {
                        ""
                    }
                );
            }
        }
    }
    let xs = sample(&tensor, beta, samples, Schedule { burn_in, thin, route }, seed, chain)?;
    emit(out, &write_spins(&xs))
}

fn estimate(source: &TensorSource, sample_file: &Path, tol: f64, b_max: f64, ci_level: Option<f64>) -> Result<()> {
    let (tensor, _) = source.load()?;
    let text = fs::read_to_string(sample_file).with_context(|| format!("reading {}", sample_file.display()))?;
    let xs = parse_spins(&text)?;
    if ci_level.is_some() && !tensor.is_curie_weiss() {
        bail!("--ci-level is only available for Curie-Weiss tensors");
    }
    let mut out = String::new();
    for x in &xs {
        let r = mple_with(&tensor, x, tol, b_max)?;
        let mut rec = json!({
            "beta_hat": num(r.beta_hat),
            "residual": num(r.residual),
            "bracket": [num(r.root_bracket.0), num(r.root_bracket.1)],
            "iterations": r.iterations,
            "mean_spin": x.mean(),
        });
        if let Some(level) = ci_level {
            rec["ci"] = match cw_confidence_interval(x.mean(), tensor.order(), tensor.n(), level) {
                Ok(ci) => json!({ "lo": ci.lo, "hi": ci.hi, "level": ci.level }),
                Err(e) => json!({ "error": e.to_string() }),
            };
        }
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    emit(None, &out)
}

fn threshold(a: &ThresholdArgs) -> Result<()> {
    let p = a.p;
    let theta_list = a.theta.as_deref().map(colon_list).transpose()?;
    let scalar_theta = || -> Result<f64> {
        match theta_list.as_deref() {
            None => Ok(1.0),
            Some([t]) => Ok(*t),
            Some(_) => bail!("--theta must be a single number for this family"),
        }
    };
    let rec = match a.family.as_str() {
        "cw" | "er" => {
            let tol = a.tol.unwrap_or(1e-12);
            let theta = scalar_theta()?;
            let b = beta_star_cw_with_tol(p, tol)?;
            let profile = m_star(b, p)?.map_or_else(Vec::new, |m| vec![m]);
            json!({ "beta_star": b / theta, "argmax_profile": profile, "tol_beta": tol / theta, "tol_inner": 0.0 })
        }
        "partite" | "hsbm" => {
            let tol = a.tol.unwrap_or(tensor_ising::landscape::HSBM_BETA_TOL);
            let f = if a.family == "partite" {
                let lambda = match &a.lambda {
                    Some(l) => colon_list(l)?,
                    None => vec![1.0 / p as f64; p],
                };
                BlockFunctional::partite(&lambda, scalar_theta()?)?
            } else {
                let lambda = colon_list(a.lambda.as_deref().context("hsbm needs --lambda")?)?;
                let values = theta_list.clone().context("hsbm needs --theta")?;
                BlockFunctional::hsbm(&lambda, &BlockTensor::new(lambda.len(), p, values)?)?
            };
            let r = f.threshold(tol)?;
            json!({ "beta_star": r.beta_star, "argmax_profile": r.argmax_profile, "tol_beta": r.tol_beta, "tol_inner": r.tol_inner })
        }
        other => bail!("unknown family '{other}' (expected cw, er, partite or hsbm)"),
    };
    emit(None, &format!("{rec}\n"))
}

fn oracle(verb: &OracleVerb) -> Result<()> {
    let guard = |e: tensor_ising::Error| {
        anyhow::anyhow!(
            "{e} (limits: N <= {ENUMERATION_LIMIT} for enumeration, N <= {MPLE_ENUMERATION_LIMIT} for mplepmf, K <= {MAX_AVERAGED_BLOCKS} and lattice <= {MAX_BLOCK_LATTICE} for avg-hsbm)"
        )
    };
    let body = match verb {
        OracleVerb::LogZ { tensor_file, beta } => {
            format!("{}\n", exact_log_partition(&read_tensor(tensor_file)?, *beta).map_err(guard)?)
        }
        OracleVerb::Magpmf { p, n, beta } => {
            let d = exact_magnetization_pmf(*p, *n, *beta).map_err(guard)?;
            let mut s = String::from("magnetization,probability\n");
            for (m, q) in d.support.iter().zip(d.probabilities()) {
                s.push_str(&format!("{m},{q}\n"));
            }
            s
        }
        OracleVerb::Mplepmf { tensor_file, beta } => {
            let d = exact_mple_distribution(&read_tensor(tensor_file)?, *beta).map_err(guard)?;
            let mut s = String::from("beta_hat,probability\n");
            for (b, q) in d.support.iter().zip(d.probabilities()) {
                s.push_str(&format!("{b},{q}\n"));
            }
            s
        }
        OracleVerb::Kl { tensor_file, beta1, beta2 } => {
            format!("{}\n", kl_divergence(&read_tensor(tensor_file)?, *beta1, *beta2).map_err(guard)?)
        }
        OracleVerb::AvgHsbm { block, p } => {
            let (lambda, theta) = block.parse(*p)?;
            let a = averaged_hsbm_log_partition(*p, block.n, &lambda, &theta, block.beta).map_err(guard)?;
            format!(
                "log_partition,offdiagonal_log_partition,diagonal_correction\n{},{},{}\n",
                a.log_partition, a.offdiagonal_log_partition, a.diagonal_correction
            )
        }
        OracleVerb::MfBound { block, p } => {
            let (lambda, theta) = block.parse(*p)?;
            format!("{}\n", meanfield_lower_bound(block.n, &lambda, &theta, block.beta)?)
        }
    };
    emit(None, &body)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Generate { model, scale, out } => generate(model, scale.as_deref(), out),
        Command::Sample { source, beta, samples, burn_in, thin, seed, chain, glauber, out } => {
            run_sample(source, *beta, *samples, *burn_in, *thin, *seed, *chain, *glauber, out.as_deref())
        }
        Command::Estimate { source, sample_file, tol, b_max, ci_level } => estimate(source, sample_file, *tol, *b_max, *ci_level),
        Command::Threshold(a) => threshold(a),
        Command::Oracle { verb } => oracle(verb),
        Command::Experiment { action: ExperimentAction::Run { manifest, base } } => {
            let text = fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let m = ExperimentManifest::parse(&text)?;
            for path in run_and_write(&m, base)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}
