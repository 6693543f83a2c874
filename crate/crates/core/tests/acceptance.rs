//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; the process fails if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use tensor_ising::combinatorics::factorial;
use tensor_ising::experiments::{run_coverage, run_histogram, ExperimentManifest};
use tensor_ising::landscape::{
    beta_star_cw, beta_star_er, beta_star_hsbm, beta_star_partite, fisher_info_limit, g_second, m_star, sup_phi_hsbm,
};
use tensor_ising::models::{edge_count_scaling, erdos_renyi, sk, BlockTensor};
use tensor_ising::mple::phi_p;
use tensor_ising::oracle::{
    averaged_hsbm_log_partition, enumerated_magnetization_pmf, exact_log_partition, exact_magnetization_pmf, hamiltonian_table,
    kl_divergence, mean_hamiltonian,
};
use tensor_ising::rng::{stream_rng, Purpose};
use tensor_ising::sampler::{cw_level_log_weights, glauber_sweep, sample, ChainState, CwLevelSampler, Schedule};
use tensor_ising::stats::total_variation;
use tensor_ising::{mple, InteractionTensor, SpinConfig};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn thresholds() -> Outcome {
    let b: Vec<f64> = (2..=20).map(|p| beta_star_cw(p).unwrap()).collect();
    let at = |p: usize| b[p - 2];
    let increasing = (2..10).all(|p| at(p) < at(p + 1));
    let pass = (at(2) - 0.5).abs() <= 1e-6
        && (at(3) - 0.672).abs() <= 0.005
        && (at(4) - 0.689).abs() <= 0.005
        && increasing
        && (at(20) - std::f64::consts::LN_2).abs() <= 0.01;
    outcome(
        pass,
        format!(
            "p=2 {:.9}, p=3 {:.9}, p=4 {:.9}, increasing 2..10 {increasing}, p=20 {:.6} (ln 2 = {:.6})",
            at(2),
            at(3),
            at(4),
            at(20),
            std::f64::consts::LN_2
        ),
    )
}

fn equipartite() -> Outcome {
    let mut worst = 0.0f64;
    for p in [2usize, 3] {
        for theta in [0.5, 1.0] {
            let lhs = beta_star_partite(&vec![1.0 / p as f64; p], theta).unwrap();
            let rhs = (p as f64).powi(p as i32) * beta_star_er(p, theta).unwrap();
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    outcome(worst <= 1e-4, format!("worst relative gap {worst:.2e} (tol 1e-4)"))
}

/// Fields and Hamiltonian straight from the canonical edge list.
fn brute_fields(t: &InteractionTensor, x: &SpinConfig) -> (f64, Vec<f64>) {
    let p = t.order();
    let mut m = vec![0.0; t.n()];
    let mut h = 0.0;
    for (e, w) in t.edges() {
        let prod: f64 = e.iter().map(|&v| x.get(v as usize)).product();
        h += factorial(p) * w * prod;
        for &v in e {
            m[v as usize] += factorial(p - 1) * w * prod * x.get(v as usize);
        }
    }
    (h, m)
}

/// Smallest root of the score equation by a two-level grid: step `B/5e4` on
/// `[0, B]`, then 1/100 of that inside the bracketing cell. `B` starts at 50
/// and doubles while the root lies beyond it. The root set is empty when
/// `H < 0` or `H >= sum |m_i|`, the supremum of the increasing side.
fn grid_oracle(h: f64, m: &[f64], p: usize) -> f64 {
    let u = |b: f64| m.iter().map(|&mi| mi * (p as f64 * b * mi).tanh()).sum::<f64>();
    let sup: f64 = m.iter().map(|v| v.abs()).sum();
    if h.abs() <= 1e-12 * sup.max(1.0) {
        return 0.0;
    }
    if h < 0.0 || h >= sup * (1.0 - 1e-12) {
        return f64::INFINITY;
    }
    let mut top = 50.0;
    while u(top) < h {
        top *= 2.0;
        if top > 1e6 {
            return f64::INFINITY;
        }
    }
    let coarse = top / 5e4;
    let k = (0..=50_000).find(|&k| u(k as f64 * coarse) >= h).unwrap();
    let base = (k.max(1) - 1) as f64 * coarse;
    let fine = coarse / 100.0;
    let j = (0..=100).find(|&j| u(base + j as f64 * fine) >= h).unwrap();
    base + j as f64 * fine
}

fn mpl_correctness() -> Outcome {
    let mut worst = 0.0f64;
    let (mut finite, mut zero, mut infinite, mut mismatched) = (0, 0, 0, 0);
    for i in 0..100u64 {
        let p = 2 + (i % 3) as usize;
        let n = 6 + ((i / 3) % 7) as usize;
        let t = if i % 2 == 0 { sk(p, n, 100 + i).unwrap() } else { edge_count_scaling(&erdos_renyi(p, n, 0.5, 100 + i).unwrap()).unwrap() };
        let beta = [0.0, 0.15, 0.4][((i / 21) % 3) as usize];
        let x = sample(&t, beta, 1, Schedule::default(), 7, i).unwrap().pop().unwrap();
        let (h, m) = brute_fields(&t, &x);
        let want = grid_oracle(h, &m, p);
        let got = mple(&t, &x).unwrap().beta_hat;
        match (got.is_finite(), want.is_finite()) {
            (true, true) => {
                worst = worst.max((got - want).abs());
                if got == 0.0 {
                    zero += 1;
                } else {
                    finite += 1;
                }
            }
            (false, false) => infinite += 1,
            _ => mismatched += 1,
        }
    }
    let mut cw_worst = 0.0f64;
    let (mut cw_inf, mut cw_zero, mut cw_mismatch) = (0, 0, 0);
    for p in 2..=4 {
        for n in [5usize, 6, 7, 8, 9, 10, 20, 50, 101] {
            let t = InteractionTensor::curie_weiss(p, n).unwrap();
            for k in 0..=n {
                let x = SpinConfig::new((0..n).map(|i| if i < k { 1 } else { -1 }).collect()).unwrap();
                let got = mple(&t, &x).unwrap().beta_hat;
                let want = phi_p(x.mean(), p).unwrap();
                if want.is_infinite() || got.is_infinite() {
                    if got == want {
                        cw_inf += 1;
                    } else {
                        cw_mismatch += 1;
                    }
                    continue;
                }
                if want == 0.0 && got == 0.0 {
                    cw_zero += 1;
                }
                cw_worst = cw_worst.max((got - want).abs() / want.abs().max(1.0));
            }
        }
    }
    let pass = worst <= 1e-4 && mismatched == 0 && cw_worst <= 1e-9 && cw_mismatch == 0 && cw_inf > 0 && cw_zero > 0;
    outcome(
        pass,
        format!(
            "sparse: {finite} finite, {zero} zero, {infinite} infinite, {mismatched} atom mismatches, worst gap {worst:.2e} (tol 1e-4); \
             cw: worst gap {cw_worst:.2e} (tol 1e-9), {cw_inf} infinite and {cw_zero} zero atoms matched, {cw_mismatch} mismatches"
        ),
    )
}

fn glauber_tv(t: &InteractionTensor, beta: f64, sweeps: usize, seed: u64) -> f64 {
    let n = t.n();
    let h = hamiltonian_table(t).unwrap();
    let lw: Vec<f64> = h.iter().map(|v| beta * v).collect();
    let z = tensor_ising::oracle::log_sum_exp(&lw);
    let exact: Vec<f64> = lw.iter().map(|l| (l - z).exp()).collect();
    let mut state = ChainState::random_start(t, seed, 0).unwrap();
    for _ in 0..1000 {
        glauber_sweep(&mut state, t, beta).unwrap();
    }
    let mut counts = vec![0.0; 1 << n];
    for _ in 0..sweeps {
        glauber_sweep(&mut state, t, beta).unwrap();
        counts[state.x.to_bits() as usize] += 1.0;
    }
    counts.iter_mut().for_each(|c| *c /= sweeps as f64);
    total_variation(&counts, &exact)
}

fn sampler_correctness() -> Outcome {
    let sweeps = 1_000_000;
    let tv_sk = glauber_tv(&sk(3, 8, 11).unwrap(), 0.4, sweeps, 1);
    let tv_cw = glauber_tv(&InteractionTensor::curie_weiss(4, 8).unwrap(), 0.7, sweeps, 2);
    let mut gap = 0.0f64;
    for p in 2..=4 {
        for n in p..=14 {
            for beta in [0.0, 0.3, 0.7, 1.2] {
                let lw = cw_level_log_weights(p, n, beta).unwrap();
                let z = tensor_ising::oracle::log_sum_exp(&lw);
                let enumerated = enumerated_magnetization_pmf(&InteractionTensor::curie_weiss(p, n).unwrap(), beta).unwrap();
                let ez = tensor_ising::oracle::log_sum_exp(&enumerated.log_weights);
                for (a, b) in lw.iter().zip(&enumerated.log_weights) {
                    gap = gap.max(((a - z) - (b - ez)).abs());
                }
                let pmf = CwLevelSampler::new(p, n, beta).unwrap().pmf();
                for (q, b) in pmf.iter().zip(&enumerated.log_weights) {
                    gap = gap.max((q - (b - ez).exp()).abs());
                }
            }
        }
    }
    let pass = tv_sk <= 0.02 && tv_cw <= 0.02 && gap <= 1e-10;
    outcome(
        pass,
        format!("glauber TV sk(p=3,N=8,beta=0.4) {tv_sk:.4}, cw(p=4,N=8,beta=0.7) {tv_cw:.4} over 1e6 sweeps (tol 0.02); exact cw log-weight gap {gap:.2e} (tol 1e-10)"),
    )
}

fn manifest(text: &str) -> ExperimentManifest {
    ExperimentManifest::parse(text).unwrap()
}

fn clt() -> Outcome {
    let m = manifest("experiment = histogram\nmodel = cw,p=4,n=2000\nbeta = 0.75\nreplicates = 5000\nseed = 1\n");
    let r = run_histogram(&m).unwrap();
    let target = r.target_variance.unwrap();
    let rel = (r.variance - target).abs() / target;
    let ks = r.ks.unwrap();
    outcome(
        rel <= 0.10 && ks.p_value > 0.01,
        format!(
            "variance {:.4} vs target {target:.4} (rel {rel:.3}, tol 0.10); KS D {:.4}, p {:.3e} (need > 0.01); {} infinite",
            r.variance, ks.statistic, ks.p_value, r.infinite_count
        ),
    )
}

fn threshold_law_p2() -> Outcome {
    let m = manifest("experiment = threshold-mixture\nmodel = cw,p=2,n=4000\nbeta = 0.5\nreplicates = 5000\nseed = 2\n");
    let r = run_histogram(&m).unwrap();
    let d = r.threshold.unwrap().limit_cdf_distance.unwrap();
    outcome(d <= 0.05, format!("sup distance {d:.4} (tol 0.05)"))
}

fn threshold_mixture() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [3usize, 4] {
        let m = manifest(&format!("experiment = threshold-mixture\nmodel = cw,p={p},n=4000\nbeta = threshold\nreplicates = 5000\nseed = {p}\n"));
        let r = run_histogram(&m).unwrap();
        let t = r.threshold.unwrap();
        let alpha = t.alpha.unwrap();
        let ks = t.conditional_ks.unwrap();
        let ok = (t.divergent_fraction - alpha).abs() <= 0.03 && ks.p_value > 0.01;
        pass &= ok;
        parts.push(format!(
            "p={p}: divergent {:.4} vs alpha {alpha:.4} (tol 0.03), conditional KS D {:.4} p {:.3e} on {} draws",
            t.divergent_fraction, ks.statistic, ks.p_value, t.conditional_count
        ));
    }
    outcome(pass, parts.join("; "))
}

fn efficiency() -> Outcome {
    let (p, n, beta) = (2usize, 4000usize, 1.0);
    let pmf = exact_magnetization_pmf(p, n, beta).unwrap();
    let m1 = pmf.expectation(|t| t.powi(p as i32));
    let m2 = pmf.expectation(|t| t.powi(2 * p as i32));
    let var = n as f64 * (m2 - m1 * m1);
    let ms = m_star(beta, p).unwrap().unwrap();
    let target = (p * p) as f64 * ms.powi(2 * p as i32 - 2) / -g_second(beta, p, ms).unwrap();
    let consistent = (target - fisher_info_limit(beta, p).unwrap()).abs() <= 1e-9 * target;
    let rel = (var - target).abs() / target;
    outcome(rel <= 0.15 && consistent, format!("Var {var:.4} vs limit {target:.4} (rel {rel:.4}, tol 0.15)"))
}

fn phase_behaviour() -> Outcome {
    let k2 = BlockTensor::new(2, 3, (0..8).map(|i| match i {
        0 => 0.9,
        7 => 0.5,
        _ => 0.3,
    })
    .collect()).unwrap();
    let models = [("K=1 theta=1", vec![1.0], BlockTensor::constant(1, 3, 1.0).unwrap()), ("K=2 theta 0.9/0.5/0.3", vec![0.4, 0.6], k2)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, lambda, theta) in &models {
        let bstar = beta_star_hsbm(lambda, theta).unwrap().beta_star;
        let f = |beta: f64, n: usize| averaged_hsbm_log_partition(3, n, lambda, theta, beta).unwrap().log_partition;
        let below = 0.8 * bstar;
        let rise = f(below, 800) - f(below, 200);
        pass &= rise <= 0.5;
        parts.push(format!("{label}: beta* {bstar:.5}, rise at 0.8 beta* {rise:.4} (tol 0.5)"));
        for factor in [1.2, 1.5] {
            let beta = factor * bstar;
            let slope = (f(beta, 800) - f(beta, 200)) / 600.0;
            let sup = sup_phi_hsbm(lambda, theta, beta).unwrap().0;
            pass &= slope >= 0.8 * sup;
            parts.push(format!("slope at {factor} beta* {slope:.5} vs 0.8 sup {:.5}", 0.8 * sup));
        }
    }
    outcome(pass, parts.join(", "))
}

fn coverage() -> Outcome {
    let m = manifest("experiment = coverage\nmodel = cw,p=2,n=1000\nbeta = 0.8\nreplicates = 2000\nlevel = 0.95\nseed = 10\n");
    let r = run_coverage(&m).unwrap();
    outcome(
        (0.93..=0.97).contains(&r.coverage),
        format!("coverage {:.4} +/- {:.4}, {} undefined intervals", r.coverage, r.standard_error, r.undefined),
    )
}

fn structural() -> Outcome {
    let mut worst_contract = 0.0f64;
    let mut worst_flip = 0.0f64;
    let mut worst_deriv = 0.0f64;
    let mut min_kl = f64::INFINITY;
    let mut pair_constant = true;
    let mut worst_cache = 0.0f64;
    for seed in 0..6u64 {
        for p in 2..=4 {
            let t = if seed % 2 == 0 { sk(p, 9, seed).unwrap() } else { erdos_renyi(p, 9, 0.6, seed).unwrap() };
            let mut rng = stream_rng(seed, Purpose::Replicate, p as u64);
            for _ in 0..10 {
                let x = SpinConfig::from_bits(rand::Rng::random::<u64>(&mut rng), 9);
                let h = t.hamiltonian(&x).unwrap();
                let m = t.all_local_fields(&x).unwrap();
                let s: f64 = m.iter().enumerate().map(|(i, v)| v * x.get(i)).sum();
                worst_contract = worst_contract.max((s - h).abs() / (1.0 + h.abs()));
                for (i, mi) in m.iter().enumerate() {
                    let mut y = x.clone();
                    y.flip(i);
                    let dh = t.hamiltonian(&y).unwrap() - h;
                    let want = -2.0 * p as f64 * x.get(i) * mi;
                    worst_flip = worst_flip.max((dh - want).abs() / (1.0 + dh.abs()));
                }
                if p == 2 {
                    pair_constant &= t.local_interaction_matrix(&x).unwrap().entries
                        == t.local_interaction_matrix(&SpinConfig::all_up(9)).unwrap().entries;
                }
            }
            for beta in [0.0, 0.4, 1.1] {
                let fd = (exact_log_partition(&t, beta + 1e-4).unwrap() - exact_log_partition(&t, beta - 1e-4).unwrap()) / 2e-4;
                let d = mean_hamiltonian(&t, beta).unwrap();
                worst_deriv = worst_deriv.max((fd - d).abs() / (1.0 + d.abs()));
                for b2 in [0.0, 0.5, 2.0] {
                    min_kl = min_kl.min(kl_divergence(&t, beta, b2).unwrap());
                }
            }
            let mut state = ChainState::random_start(&t, seed, 0).unwrap();
            for _ in 0..2500 {
                glauber_sweep(&mut state, &t, 1.0).unwrap();
            }
            let fresh = t.all_local_fields(&state.x).unwrap();
            for (a, b) in state.cached_fields().iter().zip(&fresh) {
                worst_cache = worst_cache.max((a - b).abs() / (1.0 + b.abs()));
            }
        }
    }
    let pass = worst_contract <= 1e-10 && worst_flip <= 1e-10 && pair_constant && worst_deriv <= 1e-6 && min_kl >= 0.0 && worst_cache <= 1e-9;
    outcome(
        pass,
        format!(
            "sum m x = H gap {worst_contract:.1e}, flip gap {worst_flip:.1e}, p=2 local matrix constant {pair_constant}, \
             derivative gap {worst_deriv:.1e} (tol 1e-6), min KL {min_kl:.1e}, cached field drift {worst_cache:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("thresholds", thresholds),
        ("equipartite identity", equipartite),
        ("MPL correctness", mpl_correctness),
        ("sampler correctness", sampler_correctness),
        ("CLT reproduction", clt),
        ("threshold law p=2", threshold_law_p2),
        ("threshold mixture p=3,4", threshold_mixture),
        ("efficiency identity", efficiency),
        ("HSBM phase behaviour", phase_behaviour),
        ("CI coverage", coverage),
        ("structural invariants", structural),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {} [{:.1}s] {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
