//! Seeded generators for the model families.
//!
//! Random families draw one variate per canonical edge in lexicographic
//! order. Edges are cut into fixed-size chunks and chunk `c` reads from its own
//! counter-based stream, so output is identical for any thread count.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::combinatorics::{binomial, next_combination, unrank_combination};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Purpose};
use crate::tensor::InteractionTensor;

/// Largest number of canonical edges a random generator will visit.
pub const MAX_EDGE_VISITS: u128 = 100_000_000;
const CHUNK: u128 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    CurieWeiss,
    Sk,
    ErdosRenyi,
    PPartite,
    Hsbm,
    FromFile,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::CurieWeiss => "cw",
            Family::Sk => "sk",
            Family::ErdosRenyi => "er",
            Family::PPartite => "partite",
            Family::Hsbm => "hsbm",
            Family::FromFile => "file",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "cw" | "curie-weiss" | "curieweiss" => Family::CurieWeiss,
            "sk" => Family::Sk,
            "er" | "erdos-renyi" => Family::ErdosRenyi,
            "partite" | "p-partite" | "ppartite" => Family::PPartite,
            "hsbm" => Family::Hsbm,
            "file" | "sparse" => Family::FromFile,
            other => return Err(Error::InvalidModel(format!("unknown family '{other}'"))),
        })
    }
}

/// Normalisation of unweighted hypergraph adjacency tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scaling {
    /// `N^{1-p}` per edge.
    #[default]
    Default,
    /// `N / |E|` per edge.
    EdgeCount,
}

impl FromStr for Scaling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "default" => Ok(Scaling::Default),
            "ncount" => Ok(Scaling::EdgeCount),
            other => Err(Error::InvalidModel(format!("unknown scaling '{other}'"))),
        }
    }
}

/// Symmetric block probability tensor over `k` labels, stored densely as
/// `k^p` values in row-major label order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTensor {
    k: usize,
    order: usize,
    values: Vec<f64>,
}

impl BlockTensor {
    pub fn constant(k: usize, order: usize, theta: f64) -> Result<Self> {
        Self::new(k, order, vec![theta; k.pow(order as u32)])
    }

    pub fn new(k: usize, order: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 || order < 2 {
            return Err(Error::InvalidModel("block tensor needs k >= 1 and p >= 2".into()));
        }
        let len = k.checked_pow(order as u32).ok_or_else(|| Error::InvalidModel("k^p overflows".into()))?;
        if values.len() != len {
            return Err(Error::InvalidModel(format!("block tensor needs k^p = {len} values, got {}", values.len())));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidModel(format!("block probability {v} outside [0,1]")));
        }
        let t = Self { k, order, values };
        let mut labels = vec![0usize; order];
        for idx in 0..len {
            t.decode(idx, &mut labels);
            let mut sorted = labels.clone();
            sorted.sort_unstable();
            if t.values[idx] != t.get(&sorted) {
                return Err(Error::InvalidModel(format!("block tensor not symmetric at labels {labels:?}")));
            }
        }
        Ok(t)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(&self, labels: &[usize]) -> usize {
        labels.iter().fold(0, |acc, &l| acc * self.k + l)
    }

    pub fn decode(&self, mut idx: usize, labels: &mut [usize]) {
        for slot in labels.iter_mut().rev() {
            *slot = idx % self.k;
            idx /= self.k;
        }
    }

    pub fn get(&self, labels: &[usize]) -> f64 {
        self.values[self.index(labels)]
    }
}

/// Contiguous vertex blocks `B_j = (N sum_{i<j} lambda_i, N sum_{i<=j} lambda_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    pub block_of: Vec<usize>,
    pub block_sizes: Vec<usize>,
}

pub fn validate_proportions(lambda: &[f64]) -> Result<()> {
    if lambda.is_empty() {
        return Err(Error::InvalidModel("proportion vector is empty".into()));
    }
    if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidModel(format!("proportions must be positive: {lambda:?}")));
    }
    let total: f64 = lambda.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidModel(format!("proportions sum to {total}, not 1")));
    }
    Ok(())
}

impl BlockStructure {
    pub fn from_proportions(n: usize, lambda: &[f64]) -> Result<Self> {
        validate_proportions(lambda)?;
        let k = lambda.len();
        let mut cuts = Vec::with_capacity(k + 1);
        cuts.push(0.0);
        let mut acc = 0.0;
        for l in lambda {
            acc += l;
            cuts.push(n as f64 * acc);
        }
        cuts[k] = n as f64;
        let mut block_of = Vec::with_capacity(n);
        let mut j = 0;
        for v in 1..=n {
            while (v as f64) > cuts[j + 1] {
                j += 1;
            }
            block_of.push(j);
        }
        Self::from_labels(block_of, k)
    }

    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let block_of = sizes.iter().enumerate().flat_map(|(j, &s)| std::iter::repeat_n(j, s)).collect();
        Self::from_labels(block_of, sizes.len())
    }

    fn from_labels(block_of: Vec<usize>, k: usize) -> Result<Self> {
        let mut block_sizes = vec![0; k];
        for &b in &block_of {
            block_sizes[b] += 1;
        }
        if let Some(j) = block_sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidModel(format!("block {} is empty", j + 1)));
        }
        Ok(Self { block_of, block_sizes })
    }

    pub fn k(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }
}

/// Family tag and parameters for building an [`InteractionTensor`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    pub p: usize,
    pub n: usize,
    /// Edge probability for Erdős–Rényi and p-partite models.
    pub theta: f64,
    /// Block proportions (HSBM) or part proportions (p-partite).
    pub lambda: Vec<f64>,
    /// Block probability tensor for HSBM.
    pub block_theta: Option<BlockTensor>,
    /// Explicit part sizes for p-partite models; overrides `lambda`.
    pub parts: Vec<usize>,
    pub seed: u64,
    pub scaling: Scaling,
    pub file: Option<PathBuf>,
}

impl ModelSpec {
    pub fn new(family: Family, p: usize, n: usize) -> Self {
        Self {
            family,
            p,
            n,
            theta: 1.0,
            lambda: Vec::new(),
            block_theta: None,
            parts: Vec::new(),
            seed: 0,
            scaling: Scaling::Default,
            file: None,
        }
    }

    pub fn curie_weiss(p: usize, n: usize) -> Self {
        Self::new(Family::CurieWeiss, p, n)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == Family::FromFile {
            return if self.file.is_some() { Ok(()) } else { Err(Error::InvalidModel("file family needs file=".into())) };
        }
        if self.p < 2 || self.n < self.p {
            return Err(Error::InvalidModel(format!("need p >= 2 and n >= p (p = {}, n = {})", self.p, self.n)));
        }
        match self.family {
            Family::ErdosRenyi | Family::PPartite if !(self.theta > 0.0 && self.theta <= 1.0) => {
                Err(Error::InvalidModel(format!("theta = {} outside (0,1]", self.theta)))
            }
            Family::PPartite => {
                if !self.parts.is_empty() {
                    if self.parts.len() != self.p || self.parts.iter().sum::<usize>() != self.n {
                        return Err(Error::InvalidModel("parts must be p positive sizes summing to n".into()));
                    }
                    Ok(())
                } else if self.lambda.len() != self.p {
                    Err(Error::InvalidModel("p-partite model needs parts= or p proportions".into()))
                } else {
                    validate_proportions(&self.lambda)
                }
            }
            Family::Hsbm => {
                validate_proportions(&self.lambda)?;
                match &self.block_theta {
                    Some(t) if t.k() == self.lambda.len() && t.order() == self.p => Ok(()),
                    Some(_) => Err(Error::InvalidModel("block tensor shape does not match (K, p)".into())),
                    None => Err(Error::InvalidModel("hsbm needs a block probability tensor".into())),
                }
            }
            _ => Ok(()),
        }
    }

    /// Part sizes for p-partite models.
    pub fn partite_sizes(&self) -> Result<Vec<usize>> {
        if !self.parts.is_empty() {
            return Ok(self.parts.clone());
        }
        Ok(BlockStructure::from_proportions(self.n, &self.lambda)?.block_sizes)
    }

    pub fn build(&self) -> Result<(InteractionTensor, Option<BlockStructure>)> {
        self.validate()?;
        let (tensor, blocks) = match self.family {
            Family::CurieWeiss => (curie_weiss(self.p, self.n)?, None),
            Family::Sk => (sk(self.p, self.n, self.seed)?, None),
            Family::ErdosRenyi => (erdos_renyi(self.p, self.n, self.theta, self.seed)?, None),
            Family::Hsbm => {
                let (t, b) = hsbm(self.p, self.n, &self.lambda, self.block_theta.as_ref().unwrap(), self.seed)?;
                (t, Some(b))
            }
            Family::PPartite => {
                let (t, b) = p_partite(self.p, &self.partite_sizes()?, self.theta, self.seed)?;
                (t, Some(b))
            }
            Family::FromFile => {
                let path = self.file.as_ref().unwrap();
                let text = std::fs::read_to_string(path)?;
                (crate::io::parse_tensor(&text)?.tensor, None)
            }
        };
        let tensor = match (self.scaling, self.family) {
            (Scaling::EdgeCount, Family::ErdosRenyi | Family::Hsbm | Family::PPartite) => edge_count_scaling(&tensor)?,
            _ => tensor,
        };
        Ok((tensor, blocks))
    }

    /// Canonical `family,key=value,...` rendering; inverse of [`FromStr`].
    pub fn to_spec_string(&self) -> String {
        let mut parts = vec![self.family.as_str().to_string()];
        if self.family == Family::FromFile {
            if let Some(f) = &self.file {
                parts.push(format!("file={}", f.display()));
            }
            return parts.join(",");
        }
        parts.push(format!("p={}", self.p));
        parts.push(format!("n={}", self.n));
        match self.family {
            Family::ErdosRenyi => parts.push(format!("theta={}", self.theta)),
            Family::PPartite => {
                parts.push(format!("theta={}", self.theta));
                if !self.parts.is_empty() {
                    parts.push(format!("parts={}", join(&self.parts)));
                } else {
                    parts.push(format!("lambda={}", join(&self.lambda)));
                }
            }
            Family::Hsbm => {
                parts.push(format!("lambda={}", join(&self.lambda)));
                if let Some(t) = &self.block_theta {
                    parts.push(format!("theta={}", join(t.values())));
                }
            }
            _ => {}
        }
        if matches!(self.family, Family::Sk | Family::ErdosRenyi | Family::PPartite | Family::Hsbm) {
            parts.push(format!("seed={}", self.seed));
        }
        if self.scaling == Scaling::EdgeCount {
            parts.push("scale=ncount".into());
        }
        parts.join(",")
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(':')
        .map(|s| s.trim().parse::<T>().map_err(|_| Error::InvalidModel(format!("bad value '{s}' for {key}"))))
        .collect()
}

fn parse_scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| Error::InvalidModel(format!("bad value '{v}' for {key}")))
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// Parses `family,key=value,...`, e.g. `er,p=3,n=40,theta=0.5,seed=7` or
    /// `hsbm,p=2,n=40,lambda=0.5:0.5,theta=0.9:0.1:0.1:0.9`. List values are
    /// colon-separated.
    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split(',');
        let family: Family = it.next().unwrap_or("").parse()?;
        let mut spec = ModelSpec::new(family, 0, 0);
        let mut theta_list: Option<Vec<f64>> = None;
        for kv in it {
            let kv = kv.trim();
            if kv.is_empty() {
                continue;
            }
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::InvalidModel(format!("expected key=value, got '{kv}'")))?;
            match k.trim() {
                "p" => spec.p = parse_scalar(k, v)?,
                "n" => spec.n = parse_scalar(k, v)?,
                "theta" => theta_list = Some(parse_list(k, v)?),
                "lambda" => spec.lambda = parse_list(k, v)?,
                "parts" => spec.parts = parse_list(k, v)?,
                "seed" => spec.seed = parse_scalar(k, v)?,
                "scale" => spec.scaling = v.parse()?,
                "file" => spec.file = Some(PathBuf::from(v.trim())),
                other => return Err(Error::InvalidModel(format!("unknown key '{other}'"))),
            }
        }
        if let Some(t) = theta_list {
            if family == Family::Hsbm {
                let k = spec.lambda.len().max(1);
                if spec.p < 2 || spec.p > 16 {
                    return Err(Error::InvalidModel("hsbm needs 2 <= p <= 16 before theta".into()));
                }
                let tensor = if t.len() == 1 { BlockTensor::constant(k, spec.p, t[0])? } else { BlockTensor::new(k, spec.p, t)? };
                spec.block_theta = Some(tensor);
            } else if t.len() == 1 {
                spec.theta = t[0];
            } else {
                return Err(Error::InvalidModel("theta must be a scalar for this family".into()));
            }
        }
        if family == Family::Hsbm && spec.lambda.is_empty() {
            spec.lambda = vec![1.0];
            if spec.block_theta.is_none() {
                return Err(Error::InvalidModel("hsbm needs theta=".into()));
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

pub fn curie_weiss(p: usize, n: usize) -> Result<InteractionTensor> {
    InteractionTensor::curie_weiss(p, n)
}

fn edge_visit_guard(n: usize, p: usize) -> Result<u128> {
    let total = binomial(n as u64, p as u64).unwrap_or(u128::MAX);
    if total > MAX_EDGE_VISITS {
        return Err(Error::Guard { what: "canonical edge count C(n,p)", value: total, limit: MAX_EDGE_VISITS });
    }
    Ok(total)
}

/// Runs `per_edge` over every canonical edge in lexicographic order, chunked
/// and in parallel, keeping the edges for which it returns a weight.
fn generate_canonical<F>(p: usize, n: usize, seed: u64, per_edge: F) -> Result<InteractionTensor>
where
    F: Fn(&[u32], &mut crate::rng::StreamRng) -> Option<f64> + Sync,
{
    let total = edge_visit_guard(n, p)?;
    let chunks = total.div_ceil(CHUNK) as u64;
    let parts: Vec<(Vec<u32>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * CHUNK;
            let len = CHUNK.min(total - start) as usize;
            let mut rng = stream_rng(seed, Purpose::Edges, c);
            let mut comb = unrank_combination(start, n as u32, p);
            let mut verts = Vec::new();
            let mut weights = Vec::new();
            for step in 0..len {
                if let Some(w) = per_edge(&comb, &mut rng) {
                    verts.extend_from_slice(&comb);
                    weights.push(w);
                }
                if step + 1 < len {
                    next_combination(&mut comb, n as u32);
                }
            }
            (verts, weights)
        })
        .collect();
    let (mut verts, mut weights) = (Vec::new(), Vec::new());
    for (v, w) in parts {
        verts.extend(v);
        weights.extend(w);
    }
    InteractionTensor::from_sorted_parts(p, n, verts, weights)
}

/// p-spin SK tensor: `w_e = N^{(1-p)/2} g_e` with i.i.d. standard normal `g_e`.
pub fn sk(p: usize, n: usize, seed: u64) -> Result<InteractionTensor> {
    if p < 2 || n < p {
        return Err(Error::InvalidModel(format!("need p >= 2 and n >= p (p = {p}, n = {n})")));
    }
    let scale = (n as f64).powf((1.0 - p as f64) / 2.0);
    generate_canonical(p, n, seed, |_, rng| {
        let g: f64 = rng.sample(StandardNormal);
        Some(scale * g)
    })
}

/// Block hypergraph: each canonical edge present with probability
/// `Theta[labels]`, weight `N^{1-p}`.
pub fn hsbm(
    p: usize,
    n: usize,
    lambda: &[f64],
    theta: &BlockTensor,
    seed: u64,
) -> Result<(InteractionTensor, BlockStructure)> {
    if p < 2 || n < p {
        return Err(Error::InvalidModel(format!("need p >= 2 and n >= p (p = {p}, n = {n})")));
    }
    if theta.k() != lambda.len() || theta.order() != p {
        return Err(Error::InvalidModel("block tensor shape does not match (K, p)".into()));
    }
    let blocks = BlockStructure::from_proportions(n, lambda)?;
    let weight = (n as f64).powi(1 - p as i32);
    let tensor = generate_canonical(p, n, seed, |e, rng| {
        let idx = e.iter().fold(0usize, |acc, &v| acc * theta.k() + blocks.block_of[v as usize]);
        let u: f64 = rng.random();
        (u < theta.values()[idx]).then_some(weight)
    })?;
    Ok((tensor, blocks))
}

pub fn erdos_renyi(p: usize, n: usize, theta: f64, seed: u64) -> Result<InteractionTensor> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidModel(format!("theta = {theta} outside (0,1]")));
    }
    let t = BlockTensor::constant(1, p, theta)?;
    Ok(hsbm(p, n, &[1.0], &t, seed)?.0)
}

/// Random p-partite p-uniform hypergraph on contiguous parts of the given
/// sizes; each edge with one vertex per part is present with probability
/// `theta`, weight `N^{1-p}`.
pub fn p_partite(p: usize, parts: &[usize], theta: f64, seed: u64) -> Result<(InteractionTensor, BlockStructure)> {
    if parts.len() != p || parts.contains(&0) {
        return Err(Error::InvalidModel(format!("need {p} positive part sizes, got {parts:?}")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidModel(format!("theta = {theta} outside (0,1]")));
    }
    let n: usize = parts.iter().sum();
    if n < p {
        return Err(Error::InvalidModel("n must be at least p".into()));
    }
    let blocks = BlockStructure::from_sizes(parts)?;
    let total: u128 = parts.iter().try_fold(1u128, |acc, &s| acc.checked_mul(s as u128)).unwrap_or(u128::MAX);
    if total > MAX_EDGE_VISITS {
        return Err(Error::Guard { what: "p-partite edge count", value: total, limit: MAX_EDGE_VISITS });
    }
    let starts: Vec<u32> = parts
        .iter()
        .scan(0u32, |acc, &s| {
            let st = *acc;
            *acc += s as u32;
            Some(st)
        })
        .collect();
    let weight = (n as f64).powi(1 - p as i32);
    let chunks = total.div_ceil(CHUNK) as u64;
    let pieces: Vec<(Vec<u32>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * CHUNK;
            let len = CHUNK.min(total - start);
            let mut rng = stream_rng(seed, Purpose::Edges, c);
            let mut verts = Vec::new();
            let mut weights = Vec::new();
            let mut digits = vec![0usize; p];
            for r in start..start + len {
                // mixed radix, last part fastest, matches lexicographic order
                let mut rem = r;
                for j in (0..p).rev() {
                    digits[j] = (rem % parts[j] as u128) as usize;
                    rem /= parts[j] as u128;
                }
                let u: f64 = rng.random();
                if u < theta {
                    verts.extend((0..p).map(|j| starts[j] + digits[j] as u32));
                    weights.push(weight);
                }
            }
            (verts, weights)
        })
        .collect();
    let (mut verts, mut weights) = (Vec::new(), Vec::new());
    for (v, w) in pieces {
        verts.extend(v);
        weights.extend(w);
    }
    Ok((InteractionTensor::from_sorted_parts(p, n, verts, weights)?, blocks))
}

/// Rescales an unweighted hypergraph tensor to `N / |E|` per edge.
pub fn edge_count_scaling(t: &InteractionTensor) -> Result<InteractionTensor> {
    let m = t.num_edges();
    if m == 0 {
        return Ok(t.clone());
    }
    let (first, _) = t.edge(0);
    let _ = first;
    let w0 = t.edge(0).1;
    if w0 == 0.0 {
        return Err(Error::InvalidModel("cannot rescale zero-weight edges".into()));
    }
    t.scaled(t.n() as f64 / m as f64 / w0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_intervals() {
        let b = BlockStructure::from_proportions(10, &[0.3, 0.7]).unwrap();
        assert_eq!(b.block_sizes, vec![3, 7]);
        let b = BlockStructure::from_proportions(7, &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert_eq!(b.block_sizes.iter().sum::<usize>(), 7);
        for (j, &s) in b.block_sizes.iter().enumerate() {
            assert!((s as f64 - 7.0 / 3.0).abs() <= 2.0, "block {j}");
        }
        assert!(BlockStructure::from_proportions(2, &[0.1, 0.9]).is_err());
        assert!(validate_proportions(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn block_tensor_validation() {
        assert!(BlockTensor::new(2, 2, vec![0.5, 0.1, 0.2, 0.5]).is_err());
        assert!(BlockTensor::new(2, 2, vec![0.5, 0.1, 0.1, 1.5]).is_err());
        assert!(BlockTensor::new(2, 2, vec![0.5, 0.1, 0.1, 0.5]).is_ok());
    }

    #[test]
    fn sk_counts_and_determinism() {
        let a = sk(3, 30, 11).unwrap();
        assert_eq!(a.num_edges(), 4060);
        assert_eq!(a, sk(3, 30, 11).unwrap());
        assert_ne!(a, sk(3, 30, 12).unwrap());
    }

    #[test]
    fn sk_variance() {
        let n = 200;
        let t = sk(2, n, 5).unwrap();
        let m = t.num_edges() as f64;
        let var: f64 = t.edges().map(|(_, w)| (w * (n as f64).sqrt()).powi(2)).sum::<f64>() / m;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn full_er_is_complete() {
        let t = erdos_renyi(3, 12, 1.0, 0).unwrap();
        assert_eq!(t.num_edges(), 220);
        assert!(t.edges().all(|(_, w)| (w - 12f64.powi(-2)).abs() < 1e-18));
    }

    #[test]
    fn partite_counts() {
        let (t, b) = p_partite(2, &[3, 3], 1.0, 0).unwrap();
        assert_eq!(t.num_edges(), 9);
        assert_eq!(b.block_sizes, vec![3, 3]);
        let (t, b) = p_partite(3, &[2, 2, 2], 1.0, 0).unwrap();
        assert_eq!(t.num_edges(), 8);
        for (e, _) in t.edges() {
            let mut seen: Vec<usize> = e.iter().map(|&v| b.block_of[v as usize]).collect();
            seen.sort();
            assert_eq!(seen, vec![0, 1, 2]);
        }
    }

    #[test]
    fn spec_string_roundtrip() {
        let s = "hsbm,p=2,n=40,lambda=0.5:0.5,theta=0.9:0.1:0.1:0.9,seed=3";
        let spec: ModelSpec = s.parse().unwrap();
        assert_eq!(spec.to_spec_string(), s);
        let spec: ModelSpec = "er,p=3,n=20,theta=0.5,seed=2,scale=ncount".parse().unwrap();
        assert_eq!(spec.scaling, Scaling::EdgeCount);
        let (t, _) = spec.build().unwrap();
        let total: f64 = t.edges().map(|(_, w)| w).sum();
        assert!((total - 20.0).abs() < 1e-9);
        assert!("er,p=3,n=20,theta=1.5".parse::<ModelSpec>().is_err());
        assert!("xx,p=3".parse::<ModelSpec>().is_err());
        assert!("hsbm,p=2,n=10,lambda=0.5:0.5,theta=-0.1".parse::<ModelSpec>().is_err());
    }
}
