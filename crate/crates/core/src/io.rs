//! Text formats: tensor files, spin files, metadata sidecars and key-value
//! manifests.
//!
//! Tensor file: a header `p N family`, then for sparse tensors one line
//! `i1 i2 ... ip weight` per canonical edge with 1-based strictly increasing
//! indices. The `cw` family has no edge lines. Blank lines and lines starting
//! with `#` are ignored everywhere.

use serde_json::json;

use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};
use crate::spin::SpinConfig;
use crate::tensor::InteractionTensor;

/// Largest `N` accepted for sparse tensor files; the incidence index is
/// allocated per vertex before any edge is read.
pub const MAX_FILE_N: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTensor {
    pub tensor: InteractionTensor,
    pub family: String,
}

fn parse(line: usize, msg: &str) -> Error {
    Error::parse(line, msg)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_tensor(text: &str) -> Result<ParsedTensor> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse(hline, "header must be `p N family`"));
    }
    let p: usize = fields[0].parse().map_err(|_| parse(hline, "bad order p"))?;
    let n: usize = fields[1].parse().map_err(|_| parse(hline, "bad size N"))?;
    let family = fields[2].to_string();
    let is_cw = family.parse::<Family>().ok() == Some(Family::CurieWeiss);
    if is_cw {
        if let Some((l, _)) = lines.next() {
            return Err(parse(l, "curie-weiss tensors have no edge lines"));
        }
        let tensor = InteractionTensor::curie_weiss(p, n).map_err(|e| parse(hline, &e.to_string()))?;
        return Ok(ParsedTensor { tensor, family });
    }
    if p < 2 || n < p {
        return Err(parse(hline, "need 2 <= p <= N"));
    }
    if n > MAX_FILE_N {
        return Err(parse(hline, &format!("N = {n} exceeds the sparse file limit {MAX_FILE_N}")));
    }
    let mut verts = Vec::new();
    let mut weights = Vec::new();
    let mut edge = vec![0u32; p];
    for (l, line) in lines {
        let mut toks = line.split_whitespace();
        for slot in edge.iter_mut() {
            let tok = toks.next().ok_or_else(|| parse(l, "too few fields"))?;
            let v: u64 = tok.parse().map_err(|_| parse(l, "bad vertex index"))?;
            if v == 0 || v > n as u64 {
                return Err(parse(l, "vertex index outside 1..=N"));
            }
            *slot = (v - 1) as u32;
        }
        let w: f64 = toks.next().ok_or_else(|| parse(l, "missing weight"))?.parse().map_err(|_| parse(l, "bad weight"))?;
        if toks.next().is_some() {
            return Err(parse(l, "too many fields"));
        }
        if !w.is_finite() {
            return Err(parse(l, "weight must be finite"));
        }
        if edge.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse(l, "indices must be strictly increasing"));
        }
        verts.extend_from_slice(&edge);
        weights.push(w);
    }
    let edges: Vec<(Vec<u32>, f64)> = verts.chunks(p).map(|c| c.to_vec()).zip(weights).collect();
    let tensor = InteractionTensor::from_edges(p, n, edges)?;
    Ok(ParsedTensor { tensor, family })
}

pub fn write_tensor(tensor: &InteractionTensor, family: &str) -> String {
    let family = if tensor.is_curie_weiss() { "cw" } else { family };
    let mut out = format!("{} {} {}\n", tensor.order(), tensor.n(), family);
    for (e, w) in tensor.edges() {
        for v in e {
            out.push_str(&(v + 1).to_string());
            out.push(' ');
        }
        out.push_str(&w.to_string());
        out.push('\n');
    }
    out
}

/// One configuration of space-separated `±1` per line.
pub fn parse_spins(text: &str) -> Result<Vec<SpinConfig>> {
    let mut out: Vec<SpinConfig> = Vec::new();
    for (l, line) in content_lines(text) {
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| parse(l, &format!("bad spin '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        let x = SpinConfig::from_i64(&vals).map_err(|e| parse(l, &e.to_string()))?;
        if let Some(first) = out.first() {
            if first.n() != x.n() {
                return Err(parse(l, "configurations differ in length"));
            }
        }
        out.push(x);
    }
    if out.is_empty() {
        return Err(parse(1, "no configurations"));
    }
    Ok(out)
}

pub fn write_spins(xs: &[SpinConfig]) -> String {
    let mut out = String::new();
    for x in xs {
        out.push_str(&x.to_string());
        out.push('\n');
    }
    out
}

/// JSON metadata written next to a generated tensor file.
pub fn metadata_json(spec: &ModelSpec, tensor: &InteractionTensor) -> String {
    let v = json!({
        "family": spec.family.as_str(),
        "spec": spec.to_spec_string(),
        "p": tensor.order(),
        "n": tensor.n(),
        "seed": spec.seed,
        "theta": spec.theta,
        "lambda": spec.lambda,
        "block_theta": spec.block_theta.as_ref().map(|t| t.values().to_vec()),
        "parts": spec.parts,
        "scaling": match spec.scaling { crate::models::Scaling::Default => "default", crate::models::Scaling::EdgeCount => "ncount" },
        "storage": tensor.storage_name(),
        "num_edges": tensor.num_edges(),
    });
    serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
}

/// `key = value` lines in file order; keys must be unique.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (l, line) in content_lines(text) {
        let (k, v) = line.split_once('=').ok_or_else(|| parse(l, "expected `key = value`"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(parse(l, "bad key"));
        }
        if out.iter().any(|(q, _)| q == k) {
            return Err(parse(l, &format!("duplicate key '{k}'")));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_roundtrip() {
        let t = crate::models::sk(3, 7, 3).unwrap();
        let text = write_tensor(&t, "sk");
        let back = parse_tensor(&text).unwrap();
        assert_eq!(back.tensor, t);
        assert_eq!(back.family, "sk");
        assert_eq!(write_tensor(&back.tensor, "sk"), text);
    }

    #[test]
    fn cw_file() {
        let t = parse_tensor("# header\n3 5 cw\n").unwrap().tensor;
        assert!(t.is_curie_weiss());
        assert!(parse_tensor("3 5 cw\n1 2 3 0.5\n").is_err());
    }

    #[test]
    fn tensor_rejections() {
        assert!(parse_tensor("").is_err());
        assert!(parse_tensor("2 3 sparse\n2 1 1.0\n").is_err());
        assert!(parse_tensor("2 3 sparse\n1 4 1.0\n").is_err());
        assert!(parse_tensor("2 3 sparse\n1 2 nan\n").is_err());
        assert!(parse_tensor("2 3 sparse\n1 2 1.0\n1 2 2.0\n").is_err());
        assert!(parse_tensor("2 3 sparse\n1 2\n").is_err());
        assert!(parse_tensor("2 3 sparse\n0 2 1\n").is_err());
        assert!(parse_tensor("2 4000000000 sparse\n").is_err());
    }

    #[test]
    fn spins_roundtrip() {
        let xs = vec![SpinConfig::new(vec![1, -1, 1]).unwrap(), SpinConfig::new(vec![-1, -1, 1]).unwrap()];
        assert_eq!(parse_spins(&write_spins(&xs)).unwrap(), xs);
        assert!(parse_spins("1 0 1\n").is_err());
        assert!(parse_spins("1 1\n1 1 1\n").is_err());
    }

    #[test]
    fn key_values() {
        let kv = parse_key_values("# c\na = 1\nb= x y\n").unwrap();
        assert_eq!(kv, vec![("a".into(), "1".into()), ("b".into(), "x y".into())]);
        assert!(parse_key_values("a = 1\na = 2\n").is_err());
        assert!(parse_key_values("nokey\n").is_err());
    }
}
