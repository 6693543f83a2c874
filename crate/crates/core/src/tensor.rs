//! Symmetric interaction tensors.
//!
//! Sparse tensors store each unordered hyperedge once as a strictly increasing
//! index tuple `e` with weight `w_e`. The full tensor has `J = w_e` on every
//! permutation of `e` and zero on tuples with repeated indices, so sums over
//! ordered tuples pick up a `p!` (Hamiltonian), `(p-1)!` (local field) or
//! `(p-2)!` (local interaction matrix) multiplicity.
//!
//! The Curie-Weiss tensor `J = N^{1-p}` on *all* tuples, diagonals included,
//! is kept analytic: `H = N xbar^p` and `m_i = xbar^{p-1}`.

use crate::combinatorics::factorial;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::spin::SpinConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseEdges {
    /// Flattened vertex lists, `order` entries per edge, lexicographically sorted.
    vertices: Vec<u32>,
    weights: Vec<f64>,
    /// CSR incidence: edges containing vertex `v` are
    /// `incidence[offsets[v]..offsets[v + 1]]`.
    offsets: Vec<usize>,
    incidence: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Sparse(SparseEdges),
    CurieWeiss,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTensor {
    order: usize,
    n: usize,
    storage: Storage,
}

/// `J_N(x)`: the tensor contracted against `x` in all but two slots.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalInteractionMatrix {
    pub entries: SymMatrix,
    pub config_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoDegreeMatrix {
    pub entries: SymMatrix,
}

/// FNV-1a over the spin values; stable across runs and platforms.
pub fn config_hash(x: &SpinConfig) -> u64 {
    x.spins().iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &s| (h ^ (s as u8 as u64)).wrapping_mul(0x100_0000_01b3))
}

fn validate_dims(order: usize, n: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidTensor(format!("order p = {order} must be at least 2")));
    }
    if n < order {
        return Err(Error::InvalidTensor(format!("n = {n} must be at least p = {order}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidTensor(format!("n = {n} exceeds the supported vertex range")));
    }
    Ok(())
}

impl InteractionTensor {
    pub fn curie_weiss(order: usize, n: usize) -> Result<Self> {
        validate_dims(order, n)?;
        Ok(Self { order, n, storage: Storage::CurieWeiss })
    }

    pub fn empty(order: usize, n: usize) -> Result<Self> {
        Self::from_sorted_parts(order, n, Vec::new(), Vec::new())
    }

    /// Builds a sparse tensor from canonical edges in any order. Indices are
    /// 0-based; each edge must be strictly increasing and appear once.
    pub fn from_edges(order: usize, n: usize, mut edges: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        validate_dims(order, n)?;
        for (e, _) in &edges {
            if e.len() != order {
                return Err(Error::InvalidTensor(format!("edge {e:?} does not have {order} vertices")));
            }
        }
        edges.sort_by(|a, b| a.0.cmp(&b.0));
        let mut vertices = Vec::with_capacity(edges.len() * order);
        let mut weights = Vec::with_capacity(edges.len());
        for (e, w) in edges {
            vertices.extend_from_slice(&e);
            weights.push(w);
        }
        Self::from_sorted_parts(order, n, vertices, weights)
    }

    /// Builds a sparse tensor from flattened, lexicographically sorted edges.
    pub fn from_sorted_parts(order: usize, n: usize, vertices: Vec<u32>, weights: Vec<f64>) -> Result<Self> {
        validate_dims(order, n)?;
        if vertices.len() != weights.len() * order {
            return Err(Error::InvalidTensor("vertex list length does not match edge count".into()));
        }
        let mut prev: Option<&[u32]> = None;
        for (k, e) in vertices.chunks_exact(order).enumerate() {
            if !weights[k].is_finite() {
                return Err(Error::InvalidTensor(format!("edge {e:?} has non-finite weight")));
            }
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidTensor(format!("edge {e:?} is not strictly increasing")));
            }
            if e[order - 1] as usize >= n {
                return Err(Error::InvalidTensor(format!("edge {e:?} has a vertex outside 0..{n}")));
            }
            if let Some(p) = prev {
                if p >= e {
                    return Err(Error::InvalidTensor(format!("edge {e:?} is duplicated or out of order")));
                }
            }
            prev = Some(e);
        }
        let mut counts = vec![0usize; n + 1];
        for &v in &vertices {
            counts[v as usize + 1] += 1;
        }
        for v in 0..n {
            counts[v + 1] += counts[v];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut incidence = vec![0u32; vertices.len()];
        for (k, e) in vertices.chunks_exact(order).enumerate() {
            for &v in e {
                incidence[fill[v as usize]] = k as u32;
                fill[v as usize] += 1;
            }
        }
        Ok(Self { order, n, storage: Storage::Sparse(SparseEdges { vertices, weights, offsets, incidence }) })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_curie_weiss(&self) -> bool {
        matches!(self.storage, Storage::CurieWeiss)
    }

    pub fn includes_diagonal(&self) -> bool {
        self.is_curie_weiss()
    }

    pub fn storage_name(&self) -> &'static str {
        match self.storage {
            Storage::Sparse(_) => "sparse",
            Storage::CurieWeiss => "curie-weiss",
        }
    }

    fn sparse(&self) -> Option<&SparseEdges> {
        match &self.storage {
            Storage::Sparse(s) => Some(s),
            Storage::CurieWeiss => None,
        }
    }

    /// Number of stored canonical edges (0 for the analytic Curie-Weiss tensor).
    pub fn num_edges(&self) -> usize {
        self.sparse().map_or(0, |s| s.weights.len())
    }

    pub fn edge(&self, k: usize) -> (&[u32], f64) {
        let s = self.sparse().expect("edge access on sparse storage");
        (&s.vertices[k * self.order..(k + 1) * self.order], s.weights[k])
    }

    pub fn edges(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        let (verts, weights): (&[u32], &[f64]) = match self.sparse() {
            Some(s) => (&s.vertices, &s.weights),
            None => (&[], &[]),
        };
        verts.chunks_exact(self.order).zip(weights.iter().copied())
    }

    /// Canonical edges containing vertex `v`.
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        match self.sparse() {
            Some(s) => &s.incidence[s.offsets[v]..s.offsets[v + 1]],
            None => &[],
        }
    }

    /// Returns a copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match &self.storage {
            Storage::CurieWeiss => Err(Error::UnsupportedStorage { storage: "curie-weiss", what: "rescaling" }),
            Storage::Sparse(s) => {
                let mut out = s.clone();
                out.weights.iter_mut().for_each(|w| *w *= factor);
                Ok(Self { order: self.order, n: self.n, storage: Storage::Sparse(out) })
            }
        }
    }

    fn check(&self, x: &SpinConfig) -> Result<()> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.n() });
        }
        Ok(())
    }

    /// `H_N(x)`, the sum over ordered index tuples.
    pub fn hamiltonian(&self, x: &SpinConfig) -> Result<f64> {
        self.check(x)?;
        Ok(match &self.storage {
            Storage::CurieWeiss => self.n as f64 * x.mean().powi(self.order as i32),
            Storage::Sparse(_) => {
                let s = x.spins();
                let sum: f64 = self
                    .edges()
                    .map(|(e, w)| {
                        let sign: i8 = e.iter().map(|&v| s[v as usize]).product();
                        w * sign as f64
                    })
                    .sum();
                factorial(self.order) * sum
            }
        })
    }

    /// `m_i(x) = sum J_{i i2..ip} x_{i2}..x_{ip}` for a 0-based site `i`.
    pub fn local_field(&self, x: &SpinConfig, i: usize) -> Result<f64> {
        self.check(x)?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(self.local_field_unchecked(x.spins(), i))
    }

    pub(crate) fn local_field_unchecked(&self, s: &[i8], i: usize) -> f64 {
        match &self.storage {
            Storage::CurieWeiss => {
                let mean = s.iter().map(|&v| v as i64).sum::<i64>() as f64 / self.n as f64;
                mean.powi(self.order as i32 - 1)
            }
            Storage::Sparse(_) => {
                let sum: f64 = self
                    .incident_edges(i)
                    .iter()
                    .map(|&k| {
                        let (e, w) = self.edge(k as usize);
                        let sign: i8 = e.iter().filter(|&&v| v as usize != i).map(|&v| s[v as usize]).product();
                        w * sign as f64
                    })
                    .sum();
                factorial(self.order - 1) * sum
            }
        }
    }

    /// All local fields in one pass over the edges.
    pub fn all_local_fields(&self, x: &SpinConfig) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(self.all_local_fields_unchecked(x.spins()))
    }

    pub(crate) fn all_local_fields_unchecked(&self, s: &[i8]) -> Vec<f64> {
        match &self.storage {
            Storage::CurieWeiss => {
                let mean = s.iter().map(|&v| v as i64).sum::<i64>() as f64 / self.n as f64;
                vec![mean.powi(self.order as i32 - 1); self.n]
            }
            Storage::Sparse(_) => {
                let mut m = vec![0.0; self.n];
                for (e, w) in self.edges() {
                    let sign: i8 = e.iter().map(|&v| s[v as usize]).product();
                    let ws = w * sign as f64;
                    // x_v^2 = 1, so the product over e \ {v} is sign * x_v
                    for &v in e {
                        m[v as usize] += ws * s[v as usize] as f64;
                    }
                }
                let c = factorial(self.order - 1);
                m.iter_mut().for_each(|v| *v *= c);
                m
            }
        }
    }

    /// `J_N(x)` with entries `sum_{i3..ip} J_{i1 i2 i3..ip} x_{i3}..x_{ip}`.
    pub fn local_interaction_matrix(&self, x: &SpinConfig) -> Result<LocalInteractionMatrix> {
        self.check(x)?;
        let n = self.n;
        let p = self.order;
        let s = x.spins();
        let entries = match &self.storage {
            Storage::CurieWeiss => {
                let total = x.sum() as f64;
                let v = (self.n as f64).powi(1 - p as i32) * total.powi(p as i32 - 2);
                SymMatrix::from_fn(n, |_, _| v)
            }
            Storage::Sparse(_) => {
                let mut m = SymMatrix::zeros(n);
                let c = factorial(p - 2);
                for (e, w) in self.edges() {
                    let sign: i8 = e.iter().map(|&v| s[v as usize]).product();
                    for (a, &va) in e.iter().enumerate() {
                        for &vb in &e[a + 1..] {
                            let rest = sign * s[va as usize] * s[vb as usize];
                            let val = c * w * rest as f64;
                            m.add(va as usize, vb as usize, val);
                            m.add(vb as usize, va as usize, val);
                        }
                    }
                }
                m
            }
        };
        Ok(LocalInteractionMatrix { entries, config_hash: config_hash(x) })
    }

    /// Weighted co-degrees `d(i1,i2) = (1/(p-2)!) sum |J_{i1 i2 ..}|`.
    pub fn codegree_matrix(&self) -> Result<CoDegreeMatrix> {
        if self.order < 2 {
            return Err(Error::InvalidTensor("co-degree requires p >= 2".into()));
        }
        if self.is_curie_weiss() {
            return Err(Error::UnsupportedStorage { storage: "curie-weiss", what: "co-degree matrix" });
        }
        let mut m = SymMatrix::zeros(self.n);
        for (e, w) in self.edges() {
            for (a, &va) in e.iter().enumerate() {
                for &vb in &e[a + 1..] {
                    m.add(va as usize, vb as usize, w.abs());
                    m.add(vb as usize, va as usize, w.abs());
                }
            }
        }
        Ok(CoDegreeMatrix { entries: m })
    }

    /// Weighted degrees `d(i) = (1/(p-1)!) sum |J_{i ..}|`.
    pub fn degrees(&self) -> Result<Vec<f64>> {
        if self.is_curie_weiss() {
            return Err(Error::UnsupportedStorage { storage: "curie-weiss", what: "degrees" });
        }
        let mut d = vec![0.0; self.n];
        for (e, w) in self.edges() {
            for &v in e {
                d[v as usize] += w.abs();
            }
        }
        Ok(d)
    }
}

impl InteractionTensor {
    /// Flips site `i` of a sparse configuration, updating the cached local
    /// fields of its neighbours, and returns the change in `H`.
    pub(crate) fn apply_flip(&self, s: &mut [i8], fields: &mut [f64], i: usize) -> f64 {
        let scale = factorial(self.order - 1);
        let delta_h = -2.0 * self.order as f64 * s[i] as f64 * fields[i];
        for &k in self.incident_edges(i) {
            let (e, w) = self.edge(k as usize);
            let sign: i8 = e.iter().map(|&v| s[v as usize]).product();
            let term = 2.0 * scale * w * sign as f64;
            for &v in e {
                let v = v as usize;
                if v != i {
                    fields[v] -= term * s[v] as f64;
                }
            }
        }
        s[i] = -s[i];
        delta_h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: &[i64]) -> SpinConfig {
        SpinConfig::from_i64(v).unwrap()
    }

    #[test]
    fn curie_weiss_closed_forms() {
        let t = InteractionTensor::curie_weiss(3, 4).unwrap();
        assert_eq!(t.hamiltonian(&x(&[1, 1, 1, 1])).unwrap(), 4.0);
        let t4 = InteractionTensor::curie_weiss(4, 10).unwrap();
        let cfg = x(&[1, 1, 1, 1, 1, 1, -1, -1, -1, -1]);
        for i in 0..10 {
            assert!((t4.local_field(&cfg, i).unwrap() - 0.008).abs() < 1e-15);
        }
        assert!(t4.all_local_fields(&cfg).unwrap().iter().all(|&m| (m - 0.008).abs() < 1e-15));
    }

    #[test]
    fn single_pair_edge() {
        let t = InteractionTensor::from_edges(2, 2, vec![(vec![0, 1], 1.0)]).unwrap();
        let cfg = x(&[1, -1]);
        assert_eq!(t.hamiltonian(&cfg).unwrap(), -2.0);
        assert_eq!(t.local_field(&cfg, 0).unwrap(), -1.0);
        assert_eq!(t.local_field(&cfg, 1).unwrap(), 1.0);
    }

    #[test]
    fn codegree_single_triangle() {
        let t = InteractionTensor::from_edges(3, 3, vec![(vec![0, 1, 2], 1.0)]).unwrap();
        let d = t.codegree_matrix().unwrap();
        assert_eq!(d.entries.get(0, 1), 1.0);
        assert_eq!(d.entries.get(0, 0), 0.0);
        assert_eq!(t.degrees().unwrap(), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn codegree_disjoint_edges_and_empty() {
        let t = InteractionTensor::from_edges(2, 4, vec![(vec![0, 1], 2.0), (vec![2, 3], -3.0)]).unwrap();
        let d = t.codegree_matrix().unwrap();
        assert_eq!(d.entries.get(0, 2), 0.0);
        assert_eq!(d.entries.get(2, 3), 3.0);
        let e = InteractionTensor::empty(3, 5).unwrap();
        assert!(e.codegree_matrix().unwrap().entries.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(e.all_local_fields(&SpinConfig::all_up(5)).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn curie_weiss_rejects_codegree() {
        let t = InteractionTensor::curie_weiss(3, 5).unwrap();
        assert!(matches!(t.codegree_matrix(), Err(Error::UnsupportedStorage { .. })));
    }

    #[test]
    fn invalid_edges_rejected() {
        assert!(InteractionTensor::from_edges(3, 5, vec![(vec![0, 2, 1], 1.0)]).is_err());
        assert!(InteractionTensor::from_edges(3, 5, vec![(vec![0, 1, 5], 1.0)]).is_err());
        assert!(InteractionTensor::from_edges(2, 5, vec![(vec![0, 1], 1.0), (vec![0, 1], 2.0)]).is_err());
        assert!(InteractionTensor::from_edges(2, 5, vec![(vec![0, 1], f64::NAN)]).is_err());
        assert!(InteractionTensor::curie_weiss(3, 2).is_err());
    }

    #[test]
    fn errors_on_mismatch_and_range() {
        let t = InteractionTensor::curie_weiss(2, 3).unwrap();
        assert!(matches!(t.hamiltonian(&SpinConfig::all_up(4)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(t.local_field(&SpinConfig::all_up(3), 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn curie_weiss_local_interaction_matrix() {
        let t = InteractionTensor::curie_weiss(3, 5).unwrap();
        let cfg = x(&[1, 1, 1, -1, 1]);
        let j = t.local_interaction_matrix(&cfg).unwrap();
        for i in 0..5 {
            for k in 0..5 {
                assert!((j.entries.get(i, k) - 3.0 / 25.0).abs() < 1e-15);
            }
        }
    }
}
