//! Occupancy tables `X(n, d, w1, w2)` and `Y(n, d1, d2)`, degree histograms
//! and empirical CCDFs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{GraphState, ModelParams};

/// `(d, w1, w2)`.
pub type XCell = (u64, u64, u64);
/// `(d1, d2)`.
pub type YCell = (u64, u64);

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub params: ModelParams,
    pub n: u64,
    pub vertex_count: u64,
    pub x: BTreeMap<XCell, u64>,
    pub y: BTreeMap<YCell, u64>,
    /// Dense histogram indexed by in-degree `d1`.
    pub in_degree: Vec<u64>,
    /// Dense histogram indexed by out-degree `d2`.
    pub out_degree: Vec<u64>,
}

/// Recounts every table from the vertex records.
pub fn tally(state: &GraphState) -> Snapshot {
    let params = *state.params();
    let mut x = BTreeMap::new();
    let mut y = BTreeMap::new();
    let mut in_degree = Vec::new();
    let mut out_degree = Vec::new();
    for v in state.vertices() {
        let d1 = v.in_degree(params.star_size);
        let d2 = v.out_degree();
        *x.entry((v.degree(), v.w1, v.w2)).or_insert(0) += 1;
        *y.entry((d1, d2)).or_insert(0) += 1;
        bump(&mut in_degree, d1);
        bump(&mut out_degree, d2);
    }
    Snapshot {
        params,
        n: state.steps(),
        vertex_count: state.vertex_count() as u64,
        x,
        y,
        in_degree,
        out_degree,
    }
}

fn bump(hist: &mut Vec<u64>, value: u64) {
    let i = value as usize;
    if hist.len() <= i {
        hist.resize(i + 1, 0);
    }
    hist[i] += 1;
}

impl Snapshot {
    pub fn x_count(&self, d: u64, w1: u64, w2: u64) -> u64 {
        self.x.get(&(d, w1, w2)).copied().unwrap_or(0)
    }

    pub fn y_count(&self, d1: u64, d2: u64) -> u64 {
        self.y.get(&(d1, d2)).copied().unwrap_or(0)
    }

    /// `X(n, d, w1, w2) / V_n`.
    pub fn x_ratio(&self, d: u64, w1: u64, w2: u64) -> f64 {
        self.x_count(d, w1, w2) as f64 / self.vertex_count as f64
    }

    /// `Y(n, d1, d2) / V_n`.
    pub fn y_ratio(&self, d1: u64, d2: u64) -> f64 {
        self.y_count(d1, d2) as f64 / self.vertex_count as f64
    }

    pub fn x_ratios(&self) -> BTreeMap<XCell, f64> {
        let v = self.vertex_count as f64;
        self.x.iter().map(|(&k, &c)| (k, c as f64 / v)).collect()
    }

    pub fn y_ratios(&self) -> BTreeMap<YCell, f64> {
        let v = self.vertex_count as f64;
        self.y.iter().map(|(&k, &c)| (k, c as f64 / v)).collect()
    }

    pub fn in_degree_ccdf(&self) -> Result<Vec<(u64, f64)>> {
        ccdf(&self.in_degree)
    }

    pub fn out_degree_ccdf(&self) -> Result<Vec<(u64, f64)>> {
        ccdf(&self.out_degree)
    }

    /// Hex SHA-256 of the canonical text form of the snapshot.
    pub fn digest(&self) -> String {
        let mut text = String::new();
        let p = &self.params;
        let _ = writeln!(text, "{} {} {} {}", p.p, p.q, p.r, p.star_size);
        let _ = writeln!(text, "{} {}", self.n, self.vertex_count);
        for ((d, w1, w2), c) in &self.x {
            let _ = writeln!(text, "x {d} {w1} {w2} {c}");
        }
        for ((d1, d2), c) in &self.y {
            let _ = writeln!(text, "y {d1} {d2} {c}");
        }
        Sha256::digest(text.as_bytes())
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }
}

/// Empirical `P(X >= k)` at every occupied value `k` of a dense histogram.
pub fn ccdf(histogram: &[u64]) -> Result<Vec<(u64, f64)>> {
    let total: u64 = histogram.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput("histogram"));
    }
    let mut points = Vec::new();
    let mut tail = 0u64;
    for (value, &count) in histogram.iter().enumerate().rev() {
        if count == 0 {
            continue;
        }
        tail += count;
        points.push((value as u64, tail as f64 / total as f64));
    }
    points.reverse();
    Ok(points)
}

/// Replica-averaged ratio tables.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMean {
    pub n: u64,
    pub replicas: usize,
    pub mean_vertex_count: f64,
    pub x: BTreeMap<XCell, f64>,
    pub y: BTreeMap<YCell, f64>,
}

/// Averages `X / V_n` and `Y / V_n` over snapshots taken at the same `n`.
/// Cells missing from a replica count as zero.
pub fn ensemble_mean(snapshots: &[Snapshot]) -> Result<EnsembleMean> {
    let first = snapshots
        .first()
        .ok_or(Error::EmptyInput("ensemble snapshots"))?;
    if snapshots.iter().any(|s| s.n != first.n) {
        return Err(Error::Config(
            "ensemble snapshots taken at different n".into(),
        ));
    }
    let k = snapshots.len() as f64;
    let mut x: BTreeMap<XCell, f64> = BTreeMap::new();
    let mut y: BTreeMap<YCell, f64> = BTreeMap::new();
    for s in snapshots {
        for (cell, r) in s.x_ratios() {
            *x.entry(cell).or_insert(0.0) += r / k;
        }
        for (cell, r) in s.y_ratios() {
            *y.entry(cell).or_insert(0.0) += r / k;
        }
    }
    Ok(EnsembleMean {
        n: first.n,
        replicas: snapshots.len(),
        mean_vertex_count: snapshots.iter().map(|s| s.vertex_count as f64).sum::<f64>() / k,
        x,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GraphState;

    fn initial(n: usize) -> Snapshot {
        let params = ModelParams::new(0.5, 0.5, 0.5, n).unwrap();
        tally(&GraphState::new(params, 1).unwrap())
    }

    #[test]
    fn initial_tables() {
        let s = initial(4);
        assert_eq!(s.x_count(3, 1, 0), 1);
        assert_eq!(s.x_count(1, 0, 1), 3);
        assert_eq!(s.y_count(3, 0), 1);
        assert_eq!(s.y_count(0, 1), 3);
        assert_eq!(s.x.len(), 2);
        assert_eq!(s.in_degree, vec![3, 0, 0, 1]);
        assert_eq!(s.out_degree, vec![1, 3]);
    }

    #[test]
    fn ratios_partition_vertices() {
        let params = ModelParams::new(0.4, 0.6, 0.3, 5).unwrap();
        let mut g = GraphState::new(params, 8).unwrap();
        for _ in 0..3_000 {
            g.step().unwrap();
        }
        let s = tally(&g);
        let total: f64 = s.x_ratios().values().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(s.x.values().sum::<u64>(), s.vertex_count);
        assert_eq!(s.y.values().sum::<u64>(), s.vertex_count);
    }

    #[test]
    fn y_is_w_marginal_of_x() {
        let params = ModelParams::new(0.5, 0.5, 0.5, 4).unwrap();
        let mut g = GraphState::new(params, 3).unwrap();
        for _ in 0..5_000 {
            g.step().unwrap();
        }
        let s = tally(&g);
        let mut marginal: BTreeMap<YCell, u64> = BTreeMap::new();
        for (&(_, w1, w2), &c) in &s.x {
            *marginal.entry((3 * w1, w2)).or_insert(0) += c;
        }
        assert_eq!(marginal, s.y);
        assert!(s.y.keys().all(|&(d1, _)| d1 % 3 == 0));
    }

    #[test]
    fn ccdf_small_histogram() {
        let pts = ccdf(&[0, 3, 0, 1]).unwrap();
        assert_eq!(pts, vec![(1, 1.0), (3, 0.25)]);
        assert_eq!(ccdf(&[0, 0, 5]).unwrap(), vec![(2, 1.0)]);
        assert!(matches!(ccdf(&[]), Err(Error::EmptyInput(_))));
        assert!(ccdf(&[0, 0]).is_err());
    }

    #[test]
    fn ccdf_is_monotone_and_bounded() {
        let s = initial(4);
        let mut g = GraphState::new(s.params, 4).unwrap();
        for _ in 0..2_000 {
            g.step().unwrap();
        }
        let pts = tally(&g).out_degree_ccdf().unwrap();
        assert_eq!(pts[0].1, 1.0);
        assert!(pts.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 >= w[1].1));
        assert!(pts.iter().all(|&(_, p)| p > 0.0 && p <= 1.0));
    }

    #[test]
    fn ensemble_of_identical_snapshots() {
        let s = initial(4);
        let mean = ensemble_mean(&[s.clone(), s.clone()]).unwrap();
        assert_eq!(mean.replicas, 2);
        assert!((mean.x[&(3, 1, 0)] - 0.25).abs() < 1e-15);
        assert!((mean.mean_vertex_count - 4.0).abs() < 1e-15);
        assert!(ensemble_mean(&[]).is_err());
    }
}
