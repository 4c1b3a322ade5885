//! Exactness and convergence oracles.
//!
//! Two independent descriptions of the one-step kernel are kept side by
//! side: [`enumerate_one_step`] materializes the joint distribution of a
//! step by walking every branch and every choice, and
//! [`vertex_event_probs`] evaluates the per-vertex event probabilities in
//! closed form. Their per-vertex marginals must agree to rounding; the
//! simulator is then checked against the enumeration by Monte-Carlo
//! ([`mc_step_check`]).

use std::collections::HashMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{degree_admissible, Branch, GraphState, StarKey, VertexId};
use crate::rng::{derive_seed, rng_from_seed};
use crate::special::binomial;
use crate::stats::Snapshot;
use crate::theory::{y_limit, DerivedParams, TheoryTables};

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1_000_000;

/// Outcome identity: the same star reached through different branches
/// counts as different outcomes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeKey {
    pub branch: Branch,
    pub star: StarKey,
}

#[derive(Clone, Debug, Default)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<(OutcomeKey, f64)>,
}

impl OutcomeDistribution {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    pub fn probability(&self, key: &OutcomeKey) -> f64 {
        self.outcomes
            .iter()
            .find(|(k, _)| k == key)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn branch_mass(&self, branch: Branch) -> f64 {
        self.outcomes
            .iter()
            .filter(|(k, _)| k.branch == branch)
            .map(|(_, p)| p)
            .sum()
    }

    /// Aggregates the joint distribution into per-vertex event
    /// probabilities for every vertex of `state`.
    pub fn vertex_marginals(&self, state: &GraphState) -> Vec<EventProbVector> {
        let big_n = state.params().star_size;
        let mut out: Vec<EventProbVector> = (0..state.vertex_count())
            .map(|_| EventProbVector::zeros(big_n))
            .collect();
        for (key, prob) in &self.outcomes {
            for (v, delta_d, is_center) in outcome_deltas(state, &key.star) {
                if let Some(entry) = out.get_mut(v as usize) {
                    *entry.slot_mut(EventKind::classify(delta_d, is_center, big_n)) += prob;
                }
            }
        }
        for (v, entry) in out.iter_mut().enumerate() {
            let participating: f64 = self
                .outcomes
                .iter()
                .filter(|(k, _)| k.star.contains(v as VertexId))
                .map(|(_, p)| p)
                .sum();
            entry.no_change = self.total() - participating;
        }
        out
    }
}

/// Old vertices touched by activating `star` on `state`, with their degree
/// change and role. A star member beyond the current vertex range is the
/// vertex an Option-I step would create and is skipped.
fn outcome_deltas(state: &GraphState, star: &StarKey) -> Vec<(VertexId, u64, bool)> {
    let v_count = state.vertex_count() as VertexId;
    let center = star.center();
    let mut out = Vec::with_capacity(star.order());
    let center_rec = state.vertex(center);
    if let Some(c) = center_rec {
        let fresh = star
            .peripherals()
            .iter()
            .filter(|&&p| !c.is_neighbor(p))
            .count() as u64;
        out.push((center, fresh, true));
    }
    for &p in star.peripherals() {
        if p >= v_count {
            continue;
        }
        let linked = center_rec.is_some_and(|c| c.is_neighbor(p));
        out.push((p, u64::from(!linked), false));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    NoChange,
    CenterSame,
    PeripheralSame,
    CenterPlusOne,
    PeripheralPlusOne,
    /// Degree grows by `m` with `2 <= m <= N-2` while central.
    CenterPlus(u64),
    CenterPlusAll,
}

impl EventKind {
    pub fn classify(delta_d: u64, is_center: bool, star_size: usize) -> Self {
        let full = star_size as u64 - 1;
        match (is_center, delta_d) {
            (false, 0) => EventKind::PeripheralSame,
            (false, _) => EventKind::PeripheralPlusOne,
            (true, 0) => EventKind::CenterSame,
            (true, 1) => EventKind::CenterPlusOne,
            (true, m) if m == full => EventKind::CenterPlusAll,
            (true, m) => EventKind::CenterPlus(m),
        }
    }
}

/// Probabilities of the per-vertex events of one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventProbVector {
    pub no_change: f64,
    /// `Δd = 0, Δw1 = 1`
    pub center_same: f64,
    /// `Δd = 0, Δw2 = 1`
    pub peripheral_same: f64,
    /// `Δd = 1, Δw1 = 1`
    pub center_plus_one: f64,
    /// `Δd = 1, Δw2 = 1`
    pub peripheral_plus_one: f64,
    /// `Δd = m, Δw1 = 1` for `m = 2..=N-2`, stored at index `m - 2`.
    pub center_plus: Vec<f64>,
    /// `Δd = N-1, Δw1 = 1`
    pub center_plus_all: f64,
}

impl EventProbVector {
    fn zeros(star_size: usize) -> Self {
        Self {
            no_change: 0.0,
            center_same: 0.0,
            peripheral_same: 0.0,
            center_plus_one: 0.0,
            peripheral_plus_one: 0.0,
            center_plus: vec![0.0; star_size.saturating_sub(3)],
            center_plus_all: 0.0,
        }
    }

    fn slot_mut(&mut self, kind: EventKind) -> &mut f64 {
        match kind {
            EventKind::NoChange => &mut self.no_change,
            EventKind::CenterSame => &mut self.center_same,
            EventKind::PeripheralSame => &mut self.peripheral_same,
            EventKind::CenterPlusOne => &mut self.center_plus_one,
            EventKind::PeripheralPlusOne => &mut self.peripheral_plus_one,
            EventKind::CenterPlus(m) => &mut self.center_plus[m as usize - 2],
            EventKind::CenterPlusAll => &mut self.center_plus_all,
        }
    }

    fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        [
            self.no_change,
            self.center_same,
            self.peripheral_same,
            self.center_plus_one,
            self.peripheral_plus_one,
        ]
        .into_iter()
        .chain(self.center_plus.iter().copied())
        .chain(std::iter::once(self.center_plus_all))
    }

    pub fn sum(&self) -> f64 {
        self.entries().sum()
    }

    /// Probability that the vertex takes part in the step.
    pub fn participation(&self) -> f64 {
        self.entries().skip(1).sum()
    }

    pub fn max_abs_diff(&self, other: &EventProbVector) -> f64 {
        self.entries()
            .zip(other.entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form event probabilities for an old vertex with degree `d` and
/// weights `(w1, w2)` at step `n`, when `v_prev` vertices exist before it.
pub fn vertex_event_probs(
    derived: &DerivedParams,
    n: u64,
    v_prev: u64,
    d: u64,
    w1: u64,
    w2: u64,
) -> Result<EventProbVector> {
    let big_n = derived.star_size as u64;
    if n == 0 {
        return Err(Error::IndexDomain("step index n starts at 1".into()));
    }
    if v_prev < big_n {
        return Err(Error::IndexDomain(format!(
            "V_(n-1) = {v_prev} is below N = {big_n}"
        )));
    }
    if !degree_admissible(big_n, d, w1, w2) || d >= v_prev {
        return Err(Error::InadmissibleState { d, w1, w2 });
    }
    let DerivedParams { p, q, r, .. } = *derived;
    let (nf, vf) = (n as f64, v_prev as f64);
    let (w1f, w2f, df) = (w1 as f64, w2 as f64, d as f64);
    let nm1 = big_n as f64 - 1.0;
    let uniform_ii = (1.0 - p) * (1.0 - q);
    // every uniform-team probability shares the factor 1 / (N C(V, N))
    let team = 1.0 / (big_n as f64 * binomial(v_prev, big_n));
    let others = v_prev - d - 1;

    let participation =
        derived.alpha1 * w1f / nf + derived.alpha2 * w2f / nf + derived.beta * p / vf;

    let center_plus = (2..=big_n.saturating_sub(2))
        .map(|m| uniform_ii * binomial(others, m) * binomial(d, big_n - 1 - m) * team)
        .collect();

    Ok(EventProbVector {
        no_change: 1.0 - participation,
        center_same: (1.0 - p) * (q * w1f / nf + (1.0 - q) * binomial(d, big_n - 1) * team),
        peripheral_same: p * r * w2f * (nm1 - 1.0) / (nf * nm1)
            + (1.0 - p) * q * w2f / nf
            + uniform_ii * df * binomial(v_prev - 2, big_n - 2) * team,
        center_plus_one: p * r * w1f / nf
            + uniform_ii * binomial(d, big_n - 2) * others as f64 * team,
        peripheral_plus_one: p * (1.0 - r) * nm1 / vf
            + uniform_ii * others as f64 * binomial(v_prev - 2, big_n - 2) * team,
        center_plus,
        center_plus_all: uniform_ii * binomial(others, big_n - 1) * team,
    })
}

/// Exact joint distribution of the next step from `state`.
pub fn enumerate_one_step(state: &GraphState, limit: u64) -> Result<OutcomeDistribution> {
    let params = *state.params();
    let big_n = params.star_size;
    let v = state.vertex_count();
    let count = binomial(v as u64, big_n as u64 - 1).max(binomial(v as u64, big_n as u64));
    if count > limit as f64 {
        return Err(Error::EnumerationLimit { count, limit });
    }
    let new_id = v as VertexId;
    let mut outcomes = Vec::new();

    let pr = params.p * params.r;
    if pr > 0.0 {
        let total = state.n1stars().total_weight() as f64;
        for (key, weight) in state.n1stars().iter() {
            let mut peripherals = key.peripherals().to_vec();
            peripherals.push(new_id);
            let star = StarKey::new(key.center(), peripherals)?;
            outcomes.push((
                OutcomeKey {
                    branch: Branch::I1,
                    star,
                },
                pr * weight as f64 / total,
            ));
        }
    }

    let p_new_center = params.p * (1.0 - params.r);
    if p_new_center > 0.0 {
        let each = p_new_center / binomial(v as u64, big_n as u64 - 1);
        for team in (0..new_id).combinations(big_n - 1) {
            outcomes.push((
                OutcomeKey {
                    branch: Branch::I2,
                    star: StarKey::new(new_id, team)?,
                },
                each,
            ));
        }
    }

    let p_again = (1.0 - params.p) * params.q;
    if p_again > 0.0 {
        let total = state.nstars().total_weight() as f64;
        for (star, weight) in state.nstars().iter() {
            outcomes.push((
                OutcomeKey {
                    branch: Branch::II1,
                    star,
                },
                p_again * weight as f64 / total,
            ));
        }
    }

    let p_team = (1.0 - params.p) * (1.0 - params.q);
    if p_team > 0.0 {
        let each = p_team / (binomial(v as u64, big_n as u64) * big_n as f64);
        for team in (0..new_id).combinations(big_n) {
            for (i, &center) in team.iter().enumerate() {
                let peripherals = team
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &u)| u)
                    .collect();
                outcomes.push((
                    OutcomeKey {
                        branch: Branch::II2,
                        star: StarKey::new(center, peripherals)?,
                    },
                    each,
                ));
            }
        }
    }
    Ok(OutcomeDistribution { outcomes })
}

/// Largest disagreement between the enumerated per-vertex marginals and the
/// closed-form event probabilities, over all vertices of `state`.
pub fn kernel_agreement(state: &GraphState, derived: &DerivedParams, limit: u64) -> Result<f64> {
    let dist = enumerate_one_step(state, limit)?;
    let marginals = dist.vertex_marginals(state);
    let n = state.steps() + 1;
    let v_prev = state.vertex_count() as u64;
    let mut worst: f64 = 0.0;
    for (rec, enumerated) in state.vertices().iter().zip(&marginals) {
        let closed = vertex_event_probs(derived, n, v_prev, rec.degree(), rec.w1, rec.w2)?;
        worst = worst.max(closed.max_abs_diff(enumerated));
    }
    Ok(worst)
}

const MC_CHUNK: u64 = 10_000;

/// Total-variation distance between `trials` simulated single steps from
/// `state` and the enumerated kernel. Zero trials give distance 1.
pub fn mc_step_check(state: &GraphState, trials: u64, seed: u64) -> Result<f64> {
    let dist = enumerate_one_step(state, DEFAULT_ENUMERATION_LIMIT)?;
    if trials == 0 {
        return Ok(1.0);
    }
    let chunks = trials.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<HashMap<OutcomeKey, u64>> {
            let mut rng = rng_from_seed(derive_seed(seed, chunk));
            let size = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            let mut counts = HashMap::new();
            for _ in 0..size {
                let mut copy = state.clone();
                copy.replace_rng(rng);
                let outcome = copy.step()?;
                rng = copy.replace_rng(rng_from_seed(0));
                *counts
                    .entry(OutcomeKey {
                        branch: outcome.branch,
                        star: outcome.star,
                    })
                    .or_insert(0) += 1;
            }
            Ok(counts)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, c) in b {
                *a.entry(k).or_insert(0) += c;
            }
            Ok(a)
        })?;

    let total = trials as f64;
    let mut tv = 0.0;
    for (key, p) in &dist.outcomes {
        let freq = counts.get(key).copied().unwrap_or(0) as f64 / total;
        tv += (freq - p).abs();
    }
    for (key, &c) in &counts {
        if dist.probability(key) == 0.0 {
            tv += c as f64 / total;
        }
    }
    Ok(tv / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "table")]
pub enum Cell {
    X { d: u64, w1: u64, w2: u64 },
    Y { d1: u64, d2: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellComparison {
    pub cell: Cell,
    pub empirical: f64,
    pub theoretical: f64,
    pub abs_error: f64,
    /// `None` when the limit is zero.
    pub rel_error: Option<f64>,
}

/// Empirical ratios of `snapshot` against the limits in `tables`.
pub fn compare_sim_theory(
    snapshot: &Snapshot,
    tables: &TheoryTables,
    cells: &[Cell],
) -> Result<Vec<CellComparison>> {
    if snapshot.params != tables.derived.model_params() {
        return Err(Error::ParamMismatch(format!(
            "snapshot {:?} vs tables {:?}",
            snapshot.params,
            tables.derived.model_params()
        )));
    }
    cells
        .iter()
        .map(|&cell| {
            let (empirical, theoretical) = match cell {
                Cell::X { d, w1, w2 } => (
                    snapshot.x_ratio(d, w1, w2),
                    tables.x3.get(d as usize, w1 as usize, w2 as usize)?,
                ),
                Cell::Y { d1, d2 } => (snapshot.y_ratio(d1, d2), y_limit(tables, d1, d2)?),
            };
            let abs_error = (empirical - theoretical).abs();
            Ok(CellComparison {
                cell,
                empirical,
                theoretical,
                abs_error,
                rel_error: (theoretical != 0.0).then(|| abs_error / theoretical),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(ln k, ln P(X >= k))` for `lo <= k <= hi`.
/// For a pmf tail `k^{-γ}` the slope estimates `-(γ - 1)`.
pub fn fit_tail_exponent(ccdf: &[(u64, f64)], lo: u64, hi: u64) -> Result<TailFit> {
    let pts: Vec<(f64, f64)> = ccdf
        .iter()
        .filter(|&&(k, p)| k >= lo && k <= hi && k > 0 && p > 0.0)
        .map(|&(k, p)| ((k as f64).ln(), p.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::FitDomain(pts.len()));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pts {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(TailFit {
        slope,
        intercept: mean_y - slope * mean_x,
        r_squared,
        points: pts.len(),
    })
}
