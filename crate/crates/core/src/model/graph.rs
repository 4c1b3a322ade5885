use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::star::{StarKey, StarRegistry, VertexId};
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, ChaCha8Rng};

/// Inputs of the evolution: Option I probability `p`, II/1 probability `q`,
/// I/1 probability `r` and the star size `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    #[serde(rename = "N")]
    pub star_size: usize,
}

impl ModelParams {
    pub fn new(p: f64, q: f64, r: f64, star_size: usize) -> Result<Self> {
        let params = Self { p, q, r, star_size };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::ParamDomain {
                name: "p",
                value: self.p,
                bound: "0 < p <= 1",
            });
        }
        for (name, value) in [("q", self.q), ("r", self.r)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ParamDomain {
                    name,
                    value,
                    bound: "0 <= value <= 1",
                });
            }
        }
        if self.star_size < 3 {
            return Err(Error::StarSize(self.star_size));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// New vertex joins a preferentially chosen (N-1)-star as a peripheral.
    I1,
    /// New vertex becomes the center of N-1 uniformly chosen old vertices.
    I2,
    /// Preferential re-activation of an existing N-star.
    II1,
    /// N uniformly chosen old vertices form a star with a uniform center.
    II2,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::I1, Branch::I2, Branch::II1, Branch::II2];

    pub fn adds_vertex(self) -> bool {
        matches!(self, Branch::I1 | Branch::I2)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::I1 => "I/1",
            Branch::I2 => "I/2",
            Branch::II1 => "II/1",
            Branch::II2 => "II/2",
        })
    }
}

/// Per-vertex record of the undirected simple-graph view: central weight,
/// peripheral weight and the sorted neighbor list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRecord {
    pub id: VertexId,
    pub w1: u64,
    pub w2: u64,
    neighbors: Vec<VertexId>,
}

impl VertexRecord {
    fn new(id: VertexId) -> Self {
        Self {
            id,
            w1: 0,
            w2: 0,
            neighbors: Vec::new(),
        }
    }

    /// Simple degree `d`.
    pub fn degree(&self) -> u64 {
        self.neighbors.len() as u64
    }

    pub fn in_degree(&self, star_size: usize) -> u64 {
        self.w1 * (star_size as u64 - 1)
    }

    pub fn out_degree(&self) -> u64 {
        self.w2
    }

    pub fn neighbors(&self) -> &[VertexId] {
        &self.neighbors
    }

    pub fn is_neighbor(&self, v: VertexId) -> bool {
        self.neighbors.binary_search(&v).is_ok()
    }

    fn link(&mut self, v: VertexId) -> bool {
        match self.neighbors.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.neighbors.insert(pos, v);
                true
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexDelta {
    pub vertex: VertexId,
    pub d: u64,
    pub w1: u64,
    pub w2: u64,
}

/// Everything one evolution step changed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub branch: Branch,
    pub star: StarKey,
    pub new_vertex: Option<VertexId>,
    /// Center first, then peripherals in key order.
    pub deltas: Vec<VertexDelta>,
}

/// The evolving graph together with its random stream.
///
/// Random draws per step, in order:
/// 1. two `f64` uniforms: the first selects Option I (`u < p`), the second
///    the sub-branch (`u < r` for I/1, `u < q` for II/1);
/// 2. I/1 and II/1: one `gen_range(0..log_len)` on the relevant activation log;
/// 3. I/2 and II/2: `k` draws of a partial Fisher-Yates shuffle over the
///    old vertex ids (`k = N-1` resp. `N`);
/// 4. II/2 only: one `gen_range(0..N)` picking the center among the drawn set
///    in draw order.
#[derive(Clone, Debug)]
pub struct GraphState {
    params: ModelParams,
    n: u64,
    vertices: Vec<VertexRecord>,
    nstars: StarRegistry,
    n1stars: StarRegistry,
    rng: ChaCha8Rng,
}

impl GraphState {
    /// Initial graph: a single N-star (vertex 0 is the center) of weight 1
    /// together with its N-1 sub-stars of weight 1.
    pub fn new(params: ModelParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let big_n = params.star_size;
        let mut state = Self {
            params,
            n: 0,
            vertices: Vec::with_capacity(big_n),
            nstars: StarRegistry::new(big_n),
            n1stars: StarRegistry::new(big_n - 1),
            rng: rng_from_seed(seed),
        };
        for _ in 0..big_n {
            state.add_vertex();
        }
        let peripherals: Vec<VertexId> = (1..big_n as VertexId).collect();
        state.interact(Branch::II1, 0, &peripherals, None)?;
        state.n = 0;
        Ok(state)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Number of completed steps.
    pub fn steps(&self) -> u64 {
        self.n
    }

    /// `V_n`.
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn vertex(&self, id: VertexId) -> Option<&VertexRecord> {
        self.vertices.get(id as usize)
    }

    pub fn nstars(&self) -> &StarRegistry {
        &self.nstars
    }

    pub fn n1stars(&self) -> &StarRegistry {
        &self.n1stars
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Swaps in a different random stream, returning the old one.
    pub fn replace_rng(&mut self, rng: ChaCha8Rng) -> ChaCha8Rng {
        std::mem::replace(&mut self.rng, rng)
    }

    fn add_vertex(&mut self) -> VertexId {
        let id = VertexId::try_from(self.vertices.len()).expect("vertex id overflow");
        self.vertices.push(VertexRecord::new(id));
        id
    }

    /// Preferential choice of an N-star (weight / total weight).
    pub fn sample_pref_nstar(&mut self) -> Result<StarKey> {
        let id = self
            .nstars
            .sample(&mut self.rng)
            .ok_or(Error::EmptyInput("N-star activation log"))?;
        Ok(self.nstars.key(id))
    }

    /// Preferential choice of an (N-1)-star (weight / total weight).
    pub fn sample_pref_n1star(&mut self) -> Result<StarKey> {
        let id = self
            .n1stars
            .sample(&mut self.rng)
            .ok_or(Error::EmptyInput("(N-1)-star activation log"))?;
        Ok(self.n1stars.key(id))
    }

    /// Uniform `k`-subset of the current vertices, in draw order.
    pub fn sample_uniform_vertices(&mut self, k: usize) -> Result<Vec<VertexId>> {
        partial_fisher_yates(&mut self.rng, self.vertices.len(), k)
    }

    /// Applies one interaction of `center` with `peripherals`, counting it as
    /// one step. `branch` is recorded in the outcome only.
    pub fn apply_interaction(
        &mut self,
        branch: Branch,
        center: VertexId,
        peripherals: &[VertexId],
    ) -> Result<StepOutcome> {
        self.interact(branch, center, peripherals, None)
    }

    fn interact(
        &mut self,
        branch: Branch,
        center: VertexId,
        peripherals: &[VertexId],
        new_vertex: Option<VertexId>,
    ) -> Result<StepOutcome> {
        let big_n = self.params.star_size;
        if peripherals.len() != big_n - 1 {
            return Err(Error::Structure(format!(
                "expected {} peripherals, got {}",
                big_n - 1,
                peripherals.len()
            )));
        }
        let v_count = self.vertices.len();
        if let Some(&bad) = std::iter::once(&center)
            .chain(peripherals)
            .find(|&&v| v as usize >= v_count)
        {
            return Err(Error::Structure(format!("vertex {bad} does not exist")));
        }
        let key = StarKey::new(center, peripherals.to_vec())?;

        let mut deltas = Vec::with_capacity(big_n);
        deltas.push(VertexDelta {
            vertex: center,
            d: 0,
            w1: 1,
            w2: 0,
        });
        for &p in key.peripherals() {
            let fresh = self.vertices[center as usize].link(p);
            if fresh {
                self.vertices[p as usize].link(center);
                deltas[0].d += 1;
            }
            self.vertices[p as usize].w2 += 1;
            deltas.push(VertexDelta {
                vertex: p,
                d: u64::from(fresh),
                w1: 0,
                w2: 1,
            });
        }
        self.vertices[center as usize].w1 += 1;

        let mut slots = Vec::with_capacity(big_n);
        slots.push(center);
        slots.extend_from_slice(key.peripherals());
        self.nstars.activate(&slots);
        let mut sub = Vec::with_capacity(big_n - 1);
        for skip in 1..big_n {
            sub.clear();
            sub.extend(
                slots
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v),
            );
            self.n1stars.activate(&sub);
        }
        self.n += 1;

        Ok(StepOutcome {
            branch,
            star: key,
            new_vertex,
            deltas,
        })
    }

    /// Draws the branch from the two branch uniforms.
    pub fn choose_branch(&mut self) -> Branch {
        let u_option: f64 = self.rng.gen();
        let u_sub: f64 = self.rng.gen();
        let ModelParams { p, q, r, .. } = self.params;
        match (u_option < p, u_sub) {
            (true, u) if u < r => Branch::I1,
            (true, _) => Branch::I2,
            (false, u) if u < q => Branch::II1,
            (false, _) => Branch::II2,
        }
    }

    /// One evolution step.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let big_n = self.params.star_size;
        match self.choose_branch() {
            Branch::I1 => {
                let id = self
                    .n1stars
                    .sample(&mut self.rng)
                    .ok_or(Error::EmptyInput("(N-1)-star activation log"))?;
                let mut slots = self.n1stars.slots_of(id).to_vec();
                let new = self.add_vertex();
                slots.push(new);
                self.interact(Branch::I1, slots[0], &slots[1..], Some(new))
            }
            Branch::I2 => {
                let peripherals = self.sample_uniform_vertices(big_n - 1)?;
                let new = self.add_vertex();
                self.interact(Branch::I2, new, &peripherals, Some(new))
            }
            Branch::II1 => {
                let id = self
                    .nstars
                    .sample(&mut self.rng)
                    .ok_or(Error::EmptyInput("N-star activation log"))?;
                let slots = self.nstars.slots_of(id).to_vec();
                self.interact(Branch::II1, slots[0], &slots[1..], None)
            }
            Branch::II2 => {
                let mut team = self.sample_uniform_vertices(big_n)?;
                let pick = self.rng.gen_range(0..big_n as u64) as usize;
                let center = team.swap_remove(pick);
                self.interact(Branch::II2, center, &team, None)
            }
        }
    }

    /// Re-applies a recorded outcome. Used to rebuild a state from a log.
    pub fn replay(&mut self, outcome: &StepOutcome) -> Result<()> {
        let new_vertex = match outcome.new_vertex {
            Some(v) if v as usize == self.vertices.len() => Some(self.add_vertex()),
            Some(v) => {
                return Err(Error::Structure(format!(
                    "replayed vertex {v} but next id is {}",
                    self.vertices.len()
                )))
            }
            None => None,
        };
        let star = &outcome.star;
        self.interact(
            outcome.branch,
            star.center(),
            star.peripherals(),
            new_vertex,
        )?;
        Ok(())
    }

    /// Equality of everything except the random stream.
    pub fn same_structure(&self, other: &GraphState) -> bool {
        self.params == other.params
            && self.n == other.n
            && self.vertices == other.vertices
            && self.nstars.iter().eq(other.nstars.iter())
            && self.nstars.activation_log() == other.nstars.activation_log()
            && self.n1stars.iter().eq(other.n1stars.iter())
            && self.n1stars.activation_log() == other.n1stars.activation_log()
    }

    /// Full structural audit. Cost is linear in the size of the state.
    pub fn check_invariants(&self) -> Result<()> {
        let big_n = self.params.star_size as u64;
        let n = self.n;
        let fail = |msg: String| Err(Error::Structure(msg));

        if self.nstars.log_len() as u64 != n + 1 || self.nstars.total_weight() != n + 1 {
            return fail(format!("N-star log/weights do not match n + 1 = {}", n + 1));
        }
        let n1_total = (n + 1) * (big_n - 1);
        if self.n1stars.log_len() as u64 != n1_total || self.n1stars.total_weight() != n1_total {
            return fail(format!("(N-1)-star log/weights do not match {n1_total}"));
        }

        let mut sum_w1 = 0;
        let mut sum_w2 = 0;
        for v in &self.vertices {
            sum_w1 += v.w1;
            sum_w2 += v.w2;
            if !degree_admissible(big_n, v.degree(), v.w1, v.w2) {
                return fail(format!(
                    "vertex {} has inadmissible (d, w1, w2) = ({}, {}, {})",
                    v.id,
                    v.degree(),
                    v.w1,
                    v.w2
                ));
            }
            if v.neighbors.windows(2).any(|w| w[0] >= w[1]) {
                return fail(format!("vertex {} neighbor list not sorted", v.id));
            }
            for &u in &v.neighbors {
                if !self.vertices[u as usize].is_neighbor(v.id) {
                    return fail(format!("edge {}-{} is not symmetric", v.id, u));
                }
            }
        }
        if sum_w1 != n + 1 || sum_w2 != (n + 1) * (big_n - 1) {
            return fail(format!("weight sums ({sum_w1}, {sum_w2}) inconsistent"));
        }

        let mut cover = vec![0u64; self.vertices.len()];
        for (slots, weight) in self.n1stars.iter_slots() {
            for &v in slots {
                match cover.get_mut(v as usize) {
                    Some(c) => *c += weight,
                    None => return fail(format!("(N-1)-star references missing vertex {v}")),
                }
            }
        }
        for (slots, _) in self.nstars.iter_slots() {
            if slots.iter().any(|&v| v as usize >= self.vertices.len()) {
                return fail("N-star references a missing vertex".into());
            }
        }
        for (v, &c) in self.vertices.iter().zip(&cover) {
            let expected = v.w1 * (big_n - 1) + v.w2 * (big_n - 2);
            if c != expected {
                return fail(format!(
                    "vertex {} covered by (N-1)-star weight {c}, expected {expected}",
                    v.id
                ));
            }
        }
        Ok(())
    }
}

/// Whether a vertex with weights `(w1, w2)` can have simple degree `d`.
pub fn degree_admissible(star_size: u64, d: u64, w1: u64, w2: u64) -> bool {
    match (w1, w2) {
        (0, 0) => false,
        (0, _) => (1..=w2).contains(&d),
        _ => (star_size - 1..=w1 * (star_size - 1) + w2).contains(&d),
    }
}

/// Partial Fisher-Yates over `0..population`: `k` draws, each swapping the
/// drawn slot with the current front slot of a virtual identity array. Only
/// swapped slots are stored.
pub(crate) fn partial_fisher_yates<R: Rng>(
    rng: &mut R,
    population: usize,
    k: usize,
) -> Result<Vec<VertexId>> {
    if k > population {
        return Err(Error::InfeasibleDraw {
            k,
            available: population,
        });
    }
    let mut moved: Vec<(usize, usize)> = Vec::with_capacity(k);
    let lookup = |moved: &[(usize, usize)], slot: usize| {
        moved
            .iter()
            .rev()
            .find(|&&(s, _)| s == slot)
            .map_or(slot, |&(_, v)| v)
    };
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let j = i + rng.gen_range(0..(population - i) as u64) as usize;
        let at_j = lookup(&moved, j);
        let at_i = lookup(&moved, i);
        moved.push((j, at_i));
        out.push(at_j as VertexId);
    }
    Ok(out)
}
