//! Star keys and weighted star registries.

use std::fmt;
use std::hash::{BuildHasher, BuildHasherDefault};

use hashbrown::HashTable;
use rand::Rng;
use rustc_hash::FxHasher;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;

/// Canonical identity of a star: its center plus the strictly increasing
/// list of its peripheral vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StarKey {
    center: VertexId,
    peripherals: Vec<VertexId>,
}

impl StarKey {
    /// Builds a key from an arbitrary peripheral order. Fails on duplicate
    /// peripherals or when the center is also listed as a peripheral.
    pub fn new(center: VertexId, mut peripherals: Vec<VertexId>) -> Result<Self> {
        peripherals.sort_unstable();
        if peripherals.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Structure(format!(
                "duplicate peripheral in {peripherals:?}"
            )));
        }
        if peripherals.binary_search(&center).is_ok() {
            return Err(Error::Structure(format!(
                "center {center} is also a peripheral"
            )));
        }
        Ok(Self {
            center,
            peripherals,
        })
    }

    pub(crate) fn from_slots(slots: &[VertexId]) -> Self {
        Self {
            center: slots[0],
            peripherals: slots[1..].to_vec(),
        }
    }

    pub fn center(&self) -> VertexId {
        self.center
    }

    pub fn peripherals(&self) -> &[VertexId] {
        &self.peripherals
    }

    /// Number of vertices in the star.
    pub fn order(&self) -> usize {
        self.peripherals.len() + 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.center == v || self.peripherals.binary_search(&v).is_ok()
    }

    /// The sub-stars obtained by dropping one peripheral at a time.
    pub fn sub_stars(&self) -> impl Iterator<Item = StarKey> + '_ {
        (0..self.peripherals.len()).map(move |skip| StarKey {
            center: self.center,
            peripherals: self
                .peripherals
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect(),
        })
    }
}

impl fmt::Display for StarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<-", self.center)?;
        for (i, p) in self.peripherals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

type FxBuild = BuildHasherDefault<FxHasher>;

/// Weighted registry of all stars of one order.
///
/// Keys live in a flat arena (`order` slots per star: center first, then the
/// sorted peripherals). Every activation appends the star id to the
/// activation log, so the weight of a star always equals its number of log
/// entries and a uniform draw from the log is a weight-proportional draw.
#[derive(Clone)]
pub struct StarRegistry {
    order: usize,
    arena: Vec<VertexId>,
    weights: Vec<u64>,
    log: Vec<u32>,
    index: HashTable<u32>,
    hasher: FxBuild,
}

impl fmt::Debug for StarRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StarRegistry")
            .field("order", &self.order)
            .field("stars", &self.weights.len())
            .field("log_len", &self.log.len())
            .finish()
    }
}

impl StarRegistry {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            arena: Vec::new(),
            weights: Vec::new(),
            log: Vec::new(),
            index: HashTable::new(),
            hasher: FxBuild::default(),
        }
    }

    /// Vertices per star.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of distinct stars.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn log_len(&self) -> usize {
        self.log.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn activation_log(&self) -> &[u32] {
        &self.log
    }

    fn slots(&self, id: u32) -> &[VertexId] {
        let start = id as usize * self.order;
        &self.arena[start..start + self.order]
    }

    pub fn key(&self, id: u32) -> StarKey {
        StarKey::from_slots(self.slots(id))
    }

    pub fn weight_of(&self, id: u32) -> u64 {
        self.weights[id as usize]
    }

    fn hash_slots(&self, slots: &[VertexId]) -> u64 {
        self.hasher.hash_one(slots)
    }

    fn find(&self, slots: &[VertexId]) -> Option<u32> {
        let hash = self.hash_slots(slots);
        let order = self.order;
        let arena = &self.arena;
        self.index
            .find(hash, |&id| {
                let start = id as usize * order;
                &arena[start..start + order] == slots
            })
            .copied()
    }

    pub fn id_of(&self, key: &StarKey) -> Option<u32> {
        if key.order() != self.order {
            return None;
        }
        let mut slots = Vec::with_capacity(self.order);
        slots.push(key.center());
        slots.extend_from_slice(key.peripherals());
        self.find(&slots)
    }

    /// Weight of `key`, zero when the star was never activated.
    pub fn weight(&self, key: &StarKey) -> u64 {
        self.id_of(key).map_or(0, |id| self.weights[id as usize])
    }

    /// Activates the star with canonical slots `[center, sorted peripherals]`.
    /// Returns its id and whether it was created by this activation.
    pub(crate) fn activate(&mut self, slots: &[VertexId]) -> (u32, bool) {
        debug_assert_eq!(slots.len(), self.order);
        let (id, created) = match self.find(slots) {
            Some(id) => {
                self.weights[id as usize] += 1;
                (id, false)
            }
            None => {
                let id = u32::try_from(self.weights.len()).expect("star id overflow");
                let hash = self.hash_slots(slots);
                self.arena.extend_from_slice(slots);
                self.weights.push(1);
                let order = self.order;
                let arena = &self.arena;
                let hasher = &self.hasher;
                self.index.insert_unique(hash, id, |&other| {
                    let start = other as usize * order;
                    hasher.hash_one(&arena[start..start + order])
                });
                (id, true)
            }
        };
        self.log.push(id);
        (id, created)
    }

    /// Weight-proportional draw: one uniform index into the activation log.
    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> Option<u32> {
        if self.log.is_empty() {
            return None;
        }
        let slot = rng.gen_range(0..self.log.len() as u64) as usize;
        Some(self.log[slot])
    }

    pub(crate) fn slots_of(&self, id: u32) -> &[VertexId] {
        self.slots(id)
    }

    /// All stars with their weights, in creation order.
    pub fn iter(&self) -> impl Iterator<Item = (StarKey, u64)> + '_ {
        (0..self.weights.len() as u32).map(move |id| (self.key(id), self.weights[id as usize]))
    }

    /// Slot view of every star with its weight, in creation order.
    pub(crate) fn iter_slots(&self) -> impl Iterator<Item = (&[VertexId], u64)> + '_ {
        self.arena
            .chunks_exact(self.order)
            .zip(self.weights.iter().copied())
    }
}
