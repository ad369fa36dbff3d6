//! Uniform-slot sampler for the preferential-attachment process.
//!
//! After `t` steps the slot array holds both endpoints of every edge, so
//! vertex `v` occupies exactly `d(v)` slots. Step `t + 1` draws an index
//! uniformly from `2t + 1` options: the `2t` existing slots, which select an
//! old vertex with probability `d(s) / (2t + 1)`, or the fresh slot, which
//! makes the new vertex attach to itself with probability `1 / (2t + 1)`.
//!
//! Randomness comes from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Replicate `r` of an experiment
//! with base seed `s` uses [`replicate_seed`]`(s, r)`.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::multigraph::{AttachmentHistory, MultiGraph, Vertex};

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `r`: `splitmix64(base ^ splitmix64(r))`.
pub fn replicate_seed(base: u64, r: u64) -> u64 {
    splitmix64(base ^ splitmix64(r))
}

#[derive(Debug, Clone)]
pub struct GeneratorState {
    t: usize,
    slots: Vec<u32>,
    rng: Xoshiro256PlusPlus,
}

impl GeneratorState {
    pub fn new(seed: u64) -> Self {
        Self::with_capacity(seed, 0)
    }

    pub fn with_capacity(seed: u64, n: usize) -> Self {
        Self {
            t: 0,
            slots: Vec::with_capacity(2 * n),
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Number of vertices created so far.
    pub fn step(&self) -> usize {
        self.t
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    /// Adds vertex `t + 1` and returns the vertex it attached to.
    pub fn attach_step(&mut self) -> Vertex {
        let options = 2 * self.t as u64 + 1;
        let slot = self.rng.random_range(0..options) as usize;
        self.attach_slot(slot)
    }

    /// Deterministic step: `slot < 2t` picks the vertex stored there,
    /// `slot == 2t` makes the new vertex attach to itself.
    pub fn attach_slot(&mut self, slot: usize) -> Vertex {
        assert!(
            slot <= 2 * self.t,
            "slot {slot} out of range at step {}",
            self.t + 1
        );
        self.t += 1;
        let new = self.t as u32;
        let target = if slot < self.slots.len() {
            self.slots[slot]
        } else {
            new
        };
        self.slots.push(new);
        self.slots.push(target);
        target as usize
    }

    /// The history so far; targets sit at the odd slot positions.
    pub fn history(&self) -> AttachmentHistory {
        AttachmentHistory::from_raw(self.slots.iter().skip(1).step_by(2).copied().collect())
    }
}

/// Samples `G_1^n`.
pub fn generate(n: usize, seed: u64) -> Result<AttachmentHistory> {
    if n > u32::MAX as usize {
        return Err(Error::TooLarge(n));
    }
    let mut state = GeneratorState::with_capacity(seed, n);
    for _ in 0..n {
        state.attach_step();
    }
    Ok(state.history())
}

/// Samples `G_m^n` by collapsing `G_1^{mn}` in blocks of `m`.
pub fn generate_collapsed(n: usize, m: usize, seed: u64) -> Result<MultiGraph> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let total = n.checked_mul(m).ok_or(Error::TooLarge(usize::MAX))?;
    generate(total, seed)?.into_graph().collapse(m)
}
