//! Fixed-seed random states for property sweeps.
//!
//! Supports are drawn uniformly from the occupation basis: at most six
//! terms over at most six modes, with complex Gaussian amplitudes. A
//! sampler is fully determined by its seed.

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bipartite::ModePartition;
use crate::fock::{Amplitude, FockState, Occupation, Statistics};

pub const MAX_SAMPLE_MODES: usize = 6;
pub const MAX_SAMPLE_TERMS: usize = 6;

/// All occupation vectors on `modes` modes holding `particles` particles,
/// lexicographic.
pub fn occupation_basis(stats: Statistics, modes: usize, particles: usize) -> Vec<Occupation> {
    fn rec(stats: Statistics, left: usize, modes: usize, cur: &mut Vec<u8>, out: &mut Vec<Occupation>) {
        if cur.len() == modes {
            if left == 0 {
                out.push(Occupation::new(cur.clone()));
            }
            return;
        }
        let cap = match stats {
            Statistics::Boson => left.min(crate::fock::MAX_OCCUPATION as usize),
            Statistics::Fermion => left.min(1),
        };
        for n in 0..=cap {
            cur.push(n as u8);
            rec(stats, left - n, modes, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(stats, particles, modes, &mut Vec::with_capacity(modes), &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct StateSampler {
    seed: u64,
    rng: ChaCha8Rng,
}

impl StateSampler {
    pub fn new(seed: u64) -> Self {
        StateSampler {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn amplitude(&mut self) -> Amplitude {
        Amplitude::new(self.gaussian(), self.gaussian())
    }

    fn partition(&mut self, modes: usize) -> ModePartition {
        let k = self.rng.random_range(1..modes);
        ModePartition::new(k, modes).expect("k < modes")
    }

    fn with_support(&mut self, stats: Statistics, modes: usize, particles: usize) -> (FockState, ModePartition) {
        let basis = occupation_basis(stats, modes, particles);
        let count = self.rng.random_range(1..=MAX_SAMPLE_TERMS.min(basis.len()));
        let support: Vec<Occupation> = basis.choose_multiple(&mut self.rng, count).cloned().collect();
        let terms: Vec<(Occupation, Amplitude)> =
            support.into_iter().map(|o| (o, self.amplitude())).collect();
        let state = FockState::new(stats, modes, terms).expect("sampled support is valid");
        (state, self.partition(modes))
    }

    /// A random state with 2..=6 modes and a random particle number.
    pub fn random_state(&mut self, stats: Statistics) -> (FockState, ModePartition) {
        let modes = self.rng.random_range(2..=MAX_SAMPLE_MODES);
        let particles = match stats {
            Statistics::Boson => self.rng.random_range(1..=3),
            Statistics::Fermion => self.rng.random_range(1..modes),
        };
        self.with_support(stats, modes, particles)
    }

    /// A random two-particle state.
    pub fn random_two_particle(&mut self, stats: Statistics) -> (FockState, ModePartition) {
        let modes = self.rng.random_range(2..=MAX_SAMPLE_MODES);
        self.with_support(stats, modes, 2)
    }

    /// Two bosons in one common single-particle mode spread over all modes
    /// of both parties: `(sum_i u_i c†_i)^2 |vac> / sqrt 2`. Such states
    /// have zero single-particle entropy.
    pub fn random_split_pair(&mut self) -> (FockState, ModePartition) {
        let modes = self.rng.random_range(2..=MAX_SAMPLE_MODES);
        let u: Vec<Amplitude> = (0..modes).map(|_| self.amplitude()).collect();
        let vac = FockState::vacuum(Statistics::Boson, modes);
        let apply = |s: &FockState| {
            let mut acc = FockState::zero(Statistics::Boson, modes, s.particle_number() + 1);
            for (m, &c) in u.iter().enumerate() {
                acc = acc.add(&s.create(m).expect("mode in range").scale(c)).expect("same space");
            }
            acc
        };
        let state = apply(&apply(&vac)).scale(Amplitude::new(0.5f64.sqrt(), 0.0));
        (state, self.partition(modes))
    }

    /// Haar-ish random unitary from the QR factorization of a complex
    /// Gaussian matrix, with the phases of R's diagonal divided out.
    pub fn random_unitary(&mut self, dim: usize) -> DMatrix<Amplitude> {
        let g = DMatrix::from_fn(dim, dim, |_, _| self.amplitude());
        let qr = g.qr();
        let (mut q, r) = qr.unpack();
        for j in 0..dim {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { Amplitude::new(1.0, 0.0) };
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
        q
    }
}
