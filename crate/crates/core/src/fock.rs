//! Sparse Fock-basis states of identical particles.
//!
//! A [`FockState`] is a map from occupation vectors to complex amplitudes.
//! Modes are globally ordered with Alice's block first, and every fermionic
//! sign in the crate is taken relative to that order: the ket
//! `|n_0 n_1 ... n_{M-1}>` stands for `(c†_0)^n_0 (c†_1)^n_1 ... |vac>`.
//!
//! States are never normalized implicitly. Measures divide the norm out
//! themselves, so unnormalized kets can be written down directly.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::bipartite::ModePartition;
use crate::error::{Error, Result};

pub type Amplitude = Complex<f64>;

/// Amplitudes with magnitude at or below this are dropped after every
/// operation.
pub const PRUNE_TOLERANCE: f64 = 1e-12;

/// Largest occupation a single mode may hold, so that ket notation stays
/// one digit per mode.
pub const MAX_OCCUPATION: u8 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistics::Boson => f.write_str("boson"),
            Statistics::Fermion => f.write_str("fermion"),
        }
    }
}

/// Per-mode particle counts in the global (Alice-first) mode order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u8>);

impl Occupation {
    pub fn new(occ: Vec<u8>) -> Self {
        Occupation(occ)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// Number of particles in modes `0..mode`.
    pub fn count_before(&self, mode: usize) -> usize {
        self.0[..mode].iter().map(|&n| n as usize).sum()
    }

    /// Splits into the first `k` modes and the rest.
    pub fn split(&self, k: usize) -> (&[u8], &[u8]) {
        self.0.split_at(k)
    }
}

impl From<Vec<u8>> for Occupation {
    fn from(v: Vec<u8>) -> Self {
        Occupation(v)
    }
}

impl From<&[u8]> for Occupation {
    fn from(v: &[u8]) -> Self {
        Occupation(v.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.0 {
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Pure state of a fixed number of identical particles.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    stats: Statistics,
    modes: usize,
    particles: usize,
    terms: BTreeMap<Occupation, Amplitude>,
}

fn fermion_sign(parity: usize) -> f64 {
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FockState {
    /// Builds a state from `(occupations, amplitude)` pairs. Repeated
    /// occupation vectors are summed, and the result is pruned.
    pub fn new<I, O>(stats: Statistics, mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, Amplitude)>,
        O: Into<Occupation>,
    {
        let mut map: BTreeMap<Occupation, Amplitude> = BTreeMap::new();
        let mut recorded = None;
        for (occ, amp) in terms {
            let occ = occ.into();
            if occ.len() != mode_count {
                return Err(Error::LengthMismatch {
                    expected: mode_count,
                    found: occ.len(),
                });
            }
            for (mode, &n) in occ.as_slice().iter().enumerate() {
                if stats == Statistics::Fermion && n > 1 {
                    return Err(Error::FermionOccupancyViolation {
                        mode,
                        occupation: n,
                    });
                }
                if n > MAX_OCCUPATION {
                    return Err(Error::OccupationOverflow {
                        occupation: n as u32,
                        max: MAX_OCCUPATION,
                    });
                }
            }
            recorded.get_or_insert(occ.total());
            *map.entry(occ).or_insert(Amplitude::new(0.0, 0.0)) += amp;
        }
        map.retain(|_, a| a.norm() > PRUNE_TOLERANCE);

        let mut totals = map.keys().map(Occupation::total);
        let particles = match totals.next() {
            Some(first) => {
                if let Some(second) = totals.find(|&t| t != first) {
                    return Err(Error::MixedParticleNumber { first, second });
                }
                first
            }
            None => recorded.unwrap_or(0),
        };
        Ok(FockState {
            stats,
            modes: mode_count,
            particles,
            terms: map,
        })
    }

    /// Convenience constructor for real amplitudes.
    pub fn from_real<I, O>(stats: Statistics, mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (O, f64)>,
        O: Into<Occupation>,
    {
        Self::new(
            stats,
            mode_count,
            terms.into_iter().map(|(o, a)| (o, Amplitude::new(a, 0.0))),
        )
    }

    /// The no-particle state on `mode_count` modes, with amplitude 1.
    pub fn vacuum(stats: Statistics, mode_count: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation(vec![0; mode_count]), Amplitude::new(1.0, 0.0));
        FockState {
            stats,
            modes: mode_count,
            particles: 0,
            terms,
        }
    }

    pub fn zero(stats: Statistics, mode_count: usize, particles: usize) -> Self {
        FockState {
            stats,
            modes: mode_count,
            particles,
            terms: BTreeMap::new(),
        }
    }

    // Internal constructor for maps that already satisfy the invariants
    // apart from pruning.
    fn from_map(
        stats: Statistics,
        modes: usize,
        particles: usize,
        mut terms: BTreeMap<Occupation, Amplitude>,
    ) -> Self {
        terms.retain(|_, a| a.norm() > PRUNE_TOLERANCE);
        FockState {
            stats,
            modes,
            particles,
            terms,
        }
    }

    pub fn stats(&self) -> Statistics {
        self.stats
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    /// Total particle number. For the zero state this is the number the
    /// state was built or derived with.
    pub fn particle_number(&self) -> usize {
        self.particles
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Occupation, &Amplitude)> + '_ {
        self.terms.iter()
    }

    pub fn amplitude(&self, occ: &[u8]) -> Amplitude {
        self.terms
            .get(&Occupation(occ.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scale(&self, factor: Amplitude) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(o, a)| (o.clone(), a * factor))
            .collect();
        Self::from_map(self.stats, self.modes, self.particles, terms)
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&Occupation) -> bool,
    {
        let terms = self
            .terms
            .iter()
            .filter(|(o, _)| keep(o))
            .map(|(o, a)| (o.clone(), *a))
            .collect();
        Self::from_map(self.stats, self.modes, self.particles, terms)
    }

    fn check_same_space(&self, other: &FockState) -> Result<()> {
        if self.stats != other.stats {
            return Err(Error::StatsMismatch(self.stats, other.stats));
        }
        if self.modes != other.modes {
            return Err(Error::ShapeMismatch(format!(
                "{} modes vs {} modes",
                self.modes, other.modes
            )));
        }
        Ok(())
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner_product(&self, other: &FockState) -> Result<Amplitude> {
        self.check_same_space(other)?;
        let (small, large, conj_small) = if self.terms.len() <= other.terms.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Amplitude::new(0.0, 0.0);
        for (occ, a) in &small.terms {
            if let Some(b) = large.terms.get(occ) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Sum of two states on the same modes with the same particle number.
    pub fn add(&self, other: &FockState) -> Result<Self> {
        self.check_same_space(other)?;
        if !self.is_zero() && !other.is_zero() && self.particles != other.particles {
            return Err(Error::MixedParticleNumber {
                first: self.particles,
                second: other.particles,
            });
        }
        let particles = if self.is_zero() {
            other.particles
        } else {
            self.particles
        };
        let mut terms = self.terms.clone();
        for (o, a) in &other.terms {
            *terms.entry(o.clone()).or_default() += a;
        }
        Ok(Self::from_map(self.stats, self.modes, particles, terms))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            Err(Error::IndexOutOfRange {
                index: mode,
                modes: self.modes,
            })
        } else {
            Ok(())
        }
    }

    /// Applies the annihilation operator of `mode`.
    pub fn annihilate(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut terms = BTreeMap::new();
        for (occ, amp) in &self.terms {
            let n = occ.0[mode];
            if n == 0 {
                continue;
            }
            let factor = match self.stats {
                Statistics::Boson => (n as f64).sqrt(),
                Statistics::Fermion => fermion_sign(occ.count_before(mode)),
            };
            let mut next = occ.0.clone();
            next[mode] -= 1;
            terms.insert(Occupation(next), amp * factor);
        }
        Ok(Self::from_map(
            self.stats,
            self.modes,
            self.particles.saturating_sub(1),
            terms,
        ))
    }

    /// Applies the creation operator of `mode`.
    pub fn create(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut terms = BTreeMap::new();
        for (occ, amp) in &self.terms {
            let n = occ.0[mode];
            let factor = match self.stats {
                Statistics::Boson => {
                    if n >= MAX_OCCUPATION {
                        return Err(Error::OccupationOverflow {
                            occupation: n as u32 + 1,
                            max: MAX_OCCUPATION,
                        });
                    }
                    (n as f64 + 1.0).sqrt()
                }
                Statistics::Fermion => {
                    if n == 1 {
                        continue;
                    }
                    fermion_sign(occ.count_before(mode))
                }
            };
            let mut next = occ.0.clone();
            next[mode] += 1;
            terms.insert(Occupation(next), amp * factor);
        }
        Ok(Self::from_map(
            self.stats,
            self.modes,
            self.particles + 1,
            terms,
        ))
    }
}

/// Fermionic phase convention used when composing two states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignRule {
    /// Reorder the creation strings into the global Alice-first order,
    /// picking up `(-1)^(n_B(x) n_A(y))` per term pair.
    #[default]
    Canonical,
    /// Multiply amplitudes without any reordering sign.
    Omitted,
}

/// Tensor product of two states on disjoint modes.
///
/// The result's Alice block is `x`'s Alice modes followed by `y`'s, and
/// likewise for Bob.
pub fn compose(
    x: &FockState,
    px: ModePartition,
    y: &FockState,
    py: ModePartition,
) -> Result<(FockState, ModePartition)> {
    compose_with(x, px, y, py, SignRule::Canonical)
}

pub fn compose_with(
    x: &FockState,
    px: ModePartition,
    y: &FockState,
    py: ModePartition,
    rule: SignRule,
) -> Result<(FockState, ModePartition)> {
    if x.stats != y.stats {
        return Err(Error::StatsMismatch(x.stats, y.stats));
    }
    px.check(x)?;
    py.check(y)?;
    let (ka, kb) = (px.alice_modes(), py.alice_modes());
    let modes = x.modes + y.modes;
    let fermionic = x.stats == Statistics::Fermion && rule == SignRule::Canonical;

    let mut terms = BTreeMap::new();
    for (ox, ax) in &x.terms {
        let (xa, xb) = ox.split(ka);
        let x_bob: usize = xb.iter().map(|&n| n as usize).sum();
        for (oy, ay) in &y.terms {
            let (ya, yb) = oy.split(kb);
            let mut occ = Vec::with_capacity(modes);
            occ.extend_from_slice(xa);
            occ.extend_from_slice(ya);
            occ.extend_from_slice(xb);
            occ.extend_from_slice(yb);
            let mut amp = ax * ay;
            if fermionic {
                let y_alice: usize = ya.iter().map(|&n| n as usize).sum();
                amp *= fermion_sign(x_bob * y_alice);
            }
            terms.insert(Occupation(occ), amp);
        }
    }
    let state = FockState::from_map(x.stats, modes, x.particles + y.particles, terms);
    Ok((state, ModePartition::new(ka + kb, modes)?))
}
