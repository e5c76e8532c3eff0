//! Exact and asymptotic particle entanglement for families of composed
//! states, and the super-additivity check.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::bipartite::{sector_decomposition, ModePartition};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{compose, FockState, Statistics};
use crate::measures::{mode_entanglement, particle_entanglement_of};

/// Largest number of terms a composed state may reach in
/// [`copies_scaling`].
pub const MAX_COPY_TERMS: usize = 1_000_000;

const ZERO_VARIANCE: f64 = 1e-12;

/// Offset `delta` in the large-N expansion of the split-single family,
/// `(-1 + log2(pi) + 1/ln 2) / 2`.
pub fn delta() -> f64 {
    (-1.0 + PI.log2() + 1.0 / std::f64::consts::LN_2) / 2.0
}

/// `log2` of a big unsigned integer, from its leading 64 bits and bit
/// length.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map_or(f64::NEG_INFINITY, |v| (v as f64).log2());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// Binomial coefficients `C(n, 0..=n)` as exact integers.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

/// Particle entanglement of `n` particles, each in its own mode split
/// evenly between Alice and Bob:
/// `2^-n sum_k C(n,k) log2 C(n,k)`.
pub fn ep_split_singles_exact(n: u64) -> f64 {
    binomial_row(n)
        .iter()
        .map(|c| {
            let l = log2_biguint(c);
            // C 2^-n log2 C, with the weight formed in log space.
            (l - n as f64).exp2() * l
        })
        .sum()
}

/// Large-`n` form `n - log2(n)/2 - delta`.
pub fn ep_split_singles_asymptote(n: u64) -> f64 {
    let n = n as f64;
    n - 0.5 * n.log2() - delta()
}

/// The state `|0,1> + |1,0>` for one particle in one split mode.
pub fn split_single(stats: Statistics) -> (FockState, ModePartition) {
    let s = FockState::from_real(stats, 2, [(vec![0, 1], 1.0), (vec![1, 0], 1.0)])
        .expect("valid two-mode state");
    (s, ModePartition::new(1, 2).expect("valid partition"))
}

/// `count` split singles composed into one state on `2 count` modes.
pub fn split_singles_state(stats: Statistics, count: usize) -> Result<(FockState, ModePartition)> {
    let (one, p) = split_single(stats);
    copies(&one, p, count)
}

/// `count`-fold composition of `s` with itself.
pub fn copies(s: &FockState, p: ModePartition, count: usize) -> Result<(FockState, ModePartition)> {
    let mut acc = (FockState::vacuum(s.stats(), 0), ModePartition::new(0, 0)?);
    for _ in 0..count {
        if acc.0.len().saturating_mul(s.len()) > MAX_COPY_TERMS {
            return Err(Error::TooLarge(format!(
                "more than {MAX_COPY_TERMS} terms after composition"
            )));
        }
        acc = compose(&acc.0, acc.1, s, p)?;
    }
    Ok(acc)
}

/// Variance of Alice's particle number.
pub fn alice_number_variance(s: &FockState, p: ModePartition) -> Result<f64> {
    Ok(sector_decomposition(s, p)?.variance())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuperadditivityReport {
    /// Particle entanglement of the composed state.
    pub lhs: f64,
    /// Sum of the parts' particle entanglements.
    pub rhs: f64,
    pub gap: f64,
    pub v_psi: f64,
    pub v_phi: f64,
    /// Equality predicted from a vanishing Alice-number variance.
    pub equality_predicted: bool,
    /// Whether two distinct sector pairs `(n, m)` of the parts land on the
    /// same total `n + m`. Equality holds exactly when they never do.
    pub sector_overlap: bool,
}

impl SuperadditivityReport {
    pub fn holds(&self) -> bool {
        self.gap >= -1e-9
    }
}

pub fn check_superadditivity(
    x: &FockState,
    px: ModePartition,
    y: &FockState,
    py: ModePartition,
) -> Result<SuperadditivityReport> {
    check_superadditivity_with(x, px, y, py, Execution::default())
}

pub fn check_superadditivity_with(
    x: &FockState,
    px: ModePartition,
    y: &FockState,
    py: ModePartition,
    exec: Execution,
) -> Result<SuperadditivityReport> {
    if x.stats() != y.stats() {
        return Err(Error::StatsMismatch(x.stats(), y.stats()));
    }
    let dx = sector_decomposition(x, px)?;
    let dy = sector_decomposition(y, py)?;
    let (xy, pxy) = compose(x, px, y, py)?;
    let dxy = sector_decomposition(&xy, pxy)?;

    let rhs = particle_entanglement_of(&dx, px, exec)? + particle_entanglement_of(&dy, py, exec)?;
    let lhs = particle_entanglement_of(&dxy, pxy, exec)?;
    let (v_psi, v_phi) = (dx.variance(), dy.variance());

    let mut totals = Vec::with_capacity(dx.len() * dy.len());
    for a in dx.iter() {
        for b in dy.iter() {
            totals.push(a.n + b.n);
        }
    }
    let pairs = totals.len();
    totals.sort_unstable();
    totals.dedup();

    Ok(SuperadditivityReport {
        lhs,
        rhs,
        gap: lhs - rhs,
        v_psi,
        v_phi,
        equality_predicted: v_psi.min(v_phi) < ZERO_VARIANCE,
        sector_overlap: totals.len() < pairs,
    })
}

/// Runs [`check_superadditivity`] over many pairs.
pub fn superadditivity_batch(
    pairs: &[((FockState, ModePartition), (FockState, ModePartition))],
    exec: Execution,
) -> Vec<Result<SuperadditivityReport>> {
    exec.map(pairs, |((x, px), (y, py))| {
        check_superadditivity_with(x, *px, y, *py, Execution::Sequential)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    /// Number of particles or copies.
    pub count: usize,
    pub exact: f64,
    /// Leading-order estimate; absent when the variance vanishes.
    pub asymptote: Option<f64>,
    pub difference: Option<f64>,
    /// `exact / (count * E_M)`; absent when the mode entanglement is zero.
    pub ratio: Option<f64>,
}

/// Particle entanglement of `C = 1..=max_copies` copies of `s`, with the
/// estimate `C E_M - log2(V C)/2` (constant term omitted).
pub fn copies_scaling(s: &FockState, p: ModePartition, max_copies: usize) -> Result<Vec<ScalingRow>> {
    copies_scaling_with(s, p, max_copies, Execution::default())
}

pub fn copies_scaling_with(
    s: &FockState,
    p: ModePartition,
    max_copies: usize,
    exec: Execution,
) -> Result<Vec<ScalingRow>> {
    if max_copies == 0 {
        return Err(Error::TooLarge("at least one copy required".into()));
    }
    if s.is_zero() {
        return Err(Error::EmptyState);
    }
    let projected = (s.len() as f64).powi(max_copies as i32);
    if projected > MAX_COPY_TERMS as f64 {
        return Err(Error::TooLarge(format!(
            "{} terms to the power {max_copies} exceeds {MAX_COPY_TERMS}",
            s.len()
        )));
    }
    let e_m = mode_entanglement(s, p)?;
    let variance = alice_number_variance(s, p)?;

    let mut rows = Vec::with_capacity(max_copies);
    let mut acc = (s.clone(), p);
    for count in 1..=max_copies {
        if count > 1 {
            acc = compose(&acc.0, acc.1, s, p)?;
        }
        let sectors = sector_decomposition(&acc.0, acc.1)?;
        let exact = particle_entanglement_of(&sectors, acc.1, exec)?;
        let c = count as f64;
        let asymptote = (variance >= ZERO_VARIANCE).then(|| c * e_m - 0.5 * (variance * c).log2());
        rows.push(ScalingRow {
            count,
            exact,
            asymptote,
            difference: asymptote.map(|a| exact - a),
            ratio: (e_m > 0.0).then(|| exact / (c * e_m)),
        });
    }
    Ok(rows)
}

/// Doubling grid `1, 2, 4, ...` up to `max_n`, with `max_n` itself appended
/// when it is not a power of two.
pub fn doubling_grid(max_n: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut n = 1u64;
    while n <= max_n {
        grid.push(n);
        n = match n.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    if grid.last().is_some_and(|&last| last != max_n) {
        grid.push(max_n);
    }
    grid
}

/// Exact vs asymptotic particle entanglement of the split-single family
/// over [`doubling_grid`].
pub fn scan_split_singles(max_n: u64, exec: Execution) -> Vec<ScalingRow> {
    let grid = doubling_grid(max_n);
    exec.map(&grid, |&n| {
        let exact = ep_split_singles_exact(n);
        let asymptote = ep_split_singles_asymptote(n);
        ScalingRow {
            count: n as usize,
            exact,
            asymptote: Some(asymptote),
            difference: Some(exact - asymptote),
            ratio: Some(exact / n as f64),
        }
    })
}
