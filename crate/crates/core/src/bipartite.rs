//! Alice/Bob mode partitions, local particle-number sectors and reduced
//! density matrices.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{Amplitude, FockState, Occupation, Statistics};

/// Sectors with probability at or below this are left out of a
/// decomposition.
pub const SECTOR_TOLERANCE: f64 = 1e-12;

const HERMITICITY_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-9;

/// Modes `0..alice` belong to Alice, the remaining `bob` modes to Bob.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ModePartition {
    alice: usize,
    bob: usize,
}

impl ModePartition {
    pub fn new(alice_modes: usize, total_modes: usize) -> Result<Self> {
        if alice_modes > total_modes {
            return Err(Error::InvalidPartition {
                alice: alice_modes,
                modes: total_modes,
            });
        }
        Ok(ModePartition {
            alice: alice_modes,
            bob: total_modes - alice_modes,
        })
    }

    pub fn alice_modes(&self) -> usize {
        self.alice
    }

    pub fn bob_modes(&self) -> usize {
        self.bob
    }

    pub fn modes(&self) -> usize {
        self.alice + self.bob
    }

    pub(crate) fn check(&self, s: &FockState) -> Result<()> {
        if self.modes() != s.mode_count() {
            return Err(Error::InvalidPartition {
                alice: self.alice,
                modes: s.mode_count(),
            });
        }
        Ok(())
    }

    /// Particles in Alice's block for one basis ket.
    pub fn alice_count(&self, occ: &Occupation) -> usize {
        occ.split(self.alice).0.iter().map(|&n| n as usize).sum()
    }
}

impl fmt::Display for ModePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.alice, self.bob)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
}

/// Projects onto the subspace where Alice holds exactly `n` particles.
/// Returns the unnormalized projection and its probability.
pub fn project_local_number(
    s: &FockState,
    p: ModePartition,
    n: usize,
) -> Result<(FockState, f64)> {
    p.check(s)?;
    if s.is_zero() {
        return Err(Error::EmptyState);
    }
    let projected = s.filter(|occ| p.alice_count(occ) == n);
    let prob = projected.norm_sqr() / s.norm_sqr();
    Ok((projected, prob))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    /// Particles on Alice's side.
    pub n: usize,
    pub probability: f64,
    /// Unnormalized projection of the parent state.
    pub state: FockState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorDecomposition {
    pub sectors: Vec<Sector>,
}

impl SectorDecomposition {
    pub fn iter(&self) -> std::slice::Iter<'_, Sector> {
        self.sectors.iter()
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.sectors.iter().map(|s| s.n as f64 * s.probability).sum()
    }

    /// Variance of Alice's particle number.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.sectors
            .iter()
            .map(|s| {
                let d = s.n as f64 - mean;
                d * d * s.probability
            })
            .sum()
    }
}

/// Splits `s` into its non-empty local particle-number sectors, ascending
/// in `n`.
pub fn sector_decomposition(s: &FockState, p: ModePartition) -> Result<SectorDecomposition> {
    p.check(s)?;
    if s.is_zero() {
        return Err(Error::EmptyState);
    }
    let mut groups: BTreeMap<usize, Vec<(Occupation, Amplitude)>> = BTreeMap::new();
    for (occ, amp) in s.terms() {
        groups
            .entry(p.alice_count(occ))
            .or_default()
            .push((occ.clone(), *amp));
    }
    let total = s.norm_sqr();
    let mut sectors = Vec::with_capacity(groups.len());
    for (n, terms) in groups {
        let state = FockState::new(s.stats(), s.mode_count(), terms)?;
        let probability = state.norm_sqr() / total;
        if probability > SECTOR_TOLERANCE {
            sectors.push(Sector {
                n,
                probability,
                state,
            });
        }
    }
    Ok(SectorDecomposition { sectors })
}

/// Label of one row/column of a [`DensityMatrix`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BasisLabel {
    /// Local occupation vector of one party.
    Occupation(Occupation),
    /// Single-particle mode index.
    Mode(usize),
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::Occupation(o) => write!(f, "|{o}>"),
            BasisLabel::Mode(m) => write!(f, "mode {m}"),
        }
    }
}

/// Hermitian, unit-trace matrix with labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Amplitude>,
    labels: Vec<BasisLabel>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace.
    pub fn new(entries: DMatrix<Amplitude>, labels: Vec<BasisLabel>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotDensityMatrix(format!(
                "shape {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if labels.len() != entries.nrows() {
            return Err(Error::NotDensityMatrix(format!(
                "{} labels for dimension {}",
                labels.len(),
                entries.nrows()
            )));
        }
        let d = entries.nrows();
        for i in 0..d {
            for j in 0..=i {
                let diff = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if diff > HERMITICITY_TOLERANCE {
                    return Err(Error::NotDensityMatrix(format!(
                        "not Hermitian at ({i}, {j}), deviation {diff:e}"
                    )));
                }
            }
        }
        let trace = entries.trace();
        if (trace - Amplitude::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::NotDensityMatrix(format!("trace {trace}")));
        }
        Ok(DensityMatrix { entries, labels })
    }

    /// Divides by the trace, then validates.
    pub fn from_unnormalized(entries: DMatrix<Amplitude>, labels: Vec<BasisLabel>) -> Result<Self> {
        let trace = entries.trace().re;
        if !(trace > 0.0) {
            return Err(Error::NotDensityMatrix(format!("trace {trace}")));
        }
        let mut m = entries / Amplitude::new(trace, 0.0);
        // Symmetrize away rounding in the products that built the matrix.
        let adj = m.adjoint();
        m = (m + adj) * Amplitude::new(0.5, 0.0);
        Self::new(m, labels)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn entries(&self) -> &DMatrix<Amplitude> {
        &self.entries
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> Amplitude {
        self.entries[(i, j)]
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = match self.dim() {
            0 => Vec::new(),
            1 => vec![self.entries[(0, 0)].re],
            _ => self
                .entries
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .collect(),
        };
        vals.sort_by(|a, b| b.total_cmp(a));
        vals
    }
}

/// State amplitudes arranged as a matrix with Alice's local occupations as
/// rows and Bob's as columns. Stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    rows: Vec<Occupation>,
    cols: Vec<Occupation>,
    entries: Vec<(usize, usize, Amplitude)>,
}

impl CoefficientMatrix {
    pub fn from_state(s: &FockState, p: ModePartition) -> Result<Self> {
        p.check(s)?;
        if s.is_zero() {
            return Err(Error::EmptyState);
        }
        let mut row_ix: BTreeMap<&[u8], usize> = BTreeMap::new();
        let mut col_ix: BTreeMap<&[u8], usize> = BTreeMap::new();
        for (occ, _) in s.terms() {
            let (a, b) = occ.split(p.alice_modes());
            row_ix.insert(a, 0);
            col_ix.insert(b, 0);
        }
        for (i, v) in row_ix.values_mut().enumerate() {
            *v = i;
        }
        for (i, v) in col_ix.values_mut().enumerate() {
            *v = i;
        }
        let entries = s
            .terms()
            .map(|(occ, amp)| {
                let (a, b) = occ.split(p.alice_modes());
                (row_ix[a], col_ix[b], *amp)
            })
            .collect();
        Ok(CoefficientMatrix {
            rows: row_ix.keys().map(|&k| Occupation::from(k)).collect(),
            cols: col_ix.keys().map(|&k| Occupation::from(k)).collect(),
            entries,
        })
    }

    /// Alice-side labels, lexicographic.
    pub fn rows(&self) -> &[Occupation] {
        &self.rows
    }

    /// Bob-side labels, lexicographic.
    pub fn cols(&self) -> &[Occupation] {
        &self.cols
    }

    pub fn to_dense(&self) -> DMatrix<Amplitude> {
        let mut m = DMatrix::zeros(self.rows.len(), self.cols.len());
        for &(r, c, a) in &self.entries {
            m[(r, c)] += a;
        }
        m
    }

    pub fn from_dense(rows: Vec<Occupation>, cols: Vec<Occupation>, m: &DMatrix<Amplitude>) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() > crate::fock::PRUNE_TOLERANCE {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        CoefficientMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Applies `u` to the row space, i.e. a change of Alice's local basis.
    pub fn transform_rows(&self, u: &DMatrix<Amplitude>) -> Result<Self> {
        if u.nrows() != self.rows.len() || u.ncols() != self.rows.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} row transform for {} rows",
                u.nrows(),
                u.ncols(),
                self.rows.len()
            )));
        }
        let m = u * self.to_dense();
        Ok(Self::from_dense(self.rows.clone(), self.cols.clone(), &m))
    }

    /// Reassembles the state the matrix describes.
    pub fn to_state(&self, stats: Statistics) -> Result<FockState> {
        let modes = self.rows.first().map_or(0, Occupation::len) + self.cols.first().map_or(0, Occupation::len);
        let terms = self.entries.iter().map(|&(r, c, a)| {
            let mut occ = self.rows[r].as_slice().to_vec();
            occ.extend_from_slice(self.cols[c].as_slice());
            (occ, a)
        });
        FockState::new(stats, modes, terms)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum()
    }

    /// Groups entries into blocks that share no row or column. The Schmidt
    /// spectrum is the union of the blocks' spectra.
    fn blocks(&self) -> Vec<Vec<(usize, usize, Amplitude)>> {
        let nr = self.rows.len();
        let mut parent: Vec<usize> = (0..nr + self.cols.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(r, c, _) in &self.entries {
            let (a, b) = (find(&mut parent, r), find(&mut parent, nr + c));
            if a != b {
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, Vec<(usize, usize, Amplitude)>> = BTreeMap::new();
        for &e in &self.entries {
            let root = find(&mut parent, e.0);
            groups.entry(root).or_default().push(e);
        }
        groups.into_values().collect()
    }

    /// Normalized squared Schmidt coefficients, descending.
    pub fn schmidt_probabilities(&self, exec: Execution) -> Vec<f64> {
        let total = self.norm_sqr();
        let blocks = self.blocks();
        let mut probs: Vec<f64> = exec
            .map(&blocks, |block| block_singular_values_sqr(block))
            .into_iter()
            .flatten()
            .map(|s2| s2 / total)
            .collect();
        probs.sort_by(|a, b| b.total_cmp(a));
        probs
    }
}

fn block_singular_values_sqr(block: &[(usize, usize, Amplitude)]) -> Vec<f64> {
    let mut rows: Vec<usize> = block.iter().map(|e| e.0).collect();
    let mut cols: Vec<usize> = block.iter().map(|e| e.1).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    if rows.len() == 1 || cols.len() == 1 {
        return vec![block.iter().map(|e| e.2.norm_sqr()).sum()];
    }
    let mut m = DMatrix::<Amplitude>::zeros(rows.len(), cols.len());
    for &(r, c, a) in block {
        let i = rows.binary_search(&r).unwrap();
        let j = cols.binary_search(&c).unwrap();
        m[(i, j)] += a;
    }
    m.singular_values().iter().map(|s| s * s).collect()
}

/// Reduced density matrix of one party, labelled by that party's local
/// occupation vectors in lexicographic order.
pub fn reduced_density_matrix(s: &FockState, p: ModePartition, side: Side) -> Result<DensityMatrix> {
    let coeffs = CoefficientMatrix::from_state(s, p)?;
    let m = coeffs.to_dense();
    let (rho, labels) = match side {
        Side::Alice => (&m * m.adjoint(), coeffs.rows().to_vec()),
        Side::Bob => (m.transpose() * m.conjugate(), coeffs.cols().to_vec()),
    };
    DensityMatrix::from_unnormalized(rho, labels.into_iter().map(BasisLabel::Occupation).collect())
}
