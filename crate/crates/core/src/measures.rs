//! Entanglement and correlation functionals, all in bits.
//!
//! * mode entanglement: entropy of Alice's reduced state in the Fock basis;
//! * particle entanglement: the sector-weighted average
//!   `sum_n P_n E_M(Psi^(n))` over Alice's local particle number, i.e. the
//!   entanglement still available once local operations must conserve
//!   local particle number;
//! * single-particle entropies `S_b` / `S_f` of the one-body density matrix
//!   for two-particle states, and the fermionic correlation `S_f - 1`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bipartite::{
    project_local_number, reduced_density_matrix, sector_decomposition, BasisLabel,
    CoefficientMatrix, DensityMatrix, ModePartition, SectorDecomposition, Side,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{Amplitude, FockState, Statistics};

const NEGATIVITY_FLOOR: f64 = -1e-9;
const PAIRING_TOLERANCE: f64 = 1e-6;
/// Spectrum weights below this are dropped from returned distributions.
const SPECTRUM_CUTOFF: f64 = 1e-12;

/// `-sum p log2 p`, with `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Binary von Neumann entropy `-Tr[rho log2 rho]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = rho.eigenvalues();
    if let Some(&min) = eig.last() {
        if min < NEGATIVITY_FLOOR {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {min:e}")));
        }
    }
    let clamped: Vec<f64> = eig.iter().map(|l| l.clamp(0.0, 1.0)).collect();
    Ok(shannon_entropy(&clamped))
}

/// Mode entanglement from the singular values of the coefficient matrix.
pub fn mode_entanglement(s: &FockState, p: ModePartition) -> Result<f64> {
    mode_entanglement_with(s, p, Execution::default())
}

pub fn mode_entanglement_with(s: &FockState, p: ModePartition, exec: Execution) -> Result<f64> {
    let cm = CoefficientMatrix::from_state(s, p)?;
    Ok(shannon_entropy(&cm.schmidt_probabilities(exec)))
}

/// Mode entanglement from the eigenvalues of an explicitly formed `rho_A`.
/// Agrees with [`mode_entanglement`]; intended for small states.
pub fn mode_entanglement_via_density(s: &FockState, p: ModePartition) -> Result<f64> {
    von_neumann_entropy(&reduced_density_matrix(s, p, Side::Alice)?)
}

/// Entropy of a coefficient matrix read as a bipartite pure state.
pub fn coefficient_entropy(cm: &CoefficientMatrix) -> f64 {
    shannon_entropy(&cm.schmidt_probabilities(Execution::Sequential))
}

/// Particle entanglement under the local particle-number superselection
/// rule.
pub fn particle_entanglement(s: &FockState, p: ModePartition) -> Result<f64> {
    particle_entanglement_with(s, p, Execution::default())
}

pub fn particle_entanglement_with(s: &FockState, p: ModePartition, exec: Execution) -> Result<f64> {
    let sectors = sector_decomposition(s, p)?;
    particle_entanglement_of(&sectors, p, exec)
}

/// Particle entanglement from an already computed decomposition.
pub fn particle_entanglement_of(
    sectors: &SectorDecomposition,
    p: ModePartition,
    exec: Execution,
) -> Result<f64> {
    let parts = exec.map(&sectors.sectors, |sec| {
        mode_entanglement_with(&sec.state, p, Execution::Sequential).map(|e| sec.probability * e)
    });
    parts.into_iter().sum()
}

fn require_two(s: &FockState) -> Result<()> {
    if s.is_zero() {
        return Err(Error::EmptyState);
    }
    if s.particle_number() != 2 {
        return Err(Error::WrongParticleNumber {
            expected: 2,
            found: s.particle_number(),
        });
    }
    Ok(())
}

/// One-body matrix `rho[m', m] = <c†_m c_m'> / sum_v <c†_v c_v>` over the
/// given modes.
fn one_body_matrix(s: &FockState, modes: std::ops::Range<usize>) -> Result<DensityMatrix> {
    let lowered: Vec<FockState> = modes
        .clone()
        .map(|m| s.annihilate(m))
        .collect::<Result<_>>()?;
    let d = lowered.len();
    let mut m = DMatrix::<Amplitude>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            // <Psi| c†_j c_i |Psi> = <c_j Psi | c_i Psi>
            m[(i, j)] = lowered[j].inner_product(&lowered[i])?;
        }
    }
    DensityMatrix::from_unnormalized(m, modes.map(BasisLabel::Mode).collect())
}

/// Single-particle density matrix over all modes of a two-particle state.
pub fn single_particle_dm(s: &FockState) -> Result<DensityMatrix> {
    require_two(s)?;
    one_body_matrix(s, 0..s.mode_count())
}

/// `S_b` for bosons, `S_f` for fermions.
pub fn single_particle_entropy(s: &FockState) -> Result<f64> {
    von_neumann_entropy(&single_particle_dm(s)?)
}

/// Fermionic quantum correlation `S_f - 1`.
pub fn qc_fermions(s: &FockState) -> Result<f64> {
    if s.stats() != Statistics::Fermion {
        return Err(Error::WrongStatistics {
            expected: Statistics::Fermion,
        });
    }
    Ok(single_particle_entropy(s)? - 1.0)
}

/// Weights of the canonical two-particle decomposition.
///
/// Bosons: the eigenvalues of the one-body matrix, `|beta_mu|^2`.
/// Fermions: eigenvalues come in degenerate pairs; the pair sums are the
/// `|phi_nu|^2`. Vanishing weights are dropped.
pub fn py_spectrum(s: &FockState) -> Result<Vec<f64>> {
    let rho = single_particle_dm(s)?;
    let mut eig: Vec<f64> = rho.eigenvalues().into_iter().map(|l| l.max(0.0)).collect();
    match s.stats() {
        Statistics::Boson => {
            eig.retain(|&l| l > SPECTRUM_CUTOFF);
            Ok(eig)
        }
        Statistics::Fermion => {
            if eig.len() % 2 == 1 {
                let last = eig.pop().unwrap_or(0.0);
                if last > PAIRING_TOLERANCE {
                    return Err(Error::DegeneracyViolation(format!(
                        "odd dimension leaves unpaired eigenvalue {last:e}"
                    )));
                }
            }
            let mut weights = Vec::with_capacity(eig.len() / 2);
            for pair in eig.chunks(2) {
                if (pair[0] - pair[1]).abs() > PAIRING_TOLERANCE {
                    return Err(Error::DegeneracyViolation(format!(
                        "{} and {} differ",
                        pair[0], pair[1]
                    )));
                }
                let w = pair[0] + pair[1];
                if w > SPECTRUM_CUTOFF {
                    weights.push(w);
                }
            }
            Ok(weights)
        }
    }
}

/// One-body matrix over Alice's modes, built from the sector where Alice
/// holds exactly one particle, together with that sector's probability.
pub fn modified_single_particle_dm(s: &FockState, p: ModePartition) -> Result<(DensityMatrix, f64)> {
    require_two(s)?;
    let (sector, prob) = project_local_number(s, p, 1)?;
    if sector.is_zero() {
        return Err(Error::EmptySector(1));
    }
    let rho = one_body_matrix(&sector, 0..p.alice_modes())?;
    Ok((rho, prob))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSummary {
    pub n: usize,
    pub probability: f64,
    pub mode_entanglement: f64,
}

/// All measures of one state. Inapplicable measures are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub stats: Statistics,
    pub particles: usize,
    pub modes: usize,
    pub alice_modes: usize,
    pub e_m: f64,
    pub e_p: f64,
    pub s_single: Option<f64>,
    pub qc_fermion: Option<f64>,
    pub sectors: Vec<SectorSummary>,
    pub variance_alice: f64,
}

pub fn full_report(s: &FockState, p: ModePartition) -> Result<MeasureReport> {
    full_report_with(s, p, Execution::default())
}

pub fn full_report_with(s: &FockState, p: ModePartition, exec: Execution) -> Result<MeasureReport> {
    let decomposition = sector_decomposition(s, p)?;
    let e_m = mode_entanglement_with(s, p, exec)?;
    let sector_em = exec.map(&decomposition.sectors, |sec| {
        mode_entanglement_with(&sec.state, p, Execution::Sequential)
    });
    let mut sectors = Vec::with_capacity(sector_em.len());
    let mut e_p = 0.0;
    for (sec, em) in decomposition.iter().zip(sector_em) {
        let em = em?;
        e_p += sec.probability * em;
        sectors.push(SectorSummary {
            n: sec.n,
            probability: sec.probability,
            mode_entanglement: em,
        });
    }
    let (s_single, qc_fermion) = if s.particle_number() == 2 {
        let s1 = single_particle_entropy(s)?;
        let qc = (s.stats() == Statistics::Fermion).then(|| s1 - 1.0);
        (Some(s1), qc)
    } else {
        (None, None)
    };
    Ok(MeasureReport {
        stats: s.stats(),
        particles: s.particle_number(),
        modes: s.mode_count(),
        alice_modes: p.alice_modes(),
        e_m,
        e_p,
        s_single,
        qc_fermion,
        sectors,
        variance_alice: decomposition.variance(),
    })
}
