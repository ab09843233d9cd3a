use serde::Serialize;

use super::eigen::{lowest_eigenpairs, EigenOptions, Eigenpairs};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, Operator, Term};
use crate::potentials::{convolve, effective_potential_kf, FermiLimit, FourierPotential};
use crate::lattice::LuneSumTable;

/// The potential subtracted from `W` in the effective boson Hamiltonian.
///
/// For a finite Fermi momentum this is `W_{k_F}`. In the limit it is
/// `V∗V − |V̂(0)|²`, i.e. the self-convolution with its zero mode removed,
/// which is where `W_{k_F}` converges to.
pub fn mediated_potential(v: &FourierPotential, limit: FermiLimit, table: &LuneSumTable) -> FourierPotential {
    match limit {
        FermiLimit::Finite(r) => effective_potential_kf(v, r, table).potential,
        FermiLimit::Infinite => convolve(v, v).map_coeffs(|k, c| if k == [0, 0, 0] { 0.0 } else { c }),
    }
}

/// `Σ_i (−Δ_i) + (1/N) Σ_{i<j} (W − W_{k_F})(x_i − x_j)` as an operator on bosonic bases.
pub fn effective_hamiltonian(
    v: &FourierPotential,
    w: &FourierPotential,
    limit: FermiLimit,
    table: &LuneSumTable,
) -> Operator {
    let pair = w.sub(&mediated_potential(v, limit, table));
    Operator::from_terms(vec![(1.0, Term::BosonKinetic), (1.0, Term::BosonPair(pair))])
}

/// Low-lying spectrum of the effective boson Hamiltonian.
#[derive(Clone, Debug, Serialize)]
pub struct EffectiveSpectrum {
    pub eigen: Eigenpairs,
    /// `µ₂ − µ₁` when at least two values were requested.
    pub gap: Option<f64>,
    /// Value at the origin of the subtracted potential, e.g. `W_{k_F}(0)`.
    pub mediated_at_origin: f64,
}

/// Eigenvalues of the effective Hamiltonian on a bosonic `basis`.
pub fn effective_spectrum(
    basis: &FockBasis,
    v: &FourierPotential,
    w: &FourierPotential,
    limit: FermiLimit,
    n: usize,
    table: &LuneSumTable,
    opts: EigenOptions,
) -> Result<EffectiveSpectrum> {
    if basis.vacuum_indices().len() != basis.dim() {
        return Err(Error::invalid("the effective spectrum needs a basis without fermionic excitations"));
    }
    let op = effective_hamiltonian(v, w, limit, table);
    let eigen = lowest_eigenpairs(&op.bind(basis), n.min(basis.dim()), opts)?;
    let mediated = mediated_potential(v, limit, table);
    let mediated_at_origin =
        crate::quad::kahan(mediated.iter().map(|(_, c)| c)) / crate::potentials::two_pi_three_halves();
    Ok(EffectiveSpectrum { gap: eigen.gap(), eigen, mediated_at_origin })
}
