//! Low-lying spectra of the truncated Hamiltonians, the trial-state energy,
//! and the comparison reports built on them.

mod decomposition;
mod effective;
mod eigen;
mod report;
mod trial;

pub use decomposition::{quadratic_decomposition_check, DecompositionDims, DecompositionReport};
pub use effective::{effective_hamiltonian, effective_spectrum, mediated_potential, EffectiveSpectrum};
pub use eigen::{
    dense, lanczos, lowest_eigenpairs, lowest_eigenvalues, EigenMethod, EigenOptions, Eigenpairs, LinearOperator,
    DENSE_LIMIT,
};
pub use report::{
    corollary_overlap, envelope_shape, theorem1_compare, CompareConfig, CutoffRule, OverlapReport, PhysicalShape,
    ReportDims, SpectrumReport, DEGENERACY_GAP,
};
pub use trial::{
    lunes_complete, restricted_lune, restricted_resolvent_sum, trial_state_energy, trial_state_energy_explicit,
    trial_state_vector, TrialEnergy,
};
