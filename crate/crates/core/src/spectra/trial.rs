//! The dressed trial state `Ψ = (1 − λℝ𝕍₊) Φ⊗Ω` with `ℝ = 𝕋⁻¹` on excited states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{BasisKind, Couplings, FockBasis, ModeSet, Operator, OperatorKind};
use crate::lattice::{add, norm2, sub, Momentum};
use crate::quad::KahanSum;

/// Pairs `(p, p − q)` of mode indices with `p` outside the Fermi ball and
/// `p − q` inside, i.e. the lune of `q` intersected with the mode set.
pub fn restricted_lune(modes: &ModeSet, q: Momentum) -> Vec<(u16, u16)> {
    modes
        .outside_indices()
        .into_iter()
        .filter_map(|p| {
            let h = modes.index_of(sub(modes.mode(p), q))?;
            modes.is_inside(h).then_some((p, h))
        })
        .collect()
}

/// `Σ (p² − (p−q)²)^{−α}` over the restricted lune.
pub fn restricted_resolvent_sum(modes: &ModeSet, q: Momentum, alpha: i32) -> f64 {
    let mut acc = KahanSum::new();
    for (p, h) in restricted_lune(modes, q) {
        acc.add(excitation_energy(modes, p, h).powi(-alpha));
    }
    acc.value()
}

/// Whether every full lune `L(q)`, `q` in `support`, lies inside the mode set.
pub fn lunes_complete(modes: &ModeSet, support: &[Momentum]) -> bool {
    support.iter().all(|&q| crate::lattice::lune_points(q, modes.radius()).iter().all(|&p| modes.index_of(p).is_some()))
}

fn excitation_energy(modes: &ModeSet, p: u16, h: u16) -> f64 {
    (norm2(modes.mode(p)) - norm2(modes.mode(h))) as f64
}

/// Energy bookkeeping of a trial state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct TrialEnergy {
    /// `‖Ψ‖²`.
    pub norm_sq: f64,
    /// `⟨Ψ, ℍΨ⟩`.
    pub expectation: f64,
    /// `⟨Ψ, ℍΨ⟩ / ‖Ψ‖²`.
    pub rayleigh: f64,
    /// `⟨Φ, hΦ⟩ − λ² Σ_k V̂(k)² D̃₁(k) ‖S_kΦ‖²`; the mediated part of the energy.
    pub e0: f64,
    /// `λ² ⟨Φ⊗Ω, 𝕍₋ (h ⊗ ℝ²) 𝕍₊ Φ⊗Ω⟩`.
    pub e1: f64,
    /// `λ³ ⟨Φ⊗Ω, 𝕍₋ ℝ 𝕍^diag ℝ 𝕍₊ Φ⊗Ω⟩`.
    pub e2: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for (x, y) in a.iter().zip(b) {
        acc.add(x * y);
    }
    acc.value()
}

/// Closed-form energy of `Ψ = (1 − λℝ𝕍₊)Φ⊗Ω` from lattice sums and boson
/// expectation values.
///
/// `basis` is the bosonic space of `Φ`; it must not be restricted to a
/// momentum sector because `S_kΦ` changes the boson momentum. Its mode set
/// supplies the fermionic modes. The result equals the explicit Fock-space
/// evaluation of [`trial_state_energy_explicit`] on any excitation basis
/// containing all one-pair states reachable from `Φ`.
pub fn trial_state_energy(basis: &FockBasis, phi: &[f64], c: &Couplings) -> Result<TrialEnergy> {
    if basis.sector().is_some() {
        return Err(Error::invalid("the closed-form trial energy needs a bosonic basis without a momentum sector"));
    }
    if basis.vacuum_indices().len() != basis.dim() {
        return Err(Error::invalid("the trial state starts from a purely bosonic vector"));
    }
    if phi.len() != basis.dim() {
        return Err(Error::Shape { expected: basis.dim(), got: phi.len() });
    }
    let modes = basis.modes().as_ref();
    let lambda = c.lambda;
    let h = Operator::new(OperatorKind::HKinetic, c).plus(1.0, crate::fock::Term::BosonPair(c.w.clone())).bind(basis);
    let h_phi = h.apply(phi)?;
    let norm_phi = dot(phi, phi);
    let h_expect = dot(phi, &h_phi);

    let support: Vec<(Momentum, f64)> = c.v.iter().collect();
    let mut shifted = Vec::with_capacity(support.len());
    let mut lunes = Vec::with_capacity(support.len());
    let (mut k_sum, mut norm_y, mut e1) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
    for &(k, vk) in &support {
        let sk = basis.boson_shift(k, phi)?;
        let lune = restricted_lune(modes, k);
        let d1: f64 = lune.iter().map(|&(p, q)| 1.0 / excitation_energy(modes, p, q)).sum();
        let d2: f64 = lune.iter().map(|&(p, q)| excitation_energy(modes, p, q).powi(-2)).sum();
        let sk_norm = dot(&sk, &sk);
        k_sum.add(vk * vk * d1 * sk_norm);
        norm_y.add(vk * vk * d2 * sk_norm);
        if d2 != 0.0 {
            e1.add(vk * vk * d2 * dot(&sk, &h.apply(&sk)?));
        }
        shifted.push(sk);
        lunes.push(lune);
    }

    // y(k, p) = V̂(k) / (p² − (p−k)²) is the one-pair amplitude of ℝ𝕍₊Φ⊗Ω.
    let y = |vk: f64, p: u16, hole: u16| vk / excitation_energy(modes, p, hole);
    let mut e2 = KahanSum::new();
    for (a, &(k, vk)) in support.iter().enumerate() {
        for (b, &(kp, vkp)) in support.iter().enumerate() {
            let q = sub(kp, k);
            let vq = c.v.coeff(q);
            if vq == 0.0 {
                continue;
            }
            let mut fermions = KahanSum::new();
            for &(p, hole) in &lunes[a] {
                let amp = y(vk, p, hole);
                if let Some(pq) = modes.index_of(add(modes.mode(p), q)) {
                    if !modes.is_inside(pq) {
                        fermions.add(y(vkp, pq, hole) * amp);
                    }
                }
                if let Some(h2) = modes.index_of(sub(modes.mode(p), kp)) {
                    if modes.is_inside(h2) {
                        fermions.add(-y(vkp, p, h2) * amp);
                    }
                }
            }
            let f = fermions.value();
            if f == 0.0 {
                continue;
            }
            let g = dot(&shifted[b], &basis.boson_shift(q, &shifted[a])?);
            e2.add(vq * g * f);
        }
    }

    let lambda2 = lambda * lambda;
    let e0 = h_expect - lambda2 * k_sum.value();
    let e1 = lambda2 * e1.value();
    let e2 = lambda2 * lambda * e2.value();
    let norm_sq = norm_phi + lambda2 * norm_y.value();
    let expectation = e0 + e1 + e2;
    Ok(TrialEnergy { norm_sq, expectation, rayleigh: expectation / norm_sq, e0, e1, e2 })
}

/// The same trial state built explicitly on `pair_basis` and evaluated with
/// the matrix-free `ℍ`. Only `norm_sq`, `expectation` and `rayleigh` are
/// filled in.
pub fn trial_state_energy_explicit(
    phi_basis: &FockBasis,
    phi: &[f64],
    pair_basis: &FockBasis,
    c: &Couplings,
) -> Result<TrialEnergy> {
    match pair_basis.kind() {
        BasisKind::Excitation { max_pairs } if max_pairs >= 1 => {}
        _ => return Err(Error::invalid("the explicit trial state needs an excitation basis with at least one pair")),
    }
    let psi = trial_state_vector(phi_basis, phi, pair_basis, c)?;
    let h_psi = Operator::new(OperatorKind::H, c).apply(pair_basis, &psi)?;
    let norm_sq = dot(&psi, &psi);
    let expectation = dot(&psi, &h_psi);
    Ok(TrialEnergy { norm_sq, expectation, rayleigh: expectation / norm_sq, ..TrialEnergy::default() })
}

/// `Ψ = Φ⊗Ω − λ 𝕋⁻¹ 𝕍₊ Φ⊗Ω` as a vector on `pair_basis`.
pub fn trial_state_vector(phi_basis: &FockBasis, phi: &[f64], pair_basis: &FockBasis, c: &Couplings) -> Result<Vec<f64>> {
    let x = pair_basis.embed(phi_basis, phi)?;
    let vp = Operator::new(OperatorKind::VPlus, c).apply(pair_basis, &x)?;
    let t = Operator::new(OperatorKind::T, c).apply(pair_basis, &vec![1.0; pair_basis.dim()])?;
    Ok(x.iter()
        .zip(&vp)
        .zip(&t)
        .map(|((xi, yi), ti)| if *ti == 0.0 { *xi } else { xi - c.lambda * yi / ti })
        .collect())
}
