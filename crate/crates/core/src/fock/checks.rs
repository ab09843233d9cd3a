use std::collections::HashMap;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::operator::particle_hole;
use super::ops::{annihilate, create};
use super::{BasisKind, BosonModes, Couplings, FockBasis, FockState, ModeSet, Occ, Operator, OperatorKind, Term};
use crate::error::{Error, Result};
use crate::lattice::norm2;
use crate::potentials::FourierPotential;

/// Largest dimension for which checks build dense or fully enumerated matrices.
pub const DENSE_CAPACITY: usize = 5_000;

/// A unit vector with i.i.d. Gaussian entries. Entry `i` depends only on
/// `(seed, trial, i)`, so the result does not depend on thread scheduling.
pub fn random_state(dim: usize, seed: u64, trial: u64) -> Vec<f64> {
    const CHUNK: usize = 1024;
    let mut x = vec![0.0; dim];
    x.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        rng.set_word_pos((c * CHUNK * 4) as u128);
        for xi in out.iter_mut() {
            let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) / (1u64 << 53) as f64;
            let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            *xi = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    });
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

/// Outcome of comparing `ℛ*𝓗ℛ` with `Ẽ_F + λNM̃V̂₀ + ℍ`.
#[derive(Clone, Debug, Serialize)]
pub struct ParticleHoleReport {
    pub dim: usize,
    /// `Ẽ_F + λ N M̃ V̂₀`.
    pub constant: f64,
    /// Max-abs entry of `ℛ*𝓗ℛ − constant − ℍ`, with `ℛ` built as a signed basis bijection.
    pub residual: f64,
    /// The same residual with `ℛ*𝓗ℛ` applied as a conjugated operator.
    pub conjugated_residual: f64,
}

/// Checks the particle-hole identity on all `M̃`-fermion states over `modes`.
pub fn particle_hole_check(
    modes: Arc<ModeSet>,
    bosons: Arc<BosonModes>,
    n_bosons: usize,
    couplings: &Couplings,
) -> Result<ParticleHoleReport> {
    let m_in = modes.inside_count();
    let max_pairs = m_in.min(modes.len() - m_in);
    let phys = FockBasis::build(modes.clone(), bosons.clone(), n_bosons, BasisKind::Physical, None, DENSE_CAPACITY)?;
    let exc =
        FockBasis::build(modes.clone(), bosons, n_bosons, BasisKind::Excitation { max_pairs }, None, DENSE_CAPACITY)?;
    if phys.dim() != exc.dim() {
        return Err(Error::Validation(format!("physical dimension {} differs from excitation dimension {}", phys.dim(), exc.dim())));
    }
    let inside = modes.inside_indices();
    let mut map = vec![0usize; exc.dim()];
    let mut sign = vec![0.0; exc.dim()];
    for (i, s) in exc.states().iter().enumerate() {
        let (f, sg) = particle_hole(&s.fermions, &inside);
        let j = phys
            .index_of(&FockState { fermions: f, bosons: s.bosons.clone() })
            .ok_or_else(|| Error::Validation("particle-hole image outside the physical basis".into()))?;
        map[i] = j;
        sign[i] = sg;
    }
    let mut inverse = vec![0usize; exc.dim()];
    for (i, &j) in map.iter().enumerate() {
        inverse[j] = i;
    }

    let constant = modes.inside_energy() as f64 + couplings.lambda * n_bosons as f64 * m_in as f64 * couplings.v.zero_mode();
    let h_full = Operator::new(OperatorKind::HFull, couplings).assemble(&phys);
    let h_exc = Operator::new(OperatorKind::H, couplings).assemble(&exc);
    let conj = Operator::new(OperatorKind::RConjugatedH, couplings).assemble(&exc);

    let mut residual: f64 = 0.0;
    let mut conjugated_residual: f64 = 0.0;
    for i in 0..exc.dim() {
        let mut row: HashMap<usize, f64> = HashMap::new();
        for (jp, v) in h_full.row(map[i]) {
            let j = inverse[jp];
            *row.entry(j).or_default() += sign[i] * sign[j] * v;
        }
        let mut conj_row: HashMap<usize, f64> = conj.row(i).collect();
        *row.entry(i).or_default() -= constant;
        *conj_row.entry(i).or_default() -= constant;
        for (j, v) in h_exc.row(i) {
            *row.entry(j).or_default() -= v;
            *conj_row.entry(j).or_default() -= v;
        }
        residual = row.values().fold(residual, |m, v| m.max(v.abs()));
        conjugated_residual = conj_row.values().fold(conjugated_residual, |m, v| m.max(v.abs()));
    }
    Ok(ParticleHoleReport { dim: exc.dim(), constant, residual, conjugated_residual })
}

/// Anticommutator residuals on the full fermionic Fock space over `modes`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct CarReport {
    /// `{b_k, b_ℓ*} = χ⊥(k)δ_{kℓ}` and `{b_k, b_ℓ} = 0`.
    pub particles: f64,
    /// `{c_k, c_ℓ*} = χ(k)δ_{kℓ}` and `{c_k, c_ℓ} = 0`.
    pub holes: f64,
    /// `{b♭, c♭} = 0` for all four combinations.
    pub mixed: f64,
}

impl CarReport {
    pub fn max(&self) -> f64 {
        self.particles.max(self.holes).max(self.mixed)
    }
}

fn ladder(occ: &Occ, i: u16, dagger: bool) -> Option<(Occ, f64)> {
    if dagger {
        create(occ, i)
    } else {
        annihilate(occ, i)
    }
}

/// `{A, B}|s⟩` for single ladder operators, as a sparse vector.
fn anticommutator(s: &Occ, a: (u16, bool), b: (u16, bool)) -> HashMap<Occ, f64> {
    let mut out: HashMap<Occ, f64> = HashMap::new();
    for (first, second) in [(b, a), (a, b)] {
        if let Some((m, s1)) = ladder(s, first.0, first.1) {
            if let Some((r, s2)) = ladder(&m, second.0, second.1) {
                *out.entry(r).or_default() += s1 * s2;
            }
        }
    }
    out
}

/// Checks the canonical anticommutation relations of `b_k = χ⊥(k)a_k` and
/// `c_k = χ(k)a_k` on every configuration over `modes` (at most 12 modes).
pub fn car_check(modes: &ModeSet) -> Result<CarReport> {
    let d = modes.len();
    if d > 12 {
        return Err(Error::Capacity { dim: 1 << d.min(60), cap: 1 << 12 });
    }
    let states: Vec<Occ> = (0u32..1 << d).map(|mask| (0..d as u16).filter(|&i| mask >> i & 1 == 1).collect()).collect();
    let mut report = CarReport::default();
    for k in 0..d as u16 {
        for l in 0..d as u16 {
            let (ik, il) = (modes.is_inside(k), modes.is_inside(l));
            for s in &states {
                let mut worst: f64 = 0.0;
                for (dk, dl) in [(false, true), (false, false), (true, true)] {
                    let mut ac = anticommutator(s, (k, dk), (l, dl));
                    if !dk && dl && k == l {
                        *ac.entry(s.clone()).or_default() -= 1.0;
                    }
                    worst = ac.values().fold(worst, |m, v| m.max(v.abs()));
                }
                let slot = match (ik, il) {
                    (false, false) => &mut report.particles,
                    (true, true) => &mut report.holes,
                    _ => &mut report.mixed,
                };
                *slot = slot.max(worst);
            }
        }
    }
    Ok(report)
}

/// Excitation kinetic energy of a state.
fn t_value(modes: &ModeSet, s: &FockState) -> f64 {
    s.fermions
        .iter()
        .map(|&f| if modes.is_inside(f) { -norm2(modes.mode(f)) } else { norm2(modes.mode(f)) })
        .sum::<i64>() as f64
}

/// `χ a_k^♯ x` within the basis; outputs outside the basis are dropped.
fn apply_ladder(basis: &FockBasis, k: u16, dagger: bool, flag: bool, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; basis.dim()];
    if !flag {
        return y;
    }
    for (j, s) in basis.states().iter().enumerate() {
        if x[j] == 0.0 {
            continue;
        }
        if let Some((f, sg)) = ladder(&s.fermions, k, dagger) {
            if let Some(i) = basis.index_of(&FockState { fermions: f, bosons: s.bosons.clone() }) {
                y[i] += sg * x[j];
            }
        }
    }
    y
}

/// Residual of the pull-through formulas
/// `f(𝕋)b_k* = b_k* f(𝕋 + k²)`, `b_k f(𝕋) = f(𝕋 + k²) b_k`,
/// `f(𝕋)c_k* = c_k* f(𝕋 − k²)` and `c_k f(𝕋) = f(𝕋 − k²) c_k`
/// applied to a seeded random vector.
pub fn pull_through_check(basis: &FockBasis, f: impl Fn(f64) -> f64, k: crate::lattice::Momentum, seed: u64) -> Result<f64> {
    let modes = basis.modes();
    let i = modes.index_of(k).ok_or_else(|| Error::invalid(format!("mode {k:?} is not in the mode set")))?;
    let ek = norm2(k) as f64;
    let t: Vec<f64> = basis.states().iter().map(|s| t_value(modes, s)).collect();
    let x = random_state(basis.dim(), seed, 0);
    let fdiag = |shift: f64, v: &[f64]| -> Vec<f64> { v.iter().zip(&t).map(|(a, ti)| f(ti + shift) * a).collect() };
    let inside = modes.is_inside(i);
    let mut worst: f64 = 0.0;
    let mut compare = |a: Vec<f64>, b: Vec<f64>| {
        worst = a.iter().zip(&b).fold(worst, |m, (p, q)| m.max((p - q).abs()));
    };
    // particles: b = χ⊥ a
    compare(fdiag(0.0, &apply_ladder(basis, i, true, !inside, &x)), apply_ladder(basis, i, true, !inside, &fdiag(ek, &x)));
    compare(apply_ladder(basis, i, false, !inside, &fdiag(0.0, &x)), fdiag(ek, &apply_ladder(basis, i, false, !inside, &x)));
    // holes: c = χ a
    compare(fdiag(0.0, &apply_ladder(basis, i, true, inside, &x)), apply_ladder(basis, i, true, inside, &fdiag(-ek, &x)));
    compare(apply_ladder(basis, i, false, inside, &fdiag(0.0, &x)), fdiag(-ek, &apply_ladder(basis, i, false, inside, &x)));
    Ok(worst)
}

/// Max-abs entry of `A − B*` on `basis`.
pub fn hermiticity_residual(a: &Operator, b: &Operator, basis: &FockBasis) -> Result<f64> {
    let am = a.assemble(basis);
    let bt = b.assemble(basis).transpose();
    Ok(am.axpby(1.0, &bt, -1.0)?.max_abs())
}

/// Largest matrix element of `op` between states of different total momentum.
pub fn momentum_conservation_residual(op: &Operator, basis: &FockBasis) -> f64 {
    let m = op.assemble(basis);
    let momenta: Vec<_> = basis.states().iter().map(|s| basis.momentum(s)).collect();
    (0..basis.dim())
        .flat_map(|i| m.row(i).filter(|&(j, _)| momenta[j] != momenta[i]).map(|(_, v)| v.abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// Worst margins of the two inequalities over random zero-charge states.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub trials: usize,
    pub seed: u64,
    /// `⟨𝒩₊⟩ ≤ ⟨𝕋⟩`.
    pub number_vs_kinetic: InequalityMargin,
    /// `|⟨𝕍^diag⟩| ≤ 2N‖V̂‖_{ℓ¹}⟨𝒩₊⟩`.
    pub diagonal_bound: InequalityMargin,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InequalityMargin {
    pub violations: usize,
    /// Smallest `rhs − lhs` seen (negative means violated).
    pub worst_margin: f64,
}

impl InequalityReport {
    pub fn violations(&self) -> usize {
        self.number_vs_kinetic.violations + self.diagonal_bound.violations
    }
}

pub fn inequality_suite(basis: &FockBasis, v: &FourierPotential, trials: usize, seed: u64) -> Result<InequalityReport> {
    if !matches!(basis.kind(), BasisKind::Excitation { .. }) {
        return Err(Error::invalid("the inequality suite runs on zero-charge excitation bases"));
    }
    let n = basis.n_bosons() as f64;
    let t: Vec<f64> = basis.states().iter().map(|s| t_value(basis.modes(), s)).collect();
    let nplus: Vec<f64> = basis.states().iter().map(|s| 0.5 * s.fermions.len() as f64).collect();
    let vdiag = Operator::from_terms(vec![(1.0, Term::VDiag(v.clone()))]).assemble(basis);
    let bound = 2.0 * n * v.l1();
    let results: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let x = random_state(basis.dim(), seed, trial);
            let e_t: f64 = x.iter().zip(&t).map(|(a, b)| a * a * b).sum();
            let e_n: f64 = x.iter().zip(&nplus).map(|(a, b)| a * a * b).sum();
            let vx = vdiag.matvec(&x).expect("dimensions agree");
            let e_v: f64 = x.iter().zip(&vx).map(|(a, b)| a * b).sum();
            (e_t - e_n, bound * e_n - e_v.abs())
        })
        .collect();
    let tally = |idx: usize| {
        let mut m = InequalityMargin { violations: 0, worst_margin: f64::INFINITY };
        for r in &results {
            let margin = if idx == 0 { r.0 } else { r.1 };
            m.worst_margin = m.worst_margin.min(margin);
            if margin < -1e-12 {
                m.violations += 1;
            }
        }
        m
    };
    Ok(InequalityReport { trials, seed, number_vs_kinetic: tally(0), diagonal_bound: tally(1) })
}
