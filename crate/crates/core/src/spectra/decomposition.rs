//! Numerical check of the completed square `𝕋 + λ𝕍₋ + λ𝕍₊ ≥ −λ²𝕍₋𝕋⁻¹𝕍₊`
//! and of the four-term split of `𝕍₋𝕋⁻¹𝕍₊`.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::trial::{lunes_complete, restricted_lune};
use crate::error::{Error, Result};
use crate::fock::ops::{annihilate, create, shift};
use crate::fock::{BosonModes, Couplings, FockBasis, FockState, ModeSet, Occ, Operator, OperatorKind, Term, DENSE_CAPACITY};
use crate::lattice::{add, neg, norm2, sub, FermiRadius, LuneSumTable, Momentum};
use crate::potentials::{coupling, effective_potential_kf, FourierPotential};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecompositionDims {
    pub total: usize,
    pub vacuum: usize,
    pub one_pair: usize,
    pub two_pair: usize,
}

/// Residuals of the quadratic decomposition on a `0 ⊕ 1 ⊕ 2`-pair basis.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub dims: DecompositionDims,
    pub lambda: f64,
    /// Every lune `L(k)` with `V̂(k) ≠ 0` fits in the mode set.
    pub lunes_complete: bool,
    /// Vacuum block of `𝕍₋𝕋⁻¹𝕍₊` against `Σ_k V̂(k)² D̃₁(k) ⟨S_k a, S_k b⟩`.
    pub vacuum_closed_form_residual: f64,
    /// Vacuum block against `λ⁻²[(1/N) Σ_{i<j} W_{k_F}(x_i − x_j) + ½W_{k_F}(0)]`,
    /// on columns whose bosons stay inside the boson modes under every shift.
    pub vacuum_mediated_residual: f64,
    pub interior_states: usize,
    /// `max |A₁ + A₂ + A₃ + A₄ − 𝕍₋𝕋⁻¹𝕍₊|` on the one-pair block.
    pub sum_residual: f64,
    /// Largest entries of the four blocks.
    pub block_norms: [f64; 4],
    pub max_asymmetry: f64,
    /// One-pair states whose bosons stay in the boson modes under every
    /// shift by `±k`, `V̂(k) ≠ 0`. On them the truncated shifts agree with
    /// the untruncated ones, so the blocks are compressions of the full operators.
    pub interior_one_pair: usize,
    /// Smallest eigenvalues of `−A₂` and `−A₃` on the interior one-pair states.
    pub min_eig_neg_a2: f64,
    pub min_eig_neg_a3: f64,
    /// The same over the whole one-pair block, where boundary truncation can spoil the sign.
    pub min_eig_neg_a2_full: f64,
    pub min_eig_neg_a3_full: f64,
    /// `max |𝕋 + λ(𝕍₋ + 𝕍₊) − X*X + λ²𝕍₋𝕋⁺𝕍₊|` with `X = 𝕋^{1/2} + λ𝕋^{−1/2}𝕍₊`.
    pub completed_square_residual: f64,
}

impl DecompositionReport {
    /// All residuals within `tol` and both negated blocks positive semidefinite up to `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.vacuum_closed_form_residual <= tol
            && self.vacuum_mediated_residual <= tol
            && self.sum_residual <= tol
            && self.min_eig_neg_a2 >= -tol
            && self.min_eig_neg_a3 >= -tol
            && self.completed_square_residual <= tol
    }
}

/// Runs the decomposition check for `N` bosons on `bosons`, fermion modes
/// `{|k|² ≤ cutoff2}`, and up to two particle-hole pairs.
pub fn quadratic_decomposition_check(
    v: &FourierPotential,
    n_bosons: usize,
    radius: FermiRadius,
    cutoff2: i64,
    bosons: BosonModes,
) -> Result<DecompositionReport> {
    let modes = Arc::new(ModeSet::ball(radius, cutoff2)?);
    let basis = FockBasis::excitation(modes.clone(), Arc::new(bosons), n_bosons, 2, None)?;
    let lambda = coupling(n_bosons, radius);
    let c = Couplings { lambda, v: v.clone(), w: FourierPotential::zero(v.cutoff()) };
    let dim = basis.dim();

    let mut by_pairs: [Vec<usize>; 3] = Default::default();
    for i in 0..dim {
        by_pairs[basis.pair_count(i)].push(i);
    }
    let [vac, one, two] = &by_pairs;
    if one.len() > DENSE_CAPACITY {
        return Err(Error::Capacity { dim: one.len(), cap: DENSE_CAPACITY });
    }
    let dims = DecompositionDims { total: dim, vacuum: vac.len(), one_pair: one.len(), two_pair: two.len() };

    let t = Operator::new(OperatorKind::T, &c).apply(&basis, &vec![1.0; dim])?;
    let t_plus: Vec<f64> = t.iter().map(|&x| if x > 0.0 { 1.0 / x } else { 0.0 }).collect();
    let ones = vec![1.0; dim];
    let vp = Operator::new(OperatorKind::VPlus, &c).assemble(&basis);
    let vm = Operator::new(OperatorKind::VMinus, &c).assemble(&basis);
    let m = vm.matmul(&vp.scale(&t_plus, &ones))?;

    let support: Vec<(Momentum, f64)> = v.iter().collect();

    // (a) the vacuum block
    let m_vac = m.restrict(vac, vac).to_dense();
    let unit = |i: usize| {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        e
    };
    let mut closed = DMatrix::<f64>::zeros(vac.len(), vac.len());
    for &(k, vk) in &support {
        let d1: f64 = restricted_lune(&modes, k).iter().map(|&(p, h)| 1.0 / energy_gap(&modes, p, h)).sum();
        let shifted: Vec<Vec<f64>> = vac.iter().map(|&i| basis.boson_shift(k, &unit(i))).collect::<Result<_>>()?;
        for a in 0..vac.len() {
            for b in 0..vac.len() {
                let g: f64 = shifted[a].iter().zip(&shifted[b]).map(|(x, y)| x * y).sum();
                closed[(a, b)] += vk * vk * d1 * g;
            }
        }
    }
    let vacuum_closed_form_residual = (&m_vac - &closed).abs().max();

    let table = LuneSumTable::new();
    let w_kf = effective_potential_kf(v, radius, &table);
    let half_w0 = 0.5 * w_kf.value_at_origin();
    let pair_op = Operator::from_terms(vec![(1.0, Term::BosonPair(w_kf.potential))]).assemble(&basis).restrict(vac, vac);
    let is_interior = |i: usize| interior_bosons(&basis, i, &support);
    let interior: Vec<usize> = (0..vac.len()).filter(|&b| is_interior(vac[b])).collect();
    let mut vacuum_mediated_residual: f64 = 0.0;
    for &b in &interior {
        for a in 0..vac.len() {
            let diag = if a == b { half_w0 } else { 0.0 };
            let expected = (pair_op.get(a, b) + diag) / (lambda * lambda);
            vacuum_mediated_residual = vacuum_mediated_residual.max((m_vac[(a, b)] - expected).abs());
        }
    }

    // (b) the one-pair blocks
    let blocks = one_pair_blocks(&basis, &modes, one, &support)?;
    let m_one = m.restrict(one, one).to_dense();
    let total = blocks.iter().fold(DMatrix::zeros(one.len(), one.len()), |acc, b| acc + b);
    let sum_residual = (&total - &m_one).abs().max();
    let block_norms = [0, 1, 2, 3].map(|n| blocks[n].abs().max());
    let max_asymmetry = blocks.iter().map(|b| (b - b.transpose()).abs().max()).fold(0.0, f64::max);
    let inner: Vec<usize> = (0..one.len()).filter(|&a| is_interior(one[a])).collect();
    let min_eig = |b: &DMatrix<f64>, idx: &[usize]| {
        if idx.is_empty() {
            return 0.0;
        }
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| -0.5 * (b[(idx[r], idx[c])] + b[(idx[c], idx[r])]));
        SymmetricEigen::new(sub).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let all: Vec<usize> = (0..one.len()).collect();

    // (c) the completed square
    let t_mat = CsrMatrix::diagonal(&t);
    let l = t_mat.axpby(1.0, &vm.axpby(1.0, &vp, 1.0)?, lambda)?;
    let sqrt_t: Vec<f64> = t.iter().map(|x| x.max(0.0).sqrt()).collect();
    let inv_sqrt_t: Vec<f64> = t_plus.iter().map(|x| x.sqrt()).collect();
    let x = CsrMatrix::diagonal(&sqrt_t).axpby(1.0, &vp.scale(&inv_sqrt_t, &ones), lambda)?;
    let square = x.transpose().matmul(&x)?.axpby(1.0, &m, -lambda * lambda)?;
    let completed_square_residual = l.axpby(1.0, &square, -1.0)?.max_abs();

    Ok(DecompositionReport {
        dims,
        lambda,
        lunes_complete: lunes_complete(&modes, &support.iter().map(|e| e.0).collect::<Vec<_>>()),
        vacuum_closed_form_residual,
        vacuum_mediated_residual,
        interior_states: interior.len(),
        sum_residual,
        block_norms,
        max_asymmetry,
        interior_one_pair: inner.len(),
        min_eig_neg_a2: min_eig(&blocks[1], &inner),
        min_eig_neg_a3: min_eig(&blocks[2], &inner),
        min_eig_neg_a2_full: min_eig(&blocks[1], &all),
        min_eig_neg_a3_full: min_eig(&blocks[2], &all),
        completed_square_residual,
    })
}

fn interior_bosons(basis: &FockBasis, i: usize, support: &[(Momentum, f64)]) -> bool {
    let set = basis.boson_modes();
    basis.state(i).bosons.iter().all(|&m| {
        let km = set.mode(m);
        support.iter().all(|&(k, _)| set.index_of(add(km, k)).is_some() && set.index_of(sub(km, k)).is_some())
    })
}

fn energy(modes: &ModeSet, i: u16) -> f64 {
    norm2(modes.mode(i)) as f64
}

fn energy_gap(modes: &ModeSet, p: u16, h: u16) -> f64 {
    energy(modes, p) - energy(modes, h)
}

/// Applies fermionic annihilations then creations in order, tracking the sign.
fn fermion_move(f: &Occ, remove: &[u16], insert: &[u16]) -> Option<(Occ, f64)> {
    let mut occ = f.clone();
    let mut sign = 1.0;
    for &r in remove {
        let (next, s) = annihilate(&occ, r)?;
        occ = next;
        sign *= s;
    }
    for &i in insert {
        let (next, s) = create(&occ, i)?;
        occ = next;
        sign *= s;
    }
    Some((occ, sign))
}

/// Dense `A₁, …, A₄` on the one-pair states `one`, built from their operator
/// expressions with the boson factor `V̂(k)V̂(ℓ) S_{−k} S_ℓ`.
fn one_pair_blocks(
    basis: &FockBasis,
    modes: &ModeSet,
    one: &[usize],
    support: &[(Momentum, f64)],
) -> Result<[DMatrix<f64>; 4]> {
    let n = one.len();
    let mut blocks = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
    let mut local = vec![usize::MAX; basis.dim()];
    for (a, &i) in one.iter().enumerate() {
        local[i] = a;
    }
    let inside = |k: Momentum| modes.index_of(k).filter(|&i| modes.is_inside(i));
    let outside = |k: Momentum| modes.index_of(k).filter(|&i| !modes.is_inside(i));
    let bosons = basis.boson_modes();
    let lunes: Vec<Vec<(u16, u16)>> = support.iter().map(|&(k, _)| restricted_lune(modes, k)).collect();

    for (col, &j) in one.iter().enumerate() {
        let s = basis.state(j);
        let (pp, hh) = match (s.fermions[0], s.fermions[1]) {
            (a, b) if modes.is_inside(a) => (b, a),
            (a, b) => (a, b),
        };
        let t_j = energy_gap(modes, pp, hh);
        let (kp, kh) = (modes.mode(pp), modes.mode(hh));
        for (ik, &(k, vk)) in support.iter().enumerate() {
            for (il, &(l, vl)) in support.iter().enumerate() {
                let mut moved: Vec<(Occ, f64)> = Vec::new();
                shift(&s.bosons, bosons, l, |b1, a1| {
                    shift(&b1, bosons, neg(k), |b2, a2| moved.push((b2, vk * vl * a1 * a2)));
                });
                if moved.is_empty() {
                    continue;
                }
                let mut emit = |n: usize, f: &Occ, amp: f64| -> Result<()> {
                    for (b, ab) in &moved {
                        let target = FockState { fermions: f.clone(), bosons: b.clone() };
                        let i = basis
                            .index_of(&target)
                            .ok_or_else(|| Error::Validation("one-pair block left the basis".into()))?;
                        blocks[n][(local[i], col)] += ab * amp;
                    }
                    Ok(())
                };

                if ik == il {
                    let a1: f64 = lunes[ik].iter().map(|&(p, h)| 1.0 / (t_j + energy_gap(modes, p, h))).sum();
                    emit(0, &s.fermions, a1)?;
                }

                // A₂: p = h' + k, c*_{p−ℓ} c_{h'}
                if let (Some(p), Some(h2)) = (outside(add(kh, k)), inside(sub(add(kh, k), l))) {
                    if let Some((f, sg)) = fermion_move(&s.fermions, &[hh], &[h2]) {
                        let t_f = energy_gap(modes, pp, h2);
                        let amp = -sg
                            / ((t_f + energy_gap(modes, p, hh)) * (t_j + energy_gap(modes, p, h2))).sqrt();
                        emit(1, &f, amp)?;
                    }
                }

                // A₃: p = p', b*_{p−k+ℓ} b_{p'}
                if let (Some(h), Some(q)) = (inside(sub(kp, k)), outside(add(sub(kp, k), l))) {
                    if let Some((f, sg)) = fermion_move(&s.fermions, &[pp], &[q]) {
                        let t_f = energy_gap(modes, q, hh);
                        let amp =
                            -sg / ((t_f + energy_gap(modes, pp, h)) * (t_j + energy_gap(modes, q, h))).sqrt();
                        emit(2, &f, amp)?;
                    }
                }

                // A₄: p' − h' = k, b*_q c*_{q−ℓ} c_{h'} b_{p'}
                if sub(kp, kh) == k {
                    for &(q, h2) in &lunes[il] {
                        if let Some((f, sg)) = fermion_move(&s.fermions, &[pp, hh], &[h2, q]) {
                            let t_f = energy_gap(modes, q, h2);
                            let amp = sg / ((t_f + t_j) * (t_j + t_f)).sqrt();
                            emit(3, &f, amp)?;
                        }
                    }
                }
            }
        }
    }
    Ok(blocks)
}
