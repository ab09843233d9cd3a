use rayon::prelude::*;
use serde::Serialize;

use super::ops::{annihilate, create, flip, hop, pair_scatter, shift};
use super::{FockBasis, FockState, ModeSet, Occ};
use crate::error::{Error, Result};
use crate::lattice::{add, neg, norm2, sub, Momentum};
use crate::potentials::{two_pi_three_halves, FourierPotential};
use crate::sparse::CsrMatrix;

/// Named operators built from a set of couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `Σ_i (−Δ_i)`.
    HKinetic,
    /// `(1/N) Σ_{i<j} W(x_i − x_j)`.
    HW,
    /// The excitation kinetic energy `𝕋`.
    T,
    VPlus,
    VMinus,
    VDiag,
    NPlus,
    NMinus,
    /// `ℍ = h ⊗ 1 + 1 ⊗ 𝕋 + λ(𝕍₊ + 𝕍₋ + 𝕍^diag)`.
    H,
    /// The physical Hamiltonian `𝓗` on fermion occupations.
    HFull,
    /// `ℛ* 𝓗 ℛ`, acting on excitation states.
    RConjugatedH,
}

/// Potentials and coupling constant shared by the named operators.
#[derive(Clone, Debug)]
pub struct Couplings {
    pub lambda: f64,
    pub v: FourierPotential,
    pub w: FourierPotential,
}

/// One summand of an [`Operator`].
#[derive(Clone, Debug)]
pub enum Term {
    Identity,
    /// `Σ_m |m|² n_m` over boson modes.
    BosonKinetic,
    /// `(1/N) Σ_{i<j} W(x_i − x_j)` in second quantization.
    BosonPair(FourierPotential),
    /// `𝕋 = Σ_{p outside} p² b_p* b_p − Σ_{h inside} h² c_h* c_h`.
    ExcitationKinetic,
    /// `𝕍₊ = Σ_q V̂(q) S_q ⊗ Σ_p b_p* c_{p−q}*`.
    VPlus(FourierPotential),
    /// `𝕍₋ = 𝕍₊*`.
    VMinus(FourierPotential),
    /// `Σ_q V̂(q) S_q ⊗ (Σ_k b_{k+q}* b_k − Σ_ℓ c_{ℓ−q}* c_ℓ)`.
    VDiag(FourierPotential),
    NPlus,
    NMinus,
    /// `Σ_k k² a_k* a_k` over physical fermion occupations.
    FermionKinetic,
    /// `Σ_{k,ℓ} V̂(ℓ−k) S_{ℓ−k} a_ℓ* a_k` over physical fermion occupations.
    Coupling(FourierPotential),
    /// `ℛ* A ℛ` for a physical operator `A`.
    Conjugated(Box<Operator>),
}

impl Term {
    fn adjoint(&self) -> Term {
        match self {
            Term::VPlus(v) => Term::VMinus(v.clone()),
            Term::VMinus(v) => Term::VPlus(v.clone()),
            Term::Conjugated(a) => Term::Conjugated(Box::new(a.adjoint())),
            t => t.clone(),
        }
    }
}

/// A real linear combination of [`Term`]s.
#[derive(Clone, Debug, Default)]
pub struct Operator {
    terms: Vec<(f64, Term)>,
}

impl Operator {
    pub fn new(kind: OperatorKind, c: &Couplings) -> Self {
        use OperatorKind as K;
        let terms = match kind {
            K::HKinetic => vec![(1.0, Term::BosonKinetic)],
            K::HW => vec![(1.0, Term::BosonPair(c.w.clone()))],
            K::T => vec![(1.0, Term::ExcitationKinetic)],
            K::VPlus => vec![(1.0, Term::VPlus(c.v.clone()))],
            K::VMinus => vec![(1.0, Term::VMinus(c.v.clone()))],
            K::VDiag => vec![(1.0, Term::VDiag(c.v.clone()))],
            K::NPlus => vec![(1.0, Term::NPlus)],
            K::NMinus => vec![(1.0, Term::NMinus)],
            K::H => vec![
                (1.0, Term::BosonKinetic),
                (1.0, Term::BosonPair(c.w.clone())),
                (1.0, Term::ExcitationKinetic),
                (c.lambda, Term::VPlus(c.v.clone())),
                (c.lambda, Term::VMinus(c.v.clone())),
                (c.lambda, Term::VDiag(c.v.clone())),
            ],
            K::HFull => vec![
                (1.0, Term::BosonKinetic),
                (1.0, Term::BosonPair(c.w.clone())),
                (1.0, Term::FermionKinetic),
                (c.lambda, Term::Coupling(c.v.clone())),
            ],
            K::RConjugatedH => vec![(1.0, Term::Conjugated(Box::new(Operator::new(K::HFull, c))))],
        };
        Operator { terms }
    }

    pub fn from_terms(terms: Vec<(f64, Term)>) -> Self {
        Operator { terms }
    }

    pub fn terms(&self) -> &[(f64, Term)] {
        &self.terms
    }

    pub fn plus(mut self, coef: f64, term: Term) -> Self {
        self.terms.push((coef, term));
        self
    }

    pub fn adjoint(&self) -> Operator {
        Operator { terms: self.terms.iter().map(|(c, t)| (*c, t.adjoint())).collect() }
    }

    /// Prepares the operator for repeated application on `basis`.
    pub fn bind<'a>(&self, basis: &'a FockBasis) -> BoundOperator<'a> {
        BoundOperator { basis, rows: Action::new(&self.adjoint(), basis, basis.max_fermions()) }
    }

    /// `A x` on `basis` (matrix-free).
    pub fn apply(&self, basis: &FockBasis, x: &[f64]) -> Result<Vec<f64>> {
        self.bind(basis).apply(x)
    }

    pub fn assemble(&self, basis: &FockBasis) -> CsrMatrix {
        self.bind(basis).assemble()
    }

    pub fn dense(&self, basis: &FockBasis) -> nalgebra::DMatrix<f64> {
        self.assemble(basis).to_dense()
    }
}

/// An operator bound to a basis. Row `i` is obtained by applying the adjoint
/// to basis state `i`, so `apply` is a gather: `y_i = Σ_j ⟨i|A|j⟩ x_j`.
pub struct BoundOperator<'a> {
    basis: &'a FockBasis,
    rows: Action<'a>,
}

impl BoundOperator<'_> {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Matrix elements `⟨i|A|j⟩` of row `i`, duplicates merged, sorted by `j`.
    pub fn row(&self, i: usize) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        self.rows.act(self.basis.state(i), &mut |s, c| {
            if let Some(j) = self.basis.index_of(&s) {
                out.push((j as u32, c));
            }
        });
        out.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(out.len());
        for (j, c) in out {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        merged
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), got: x.len() });
        }
        if y.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), got: y.len() });
        }
        const CHUNK: usize = 256;
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            for (o, yi) in out.iter_mut().enumerate() {
                let i = c * CHUNK + o;
                let mut acc = 0.0;
                self.rows.act(self.basis.state(i), &mut |s, v| {
                    if let Some(j) = self.basis.index_of(&s) {
                        acc += v * x[j];
                    }
                });
                *yi = acc;
            }
        });
        Ok(())
    }

    pub fn assemble(&self) -> CsrMatrix {
        let rows: Vec<Vec<(u32, f64)>> = (0..self.dim()).into_par_iter().map(|i| self.row(i)).collect();
        CsrMatrix::from_rows(self.dim(), rows)
    }
}

/// Precomputed data for acting with an operator on single states.
struct Action<'a> {
    modes: &'a ModeSet,
    basis: &'a FockBasis,
    max_fermions: usize,
    terms: Vec<(f64, BoundTerm<'a>)>,
}

enum BoundTerm<'a> {
    Identity,
    BosonKinetic(Vec<f64>),
    BosonPair { constant: f64, scatter: Vec<(Momentum, f64)> },
    ExcitationKinetic,
    /// Per `q`: `(V̂(q), [(p, p − q)])` with `p` outside and `p − q` inside.
    VPlus(Vec<(Momentum, f64, Vec<(u16, u16)>)>),
    VMinus(Vec<(Momentum, f64)>),
    VDiag(Vec<(Momentum, f64)>),
    NPlus,
    NMinus,
    FermionKinetic,
    Coupling(Vec<(Momentum, f64)>),
    Conjugated(Box<Action<'a>>, Vec<u16>),
}

impl<'a> Action<'a> {
    fn new(op: &Operator, basis: &'a FockBasis, max_fermions: usize) -> Self {
        let modes: &ModeSet = basis.modes();
        let terms = op.terms.iter().map(|(c, t)| (*c, bind_term(t, basis, modes))).collect();
        Action { modes, basis, max_fermions, terms }
    }

    fn act(&self, s: &FockState, emit: &mut dyn FnMut(FockState, f64)) {
        let bosons = self.basis.boson_modes();
        let modes = self.modes;
        for (coef, term) in &self.terms {
            let coef = *coef;
            match term {
                BoundTerm::Identity => emit(s.clone(), coef),
                BoundTerm::BosonKinetic(e) => {
                    let v: f64 = s.bosons.iter().map(|&b| e[b as usize]).sum();
                    emit(s.clone(), coef * v);
                }
                BoundTerm::BosonPair { constant, scatter } => {
                    if *constant != 0.0 {
                        emit(s.clone(), coef * constant);
                    }
                    pair_scatter(&s.bosons, bosons, scatter, |b, a| {
                        emit(FockState { fermions: s.fermions.clone(), bosons: b }, coef * a)
                    });
                }
                BoundTerm::ExcitationKinetic => {
                    let v: i64 = s
                        .fermions
                        .iter()
                        .map(|&f| if modes.is_inside(f) { -norm2(modes.mode(f)) } else { norm2(modes.mode(f)) })
                        .sum();
                    emit(s.clone(), coef * v as f64);
                }
                BoundTerm::FermionKinetic => {
                    let v: i64 = s.fermions.iter().map(|&f| norm2(modes.mode(f))).sum();
                    emit(s.clone(), coef * v as f64);
                }
                BoundTerm::NPlus => emit(s.clone(), coef * 0.5 * s.fermions.len() as f64),
                BoundTerm::NMinus => {
                    let holes = s.fermions.iter().filter(|&&f| modes.is_inside(f)).count() as f64;
                    let particles = s.fermions.len() as f64 - holes;
                    emit(s.clone(), coef * 0.5 * (particles - holes));
                }
                BoundTerm::VPlus(table) => {
                    if s.fermions.len() + 2 > self.max_fermions {
                        continue;
                    }
                    for (q, vq, pairs) in table {
                        for &(p, h) in pairs {
                            let Some((f1, s1)) = create(&s.fermions, h) else { continue };
                            let Some((f2, s2)) = create(&f1, p) else { continue };
                            let c = coef * vq * s1 * s2;
                            shift(&s.bosons, bosons, *q, |b, a| {
                                emit(FockState { fermions: f2.clone(), bosons: b }, c * a)
                            });
                        }
                    }
                }
                BoundTerm::VMinus(table) => {
                    for &(q, vq) in table {
                        for &p in s.fermions.iter().filter(|&&f| !modes.is_inside(f)) {
                            let Some(h) = modes.index_of(sub(modes.mode(p), q)) else { continue };
                            if !modes.is_inside(h) {
                                continue;
                            }
                            let Some((f1, s1)) = annihilate(&s.fermions, p) else { continue };
                            let Some((f2, s2)) = annihilate(&f1, h) else { continue };
                            let c = coef * vq * s1 * s2;
                            shift(&s.bosons, bosons, neg(q), |b, a| {
                                emit(FockState { fermions: f2.clone(), bosons: b }, c * a)
                            });
                        }
                    }
                }
                BoundTerm::VDiag(table) => {
                    for &(q, vq) in table {
                        for &f in &s.fermions {
                            let inside = modes.is_inside(f);
                            let target = if inside { sub(modes.mode(f), q) } else { add(modes.mode(f), q) };
                            let Some(t) = modes.index_of(target) else { continue };
                            if modes.is_inside(t) != inside {
                                continue;
                            }
                            let Some((f2, sg)) = hop(&s.fermions, t, f) else { continue };
                            let c = if inside { -coef * vq * sg } else { coef * vq * sg };
                            shift(&s.bosons, bosons, q, |b, a| {
                                emit(FockState { fermions: f2.clone(), bosons: b }, c * a)
                            });
                        }
                    }
                }
                BoundTerm::Coupling(table) => {
                    for &(q, vq) in table {
                        for &k in &s.fermions {
                            let Some(l) = modes.index_of(add(modes.mode(k), q)) else { continue };
                            let Some((f2, sg)) = hop(&s.fermions, l, k) else { continue };
                            let c = coef * vq * sg;
                            shift(&s.bosons, bosons, q, |b, a| {
                                emit(FockState { fermions: f2.clone(), bosons: b }, c * a)
                            });
                        }
                    }
                }
                BoundTerm::Conjugated(inner, inside) => {
                    let (phys, se) = particle_hole(&s.fermions, inside);
                    let start = FockState { fermions: phys, bosons: s.bosons.clone() };
                    inner.act(&start, &mut |g, c| {
                        let (exc, sg) = particle_hole_inverse(&g.fermions, inside);
                        emit(FockState { fermions: exc, bosons: g.bosons }, coef * se * sg * c);
                    });
                }
            }
        }
    }
}

fn bind_term<'a>(t: &Term, basis: &'a FockBasis, modes: &ModeSet) -> BoundTerm<'a> {
    match t {
        Term::Identity => BoundTerm::Identity,
        Term::BosonKinetic => {
            BoundTerm::BosonKinetic(basis.boson_modes().modes().iter().map(|&k| norm2(k) as f64).collect())
        }
        Term::BosonPair(w) => {
            let n = basis.n_bosons();
            let c = 1.0 / two_pi_three_halves();
            if n == 0 {
                return BoundTerm::BosonPair { constant: 0.0, scatter: Vec::new() };
            }
            let constant = 0.5 * (n as f64 - 1.0) * c * w.zero_mode();
            let scatter =
                w.iter().filter(|(k, _)| *k != [0, 0, 0]).map(|(k, wk)| (k, c * wk / (2.0 * n as f64))).collect();
            BoundTerm::BosonPair { constant, scatter }
        }
        Term::ExcitationKinetic => BoundTerm::ExcitationKinetic,
        Term::VPlus(v) => {
            let table = v
                .iter()
                .map(|(q, vq)| {
                    let pairs = modes
                        .outside_indices()
                        .into_iter()
                        .filter_map(|p| {
                            let h = modes.index_of(sub(modes.mode(p), q))?;
                            modes.is_inside(h).then_some((p, h))
                        })
                        .collect();
                    (q, vq, pairs)
                })
                .collect();
            BoundTerm::VPlus(table)
        }
        Term::VMinus(v) => BoundTerm::VMinus(v.iter().collect()),
        Term::VDiag(v) => BoundTerm::VDiag(v.iter().collect()),
        Term::NPlus => BoundTerm::NPlus,
        Term::NMinus => BoundTerm::NMinus,
        Term::FermionKinetic => BoundTerm::FermionKinetic,
        Term::Coupling(v) => BoundTerm::Coupling(v.iter().collect()),
        Term::Conjugated(a) => {
            BoundTerm::Conjugated(Box::new(Action::new(a, basis, usize::MAX)), modes.inside_indices())
        }
    }
}

/// `ℛ|e⟩ = σ|f⟩` for `ℛ = γ_{i₁}⋯γ_{i_M̃} (−1)^{𝒩_in}`, with `i₁ < ⋯ < i_M̃` the inside modes.
pub(crate) fn particle_hole(e: &Occ, inside: &[u16]) -> (Occ, f64) {
    let holes = e.iter().filter(|f| inside.binary_search(f).is_ok()).count();
    let mut sign = if holes % 2 == 0 { 1.0 } else { -1.0 };
    let mut occ = e.clone();
    for &i in inside.iter().rev() {
        let (next, s) = flip(&occ, i);
        occ = next;
        sign *= s;
    }
    (occ, sign)
}

/// `ℛ*|f⟩ = σ|e⟩`; since `ℛ` is a signed permutation, `σ` is the sign of `ℛ|e⟩`.
pub(crate) fn particle_hole_inverse(f: &Occ, inside: &[u16]) -> (Occ, f64) {
    let mut e: Occ = f.iter().copied().filter(|x| inside.binary_search(x).is_err()).collect();
    e.extend(inside.iter().copied().filter(|x| f.binary_search(x).is_err()));
    e.sort_unstable();
    let (_, sign) = particle_hole(&e, inside);
    (e, sign)
}
