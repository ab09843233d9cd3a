use std::sync::Arc;

use serde::Serialize;

use super::effective::{effective_hamiltonian, effective_spectrum};
use super::eigen::{lowest_eigenpairs, EigenOptions, Eigenpairs};
use super::trial::{lunes_complete, trial_state_energy};
use crate::error::{Error, Result};
use crate::fock::{BosonModes, Couplings, FockBasis, ModeSet, Operator, OperatorKind};
use crate::lattice::{FermiRadius, LuneSumTable, Momentum};
use crate::potentials::{coupling, q_functional, FermiLimit, FourierPotential};

/// How the fermionic momentum cutoff `Λ²` follows from `k_F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffRule {
    /// `Λ² = ⌊(k_F + 2)²⌋ = ⌊k_F² + 4k_F + 4⌋`.
    KfPlusTwo,
    /// A fixed `Λ²`.
    Fixed(i64),
}

impl CutoffRule {
    pub fn cutoff2(&self, radius: FermiRadius) -> i64 {
        match *self {
            CutoffRule::KfPlusTwo => {
                let kf = radius.kf();
                (radius.kf2() + 4.0 * kf + 4.0 + 1e-9).floor() as i64
            }
            CutoffRule::Fixed(c) => c,
        }
    }
}

/// Inputs shared by every row of a comparison run.
#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub v: FourierPotential,
    pub w: FourierPotential,
    pub n_bosons: usize,
    pub bosons: BosonModes,
    pub rule: CutoffRule,
    pub max_pairs: usize,
    /// Number of eigenvalues per side.
    pub n: usize,
    pub sector: Option<Momentum>,
    pub eigen: EigenOptions,
    /// Exponent `p` of `𝒬_p`.
    pub q_exponent: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReportDims {
    pub full: usize,
    pub bosonic: usize,
    pub cutoff2: i64,
    pub max_pairs: usize,
    pub sector: Option<Momentum>,
}

/// Eigenvalues of the physical Hamiltonian reassembled from those of `ℍ`:
/// `Ẽ_F + λNM̃V̂₀ + µ_n(ℍ)`, with the two constants of the infinite-`k_F`
/// formula listed separately.
#[derive(Clone, Debug, Serialize)]
pub struct PhysicalShape {
    pub fermi_energy: i64,
    pub fermi_count: usize,
    pub mean_field: f64,
    pub mu_physical: Vec<f64>,
    /// `−½ Σ_k |V̂(k)|² = −½ ∫|V|²`.
    pub minus_half_v_l2: f64,
    /// `−½ (N − 2) V̂(0)²`.
    pub minus_half_n_minus_two_v0: f64,
}

/// One row of a comparison between `ℍ` and the effective boson Hamiltonian.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    #[serde(rename = "kF_squared")]
    pub kf_squared: f64,
    pub lambda: f64,
    pub dims: ReportDims,
    #[serde(rename = "mu_H")]
    pub mu_h: Vec<f64>,
    #[serde(rename = "residuals_H")]
    pub residuals_h: Vec<f64>,
    pub mu_eff: Vec<f64>,
    #[serde(rename = "W_kF0")]
    pub w_kf0: f64,
    /// `µ_n(ℍ) − (µ_n(h^eff_{k_F}) − ½W_{k_F}(0))`.
    pub diff: Vec<f64>,
    pub trial_rayleigh: Option<f64>,
    pub overlap: Option<f64>,
    pub envelope_c: Option<f64>,
    pub envelope: Option<f64>,
    pub q_functional: f64,
    pub lunes_complete: bool,
    pub shape: Option<PhysicalShape>,
    pub error: Option<String>,
}

impl SpectrumReport {
    fn failed(radius: FermiRadius, lambda: f64, dims: ReportDims, q: f64, err: &Error) -> Self {
        SpectrumReport {
            kf_squared: radius.kf2(),
            lambda,
            dims,
            mu_h: vec![],
            residuals_h: vec![],
            mu_eff: vec![],
            w_kf0: f64::NAN,
            diff: vec![],
            trial_rayleigh: None,
            overlap: None,
            envelope_c: None,
            envelope: None,
            q_functional: q,
            lunes_complete: false,
            shape: None,
            error: Some(err.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// `(max(ln k_F, 1))^{5/3} k_F^{−1/3}`.
pub fn envelope_shape(kf: f64) -> f64 {
    kf.ln().max(1.0).powf(5.0 / 3.0) * kf.powf(-1.0 / 3.0)
}

/// Smallest spectral gap accepted before a ground state counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

fn ground_with_gap(e: &Eigenpairs) -> Result<&[f64]> {
    match e.gap() {
        Some(g) if g < DEGENERACY_GAP => Err(Error::Degeneracy(g)),
        _ => Ok(&e.vectors[0]),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Compares `µ_n(ℍ)` on a truncated excitation space with the effective
/// boson spectrum shifted by `−½W_{k_F}(0)`, one row per `k_F²`.
///
/// Rows fail independently; the envelope constant is fitted at the first
/// row that succeeded.
pub fn theorem1_compare(cfg: &CompareConfig, kf2_list: &[u64], table: &LuneSumTable) -> Result<Vec<SpectrumReport>> {
    let q = q_functional(&cfg.v, &cfg.w, cfg.q_exponent, 16)?;
    let mut rows = Vec::with_capacity(kf2_list.len());
    for &kf2 in kf2_list {
        let radius = FermiRadius::from_kf2(kf2)?;
        rows.push(compare_row(cfg, radius, q, table));
    }
    let n2 = (cfg.n_bosons * cfg.n_bosons) as f64;
    let fit = rows.iter().find(|r| r.is_ok() && !r.diff.is_empty()).map(|r| {
        let denom = q * q * n2 * envelope_shape(r.kf_squared.sqrt());
        r.diff[0].abs() / denom
    });
    for r in rows.iter_mut().filter(|r| r.is_ok()) {
        r.envelope_c = fit;
        r.envelope = fit.map(|c| c * q * q * n2 * envelope_shape(r.kf_squared.sqrt()));
    }
    Ok(rows)
}

fn compare_row(cfg: &CompareConfig, radius: FermiRadius, q: f64, table: &LuneSumTable) -> SpectrumReport {
    let lambda = coupling(cfg.n_bosons, radius);
    let cutoff2 = cfg.rule.cutoff2(radius);
    let mut dims = ReportDims { full: 0, bosonic: 0, cutoff2, max_pairs: cfg.max_pairs, sector: cfg.sector };
    match compare_row_inner(cfg, radius, lambda, &mut dims, q, table) {
        Ok(r) => r,
        Err(e) => SpectrumReport::failed(radius, lambda, dims, q, &e),
    }
}

fn compare_row_inner(
    cfg: &CompareConfig,
    radius: FermiRadius,
    lambda: f64,
    dims: &mut ReportDims,
    q: f64,
    table: &LuneSumTable,
) -> Result<SpectrumReport> {
    let modes = Arc::new(ModeSet::ball(radius, dims.cutoff2)?);
    let bosons = Arc::new(cfg.bosons.clone());
    let c = Couplings { lambda, v: cfg.v.clone(), w: cfg.w.clone() };

    let boson_basis = FockBasis::bosonic(modes.clone(), bosons.clone(), cfg.n_bosons, cfg.sector)?;
    dims.bosonic = boson_basis.dim();
    let basis = FockBasis::excitation(modes.clone(), bosons.clone(), cfg.n_bosons, cfg.max_pairs, cfg.sector)?;
    dims.full = basis.dim();

    let n = cfg.n.min(basis.dim()).min(boson_basis.dim());
    let h_op = Operator::new(OperatorKind::H, &c);
    let h_eig = lowest_eigenpairs(&h_op.bind(&basis), n, cfg.eigen)?;
    let eff = effective_spectrum(&boson_basis, &cfg.v, &cfg.w, FermiLimit::Finite(radius), n, table, cfg.eigen)?;
    let w_kf0 = eff.mediated_at_origin;
    let diff: Vec<f64> = h_eig.values.iter().zip(&eff.eigen.values).map(|(mh, me)| mh - (me - 0.5 * w_kf0)).collect();

    let trial_rayleigh = if cfg.max_pairs >= 1 {
        let free = FockBasis::bosonic(modes.clone(), bosons.clone(), cfg.n_bosons, None)?;
        let phi = free.embed(&boson_basis, &eff.eigen.vectors[0])?;
        Some(trial_state_energy(&free, &phi, &c)?.rayleigh)
    } else {
        None
    };

    let limit = effective_hamiltonian(&cfg.v, &cfg.w, FermiLimit::Infinite, table);
    let limit_eig = lowest_eigenpairs(&limit.bind(&boson_basis), 2.min(boson_basis.dim()), cfg.eigen)?;
    let overlap = match (ground_with_gap(&h_eig), ground_with_gap(&limit_eig)) {
        (Ok(g), Ok(phi)) => Some(dot(g, &basis.embed(&boson_basis, phi)?).abs().min(1.0)),
        _ => None,
    };

    let v0 = cfg.v.zero_mode();
    let mean_field = lambda * cfg.n_bosons as f64 * modes.inside_count() as f64 * v0;
    let fermi_energy = modes.inside_energy();
    let shape = PhysicalShape {
        fermi_energy,
        fermi_count: modes.inside_count(),
        mean_field,
        mu_physical: h_eig.values.iter().map(|m| fermi_energy as f64 + mean_field + m).collect(),
        minus_half_v_l2: -0.5 * cfg.v.l2_sq(),
        minus_half_n_minus_two_v0: -0.5 * (cfg.n_bosons as f64 - 2.0) * v0 * v0,
    };
    let support: Vec<Momentum> = cfg.v.support();

    Ok(SpectrumReport {
        kf_squared: radius.kf2(),
        lambda,
        dims: *dims,
        mu_h: h_eig.values.clone(),
        residuals_h: h_eig.residuals.clone(),
        mu_eff: eff.eigen.values.clone(),
        w_kf0,
        diff,
        trial_rayleigh,
        overlap,
        envelope_c: None,
        envelope: None,
        q_functional: q,
        lunes_complete: lunes_complete(&modes, &support),
        shape: Some(shape),
        error: None,
    })
}

/// Overlap of the ground state of `ℍ` with `φ^eff ⊗ Ω`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverlapReport {
    #[serde(rename = "kF_squared")]
    pub kf_squared: f64,
    pub overlap: f64,
    pub gap_h: Option<f64>,
    pub gap_eff: Option<f64>,
    pub dim: usize,
}

/// `|⟨ground(ℍ), φ^eff ⊗ Ω⟩|` where `φ^eff` is the ground state of the
/// infinite-`k_F` effective Hamiltonian on the same boson space.
#[allow(clippy::too_many_arguments)]
pub fn corollary_overlap(
    v: &FourierPotential,
    w: &FourierPotential,
    n_bosons: usize,
    radius: FermiRadius,
    cutoff2: i64,
    max_pairs: usize,
    bosons: &BosonModes,
    sector: Option<Momentum>,
    opts: EigenOptions,
) -> Result<OverlapReport> {
    let modes = Arc::new(ModeSet::ball(radius, cutoff2)?);
    let bosons = Arc::new(bosons.clone());
    let c = Couplings { lambda: coupling(n_bosons, radius), v: v.clone(), w: w.clone() };
    let basis = FockBasis::excitation(modes.clone(), bosons.clone(), n_bosons, max_pairs, sector)?;
    let boson_basis = FockBasis::bosonic(modes, bosons, n_bosons, sector)?;
    let h_eig = lowest_eigenpairs(&Operator::new(OperatorKind::H, &c).bind(&basis), 2.min(basis.dim()), opts)?;
    let limit = effective_hamiltonian(v, w, FermiLimit::Infinite, &LuneSumTable::new());
    let eff = lowest_eigenpairs(&limit.bind(&boson_basis), 2.min(boson_basis.dim()), opts)?;
    let ground = ground_with_gap(&h_eig)?;
    let phi = basis.embed(&boson_basis, ground_with_gap(&eff)?)?;
    Ok(OverlapReport {
        kf_squared: radius.kf2(),
        overlap: dot(ground, &phi).abs().min(1.0),
        gap_h: h_eig.gap(),
        gap_eff: eff.gap(),
        dim: basis.dim(),
    })
}
