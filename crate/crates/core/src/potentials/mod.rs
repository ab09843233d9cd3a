//! Real, even potentials on the torus `T³ = [0, 2π]³`, stored by Fourier
//! coefficients.
//!
//! The convention is fixed once: `V(x) = (2π)^{−3/2} Σ_k V̂(k) e^{ikx}`.
//! Every factor `(2π)^{3/2}` elsewhere in the crate follows from it.

mod effective;
mod grid;
mod io;
mod radial;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{neg, norm2, FermiRadius, Momentum};
use crate::quad::{kahan, KahanSum};

pub use effective::{
    convolve, effective_potential_kf, effective_potential_limit, sup_difference, EffectivePotential, FermiLimit,
    SupDifference,
};
pub use io::{PotentialFile, RadialFile};
pub use radial::{from_radial_profile, radial_transform};

/// `(2π)^{3/2}`.
pub fn two_pi_three_halves() -> f64 {
    (2.0 * PI).powf(1.5)
}

/// The coupling `λ = 1/√(4π N k_F)`.
pub fn coupling(n_bosons: usize, radius: FermiRadius) -> f64 {
    1.0 / (4.0 * PI * n_bosons as f64 * radius.kf()).sqrt()
}

/// A real, even potential on the torus with coefficients supported in
/// `|k|_∞ ≤ cutoff`. Only nonzero coefficients are stored, always in
/// `±k` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPotential {
    cutoff: i64,
    coeffs: BTreeMap<Momentum, f64>,
    label: String,
}

fn sup_norm(k: Momentum) -> i64 {
    k.iter().map(|c| c.abs()).max().unwrap_or(0)
}

impl FourierPotential {
    pub fn zero(cutoff: i64) -> Self {
        FourierPotential { cutoff, coeffs: BTreeMap::new(), label: String::new() }
    }

    /// Builds a potential from `(k, V̂(k))` entries, filling in `−k` by symmetry.
    ///
    /// An entry given for both `k` and `−k` (or twice for the same `k`) must
    /// agree to `1e−12`; the stored value is their average.
    pub fn from_coefficients(entries: &[(Momentum, f64)], cutoff: i64) -> Result<Self> {
        let mut given: BTreeMap<Momentum, Vec<f64>> = BTreeMap::new();
        for &(k, v) in entries {
            if sup_norm(k) > cutoff {
                return Err(Error::Validation(format!("coefficient at {k:?} lies outside the cutoff {cutoff}")));
            }
            if !v.is_finite() {
                return Err(Error::Validation(format!("coefficient at {k:?} is not finite")));
            }
            given.entry(k).or_default().push(v);
        }
        let mut coeffs = BTreeMap::new();
        for (&k, values) in &given {
            let mut all = values.clone();
            if let Some(mirror) = given.get(&neg(k)) {
                if k != neg(k) {
                    all.extend(mirror);
                }
            }
            let lo = all.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > 1e-12 {
                return Err(Error::Validation(format!(
                    "coefficients at {k:?} and {:?} disagree ({lo} vs {hi}); an even potential needs V̂(−k) = V̂(k)",
                    neg(k)
                )));
            }
            let mean = kahan(all.iter().copied()) / all.len() as f64;
            if mean != 0.0 {
                coeffs.insert(k, mean);
                coeffs.insert(neg(k), mean);
            }
        }
        Ok(FourierPotential { cutoff, coeffs, label: String::new() })
    }

    /// `V̂(±k) = c`, zero elsewhere.
    pub fn single_mode(k: Momentum, c: f64, cutoff: i64) -> Result<Self> {
        Self::from_coefficients(&[(k, c)], cutoff)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn coeff(&self, k: Momentum) -> f64 {
        self.coeffs.get(&k).copied().unwrap_or(0.0)
    }

    /// `V̂(0)`.
    pub fn zero_mode(&self) -> f64 {
        self.coeff([0, 0, 0])
    }

    /// Nonzero coefficients in lexicographic order of `k`.
    pub fn iter(&self) -> impl Iterator<Item = (Momentum, f64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    /// Momenta with nonzero coefficient, lexicographic.
    pub fn support(&self) -> Vec<Momentum> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Pointwise value `(2π)^{−3/2} Σ_k V̂(k) cos(k·x)`.
    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let s = kahan(self.iter().map(|(k, v)| v * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]).cos()));
        s / two_pi_three_halves()
    }

    /// Squared `H^s` norm `Σ_k ⟨k⟩^{2s} |V̂(k)|²`.
    pub fn h_norm_sq(&self, s: f64) -> f64 {
        kahan(self.iter().map(|(k, v)| (1.0 + norm2(k) as f64).powf(s) * v * v))
    }

    /// `Σ_k |V̂(k)|² = ∫_{T³} |V|²`.
    pub fn l2_sq(&self) -> f64 {
        self.h_norm_sq(0.0)
    }

    /// `‖V̂‖_{ℓ¹}`.
    pub fn l1(&self) -> f64 {
        kahan(self.iter().map(|(_, v)| v.abs()))
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map_coeffs(|_, v| a * v)
    }

    /// Applies `f(k, V̂(k))` to every stored coefficient (evenness is the caller's concern).
    pub fn map_coeffs(&self, f: impl Fn(Momentum, f64) -> f64) -> Self {
        let coeffs = self.iter().map(|(k, v)| (k, f(k, v))).filter(|&(_, v)| v != 0.0).collect();
        FourierPotential { cutoff: self.cutoff, coeffs, label: self.label.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut keys: Vec<Momentum> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        let coeffs = keys
            .into_iter()
            .map(|k| (k, f(self.coeff(k), other.coeff(k))))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        FourierPotential { cutoff: self.cutoff.max(other.cutoff), coeffs, label: String::new() }
    }

    /// Values on the uniform grid `x_j = 2π j / n`, flattened as `(ix·n + iy)·n + iz`.
    pub fn to_grid(&self, n: usize) -> Vec<f64> {
        grid::synthesize(self, n)
    }

    /// Trapezoidal `L^p` norm on an `n³` grid (`p = ∞` gives the grid maximum of `|V|`).
    pub fn lp_norm_on_grid(&self, p: f64, n: usize) -> f64 {
        let values = self.to_grid(n);
        grid::lp_from_samples(&values, p, n)
    }

    /// All norm functionals at once. For `Some(p)` the `L^p` norm starts on a
    /// `grid³` mesh and doubles until two meshes agree to `1e−4` relative.
    pub fn norms(&self, p: Option<f64>, grid: usize) -> Result<NormReport> {
        let lp = match p {
            None => None,
            Some(p) if !(p > 1.5) => {
                return Err(Error::invalid(format!("L^p norms need p > 3/2, got {p}")));
            }
            Some(p) => Some(self.lp_refined(p, grid)),
        };
        Ok(NormReport {
            h_sq: std::array::from_fn(|s| self.h_norm_sq(s as f64)),
            l1: self.l1(),
            lp,
        })
    }

    fn lp_refined(&self, p: f64, grid: usize) -> LpReport {
        const MAX_GRID: usize = 256;
        let mut n = grid.max(4);
        let mut value = self.lp_norm_on_grid(p, n);
        loop {
            let finer = self.lp_norm_on_grid(p, 2 * n);
            let delta = (finer - value).abs() / finer.abs().max(f64::MIN_POSITIVE);
            n *= 2;
            value = finer;
            if delta < 1e-4 || 2 * n > MAX_GRID {
                return LpReport { p, value, grid: n, refinement_delta: delta };
            }
        }
    }
}

/// Norms of a potential: squared `H^s` norms for `s = 0..=4`, `‖V̂‖_{ℓ¹}`
/// and optionally a grid `L^p` norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub h_sq: [f64; 5],
    pub l1: f64,
    pub lp: Option<LpReport>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LpReport {
    pub p: f64,
    pub value: f64,
    pub grid: usize,
    /// Relative change between the two finest grids.
    pub refinement_delta: f64,
}

/// The quantity `𝒬_p = 1 + ‖W‖_p^{2p/(2p−3)} + ‖V‖²_{H⁴}`.
pub fn q_functional(v: &FourierPotential, w: &FourierPotential, p: f64, grid: usize) -> Result<f64> {
    let lp = w.norms(Some(p), grid)?.lp.map(|r| r.value).unwrap_or(0.0);
    let exponent = if p.is_infinite() { 1.0 } else { 2.0 * p / (2.0 * p - 3.0) };
    let mut acc = KahanSum::new();
    acc.add(1.0);
    acc.add(lp.powf(exponent));
    acc.add(v.h_norm_sq(4.0));
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrization_and_validation() {
        let v = FourierPotential::from_coefficients(&[([1, 0, 0], 0.5)], 3).unwrap();
        assert_eq!(v.coeff([-1, 0, 0]), 0.5);
        assert_eq!(v.support().len(), 2);
        assert!(FourierPotential::from_coefficients(&[], 3).unwrap().is_zero());
        let bad = FourierPotential::from_coefficients(&[([1, 0, 0], 1.0), ([-1, 0, 0], 3.0)], 3);
        assert!(matches!(bad, Err(Error::Validation(_))));
        assert!(FourierPotential::from_coefficients(&[([4, 0, 0], 1.0)], 3).is_err());
        let both = FourierPotential::from_coefficients(&[([0, 1, 0], 1.0), ([0, -1, 0], 1.0 + 1e-13)], 1).unwrap();
        assert!((both.coeff([0, 1, 0]) - (1.0 + 0.5e-13)).abs() < 1e-15);
    }

    #[test]
    fn sobolev_norms_of_a_single_mode() {
        let c = 0.7;
        let v = FourierPotential::single_mode([1, 0, 0], c, 2).unwrap();
        let r = v.norms(None, 16).unwrap();
        assert!((r.h_sq[0] - 2.0 * c * c).abs() < 1e-15);
        assert!((r.h_sq[2] - 8.0 * c * c).abs() < 1e-14);
        assert!((r.l1 - 2.0 * c).abs() < 1e-15);
        assert!(r.h_sq.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sup_norm_of_a_single_mode() {
        let c = 0.3;
        let v = FourierPotential::single_mode([1, 0, 0], c, 1).unwrap();
        let r = v.norms(Some(f64::INFINITY), 16).unwrap().lp.unwrap();
        assert!((r.value - 2.0 * c / two_pi_three_halves()).abs() < 1e-14);
        assert!(v.norms(Some(1.5), 16).is_err());
    }

    #[test]
    fn plancherel_on_the_grid() {
        let v = FourierPotential::from_coefficients(&[([1, 0, 0], 0.4), ([1, 2, -1], -0.3), ([0, 0, 0], 1.1)], 3).unwrap();
        let grid = v.lp_norm_on_grid(2.0, 16);
        assert!((grid * grid - v.l2_sq()).abs() < 1e-10);
    }

    #[test]
    fn grid_values_match_pointwise_series() {
        let v = FourierPotential::from_coefficients(&[([1, 0, 0], 0.4), ([2, -1, 3], -0.25)], 3).unwrap();
        let n = 8;
        let g = v.to_grid(n);
        let h = 2.0 * PI / n as f64;
        for (ix, iy, iz) in [(0, 0, 0), (1, 2, 3), (7, 5, 1)] {
            let x = [ix as f64 * h, iy as f64 * h, iz as f64 * h];
            assert!((g[(ix * n + iy) * n + iz] - v.eval(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn coupling_at_unit_radius() {
        let r = FermiRadius::from_kf2(1).unwrap();
        assert!((coupling(1, r).powi(2) - 1.0 / (4.0 * PI)).abs() < 1e-15);
    }
}
