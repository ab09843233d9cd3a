use std::f64::consts::PI;

use serde::Serialize;

use super::{two_pi_three_halves, FourierPotential};
use crate::lattice::{FermiRadius, LuneSumTable};
use crate::quad::kahan;

/// Torus convolution: `(V∗U)^(k) = (2π)^{3/2} V̂(k) Û(k)`.
pub fn convolve(v: &FourierPotential, u: &FourierPotential) -> FourierPotential {
    let c = two_pi_three_halves();
    let cutoff = v.cutoff().min(u.cutoff());
    let out = v.map_coeffs(|k, a| c * a * u.coeff(k));
    FourierPotential { cutoff, ..out }.with_label(format!("({})*({})", v.label(), u.label()))
}

/// Which Fermi momentum an effective potential belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FermiLimit {
    Finite(FermiRadius),
    Infinite,
}

/// A mediated or effective two-body potential together with where it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectivePotential {
    pub potential: FourierPotential,
    pub kf: FermiLimit,
    pub provenance: String,
}

impl EffectivePotential {
    /// Pointwise value at `x = 0`, i.e. `(2π)^{−3/2} Σ_k` of the coefficients.
    pub fn value_at_origin(&self) -> f64 {
        kahan(self.potential.iter().map(|(_, c)| c)) / two_pi_three_halves()
    }
}

/// The fermion-mediated potential `W_{k_F}(x) = (2πk_F)^{−1} Σ_k e^{ikx} |V̂(k)|² D₁(k, k_F)`.
pub fn effective_potential_kf(v: &FourierPotential, radius: FermiRadius, table: &LuneSumTable) -> EffectivePotential {
    let scale = two_pi_three_halves() / (2.0 * PI * radius.kf());
    let potential = v.map_coeffs(|k, c| scale * c * c * table.value(1.0, k, radius));
    EffectivePotential {
        potential: potential.with_label(format!("W_kF[{}]", v.label())),
        kf: FermiLimit::Finite(radius),
        provenance: format!("mediated by V = {} at {radius}", v.label()),
    }
}

/// The limiting effective potential `W^eff = W − V∗V`.
pub fn effective_potential_limit(v: &FourierPotential, w: &FourierPotential) -> EffectivePotential {
    let potential = w.sub(&convolve(v, v)).with_label(format!("W_eff[{}, {}]", v.label(), w.label()));
    EffectivePotential {
        potential,
        kf: FermiLimit::Infinite,
        provenance: format!("W = {} minus V*V with V = {}", w.label(), v.label()),
    }
}

/// Bounds on `‖W_{k_F} − V∗V + |V̂₀|²‖_∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupDifference {
    /// `Σ_{k≠0} |V̂(k)|² |D₁(k,k_F)/(2πk_F) − 1|`, an upper bound.
    pub l1_bound: f64,
    /// Largest `|·|` over a `16³` grid, a lower bound.
    pub grid_lower_bound: f64,
}

pub fn sup_difference(v: &FourierPotential, radius: FermiRadius, table: &LuneSumTable) -> SupDifference {
    let kf = radius.kf();
    let weight = |k, c: f64| {
        if k == [0, 0, 0] {
            0.0
        } else {
            c * c * (table.value(1.0, k, radius) / (2.0 * PI * kf) - 1.0)
        }
    };
    let l1_bound = kahan(v.iter().map(|(k, c)| weight(k, c).abs()));
    let series = v.map_coeffs(|k, c| two_pi_three_halves() * weight(k, c));
    let grid_lower_bound = series.lp_norm_on_grid(f64::INFINITY, 16);
    SupDifference { l1_bound, grid_lower_bound }
}
