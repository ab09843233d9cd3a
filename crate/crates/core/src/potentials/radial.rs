use std::f64::consts::PI;

use super::{two_pi_three_halves, FourierPotential};
use crate::error::{Error, Result};
use crate::lattice::norm2;
use crate::quad::piecewise_simpson;
use crate::scattering::RadialPotential;

/// The three-dimensional Fourier transform of a radial profile,
/// `ṽ(ρ) = (4π/ρ) ∫ r sin(ρr) v(r) dr`, with `ṽ(0) = ∫_{ℝ³} v`.
pub fn radial_transform(v: &RadialPotential, rho: f64) -> f64 {
    if rho == 0.0 {
        return v.integral_3d();
    }
    let integral = piecewise_simpson(|r| r * (rho * r).sin() * v.value(r), v.grid(), 1e-10);
    4.0 * PI / rho * integral
}

/// Torus coefficients of the periodization of `g N³ v(N x)`:
/// `V̂(k) = (2π)^{−3/2} g ṽ(|k|/N)` for `|k|_∞ ≤ cutoff`.
pub fn from_radial_profile(profile: &RadialPotential, n_scale: u32, g: f64, cutoff: i64) -> Result<FourierPotential> {
    if n_scale == 0 {
        return Err(Error::invalid("the scale N must be positive"));
    }
    let support = profile.support_radius();
    if support >= PI * n_scale as f64 {
        return Err(Error::PeriodizationOverlap { support, scale: n_scale });
    }
    if g == 0.0 {
        return Ok(FourierPotential::zero(cutoff));
    }
    let mut by_shell = std::collections::BTreeMap::new();
    let mut entries = Vec::new();
    for x in 0..=cutoff {
        for y in -cutoff..=cutoff {
            for z in -cutoff..=cutoff {
                let k = [x, y, z];
                if x == 0 && (y < 0 || (y == 0 && z < 0)) {
                    continue;
                }
                let n2 = norm2(k);
                let tv = *by_shell
                    .entry(n2)
                    .or_insert_with(|| radial_transform(profile, (n2 as f64).sqrt() / n_scale as f64));
                entries.push((k, g * tv / two_pi_three_halves()));
            }
        }
    }
    FourierPotential::from_coefficients(&entries, cutoff)
}
