use serde::Serialize;

use super::RadialPotential;
use crate::error::{Error, Result};
use crate::quad::simpson_uniform;

/// Scattering length of a radial pair potential, with its consistency checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatteringLength {
    /// `R − u(R)/u'(R)` from the finer of the two integrations.
    pub a: f64,
    /// `(8π)^{−1} ∫ w f` with `f = u/(r u'(R))`.
    pub a_integral: f64,
    /// `|a − a_integral|`.
    pub discrepancy: f64,
    /// `|a(h) − a(h/2)|` between step sizes `R/4096` and `R/8192`.
    pub richardson_delta: f64,
    /// `u` changed sign inside `(0, R]`, signalling a zero-energy bound state.
    pub bound_state_crossing: bool,
}

struct Trajectory {
    u: Vec<f64>,
    du_end: f64,
    crossing: bool,
}

/// RK4 for `u'' = ½ w u`, `u(0) = 0`, `u'(0) = 1`, on `steps` equal steps of `[0, R]`.
fn integrate(w: &RadialPotential, steps: usize) -> Trajectory {
    let big_r = w.support_radius();
    let h = big_r / steps as f64;
    let rhs = |r: f64, u: f64| 0.5 * w.value(r) * u;
    let (mut u, mut du) = (0.0f64, 1.0f64);
    let mut path = Vec::with_capacity(steps + 1);
    path.push(u);
    let mut crossing = false;
    for i in 0..steps {
        let r = i as f64 * h;
        let (k1u, k1v) = (du, rhs(r, u));
        let (k2u, k2v) = (du + 0.5 * h * k1v, rhs(r + 0.5 * h, u + 0.5 * h * k1u));
        let (k3u, k3v) = (du + 0.5 * h * k2v, rhs(r + 0.5 * h, u + 0.5 * h * k2u));
        let (k4u, k4v) = (du + h * k3v, rhs(r + h, u + h * k3u));
        let next = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if i > 0 && (next <= 0.0) != (u <= 0.0) {
            crossing = true;
        }
        u = next;
        path.push(u);
    }
    Trajectory { u: path, du_end: du, crossing }
}

/// Solves `(−Δ + ½w) f = 0`, `f → 1 − a/r`, and returns the scattering length `a`.
pub fn scattering_length(w: &RadialPotential) -> Result<ScatteringLength> {
    const STEPS: usize = 4096;
    let big_r = w.support_radius();
    let coarse = integrate(w, STEPS);
    let fine = integrate(w, 2 * STEPS);
    let u_end = *fine.u.last().unwrap();
    if fine.du_end.abs() <= 1e-12 * (1.0 + u_end.abs() / big_r) {
        return Err(Error::Resonance(fine.du_end));
    }
    let a_of = |t: &Trajectory| big_r - t.u.last().unwrap() / t.du_end;
    let a = a_of(&fine);
    let h = big_r / (2 * STEPS) as f64;
    let integrand: Vec<f64> = fine.u.iter().enumerate().map(|(i, &u)| {
        let r = i as f64 * h;
        r * w.value(r) * u
    }).collect();
    let a_integral = 0.5 * simpson_uniform(&integrand, h) / fine.du_end;
    Ok(ScatteringLength {
        a,
        a_integral,
        discrepancy: (a - a_integral).abs(),
        richardson_delta: (a_of(&coarse) - a).abs(),
        bound_state_crossing: fine.crossing,
    })
}
