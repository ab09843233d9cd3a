use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::{radial_convolution, scattering_length, RadialPotential};
use crate::error::{Error, Result};
use crate::quad::ols_slope;

/// Couplings at which the rescaled pair potential `w_g = w − g²(v∗v)` changes character.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalCouplings {
    /// Largest `g` with `w_g ≥ 0` on the merged grid (bisection to `1e−8`).
    pub g0: f64,
    /// `w(0)/‖v‖²`, the quantity named as the crossing point.
    pub g_star: f64,
    /// `√(w(0)/‖v‖²)`, where `w_g(0)` actually changes sign.
    pub g_star_sqrt: f64,
}

fn check_inputs(w: &RadialPotential, v: &RadialPotential) -> Result<()> {
    if !w.is_nonnegative() || !v.is_nonnegative() {
        return Err(Error::invalid("w and v must be nonnegative"));
    }
    if v.is_zero() {
        return Err(Error::invalid("v vanishes identically, so w(0)/‖v‖² is undefined"));
    }
    Ok(())
}

/// Whether `w − g²·vv ≥ 0` at every node of the merged grid, up to
/// cancellation error.
fn nonnegative_at(w: &RadialPotential, vv: &RadialPotential, nodes: &[f64], g: f64) -> bool {
    let g2 = g * g;
    nodes.iter().all(|&r| {
        let (a, b) = (w.value(r), g2 * vv.value(r));
        a - b >= -1e-12 * (a.abs() + b.abs())
    })
}

fn couplings_with(w: &RadialPotential, v: &RadialPotential, vv: &RadialPotential) -> CriticalCouplings {
    let norm = v.l2_sq_3d();
    let g_star = w.value(0.0) / norm;
    let g_star_sqrt = g_star.sqrt();
    let nodes = super::merge_grids(w.grid(), vv.grid());
    let (mut lo, mut hi) = (0.0, g_star_sqrt);
    if nonnegative_at(w, vv, &nodes, hi) {
        lo = hi;
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if nonnegative_at(w, vv, &nodes, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let g0 = if nonnegative_at(w, vv, &nodes, lo) && lo > 0.0 { lo } else { 0.0 };
    CriticalCouplings { g0, g_star, g_star_sqrt }
}

/// Computes `g₀`, `g★ = w(0)/‖v‖²` and `√g★`.
pub fn critical_couplings(w: &RadialPotential, v: &RadialPotential) -> Result<CriticalCouplings> {
    check_inputs(w, v)?;
    Ok(couplings_with(w, v, &radial_convolution(v, v)))
}

/// Status of one grid point of the energy curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    Ok,
    AboveG0,
    BoundState,
    Resonance,
}

impl PointFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointFlag::Ok => "ok",
            PointFlag::AboveG0 => "above_g0",
            PointFlag::BoundState => "bound_state",
            PointFlag::Resonance => "resonance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyPoint {
    pub g: f64,
    /// `None` at a resonance.
    pub a: Option<f64>,
    /// `4π𝔞(g)`.
    pub four_pi_a: Option<f64>,
    /// Mean-field comparison `4π(∫w − g²(∫v)²)`.
    pub eg2: f64,
    pub flag: PointFlag,
}

/// The phase diagram along a coupling grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub couplings: CriticalCouplings,
    pub points: Vec<EnergyPoint>,
    /// Fitted `log(−E/N)` vs `log N` slopes per coupling, if requested.
    pub collapse_slopes: Vec<(f64, Option<f64>)>,
}

/// Evaluates `4π𝔞(g)` and the mean-field curve on `g_grid`.
pub fn energy_curve(w: &RadialPotential, v: &RadialPotential, g_grid: &[f64]) -> Result<PhaseDiagram> {
    check_inputs(w, v)?;
    let vv = radial_convolution(v, v);
    let couplings = couplings_with(w, v, &vv);
    let (int_w, int_v) = (w.integral_3d(), v.integral_3d());
    let points = g_grid
        .par_iter()
        .map(|&g| {
            let wg = w.combine(1.0, &vv, -g * g);
            let eg2 = 4.0 * PI * (int_w - g * g * int_v * int_v);
            let above = g > couplings.g0;
            match scattering_length(&wg) {
                Ok(s) => {
                    let flag = if above {
                        PointFlag::AboveG0
                    } else if s.bound_state_crossing {
                        PointFlag::BoundState
                    } else {
                        PointFlag::Ok
                    };
                    EnergyPoint { g, a: Some(s.a), four_pi_a: Some(4.0 * PI * s.a), eg2, flag }
                }
                Err(_) => EnergyPoint { g, a: None, four_pi_a: None, eg2, flag: PointFlag::Resonance },
            }
        })
        .collect();
    Ok(PhaseDiagram { couplings, points, collapse_slopes: Vec::new() })
}

/// Product-state energies `E(N)/N` of the rescaled profile `ψ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollapseTable {
    pub g: f64,
    /// `‖∇ψ‖²` after normalization.
    pub kinetic: f64,
    /// `∫(|ψ|² ∗ |ψ|²) w_g`.
    pub pair: f64,
    pub rows: Vec<(usize, f64)>,
    /// Least-squares slope of `log(−E/N)` against `log N`, when every `E/N < 0`.
    pub slope: Option<f64>,
}

/// `E(N)/N = N²‖∇ψ‖² + (N³/2)((N−1)/N) ∫(|ψ|²∗|ψ|²) w_g` for each `N`.
pub fn collapse_energy(
    psi: &RadialPotential,
    w: &RadialPotential,
    v: &RadialPotential,
    g: f64,
    n_list: &[usize],
) -> Result<CollapseTable> {
    let norm = RadialPotential::triple_integral(psi, Some(psi), None);
    if !(norm > 0.0) {
        return Err(Error::invalid("the wave profile has zero norm"));
    }
    let psi = psi.scale(1.0 / norm.sqrt());
    let kinetic = 4.0
        * PI
        * psi
            .grid()
            .windows(2)
            .zip(psi.values().windows(2))
            .map(|(r, f)| ((f[1] - f[0]) / (r[1] - r[0])).powi(2) * (r[1].powi(3) - r[0].powi(3)) / 3.0)
            .sum::<f64>();
    let rho = RadialPotential { r: psi.grid().to_vec(), values: psi.values().iter().map(|x| x * x).collect() };
    let rho_rho = radial_convolution(&rho, &rho);
    let wg = w.combine(1.0, &radial_convolution(v, v), -g * g);
    let pair = RadialPotential::triple_integral(&rho_rho, Some(&wg), None);
    let rows: Vec<(usize, f64)> = n_list
        .iter()
        .map(|&n| {
            let nf = n as f64;
            (n, nf * nf * kinetic + 0.5 * nf * nf * (nf - 1.0) * pair)
        })
        .collect();
    let slope = if rows.len() >= 2 && rows.iter().all(|&(_, e)| e < 0.0) {
        let x: Vec<f64> = rows.iter().map(|&(n, _)| (n as f64).ln()).collect();
        let y: Vec<f64> = rows.iter().map(|&(_, e)| (-e).ln()).collect();
        Some(ols_slope(&x, &y))
    } else {
        None
    };
    Ok(CollapseTable { g, kinetic, pair, rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(radius: f64) -> RadialPotential {
        RadialPotential::from_fn(radius, 400, |r| (1.0 - (r / radius).powi(2)).powi(2)).unwrap()
    }

    #[test]
    fn proportional_inputs_give_known_couplings() {
        let v = bump(1.0);
        let vv = radial_convolution(&v, &v);
        for alpha in [0.5, 2.0] {
            let c = critical_couplings(&vv.scale(alpha), &v).unwrap();
            assert!((c.g_star - alpha).abs() < 1e-9);
            assert!((c.g0 - alpha.sqrt()).abs() < 1e-6);
            assert!(c.g0 <= c.g_star_sqrt + 1e-12);
        }
    }

    #[test]
    fn a_hole_in_w_forces_g0_to_zero() {
        let v = bump(0.5);
        let w = RadialPotential::from_fn(2.0, 400, |r| if r < 0.3 { 1.0 } else if r < 0.4 { 0.0 } else { 1.0 }).unwrap();
        assert_eq!(critical_couplings(&w, &v).unwrap().g0, 0.0);
    }

    #[test]
    fn wide_w_keeps_g0_positive() {
        let v = bump(0.5);
        let w = RadialPotential::step(1.0, 2.0).unwrap();
        let c = critical_couplings(&w, &v).unwrap();
        assert!(c.g0 > 0.0 && c.g0 <= c.g_star_sqrt);
    }

    #[test]
    fn vanishing_v_is_rejected() {
        let w = RadialPotential::step(1.0, 1.0).unwrap();
        let v = RadialPotential::step(0.0, 1.0).unwrap();
        assert!(critical_couplings(&w, &v).is_err());
    }

    #[test]
    fn energy_curve_shapes() {
        let v = bump(0.5);
        let w = RadialPotential::step(1.0, 2.0).unwrap();
        let grid: Vec<f64> = (0..5).map(|i| 0.25 * i as f64).collect();
        let d = energy_curve(&w, &v, &grid).unwrap();
        let p0 = d.points[0];
        assert!((p0.eg2 - 4.0 * PI * w.integral_3d()).abs() < 1e-12);
        assert_eq!(p0.a, Some(scattering_length(&w).unwrap().a));
        for pair in d.points.windows(2) {
            assert!(pair[1].eg2 < pair[0].eg2);
        }
        for p in &d.points {
            assert_eq!(p.flag == PointFlag::AboveG0, p.g > d.couplings.g0);
        }
    }

    #[test]
    fn collapse_energy_is_affine_in_g_squared() {
        let v = bump(0.5);
        let w = RadialPotential::step(1.0, 1.0).unwrap();
        let psi = bump(0.4);
        let pair = |g: f64| collapse_energy(&psi, &w, &v, g, &[8]).unwrap().pair;
        let (p0, p1, p2) = (pair(0.0), pair(1.0), pair(2.0));
        assert!(((p2 - p0) - 4.0 * (p1 - p0)).abs() < 1e-10 * p0.abs().max(1.0));
        let t = collapse_energy(&psi, &w, &v, 0.0, &[8, 16, 32, 64]).unwrap();
        assert!(t.rows.iter().all(|&(_, e)| e >= 0.0));
        assert!(t.slope.is_none());
    }
}
