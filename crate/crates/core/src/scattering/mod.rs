//! Radial potentials on `ℝ³`, the zero-energy scattering problem and the
//! stability diagnostics built on it.
//!
//! Profiles are piecewise linear between their grid nodes and vanish beyond
//! the support radius. Integrals of products of profiles are taken with
//! three-point Gauss–Legendre rules on the merged grid, which is exact for
//! these piecewise polynomials.

mod length;
mod phase;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::KahanSum;

pub use length::{scattering_length, ScatteringLength};
pub use phase::{
    collapse_energy, critical_couplings, energy_curve, CollapseTable, CriticalCouplings, EnergyPoint, PhaseDiagram,
    PointFlag,
};

/// A radial profile sampled on an increasing grid starting at `r = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialPotential {
    r: Vec<f64>,
    values: Vec<f64>,
}

const GL_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Three-point Gauss–Legendre over `[a, b]`, exact for quintics.
pub(crate) fn gauss3(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * GL_NODES.iter().zip(GL_WEIGHTS).map(|(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Sorted union of grid nodes, with near-duplicates merged.
fn merge_grids(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    let scale = all.last().copied().unwrap_or(1.0).max(1.0);
    all.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * scale);
    all
}

impl RadialPotential {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() != values.len() {
            return Err(Error::Shape { expected: r.len(), got: values.len() });
        }
        if r.len() < 2 || r[0] != 0.0 {
            return Err(Error::invalid("a radial grid needs at least two nodes and must start at r = 0"));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) || r.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::invalid("radial grid must be strictly increasing and all samples finite"));
        }
        Ok(RadialPotential { r, values })
    }

    /// Samples on the uniform grid `r_i = i·r_max/(n−1)`.
    pub fn uniform(r_max: f64, samples: Vec<f64>) -> Result<Self> {
        if !(r_max > 0.0) || samples.len() < 2 {
            return Err(Error::invalid("a uniform radial grid needs r_max > 0 and at least two samples"));
        }
        let n = samples.len() - 1;
        let r = (0..=n).map(|i| r_max * i as f64 / n as f64).collect();
        Self::new(r, samples)
    }

    /// Samples `f` on `intervals + 1` uniform nodes of `[0, r_max]`.
    pub fn from_fn(r_max: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = (0..=intervals).map(|i| f(r_max * i as f64 / intervals as f64)).collect();
        Self::uniform(r_max, samples)
    }

    /// The constant `height` on `r ≤ radius`.
    pub fn step(height: f64, radius: f64) -> Result<Self> {
        Self::uniform(radius, vec![height; 2])
    }

    pub fn grid(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Outside this radius the profile vanishes.
    pub fn support_radius(&self) -> f64 {
        *self.r.last().unwrap()
    }

    fn segment(&self, r: f64) -> usize {
        self.r.partition_point(|&x| x <= r).saturating_sub(1).min(self.r.len() - 2)
    }

    /// Piecewise-linear value, zero beyond the support radius.
    pub fn value(&self, r: f64) -> f64 {
        if r > self.support_radius() || r < 0.0 {
            return 0.0;
        }
        let i = self.segment(r);
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let t = (r - r0) / (r1 - r0);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Nonnegative up to rounding at the `1e−12` relative level.
    pub fn is_nonnegative(&self) -> bool {
        self.min_value() >= -1e-12 * self.max_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        RadialPotential { r: self.r.clone(), values: self.values.iter().map(|v| a * v).collect() }
    }

    /// `a·self + b·other` on the merged grid; exact for the piecewise-linear interpolants.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let r = merge_grids(&self.r, &other.r);
        let values = r.iter().map(|&x| a * self.value(x) + b * other.value(x)).collect();
        RadialPotential { r, values }
    }

    /// `∫_{ℝ³} f(|x|) g(|x|) h(|x|) dx` for three radial profiles, exact for linear pieces.
    pub(crate) fn triple_integral(f: &Self, g: Option<&Self>, h: Option<&Self>) -> f64 {
        let mut nodes = f.r.clone();
        for other in [g, h].into_iter().flatten() {
            nodes = merge_grids(&nodes, &other.r);
        }
        let reach = f.support_radius().min(g.map_or(f64::INFINITY, Self::support_radius)).min(h.map_or(f64::INFINITY, Self::support_radius));
        let mut acc = KahanSum::new();
        for w in nodes.windows(2) {
            if w[0] >= reach {
                break;
            }
            acc.add(gauss3(w[0], w[1].min(reach), |r| {
                r * r * f.value(r) * g.map_or(1.0, |p| p.value(r)) * h.map_or(1.0, |p| p.value(r))
            }));
        }
        4.0 * PI * acc.value()
    }

    /// `∫_{ℝ³} v`.
    pub fn integral_3d(&self) -> f64 {
        Self::triple_integral(self, None, None)
    }

    /// `‖v‖²_{L²(ℝ³)}`.
    pub fn l2_sq_3d(&self) -> f64 {
        Self::triple_integral(self, Some(self), None)
    }

    /// `U(t) = ∫₀^t s·v(s) ds`, exact for the linear interpolant.
    fn moment_table(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.r.len());
        let mut acc = KahanSum::new();
        cum.push(0.0);
        for i in 0..self.r.len() - 1 {
            acc.add(self.partial_moment(i, self.r[i + 1]));
            cum.push(acc.value());
        }
        cum
    }

    /// `∫_{r_i}^{t} s·v(s) ds` inside segment `i`.
    fn partial_moment(&self, i: usize, t: f64) -> f64 {
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let slope = (self.values[i + 1] - self.values[i]) / (r1 - r0);
        let a = self.values[i] - slope * r0;
        // ∫ s(a + slope·s) ds = a s²/2 + slope s³/3
        let prim = |s: f64| a * s * s / 2.0 + slope * s * s * s / 3.0;
        prim(t) - prim(r0)
    }

    fn moment(&self, cum: &[f64], t: f64) -> f64 {
        if t >= self.support_radius() {
            return *cum.last().unwrap();
        }
        let i = self.segment(t);
        cum[i] + self.partial_moment(i, t)
    }
}

/// The three-dimensional convolution of two radial profiles, sampled on a
/// uniform grid of `intervals` steps over `[0, R_v + R_u]`.
pub fn radial_convolution_with(v: &RadialPotential, u: &RadialPotential, intervals: usize) -> RadialPotential {
    let reach = v.support_radius() + u.support_radius();
    let cum = u.moment_table();
    let rv = v.support_radius();
    let at = |r: f64| -> f64 {
        if r == 0.0 {
            return RadialPotential::triple_integral(v, Some(u), None);
        }
        // kinks of the integrand: v's nodes, s = r, and s where r ± s meets a node of u
        let mut breaks: Vec<f64> = v.r.clone();
        breaks.push(r.min(rv));
        for &x in &u.r {
            for s in [x - r, r - x, r + x] {
                if s > 0.0 && s < rv {
                    breaks.push(s);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut acc = KahanSum::new();
        for w in breaks.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            acc.add(gauss3(w[0], w[1], |s| s * v.value(s) * (u.moment(&cum, r + s) - u.moment(&cum, (r - s).abs()))));
        }
        2.0 * PI / r * acc.value()
    };
    let rs: Vec<f64> = (0..=intervals).map(|i| reach * i as f64 / intervals as f64).collect();
    use rayon::prelude::*;
    let values: Vec<f64> = rs.par_iter().map(|&r| at(r)).collect();
    RadialPotential { r: rs, values }
}

/// [`radial_convolution_with`] on a grid of 2048 intervals.
pub fn radial_convolution(v: &RadialPotential, u: &RadialPotential) -> RadialPotential {
    radial_convolution_with(v, u, 2048)
}
