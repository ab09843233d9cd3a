//! Fermi ball and lune geometry on the integer lattice, and the resolvent
//! sums built on it.
//!
//! All membership tests compare squared norms against `k_F²`, so a Fermi
//! radius entered as `k_F² ∈ ℕ` gives exact shell semantics.

mod summation;
mod table;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::KahanSum;

pub use summation::{asymptotics_report, summation_formula, AsymptoticsRow, SummationFormula, SummationFormulaParams};
pub use table::{LuneKey, LuneSumTable};

/// An integer momentum on the dual lattice of the torus.
pub type Momentum = [i64; 3];

/// Squared Euclidean norm.
pub fn norm2(k: Momentum) -> i64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

pub fn add(a: Momentum, b: Momentum) -> Momentum {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Momentum, b: Momentum) -> Momentum {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn neg(a: Momentum) -> Momentum {
    [-a[0], -a[1], -a[2]]
}

/// Sorted absolute values: the representative of `k` under the 48
/// signed permutations of the coordinates.
pub fn canonical(k: Momentum) -> Momentum {
    let mut c = [k[0].abs(), k[1].abs(), k[2].abs()];
    c.sort_unstable();
    c
}

/// The Fermi radius, stored through its square.
///
/// `Exact` holds an integer `k_F²` and is the recommended mode. `Real`
/// keeps a rounded `k_F²` for radii that are not square roots of integers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FermiRadius {
    Exact(u64),
    Real(f64),
}

impl FermiRadius {
    pub fn from_kf2(kf2: u64) -> Result<Self> {
        if kf2 < 1 {
            return Err(Error::invalid(format!("k_F must be at least 1, got k_F² = {kf2}")));
        }
        Ok(FermiRadius::Exact(kf2))
    }

    pub fn from_kf(kf: f64) -> Result<Self> {
        if !(kf >= 1.0) || !kf.is_finite() {
            return Err(Error::invalid(format!("k_F must be a finite number ≥ 1, got {kf}")));
        }
        let kf2 = kf * kf;
        if kf2.fract() == 0.0 && kf2 < 9.0e15 {
            Ok(FermiRadius::Exact(kf2 as u64))
        } else {
            Ok(FermiRadius::Real(kf2))
        }
    }

    pub fn kf2(&self) -> f64 {
        match *self {
            FermiRadius::Exact(n) => n as f64,
            FermiRadius::Real(x) => x,
        }
    }

    pub fn kf(&self) -> f64 {
        self.kf2().sqrt()
    }

    /// `|k|² ≤ k_F²`.
    pub fn contains(&self, n2: i64) -> bool {
        match *self {
            FermiRadius::Exact(n) => n2 <= n as i64,
            FermiRadius::Real(x) => (n2 as f64) <= x,
        }
    }

    /// Largest `z ≥ 0` with `used + z² ≤ k_F²`, or `None` if `used > k_F²`.
    pub fn zmax(&self, used: i64) -> Option<i64> {
        if !self.contains(used) {
            return None;
        }
        let rest = match *self {
            FermiRadius::Exact(n) => n as i64 - used,
            FermiRadius::Real(x) => (x - used as f64).floor() as i64,
        };
        let mut z = (rest as f64).sqrt() as i64;
        while z > 0 && !self.contains(used + z * z) {
            z -= 1;
        }
        while self.contains(used + (z + 1) * (z + 1)) {
            z += 1;
        }
        Some(z)
    }

    /// Largest integer radius inside the ball.
    pub fn int_radius(&self) -> i64 {
        self.zmax(0).unwrap_or(0)
    }

    /// `k_F²` as written in cache files and reports.
    pub fn label(&self) -> String {
        match *self {
            FermiRadius::Exact(n) => n.to_string(),
            FermiRadius::Real(x) => format!("{x:?}"),
        }
    }

    fn key_bits(&self) -> (bool, u64) {
        match *self {
            FermiRadius::Exact(n) => (true, n),
            FermiRadius::Real(x) => (false, x.to_bits()),
        }
    }
}

impl std::fmt::Display for FermiRadius {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "k_F² = {}", self.label())
    }
}

/// The occupied Fermi sea `B_F = {k : |k| ≤ k_F}`.
#[derive(Clone, Debug)]
pub struct FermiBall {
    pub radius: FermiRadius,
    pub points: Vec<Momentum>,
    /// Number of fermions `M = |B_F|`.
    pub count: usize,
    /// Fermi energy `E_F = Σ_{k ∈ B_F} |k|²`.
    pub energy: i64,
}

impl FermiBall {
    pub fn contains(&self, k: Momentum) -> bool {
        self.radius.contains(norm2(k))
    }
}

/// Enumerates the Fermi ball column by column in lexicographic order.
pub fn fermi_ball(radius: FermiRadius) -> FermiBall {
    let mut points = Vec::new();
    for_each_ball_point(radius, [0, 0, 0], |p| points.push(p));
    let energy = points.iter().map(|&p| norm2(p)).sum();
    FermiBall { radius, count: points.len(), points, energy }
}

fn for_each_ball_point(radius: FermiRadius, center: Momentum, mut f: impl FnMut(Momentum)) {
    let r = radius.int_radius();
    for x in -r..=r {
        let Some(ymax) = radius.zmax(x * x) else { continue };
        for y in -ymax..=ymax {
            let Some(zm) = radius.zmax(x * x + y * y) else { continue };
            for z in -zm..=zm {
                f([center[0] + x, center[1] + y, center[2] + z]);
            }
        }
    }
}

/// Calls `f(p, q)` for each `p ∈ L(k)` whose offset `q = p − k` sits in the
/// x-slab `q_x = qx`. Inside each column the excluded `p_z` window
/// `|p|² ≤ k_F²` is cut out analytically.
fn for_each_lune_point_in_slab(radius: FermiRadius, k: Momentum, qx: i64, mut f: impl FnMut(Momentum, Momentum)) {
    let Some(ymax) = radius.zmax(qx * qx) else { return };
    let px = k[0] + qx;
    for qy in -ymax..=ymax {
        let Some(zq) = radius.zmax(qx * qx + qy * qy) else { continue };
        let py = k[1] + qy;
        let a = px * px + py * py;
        let mut emit = |qz: i64| f([px, py, k[2] + qz], [qx, qy, qz]);
        match radius.zmax(a) {
            None => (-zq..=zq).for_each(&mut emit),
            Some(t) => {
                // exclude k_z + q_z ∈ [−t, t]
                let lo_ex = -t - k[2];
                let hi_ex = t - k[2];
                (-zq..=zq.min(lo_ex - 1)).for_each(&mut emit);
                ((-zq).max(hi_ex + 1)..=zq).for_each(&mut emit);
            }
        }
    }
}

/// The lune `L(k) = {p : |p| > k_F, |p − k| ≤ k_F}` in lexicographic order of `p − k`.
pub fn lune_points(k: Momentum, radius: FermiRadius) -> Vec<Momentum> {
    let mut out = Vec::new();
    if k == [0, 0, 0] {
        return out;
    }
    let r = radius.int_radius();
    for qx in -r..=r {
        for_each_lune_point_in_slab(radius, k, qx, |p, _| out.push(p));
    }
    out
}

/// A lune sum together with the lune cardinality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LuneSum {
    pub value: f64,
    pub count: u64,
}

fn inverse_power(e: i64, alpha: f64) -> f64 {
    let e = e as f64;
    if alpha == 0.0 {
        1.0
    } else if alpha == 1.0 {
        1.0 / e
    } else if alpha == 2.0 {
        1.0 / (e * e)
    } else {
        e.powf(-alpha)
    }
}

/// Computes `D_α(k, k_F) = Σ_{p ∈ L(k)} (p² − (p − k)²)^{−α}` by direct
/// enumeration, parallel over x-slabs with an ordered compensated reduction.
///
/// The sum is always evaluated at the canonical representative of `k`, so
/// symmetric momenta give bit-identical results.
pub fn resolvent_sum(alpha: f64, k: Momentum, radius: FermiRadius) -> LuneSum {
    let k = canonical(k);
    if k == [0, 0, 0] {
        return LuneSum { value: 0.0, count: 0 };
    }
    let r = radius.int_radius();
    let slabs: Vec<(KahanSum, u64)> = (-r..=r)
        .into_par_iter()
        .map(|qx| {
            let mut acc = KahanSum::new();
            let mut count = 0u64;
            for_each_lune_point_in_slab(radius, k, qx, |p, q| {
                acc.add(inverse_power(norm2(p) - norm2(q), alpha));
                count += 1;
            });
            (acc, count)
        })
        .collect();
    let mut total = KahanSum::new();
    let mut count = 0;
    for (acc, c) in slabs {
        total.add(acc.value());
        count += c;
    }
    LuneSum { value: total.value(), count }
}

/// Largest lune handled by [`resolvent_sum_exact`].
pub const EXACT_LUNE_LIMIT: usize = 10_000;

/// Exact rational `D_α(k, k_F)` for integer `α` and integer `k_F²`.
pub fn resolvent_sum_exact(alpha: u32, k: Momentum, kf2: u64) -> Result<BigRational> {
    let radius = FermiRadius::from_kf2(kf2)?;
    let points = lune_points(k, radius);
    if points.len() > EXACT_LUNE_LIMIT {
        return Err(Error::Capacity { dim: points.len(), cap: EXACT_LUNE_LIMIT });
    }
    let mut total = BigRational::zero();
    for p in points {
        let e = BigInt::from(norm2(p) - norm2(sub(p, k)));
        total += BigRational::new(BigInt::from(1), num_traits::pow(e, alpha as usize));
    }
    Ok(total)
}
