use std::f64::consts::PI;

use serde::Serialize;

use super::{norm2, FermiRadius, LuneSumTable, Momentum};
use crate::error::{Error, Result};
use crate::quad::KahanSum;

/// Plane-spacing parameters of the one-dimensional reduction of a lune sum.
///
/// Lattice points satisfy `p·k/|k| ∈ ℓℤ`; the lune occupies the planes
/// `m★ ≤ m ≤ M★`, of which `m ≤ M` cut the Fermi sphere in full discs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SummationFormulaParams {
    pub ell: f64,
    pub gcd: i64,
    pub m_star: i64,
    pub m_upper: i64,
    pub m_upper_star: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn floor_sqrt(x: f64) -> i64 {
    let mut s = x.sqrt() as i64;
    while s > 0 && (s * s) as f64 > x {
        s -= 1;
    }
    while ((s + 1) * (s + 1)) as f64 <= x {
        s += 1;
    }
    s
}

impl SummationFormulaParams {
    pub fn new(k: Momentum, radius: FermiRadius) -> Result<Self> {
        let k2 = norm2(k);
        if k2 == 0 || k2 as f64 >= 4.0 * radius.kf2() {
            return Err(Error::OutOfRange(format!(
                "summation formula needs 0 < |k| < 2 k_F, got |k|² = {k2} at {radius}"
            )));
        }
        let g = gcd(gcd(k[0], k[1]), k[2]);
        let kabs = (k2 as f64).sqrt();
        // ℓ·m > |k|/2  ⇔  2·g·m > |k|²
        let m_star = k2.div_euclid(2 * g) + 1;
        // ℓ·M ≤ k_F  ⇔  g·M ≤ √(k_F²|k|²)
        let s = floor_sqrt(radius.kf2() * k2 as f64);
        Ok(SummationFormulaParams { ell: g as f64 / kabs, gcd: g, m_star, m_upper: s / g, m_upper_star: (s + k2) / g })
    }
}

/// The two explicit terms of the summation formula and its error scale, in
/// the normalization of `D_α` (the formula itself sums over `½(p² − (p−k)²)`,
/// so every term carries a factor `2^{−α}`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SummationFormula {
    pub params: SummationFormulaParams,
    pub main: f64,
    pub boundary: f64,
    pub error_scale: f64,
}

impl SummationFormula {
    pub fn approximation(&self) -> f64 {
        self.main + self.boundary
    }
}

/// Evaluates the one-dimensional plane sums approximating `D_α(k, k_F)` with `f(λ) = λ^{−α}`.
pub fn summation_formula(k: Momentum, radius: FermiRadius, alpha: f64) -> Result<SummationFormula> {
    let params = SummationFormulaParams::new(k, radius)?;
    let kabs = (norm2(k) as f64).sqrt();
    let kf = radius.kf();
    let ell = params.ell;
    let height = |m: i64| ell * m as f64 - 0.5 * kabs;
    let f = |m: i64| (kabs * height(m)).powf(-alpha);

    let mut main = KahanSum::new();
    for m in params.m_star..=params.m_upper {
        main.add(f(m) * height(m) * ell);
    }
    let mut boundary = KahanSum::new();
    for m in params.m_upper + 1..=params.m_upper_star {
        let shifted = ell * m as f64 - kabs;
        boundary.add(f(m) * (radius.kf2() - shifted * shifted) * ell);
    }
    let mut fsum = KahanSum::new();
    for m in params.m_star..=params.m_upper_star {
        fsum.add(f(m));
    }
    let norm = 2f64.powf(-alpha);
    let log = kf.ln().max(1.0);
    Ok(SummationFormula {
        params,
        main: norm * 2.0 * PI * kabs * main.value(),
        boundary: norm * PI * boundary.value(),
        error_scale: norm * kabs.powf(11.0 / 3.0) * log * kf.powf(2.0 / 3.0) * fsum.value(),
    })
}

/// One row of the lune-sum asymptotics table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticsRow {
    pub k: Momentum,
    pub kf_squared: String,
    pub kf: f64,
    pub d1: f64,
    /// `D₁ / (2π k_F)`.
    pub d1_ratio: f64,
    /// `|D₁/(2πk_F) − 1| · k_F^{1/3} / (L^{5/3} |k|⁴)` with `L = max(ln k_F, 1)`.
    pub d1_normalized: f64,
    pub d2: f64,
    /// `D₂ / (|k|⁴ L^{2/3} k_F^{2/3})`.
    pub d2_normalized: f64,
    /// Set when `|k| ≥ 2 k_F`; then `d1_large_k = D₁ |k|² / k_F³` is the relevant ratio.
    pub large_k: bool,
    pub d1_large_k: f64,
}

pub fn asymptotics_report(ks: &[Momentum], radii: &[FermiRadius], table: &LuneSumTable) -> Result<Vec<AsymptoticsRow>> {
    if let Some(k) = ks.iter().find(|&&k| k == [0, 0, 0]) {
        return Err(Error::OutOfRange(format!("asymptotics rows need k ≠ 0, got {k:?}")));
    }
    let mut rows = Vec::with_capacity(ks.len() * radii.len());
    for &k in ks {
        for &radius in radii {
            let kf = radius.kf();
            let k2 = norm2(k) as f64;
            let k4 = k2 * k2;
            let log = kf.ln().max(1.0);
            let d1 = table.value(1.0, k, radius);
            let d2 = table.value(2.0, k, radius);
            let d1_ratio = d1 / (2.0 * PI * kf);
            rows.push(AsymptoticsRow {
                k,
                kf_squared: radius.label(),
                kf,
                d1,
                d1_ratio,
                d1_normalized: (d1_ratio - 1.0).abs() * kf.cbrt() / (log.powf(5.0 / 3.0) * k4),
                d2,
                d2_normalized: d2 / (k4 * log.powf(2.0 / 3.0) * kf.powf(2.0 / 3.0)),
                large_k: k2 >= 4.0 * radius.kf2(),
                d1_large_k: d1 * k2 / kf.powi(3),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::resolvent_sum;

    fn kf(n: u64) -> FermiRadius {
        FermiRadius::from_kf2(n).unwrap()
    }

    #[test]
    fn parameters_satisfy_the_plane_inequalities() {
        for kf2 in [1u64, 7, 100, 2500] {
            let r = kf(kf2);
            for k in [[1, 0, 0], [2, 0, 0], [1, 1, 0], [1, 1, 1], [2, 1, 0], [2, 2, 0]] {
                let Ok(p) = SummationFormulaParams::new(k, r) else { continue };
                let kabs = (norm2(k) as f64).sqrt();
                let (l, kfv) = (p.ell, r.kf());
                let eps = 1e-12;
                assert!(l <= 1.0 + eps);
                assert!(l * p.m_star as f64 > kabs / 2.0);
                assert!(l * p.m_star as f64 <= kabs / 2.0 + l + eps);
                assert!(l * p.m_star as f64 - kabs / 2.0 >= 1.0 / (2.0 * kabs) - eps);
                assert!(l * p.m_upper as f64 <= kfv + eps && kfv - l <= l * p.m_upper as f64 + eps);
                assert!(l * p.m_upper_star as f64 <= kfv + kabs + eps);
                assert!(kfv + kabs - l <= l * p.m_upper_star as f64 + eps);
            }
        }
    }

    #[test]
    fn gcd_of_two_e1_gives_unit_spacing() {
        let p = SummationFormulaParams::new([2, 0, 0], kf(2500)).unwrap();
        assert_eq!(p.ell, 1.0);
    }

    #[test]
    fn out_of_range_momenta_are_rejected() {
        assert!(summation_formula([0, 0, 0], kf(100), 1.0).is_err());
        assert!(summation_formula([20, 0, 0], kf(100), 1.0).is_err());
        assert!(summation_formula([19, 0, 0], kf(100), 1.0).is_ok());
    }

    #[test]
    fn formula_tracks_direct_enumeration() {
        for (k, kf2, alpha) in [([1, 0, 0], 2500, 1.0), ([1, 1, 0], 10000, 2.0), ([2, 1, 1], 900, 1.0)] {
            let r = kf(kf2);
            let sf = summation_formula(k, r, alpha).unwrap();
            let direct = resolvent_sum(alpha, k, r).value;
            assert!((sf.approximation() - direct).abs() <= sf.error_scale, "{k:?} {kf2} {alpha}");
        }
    }

    #[test]
    fn report_rows_are_reflection_invariant() {
        let table = LuneSumTable::new();
        let radii: Vec<_> = [100u64, 400].map(kf).to_vec();
        let a = asymptotics_report(&[[1, 0, 0]], &radii, &table).unwrap();
        let b = asymptotics_report(&[[-1, 0, 0]], &radii, &table).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.d1, y.d1);
            assert_eq!(x.d2_normalized, y.d2_normalized);
        }
        assert!(asymptotics_report(&[[0, 0, 0]], &radii, &table).is_err());
    }
}
