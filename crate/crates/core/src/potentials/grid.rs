use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{two_pi_three_halves, FourierPotential};
use crate::quad::KahanSum;

/// Inverse FFT along one axis of an `n³` array stored as `(ix·n + iy)·n + iz`.
fn axis_pass(data: &mut [Complex64], n: usize, axis: usize) {
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let stride = n.pow(2 - axis as u32);
    let line_start = |line: usize| -> usize {
        // `line` enumerates the two remaining coordinates in row-major order
        let (a, b) = (line / n, line % n);
        match axis {
            0 => a * n + b,
            1 => a * n * n + b,
            _ => (a * n + b) * n,
        }
    };
    let lines: Vec<Vec<Complex64>> = (0..n * n)
        .into_par_iter()
        .map(|line| {
            let start = line_start(line);
            let mut buf: Vec<Complex64> = (0..n).map(|i| data[start + i * stride]).collect();
            fft.process(&mut buf);
            buf
        })
        .collect();
    for (line, buf) in lines.into_iter().enumerate() {
        let start = line_start(line);
        for (i, v) in buf.into_iter().enumerate() {
            data[start + i * stride] = v;
        }
    }
}

pub(super) fn synthesize(v: &FourierPotential, n: usize) -> Vec<f64> {
    let mut data = vec![Complex64::new(0.0, 0.0); n * n * n];
    let wrap = |c: i64| c.rem_euclid(n as i64) as usize;
    for (k, c) in v.iter() {
        data[(wrap(k[0]) * n + wrap(k[1])) * n + wrap(k[2])] += c;
    }
    for axis in 0..3 {
        axis_pass(&mut data, n, axis);
    }
    let norm = two_pi_three_halves();
    data.into_iter().map(|z| z.re / norm).collect()
}

pub(super) fn lp_from_samples(values: &[f64], p: f64, n: usize) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    }
    let slabs: Vec<f64> = values
        .par_chunks(n * n)
        .map(|slab| slab.iter().map(|v| v.abs().powf(p)).collect::<KahanSum>().value())
        .collect();
    let cell = (2.0 * std::f64::consts::PI / n as f64).powi(3);
    (slabs.into_iter().collect::<KahanSum>().value() * cell).powf(1.0 / p)
}
