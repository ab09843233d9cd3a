//! Small numerical building blocks shared by the modules.

/// Compensated (Kahan–Babuška) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Sum of a slice with compensation, in slice order.
pub fn kahan(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<KahanSum>().value()
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Adaptive Simpson over consecutive intervals of `breaks`, splitting the
/// tolerance evenly. Kinks and jumps of `f` should sit on the breakpoints.
pub fn piecewise_simpson<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> f64 {
    if breaks.len() < 2 {
        return 0.0;
    }
    let per = tol / (breaks.len() - 1) as f64;
    kahan(breaks.windows(2).map(|w| adaptive_simpson(&f, w[0], w[1], per)))
}

/// Composite Simpson rule on uniformly spaced samples (odd length).
/// Falls back to the trapezoid rule on the last interval for even lengths.
pub fn simpson_uniform(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let odd_len = if n % 2 == 1 { n } else { n - 1 };
    let mut acc = KahanSum::new();
    if odd_len >= 3 {
        acc.add(samples[0] + samples[odd_len - 1]);
        for (i, &s) in samples[1..odd_len - 1].iter().enumerate() {
            acc.add(if i % 2 == 0 { 4.0 * s } else { 2.0 * s });
        }
    }
    let mut total = acc.value() * h / 3.0;
    if odd_len != n {
        total += 0.5 * h * (samples[n - 2] + samples[n - 1]);
    }
    total
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
