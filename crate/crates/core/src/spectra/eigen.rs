use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{random_state, BoundOperator, FockBasis, Operator};
use crate::sparse::CsrMatrix;

/// Dimensions up to this size are diagonalized densely.
pub const DENSE_LIMIT: usize = 2000;

/// A real symmetric linear map.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut y = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut y);
            e[j] = 0.0;
            m.set_column(j, &DVector::from_column_slice(&y));
        }
        m
    }
}

impl LinearOperator for BoundOperator<'_> {
    fn dim(&self) -> usize {
        BoundOperator::dim(self)
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_into(x, y).expect("dimensions agree");
    }
    fn to_dense(&self) -> DMatrix<f64> {
        self.assemble().to_dense()
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.matvec(x).expect("dimensions agree"));
    }
    fn to_dense(&self) -> DMatrix<f64> {
        CsrMatrix::to_dense(self)
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let r = self * DVector::from_column_slice(x);
        y.copy_from_slice(r.as_slice());
    }
    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    Dense,
    Lanczos,
}

/// Solver settings.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EigenOptions {
    /// Relative residual tolerance `‖Ax − µx‖ ≤ tol · max(1, |µ|)`.
    pub tol: f64,
    /// Krylov basis size before a thick restart.
    pub krylov: usize,
    pub max_restarts: usize,
    pub dense_limit: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-10, krylov: 80, max_restarts: 300, dense_limit: DENSE_LIMIT, seed: 0x5eed }
    }
}

/// The lowest eigenpairs, counted with multiplicity in nondecreasing order.
#[derive(Clone, Debug, Serialize)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    /// `‖Ax − µx‖` for each returned unit vector.
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
    pub method: EigenMethod,
    pub dim: usize,
}

impl Eigenpairs {
    /// `µ₂ − µ₁`, if two values were computed.
    pub fn gap(&self) -> Option<f64> {
        (self.values.len() >= 2).then(|| self.values[1] - self.values[0])
    }

    /// Groups of indices whose eigenvalues lie within `eps` of their neighbours.
    pub fn clusters(&self, eps: f64) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some(c) if (v - self.values[*c.last().unwrap()]).abs() <= eps => c.push(i),
                _ => out.push(vec![i]),
            }
        }
        out
    }
}

/// Sum with a fixed reduction tree, independent of the thread count.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    const CHUNK: usize = 4096;
    let parts: Vec<f64> =
        a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum()).collect();
    parts.iter().sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(yi, xi)| *yi += a * xi);
}

fn residual_norm(op: &dyn LinearOperator, mu: f64, x: &[f64]) -> f64 {
    let mut y = vec![0.0; x.len()];
    op.apply(x, &mut y);
    let r: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - mu * b).collect();
    dot(&r, &r).sqrt()
}

/// Lowest `n` eigenpairs of `op` on `basis`.
pub fn lowest_eigenvalues(op: &Operator, basis: &FockBasis, n: usize, tol: f64) -> Result<Eigenpairs> {
    let bound = op.bind(basis);
    lowest_eigenpairs(&bound, n, EigenOptions { tol, ..EigenOptions::default() })
}

pub fn lowest_eigenpairs(op: &dyn LinearOperator, n: usize, opts: EigenOptions) -> Result<Eigenpairs> {
    let dim = op.dim();
    if n == 0 || dim == 0 {
        return Ok(Eigenpairs { values: vec![], residuals: vec![], vectors: vec![], method: EigenMethod::Dense, dim });
    }
    if n > dim {
        return Err(Error::invalid(format!("asked for {n} eigenvalues of a {dim}-dimensional operator")));
    }
    if dim <= opts.dense_limit {
        dense(op, n)
    } else {
        lanczos(op, n, opts)
    }
}

pub fn dense(op: &dyn LinearOperator, n: usize) -> Result<Eigenpairs> {
    let m = op.to_dense();
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &i in order.iter().take(n) {
        let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        residuals.push(residual_norm(op, eig.eigenvalues[i], &v));
        values.push(eig.eigenvalues[i]);
        vectors.push(v);
    }
    Ok(Eigenpairs { values, residuals, vectors, method: EigenMethod::Dense, dim: m.nrows() })
}

/// Thick-restart Lanczos with full reorthogonalization and locking.
///
/// A single Krylov space sees one copy of each eigenvalue, so converged
/// vectors are locked and further runs on their orthogonal complement pick
/// up missing multiplicities. The loop ends once a run on the complement
/// finds nothing below the `n`-th value already found.
pub fn lanczos(op: &dyn LinearOperator, n: usize, opts: EigenOptions) -> Result<Eigenpairs> {
    let dim = op.dim();
    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut stream = 0u64;
    loop {
        let locked: Vec<Vec<f64>> = found.iter().map(|f| f.1.clone()).collect();
        if locked.len() >= dim {
            break;
        }
        let want = if found.len() < n { n - found.len() } else { 1 };
        let want = want.min(dim - locked.len());
        let run = krylov_run(op, &locked, want, opts, &mut stream)?;
        if found.len() >= n {
            let nth = found[n - 1].0;
            if run[0].0 >= nth - opts.tol * nth.abs().max(1.0) {
                break;
            }
        }
        found.extend(run);
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        found.truncate(n);
    }
    let residuals = found.iter().map(|(mu, x)| residual_norm(op, *mu, x)).collect();
    let (values, vectors) = found.into_iter().unzip();
    Ok(Eigenpairs { values, residuals, vectors, method: EigenMethod::Lanczos, dim })
}

fn orthogonalize(r: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in against {
            let c = dot(v, r);
            axpy(-c, v, r);
        }
    }
}

/// Lowest `n` eigenpairs of `op` restricted to the complement of `locked`.
fn krylov_run(
    op: &dyn LinearOperator,
    locked: &[Vec<f64>],
    n: usize,
    opts: EigenOptions,
    stream: &mut u64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let dim = op.dim();
    let room = dim - locked.len();
    let m_max = opts.krylov.max(2 * n + 10).min(room);
    let keep = (n + 10).min(m_max.saturating_sub(2)).max(n);
    let mut fresh = || -> Vec<f64> {
        let mut r = random_state(dim, opts.seed, *stream);
        *stream += 1;
        orthogonalize(&mut r, locked);
        let nr = dot(&r, &r).sqrt();
        r.iter().map(|x| x / nr).collect()
    };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_max);
    let mut h = DMatrix::<f64>::zeros(m_max, m_max);
    let mut next = fresh();
    let mut beta = 0.0;
    let mut best: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];

    for _ in 0..=opts.max_restarts {
        while basis.len() < m_max {
            let j = basis.len();
            basis.push(std::mem::take(&mut next));
            op.apply(&basis[j], &mut w);
            orthogonalize(&mut w, locked);
            let image_norm = dot(&w, &w).sqrt();
            beta = image_norm;
            // Repeat classical Gram-Schmidt while a pass removes a large fraction of the norm.
            for _pass in 0..4 {
                orthogonalize(&mut w, locked);
                let coeffs: Vec<f64> = basis.iter().map(|v| dot(v, &w)).collect();
                for (i, c) in coeffs.iter().enumerate() {
                    axpy(-c, &basis[i], &mut w);
                    h[(i, j)] += c;
                }
                let after = dot(&w, &w).sqrt();
                let done = after > 0.7 * beta;
                beta = after;
                if done {
                    break;
                }
            }
            for i in 0..j {
                h[(j, i)] = h[(i, j)];
            }
            if basis.len() == room {
                beta = 0.0;
                break;
            }
            if beta <= 1e-10 * image_norm.max(f64::MIN_POSITIVE) || beta == 0.0 {
                beta = 0.0;
                let mut r = fresh();
                orthogonalize(&mut r, &basis);
                let nr = dot(&r, &r).sqrt();
                next = r.iter().map(|x| x / nr).collect();
            } else {
                next = w.iter().map(|x| x / beta).collect();
            }
        }
        let m = basis.len();
        let eig = SymmetricEigen::new(h.view((0, 0), (m, m)).into_owned());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let converged = order
            .iter()
            .take(n)
            .all(|&i| (beta * eig.eigenvectors[(m - 1, i)]).abs() <= opts.tol * eig.eigenvalues[i].abs().max(1.0));
        best = order.iter().take(n).map(|&i| eig.eigenvalues[i]).collect();
        let ritz = |i: usize| -> Vec<f64> {
            let mut x = vec![0.0; dim];
            for (k, v) in basis.iter().enumerate() {
                axpy(eig.eigenvectors[(k, i)], v, &mut x);
            }
            x
        };
        if converged || m == room {
            return Ok(order
                .iter()
                .take(n)
                .map(|&i| {
                    let mut x = ritz(i);
                    orthogonalize(&mut x, locked);
                    let nx = dot(&x, &x).sqrt();
                    x.iter_mut().for_each(|v| *v /= nx);
                    (eig.eigenvalues[i], x)
                })
                .collect());
        }
        let kept: Vec<usize> = order.iter().take(keep).copied().collect();
        basis = kept.iter().map(|&i| ritz(i)).collect();
        h = DMatrix::zeros(m_max, m_max);
        for (a, &i) in kept.iter().enumerate() {
            h[(a, a)] = eig.eigenvalues[i];
        }
        if beta == 0.0 {
            let mut r = fresh();
            orthogonalize(&mut r, &basis);
            let nr = dot(&r, &r).sqrt();
            next = r.iter().map(|x| x / nr).collect();
        }
    }
    Err(Error::Convergence { iterations: opts.max_restarts, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn lanczos_matches_dense() {
        let m = random_symmetric(500, 3);
        let d = dense(&m, 4).unwrap();
        let l = lanczos(&m, 4, EigenOptions::default()).unwrap();
        for (a, b) in d.values.iter().zip(&l.values) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(l.residuals.iter().all(|&r| r < 1e-7));
    }

    #[test]
    fn lanczos_handles_degenerate_and_tiny_spectra() {
        let diag: Vec<f64> = (0..300).map(|i| (i / 3) as f64).collect();
        let m = CsrMatrix::diagonal(&diag);
        let l = lanczos(&m, 4, EigenOptions::default()).unwrap();
        assert_eq!(l.values.iter().map(|v| v.round() as i64).collect::<Vec<_>>(), vec![0, 0, 0, 1]);
        let small = CsrMatrix::diagonal(&[2.0, 1.0, 3.0]);
        let l = lanczos(&small, 2, EigenOptions::default()).unwrap();
        assert!((l.values[0] - 1.0).abs() < 1e-12 && (l.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clusters_group_close_values() {
        let e = Eigenpairs { values: vec![0.0, 1e-12, 1.0], residuals: vec![], vectors: vec![], method: EigenMethod::Dense, dim: 3 };
        assert_eq!(e.clusters(1e-10), vec![vec![0, 1], vec![2]]);
        assert_eq!(e.gap(), Some(1e-12));
    }
}
