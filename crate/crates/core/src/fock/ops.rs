//! Single-configuration building blocks for the operators.

use super::{BosonModes, Occ};
use crate::lattice::{add, sub, Momentum};

#[inline]
fn parity(pos: usize) -> f64 {
    if pos % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `a_i* |occ⟩`, or `None` when mode `i` is already occupied.
pub(crate) fn create(occ: &Occ, i: u16) -> Option<(Occ, f64)> {
    match occ.binary_search(&i) {
        Ok(_) => None,
        Err(pos) => {
            let mut out = occ.clone();
            out.insert(pos, i);
            Some((out, parity(pos)))
        }
    }
}

/// `a_i |occ⟩`, or `None` when mode `i` is empty.
pub(crate) fn annihilate(occ: &Occ, i: u16) -> Option<(Occ, f64)> {
    match occ.binary_search(&i) {
        Ok(pos) => {
            let mut out = occ.clone();
            out.remove(pos);
            Some((out, parity(pos)))
        }
        Err(_) => None,
    }
}

/// `a_to* a_from |occ⟩`.
pub(crate) fn hop(occ: &Occ, to: u16, from: u16) -> Option<(Occ, f64)> {
    let (mid, s1) = annihilate(occ, from)?;
    let (out, s2) = create(&mid, to)?;
    Some((out, s1 * s2))
}

/// `γ_i = a_i + a_i*`: flips mode `i`.
pub(crate) fn flip(occ: &Occ, i: u16) -> (Occ, f64) {
    annihilate(occ, i).or_else(|| create(occ, i)).expect("one of a, a* acts nontrivially")
}

/// Multiplicity of `m` in a sorted multiset.
#[inline]
pub(crate) fn count(cfg: &Occ, m: u16) -> usize {
    let lo = cfg.partition_point(|&x| x < m);
    let hi = cfg.partition_point(|&x| x <= m);
    hi - lo
}

fn remove_one(cfg: &Occ, m: u16) -> Occ {
    let mut out = cfg.clone();
    let pos = out.binary_search(&m).expect("mode present");
    out.remove(pos);
    out
}

fn insert_one(cfg: &Occ, m: u16) -> Occ {
    let mut out = cfg.clone();
    let pos = out.partition_point(|&x| x <= m);
    out.insert(pos, m);
    out
}

/// Distinct entries of a sorted multiset with their multiplicities.
fn distinct(cfg: &Occ) -> impl Iterator<Item = (u16, usize)> + '_ {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= cfg.len() {
            return None;
        }
        let m = cfg[i];
        let mut j = i;
        while j < cfg.len() && cfg[j] == m {
            j += 1;
        }
        let n = j - i;
        i = j;
        Some((m, n))
    })
}

/// `S_q = Σ_m a*_{m−q} a_m`, the second quantization of `Σ_i e^{−iqx_i}`.
pub(crate) fn shift(cfg: &Occ, bosons: &BosonModes, q: Momentum, mut emit: impl FnMut(Occ, f64)) {
    if q == [0, 0, 0] {
        emit(cfg.clone(), cfg.len() as f64);
        return;
    }
    for (m, n) in distinct(cfg) {
        let Some(j) = bosons.index_of(sub(bosons.mode(m), q)) else { continue };
        let removed = remove_one(cfg, m);
        let nj = count(&removed, j);
        emit(insert_one(&removed, j), ((n * (nj + 1)) as f64).sqrt());
    }
}

/// `Σ_{k≠0} Σ_{p,q} c(k) a*_{p+k} a*_{q−k} a_q a_p` for the given `(k, c(k))` list.
pub(crate) fn pair_scatter(cfg: &Occ, bosons: &BosonModes, terms: &[(Momentum, f64)], mut emit: impl FnMut(Occ, f64)) {
    for (p, np) in distinct(cfg) {
        let c1 = remove_one(cfg, p);
        let amp_p = (np as f64).sqrt();
        for (q, nq) in distinct(&c1) {
            let c2 = remove_one(&c1, q);
            let amp = amp_p * (nq as f64).sqrt();
            let (pm, qm) = (bosons.mode(p), bosons.mode(q));
            for &(k, ck) in terms {
                if k == [0, 0, 0] {
                    continue;
                }
                let (Some(i1), Some(i2)) = (bosons.index_of(sub(qm, k)), bosons.index_of(add(pm, k))) else { continue };
                let a1 = ((count(&c2, i1) + 1) as f64).sqrt();
                let c3 = insert_one(&c2, i1);
                let a2 = ((count(&c3, i2) + 1) as f64).sqrt();
                emit(insert_one(&c3, i2), ck * amp * a1 * a2);
            }
        }
    }
}
