use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{BosonModes, FockState, ModeSet, Occ};
use crate::error::{Error, Result};
use crate::lattice::{add, sub, Momentum};

/// Default hard cap on basis dimensions.
pub const DEFAULT_CAPACITY: usize = 4_000_000;

/// Which fermionic configurations a basis contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// Zero-charge excitations: `n` particles outside and `n` holes inside, `n ≤ max_pairs`.
    Excitation { max_pairs: usize },
    /// Physical occupations with exactly `M̃` fermions anywhere in the mode set.
    Physical,
    /// Arbitrary excitations with bounded particle and hole numbers (charge not fixed).
    Free { max_particles: usize, max_holes: usize },
}

/// An enumerated basis of `N`-boson configurations tensored with fermionic configurations.
///
/// States are sorted by fermion count, then fermion occupations, then boson
/// occupations. For excitation and free bases the momentum sector is
/// `Σ bosons + Σ particles − Σ holes`; for physical bases it is the total
/// physical momentum `Σ bosons + Σ occupied`.
#[derive(Clone, Debug)]
pub struct FockBasis {
    modes: Arc<ModeSet>,
    bosons: Arc<BosonModes>,
    n_bosons: usize,
    kind: BasisKind,
    sector: Option<Momentum>,
    states: Vec<FockState>,
    index: HashMap<FockState, u32>,
}

#[derive(Serialize)]
struct BasisMetadata<'a> {
    kind: BasisKind,
    n_bosons: usize,
    sector: Option<Momentum>,
    dimension: usize,
    kf_squared: f64,
    fermion_modes: &'a [Momentum],
    boson_modes: &'a [Momentum],
}

impl FockBasis {
    pub fn build(
        modes: Arc<ModeSet>,
        bosons: Arc<BosonModes>,
        n_bosons: usize,
        kind: BasisKind,
        sector: Option<Momentum>,
        cap: usize,
    ) -> Result<Self> {
        for &k in bosons.modes() {
            if modes.index_of(k).is_none() {
                return Err(Error::Validation(format!("boson mode {k:?} is not in the fermion mode set")));
            }
        }
        let boson_groups = group_multisets(bosons.modes(), n_bosons, cap)?;
        let fermion_blocks = fermion_blocks(&modes, kind, cap)?;

        let sector_key = |f: Momentum| sector.map(|s| sub(s, f));
        let mut dim = 0usize;
        for (fm, flist) in &fermion_blocks {
            let count = match sector_key(*fm) {
                Some(b) => boson_groups.get(&b).map_or(0, Vec::len),
                None => boson_groups.values().map(Vec::len).sum(),
            };
            dim = dim.saturating_add(flist.len().saturating_mul(count));
            if dim > cap {
                return Err(Error::Capacity { dim, cap });
            }
        }

        let mut states = Vec::with_capacity(dim);
        for (fm, flist) in &fermion_blocks {
            let blists: Vec<&Vec<Occ>> = match sector_key(*fm) {
                Some(b) => boson_groups.get(&b).into_iter().collect(),
                None => boson_groups.values().collect(),
            };
            for f in flist {
                for bl in &blists {
                    for b in bl.iter() {
                        states.push(FockState { fermions: f.clone(), bosons: b.clone() });
                    }
                }
            }
        }
        states.sort_unstable_by(|a, b| {
            (a.fermions.len(), &a.fermions, &a.bosons).cmp(&(b.fermions.len(), &b.fermions, &b.bosons))
        });
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        Ok(FockBasis { modes, bosons, n_bosons, kind, sector, states, index })
    }

    /// Zero-charge basis with at most `max_pairs` particle-hole pairs.
    pub fn excitation(
        modes: Arc<ModeSet>,
        bosons: Arc<BosonModes>,
        n_bosons: usize,
        max_pairs: usize,
        sector: Option<Momentum>,
    ) -> Result<Self> {
        Self::build(modes, bosons, n_bosons, BasisKind::Excitation { max_pairs }, sector, DEFAULT_CAPACITY)
    }

    /// Bosons alone (the fermionic vacuum).
    pub fn bosonic(modes: Arc<ModeSet>, bosons: Arc<BosonModes>, n_bosons: usize, sector: Option<Momentum>) -> Result<Self> {
        Self::excitation(modes, bosons, n_bosons, 0, sector)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn modes(&self) -> &Arc<ModeSet> {
        &self.modes
    }

    pub fn boson_modes(&self) -> &Arc<BosonModes> {
        &self.bosons
    }

    pub fn n_bosons(&self) -> usize {
        self.n_bosons
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn sector(&self) -> Option<Momentum> {
        self.sector
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &FockState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &FockState) -> Option<usize> {
        self.index.get(s).map(|&i| i as usize)
    }

    /// Number of particle-hole pairs (for excitation bases) or half the fermion count.
    pub fn pair_count(&self, i: usize) -> usize {
        let f = &self.states[i].fermions;
        f.iter().filter(|&&m| !self.modes.is_inside(m)).count()
    }

    /// Largest fermion count any state may have; operators skip outputs beyond it.
    pub(crate) fn max_fermions(&self) -> usize {
        match self.kind {
            BasisKind::Excitation { max_pairs } => 2 * max_pairs,
            BasisKind::Physical => self.modes.inside_count(),
            BasisKind::Free { max_particles, max_holes } => max_particles + max_holes,
        }
    }

    /// Total momentum of a state under this basis' sector convention.
    pub fn momentum(&self, s: &FockState) -> Momentum {
        let mut k = s.bosons.iter().fold([0; 3], |acc, &b| add(acc, self.bosons.mode(b)));
        for &f in &s.fermions {
            let m = self.modes.mode(f);
            k = if self.kind != BasisKind::Physical && self.modes.is_inside(f) { sub(k, m) } else { add(k, m) };
        }
        k
    }

    /// Indices of the states with no fermionic excitation.
    pub fn vacuum_indices(&self) -> std::ops::Range<usize> {
        0..self.states.iter().take_while(|s| s.fermions.is_empty()).count()
    }

    /// Copies the coefficients of `x`, a vector on `from`, onto the states of
    /// `self`. Amplitudes on states that `self` lacks are dropped.
    pub fn embed(&self, from: &FockBasis, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != from.dim() {
            return Err(Error::Shape { expected: from.dim(), got: x.len() });
        }
        if self.bosons.modes() != from.bosons.modes() || self.n_bosons != from.n_bosons {
            return Err(Error::Validation("embedding needs identical boson modes and particle numbers".into()));
        }
        let same_fermions = self.modes.modes() == from.modes.modes();
        let mut y = vec![0.0; self.dim()];
        for (s, &a) in from.states.iter().zip(x) {
            if a == 0.0 || (!same_fermions && !s.fermions.is_empty()) {
                continue;
            }
            if let Some(j) = self.index_of(s) {
                y[j] += a;
            }
        }
        Ok(y)
    }

    /// `(S_q ⊗ 1) x` with `S_q = Σ_m a*_{m−q} a_m`; components leaving the basis are dropped.
    pub fn boson_shift(&self, q: Momentum, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), got: x.len() });
        }
        let mut y = vec![0.0; self.dim()];
        for (s, &a) in self.states.iter().zip(x) {
            if a == 0.0 {
                continue;
            }
            super::ops::shift(&s.bosons, &self.bosons, q, |b, c| {
                let t = FockState { fermions: s.fermions.clone(), bosons: b };
                if let Some(j) = self.index_of(&t) {
                    y[j] += c * a;
                }
            });
        }
        Ok(y)
    }

    pub fn metadata_json(&self) -> String {
        let meta = BasisMetadata {
            kind: self.kind,
            n_bosons: self.n_bosons,
            sector: self.sector,
            dimension: self.dim(),
            kf_squared: self.modes.radius().kf2(),
            fermion_modes: self.modes.modes(),
            boson_modes: self.bosons.modes(),
        };
        serde_json::to_string_pretty(&meta).expect("basis metadata serializes")
    }
}

/// All size-`n` multisets of `0..modes.len()`, grouped by total momentum.
fn group_multisets(modes: &[Momentum], n: usize, cap: usize) -> Result<HashMap<Momentum, Vec<Occ>>> {
    let count = multiset_count(modes.len(), n);
    if count > cap as u128 {
        return Err(Error::Capacity { dim: usize::try_from(count).unwrap_or(usize::MAX), cap });
    }
    let mut out: HashMap<Momentum, Vec<Occ>> = HashMap::new();
    let mut cur = Occ::new();
    fn rec(modes: &[Momentum], start: usize, left: usize, k: Momentum, cur: &mut Occ, out: &mut HashMap<Momentum, Vec<Occ>>) {
        if left == 0 {
            out.entry(k).or_default().push(cur.clone());
            return;
        }
        for i in start..modes.len() {
            cur.push(i as u16);
            rec(modes, i, left - 1, add(k, modes[i]), cur, out);
            cur.pop();
        }
    }
    if n == 0 || !modes.is_empty() {
        rec(modes, 0, n, [0; 3], &mut cur, &mut out);
    }
    Ok(out)
}

fn multiset_count(m: usize, n: usize) -> u128 {
    if m == 0 {
        return u128::from(n == 0);
    }
    binomial((m + n - 1) as u128, n as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// All `n`-subsets of `idx`, grouped by `sign · Σ momenta`.
fn group_subsets(modes: &ModeSet, idx: &[u16], n: usize, sign: i64, cap: usize) -> Result<HashMap<Momentum, Vec<Occ>>> {
    let count = binomial(idx.len() as u128, n as u128);
    if count > cap as u128 {
        return Err(Error::Capacity { dim: usize::try_from(count).unwrap_or(usize::MAX), cap });
    }
    let mut out: HashMap<Momentum, Vec<Occ>> = HashMap::new();
    let mut cur = Occ::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        modes: &ModeSet,
        idx: &[u16],
        start: usize,
        left: usize,
        sign: i64,
        k: Momentum,
        cur: &mut Occ,
        out: &mut HashMap<Momentum, Vec<Occ>>,
    ) {
        if left == 0 {
            out.entry(k).or_default().push(cur.clone());
            return;
        }
        for j in start..idx.len() {
            if idx.len() - j < left {
                break;
            }
            let m = modes.mode(idx[j]);
            cur.push(idx[j]);
            rec(modes, idx, j + 1, left - 1, sign, add(k, [sign * m[0], sign * m[1], sign * m[2]]), cur, out);
            cur.pop();
        }
    }
    rec(modes, idx, 0, n, sign, [0; 3], &mut cur, &mut out);
    Ok(out)
}

fn merge(a: &Occ, b: &Occ) -> Occ {
    let mut out: Occ = a.iter().chain(b.iter()).copied().collect();
    out.sort_unstable();
    out
}

/// Fermionic configurations grouped by their contribution to the sector momentum.
fn fermion_blocks(modes: &ModeSet, kind: BasisKind, cap: usize) -> Result<Vec<(Momentum, Vec<Occ>)>> {
    let mut blocks: HashMap<Momentum, Vec<Occ>> = HashMap::new();
    let outside = modes.outside_indices();
    let inside = modes.inside_indices();
    let mut combine = |np: usize, nh: usize| -> Result<()> {
        let ps = group_subsets(modes, &outside, np, 1, cap)?;
        let hs = group_subsets(modes, &inside, nh, -1, cap)?;
        let total: u128 = ps.values().map(|v| v.len() as u128).sum::<u128>() * hs.values().map(|v| v.len() as u128).sum::<u128>();
        if total > cap as u128 {
            return Err(Error::Capacity { dim: usize::try_from(total).unwrap_or(usize::MAX), cap });
        }
        for (pm, pl) in &ps {
            for (hm, hl) in &hs {
                let entry = blocks.entry(add(*pm, *hm)).or_default();
                for p in pl {
                    for h in hl {
                        entry.push(merge(p, h));
                    }
                }
            }
        }
        Ok(())
    };
    match kind {
        BasisKind::Excitation { max_pairs } => {
            for n in 0..=max_pairs.min(outside.len()).min(inside.len()) {
                combine(n, n)?;
            }
        }
        BasisKind::Free { max_particles, max_holes } => {
            for np in 0..=max_particles.min(outside.len()) {
                for nh in 0..=max_holes.min(inside.len()) {
                    combine(np, nh)?;
                }
            }
        }
        BasisKind::Physical => {
            let all: Vec<u16> = (0..modes.len() as u16).collect();
            for (m, list) in group_subsets(modes, &all, inside.len(), 1, cap)? {
                blocks.entry(m).or_default().extend(list);
            }
        }
    }
    let mut out: Vec<(Momentum, Vec<Occ>)> = blocks.into_iter().collect();
    out.sort_unstable_by_key(|(k, _)| *k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FermiRadius;

    fn kf1() -> FermiRadius {
        FermiRadius::from_kf2(1).unwrap()
    }

    #[test]
    fn stars_and_bars_dimension() {
        let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
        let bosons = Arc::new(BosonModes::ball(1));
        let b = FockBasis::bosonic(modes, bosons, 2, None).unwrap();
        assert_eq!(b.dim(), 28);
    }

    #[test]
    fn one_pair_count() {
        let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
        let bosons = Arc::new(BosonModes::new(vec![[0, 0, 0]]).unwrap());
        let b = FockBasis::excitation(modes, bosons, 1, 1, None).unwrap();
        assert_eq!(b.dim(), 1 + 7 * 26);
        assert_eq!(b.vacuum_indices(), 0..1);
        assert!((1..b.dim()).all(|i| b.pair_count(i) == 1));
    }

    #[test]
    fn empty_vacuum() {
        let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
        let bosons = Arc::new(BosonModes::ball(1));
        let b = FockBasis::excitation(modes, bosons, 0, 0, None).unwrap();
        assert_eq!(b.dim(), 1);
    }

    #[test]
    fn sectors_partition_the_space() {
        let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
        let bosons = Arc::new(BosonModes::axis([1, 0, 0], 2).unwrap());
        let full = FockBasis::excitation(modes.clone(), bosons.clone(), 2, 1, None).unwrap();
        let mut sectors: HashMap<Momentum, usize> = HashMap::new();
        for s in full.states() {
            *sectors.entry(full.momentum(s)).or_default() += 1;
        }
        for (k, n) in sectors {
            let b = FockBasis::excitation(modes.clone(), bosons.clone(), 2, 1, Some(k)).unwrap();
            assert_eq!(b.dim(), n);
            assert!(b.states().iter().all(|s| b.momentum(s) == k));
        }
    }

    #[test]
    fn capacity_error_reports_dimension() {
        let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
        let bosons = Arc::new(BosonModes::ball(1));
        let err = FockBasis::build(modes, bosons, 2, BasisKind::Excitation { max_pairs: 1 }, None, 100).unwrap_err();
        assert!(matches!(err, Error::Capacity { dim, cap: 100 } if dim > 100));
    }

    #[test]
    fn physical_basis_dimension() {
        let r = kf1();
        let modes = Arc::new(ModeSet::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0], [1, 1, 0], [-1, -1, 0], [2, 0, 0]], r).unwrap());
        let bosons = Arc::new(BosonModes::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0]]).unwrap());
        let b = FockBasis::build(modes, bosons, 1, BasisKind::Physical, None, 1000).unwrap();
        assert_eq!(b.dim(), 60);
    }
}
