//! Truncated Fock spaces for `N` bosons coupled to fermionic excitations of
//! the Fermi sea, and the second-quantized operators acting on them.
//!
//! Fermionic states are sorted lists of occupied mode indices; the sign of
//! `a_j` or `a_j*` is `(−1)^{#occupied modes below j}`. Bosonic states are
//! sorted multisets of boson-mode indices. Any shift that leaves the mode
//! set annihilates the state, so every operator is an exact operator on the
//! truncated space.

mod basis;
mod checks;
mod operator;
pub(crate) mod ops;

use std::collections::HashMap;

use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lattice::{neg, norm2, FermiRadius, Momentum};

pub use basis::{BasisKind, FockBasis, DEFAULT_CAPACITY};
pub use checks::{
    car_check, hermiticity_residual, inequality_suite, momentum_conservation_residual, particle_hole_check,
    pull_through_check, random_state, InequalityReport, ParticleHoleReport, DENSE_CAPACITY,
};
pub use operator::{BoundOperator, Couplings, Operator, OperatorKind, Term};

/// Sorted occupation list (mode indices).
pub type Occ = SmallVec<[u16; 8]>;

/// A basis vector: fermionic occupations and a bosonic multiset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FockState {
    pub fermions: Occ,
    pub bosons: Occ,
}

/// An ordered list of distinct fermion modes with their inside flags `χ(k) = [|k| ≤ k_F]`.
#[derive(Clone, Debug, Serialize)]
pub struct ModeSet {
    modes: Vec<Momentum>,
    #[serde(skip)]
    index: HashMap<Momentum, u16>,
    radius: FermiRadius,
    inside: Vec<bool>,
}

impl ModeSet {
    pub fn new(modes: Vec<Momentum>, radius: FermiRadius) -> Result<Self> {
        if modes.len() > u16::MAX as usize {
            return Err(Error::Capacity { dim: modes.len(), cap: u16::MAX as usize });
        }
        let mut index = HashMap::with_capacity(modes.len());
        for (i, &k) in modes.iter().enumerate() {
            if index.insert(k, i as u16).is_some() {
                return Err(Error::Validation(format!("mode {k:?} is listed twice")));
            }
        }
        let inside = modes.iter().map(|&k| radius.contains(norm2(k))).collect();
        Ok(ModeSet { modes, index, radius, inside })
    }

    /// All `k` with `|k|² ≤ cutoff2`, ordered by `|k|²` and then lexicographically.
    pub fn ball(radius: FermiRadius, cutoff2: i64) -> Result<Self> {
        Self::new(lattice_ball(cutoff2), radius)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn radius(&self) -> FermiRadius {
        self.radius
    }

    pub fn modes(&self) -> &[Momentum] {
        &self.modes
    }

    pub fn mode(&self, i: u16) -> Momentum {
        self.modes[i as usize]
    }

    pub fn index_of(&self, k: Momentum) -> Option<u16> {
        self.index.get(&k).copied()
    }

    pub fn is_inside(&self, i: u16) -> bool {
        self.inside[i as usize]
    }

    pub fn inside_indices(&self) -> Vec<u16> {
        (0..self.len() as u16).filter(|&i| self.is_inside(i)).collect()
    }

    pub fn outside_indices(&self) -> Vec<u16> {
        (0..self.len() as u16).filter(|&i| !self.is_inside(i)).collect()
    }

    /// `M̃`, the number of inside modes.
    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// `Ẽ_F = Σ_{χ(k) = 1} |k|²` over the mode set.
    pub fn inside_energy(&self) -> i64 {
        self.modes.iter().zip(&self.inside).filter(|(_, &b)| b).map(|(&k, _)| norm2(k)).sum()
    }

    /// Sum of all inside momenta (zero for symmetric mode sets).
    pub fn inside_momentum(&self) -> Momentum {
        self.modes.iter().zip(&self.inside).filter(|(_, &b)| b).fold([0; 3], |acc, (&k, _)| crate::lattice::add(acc, k))
    }

    pub fn is_closed_under_negation(&self) -> bool {
        self.modes.iter().all(|&k| self.index.contains_key(&neg(k)))
    }
}

/// Momenta available to the bosons.
#[derive(Clone, Debug, Serialize)]
pub struct BosonModes {
    modes: Vec<Momentum>,
    #[serde(skip)]
    index: HashMap<Momentum, u16>,
}

impl BosonModes {
    pub fn new(modes: Vec<Momentum>) -> Result<Self> {
        if modes.len() > u16::MAX as usize {
            return Err(Error::Capacity { dim: modes.len(), cap: u16::MAX as usize });
        }
        let mut index = HashMap::new();
        for (i, &k) in modes.iter().enumerate() {
            if index.insert(k, i as u16).is_some() {
                return Err(Error::Validation(format!("boson mode {k:?} is listed twice")));
            }
        }
        Ok(BosonModes { modes, index })
    }

    /// All `k` with `|k|² ≤ cutoff2`, in the order of [`ModeSet::ball`].
    pub fn ball(cutoff2: i64) -> Self {
        Self::new(lattice_ball(cutoff2)).expect("lattice balls have distinct points")
    }

    /// `j·dir` for `|j| ≤ max`, ordered by `|j|` and then sign.
    pub fn axis(dir: Momentum, max: i64) -> Result<Self> {
        if dir == [0, 0, 0] {
            return Err(Error::invalid("axis direction must be nonzero"));
        }
        let mut modes = vec![[0, 0, 0]];
        for j in 1..=max {
            modes.push([-j * dir[0], -j * dir[1], -j * dir[2]]);
            modes.push([j * dir[0], j * dir[1], j * dir[2]]);
        }
        Self::new(modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Momentum] {
        &self.modes
    }

    pub fn mode(&self, i: u16) -> Momentum {
        self.modes[i as usize]
    }

    pub fn index_of(&self, k: Momentum) -> Option<u16> {
        self.index.get(&k).copied()
    }
}

fn lattice_ball(cutoff2: i64) -> Vec<Momentum> {
    let r = (cutoff2.max(0) as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                if x * x + y * y + z * z <= cutoff2 {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out.sort_by_key(|&k| (norm2(k), k));
    out
}
