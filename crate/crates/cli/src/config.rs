use std::path::{Path, PathBuf};

use bosefermi::fock::BosonModes;
use bosefermi::lattice::Momentum;
use bosefermi::potentials::{FourierPotential, PotentialFile};
use bosefermi::scattering::RadialPotential;
use bosefermi::spectra::CutoffRule;
use serde::{Deserialize, Serialize};

/// A potential given either inline or as a path relative to the config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSource {
    Path(PathBuf),
    Inline(PotentialFile),
}

impl PotentialSource {
    /// Replaces a path by the file it points to.
    pub fn resolve(&mut self, base: &Path) -> bosefermi::Result<()> {
        if let PotentialSource::Path(p) = self {
            *self = PotentialSource::Inline(PotentialFile::read(base.join(&*p))?);
        }
        Ok(())
    }

    fn file(&self) -> &PotentialFile {
        match self {
            PotentialSource::Inline(f) => f,
            PotentialSource::Path(_) => unreachable!("potential sources are resolved after loading"),
        }
    }

    pub fn fourier(&self) -> bosefermi::Result<FourierPotential> {
        self.file().to_fourier()
    }
}

pub fn read_fourier(path: &Path) -> bosefermi::Result<(PotentialFile, FourierPotential)> {
    let file = PotentialFile::read(path)?;
    let v = file.to_fourier()?;
    Ok((file, v))
}

pub fn read_radial(path: &Path) -> bosefermi::Result<(PotentialFile, RadialPotential)> {
    let file = PotentialFile::read(path)?;
    let v = file.to_radial()?;
    Ok((file, v))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BosonSpec {
    /// `{j·dir : |j| ≤ max}`.
    Axis { dir: Momentum, max: i64 },
    /// `{|k|² ≤ cutoff2}`.
    Ball { cutoff2: i64 },
    Modes(Vec<Momentum>),
}

impl BosonSpec {
    pub fn build(&self) -> bosefermi::Result<BosonModes> {
        match self {
            BosonSpec::Axis { dir, max } => BosonModes::axis(*dir, *max),
            BosonSpec::Ball { cutoff2 } => Ok(BosonModes::ball(*cutoff2)),
            BosonSpec::Modes(m) => BosonModes::new(m.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffSpec {
    /// `Λ = k_F + 2`, i.e. `Λ² = ⌊k_F² + 4k_F + 4⌋`.
    #[default]
    KfPlusTwo,
    Fixed(i64),
}

impl From<CutoffSpec> for CutoffRule {
    fn from(c: CutoffSpec) -> Self {
        match c {
            CutoffSpec::KfPlusTwo => CutoffRule::KfPlusTwo,
            CutoffSpec::Fixed(n) => CutoffRule::Fixed(n),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionSpec {
    pub kf2: u64,
    pub cutoff2: i64,
    pub n_bosons: usize,
    pub bosons: BosonSpec,
}

fn one() -> usize {
    1
}

fn default_tol() -> f64 {
    1e-10
}

fn default_seed() -> u64 {
    0x5eed
}

/// Input of `bosefermi spectrum`.
///
/// ```json
/// {
///   "v": "v.json",
///   "w": {"type": "fourier", "cutoff": 1, "coeffs": [[-1,0,0,1.0],[1,0,0,1.0]]},
///   "n_bosons": 2,
///   "bosons": {"axis": {"dir": [1,0,0], "max": 3}},
///   "kf2": [1, 2, 4],
///   "sector": [0, 0, 0],
///   "overlap": [1, 2, 4]
/// }
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub v: PotentialSource,
    pub w: PotentialSource,
    pub n_bosons: usize,
    pub bosons: BosonSpec,
    pub kf2: Vec<u64>,
    #[serde(default)]
    pub cutoff: CutoffSpec,
    #[serde(default = "one")]
    pub max_pairs: usize,
    /// How many eigenvalues to compare.
    #[serde(default = "one")]
    pub eigenvalues: usize,
    #[serde(default)]
    pub sector: Option<Momentum>,
    /// `k_F²` values for the ground-state overlap; none by default.
    #[serde(default)]
    pub overlap: Vec<u64>,
    #[serde(default)]
    pub decomposition: Option<DecompositionSpec>,
    /// Exponent `p` of the `L^p` norm in the error functional; `null` means `p = ∞`.
    #[serde(default)]
    pub q_exponent: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl SpectrumConfig {
    pub fn load(path: &Path) -> bosefermi::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: SpectrumConfig = serde_json::from_str(&text).map_err(|e| {
            let message = e.to_string();
            let field = message.split('`').nth(1).unwrap_or("<document>").to_string();
            bosefermi::Error::Schema { field, message }
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.v.resolve(base)?;
        cfg.w.resolve(base)?;
        if cfg.kf2.is_empty() {
            return Err(bosefermi::Error::Schema { field: "kf2".into(), message: "needs at least one value".into() });
        }
        if cfg.n_bosons == 0 {
            return Err(bosefermi::Error::Schema { field: "n_bosons".into(), message: "must be positive".into() });
        }
        Ok(cfg)
    }
}
