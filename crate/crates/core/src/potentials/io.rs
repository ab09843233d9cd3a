use serde::{Deserialize, Serialize};

use super::FourierPotential;
use crate::error::{Error, Result};
use crate::scattering::RadialPotential;

/// On-disk potential description.
///
/// ```json
/// {"type":"fourier","cutoff":2,"coeffs":[[-1,0,0,0.5],[1,0,0,0.5]]}
/// {"type":"radial","r_max":1.0,"samples":[1.0,1.0],"grid":"uniform"}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialFile {
    Fourier { cutoff: i64, coeffs: Vec<(i64, i64, i64, f64)> },
    Radial(RadialFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialFile {
    pub r_max: f64,
    pub samples: Vec<f64>,
    pub grid: String,
}

fn schema_from_serde(e: serde_json::Error) -> Error {
    let message = e.to_string();
    let field = message.split('`').nth(1).unwrap_or("<document>").to_string();
    Error::schema(field, message)
}

impl PotentialFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(schema_from_serde)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Coefficients in lexicographic order of `k`.
    pub fn from_fourier(v: &FourierPotential) -> Self {
        PotentialFile::Fourier { cutoff: v.cutoff(), coeffs: v.iter().map(|(k, c)| (k[0], k[1], k[2], c)).collect() }
    }

    pub fn from_radial(v: &RadialPotential) -> Result<Self> {
        let r = v.grid();
        let n = r.len() - 1;
        let r_max = v.support_radius();
        let uniform = r.iter().enumerate().all(|(i, &x)| (x - r_max * i as f64 / n as f64).abs() <= 1e-12 * r_max);
        if !uniform {
            return Err(Error::invalid("only uniformly sampled profiles can be written"));
        }
        Ok(PotentialFile::Radial(RadialFile { r_max, samples: v.values().to_vec(), grid: "uniform".into() }))
    }

    pub fn to_fourier(&self) -> Result<FourierPotential> {
        match self {
            PotentialFile::Fourier { cutoff, coeffs } => {
                if *cutoff < 0 {
                    return Err(Error::schema("cutoff", "must be nonnegative"));
                }
                let entries: Vec<_> = coeffs.iter().map(|&(x, y, z, c)| ([x, y, z], c)).collect();
                FourierPotential::from_coefficients(&entries, *cutoff).map_err(|e| Error::schema("coeffs", e.to_string()))
            }
            PotentialFile::Radial(_) => Err(Error::schema("type", "expected a fourier potential, found radial")),
        }
    }

    pub fn to_radial(&self) -> Result<RadialPotential> {
        match self {
            PotentialFile::Radial(f) => {
                if f.grid != "uniform" {
                    return Err(Error::schema("grid", format!("unsupported grid `{}`", f.grid)));
                }
                RadialPotential::uniform(f.r_max, f.samples.clone()).map_err(|e| Error::schema("samples", e.to_string()))
            }
            PotentialFile::Fourier { .. } => Err(Error::schema("type", "expected a radial potential, found fourier")),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("potential files always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_round_trip_is_lexicographic() {
        let v = FourierPotential::from_coefficients(&[([1, 0, 0], 0.5), ([0, 2, -1], 0.25)], 2).unwrap();
        let file = PotentialFile::from_fourier(&v);
        let text = file.to_json();
        let back = PotentialFile::parse(&text).unwrap();
        assert_eq!(back.to_fourier().unwrap(), v);
        if let PotentialFile::Fourier { coeffs, .. } = &file {
            let keys: Vec<_> = coeffs.iter().map(|c| (c.0, c.1, c.2)).collect();
            let mut sorted = keys.clone();
            sorted.sort();
            assert_eq!(keys, sorted);
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        match PotentialFile::parse(r#"{"type":"fourier","coeffs":[]}"#) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "cutoff"),
            other => panic!("{other:?}"),
        }
        match PotentialFile::parse(r#"{"type":"fourier","cutoff":1,"coeffs":[[1,0,0,1.0],[-1,0,0,2.0]]}"#)
            .unwrap()
            .to_fourier()
        {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "coeffs"),
            other => panic!("{other:?}"),
        }
        let odd = PotentialFile::parse(r#"{"type":"radial","r_max":1.0,"samples":[1.0,0.0],"grid":"log"}"#).unwrap();
        assert!(matches!(odd.to_radial(), Err(Error::Schema { .. })));
    }

    #[test]
    fn radial_round_trip() {
        let text = r#"{"type":"radial","r_max":2.0,"samples":[1.0,0.5,0.0],"grid":"uniform"}"#;
        let v = PotentialFile::parse(text).unwrap().to_radial().unwrap();
        assert_eq!(v.value(1.5), 0.25);
        assert_eq!(PotentialFile::from_radial(&v).unwrap(), PotentialFile::parse(text).unwrap());
    }
}
