//! Colouring description files (TOML or JSON).
//!
//! ```toml
//! kind = "3_delta"
//! delta = -0.038        # units of π
//! ```
//!
//! `kind` is one of `1`/`hemisphere`, `2`, `3`, `4`, `3_delta` (with
//! `delta`), `2_Delta` (with `Delta`), `bands` (with `bands = [[lo, hi], ...]`
//! in units of π) or `harmonic` (with `terms = [[l, m, coefficient], ...]`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Band, BandColouring, CatalogueLabel, Colouring, HarmonicColouring, HarmonicTerm};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColouringDescription {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<(u32, i32, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, rename = "Delta", skip_serializing_if = "Option::is_none")]
    pub big_delta: Option<f64>,
}

impl ColouringDescription {
    /// Short inline form used on the command line: `3`, `hemisphere`,
    /// `3_delta:-0.038`, `2_Delta:0.033`.
    pub fn from_label(s: &str) -> Result<Self> {
        let (kind, param) = match s.split_once(':') {
            Some((k, p)) => {
                let v: f64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad parameter in '{s}'")))?;
                (k.trim(), Some(v))
            }
            None => (s.trim(), None),
        };
        let mut d = ColouringDescription { kind: kind.to_string(), ..Default::default() };
        match kind {
            "3_delta" => d.delta = Some(param.ok_or_else(|| Error::Parse("3_delta needs ':delta'".into()))?),
            "2_Delta" => d.big_delta = Some(param.ok_or_else(|| Error::Parse("2_Delta needs ':Delta'".into()))?),
            _ if param.is_some() => return Err(Error::Parse(format!("'{kind}' takes no parameter"))),
            _ => {}
        }
        Ok(d)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a file, as JSON when the extension is `.json` and TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn build<T: Real>(&self) -> Result<Colouring<T>> {
        let pi = T::PI();
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Parse(format!("kind '{}' needs '{name}'", self.kind)));
        let c = match self.kind.as_str() {
            "1" | "hemisphere" => Colouring::catalogue(CatalogueLabel::One)?,
            "2" => Colouring::catalogue(CatalogueLabel::Two)?,
            "3" => Colouring::catalogue(CatalogueLabel::Three)?,
            "4" => Colouring::catalogue(CatalogueLabel::Four)?,
            "3_delta" => Colouring::catalogue(CatalogueLabel::ThreeDelta(T::lit(need(self.delta, "delta")?) * pi))?,
            "2_Delta" => Colouring::catalogue(CatalogueLabel::TwoDelta(T::lit(need(self.big_delta, "Delta")?) * pi))?,
            "bands" => {
                let bands = self.bands.as_ref().ok_or_else(|| Error::Parse("kind 'bands' needs 'bands'".into()))?;
                Colouring::Band(BandColouring::new(
                    "bands",
                    bands.iter().map(|[lo, hi]| Band::new(T::lit(*lo) * pi, T::lit(*hi) * pi)),
                )?)
            }
            "harmonic" => {
                let terms = self.terms.as_ref().ok_or_else(|| Error::Parse("kind 'harmonic' needs 'terms'".into()))?;
                Colouring::Harmonic(HarmonicColouring::new(
                    terms.iter().map(|&(l, m, c)| HarmonicTerm { l, m, coefficient: T::lit(c) }),
                )?)
            }
            other => return Err(Error::Parse(format!("unknown colouring kind '{other}'"))),
        };
        if !c.is_antipodal() {
            return Err(Error::NotAntipodal(c.label()));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn inline_labels() {
        let c: Colouring<f64> = ColouringDescription::from_label("3_delta:-0.038").unwrap().build().unwrap();
        let Colouring::Band(b) = c else { panic!() };
        assert!((b.bands()[0].hi - (PI / 6.0 - 0.038 * PI)).abs() < 1e-15);
        assert!(ColouringDescription::from_label("3_delta").is_err());
        assert!(ColouringDescription::from_label("3:0.1").is_err());
        assert!(ColouringDescription::from_label("hemisphere").unwrap().build::<f64>().is_ok());
    }

    #[test]
    fn toml_band_list() {
        let d = ColouringDescription::from_toml("kind = \"bands\"\nbands = [[0.0, 0.25], [0.5, 0.75]]\n").unwrap();
        let c: Colouring<f64> = d.build().unwrap();
        let two = Colouring::catalogue(CatalogueLabel::Two).unwrap();
        match (c, two) {
            (Colouring::Band(a), Colouring::Band(b)) => assert_eq!(a.bands(), b.bands()),
            _ => panic!(),
        }
    }

    #[test]
    fn json_harmonic_terms_and_big_delta() {
        let d = ColouringDescription::from_json(r#"{"kind":"harmonic","terms":[[1,0,1.0],[3,-2,0.5]]}"#).unwrap();
        let Colouring::Harmonic(h) = d.build::<f64>().unwrap() else { panic!() };
        assert_eq!(h.terms().len(), 2);
        let d = ColouringDescription::from_json(r#"{"kind":"2_Delta","Delta":0.05}"#).unwrap();
        assert!(d.build::<f64>().is_ok());
    }

    #[test]
    fn rejects_non_antipodal_and_unknown() {
        let d = ColouringDescription::from_toml("kind = \"bands\"\nbands = [[0.0, 0.3]]\n").unwrap();
        assert!(matches!(d.build::<f64>(), Err(Error::NotAntipodal(_))));
        assert!(ColouringDescription::from_toml("kind = \"x\"\nfoo = 1\n").is_err());
        assert!(ColouringDescription::from_label("7").unwrap().build::<f64>().is_err());
    }
}
