use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed polar interval `[lo, hi]` on which a band colouring is `+1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Band<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn contains(&self, epsilon: T) -> bool {
        epsilon >= self.lo && epsilon <= self.hi
    }
}

/// Azimuthally symmetric colouring: `+1` on a union of closed polar bands,
/// `-1` elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandColouring<T> {
    plus_bands: Vec<Band<T>>,
    label: String,
    #[serde(skip)]
    catalogue: Option<CatalogueLabel<T>>,
}

/// Catalogue entries, plus the two one-parameter families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CatalogueLabel<T> {
    One,
    Two,
    Three,
    Four,
    /// Colouring 3 with the outer bands widened by δ ∈ [−π/18, π/24].
    ThreeDelta(T),
    /// Colouring 2 with its northern edge moved from π/4 to π/4 − Δ,
    /// Δ ∈ [0, π/12].
    TwoDelta(T),
}

impl<T: Real> CatalogueLabel<T> {
    pub fn name(&self) -> String {
        match self {
            CatalogueLabel::One => "1".into(),
            CatalogueLabel::Two => "2".into(),
            CatalogueLabel::Three => "3".into(),
            CatalogueLabel::Four => "4".into(),
            CatalogueLabel::ThreeDelta(d) => format!("3_delta({})", (*d / T::PI()).as_f64()),
            CatalogueLabel::TwoDelta(d) => format!("2_Delta({})", (*d / T::PI()).as_f64()),
        }
    }
}

impl<T: Real> BandColouring<T> {
    /// Sorts the bands and merges any that overlap or touch. Bands must lie
    /// within `[0, π]` and have `lo <= hi`.
    pub fn new(label: impl Into<String>, bands: impl IntoIterator<Item = Band<T>>) -> Result<Self> {
        let pi = T::PI();
        let tol = T::clamp_tol();
        let mut bands: Vec<Band<T>> = bands.into_iter().collect();
        for b in &bands {
            if !(b.lo >= -tol && b.hi <= pi + tol && b.lo <= b.hi) {
                return Err(Error::domain("band", format!("[{}, {}] not an interval within [0, pi]", b.lo, b.hi)));
            }
        }
        bands.sort_by(|x, y| x.lo.partial_cmp(&y.lo).unwrap_or(Ordering::Equal));
        let mut merged: Vec<Band<T>> = Vec::with_capacity(bands.len());
        for b in bands {
            let b = Band::new(b.lo.max(T::zero()), b.hi.min(pi));
            match merged.last_mut() {
                Some(last) if b.lo <= last.hi => last.hi = last.hi.max(b.hi),
                _ => merged.push(b),
            }
        }
        Ok(Self { plus_bands: merged, label: label.into(), catalogue: None })
    }

    pub fn catalogue(label: CatalogueLabel<T>) -> Result<Self> {
        let pi = T::PI();
        let f = |num: f64, den: f64| pi * T::lit(num) / T::lit(den);
        let bands: Vec<Band<T>> = match label {
            CatalogueLabel::One => vec![Band::new(T::zero(), f(1.0, 2.0))],
            CatalogueLabel::Two => vec![Band::new(T::zero(), f(1.0, 4.0)), Band::new(f(1.0, 2.0), f(3.0, 4.0))],
            CatalogueLabel::Three => (0..3)
                .map(|k| Band::new(f(k as f64, 3.0), f((2 * k + 1) as f64, 6.0)))
                .collect(),
            CatalogueLabel::Four => (0..4)
                .map(|k| Band::new(f(k as f64, 4.0), f((2 * k + 1) as f64, 8.0)))
                .collect(),
            CatalogueLabel::ThreeDelta(d) => {
                if !(d >= -f(1.0, 18.0) && d <= f(1.0, 24.0)) {
                    return Err(Error::domain("delta", format!("{d} outside [-pi/18, pi/24]")));
                }
                vec![
                    Band::new(T::zero(), f(1.0, 6.0) + d),
                    Band::new(f(1.0, 3.0), f(1.0, 2.0)),
                    Band::new(f(2.0, 3.0), f(5.0, 6.0) - d),
                ]
            }
            CatalogueLabel::TwoDelta(d) => {
                if !(d >= T::zero() && d <= f(1.0, 12.0)) {
                    return Err(Error::domain("Delta", format!("{d} outside [0, pi/12]")));
                }
                // The southern band is the antipodal image of the northern
                // complement, so it grows by the same Δ.
                vec![Band::new(T::zero(), f(1.0, 4.0) - d), Band::new(f(1.0, 2.0), f(3.0, 4.0) + d)]
            }
        };
        let mut c = Self::new(label.name(), bands)?;
        c.catalogue = Some(label);
        Ok(c)
    }

    /// The catalogue entry this colouring was built from, if any.
    pub fn catalogue_label(&self) -> Option<CatalogueLabel<T>> {
        self.catalogue
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn bands(&self) -> &[Band<T>] {
        &self.plus_bands
    }

    #[inline]
    pub fn evaluate_polar(&self, epsilon: T) -> i8 {
        if self.plus_bands.iter().any(|b| b.contains(epsilon)) {
            1
        } else {
            -1
        }
    }

    /// Every band endpoint strictly inside `(0, π)`.
    pub fn edges(&self) -> Vec<T> {
        let pi = T::PI();
        self.plus_bands
            .iter()
            .flat_map(|b| [b.lo, b.hi])
            .filter(|&e| e > T::zero() && e < pi)
            .collect()
    }

    /// Distance from `epsilon` to the nearest edge.
    pub fn edge_distance(&self, epsilon: T) -> T {
        self.edges().into_iter().map(|e| (e - epsilon).abs()).fold(T::infinity(), T::min)
    }

    /// Colour swap, `-a`. Edge points of the result keep the closed-band
    /// convention, which only moves values on a null set.
    pub fn negated(&self) -> Self {
        let pi = T::PI();
        let mut out = Vec::new();
        let mut start = T::zero();
        for b in &self.plus_bands {
            if b.lo > start {
                out.push(Band::new(start, b.lo));
            }
            start = b.hi;
        }
        if start < pi || self.plus_bands.is_empty() {
            out.push(Band::new(start, pi));
        }
        Self { plus_bands: out, label: format!("-{}", self.label), catalogue: None }
    }

    /// Exact antipodality test: on every elementary segment between edges
    /// and mirrored edges, the value at ε must be minus the value at π − ε.
    pub fn is_antipodal(&self) -> bool {
        let pi = T::PI();
        let mut cuts = vec![T::zero(), pi];
        for e in self.edges() {
            cuts.push(e);
            cuts.push(pi - e);
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        cuts.windows(2).all(|w| {
            if w[1] - w[0] <= T::clamp_tol() {
                return true;
            }
            let m = (w[0] + w[1]) / T::lit(2.0);
            self.evaluate_polar(m) == -self.evaluate_polar(pi - m)
        })
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn cat(l: CatalogueLabel<f64>) -> BandColouring<f64> {
        BandColouring::catalogue(l).unwrap()
    }

    #[test]
    fn catalogue_band_sets() {
        let two = cat(CatalogueLabel::Two);
        assert_eq!(two.bands(), &[Band::new(0.0, PI / 4.0), Band::new(PI / 2.0, 3.0 * PI / 4.0)]);
        let four = cat(CatalogueLabel::Four);
        assert_eq!(four.bands().len(), 4);
        for (k, b) in four.bands().iter().enumerate() {
            assert!((b.lo - k as f64 * PI / 4.0).abs() < 1e-15);
            assert!((b.hi - (2 * k + 1) as f64 * PI / 8.0).abs() < 1e-15);
        }
        assert_eq!(cat(CatalogueLabel::ThreeDelta(0.0)).bands(), cat(CatalogueLabel::Three).bands());
        assert_eq!(cat(CatalogueLabel::TwoDelta(0.0)).bands(), cat(CatalogueLabel::Two).bands());
    }

    #[test]
    fn point_values() {
        assert_eq!(cat(CatalogueLabel::One).evaluate_polar(PI / 4.0), 1);
        assert_eq!(cat(CatalogueLabel::Three).evaluate_polar(PI / 4.0), -1);
        // Closed bands: the edge belongs to the plus set.
        assert_eq!(cat(CatalogueLabel::One).evaluate_polar(PI / 2.0), 1);
    }

    #[test]
    fn parameter_ranges() {
        assert!(BandColouring::catalogue(CatalogueLabel::ThreeDelta(-PI / 17.0)).is_err());
        assert!(BandColouring::catalogue(CatalogueLabel::ThreeDelta(PI / 24.0)).is_ok());
        assert!(BandColouring::catalogue(CatalogueLabel::TwoDelta(-0.01)).is_err());
        assert!(BandColouring::catalogue(CatalogueLabel::TwoDelta(PI / 11.0)).is_err());
    }

    #[test]
    fn touching_bands_merge() {
        let c = BandColouring::new("broken", [Band::new(0.0, PI / 2.0), Band::new(PI / 2.0, PI)]).unwrap();
        assert_eq!(c.bands(), &[Band::new(0.0, PI)]);
        assert!(!c.is_antipodal());
    }

    #[test]
    fn exact_antipodality() {
        for l in [
            CatalogueLabel::One,
            CatalogueLabel::Two,
            CatalogueLabel::Three,
            CatalogueLabel::Four,
            CatalogueLabel::ThreeDelta(-0.04 * PI),
            CatalogueLabel::ThreeDelta(0.03 * PI),
            CatalogueLabel::TwoDelta(0.05 * PI),
        ] {
            assert!(cat(l).is_antipodal(), "{l:?}");
        }
        let skew = BandColouring::new("skew", [Band::new(0.0, 1.0)]).unwrap();
        assert!(!skew.is_antipodal());
    }

    #[test]
    fn negation_is_complement() {
        let three = cat(CatalogueLabel::Three);
        let neg = three.negated();
        for i in 0..200 {
            let e = (i as f64 + 0.5) * PI / 200.0;
            if three.edge_distance(e) > 1e-9 {
                assert_eq!(neg.evaluate_polar(e), -three.evaluate_polar(e));
            }
        }
        assert_eq!(neg.negated().bands(), three.bands());
    }
}
