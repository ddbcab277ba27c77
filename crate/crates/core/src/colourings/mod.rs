//! Antipodal ±1 colourings of the sphere.
//!
//! A colouring assigns an outcome to every measurement axis. Relabelling
//! invariance forces `a(−v) = −a(v)`. Two concrete kinds are supported: band
//! colourings with azimuthal symmetry (the catalogue and its parametric
//! families) and signs of odd-degree real spherical harmonic sums.

mod band;
mod circle;
mod description;
mod harmonic;

use rand::Rng;

pub use band::{Band, BandColouring, CatalogueLabel};
pub use circle::{circle_colouring_value, circle_correlation};
pub use description::ColouringDescription;
pub use harmonic::{real_ylm, HarmonicColouring, HarmonicTerm, OddBasis};
pub(crate) use harmonic::bisect_root;

use crate::error::{Error, Result};
use crate::geometry::{sample_direction, Direction};
use crate::scalar::Real;

/// Off-edge distance used when sampling for antipodality checks.
const EDGE_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Colouring<T> {
    Band(BandColouring<T>),
    Harmonic(HarmonicColouring<T>),
}

impl<T: Real> From<BandColouring<T>> for Colouring<T> {
    fn from(c: BandColouring<T>) -> Self {
        Colouring::Band(c)
    }
}

impl<T: Real> From<HarmonicColouring<T>> for Colouring<T> {
    fn from(c: HarmonicColouring<T>) -> Self {
        Colouring::Harmonic(c)
    }
}

impl<T: Real> Colouring<T> {
    pub fn catalogue(label: CatalogueLabel<T>) -> Result<Self> {
        BandColouring::catalogue(label).map(Colouring::Band)
    }

    #[inline]
    pub fn evaluate(&self, d: &Direction<T>) -> i8 {
        match self {
            Colouring::Band(b) => b.evaluate_polar(d.epsilon()),
            Colouring::Harmonic(h) => h.evaluate(d),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Colouring::Band(b) => b.label().to_string(),
            Colouring::Harmonic(h) => format!("harmonic(L={})", h.l_max()),
        }
    }

    pub fn negated(&self) -> Self {
        match self {
            Colouring::Band(b) => Colouring::Band(b.negated()),
            Colouring::Harmonic(h) => Colouring::Harmonic(h.negated()),
        }
    }

    pub fn catalogue_label(&self) -> Option<CatalogueLabel<T>> {
        match self {
            Colouring::Band(b) => b.catalogue_label(),
            Colouring::Harmonic(_) => None,
        }
    }

    pub fn is_azimuthal(&self) -> bool {
        match self {
            Colouring::Band(_) => true,
            Colouring::Harmonic(h) => h.is_azimuthal(),
        }
    }

    /// Structural antipodality: exact for bands, guaranteed by odd degree
    /// for harmonic colourings.
    pub fn is_antipodal(&self) -> bool {
        match self {
            Colouring::Band(b) => b.is_antipodal(),
            Colouring::Harmonic(_) => true,
        }
    }

    /// Whether `d` is far enough from the colour boundary for a pointwise
    /// antipodality test to be meaningful.
    fn off_boundary(&self, d: &Direction<T>) -> bool {
        let margin = T::lit(EDGE_MARGIN);
        match self {
            Colouring::Band(b) => b.edge_distance(d.epsilon()) > margin,
            Colouring::Harmonic(h) => h.field(d).abs() > margin * h.coefficient_norm(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AntipodalReport {
    pub n_samples: usize,
    pub violations: usize,
    pub violation_fraction: f64,
}

/// Samples `n_samples` uniform off-boundary directions and counts those with
/// `c(d) ≠ −c(−d)`.
pub fn check_antipodal<T: Real, R: Rng + ?Sized>(c: &Colouring<T>, n_samples: usize, rng: &mut R) -> Result<AntipodalReport> {
    if n_samples == 0 {
        return Err(Error::domain("n_samples", "must be at least 1"));
    }
    let mut violations = 0;
    let mut accepted = 0;
    let mut attempts = 0usize;
    while accepted < n_samples {
        attempts += 1;
        if attempts > 100 * n_samples + 1000 {
            return Err(Error::domain("colouring", "no off-boundary directions found"));
        }
        let d: Direction<T> = sample_direction(rng);
        if !c.off_boundary(&d) || !c.off_boundary(&d.antipode()) {
            continue;
        }
        accepted += 1;
        if c.evaluate(&d) != -c.evaluate(&d.antipode()) {
            violations += 1;
        }
    }
    Ok(AntipodalReport {
        n_samples,
        violations,
        violation_fraction: violations as f64 / n_samples as f64,
    })
}

/// Alice's and Bob's colourings for one hidden-variable value.
#[derive(Clone, Debug, PartialEq)]
pub struct ColouringPair<T> {
    pub alice: Colouring<T>,
    pub bob: Colouring<T>,
    pub gamma_declared: Option<T>,
}

impl<T: Real> ColouringPair<T> {
    /// General pair. Both colourings must be antipodal.
    pub fn new(alice: Colouring<T>, bob: Colouring<T>) -> Result<Self> {
        for (who, c) in [("alice", &alice), ("bob", &bob)] {
            if !c.is_antipodal() {
                return Err(Error::NotAntipodal(format!("{who}: {}", c.label())));
            }
        }
        Ok(Self { alice, bob, gamma_declared: None })
    }

    /// Perfectly anticorrelated pair `b = −a` (γ = 0).
    pub fn anticorrelated(alice: Colouring<T>) -> Result<Self> {
        let bob = alice.negated();
        let mut p = Self::new(alice, bob)?;
        p.gamma_declared = Some(T::zero());
        Ok(p)
    }

    /// `b = a` (γ = 1).
    pub fn identical(alice: Colouring<T>) -> Result<Self> {
        let bob = alice.clone();
        let mut p = Self::new(alice, bob)?;
        p.gamma_declared = Some(T::one());
        Ok(p)
    }

    /// Global colour swap of both parties; leaves the correlation unchanged
    /// and maps γ to itself.
    pub fn swapped(&self) -> Self {
        Self { alice: self.alice.negated(), bob: self.bob.negated(), gamma_declared: self.gamma_declared }
    }

    /// Reverses Bob's outcomes only, which negates the correlation.
    pub fn bob_flipped(&self) -> Self {
        Self {
            alice: self.alice.clone(),
            bob: self.bob.negated(),
            gamma_declared: self.gamma_declared.map(|g| T::one() - g),
        }
    }

    /// True when Bob's colouring is structurally `−alice`.
    pub fn is_anticorrelated(&self) -> bool {
        self.bob == self.alice.negated()
    }

    pub fn label(&self) -> String {
        if self.is_anticorrelated() {
            self.alice.label()
        } else {
            format!("{}|{}", self.alice.label(), self.bob.label())
        }
    }
}
