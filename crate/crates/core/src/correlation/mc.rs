//! Monte Carlo estimates over uniformly random axis pairs.

use serde::Serialize;

use crate::colourings::ColouringPair;
use crate::error::{Error, Result};
use crate::geometry::{sample_axis_pair, sample_direction, Direction};
use crate::sampling::{mix64, monte_carlo, Estimate, SamplingPlan};
use crate::scalar::Real;

/// Mean of `alice(a)·bob(b)` over axis pairs at separation `theta`.
pub fn correlation_mc<T: Real>(pair: &ColouringPair<T>, theta: T, plan: &SamplingPlan) -> Result<Estimate<T>> {
    if !(theta >= T::zero() && theta <= T::PI()) {
        return Err(Error::domain("theta", format!("{theta} outside [0, pi]")));
    }
    monte_carlo(plan, |rng| {
        let p = sample_axis_pair(theta, rng)?;
        Ok(T::lit((pair.alice.evaluate(&p.a) * pair.bob.evaluate(&p.b)) as f64))
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GammaEstimate<T> {
    /// `1 − P(alice(d) = −bob(d))`.
    pub gamma: Estimate<T>,
    /// `C(0)` from an independent stream.
    pub c0: Estimate<T>,
    /// Whether `c0` agrees with `−1 + 2γ` within three combined standard
    /// errors.
    pub consistent: bool,
}

/// Estimates `γ` and checks it against the correlation at zero separation.
pub fn gamma_of<T: Real>(pair: &ColouringPair<T>, plan: &SamplingPlan) -> Result<GammaEstimate<T>> {
    let gamma = monte_carlo(plan, |rng| {
        let d: Direction<T> = sample_direction(rng);
        Ok(if pair.alice.evaluate(&d) == pair.bob.evaluate(&d) { T::one() } else { T::zero() })
    })?;
    let c0 = correlation_mc(pair, T::zero(), &plan.reseeded(mix64(plan.master_seed ^ 0xC0)))?;
    let two = T::lit(2.0);
    let predicted = -T::one() + two * gamma.value;
    let sigma = (c0.stderr * c0.stderr + two * two * gamma.stderr * gamma.stderr).sqrt();
    let consistent = (c0.value - predicted).abs() <= T::lit(3.0) * sigma + T::lit(1e-12);
    Ok(GammaEstimate { gamma, c0, consistent })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::colourings::{CatalogueLabel, Colouring, HarmonicColouring, HarmonicTerm};

    fn one() -> Colouring<f64> {
        Colouring::catalogue(CatalogueLabel::One).unwrap()
    }

    #[test]
    fn colouring_one_values() {
        let p = ColouringPair::anticorrelated(one()).unwrap();
        let plan = SamplingPlan::new(11, 1_000_000);
        let e = correlation_mc(&p, PI / 2.0, &plan).unwrap();
        assert!(e.agrees_with(0.0, 3.0), "{e:?}");
        let e = correlation_mc(&p, PI / 4.0, &plan).unwrap();
        assert!(e.agrees_with(-0.5, 3.0), "{e:?}");
    }

    #[test]
    fn identical_pair_at_zero_is_one() {
        let p = ColouringPair::identical(one()).unwrap();
        let e = correlation_mc(&p, 0.0, &SamplingPlan::new(1, 10_000)).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn gamma_of_extreme_pairs() {
        let plan = SamplingPlan::new(5, 50_000);
        let g = gamma_of(&ColouringPair::anticorrelated(one()).unwrap(), &plan).unwrap();
        assert_eq!(g.gamma.value, 0.0);
        assert!(g.consistent);
        let g = gamma_of(&ColouringPair::identical(one()).unwrap(), &plan).unwrap();
        assert_eq!(g.gamma.value, 1.0);
        assert!(g.consistent);
    }

    #[test]
    fn gamma_of_tilted_hemisphere_is_lune_fraction() {
        // Hemisphere about the axis tilted by t from the pole: the l = 1 field
        // cos t · Y10 + sin t · Y11. Two hemispheres at angle t share all but
        // two lunes of total area fraction t/π.
        let t = PI / 6.0;
        let tilted = Colouring::Harmonic(
            HarmonicColouring::new([
                HarmonicTerm { l: 1, m: 0, coefficient: t.cos() },
                HarmonicTerm { l: 1, m: 1, coefficient: t.sin() },
            ])
            .unwrap(),
        );
        let p = ColouringPair::new(one(), tilted.negated()).unwrap();
        let g = gamma_of(&p, &SamplingPlan::new(8, 1_000_000)).unwrap();
        assert!(g.gamma.agrees_with(t / PI, 3.0), "{:?}", g.gamma);
        assert!(g.consistent);
    }
}
