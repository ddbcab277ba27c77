//! Deterministic correlation of an azimuthally symmetric colouring with its
//! colour swap.
//!
//! With `b = −a` and `a` depending on the polar angle only,
//!
//! ```text
//! C(θ) = −1/(2π) ∫₀^π dε sin ε a(ε) ∫₀^π dω a(α(θ, ε, ω)).
//! ```
//!
//! The polar angle `α` of Bob's axis decreases monotonically in `ω` on
//! `[0, π]`, so the set of `ω` for which `α` falls in a plus band `[lo, hi]`
//! is the arc `[ω(hi), ω(lo)]` with
//! `ω(α_b) = arccos((cos θ cos ε − cos α_b) / (sin θ sin ε))`, clamped. The
//! inner integral is therefore exact, and the outer one is adaptive with the
//! kink locations as breakpoints. No antipodal reduction is applied, so the
//! symmetries `C(π − θ) = −C(θ)` and `C(π/2) = 0` come out of the integral
//! rather than being built in.

use crate::colourings::BandColouring;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Integral};
use crate::scalar::{clamp_unit, Real};

/// `ω ∈ [0, π]` at which Bob's polar angle equals `edge`.
#[inline]
fn crossing<T: Real>(cos_t_cos_e: T, denom: T, cos_edge: T) -> T {
    let x = (cos_t_cos_e - cos_edge) / denom;
    x.max(-T::one()).min(T::one()).acos()
}

/// A colouring that depends on the polar angle only.
pub trait PolarProfile<T: Real>: Sync {
    fn sign(&self, epsilon: T) -> i8;

    /// `∫₀^π b(α(θ, ε, ω)) dω` where `α` is the polar angle of the partner
    /// axis at separation `θ` and azimuth `ω` around an axis at polar angle `ε`.
    fn arc_integral(&self, theta: T, epsilon: T) -> Result<T>;

    /// Polar angles in `(0, π)` where the colour changes.
    fn edges(&self) -> Vec<T>;
}

/// Cosine of the partner polar angle.
#[inline]
pub(crate) fn partner_cos<T: Real>(theta: T, epsilon: T, omega: T) -> T {
    let v = theta.cos() * epsilon.cos() - theta.sin() * epsilon.sin() * omega.cos();
    v.max(-T::one()).min(T::one())
}

/// Degenerate circle: the partner sits at polar angle `θ` or `π − θ`.
pub(crate) fn degenerate<T: Real>(theta: T, epsilon: T) -> Option<T> {
    if theta.sin() * epsilon.sin() <= T::epsilon() * T::epsilon() {
        Some((theta.cos() * epsilon.cos()).max(-T::one()).min(T::one()).acos())
    } else {
        None
    }
}

impl<T: Real> PolarProfile<T> for BandColouring<T> {
    fn sign(&self, epsilon: T) -> i8 {
        self.evaluate_polar(epsilon)
    }

    fn arc_integral(&self, theta: T, epsilon: T) -> Result<T> {
        let pi = T::PI();
        if let Some(alpha) = degenerate(theta, epsilon) {
            return Ok(pi * T::lit(self.evaluate_polar(alpha) as f64));
        }
        let ct_ce = theta.cos() * epsilon.cos();
        let denom = theta.sin() * epsilon.sin();
        let plus: T = self
            .bands()
            .iter()
            .map(|b| crossing(ct_ce, denom, b.lo.cos()) - crossing(ct_ce, denom, b.hi.cos()))
            .sum();
        Ok(T::lit(2.0) * plus - pi)
    }

    fn edges(&self) -> Vec<T> {
        BandColouring::edges(self)
    }
}

fn breakpoints<T: Real>(edges: &[T], theta: T) -> Vec<T> {
    let pi = T::PI();
    let two_pi = pi + pi;
    let mut pts = vec![theta, pi - theta];
    for &e in edges {
        pts.extend([e, theta + e, theta - e, e - theta, two_pi - e - theta]);
    }
    pts.retain(|&x| x > T::zero() && x < pi);
    pts
}

/// `C(θ) = 1/(2π) ∫₀^π sin ε a(ε) ∫₀^π b(α) dω dε` for `θ ∈ [0, π]`.
pub fn pair_correlation<T: Real>(
    alice: &dyn PolarProfile<T>,
    bob: &dyn PolarProfile<T>,
    theta: T,
    tol: T,
) -> Result<Integral<T>> {
    let pi = T::PI();
    if !(theta >= T::zero() && theta <= pi) {
        return Err(Error::domain("theta", format!("{theta} outside [0, pi]")));
    }
    let mut edges = alice.edges();
    edges.extend(bob.edges());
    let failure = std::cell::RefCell::new(None);
    let f = |e: T| match bob.arc_integral(theta, e) {
        Ok(inner) => e.sin() * T::lit(alice.sign(e) as f64) * inner,
        Err(err) => {
            failure.borrow_mut().get_or_insert(err);
            T::zero()
        }
    };
    let scale = T::lit(2.0) * pi;
    let r = integrate(f, T::zero(), pi, &breakpoints(&edges, theta), tol * scale)?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(Integral { value: r.value / scale, error: r.error / scale, evaluations: r.evaluations })
}

/// Correlation of a band colouring with its colour swap.
pub fn band_correlation<T: Real>(c: &BandColouring<T>, theta: T, tol: T) -> Result<Integral<T>> {
    pair_correlation(c, &c.negated(), theta, tol)
}

/// `χ(θ, a, b, α) = (2/π) ∫_a^b sin ε arccos((cos θ cos ε − cos α)/(sin θ sin ε)) dε`.
///
/// The arccos argument must stay within `[−1, 1]` up to the clamp tolerance
/// at every node; a larger excursion is an error.
pub fn chi<T: Real>(theta: T, a: T, b: T, alpha: T) -> Result<T> {
    chi_with_tol(theta, a, b, alpha, T::lit(1e-9).max(T::epsilon() * T::lit(1e3)))
}

pub fn chi_with_tol<T: Real>(theta: T, a: T, b: T, alpha: T, tol: T) -> Result<T> {
    let pi = T::PI();
    for (name, v) in [("a", a), ("b", b), ("alpha", alpha)] {
        if !(v >= -T::clamp_tol() && v <= pi + T::clamp_tol()) {
            return Err(Error::domain("chi argument", format!("{name} = {v} outside [0, pi]")));
        }
    }
    if a == b {
        return Ok(T::zero());
    }
    if !(theta > T::zero() && theta <= pi / T::lit(2.0) + T::clamp_tol()) {
        return Err(Error::domain("theta", format!("{theta} outside (0, pi/2]")));
    }
    let (s_t, c_t) = theta.sin_cos();
    let c_a = alpha.cos();
    let bad = std::cell::Cell::new(None);
    let f = |e: T| {
        let (s_e, c_e) = e.sin_cos();
        let x = (c_t * c_e - c_a) / (s_t * s_e);
        match clamp_unit(x) {
            Some(x) => s_e * x.acos(),
            None => {
                if bad.get().is_none() {
                    bad.set(Some(x.as_f64()));
                }
                T::zero()
            }
        }
    };
    let scale = T::lit(2.0) / pi;
    let r = integrate(f, a, b, &[], tol / scale)?;
    if let Some(value) = bad.get() {
        return Err(Error::OutOfClamp { value });
    }
    Ok(scale * r.value)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::colourings::CatalogueLabel;
    use crate::quadrature::simpson;

    fn cat(l: CatalogueLabel<f64>) -> BandColouring<f64> {
        BandColouring::catalogue(l).unwrap()
    }

    /// Inner integral by brute-force midpoint sampling in ω.
    fn inner_brute(c: &BandColouring<f64>, theta: f64, e: f64, n: usize) -> f64 {
        (0..n)
            .map(|i| {
                let w = (i as f64 + 0.5) * PI / n as f64;
                let ca = theta.cos() * e.cos() - theta.sin() * e.sin() * w.cos();
                c.evaluate_polar(ca.max(-1.0).min(1.0).acos()) as f64
            })
            .sum::<f64>()
            * PI
            / n as f64
    }

    #[test]
    fn analytic_inner_matches_brute_force() {
        for l in [CatalogueLabel::One, CatalogueLabel::Three, CatalogueLabel::Four, CatalogueLabel::TwoDelta(0.03 * PI)] {
            let c = cat(l);
            for &(t, e) in &[(0.3, 0.2), (1.2, 0.9), (0.7, 2.8), (2.5, 1.6), (1.55, 0.01)] {
                let a = c.arc_integral(t, e).unwrap();
                let b = inner_brute(&c, t, e, 200_000);
                assert!((a - b).abs() < 1e-4, "{l:?} t {t} e {e}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn colouring_one_is_linear() {
        let c = cat(CatalogueLabel::One);
        for i in 1..20 {
            let t = i as f64 * PI / 20.0;
            let v = band_correlation(&c, t, 1e-10).unwrap().value;
            assert!((v - (-1.0 + 2.0 * t / PI)).abs() < 1e-9, "t {t}: {v}");
        }
        assert!((band_correlation(&c, PI / 3.0, 1e-8).unwrap().value + 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn endpoints() {
        let c = cat(CatalogueLabel::Three);
        assert!((band_correlation(&c, 0.0, 1e-10).unwrap().value + 1.0).abs() < 1e-10);
        assert!((band_correlation(&c, PI, 1e-10).unwrap().value - 1.0).abs() < 1e-10);
        assert!(band_correlation(&c, PI / 2.0, 1e-10).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn chi_trivial_cases() {
        assert_eq!(chi(0.5, 0.3, 0.3, 1.0).unwrap(), 0.0);
        assert!(chi(PI / 3.0, PI / 2.0 - 1e-6, PI / 2.0, PI / 2.0).unwrap().abs() < 1e-5);
    }

    #[test]
    fn chi_against_fine_simpson() {
        // Independent fixed-grid oracle. The integrand has square-root kinks
        // at both ends, so a very fine grid is needed for 1e-7.
        let (t, a, b, al) = (PI / 4.0, PI / 4.0, PI / 2.0, PI / 2.0);
        let g = |e: f64| {
            let x = (t.cos() * e.cos() - al.cos()) / (t.sin() * e.sin());
            e.sin() * x.max(-1.0).min(1.0).acos()
        };
        let reference = 2.0 / PI * simpson(g, a, b, 2_000_000);
        let got = chi(t, a, b, al).unwrap();
        assert!((got - reference).abs() < 1e-7, "{got} vs {reference}");
    }

    #[test]
    fn chi_rejects_out_of_clamp_arguments() {
        // cos(theta)cos(eps) - cos(alpha) over sin sin is far above 1 here.
        assert!(matches!(chi(0.1, 0.05, 0.3, PI / 2.0), Err(Error::OutOfClamp { .. })));
        assert!(chi(0.0, 0.1, 0.2, 0.3).is_err());
        assert!(chi(0.3, -0.5, 0.2, 0.3).is_err());
    }
}
