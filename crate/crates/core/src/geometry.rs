//! Spherical coordinates of measurement axes and sampling of axis pairs at a
//! fixed separation.
//!
//! A [`Direction`] stores the polar angle `epsilon` measured from the north
//! pole and the azimuth `phi`. The partner transform places Bob's axis on the
//! circle of angular radius `theta` around Alice's axis, parametrised by the
//! angle `omega` along that circle.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{clamp_unit, Real};

/// Clamp overshoot above which an `arccos` argument is rejected outright.
const HARD_CLAMP: f64 = 1e-6;

/// Unit vector on the sphere in polar coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction<T> {
    epsilon: T,
    phi: T,
}

impl<T: Real> Direction<T> {
    /// Builds a direction, wrapping `phi` into `[0, 2π)`.
    ///
    /// `epsilon` must lie in `[0, π]` (a clamp-tolerance overshoot is
    /// absorbed). At the poles the azimuth is meaningless and is set to 0.
    pub fn new(epsilon: T, phi: T) -> Result<Self> {
        let pi = T::PI();
        let tol = T::clamp_tol();
        if !(epsilon >= -tol && epsilon <= pi + tol) || !phi.is_finite() {
            return Err(Error::domain(
                "direction",
                format!("epsilon = {epsilon} outside [0, pi] or non-finite phi = {phi}"),
            ));
        }
        let epsilon = epsilon.max(T::zero()).min(pi);
        Ok(Self::canonical(epsilon, phi))
    }

    fn canonical(epsilon: T, phi: T) -> Self {
        let pi = T::PI();
        let phi = if epsilon == T::zero() || epsilon == pi {
            T::zero()
        } else {
            wrap_two_pi(phi)
        };
        Self { epsilon, phi }
    }

    pub fn north() -> Self {
        Self { epsilon: T::zero(), phi: T::zero() }
    }

    pub fn south() -> Self {
        Self { epsilon: T::PI(), phi: T::zero() }
    }

    /// Direction of a (not necessarily normalised) non-zero vector.
    pub fn from_vector(v: [T; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm > T::zero()) {
            return Err(Error::domain("direction", "zero vector"));
        }
        let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let epsilon = rho.atan2(v[2]);
        let phi = if rho > T::zero() { v[1].atan2(v[0]) } else { T::zero() };
        Ok(Self::canonical(epsilon, phi))
    }

    #[inline]
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    #[inline]
    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn to_vector(&self) -> [T; 3] {
        let (se, ce) = self.epsilon.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [se * cp, se * sp, ce]
    }

    /// The opposite point `-d`.
    pub fn antipode(&self) -> Self {
        Self::canonical(T::PI() - self.epsilon, self.phi + T::PI())
    }

    pub fn angle_to(&self, other: &Self) -> T {
        angle_between(self, other)
    }
}

#[inline]
fn wrap_two_pi<T: Real>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut r = x % two_pi;
    if r < T::zero() {
        r = r + two_pi;
    }
    // `x % 2π` for tiny negative `x` can round back up to exactly 2π.
    if r >= two_pi {
        r = T::zero();
    }
    r
}

/// Angle between two directions, `arccos(a · b)` with the dot product
/// clamped to `[-1, 1]`.
pub fn angle_between<T: Real>(a: &Direction<T>, b: &Direction<T>) -> T {
    let u = a.to_vector();
    let v = b.to_vector();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    dot.max(-T::one()).min(T::one()).acos()
}

fn checked_unit<T: Real>(x: T) -> Result<T> {
    if let Some(c) = clamp_unit(x) {
        return Ok(c);
    }
    if x.abs() <= T::one() + T::lit(HARD_CLAMP) {
        Ok(x.signum())
    } else {
        Err(Error::OutOfClamp { value: x.as_f64() })
    }
}

/// Bob's axis at separation `theta` from `a`, at position `omega` on the
/// circle around `a`.
///
/// Polar angle: `alpha = arccos(cos θ cos ε − sin θ sin ε cos ω)`.
/// Azimuth: `beta = φ + k·arccos((cos ε sin θ cos ω + sin ε cos θ) / sin α)`
/// with `k = +1` for `ω ∈ [0, π]` and `k = −1` for `ω ∈ (π, 2π]`.
/// At the north pole the azimuth reduces to `φ + ω`; when the result is a pole
/// its azimuth is 0.
pub fn partner_direction<T: Real>(a: &Direction<T>, theta: T, omega: T) -> Result<Direction<T>> {
    let pi = T::PI();
    if !(theta >= T::zero() && theta <= pi) {
        return Err(Error::domain("theta", format!("{theta} outside [0, pi]")));
    }
    if theta == T::zero() {
        return Ok(*a);
    }
    let (s_t, c_t) = theta.sin_cos();
    let (s_e, c_e) = a.epsilon.sin_cos();
    let c_w = omega.cos();
    let alpha = checked_unit(c_t * c_e - s_t * s_e * c_w)?.acos();

    if a.epsilon == T::zero() {
        return Ok(Direction::canonical(alpha, a.phi + omega));
    }
    if a.epsilon == pi {
        // Limit of the general azimuth formula as epsilon -> pi.
        return Ok(Direction::canonical(alpha, a.phi + pi - omega));
    }
    let s_a = alpha.sin();
    if s_a <= T::epsilon() {
        return Ok(Direction::canonical(if alpha < pi / T::lit(2.0) { T::zero() } else { pi }, T::zero()));
    }
    let k = if wrap_two_pi(omega) <= pi { T::one() } else { -T::one() };
    let ratio = checked_unit((c_e * s_t * c_w + s_e * c_t) / s_a)?;
    Ok(Direction::canonical(alpha, a.phi + k * ratio.acos()))
}

/// Pair of measurement axes separated by `theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisPair<T> {
    pub a: Direction<T>,
    pub b: Direction<T>,
    pub theta: T,
}

/// Direction distributed uniformly over the sphere.
pub fn sample_direction<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Direction<T> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Direction::canonical(T::lit(z.acos()), T::lit(phi))
}

/// Uniform Alice axis, uniform `omega`, Bob's axis from
/// [`partner_direction`].
pub fn sample_axis_pair<T: Real, R: Rng + ?Sized>(theta: T, rng: &mut R) -> Result<AxisPair<T>> {
    let a = sample_direction(rng);
    let omega: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let b = partner_direction(&a, theta, T::lit(omega))?;
    Ok(AxisPair { a, b, theta })
}
