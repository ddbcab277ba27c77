//! Numerical ω-integral for azimuthal harmonic colourings.
//!
//! The integrand in ω is a sign function, so a classical rule converges
//! badly on it. Instead the partner circle is scanned on `n` points, each
//! sign change is refined by bisection and the arcs are summed exactly. `n`
//! starts at 64 and doubles until two successive sums agree within `1e-9`,
//! which guards against narrow lobes slipping between scan points.

use super::azimuthal::{degenerate, partner_cos, PolarProfile};
use crate::colourings::{bisect_root, HarmonicColouring};
use crate::error::{Error, Result};
use crate::scalar::Real;

const START_NODES: usize = 64;
const MAX_NODES: usize = 1 << 14;
const AGREEMENT: f64 = 1e-9;

/// `∫₀^π sgn g(ω) dω` from sign changes of `g` on an `n`-point scan.
fn signed_arc_length<T: Real, G: Fn(T) -> T>(g: &G, n: usize) -> T {
    let pi = T::PI();
    let h = pi / T::lit(n as f64);
    let sgn = |v: T| if v >= T::zero() { T::one() } else { -T::one() };
    let mut total = T::zero();
    let mut left = T::zero();
    let mut left_val = g(left);
    let mut start = T::zero();
    let mut current = sgn(left_val);
    for i in 1..=n {
        let w = if i == n { pi } else { h * T::lit(i as f64) };
        let v = g(w);
        if (v < T::zero()) != (left_val < T::zero()) {
            let root = bisect_root(g, left, w);
            total = total + current * (root - start);
            start = root;
            current = sgn(v);
        }
        left = w;
        left_val = v;
    }
    total + current * (pi - start)
}

pub(crate) struct AzimuthalHarmonic<'a, T> {
    colouring: &'a HarmonicColouring<T>,
    edges: Vec<T>,
}

impl<'a, T: Real> AzimuthalHarmonic<'a, T> {
    pub(crate) fn new(colouring: &'a HarmonicColouring<T>) -> Result<Self> {
        if !colouring.is_azimuthal() {
            return Err(Error::domain("colouring", "quadrature needs an azimuthally symmetric colouring (m = 0 only)"));
        }
        let edges = colouring.polar_nodes(64 * colouring.l_max() as usize);
        Ok(Self { colouring, edges })
    }

    fn field(&self, cos_alpha: T) -> T {
        self.colouring.field_at(cos_alpha, T::zero())
    }
}

impl<T: Real> PolarProfile<T> for AzimuthalHarmonic<'_, T> {
    fn sign(&self, epsilon: T) -> i8 {
        HarmonicColouring::sign_of(self.field(epsilon.cos()))
    }

    fn arc_integral(&self, theta: T, epsilon: T) -> Result<T> {
        if let Some(alpha) = degenerate(theta, epsilon) {
            return Ok(T::PI() * T::lit(self.sign(alpha) as f64));
        }
        let g = |w: T| self.field(partner_cos(theta, epsilon, w));
        let mut n = START_NODES;
        let mut prev = signed_arc_length(&g, n);
        while n < MAX_NODES {
            n *= 2;
            let next = signed_arc_length(&g, n);
            if (next - prev).abs() <= T::lit(AGREEMENT) {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::Quadrature { estimate: prev.as_f64(), error: f64::NAN, tol: AGREEMENT })
    }

    fn edges(&self) -> Vec<T> {
        self.edges.clone()
    }
}
