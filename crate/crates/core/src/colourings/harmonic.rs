//! Real spherical harmonics and sign-of-harmonic-sum colourings.
//!
//! Normalisation is orthonormal on the unit sphere with no Condon–Shortley
//! phase, so `Y_{1,1} ∝ x`, `Y_{1,-1} ∝ y`, `Y_{1,0} ∝ z`. Associated
//! Legendre values come from the fully normalised upward recurrence in `l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::scalar::Real;

/// One `a_lm Y_lm` term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm<T> {
    pub l: u32,
    pub m: i32,
    pub coefficient: T,
}

/// Index of `(l, m)` pairs with odd `l <= l_max`, in `(l, m)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct OddBasis {
    l_max: u32,
    pairs: Vec<(u32, i32)>,
}

impl OddBasis {
    pub fn new(l_max: u32) -> Self {
        let pairs = (1..=l_max)
            .step_by(2)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m)))
            .collect();
        Self { l_max, pairs }
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, i32)] {
        &self.pairs
    }

    /// Values of every basis function at `(cos ε, φ)`.
    pub fn evaluate<T: Real>(&self, cos_eps: T, phi: T, out: &mut Vec<T>) {
        let table = LegendreTable::new(self.l_max, cos_eps);
        let trig = AzimuthTable::new(self.l_max, phi);
        out.clear();
        out.extend(self.pairs.iter().map(|&(l, m)| table.real_ylm(&trig, l, m)));
    }

    pub fn colouring<T: Real>(&self, coefficients: &[T]) -> Result<HarmonicColouring<T>> {
        if coefficients.len() != self.pairs.len() {
            return Err(Error::domain(
                "coefficients",
                format!("expected {} values, got {}", self.pairs.len(), coefficients.len()),
            ));
        }
        HarmonicColouring::new(
            self.pairs
                .iter()
                .zip(coefficients)
                .map(|(&(l, m), &coefficient)| HarmonicTerm { l, m, coefficient }),
        )
    }
}

/// `P̄_l^m(x)` for `0 <= m <= l <= l_max`, normalised so that
/// `P̄_l^m(cos ε) · {cos, sin}(mφ) · (√2 if m > 0)` is orthonormal.
struct LegendreTable<T> {
    l_max: usize,
    values: Vec<T>,
}

impl<T: Real> LegendreTable<T> {
    fn new(l_max: u32, x: T) -> Self {
        let l_max = l_max as usize;
        let n = l_max + 1;
        let mut values = vec![T::zero(); n * n];
        let s = (T::one() - x * x).max(T::zero()).sqrt();
        let idx = |l: usize, m: usize| l * n + m;
        values[idx(0, 0)] = T::one() / (T::lit(4.0) * T::PI()).sqrt();
        for m in 1..=l_max {
            let mf = T::lit(m as f64);
            values[idx(m, m)] = ((T::lit(2.0) * mf + T::one()) / (T::lit(2.0) * mf)).sqrt() * s * values[idx(m - 1, m - 1)];
        }
        for m in 0..l_max {
            let mf = T::lit(m as f64);
            values[idx(m + 1, m)] = (T::lit(2.0) * mf + T::lit(3.0)).sqrt() * x * values[idx(m, m)];
        }
        for m in 0..=l_max {
            let m2 = (m * m) as f64;
            for l in (m + 2)..=l_max {
                let a = |l: usize| T::lit(((4 * l * l - 1) as f64 / ((l * l) as f64 - m2)).sqrt());
                values[idx(l, m)] = a(l) * (x * values[idx(l - 1, m)] - values[idx(l - 2, m)] / a(l - 1));
            }
        }
        Self { l_max, values }
    }

    #[inline]
    fn get(&self, l: u32, m: u32) -> T {
        self.values[l as usize * (self.l_max + 1) + m as usize]
    }

    fn real_ylm(&self, trig: &AzimuthTable<T>, l: u32, m: i32) -> T {
        let am = m.unsigned_abs();
        let p = self.get(l, am);
        match m {
            0 => p,
            m if m > 0 => T::SQRT_2() * p * trig.cos[am as usize],
            _ => T::SQRT_2() * p * trig.sin[am as usize],
        }
    }
}

struct AzimuthTable<T> {
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> AzimuthTable<T> {
    fn new(l_max: u32, phi: T) -> Self {
        let (s1, c1) = phi.sin_cos();
        let mut cos = vec![T::one()];
        let mut sin = vec![T::zero()];
        for k in 1..=l_max as usize {
            cos.push(cos[k - 1] * c1 - sin[k - 1] * s1);
            sin.push(sin[k - 1] * c1 + cos[k - 1] * s1);
        }
        Self { cos, sin }
    }
}

/// Real orthonormal spherical harmonic `Y_lm(ε, φ)`.
pub fn real_ylm<T: Real>(l: u32, m: i32, epsilon: T, phi: T) -> T {
    assert!(m.unsigned_abs() <= l, "|m| must not exceed l");
    let table = LegendreTable::new(l, epsilon.cos());
    let trig = AzimuthTable::new(l, phi);
    table.real_ylm(&trig, l, m)
}

/// `sgn(Σ a_lm Y_lm)` with odd `l` only, which makes it antipodal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicColouring<T> {
    terms: Vec<HarmonicTerm<T>>,
    l_max: u32,
}

impl<T: Real> HarmonicColouring<T> {
    pub fn new(terms: impl IntoIterator<Item = HarmonicTerm<T>>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        for t in &terms {
            if t.l % 2 == 0 {
                return Err(Error::domain("harmonic term", format!("l = {} is even", t.l)));
            }
            if t.m.unsigned_abs() > t.l {
                return Err(Error::domain("harmonic term", format!("|m| = {} exceeds l = {}", t.m.abs(), t.l)));
            }
            if !t.coefficient.is_finite() {
                return Err(Error::domain("harmonic term", "non-finite coefficient"));
            }
        }
        if terms.iter().all(|t| t.coefficient == T::zero()) {
            return Err(Error::domain("harmonic colouring", "all coefficients are zero"));
        }
        let l_max = terms.iter().map(|t| t.l).max().unwrap_or(1);
        Ok(Self { terms, l_max })
    }

    pub fn terms(&self) -> &[HarmonicTerm<T>] {
        &self.terms
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coefficient_norm(&self) -> T {
        self.terms.iter().map(|t| t.coefficient * t.coefficient).sum::<T>().sqrt()
    }

    /// True when every term has `m = 0`.
    pub fn is_azimuthal(&self) -> bool {
        self.terms.iter().all(|t| t.m == 0 || t.coefficient == T::zero())
    }

    /// `Σ a_lm Y_lm(ε, φ)` from `cos ε` and `φ`.
    pub fn field_at(&self, cos_eps: T, phi: T) -> T {
        let table = LegendreTable::new(self.l_max, cos_eps);
        let trig = AzimuthTable::new(self.l_max, phi);
        self.terms
            .iter()
            .map(|t| t.coefficient * table.real_ylm(&trig, t.l, t.m))
            .sum()
    }

    pub fn field(&self, d: &Direction<T>) -> T {
        self.field_at(d.epsilon().cos(), d.phi())
    }

    /// Field at a unit vector (for points that never go through polar angles).
    pub fn field_vec(&self, v: [T; 3]) -> T {
        let phi = if v[0] == T::zero() && v[1] == T::zero() { T::zero() } else { v[1].atan2(v[0]) };
        self.field_at(v[2].max(-T::one()).min(T::one()), phi)
    }

    #[inline]
    pub fn sign_of(value: T) -> i8 {
        if value >= T::zero() {
            1
        } else {
            -1
        }
    }

    pub fn evaluate(&self, d: &Direction<T>) -> i8 {
        Self::sign_of(self.field(d))
    }

    pub fn negated(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|t| HarmonicTerm { coefficient: -t.coefficient, ..*t }).collect(),
            l_max: self.l_max,
        }
    }

    /// Polar angles in `(0, π)` where an `m = 0` field changes sign, located
    /// by a scan of `scan` points refined by bisection.
    pub fn polar_nodes(&self, scan: usize) -> Vec<T> {
        debug_assert!(self.is_azimuthal());
        let pi = T::PI();
        let f = |e: T| self.field_at(e.cos(), T::zero());
        let mut nodes = Vec::new();
        let h = pi / T::lit(scan as f64);
        let mut prev_e = T::zero();
        let mut prev = f(prev_e);
        for i in 1..=scan {
            let e = h * T::lit(i as f64);
            let v = f(e);
            if (prev < T::zero()) != (v < T::zero()) {
                nodes.push(bisect_root(&f, prev_e, e));
            }
            prev_e = e;
            prev = v;
        }
        nodes
    }
}

/// Root of a sign change of `f` on `[a, b]` to full precision.
pub(crate) fn bisect_root<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T) -> T {
    let neg_a = f(a) < T::zero();
    for _ in 0..200 {
        let m = (a + b) / T::lit(2.0);
        if !(m > a && m < b) {
            break;
        }
        if (f(m) < T::zero()) == neg_a {
            a = m;
        } else {
            b = m;
        }
    }
    (a + b) / T::lit(2.0)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::quadrature;

    #[test]
    fn low_order_closed_forms() {
        let k1 = (3.0 / (4.0 * PI)).sqrt();
        for &(e, p) in &[(0.3, 1.2), (1.7, 4.0), (2.9, 0.1)] {
            let (se, ce) = f64::sin_cos(e);
            assert!((real_ylm(1, 0, e, p) - k1 * ce).abs() < 1e-14);
            assert!((real_ylm(1, 1, e, p) - k1 * se * p.cos()).abs() < 1e-14);
            assert!((real_ylm(1, -1, e, p) - k1 * se * p.sin()).abs() < 1e-14);
            // Y_30 = sqrt(7/16pi) (5 cos^3 - 3 cos)
            let y30 = (7.0 / (16.0 * PI)).sqrt() * (5.0 * ce.powi(3) - 3.0 * ce);
            assert!((real_ylm(3, 0, e, p) - y30).abs() < 1e-14);
            // Y_33 = sqrt(35/32pi) sin^3 cos(3 phi)
            let y33 = (35.0 / (32.0 * PI)).sqrt() * se.powi(3) * (3.0 * p).cos();
            assert!((real_ylm(3, 3, e, p) - y33).abs() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_up_to_degree_five() {
        // Gauss-Kronrod in cos(eps) times a trapezoid in phi (exact for
        // trigonometric polynomials of degree < n).
        let basis = OddBasis::new(5);
        let pairs = basis.pairs().to_vec();
        let nphi = 32;
        let mut gram = vec![0.0; pairs.len() * pairs.len()];
        for i in 0..pairs.len() {
            for j in i..pairs.len() {
                let (l1, m1) = pairs[i];
                let (l2, m2) = pairs[j];
                let g = |z: f64| {
                    let e = z.acos();
                    (0..nphi)
                        .map(|k| {
                            let p = 2.0 * PI * k as f64 / nphi as f64;
                            real_ylm(l1, m1, e, p) * real_ylm(l2, m2, e, p)
                        })
                        .sum::<f64>()
                        * 2.0
                        * PI
                        / nphi as f64
                };
                gram[i * pairs.len() + j] = quadrature::integrate(g, -1.0, 1.0, &[], 1e-12).unwrap().value;
            }
        }
        for i in 0..pairs.len() {
            for j in i..pairs.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i * pairs.len() + j] - want).abs() < 1e-10, "{:?} {:?}", pairs[i], pairs[j]);
            }
        }
    }

    #[test]
    fn rejects_even_degree_and_zero() {
        assert!(HarmonicColouring::new([HarmonicTerm { l: 2, m: 0, coefficient: 1.0 }]).is_err());
        assert!(HarmonicColouring::new([HarmonicTerm { l: 1, m: 2, coefficient: 1.0 }]).is_err());
        assert!(HarmonicColouring::new([HarmonicTerm { l: 3, m: 1, coefficient: 0.0 }]).is_err());
    }

    #[test]
    fn dipole_is_hemisphere() {
        let c = HarmonicColouring::new([HarmonicTerm { l: 1, m: 0, coefficient: 1.0 }]).unwrap();
        for i in 0..100 {
            let e = (i as f64 + 0.5) * PI / 100.0;
            let d = Direction::new(e, 0.37 * i as f64).unwrap();
            assert_eq!(c.evaluate(&d), if e < PI / 2.0 { 1 } else { -1 });
        }
        let nodes = c.polar_nodes(64);
        assert_eq!(nodes.len(), 1);
        assert!((nodes[0] - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn basis_size() {
        assert_eq!(OddBasis::new(1).len(), 3);
        assert_eq!(OddBasis::new(3).len(), 10);
        assert_eq!(OddBasis::new(5).len(), 21);
    }

    proptest! {
        #[test]
        fn odd_degree_is_odd_under_inversion(
            coeffs in proptest::collection::vec(-1.0f64..1.0, 21),
            e in 0.01f64..3.1, p in 0.0f64..6.2,
        ) {
            let c = OddBasis::new(5).colouring(&coeffs).unwrap();
            let d = Direction::new(e, p).unwrap();
            let f = c.field(&d);
            let g = c.field(&d.antipode());
            prop_assert!((f + g).abs() < 1e-12);
        }

        #[test]
        fn sign_invariant_under_positive_scaling(
            coeffs in proptest::collection::vec(-1.0f64..1.0, 10),
            scale in 0.01f64..100.0,
            e in 0.0f64..3.1, p in 0.0f64..6.2,
        ) {
            let basis = OddBasis::new(3);
            let c = basis.colouring(&coeffs).unwrap();
            let scaled: Vec<f64> = coeffs.iter().map(|x| x * scale).collect();
            let s = basis.colouring(&scaled).unwrap();
            let d = Direction::new(e, p).unwrap();
            prop_assume!(c.field(&d).abs() > 1e-9 * c.coefficient_norm());
            prop_assert_eq!(c.evaluate(&d), s.evaluate(&d));
        }
    }
}
