//! Piecewise closed forms for the catalogue colourings on `[0, π/2]`.
//!
//! Each branch is a cosine polynomial plus a signed sum of `χ` integrals.
//! Colouring 1 is linear and needs no quadrature.

use super::azimuthal::chi;
use crate::colourings::CatalogueLabel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One branch: `base + Σ sᵢ χ(θ, aᵢ, bᵢ, αᵢ)`.
struct Branch<T> {
    name: &'static str,
    base: T,
    chis: Vec<(T, T, T, T)>,
}

impl<T: Real> Branch<T> {
    fn eval(&self, theta: T) -> Result<T> {
        let mut s = self.base;
        for &(sign, a, b, alpha) in &self.chis {
            s = s + sign * chi(theta, a, b, alpha)?;
        }
        Ok(s)
    }
}

fn missing<T: Real>(label: &CatalogueLabel<T>, theta: T, branch: impl Into<String>) -> Error {
    Error::MissingBranch {
        label: label.name(),
        theta_over_pi: (theta / T::PI()).as_f64(),
        branch: branch.into(),
    }
}

/// Closed-form `C(θ)` for `θ ∈ [0, π/2]`.
///
/// `3_δ` is covered only for `θ ∈ [π/3, π/2]`; other angles return
/// [`Error::MissingBranch`].
pub fn closed_form<T: Real>(label: &CatalogueLabel<T>, theta: T) -> Result<T> {
    let pi = T::PI();
    let half = pi / T::lit(2.0);
    if !(theta >= T::zero() && theta <= half) {
        return Err(missing(label, theta, "theta outside [0, pi/2]"));
    }
    if let CatalogueLabel::One = label {
        return Ok(-T::one() + T::lit(2.0) * theta / pi);
    }
    if let CatalogueLabel::TwoDelta(_) = label {
        return Err(missing(label, theta, "no closed form for 2_Delta"));
    }
    if theta == T::zero() {
        return match label {
            CatalogueLabel::ThreeDelta(_) => Err(missing(label, theta, "3_delta below pi/3")),
            _ => Ok(-T::one()),
        };
    }
    branch(label, theta)?.eval(theta)
}

/// Name of the branch that [`closed_form`] uses at `theta`.
pub fn branch_name<T: Real>(label: &CatalogueLabel<T>, theta: T) -> Result<&'static str> {
    match label {
        CatalogueLabel::One => Ok("linear"),
        _ => branch(label, theta).map(|b| b.name),
    }
}

fn branch<T: Real>(label: &CatalogueLabel<T>, t: T) -> Result<Branch<T>> {
    let p = T::PI();
    let k = |num: f64, den: f64| p * T::lit(num / den);
    let c = |x: T| x.cos();
    let two = T::lit(2.0);
    let (pl, mi) = (T::one(), -T::one());
    let b = |name, base, chis| Ok(Branch { name, base, chis });
    match *label {
        CatalogueLabel::Two => {
            let (q, h, q3) = (k(1., 4.), k(1., 2.), k(3., 4.));
            if t <= q {
                b("h2_1", -T::one() + two * (c(q) - c(q + t)), vec![
                    (pl, q - t, q, q),
                    (mi, q, q + t, q),
                    (pl, h - t, h, h),
                ])
            } else {
                b("h2_2", T::one() + two * (c(q) - c(t - q)), vec![
                    (pl, t - q, q, q),
                    (mi, h - t, q, h),
                    (pl, q, h, h),
                    (mi, q, h, q),
                    (mi, q3 - t, h, q3),
                ])
            }
        }
        CatalogueLabel::Three => {
            let (s, th, h, s4) = (k(1., 6.), k(1., 3.), k(1., 2.), k(2., 3.));
            if t <= s {
                b("h3_1", -T::one() + two * (c(s) - c(s + t) + c(th) - c(th + t)), vec![
                    (pl, s - t, s, s),
                    (mi, s, s + t, s),
                    (pl, th - t, th, th),
                    (mi, th, th + t, th),
                    (pl, h - t, h, h),
                ])
            } else if t <= k(1., 4.) {
                b("h3_2", T::one() + two * (c(s) - c(t - s) + c(s + t) - c(th)), vec![
                    (pl, t - s, s, s),
                    (mi, th - t, s, th),
                    (pl, s, h - t, th),
                    (mi, s, th, s),
                    (pl, h - t, th, th),
                    (mi, h - t, th, h),
                    (pl, th, s + t, s),
                    (pl, th, h, h),
                    (mi, th, h, th),
                    (mi, s4 - t, h, s4),
                ])
            } else if t <= th {
                b("h3_3", T::one() + two * (c(s) - c(t - s) + c(s + t) - c(th)), vec![
                    (mi, th - t, s, th),
                    (pl, t - s, s, s),
                    (pl, s, th, th),
                    (mi, s, th, s),
                    (mi, h - t, th, h),
                    (pl, th, h, h),
                    (mi, th, h, th),
                    (pl, th, s + t, s),
                    (mi, s4 - t, h, s4),
                ])
            } else {
                b("h3_4", -T::one() + two * (c(t - th) - c(s) + c(t - s) - c(th)), vec![
                    (mi, t - th, s, th),
                    (pl, h - t, s, h),
                    (pl, s, th, th),
                    (mi, s, th, h),
                    (mi, t - s, th, s),
                    (pl, s4 - t, th, s4),
                    (mi, th, h, s4),
                    (pl, th, h, h),
                    (mi, th, h, th),
                    (pl, th, h, s),
                    (pl, k(5., 6.) - t, h, k(5., 6.)),
                ])
            }
        }
        CatalogueLabel::Four => {
            let (e, q, e3, h) = (k(1., 8.), k(1., 4.), k(3., 8.), k(1., 2.));
            let (e5, q3, e7) = (k(5., 8.), k(3., 4.), k(7., 8.));
            if t <= e {
                b("h4_1", -T::one() + two * (c(e) - c(e + t) + c(q) - c(q + t) + c(e3) - c(e3 + t)), vec![
                    (pl, e - t, e, e),
                    (mi, e, e + t, e),
                    (pl, q - t, q, q),
                    (mi, q, q + t, q),
                    (pl, e3 - t, e3, e3),
                    (mi, e3, e3 + t, e3),
                    (pl, h - t, h, h),
                ])
            } else if t <= q {
                b("h4_2", T::one() + two * (c(e) - c(t - e) + c(t + e) - c(q) + c(t + q) - c(e3)), vec![
                    (pl, t - e, e, e),
                    (mi, q - t, e, q),
                    (pl, e, q, q),
                    (mi, e, q, e),
                    (mi, e3 - t, q, e3),
                    (pl, q, e + t, e),
                    (pl, q, e3, e3),
                    (mi, q, e3, q),
                    (mi, h - t, e3, h),
                    (pl, e3, q + t, q),
                    (pl, e3, h, h),
                    (mi, e3, h, e3),
                    (mi, e5 - t, h, e5),
                ])
            } else if t <= e3 {
                b("h4_3", -T::one() + two * (c(t - q) - c(e) + c(t - e) - c(q) + c(e3) - c(t + e)), vec![
                    (mi, t - q, e, q),
                    (pl, e3 - t, e, e3),
                    (mi, e, q, e3),
                    (pl, e, q, q),
                    (mi, t - e, q, e),
                    (pl, h - t, q, h),
                    (mi, q, e3, h),
                    (pl, q, e3, e3),
                    (mi, q, e3, q),
                    (pl, q, e3, e),
                    (pl, e5 - t, e3, e5),
                    (mi, e3, h, e5),
                    (pl, e3, h, h),
                    (mi, e3, h, e3),
                    (pl, e3, h, q),
                    (mi, e3, e + t, e),
                    (pl, q3 - t, h, q3),
                ])
            } else {
                b("h4_4", T::one() + two * (c(e) - c(t - e3) + c(q) - c(t - q) + c(e3) - c(t - e)), vec![
                    (pl, t - e3, e, e3),
                    (mi, h - t, e, h),
                    (pl, e, q, h),
                    (mi, e, q, e3),
                    (pl, t - q, q, q),
                    (mi, e5 - t, q, e5),
                    (pl, q, e3, e5),
                    (mi, q, e3, h),
                    (pl, q, e3, e3),
                    (mi, q, e3, q),
                    (pl, t - e, e3, e),
                    (mi, q3 - t, e3, q3),
                    (pl, e3, h, q3),
                    (mi, e3, h, e5),
                    (pl, e3, h, h),
                    (mi, e3, h, e3),
                    (pl, e3, h, q),
                    (mi, e3, h, e),
                    (mi, e7 - t, h, e7),
                ])
            }
        }
        CatalogueLabel::ThreeDelta(d) => three_delta(label, t, d),
        CatalogueLabel::One | CatalogueLabel::TwoDelta(_) => Err(missing(label, t, "no chi expansion")),
    }
}

fn three_delta<T: Real>(label: &CatalogueLabel<T>, t: T, d: T) -> Result<Branch<T>> {
    let p = T::PI();
    let k = |num: f64, den: f64| p * T::lit(num / den);
    let c = |x: T| x.cos();
    let two = T::lit(2.0);
    let (pl, mi) = (T::one(), -T::one());
    let (th, h, s4) = (k(1., 3.), k(1., 2.), k(2., 3.));
    let sd = k(1., 6.) + d;
    let fd = k(5., 6.) - d;
    if t < th {
        return Err(missing(label, t, "3_delta below pi/3"));
    }
    // Parts shared by every branch.
    let tail = |v: &mut Vec<(T, T, T, T)>| {
        v.extend([(pl, s4 - t, th, s4), (mi, th, h, s4), (pl, th, h, h), (mi, th, h, th)]);
    };
    let r2 = || {
        let mut v = vec![
            (mi, t - th, sd, th),
            (pl, h - t, sd, h),
            (mi, sd, th, h),
            (pl, sd, th, th),
            (mi, t - sd, th, sd),
        ];
        tail(&mut v);
        v.extend([(pl, th, h, sd), (pl, fd - t, h, fd)]);
        Branch { name: "r_2", base: -T::one() + two * (c(t - th) - c(sd) + c(t - sd) - c(th)), chis: v }
    };
    if d <= T::zero() {
        if t <= th - d {
            let mut v = vec![(mi, t - th, sd, th), (pl, sd, th, th), (mi, h - t, th, h), (mi, t - sd, th, sd)];
            tail(&mut v);
            v.push((pl, th, t + sd, sd));
            Ok(Branch { name: "r_1", base: -T::one() + two * (c(t - th) - c(sd) + c(t - sd) - c(th) + c(t + sd)), chis: v })
        } else if t <= h + d {
            Ok(r2())
        } else {
            let mut v = vec![(pl, h - t, sd, h), (mi, sd, th, h), (pl, t - th, th, th)];
            tail(&mut v);
            v.extend([(pl, t - sd, h, sd), (pl, fd - t, h, fd)]);
            Ok(Branch { name: "r_3", base: -T::one() + two * (c(sd) - c(t - th) + c(th) - c(t - sd)), chis: v })
        }
    } else if t <= th + two * d {
        let mut v = vec![
            (mi, t - th, sd, th),
            (pl, t - sd, sd, sd),
            (pl, h - t, sd, h),
            (mi, sd, th, h),
            (pl, sd, th, th),
            (mi, sd, th, sd),
        ];
        tail(&mut v);
        v.extend([(pl, th, h, sd), (pl, fd - t, h, fd)]);
        Ok(Branch { name: "r_4", base: -T::one() + two * (c(t - th) - c(t - sd) + c(sd) - c(th)), chis: v })
    } else if t <= h - d {
        Ok(r2())
    } else {
        let v = vec![
            (pl, h - t, sd, h),
            (mi, t - th, sd, th),
            (mi, s4 - t, sd, s4),
            (pl, sd, th, s4),
            (mi, sd, th, h),
            (pl, sd, th, th),
            (mi, t - sd, th, sd),
            (mi, fd - t, th, fd),
            (pl, th, h, fd),
            (mi, th, h, s4),
            (pl, th, h, h),
            (mi, th, h, th),
            (pl, th, h, sd),
        ];
        Ok(Branch { name: "r_5", base: -T::one() + two * (c(t - th) - c(sd) + c(t - sd) - c(th)), chis: v })
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::colourings::BandColouring;
    use crate::correlation::azimuthal::band_correlation;

    fn quad(l: CatalogueLabel<f64>, t: f64) -> f64 {
        band_correlation(&BandColouring::catalogue(l).unwrap(), t, 1e-11).unwrap().value
    }

    fn check(l: CatalogueLabel<f64>, grid: impl IntoIterator<Item = f64>) {
        for t in grid {
            let cf = closed_form(&l, t).unwrap();
            let q = quad(l, t);
            assert!((cf - q).abs() < 1e-7, "{} at {}pi ({}): {cf} vs {q}", l.name(), t / PI, branch_name(&l, t).unwrap());
        }
    }

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..=n).map(move |i| PI * (lo + (hi - lo) * i as f64 / n as f64))
    }

    #[test]
    fn every_branch_matches_quadrature() {
        check(CatalogueLabel::Two, grid(0.01, 0.5, 30));
        check(CatalogueLabel::Three, grid(0.01, 0.5, 40));
        check(CatalogueLabel::Four, grid(0.01, 0.5, 40));
    }

    #[test]
    fn three_delta_branches_match_quadrature() {
        for d in [-1.0 / 18.0, -0.046, -0.038, -0.01, 0.0, 0.01, 0.03, 1.0 / 24.0] {
            check(CatalogueLabel::ThreeDelta(d * PI), grid(1.0 / 3.0, 0.5, 24));
        }
    }

    #[test]
    fn branch_selection_for_three_delta() {
        let l = CatalogueLabel::ThreeDelta(-0.038 * PI);
        assert_eq!(branch_name(&l, 0.35 * PI).unwrap(), "r_1");
        assert_eq!(branch_name(&l, 0.40 * PI).unwrap(), "r_2");
        assert_eq!(branch_name(&l, 0.47 * PI).unwrap(), "r_3");
        let l = CatalogueLabel::ThreeDelta(0.03 * PI);
        assert_eq!(branch_name(&l, 0.36 * PI).unwrap(), "r_4");
        assert_eq!(branch_name(&l, 0.48 * PI).unwrap(), "r_5");
    }

    #[test]
    fn missing_branches_are_named() {
        let l = CatalogueLabel::ThreeDelta(-0.038 * PI);
        match closed_form(&l, 0.2 * PI) {
            Err(Error::MissingBranch { branch, .. }) => assert!(branch.contains("below")),
            other => panic!("{other:?}"),
        }
        assert!(closed_form(&CatalogueLabel::Three, 0.6 * PI).is_err());
        assert!(closed_form(&CatalogueLabel::TwoDelta(0.01 * PI), 0.4 * PI).is_err());
    }

    #[test]
    fn colouring_one_and_endpoints() {
        assert_eq!(closed_form(&CatalogueLabel::One, PI / 2.0).unwrap(), 0.0);
        for l in [CatalogueLabel::Two, CatalogueLabel::Three, CatalogueLabel::Four] {
            assert_eq!(closed_form(&l, 0.0).unwrap(), -1.0);
            assert!(closed_form(&l, PI / 2.0).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn shifted_three_beats_colouring_one_near_quarter() {
        let l = CatalogueLabel::ThreeDelta(-0.038 * PI);
        for t in [0.39, 0.42, 0.45, 0.49] {
            let t = t * PI;
            assert!(closed_form(&l, t).unwrap() < closed_form(&CatalogueLabel::One, t).unwrap());
        }
    }
}
