//! Bell-type inequalities and the bounds they impose on `C(θ)`.
//!
//! Chained (Braunstein–Caves) inequalities with `N` settings per side bound
//! any antipodal LHV correlation by the hemispherical one at `π/2N`. The
//! refinements below tighten this with the anticorrelation parameter `γ` and compare to
//! the singlet curve.

use rayon::prelude::*;
use serde::Serialize;

use crate::colourings::ColouringPair;
use crate::correlation::{correlation_curve, CorrelationCurve, EngineOptions, Method};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// θ within this distance of an interval boundary snaps to it.
const SNAP: f64 = 1e-12;
/// Slack for round-off when checking exact or quadrature values.
const EXACT_SLACK: f64 = 1e-9;

fn in_unit<T: Real>(vals: &[T]) -> Result<()> {
    if vals.iter().all(|v| v.abs() <= T::one()) {
        Ok(())
    } else {
        Err(Error::domain("correlation", "entries must lie in [-1, 1]"))
    }
}

/// `|C(0,0) + C(1,1) + C(1,0) − C(0,1)|`.
pub fn chsh_value<T: Real>(c00: T, c11: T, c10: T, c01: T) -> Result<T> {
    in_unit(&[c00, c11, c10, c01])?;
    Ok((c00 + c11 + c10 - c01).abs())
}

/// Correlations entering the chained inequality for `N` settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCorrelations<T> {
    diagonal: Vec<T>,
    offdiagonal: Vec<T>,
    wrap: T,
}

impl<T: Real> ChainCorrelations<T> {
    /// `diagonal[k] = C(k, k)` for `k < N`, `offdiagonal[k] = C(k+1, k)`
    /// for `k < N − 1`, `wrap = C(0, N−1)`.
    pub fn new(diagonal: Vec<T>, offdiagonal: Vec<T>, wrap: T) -> Result<Self> {
        let n = diagonal.len();
        if n < 2 || offdiagonal.len() + 1 != n {
            return Err(Error::domain("chain", format!("{n} diagonal and {} off-diagonal entries", offdiagonal.len())));
        }
        in_unit(&diagonal)?;
        in_unit(&offdiagonal)?;
        in_unit(&[wrap])?;
        Ok(Self { diagonal, offdiagonal, wrap })
    }

    /// Every neighbouring axis pair at the same separation, with the wrap
    /// pair at `π − θ`: `C(θ)` everywhere and `C(π − θ) = −C(θ)` for the wrap.
    pub fn uniform(n: usize, c: T) -> Result<Self> {
        Self::new(vec![c; n], vec![c; n.saturating_sub(1)], -c)
    }

    pub fn n(&self) -> usize {
        self.diagonal.len()
    }
}

/// `|Σₖ C(k,k) + Σₖ C(k+1,k) − C(0,N−1)|`, at most `2N − 2` for any LHV model.
pub fn braunstein_caves_value<T: Real>(chain: &ChainCorrelations<T>) -> T {
    let s: T = chain.diagonal.iter().copied().sum::<T>() + chain.offdiagonal.iter().copied().sum::<T>();
    (s - chain.wrap).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Theorem1,
    Lemma1,
    Lemma2,
    Lemma4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Satisfied,
    /// Outside the bound, but within the statistical band of an MC value.
    Inconclusive,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub theta: T,
    pub n_chain: Option<u32>,
    pub lower: T,
    pub upper: T,
    /// Whether each end of the interval is excluded.
    pub strict: bool,
    pub source: BoundSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck<T> {
    pub bound: BoundReport<T>,
    pub tested_value: T,
    pub stderr: Option<T>,
    pub status: BoundStatus,
    /// Value sits on a bound within round-off.
    pub saturated: bool,
}

impl<T: Real> BoundCheck<T> {
    pub fn satisfied(&self) -> bool {
        self.status == BoundStatus::Satisfied
    }
}

impl<T: Real> BoundReport<T> {
    /// Checks a value. Exact values get a round-off slack (none for strict
    /// bounds); MC values are only `Violated` when more than three standard
    /// errors outside.
    pub fn check(&self, value: T, stderr: Option<T>) -> BoundCheck<T> {
        let slack = T::lit(EXACT_SLACK);
        let saturated = (value - self.lower).abs() <= slack || (value - self.upper).abs() <= slack;
        let inside = |margin: T| {
            if self.strict {
                value > self.lower - margin && value < self.upper + margin
            } else {
                value >= self.lower - margin && value <= self.upper + margin
            }
        };
        let exact_margin = if self.strict { T::zero() } else { slack };
        let status = if inside(exact_margin) {
            BoundStatus::Satisfied
        } else if stderr.is_some_and(|s| inside(T::lit(3.0) * s)) {
            BoundStatus::Inconclusive
        } else {
            BoundStatus::Violated
        };
        BoundCheck { bound: *self, tested_value: value, stderr, status, saturated }
    }
}

/// `k` when `x` is within [`SNAP`] of the integer `k`, else `x`.
fn snap<T: Real>(x: T) -> T {
    let r = x.round();
    if (x - r).abs() <= T::lit(SNAP) * r.abs().max(T::one()) {
        r
    } else {
        x
    }
}

fn to_u32<T: Real>(x: T) -> u32 {
    x.to_u32().unwrap_or(u32::MAX)
}

/// Chained-inequality bound: for `θ ∈ [π/2N, π/2(N−1))`,
/// `−1 + 1/N ≤ C(θ) ≤ 1 − 1/N`. At `θ = π/2` the pair degenerates to `(0, 0)`.
pub fn theorem1_bounds<T: Real>(theta: T) -> Result<BoundReport<T>> {
    let half = T::PI() / T::lit(2.0);
    if !(theta > T::zero() && theta <= half) {
        return Err(Error::domain("theta", format!("{theta} outside (0, pi/2]")));
    }
    let base = BoundReport { theta, n_chain: None, lower: T::zero(), upper: T::zero(), strict: false, source: BoundSource::Theorem1 };
    if (theta - half).abs() <= T::lit(SNAP) {
        return Ok(base);
    }
    let n = snap(half / theta).ceil().max(T::lit(2.0));
    let b = T::one() - T::one() / n;
    Ok(BoundReport { n_chain: Some(to_u32(n)), lower: -b, upper: b, ..base })
}

/// `−1 + 2γ/3 ≤ C(θ) ≤ 1/3 + 2γ/3` for `θ ∈ (0, 2π/3]`.
pub fn lemma1_bounds<T: Real>(theta: T, gamma: T) -> Result<BoundReport<T>> {
    if !(theta > T::zero() && theta <= T::PI() * T::lit(2.0 / 3.0)) {
        return Err(Error::domain("theta", format!("{theta} outside (0, 2pi/3]")));
    }
    check_gamma(gamma)?;
    let g = T::lit(2.0 / 3.0) * gamma;
    Ok(BoundReport {
        theta,
        n_chain: Some(3),
        lower: -T::one() + g,
        upper: T::one() / T::lit(3.0) + g,
        strict: false,
        source: BoundSource::Lemma1,
    })
}

fn check_gamma<T: Real>(gamma: T) -> Result<()> {
    if gamma >= T::zero() && gamma <= T::one() {
        Ok(())
    } else {
        Err(Error::domain("gamma", format!("{gamma} outside [0, 1]")))
    }
}

/// Lower bound `−1 + 2/N − 2γ` for `θ ∈ [π/N, π/(N−1))`, `N > 2`.
pub fn lemma2_bound<T: Real>(theta: T, gamma: T) -> Result<BoundReport<T>> {
    let pi = T::PI();
    if !(theta > T::zero() && theta < pi / T::lit(2.0)) {
        return Err(Error::domain("theta", format!("{theta} outside (0, pi/2)")));
    }
    check_gamma(gamma)?;
    let n = snap(pi / theta).ceil();
    Ok(BoundReport {
        theta,
        n_chain: Some(to_u32(n)),
        lower: -T::one() + T::lit(2.0) / n - T::lit(2.0) * gamma,
        upper: T::one(),
        strict: false,
        source: BoundSource::Lemma2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `0 ≤ θⱼ < θ`.
    Below,
    /// `θ < θⱼ < π/2`.
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReflectionAngle<T> {
    pub j: u32,
    pub theta_j: T,
    pub predicted: Side,
    /// `theta_j` lies on the predicted side.
    pub consistent: bool,
}

/// `θⱼ = π/(M + 1 − j) − θ`, `j = 1..M−1`, for `θ ∈ (π/(M+1), π/M]`.
pub fn lemma3_reflection_angles<T: Real>(theta: T) -> Result<Vec<ReflectionAngle<T>>> {
    let pi = T::PI();
    let half = pi / T::lit(2.0);
    if !(theta > T::zero() && theta <= half + T::lit(SNAP)) {
        return Err(Error::domain("theta", format!("{theta} outside (0, pi/2]")));
    }
    let m = to_u32(snap(pi / theta).floor());
    let tol = T::lit(SNAP);
    Ok((1..m)
        .map(|j| {
            let theta_j = pi / T::lit((m + 1 - j) as f64) - theta;
            let predicted = if (j as f64) < m as f64 / 2.0 + 1.0 { Side::Below } else { Side::Above };
            let consistent = match predicted {
                Side::Below => theta_j >= -tol && theta_j < theta,
                Side::Above => theta_j > theta - tol && theta_j < half + tol,
            };
            ReflectionAngle { j, theta_j, predicted, consistent }
        })
        .collect())
}

/// Strict singlet envelope `−cos θ < C(θ) < cos θ` for `θ ∈ (0, π/3)`.
pub fn lemma4_bounds<T: Real>(theta: T) -> Result<BoundReport<T>> {
    if !(theta > T::zero() && theta < T::PI() / T::lit(3.0)) {
        return Err(Error::domain("theta", format!("{theta} outside (0, pi/3)")));
    }
    let c = theta.cos();
    Ok(BoundReport { theta, n_chain: None, lower: -c, upper: c, strict: true, source: BoundSource::Lemma4 })
}

pub fn lemma4_check<T: Real>(theta: T, value: T) -> Result<bool> {
    Ok(lemma4_bounds(theta)?.check(value, None).satisfied())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport<T> {
    pub theta_over_pi: T,
    pub value: T,
    pub stderr: Option<T>,
    pub lower: T,
    pub upper: T,
    pub n_chain: Option<u32>,
    pub satisfied: bool,
    pub status: BoundStatus,
    pub saturated: bool,
    /// `|C| <= cos θ` check where it applies (`θ < π/3`).
    pub lemma4: Option<BoundStatus>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport<T> {
    pub colouring: String,
    pub method: Method,
    pub grid: Vec<GridReport<T>>,
}

impl<T: Real> VerifyReport<T> {
    fn statuses(&self) -> impl Iterator<Item = BoundStatus> + '_ {
        self.grid.iter().flat_map(|g| std::iter::once(g.status).chain(g.lemma4))
    }

    pub fn all_satisfied(&self) -> bool {
        self.statuses().all(|s| s == BoundStatus::Satisfied)
    }

    pub fn any_violated(&self) -> bool {
        self.statuses().any(|s| s == BoundStatus::Violated)
    }

    /// Human-readable lines for every grid point that is not satisfied.
    pub fn witnesses(&self) -> Vec<String> {
        self.grid
            .iter()
            .filter(|g| g.status != BoundStatus::Satisfied || g.lemma4.is_some_and(|s| s != BoundStatus::Satisfied))
            .map(|g| {
                let pi = T::PI().as_f64();
                let th = g.theta_over_pi.as_f64() * pi;
                let l4 = g.lemma4.map(|s| format!(", cos bound {s:?} (±{:.6})", th.cos())).unwrap_or_default();
                format!(
                    "{}: theta = {:.6}pi, value = {:.9}{}, chained bound [{:.9}, {:.9}] {:?}{l4}",
                    self.colouring,
                    g.theta_over_pi.as_f64(),
                    g.value.as_f64(),
                    g.stderr.map(|s| format!(" ± {:.2e}", s.as_f64())).unwrap_or_default(),
                    g.lower.as_f64(),
                    g.upper.as_f64(),
                    g.status,
                )
            })
            .collect()
    }
}

/// Checks the chained bounds at every point of `curve` and `|C| <= cos θ` where `θ < π/3`.
pub fn verify_curve<T: Real>(curve: &CorrelationCurve<T>) -> Result<VerifyReport<T>> {
    let third = T::PI() / T::lit(3.0);
    let grid = curve
        .points()
        .par_iter()
        .map(|p| {
            let t1 = theorem1_bounds(p.theta)?.check(p.value, p.stderr);
            let lemma4 = if p.theta < third { Some(lemma4_bounds(p.theta)?.check(p.value, p.stderr).status) } else { None };
            Ok(GridReport {
                theta_over_pi: p.theta / T::PI(),
                value: p.value,
                stderr: p.stderr,
                lower: t1.bound.lower,
                upper: t1.bound.upper,
                n_chain: t1.bound.n_chain,
                satisfied: t1.satisfied(),
                status: t1.status,
                saturated: t1.saturated,
                lemma4,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport { colouring: curve.colouring_label.clone(), method: curve.method, grid })
}

/// Computes the curve of `pair` on a grid in `(0, π/2]` and verifies it.
pub fn verify_colouring<T: Real>(
    pair: &ColouringPair<T>,
    thetas: &[T],
    method: Method,
    opts: &EngineOptions<T>,
) -> Result<VerifyReport<T>> {
    let half = T::PI() / T::lit(2.0);
    if let Some(t) = thetas.iter().find(|&&t| !(t > T::zero() && t <= half + T::lit(SNAP))) {
        return Err(Error::domain("theta grid", format!("{t} outside (0, pi/2]")));
    }
    verify_curve(&correlation_curve(pair, thetas, method, opts)?)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::colourings::{CatalogueLabel, Colouring};
    use crate::correlation::closed_form;
    use crate::sampling::SamplingPlan;

    #[test]
    fn chsh_examples() {
        assert_eq!(chsh_value(1.0, 1.0, 1.0, -1.0).unwrap(), 4.0);
        assert_eq!(chsh_value(1.0, 1.0, 1.0, 1.0).unwrap(), 2.0);
        // Singlet at settings 0, π/2 (Alice) and π/4, −π/4 (Bob).
        let q = |t: f64| -t.cos();
        let v = chsh_value(q(PI / 4.0), q(PI / 4.0), q(PI / 4.0), q(3.0 * PI / 4.0)).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(chsh_value(1.5, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn chain_examples() {
        let c = ChainCorrelations::new(vec![1.0, 1.0], vec![1.0], -1.0).unwrap();
        assert_eq!(braunstein_caves_value(&c), 4.0);
        let z = ChainCorrelations::new(vec![0.0; 3], vec![0.0; 2], 0.0).unwrap();
        assert_eq!(braunstein_caves_value(&z), 0.0);
        for n in 2..10usize {
            let t = PI / (2 * n) as f64;
            let c = ChainCorrelations::uniform(n, -t.cos()).unwrap();
            assert!((braunstein_caves_value(&c) - 2.0 * n as f64 * t.cos()).abs() < 1e-12);
        }
        assert!(ChainCorrelations::new(vec![0.0; 3], vec![0.0; 3], 0.0).is_err());
    }

    #[test]
    fn colouring_one_chain_saturates_classical_bound() {
        for n in 2..12usize {
            let t = PI / (2 * n) as f64;
            let c = ChainCorrelations::uniform(n, closed_form(&CatalogueLabel::One, t).unwrap()).unwrap();
            assert!((braunstein_caves_value(&c) - (2 * n - 2) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn theorem1_examples() {
        let r = theorem1_bounds(PI / 4.0).unwrap();
        assert_eq!((r.lower, r.upper, r.n_chain), (-0.5, 0.5, Some(2)));
        let r = theorem1_bounds(PI / 12.0).unwrap();
        assert_eq!(r.n_chain, Some(6));
        assert!((r.lower + 5.0 / 6.0).abs() < 1e-15 && r.upper == -r.lower);
        let r = theorem1_bounds(PI / 2.0).unwrap();
        assert_eq!((r.lower, r.upper), (0.0, 0.0));
        assert!(theorem1_bounds(0.0).is_err());
        assert!(theorem1_bounds(2.0).is_err());
    }

    #[test]
    fn theorem1_matches_colouring_one_at_interval_starts() {
        for n in 2..40u32 {
            let t = PI / (2 * n) as f64;
            let r = theorem1_bounds(t).unwrap();
            assert_eq!(r.n_chain, Some(n));
            assert!((r.lower - closed_form(&CatalogueLabel::One, t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn lemma_examples() {
        let b = |g: f64| {
            let r = lemma1_bounds(1.0, g).unwrap();
            (r.lower, r.upper)
        };
        assert_eq!(b(0.0), (-1.0, 1.0 / 3.0));
        let (lo, hi) = b(1.0);
        assert!((lo + 1.0 / 3.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        let (lo, hi) = b(0.5);
        assert!((lo + 2.0 / 3.0).abs() < 1e-15 && (hi - 2.0 / 3.0).abs() < 1e-15);
        assert!(lemma1_bounds(2.5, 0.0).is_err());

        assert_eq!(lemma2_bound(PI / 4.0, 0.0).unwrap().lower, -0.5);
        assert_eq!(lemma2_bound(PI / 4.0, 0.0).unwrap().n_chain, Some(4));
        assert!((lemma2_bound(PI / 3.0, 0.0).unwrap().lower + 1.0 / 3.0).abs() < 1e-15);
        assert!((lemma2_bound(PI / 4.0, 0.05).unwrap().lower + 0.6).abs() < 1e-15);
        assert!(lemma2_bound(PI / 2.0, 0.0).is_err());
    }

    #[test]
    fn lemma3_examples() {
        let a = lemma3_reflection_angles(0.3 * PI).unwrap();
        assert_eq!(a.len(), 2);
        assert!((a[0].theta_j - PI / 30.0).abs() < 1e-15);
        assert!((a[1].theta_j - 0.2 * PI).abs() < 1e-15);
        assert!(a.iter().all(|r| r.consistent));
        let a = lemma3_reflection_angles(PI / 3.0).unwrap();
        assert!(a[0].theta_j.abs() < 1e-15 && (a[1].theta_j - PI / 6.0).abs() < 1e-15);
        let a = lemma3_reflection_angles(0.45 * PI).unwrap();
        assert_eq!(a.len(), 1);
        assert!((a[0].theta_j - 0.05 * PI).abs() < 1e-15);
    }

    #[test]
    fn lemma3_sides_hold_on_a_grid() {
        for i in 1..500 {
            let t = PI / 2.0 * i as f64 / 500.0;
            for r in lemma3_reflection_angles(t).unwrap() {
                assert!(r.consistent, "theta {t}: {r:?}");
            }
        }
    }

    #[test]
    fn lemma4_examples() {
        assert!(lemma4_check(PI / 4.0, -0.5).unwrap());
        assert!(!lemma4_check(PI / 6.0, -(PI / 6.0).cos()).unwrap());
        assert!(lemma4_check(0.2 * PI, 0.0).unwrap());
        assert!(lemma4_check(PI / 3.0, 0.0).is_err());
    }

    #[test]
    fn lemma2_at_zero_gamma_is_at_least_as_tight_as_theorem1() {
        // 2·ceil(x/2) ≥ ceil(x), so −1 + 2/N ≥ −1 + 1/N'.
        for i in 1..2000 {
            let t = PI / 2.0 * i as f64 / 2000.0 - 1e-9;
            for g in [0.0, 0.1, 0.5, 1.0] {
                let l2 = lemma2_bound(t, g).unwrap().lower;
                let t1 = theorem1_bounds(t).unwrap().lower;
                assert!(l2 + 2.0 * g >= t1 - 1e-15, "theta {t}, gamma {g}");
            }
        }
    }

    #[test]
    fn mc_band_is_inconclusive_not_violated() {
        let r = theorem1_bounds(PI / 4.0).unwrap();
        assert_eq!(r.check(-0.501, Some(0.001)).status, BoundStatus::Inconclusive);
        assert_eq!(r.check(-0.6, Some(0.001)).status, BoundStatus::Violated);
        assert_eq!(r.check(-0.6, None).status, BoundStatus::Violated);
        assert!(r.check(-0.5, None).saturated);
    }

    #[test]
    fn catalogue_colourings_verify() {
        let grid: Vec<f64> = (1..=50).map(|i| PI / 2.0 * i as f64 / 50.0).collect();
        let opts = EngineOptions { plan: SamplingPlan::new(1, 20_000), tol: 1e-10 };
        for l in [CatalogueLabel::One, CatalogueLabel::Three] {
            let pair = ColouringPair::anticorrelated(Colouring::catalogue(l).unwrap()).unwrap();
            for m in [Method::ClosedForm, Method::Quadrature] {
                let r = verify_colouring(&pair, &grid, m, &opts).unwrap();
                assert!(r.all_satisfied(), "{:?}", r.witnesses());
                assert!(r.witnesses().is_empty());
            }
        }
        let pair = ColouringPair::anticorrelated(Colouring::catalogue(CatalogueLabel::One).unwrap()).unwrap();
        assert!(verify_colouring(&pair, &[0.0], Method::Quadrature, &opts).is_err());
    }

    #[test]
    fn violations_produce_witnesses() {
        let bad = CorrelationCurve::new(
            "synthetic",
            Method::ClosedForm,
            vec![crate::correlation::CurvePoint { theta: PI / 4.0, value: -0.9, stderr: None }],
        )
        .unwrap();
        let r = verify_curve(&bad).unwrap();
        assert!(r.any_violated());
        let w = r.witnesses();
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("synthetic") && w[0].contains("Violated"));
    }

    proptest! {
        #[test]
        fn theorem1_interval_contains_theta(t in 1e-3f64..(PI / 2.0 - 1e-9)) {
            let r = theorem1_bounds(t).unwrap();
            let n = r.n_chain.unwrap() as f64;
            prop_assert!(r.lower == -r.upper);
            prop_assert!(t >= PI / (2.0 * n) - 1e-12);
            prop_assert!(n == 2.0 || t < PI / (2.0 * (n - 1.0)));
        }
    }
}
