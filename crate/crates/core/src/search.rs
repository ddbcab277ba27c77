//! Crossing angles between correlation curves, parameter sweeps over the
//! one-parameter band families, the slope at π/2 and a search over
//! truncated spherical-harmonic colourings.

use rayon::prelude::*;
use serde::Serialize;

use crate::colourings::{CatalogueLabel, Colouring, ColouringPair, HarmonicTerm, OddBasis};
use crate::correlation::{correlation_mc, pair_quadrature};
use crate::error::{Error, Result};
use crate::geometry::sample_axis_pair;
use crate::quantum::singlet_correlation;
use crate::sampling::{mix64, stream_rng, stream_seed, Estimate, SamplingPlan};
use crate::scalar::Real;

/// Points on the scan grid before bisection.
pub const SCAN_POINTS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrossingResult<T> {
    pub theta_star: T,
    /// Sign of `f − g` just below `theta_star`.
    pub left_sign: i8,
    pub bracket_width: T,
}

/// Smallest crossing of `f` and `g` in `[lo, hi]`. Values of `f − g` within
/// `1e-12` of zero count as no sign, so touching endpoints are ignored.
pub fn find_crossing<T, F, G>(f: F, g: G, lo: T, hi: T, tol: T) -> Result<CrossingResult<T>>
where
    T: Real,
    F: Fn(T) -> Result<T> + Sync,
    G: Fn(T) -> Result<T> + Sync,
{
    if !(lo < hi) || !(tol > T::zero()) {
        return Err(Error::domain("crossing range", format!("[{lo}, {hi}] with tol {tol}")));
    }
    let d = |x: T| -> Result<T> { Ok(f(x)? - g(x)?) };
    let sign = |v: T| -> i8 {
        if v.abs() <= T::lit(1e-12) {
            0
        } else if v > T::zero() {
            1
        } else {
            -1
        }
    };
    let step = (hi - lo) / T::lit(SCAN_POINTS as f64);
    let grid: Vec<T> = (0..=SCAN_POINTS).map(|i| if i == SCAN_POINTS { hi } else { lo + step * T::lit(i as f64) }).collect();
    let values = grid.par_iter().map(|&x| d(x)).collect::<Result<Vec<T>>>()?;

    let mut last: Option<(T, i8)> = None;
    let mut bracket = None;
    for (&x, &v) in grid.iter().zip(&values) {
        let s = sign(v);
        if s == 0 {
            continue;
        }
        if let Some((xl, sl)) = last {
            if sl != s {
                bracket = Some((xl, x, sl));
                break;
            }
        }
        last = Some((x, s));
    }
    let (mut a, mut b, left_sign) =
        bracket.ok_or(Error::NoCrossing { lo: lo.as_f64(), hi: hi.as_f64() })?;
    while b - a > tol {
        let m = (a + b) / T::lit(2.0);
        match sign(d(m)?) {
            0 => {
                a = m;
                b = m;
            }
            s if s == left_sign => a = m,
            _ => b = m,
        }
    }
    Ok(CrossingResult { theta_star: (a + b) / T::lit(2.0), left_sign, bracket_width: b - a })
}

/// Curve a crossing is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// `C_1(θ) = −1 + 2θ/π`.
    C1,
    /// `−C_1(θ)`, the upper edge of the hemispherical band.
    MinusC1,
    /// `−cos θ`.
    Singlet,
}

impl Reference {
    pub fn value<T: Real>(self, theta: T) -> T {
        let c1 = -T::one() + T::lit(2.0) * theta / T::PI();
        match self {
            Reference::C1 => c1,
            Reference::MinusC1 => -c1,
            Reference::Singlet => singlet_correlation(theta),
        }
    }
}

/// Correlation of a catalogue colouring against its colour swap.
pub fn catalogue_curve<T: Real>(label: CatalogueLabel<T>, tol: T) -> Result<impl Fn(T) -> Result<T> + Sync> {
    let pair = ColouringPair::anticorrelated(Colouring::catalogue(label)?)?;
    Ok(move |theta: T| pair_quadrature(&pair, theta, tol).map(|r| r.value))
}

/// Crossing of a catalogue colouring with a reference curve in `[lo, hi]`.
pub fn catalogue_crossing<T: Real>(label: CatalogueLabel<T>, reference: Reference, lo: T, hi: T, tol: T) -> Result<CrossingResult<T>> {
    let f = catalogue_curve(label, tol * T::lit(1e-4))?;
    find_crossing(f, |t| Ok(reference.value(t)), lo, hi, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub delta: T,
    pub crossing: Option<CrossingResult<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable<T> {
    pub reference: Reference,
    pub rows: Vec<SweepRow<T>>,
    /// Index of the row with the smallest crossing.
    pub argmin: Option<usize>,
}

impl<T: Real> SweepTable<T> {
    pub fn best(&self) -> Option<(T, CrossingResult<T>)> {
        self.argmin.and_then(|i| self.rows[i].crossing.map(|c| (self.rows[i].delta, c)))
    }
}

/// Scan range of every sweep, which contains all crossings of the band
/// families against the reference curves.
pub fn sweep_range<T: Real>() -> (T, T) {
    (T::lit(0.25) * T::PI(), T::lit(0.5) * T::PI())
}

/// Smallest crossing of the family member at each parameter value with
/// `reference`. Rows without a crossing have `crossing: None`.
pub fn sweep_family<T, F>(family: F, params: &[T], reference: Reference, tol: T) -> Result<SweepTable<T>>
where
    T: Real,
    F: Fn(T) -> CatalogueLabel<T>,
{
    let (lo, hi) = sweep_range::<T>();
    let mut rows = Vec::with_capacity(params.len());
    for &delta in params {
        let crossing = match catalogue_crossing(family(delta), reference, lo, hi, tol) {
            Ok(c) => Some(c),
            Err(Error::NoCrossing { .. }) => None,
            Err(e) => return Err(e),
        };
        rows.push(SweepRow { delta, crossing });
    }
    let mut argmin: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        if let Some(c) = r.crossing {
            if argmin.and_then(|j| rows[j].crossing).is_none_or(|b| c.theta_star < b.theta_star) {
                argmin = Some(i);
            }
        }
    }
    Ok(SweepTable { reference, rows, argmin })
}

/// [`sweep_family`] over `3_δ`, δ ∈ [−π/18, π/24].
pub fn sweep_delta<T: Real>(deltas: &[T], reference: Reference, tol: T) -> Result<SweepTable<T>> {
    sweep_family(CatalogueLabel::ThreeDelta, deltas, reference, tol)
}

/// [`sweep_family`] over `2_Δ`, Δ ∈ [0, π/12].
pub fn sweep_big_delta<T: Real>(deltas: &[T], reference: Reference, tol: T) -> Result<SweepTable<T>> {
    sweep_family(CatalogueLabel::TwoDelta, deltas, reference, tol)
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * T::lit(i as f64) / T::lit((count - 1) as f64) })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness<T> {
    pub colouring: String,
    /// Bound of `[C_1, −C_1]` that the colouring crosses.
    pub reference: Reference,
    pub theta_star: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaMaxEstimate<T> {
    pub upper_bound_w: T,
    pub witness_w: Witness<T>,
    pub upper_bound_s: T,
    pub witness_s: Witness<T>,
    /// Every crossing found, in search order.
    pub witnesses: Vec<Witness<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMaxOptions<T> {
    /// `3_δ` parameters; empty skips the sweep.
    pub three_delta: Vec<T>,
    /// `2_Δ` parameters; empty skips the sweep.
    pub two_delta: Vec<T>,
    pub tol: T,
}

impl<T: Real> ThetaMaxOptions<T> {
    pub fn catalogue_only(tol: T) -> Self {
        Self { three_delta: Vec::new(), two_delta: Vec::new(), tol }
    }
}

/// Upper bounds on the largest angle up to which no γ = 0 colouring leaves
/// the hemispherical band: `w` counts only drops below `C_1`, `s` counts
/// exits on either side.
pub fn estimate_theta_max<T: Real>(opts: &ThetaMaxOptions<T>) -> Result<ThetaMaxEstimate<T>> {
    let (lo, hi) = sweep_range::<T>();
    let mut labels = vec![CatalogueLabel::Two, CatalogueLabel::Three, CatalogueLabel::Four];
    labels.extend(opts.three_delta.iter().map(|&d| CatalogueLabel::ThreeDelta(d)));
    labels.extend(opts.two_delta.iter().map(|&d| CatalogueLabel::TwoDelta(d)));

    let found = labels
        .par_iter()
        .map(|&label| {
            let mut out = Vec::new();
            for reference in [Reference::C1, Reference::MinusC1] {
                match catalogue_crossing(label, reference, lo, hi, opts.tol) {
                    Ok(c) => out.push(Witness { colouring: label.name(), reference, theta_star: c.theta_star }),
                    Err(Error::NoCrossing { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let witnesses: Vec<Witness<T>> = found.into_iter().flatten().collect();

    let smallest = |pred: &dyn Fn(&Witness<T>) -> bool| {
        witnesses
            .iter()
            .filter(|w| pred(w))
            .fold(None::<&Witness<T>>, |best, w| match best {
                Some(b) if b.theta_star <= w.theta_star => Some(b),
                _ => Some(w),
            })
            .cloned()
    };
    let w = smallest(&|w| w.reference == Reference::C1)
        .ok_or(Error::NoCrossing { lo: lo.as_f64(), hi: hi.as_f64() })?;
    let s = smallest(&|_| true).ok_or(Error::NoCrossing { lo: lo.as_f64(), hi: hi.as_f64() })?;
    Ok(ThetaMaxEstimate {
        upper_bound_w: w.theta_star,
        witness_w: w,
        upper_bound_s: s.theta_star,
        witness_s: s,
        witnesses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeEstimate<T> {
    /// `dC(π/2 − τ)/dτ` at `τ = 0`.
    pub slope: T,
    /// `C(π/2)`, checked to vanish.
    pub c_half: T,
    pub h: T,
    /// Exact slope magnitude when one is known.
    pub reference: Option<T>,
}

/// Exact slope magnitude of colouring 3 at π/2.
pub fn colouring_three_slope<T: Real>() -> T {
    (T::lit(6.0) - T::lit(4.0) * (T::lit(3.0).sqrt() - T::lit(2.0).sqrt())) / T::PI()
}

/// Slope of `C(π/2 − τ)` at `τ = 0` from central differences at `h` and
/// `2h`. Band edges make `C` behave like `sτ + aτ^{3/2}` near π/2, so the
/// extrapolation removes a `√h` term from the difference quotient.
pub fn slope_at_half_pi<T: Real>(pair: &ColouringPair<T>, h: T, tol: T) -> Result<SlopeEstimate<T>> {
    let half = T::PI() / T::lit(2.0);
    if !(h > T::zero() && T::lit(2.0) * h < half) {
        return Err(Error::domain("step", format!("{h} outside (0, pi/4)")));
    }
    let c = |theta: T| pair_quadrature(pair, theta, tol).map(|r| r.value);
    let c_half = c(half)?;
    if c_half.abs() > T::lit(1e-8) {
        return Err(Error::domain("colouring", format!("C(pi/2) = {c_half} is not zero")));
    }
    let central = |t: T| -> Result<T> { Ok((c(half - t)? - c(half + t)?) / (T::lit(2.0) * t)) };
    let (d1, d2) = (central(h)?, central(T::lit(2.0) * h)?);
    let r = T::lit(2.0).sqrt();
    let slope = (r * d1 - d2) / (r - T::one());
    let reference = match pair.alice.catalogue_label() {
        Some(CatalogueLabel::Three) if pair.is_anticorrelated() => Some(colouring_three_slope()),
        Some(CatalogueLabel::One) if pair.is_anticorrelated() => Some(T::lit(2.0) / T::PI()),
        _ => None,
    };
    Ok(SlopeEstimate { slope, c_half, h, reference })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub iterations: usize,
    /// Random pairs per objective evaluation, and the seed family.
    pub plan: SamplingPlan,
}

impl SearchOptions {
    pub fn new(plan: SamplingPlan) -> Self {
        Self { restarts: 16, iterations: 400, plan }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome<T> {
    pub theta_over_pi: T,
    #[serde(rename = "L_max")]
    pub l_max: u32,
    /// Unit-norm coefficients.
    pub best_coefficients: Vec<HarmonicTerm<T>>,
    /// `C_x(θ)` of the winner, re-estimated on ten times as many fresh pairs.
    pub objective: T,
    pub objective_stderr: T,
    /// Value the optimiser saw on its own sample set.
    pub search_objective: T,
    pub evaluations: u64,
    pub seed: u64,
    pub restart: usize,
}

impl<T: Real> SearchOutcome<T> {
    pub fn estimate(&self) -> Estimate<T> {
        Estimate { value: self.objective, stderr: self.objective_stderr, n: 0 }
    }

    pub fn colouring(&self) -> Result<Colouring<T>> {
        crate::colourings::HarmonicColouring::new(self.best_coefficients.iter().copied()).map(Colouring::Harmonic)
    }
}

/// Basis values at both ends of a fixed set of axis pairs.
struct PairSample<T> {
    k: usize,
    alice: Vec<T>,
    bob: Vec<T>,
}

impl<T: Real> PairSample<T> {
    fn draw(basis: &OddBasis, theta: T, plan: &SamplingPlan) -> Result<Self> {
        plan.validate()?;
        let k = basis.len();
        let chunks = (0..plan.n_chunks())
            .into_par_iter()
            .map(|c| {
                let mut rng = stream_rng(plan.master_seed, c);
                let len = (plan.n_samples - c * plan.chunk_size).min(plan.chunk_size) as usize;
                let (mut a, mut b) = (Vec::with_capacity(len * k), Vec::with_capacity(len * k));
                let mut buf = Vec::with_capacity(k);
                for _ in 0..len {
                    let p = sample_axis_pair(theta, &mut rng)?;
                    basis.evaluate(p.a.epsilon().cos(), p.a.phi(), &mut buf);
                    a.extend_from_slice(&buf);
                    basis.evaluate(p.b.epsilon().cos(), p.b.phi(), &mut buf);
                    b.extend_from_slice(&buf);
                }
                Ok((a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        let (mut alice, mut bob) = (Vec::new(), Vec::new());
        for (a, b) in chunks {
            alice.extend(a);
            bob.extend(b);
        }
        Ok(Self { k, alice, bob })
    }

    /// Mean of `sgn(x·Y(a)) · (−sgn(x·Y(b)))`.
    fn correlation(&self, x: &[T]) -> T {
        let dot = |row: &[T]| row.iter().zip(x).map(|(&y, &c)| y * c).sum::<T>();
        let n = self.alice.len() / self.k;
        let total: i64 = self
            .alice
            .chunks_exact(self.k)
            .zip(self.bob.chunks_exact(self.k))
            .map(|(a, b)| {
                let s = crate::colourings::HarmonicColouring::sign_of(dot(a)) * crate::colourings::HarmonicColouring::sign_of(dot(b));
                -(s as i64)
            })
            .sum();
        T::lit(total as f64 / n as f64)
    }
}

/// Minimises `f` from `x0` with the Nelder–Mead simplex method. Returns the
/// best vertex, its value and the evaluation count.
pub fn nelder_mead<T: Real>(f: impl Fn(&[T]) -> T, x0: &[T], step: T, iterations: usize) -> (Vec<T>, T, u64) {
    let n = x0.len();
    let mut evals = 0u64;
    let mut eval = |x: &[T]| {
        evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] = x[i] + step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<T>, T)>| s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (two, half) = (T::lit(2.0), T::lit(0.5));
    for _ in 0..iterations {
        order(&mut simplex);
        if simplex[n].1 - simplex[0].1 <= T::zero() && simplex_size(&simplex) < T::lit(1e-10) {
            break;
        }
        let centroid: Vec<T> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v.0[j]).sum::<T>() / T::lit(n as f64))
            .collect();
        let along = |t: T| -> Vec<T> { centroid.iter().zip(&simplex[n].0).map(|(&c, &w)| c + t * (c - w)).collect() };
        let xr = along(T::one());
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(two);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let x = along(half);
                let v = eval(&x);
                (x, v.min(fr))
            } else {
                let x = along(-half);
                let v = eval(&x);
                (x, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = best.iter().zip(&v.0).map(|(&b, &x)| b + half * (x - b)).collect();
                    v.1 = eval(&v.0);
                }
            }
        }
    }
    order(&mut simplex);
    let (x, v) = simplex.swap_remove(0);
    (x, v, evals)
}

fn simplex_size<T: Real>(s: &[(Vec<T>, T)]) -> T {
    s[1..]
        .iter()
        .map(|v| v.0.iter().zip(&s[0].0).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max))
        .fold(T::zero(), T::max)
}

/// Minimises the correlation at `theta` of `sgn(Σ a_lm Y_lm)` against its
/// colour swap over odd `l <= l_max`. Each restart starts from a uniformly
/// random point of `[−1, 1]^K` and keeps one set of random pairs throughout.
pub fn harmonic_search<T: Real>(theta: T, l_max: u32, opts: &SearchOptions) -> Result<SearchOutcome<T>> {
    if l_max % 2 == 0 {
        return Err(Error::domain("L_max", format!("{l_max} is not odd")));
    }
    if !(theta > T::zero() && theta < T::PI() / T::lit(2.0)) {
        return Err(Error::domain("theta", format!("{theta} outside (0, pi/2)")));
    }
    if opts.restarts == 0 {
        return Err(Error::domain("restarts", "at least one restart is needed"));
    }
    let basis = OddBasis::new(l_max);
    let seed = opts.plan.master_seed;
    let runs = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let plan = opts.plan.reseeded(stream_seed(seed ^ 0x5EA5_C4ED, r as u64));
            let sample = PairSample::draw(&basis, theta, &plan)?;
            let mut rng = stream_rng(plan.master_seed, u64::MAX);
            let x0: Vec<T> = (0..basis.len()).map(|_| T::lit(rand::Rng::random_range(&mut rng, -1.0..=1.0))).collect();
            let (x, v, evals) = nelder_mead(|x| sample.correlation(x), &x0, T::lit(0.5), opts.iterations);
            Ok((x, v, evals))
        })
        .collect::<Result<Vec<_>>>()?;

    let evaluations = runs.iter().map(|r| r.2).sum();
    let mut winner = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.1 < runs[winner].1 {
            winner = i;
        }
    }
    let (x, search_objective, _) = &runs[winner];
    let norm = x.iter().map(|&c| c * c).sum::<T>().sqrt();
    if !(norm > T::zero()) {
        return Err(Error::domain("search", "optimiser collapsed to the zero vector"));
    }
    let unit: Vec<T> = x.iter().map(|&c| c / norm).collect();
    let colouring = Colouring::Harmonic(basis.colouring(&unit)?);
    let check = SamplingPlan { n_samples: opts.plan.n_samples * 10, ..opts.plan.reseeded(mix64(seed ^ 0x0E7A)) };
    let est = correlation_mc(&ColouringPair::anticorrelated(colouring)?, theta, &check)?;
    Ok(SearchOutcome {
        theta_over_pi: theta / T::PI(),
        l_max,
        best_coefficients: basis
            .pairs()
            .iter()
            .zip(&unit)
            .map(|(&(l, m), &coefficient)| HarmonicTerm { l, m, coefficient })
            .collect(),
        objective: est.value,
        objective_stderr: est.stderr,
        search_objective: *search_objective,
        evaluations,
        seed,
        restart: winner,
    })
}
