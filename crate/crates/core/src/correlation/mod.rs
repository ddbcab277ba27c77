//! Correlation functions `C(θ)` of colouring pairs.
//!
//! Three independent routes: Monte Carlo over random axis pairs, adaptive
//! quadrature of the azimuthally reduced integral, and the piecewise closed
//! forms of the catalogue. Curves are lists of `(θ, value, stderr)` points
//! and serialise to CSV.

pub mod azimuthal;
mod closed_form;
mod fallback;
mod mc;

use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use azimuthal::{band_correlation, chi, chi_with_tol, pair_correlation, PolarProfile};
pub use closed_form::{branch_name, closed_form};
pub use mc::{correlation_mc, gamma_of, GammaEstimate};

pub use crate::colourings::circle_correlation;
use crate::colourings::{CatalogueLabel, Colouring, ColouringPair};
use crate::error::{Error, Result};
use crate::quadrature::Integral;
use crate::sampling::SamplingPlan;
use crate::scalar::Real;
use fallback::AzimuthalHarmonic;

/// Overshoot of `[−1, 1]` tolerated (and clipped) from round-off.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mc,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
        }
    }

    fn rank(self) -> u8 {
        match self {
            Method::ClosedForm => 0,
            Method::Quadrature => 1,
            Method::Mc => 2,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(Method::Mc),
            "quadrature" => Ok(Method::Quadrature),
            "closed_form" | "closed-form" => Ok(Method::ClosedForm),
            _ => Err(Error::Parse(format!("unknown method '{s}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Named column of [`CorrelationCurve::write_csv_with`].
pub type ExtraColumn<'a, T> = (&'a str, &'a dyn Fn(T) -> Option<T>);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T> {
    pub theta: T,
    pub value: T,
    pub stderr: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve<T> {
    pub colouring_label: String,
    pub method: Method,
    points: Vec<CurvePoint<T>>,
}

impl<T: Real> CorrelationCurve<T> {
    /// Sorts points by `theta`, clips round-off outside `[−1, 1]` and rejects
    /// anything further out or non-finite.
    pub fn new(colouring_label: impl Into<String>, method: Method, mut points: Vec<CurvePoint<T>>) -> Result<Self> {
        let slack = T::lit(RANGE_SLACK);
        for p in &mut points {
            if !p.theta.is_finite() || !p.value.is_finite() || p.value.abs() > T::one() + slack {
                return Err(Error::domain("curve point", format!("theta {}, value {}", p.theta, p.value)));
            }
            if p.stderr.is_some_and(|s| !(s >= T::zero())) {
                return Err(Error::domain("curve point", "negative or NaN stderr"));
            }
            p.value = p.value.max(-T::one()).min(T::one());
        }
        points.sort_by(|a, b| a.theta.partial_cmp(&b.theta).expect("finite"));
        Ok(Self { colouring_label: colouring_label.into(), method, points })
    }

    pub fn points(&self) -> &[CurvePoint<T>] {
        &self.points
    }

    pub fn thetas(&self) -> Vec<T> {
        self.points.iter().map(|p| p.theta).collect()
    }

    pub fn values(&self) -> Vec<T> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Writes `theta_over_pi,value,stderr,method,colouring_label` rows with
    /// a header. `stderr` is empty for deterministic methods.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.write_csv_with(out, &[])
    }

    /// [`write_csv`](Self::write_csv) followed by one column per `extra`,
    /// each a function of θ in radians; `None` leaves the cell empty.
    pub fn write_csv_with<W: Write>(&self, out: W, extra: &[ExtraColumn<'_, T>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["theta_over_pi", "value", "stderr", "method", "colouring_label"];
        header.extend(extra.iter().map(|(name, _)| *name));
        w.write_record(&header).map_err(csv_err)?;
        for p in &self.points {
            let mut row = vec![
                format_g12((p.theta / T::PI()).as_f64()),
                format_g12(p.value.as_f64()),
                p.stderr.map(|s| format_g12(s.as_f64())).unwrap_or_default(),
                self.method.as_str().to_string(),
                self.colouring_label.clone(),
            ];
            row.extend(extra.iter().map(|(_, f)| f(p.theta).map(|v| format_g12(v.as_f64())).unwrap_or_default()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`write_csv`](Self::write_csv). Extra
    /// columns are ignored; all rows must share one method and label.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers().map_err(csv_err)?.clone();
        let col = |name: &str| {
            headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse(format!("missing column '{name}'")))
        };
        let (it, iv, is, im, il) = (col("theta_over_pi")?, col("value")?, col("stderr")?, col("method")?, col("colouring_label")?);
        let mut points = Vec::new();
        let mut meta: Option<(Method, String)> = None;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'")));
        for row in r.records() {
            let row = row.map_err(csv_err)?;
            let method: Method = row[im].parse()?;
            let label = row[il].to_string();
            match &meta {
                None => meta = Some((method, label)),
                Some((m, l)) if *m == method && *l == label => {}
                Some(_) => return Err(Error::Parse("mixed method or label in curve file".into())),
            }
            let stderr = if row[is].trim().is_empty() { None } else { Some(T::lit(num(&row[is])?)) };
            points.push(CurvePoint { theta: T::lit(num(&row[it])?) * T::PI(), value: T::lit(num(&row[iv])?), stderr });
        }
        let (method, label) = meta.ok_or_else(|| Error::Parse("empty curve file".into()))?;
        Self::new(label, method, points)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// `%.12g`: 12 significant digits, fixed or exponential by magnitude, with
/// trailing zeros removed.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn profile<T: Real>(c: &Colouring<T>) -> Result<Box<dyn PolarProfile<T> + '_>> {
    match c {
        Colouring::Band(b) => Ok(Box::new(b.clone())),
        Colouring::Harmonic(h) => Ok(Box::new(AzimuthalHarmonic::new(h)?)),
    }
}

/// Deterministic correlation of an azimuthally symmetric pair, θ ∈ [0, π].
pub fn pair_quadrature<T: Real>(pair: &ColouringPair<T>, theta: T, tol: T) -> Result<Integral<T>> {
    let (a, b) = (profile(&pair.alice)?, profile(&pair.bob)?);
    let mut r = pair_correlation(a.as_ref(), b.as_ref(), theta, tol)?;
    r.value = r.value.max(-T::one()).min(T::one());
    Ok(r)
}

/// Correlation of `c` with its colour swap by quadrature.
pub fn correlation_quadrature<T: Real>(c: &Colouring<T>, theta: T, tol: T) -> Result<Integral<T>> {
    pair_quadrature(&ColouringPair::anticorrelated(c.clone())?, theta, tol)
}

/// Closed form on `[0, π]`, using `C(π − θ) = −C(θ)` above π/2.
pub fn closed_form_full<T: Real>(label: &CatalogueLabel<T>, theta: T) -> Result<T> {
    let pi = T::PI();
    if theta > pi / T::lit(2.0) && theta <= pi {
        closed_form(label, pi - theta).map(|v| -v)
    } else {
        closed_form(label, theta)
    }
}

/// Monte Carlo curve. Every point uses the same plan, so neighbouring
/// points share random numbers and the curve is smooth in θ.
pub fn mc_curve<T: Real>(pair: &ColouringPair<T>, thetas: &[T], plan: &SamplingPlan) -> Result<CorrelationCurve<T>> {
    let points = thetas
        .iter()
        .map(|&theta| correlation_mc(pair, theta, plan).map(|e| CurvePoint { theta, value: e.value, stderr: Some(e.stderr) }))
        .collect::<Result<Vec<_>>>()?;
    CorrelationCurve::new(pair.label(), Method::Mc, points)
}

pub fn quadrature_curve<T: Real>(pair: &ColouringPair<T>, thetas: &[T], tol: T) -> Result<CorrelationCurve<T>> {
    let points = thetas
        .par_iter()
        .map(|&theta| pair_quadrature(pair, theta, tol).map(|r| CurvePoint { theta, value: r.value, stderr: None }))
        .collect::<Result<Vec<_>>>()?;
    CorrelationCurve::new(pair.label(), Method::Quadrature, points)
}

pub fn closed_form_curve<T: Real>(label: &CatalogueLabel<T>, thetas: &[T]) -> Result<CorrelationCurve<T>> {
    let points = thetas
        .par_iter()
        .map(|&theta| closed_form_full(label, theta).map(|value| CurvePoint { theta, value, stderr: None }))
        .collect::<Result<Vec<_>>>()?;
    CorrelationCurve::new(label.name(), Method::ClosedForm, points)
}

/// Settings shared by the three engines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EngineOptions<T> {
    pub plan: SamplingPlan,
    pub tol: T,
}

/// Curve by any method. The closed form needs an anticorrelated pair whose
/// colouring comes from the catalogue.
pub fn correlation_curve<T: Real>(
    pair: &ColouringPair<T>,
    thetas: &[T],
    method: Method,
    opts: &EngineOptions<T>,
) -> Result<CorrelationCurve<T>> {
    match method {
        Method::Mc => mc_curve(pair, thetas, &opts.plan),
        Method::Quadrature => quadrature_curve(pair, thetas, opts.tol),
        Method::ClosedForm => {
            let label = pair
                .alice
                .catalogue_label()
                .filter(|_| pair.is_anticorrelated())
                .ok_or_else(|| Error::domain("method", format!("no closed form for '{}'", pair.label())))?;
            closed_form_curve(&label, thetas)
        }
    }
}

/// Appends `(π − θ, −C(θ))` for every point below π/2.
pub fn extend_to_pi<T: Real>(curve: &CorrelationCurve<T>) -> Result<CorrelationCurve<T>> {
    let pi = T::PI();
    let half = pi / T::lit(2.0);
    if curve.points.iter().any(|p| p.theta < T::zero() || p.theta > half + T::clamp_tol()) {
        return Err(Error::domain("curve", "extend_to_pi needs points in [0, pi/2]"));
    }
    let mut points = curve.points.clone();
    for p in &curve.points {
        if p.theta < half - T::clamp_tol() {
            points.push(CurvePoint { theta: pi - p.theta, value: -p.value, stderr: p.stderr });
        }
    }
    CorrelationCurve::new(curve.colouring_label.clone(), curve.method, points)
}

/// Pointwise convex combination of curves on a shared grid.
///
/// The result takes the least exact method among the components and the
/// standard error `sqrt(Σ wᵢ² σᵢ²)` when any component has one.
pub fn mixture_correlation<T: Real>(components: &[(T, &CorrelationCurve<T>)]) -> Result<CorrelationCurve<T>> {
    let first = components.first().ok_or_else(|| Error::domain("mixture", "no components"))?.1;
    let total: T = components.iter().map(|c| c.0).sum();
    if components.iter().any(|c| !(c.0 >= T::zero())) || (total - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::domain("mixture weights", format!("must be non-negative and sum to 1, got sum {total}")));
    }
    let grid = first.thetas();
    for (_, c) in components {
        let same = c.points.len() == grid.len()
            && c.points.iter().zip(&grid).all(|(p, &t)| (p.theta - t).abs() <= T::clamp_tol());
        if !same {
            return Err(Error::domain("mixture", "curves do not share a theta grid"));
        }
    }
    let method = components.iter().map(|c| c.1.method).max_by_key(|m| m.rank()).expect("non-empty");
    let points = (0..grid.len())
        .map(|i| {
            let value = components.iter().map(|(w, c)| *w * c.points[i].value).sum();
            let any_err = components.iter().any(|(_, c)| c.points[i].stderr.is_some());
            let stderr = any_err.then(|| {
                components
                    .iter()
                    .map(|(w, c)| {
                        let s = c.points[i].stderr.unwrap_or_else(T::zero);
                        *w * *w * s * s
                    })
                    .sum::<T>()
                    .sqrt()
            });
            CurvePoint { theta: grid[i], value, stderr }
        })
        .collect();
    let label = components
        .iter()
        .map(|(w, c)| format!("{}*{}", w.as_f64(), c.colouring_label))
        .collect::<Vec<_>>()
        .join("+");
    CorrelationCurve::new(label, method, points)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..=n).map(|i| PI / 2.0 * i as f64 / n as f64).collect()
    }

    #[test]
    fn g12_formatting() {
        assert_eq!(format_g12(0.5), "0.5");
        assert_eq!(format_g12(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(format_g12(1e-7), "1e-07");
        assert_eq!(format_g12(1.234e-5), "1.234e-05");
        assert_eq!(format_g12(123456.0), "123456");
        assert_eq!(format_g12(2.0f64.sqrt() * 1e13), "1.41421356237e+13");
        assert_eq!(format_g12(0.0), "0");
    }

    #[test]
    fn csv_round_trip() {
        let c = closed_form_curve(&CatalogueLabel::Three, &grid(10)).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("theta_over_pi,value,stderr,method,colouring_label\n"));
        let back = CorrelationCurve::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.method, Method::ClosedForm);
        for (a, b) in back.points().iter().zip(c.points()) {
            assert!((a.value - b.value).abs() < 1e-11);
            assert!((a.theta - b.theta).abs() < 1e-11);
        }
    }

    #[test]
    fn extension_uses_antisymmetry() {
        let c = closed_form_curve(&CatalogueLabel::One, &grid(4)).unwrap();
        let e = extend_to_pi(&c).unwrap();
        assert_eq!(e.points().len(), 9);
        let at = |t: f64| e.points().iter().find(|p| (p.theta - t).abs() < 1e-12).unwrap().value;
        assert!((at(3.0 * PI / 4.0) - 0.5).abs() < 1e-15);
        assert_eq!(at(PI / 2.0), 0.0);
        let wide = closed_form_curve(&CatalogueLabel::One, &[0.1, 2.0]).unwrap();
        assert!(extend_to_pi(&wide).is_err());
    }

    #[test]
    fn mixtures() {
        let g = grid(8);
        let one = closed_form_curve(&CatalogueLabel::One, &g).unwrap();
        let three = closed_form_curve(&CatalogueLabel::Three, &g).unwrap();
        assert_eq!(mixture_correlation(&[(1.0, &one)]).unwrap().values(), one.values());
        let m = mixture_correlation(&[(0.3, &one), (0.7, &three)]).unwrap();
        for (i, p) in m.points().iter().enumerate() {
            assert!((p.value - (0.3 * one.values()[i] + 0.7 * three.values()[i])).abs() < 1e-12);
        }
        assert!(mixture_correlation(&[(0.5, &one), (0.4, &three)]).is_err());
        assert!(mixture_correlation(&[(1.5, &one), (-0.5, &three)]).is_err());
        let short = closed_form_curve(&CatalogueLabel::One, &g[..3]).unwrap();
        assert!(mixture_correlation(&[(0.5, &one), (0.5, &short)]).is_err());
    }

    #[test]
    fn half_pair_and_swap_cancel() {
        let c = Colouring::catalogue(CatalogueLabel::One).unwrap();
        let pair = ColouringPair::anticorrelated(c).unwrap();
        let plan = SamplingPlan::new(3, 20_000);
        let g = grid(5);
        let a = mc_curve(&pair, &g, &plan).unwrap();
        let b = mc_curve(&pair.bob_flipped(), &g, &plan).unwrap();
        let m = mixture_correlation(&[(0.5, &a), (0.5, &b)]).unwrap();
        assert!(m.values().iter().all(|v| v.abs() < 1e-15));
        assert_eq!(m.method, Method::Mc);
    }

    #[test]
    fn quadrature_examples() {
        let one = Colouring::catalogue(CatalogueLabel::One).unwrap();
        assert!((correlation_quadrature(&one, PI / 3.0, 1e-8).unwrap().value + 1.0 / 3.0).abs() < 1e-8);
        let two = Colouring::catalogue(CatalogueLabel::Two).unwrap();
        assert!(correlation_quadrature(&two, PI / 2.0, 1e-8).unwrap().value.abs() < 1e-8);
    }

    #[test]
    fn colouring_three_quadrature_vs_mc() {
        let three = Colouring::catalogue(CatalogueLabel::Three).unwrap();
        let q = correlation_quadrature(&three, 0.45 * PI, 1e-10).unwrap().value;
        let pair = ColouringPair::anticorrelated(three).unwrap();
        let e = correlation_mc(&pair, 0.45 * PI, &SamplingPlan::new(21, 2_000_000)).unwrap();
        assert!(e.agrees_with(q, 3.0), "{q} vs {e:?}");
    }

    #[test]
    fn closed_form_full_reflects() {
        let l = CatalogueLabel::Three;
        let v = closed_form_full(&l, 0.6 * PI).unwrap();
        assert!((v + closed_form(&l, 0.4 * PI).unwrap()).abs() < 1e-15);
    }
}
