use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use antipodal::bounds::{theorem1_bounds, verify_colouring, verify_curve};
use antipodal::colourings::ColouringDescription;
use antipodal::correlation::{correlation_curve, format_g12, quadrature_curve, EngineOptions, ExtraColumn, Method};
use antipodal::quantum::{mc_quantum_correlation, singlet_correlation, twirl, werner_correlation, TwoQubitState};
use antipodal::search::{harmonic_search, slope_at_half_pi, sweep_family, Reference, SearchOptions};
use antipodal::{CatalogueLabel, Colouring, ColouringPair, CorrelationCurve, CurvePoint, SamplingPlan};
use serde::Serialize;

use crate::args::{Cli, Command, CurveArgs, QuantumArgs, SearchArgs, SlopeArgs, SweepArgs, VerifyArgs};
use crate::config::{parse_count, parse_grid, parse_seed, parse_values, FileConfig};
use crate::Failure;

const DEFAULT_SEED: u64 = 0x42D;
const DEFAULT_N: u64 = 1_000_000;
const DEFAULT_SEARCH_N: u64 = 20_000;
const DEFAULT_TOL: f64 = 1e-8;

struct Context {
    file: FileConfig,
    seed: u64,
    n: Option<u64>,
    tol: Option<f64>,
    output: Option<PathBuf>,
}

impl Context {
    fn plan(&self) -> SamplingPlan {
        SamplingPlan::new(self.seed, self.n.unwrap_or(DEFAULT_N))
    }

    fn engine(&self) -> EngineOptions<f64> {
        EngineOptions { plan: self.plan(), tol: self.tol.unwrap_or(DEFAULT_TOL) }
    }

    fn emit(&self, bytes: &[u8]) -> Result<(), Failure> {
        write_to(self.output.as_deref(), bytes)
    }
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = match cli.seed.clone().or(file.seed_text()) {
        Some(s) => parse_seed(&s)?,
        None => DEFAULT_SEED,
    };
    let n = cli.n.clone().or(file.n_text()).map(|s| parse_count(&s)).transpose()?;
    let tol = cli.tol.or(file.tol);
    if tol.is_some_and(|t| !(t > 0.0)) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let jobs = cli.jobs.or(file.jobs);
    let ctx = Context { output: cli.output.clone().or(file.output.clone()), file, seed, n, tol };

    let go = || match &cli.command {
        Command::Curve(a) => curve(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
        Command::Search(a) => search(&ctx, a),
        Command::Quantum(a) => quantum(&ctx, a),
        Command::Slope(a) => slope(&ctx, a),
    };
    match jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(go),
        None => go(),
    }
}

fn required(flag: Option<&String>, file: Option<&String>, name: &str) -> Result<String, Failure> {
    flag.or(file).cloned().ok_or_else(|| Failure::Usage(format!("--{name} is required")))
}

/// Catalogue label, or a path to a colouring description file.
fn load_colouring(spec: &str) -> Result<Colouring, Failure> {
    let path = Path::new(spec);
    let d = if path.is_file() { ColouringDescription::from_path(path)? } else { ColouringDescription::from_label(spec)? };
    Ok(d.build()?)
}

/// Quadrature for anything azimuthal, Monte Carlo otherwise.
fn method_for(choice: Option<&String>, pair: &ColouringPair) -> Result<Method, Failure> {
    match choice {
        Some(m) => Ok(m.parse()?),
        None if pair.alice.is_azimuthal() && pair.bob.is_azimuthal() => Ok(Method::Quadrature),
        None => Ok(Method::Mc),
    }
}

fn radians(grid_over_pi: &[f64]) -> Vec<f64> {
    grid_over_pi.iter().map(|t| t * PI).collect()
}

fn c1(theta: f64) -> f64 {
    -1.0 + 2.0 * theta / PI
}

fn curve_csv(curve: &CorrelationCurve, extra: &[ExtraColumn<'_, f64>]) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    curve.write_csv_with(&mut buf, extra)?;
    Ok(buf)
}

fn curve(ctx: &Context, a: &CurveArgs) -> Result<(), Failure> {
    let spec = required(a.colouring.as_ref(), ctx.file.colouring.as_ref(), "colouring")?;
    let pair = ColouringPair::anticorrelated(load_colouring(&spec)?)?;
    let method = method_for(a.method.as_ref().or(ctx.file.method.as_ref()), &pair)?;
    let grid = parse_grid(a.grid.as_ref().or(ctx.file.grid.as_ref()).map_or("0:0.5:101", |s| s))?;
    let curve = correlation_curve(&pair, &radians(&grid), method, &ctx.engine())?;

    let c1_col = |t: f64| Some(c1(t));
    let minus_c1 = |t: f64| Some(-c1(t));
    let q = |t: f64| Some(singlet_correlation(t));
    let lower = |t: f64| theorem1_bounds(t).ok().map(|b| b.lower);
    let upper = |t: f64| theorem1_bounds(t).ok().map(|b| b.upper);
    let extra: [ExtraColumn<'_, f64>; 5] = [
        ("C1", &c1_col),
        ("minus_C1", &minus_c1),
        ("Q", &q),
        ("theorem1_lower", &lower),
        ("theorem1_upper", &upper),
    ];
    ctx.emit(&curve_csv(&curve, &extra)?)
}

fn verify(ctx: &Context, a: &VerifyArgs) -> Result<(), Failure> {
    let report = match a.curve.as_ref().or(ctx.file.curve.as_ref()).filter(|_| a.colouring.is_none()) {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let curve = CorrelationCurve::read_csv(file)?;
            // The chained bounds are only stated on (0, π/2].
            let inside: Vec<CurvePoint> =
                curve.points().iter().copied().filter(|p| p.theta > 0.0 && p.theta <= PI / 2.0 + 1e-12).collect();
            if inside.len() < curve.points().len() {
                eprintln!("skipping {} points outside (0, 0.5]pi", curve.points().len() - inside.len());
            }
            verify_curve(&CorrelationCurve::new(curve.colouring_label.clone(), curve.method, inside)?)?
        }
        None => {
            let spec = required(a.colouring.as_ref(), ctx.file.colouring.as_ref(), "colouring or --curve")?;
            let pair = ColouringPair::anticorrelated(load_colouring(&spec)?)?;
            let method = method_for(a.method.as_ref().or(ctx.file.method.as_ref()), &pair)?;
            let grid = parse_grid(a.grid.as_ref().or(ctx.file.grid.as_ref()).map_or("0.005:0.5:100", |s| s))?;
            verify_colouring(&pair, &radians(&grid), method, &ctx.engine())?
        }
    };
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| Failure::Numerical(e.to_string()))?;
    json.push(b'\n');
    ctx.emit(&json)?;
    for w in report.witnesses() {
        eprintln!("{w}");
    }
    if report.any_violated() {
        return Err(Failure::Violation(format!("{}: bound violated", report.colouring)));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Family {
    ThreeDelta,
    TwoDelta,
}

impl Family {
    fn parse(s: &str) -> Result<Self, Failure> {
        match s {
            "3_delta" => Ok(Family::ThreeDelta),
            "2_Delta" | "2_delta" => Ok(Family::TwoDelta),
            _ => Err(Failure::Usage(format!("unknown family '{s}' (3_delta or 2_Delta)"))),
        }
    }

    fn label(self, d: f64) -> CatalogueLabel {
        match self {
            Family::ThreeDelta => CatalogueLabel::ThreeDelta(d),
            Family::TwoDelta => CatalogueLabel::TwoDelta(d),
        }
    }

    fn base(self) -> (CatalogueLabel, &'static str) {
        match self {
            Family::ThreeDelta => (CatalogueLabel::Three, "C_3"),
            Family::TwoDelta => (CatalogueLabel::Two, "C_2"),
        }
    }

    fn column(self, d_over_pi: f64) -> String {
        match self {
            Family::ThreeDelta => format!("C_3_delta({})", format_g12(d_over_pi)),
            Family::TwoDelta => format!("C_2_Delta({})", format_g12(d_over_pi)),
        }
    }

    fn default_grid(self) -> &'static str {
        match self {
            Family::ThreeDelta => "-0.055:0.041:97",
            Family::TwoDelta => "0:0.08:81",
        }
    }
}

fn parse_reference(s: &str) -> Result<Reference, Failure> {
    match s {
        "c1" | "C1" => Ok(Reference::C1),
        "minus_c1" | "-c1" => Ok(Reference::MinusC1),
        "singlet" | "q" | "Q" => Ok(Reference::Singlet),
        _ => Err(Failure::Usage(format!("unknown reference '{s}' (c1, minus_c1 or singlet)"))),
    }
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Usage(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Failure::Usage(e.to_string()))
}

fn sweep(ctx: &Context, a: &SweepArgs) -> Result<(), Failure> {
    let family = Family::parse(a.family.as_deref().or(ctx.file.family.as_deref()).unwrap_or("3_delta"))?;
    let deltas_over_pi = parse_values(&a.delta.clone().or(ctx.file.delta_text()).unwrap_or_else(|| family.default_grid().into()))?;
    let reference = parse_reference(a.reference.as_deref().or(ctx.file.reference.as_deref()).unwrap_or("c1"))?;
    let tol = ctx.tol.unwrap_or(DEFAULT_TOL);
    let f = |d: f64| family.label(d);
    let table = sweep_family(f, &radians(&deltas_over_pi), reference, tol)?;

    let header: Vec<String> =
        ["delta_over_pi", "theta_star_over_pi", "bracket_width_over_pi", "left_sign"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .zip(&deltas_over_pi)
        .map(|(r, d)| match r.crossing {
            Some(c) => vec![
                format_g12(*d),
                format_g12(c.theta_star / PI),
                format_g12(c.bracket_width / PI),
                c.left_sign.to_string(),
            ],
            None => vec![format_g12(*d), String::new(), String::new(), String::new()],
        })
        .collect();
    ctx.emit(&csv_bytes(&header, &rows)?)?;
    match table.argmin {
        Some(i) => eprintln!(
            "smallest crossing: delta = {}pi, theta* = {}pi",
            format_g12(deltas_over_pi[i]),
            format_g12(table.rows[i].crossing.expect("argmin row has a crossing").theta_star / PI)
        ),
        None => eprintln!("no crossing found for any parameter value"),
    }

    if let Some(path) = a.curves.as_ref().or(ctx.file.curves.as_ref()) {
        let grid = parse_grid(a.grid.as_ref().or(ctx.file.grid.as_ref()).map_or("0:0.5:101", |s| s))?;
        let thetas = radians(&grid);
        let mut labels: Vec<(String, CatalogueLabel)> =
            deltas_over_pi.iter().map(|&d| (family.column(d), family.label(d * PI))).collect();
        let (base, name) = family.base();
        labels.push((name.into(), base));
        let mut columns = Vec::with_capacity(labels.len());
        for (_, label) in &labels {
            let pair = ColouringPair::anticorrelated(Colouring::catalogue(*label)?)?;
            columns.push(quadrature_curve(&pair, &thetas, tol)?.values());
        }
        let mut header = vec!["theta_over_pi".to_string()];
        header.extend(labels.iter().map(|(n, _)| n.clone()));
        header.extend(["C_1", "minus_C_1", "Q"].map(String::from));
        let rows: Vec<Vec<String>> = thetas
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let mut r = vec![format_g12(grid[i])];
                r.extend(columns.iter().map(|c| format_g12(c[i])));
                r.extend([c1(t), -c1(t), singlet_correlation(t)].map(format_g12));
                r
            })
            .collect();
        write_to(Some(path), &csv_bytes(&header, &rows)?)?;
    }
    Ok(())
}

fn search(ctx: &Context, a: &SearchArgs) -> Result<(), Failure> {
    let theta = a.theta.or(ctx.file.theta).unwrap_or(0.45);
    let l_max = a.l_max.or(ctx.file.l_max).unwrap_or(3);
    let mut opts = SearchOptions::new(SamplingPlan::new(ctx.seed, ctx.n.unwrap_or(DEFAULT_SEARCH_N)));
    if let Some(r) = a.restarts.or(ctx.file.restarts) {
        opts.restarts = r;
    }
    if let Some(i) = a.iterations.or(ctx.file.iterations) {
        opts.iterations = i;
    }
    let out = harmonic_search(theta * PI, l_max, &opts)?;
    let mut json = serde_json::to_vec_pretty(&out).map_err(|e| Failure::Numerical(e.to_string()))?;
    json.push(b'\n');
    ctx.emit(&json)
}

fn load_state(spec: &str) -> Result<(TwoQubitState<f64>, String), Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        let label = path.file_stem().map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
        Ok((TwoQubitState::parse(&text)?, label))
    } else {
        Ok((TwoQubitState::parse(spec)?, spec.to_string()))
    }
}

fn quantum(ctx: &Context, a: &QuantumArgs) -> Result<(), Failure> {
    let (state, label) = load_state(a.state.as_deref().or(ctx.file.state.as_deref()).unwrap_or("singlet"))?;
    let method: Method = a.method.as_deref().or(ctx.file.method.as_deref()).unwrap_or("closed_form").parse()?;
    let grid = parse_grid(a.grid.as_ref().or(ctx.file.grid.as_ref()).map_or("0:0.5:101", |s| s))?;
    let w = twirl(&state)?;
    let points = radians(&grid)
        .into_iter()
        .map(|theta| match method {
            Method::ClosedForm => Ok(CurvePoint { theta, value: werner_correlation(w, theta), stderr: None }),
            Method::Mc => {
                let e = mc_quantum_correlation(&state, theta, &ctx.plan())?;
                Ok(CurvePoint { theta, value: e.value, stderr: Some(e.stderr) })
            }
            Method::Quadrature => Err(Failure::Usage("quantum supports closed_form and mc".into())),
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let curve = CorrelationCurve::new(label, method, points)?;
    eprintln!("singlet weight r = {}", format_g12(w.r()));
    let q = |t: f64| Some(singlet_correlation(t));
    ctx.emit(&curve_csv(&curve, &[("Q", &q)])?)
}

#[derive(Serialize)]
struct SlopeReport {
    colouring: String,
    slope: f64,
    abs_slope: f64,
    c_half: f64,
    h: f64,
    reference: Option<f64>,
    difference: Option<f64>,
}

fn slope(ctx: &Context, a: &SlopeArgs) -> Result<(), Failure> {
    let spec = a.colouring.clone().or(ctx.file.colouring.clone()).unwrap_or_else(|| "3".into());
    let pair = ColouringPair::anticorrelated(load_colouring(&spec)?)?;
    let h = a.h.or(ctx.file.h).unwrap_or(1e-3);
    let s = slope_at_half_pi(&pair, h, ctx.tol.unwrap_or(1e-14))?;
    let report = SlopeReport {
        colouring: pair.label(),
        slope: s.slope,
        abs_slope: s.slope.abs(),
        c_half: s.c_half,
        h: s.h,
        reference: s.reference,
        difference: s.reference.map(|r| s.slope.abs() - r),
    };
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| Failure::Numerical(e.to_string()))?;
    json.push(b'\n');
    ctx.emit(&json)
}
