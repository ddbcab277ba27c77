//! Quantum reference correlations: the singlet, Werner states and the
//! rotation-averaged correlation of an arbitrary two-qubit state.

use std::f64::consts::TAU;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{monte_carlo, Estimate, SamplingPlan};
use crate::scalar::Real;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = -1e-10;

type C<T> = Complex<T>;
type Ket<T> = [C<T>; 2];

fn check_theta<T: Real>(theta: T) -> Result<()> {
    if theta >= T::zero() && theta <= T::PI() {
        Ok(())
    } else {
        Err(Error::domain("theta", format!("{theta} outside [0, pi]")))
    }
}

/// `Q(θ) = −cos θ`.
pub fn singlet_correlation<T: Real>(theta: T) -> T {
    -theta.cos()
}

/// Weight `r` of the singlet in a Werner state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerParam<T> {
    r: T,
}

impl<T: Real> WernerParam<T> {
    pub fn new(r: T) -> Result<Self> {
        if r >= T::zero() && r <= T::one() {
            Ok(Self { r })
        } else {
            Err(Error::domain("Werner parameter", format!("r = {r} outside [0, 1]")))
        }
    }

    pub fn r(&self) -> T {
        self.r
    }
}

/// `−((4r − 1)/3) cos θ`.
pub fn werner_correlation<T: Real>(w: WernerParam<T>, theta: T) -> T {
    -((T::lit(4.0) * w.r - T::one()) / T::lit(3.0)) * theta.cos()
}

/// `P(++ | θ) = (1 − r)/3 + ((4r − 1)/6) sin²(θ/2)`.
pub fn werner_pp<T: Real>(w: WernerParam<T>, theta: T) -> T {
    let s = (theta / T::lit(2.0)).sin();
    (T::one() - w.r) / T::lit(3.0) + (T::lit(4.0) * w.r - T::one()) / T::lit(6.0) * s * s
}

/// Range of Werner correlations on `[0, π/2]`: `(−cos θ, cos θ / 3)`.
pub fn werner_envelope<T: Real>(theta: T) -> (T, T) {
    (-theta.cos(), theta.cos() / T::lit(3.0))
}

/// `sign(π/2 − θ)`, with 0 at π/2.
pub fn pr_box_correlation<T: Real>(theta: T) -> T {
    let half = T::PI() / T::lit(2.0);
    if theta < half {
        T::one()
    } else if theta > half {
        -T::one()
    } else {
        T::zero()
    }
}

/// Density operator in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState<T> {
    rho: [[C<T>; 4]; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedState {
    Singlet,
    PhiPlus,
    PhiMinus,
    PsiPlus,
    Mixed,
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "singlet" | "psi-" => Ok(NamedState::Singlet),
            "phi+" => Ok(NamedState::PhiPlus),
            "phi-" => Ok(NamedState::PhiMinus),
            "psi+" => Ok(NamedState::PsiPlus),
            "mixed" => Ok(NamedState::Mixed),
            _ => Err(Error::Parse(format!("unknown state '{s}'"))),
        }
    }
}

impl<T: Real> TwoQubitState<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: [[C<T>; 4]; 4]) -> Result<Self> {
        let tol = T::lit(HERMITIAN_TOL);
        for i in 0..4 {
            for j in 0..4 {
                let (a, b) = (rho[i][j], rho[j][i].conj());
                if !(a.re.is_finite() && a.im.is_finite()) {
                    return Err(Error::InvalidState("non-finite entry".into()));
                }
                if (a - b).norm() > tol {
                    return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        let trace: T = (0..4).map(|i| rho[i][i].re).sum();
        if (trace - T::one()).abs() > T::lit(TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {trace} != 1")));
        }
        let m = Matrix4::from_fn(|i, j| C::new(rho[i][j].re.as_f64(), rho[i][j].im.as_f64()));
        let lowest = m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        if lowest < EIGEN_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` for a normalised ket.
    pub fn pure(psi: [C<T>; 4]) -> Result<Self> {
        let mut rho = [[C::new(T::zero(), T::zero()); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(rho)
    }

    /// Bell states are built from entries `±1/2` so that `rho` is exact.
    pub fn named(which: NamedState) -> Self {
        let (z, h) = (T::zero(), T::lit(0.5));
        let mut rho = [[C::new(z, z); 4]; 4];
        let bell = |rho: &mut [[C<T>; 4]; 4], i: usize, j: usize, off: T| {
            rho[i][i] = C::new(h, z);
            rho[j][j] = C::new(h, z);
            rho[i][j] = C::new(off, z);
            rho[j][i] = C::new(off, z);
        };
        match which {
            NamedState::Singlet => bell(&mut rho, 1, 2, -h),
            NamedState::PsiPlus => bell(&mut rho, 1, 2, h),
            NamedState::PhiPlus => bell(&mut rho, 0, 3, h),
            NamedState::PhiMinus => bell(&mut rho, 0, 3, -h),
            NamedState::Mixed => {
                for (i, row) in rho.iter_mut().enumerate() {
                    row[i] = C::new(T::lit(0.25), z);
                }
            }
        }
        Self { rho }
    }

    pub fn singlet() -> Self {
        Self::named(NamedState::Singlet)
    }

    /// Werner state `r |Ψ⁻⟩⟨Ψ⁻| + ((1 − r)/3)(I − |Ψ⁻⟩⟨Ψ⁻|)`.
    pub fn werner(w: WernerParam<T>) -> Self {
        let s = Self::singlet();
        let k = (T::one() - w.r) / T::lit(3.0);
        let mut rho = s.rho;
        for (i, row) in rho.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let id = if i == j { T::one() } else { T::zero() };
                *e = *e * (w.r - k) + C::new(k * id, T::zero());
            }
        }
        Self { rho }
    }

    /// Named state, or a 4×4 row-major matrix with entries like `0.5`,
    /// `-0.5+0.25i` or `0.1i`, rows on separate lines (or separated by `;`).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Ok(n) = t.parse::<NamedState>() {
            return Ok(Self::named(n));
        }
        let rows: Vec<&str> = t.split(['\n', ';']).map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
        if rows.len() != 4 {
            return Err(Error::Parse(format!("expected 4 matrix rows, found {}", rows.len())));
        }
        let mut rho = [[C::new(T::zero(), T::zero()); 4]; 4];
        for (i, row) in rows.iter().enumerate() {
            let entries: Vec<&str> = row.split(|c: char| c.is_whitespace() || c == ',').filter(|e| !e.is_empty()).collect();
            if entries.len() != 4 {
                return Err(Error::Parse(format!("row {} has {} entries", i + 1, entries.len())));
            }
            for (j, e) in entries.iter().enumerate() {
                let z = parse_complex(e)?;
                rho[i][j] = C::new(T::lit(z.re), T::lit(z.im));
            }
        }
        Self::new(rho)
    }

    pub fn rho(&self) -> &[[C<T>; 4]; 4] {
        &self.rho
    }

    /// `⟨x ⊗ y| ρ |x ⊗ y⟩`.
    fn product_expectation(&self, x: &Ket<T>, y: &Ket<T>) -> T {
        let psi = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]];
        let mut acc = C::new(T::zero(), T::zero());
        for i in 0..4 {
            let mut row = C::new(T::zero(), T::zero());
            for j in 0..4 {
                row = row + self.rho[i][j] * psi[j];
            }
            acc = acc + psi[i].conj() * row;
        }
        acc.re
    }
}

fn parse_complex(s: &str) -> Result<Complex<f64>> {
    let bad = || Error::Parse(format!("bad complex number '{s}'"));
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// Singlet fidelity `⟨Ψ⁻|ρ|Ψ⁻⟩`, the parameter of the twirled state.
pub fn twirl<T: Real>(state: &TwoQubitState<T>) -> Result<WernerParam<T>> {
    let rho = &state.rho;
    let h = T::lit(0.5);
    // Ψ⁻ = (|01⟩ − |10⟩)/√2.
    let r = h * (rho[1][1].re + rho[2][2].re - rho[1][2].re - rho[2][1].re);
    let slack = T::lit(TRACE_TOL);
    if r < -slack || r > T::one() + slack {
        return Err(Error::InvalidState(format!("singlet fidelity {r} outside [0, 1]")));
    }
    WernerParam::new(r.max(T::zero()).min(T::one()))
}

/// Haar-random `U = R_z(φ) R_y(ε) R_z(ω)` with `cos ε` uniform.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R) -> [[C<T>; 2]; 2] {
    let phi = T::lit(rng.random_range(0.0..TAU));
    let eps = T::lit(rng.random_range(-1.0f64..=1.0).acos());
    let omega = T::lit(rng.random_range(0.0..TAU));
    let h = T::lit(0.5);
    let (s, c) = (eps * h).sin_cos();
    let e = |a: T| C::from_polar(T::one(), a);
    // R_z(a) = diag(e^{−ia/2}, e^{ia/2}), R_y(b) = [[c, −s], [s, c]].
    let (p, q) = (phi * h, omega * h);
    [
        [e(-p - q) * c, -e(-p + q) * s],
        [e(p - q) * s, e(p + q) * c],
    ]
}

fn apply<T: Real>(u: &[[C<T>; 2]; 2], v: Ket<T>) -> Ket<T> {
    [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]]
}

/// Correlation of `σ_z` on Alice and the spin along polar angle `θ` on Bob,
/// both rotated by one Haar-random `U`, from the four outcome projectors.
pub fn mc_quantum_correlation<T: Real>(state: &TwoQubitState<T>, theta: T, plan: &SamplingPlan) -> Result<Estimate<T>> {
    check_theta(theta)?;
    let (z, o) = (T::zero(), T::one());
    let (s, c) = (theta / T::lit(2.0)).sin_cos();
    let zero = [C::new(o, z), C::new(z, z)];
    let one = [C::new(z, z), C::new(o, z)];
    let chi = [C::new(c, z), C::new(s, z)];
    let chi_perp = [C::new(-s, z), C::new(c, z)];
    monte_carlo(plan, |rng| {
        let u = haar_unitary::<T, _>(rng);
        let alice = [(o, apply(&u, zero)), (-o, apply(&u, one))];
        let bob = [(o, apply(&u, chi)), (-o, apply(&u, chi_perp))];
        let mut v = T::zero();
        for (sa, x) in &alice {
            for (sb, y) in &bob {
                v = v + *sa * *sb * state.product_expectation(x, y);
            }
        }
        Ok(v)
    })
}

/// Twirl parameter estimated from `⟨00| (U ⊗ U) ρ (U ⊗ U)† |00⟩`, which
/// averages to `(1 − r)/3` over the Haar measure.
pub fn empirical_twirl<T: Real>(state: &TwoQubitState<T>, plan: &SamplingPlan) -> Result<Estimate<T>> {
    let three = T::lit(3.0);
    monte_carlo(plan, |rng| {
        let u = haar_unitary::<T, _>(rng);
        // (U ⊗ U)† |00⟩ = U†|0⟩ ⊗ U†|0⟩.
        let x = [u[0][0].conj(), u[0][1].conj()];
        Ok(T::one() - three * state.product_expectation(&x, &x))
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn w(r: f64) -> WernerParam<f64> {
        WernerParam::new(r).unwrap()
    }

    pub(crate) fn random_state(rng: &mut ChaCha8Rng) -> TwoQubitState<f64> {
        let a: Vec<C<f64>> = (0..16).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let mut rho = [[C::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] = (0..4).map(|k| a[4 * i + k] * a[4 * j + k].conj()).sum();
            }
        }
        let tr: f64 = (0..4).map(|i| rho[i][i].re).sum();
        for row in rho.iter_mut() {
            for e in row.iter_mut() {
                *e /= tr;
            }
        }
        for i in 0..4 {
            rho[i][i].im = 0.0;
            for j in 0..i {
                rho[i][j] = rho[j][i].conj();
            }
        }
        TwoQubitState::new(rho).unwrap()
    }

    #[test]
    fn reference_values() {
        assert_eq!(singlet_correlation(0.0), -1.0);
        assert!((singlet_correlation(PI / 3.0) + 0.5).abs() < 1e-15);
        assert!(singlet_correlation(PI / 2.0).abs() < 1e-15);
        assert_eq!(werner_correlation(w(0.25), 1.0), 0.0);
        assert!((werner_correlation(w(0.0), 0.0) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(werner_pp(w(1.0), 0.0), 0.0);
        assert!((werner_pp(w(1.0), PI) - 0.5).abs() < 1e-16);
        assert_eq!(werner_pp(w(0.25), 0.7), 0.25);
        assert_eq!(pr_box_correlation(PI / 4.0), 1.0);
        assert_eq!(pr_box_correlation(PI / 2.0), 0.0);
        assert_eq!(pr_box_correlation(3.0 * PI / 4.0), -1.0);
        assert!(WernerParam::new(1.5).is_err());
    }

    #[test]
    fn pp_identity_and_envelope() {
        for i in 0..=20 {
            for j in 0..=20 {
                let (r, t) = (i as f64 / 20.0, j as f64 * PI / 40.0);
                let q = werner_correlation(w(r), t);
                assert!((4.0 * werner_pp(w(r), t) - 1.0 - q).abs() < 1e-15);
                let (lo, hi) = werner_envelope(t);
                assert!(lo - 1e-15 <= q && q <= hi + 1e-15);
            }
        }
    }

    #[test]
    fn bell_state_twirls_are_exact() {
        let r = |n| twirl(&TwoQubitState::<f64>::named(n)).unwrap().r();
        assert_eq!(r(NamedState::Singlet), 1.0);
        assert_eq!(r(NamedState::PhiPlus), 0.0);
        assert_eq!(r(NamedState::PhiMinus), 0.0);
        assert_eq!(r(NamedState::PsiPlus), 0.0);
        assert_eq!(r(NamedState::Mixed), 0.25);
        assert!((twirl(&TwoQubitState::werner(w(0.7))).unwrap().r() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let mut rho = *TwoQubitState::<f64>::singlet().rho();
        rho[0][1] = C::new(0.0, 0.1);
        assert!(TwoQubitState::new(rho).is_err());
        let mut rho = *TwoQubitState::<f64>::singlet().rho();
        rho[0][0].re += 0.01;
        assert!(TwoQubitState::new(rho).is_err());
        // Hermitian with unit trace but an eigenvalue of −1/2.
        let mut rho = [[C::new(0.0, 0.0); 4]; 4];
        rho[0][0].re = 1.5;
        rho[1][1].re = -0.5;
        assert!(matches!(TwoQubitState::new(rho), Err(Error::InvalidState(_))));
    }

    #[test]
    fn parses_text_matrices() {
        assert_eq!(parse_complex("-0.5+0.25i").unwrap(), Complex::new(-0.5, 0.25));
        assert_eq!(parse_complex("1e-3-2e-2i").unwrap(), Complex::new(1e-3, -2e-2));
        assert_eq!(parse_complex("-i").unwrap(), Complex::new(0.0, -1.0));
        assert_eq!(parse_complex("0.5").unwrap(), Complex::new(0.5, 0.0));
        assert!(parse_complex("abc").is_err());
        let s = TwoQubitState::<f64>::parse("0 0 0 0\n0 0.5 -0.5+0i 0\n0 -0.5 0.5 0\n0 0 0 0\n").unwrap();
        assert_eq!(s, TwoQubitState::singlet());
        assert_eq!(TwoQubitState::<f64>::parse("phi+").unwrap(), TwoQubitState::named(NamedState::PhiPlus));
        assert!(TwoQubitState::<f64>::parse("1 0\n0 1").is_err());
    }

    #[test]
    fn mc_examples() {
        let plan = SamplingPlan::new(4, 100_000);
        let e = mc_quantum_correlation(&TwoQubitState::singlet(), PI / 3.0, &plan).unwrap();
        assert!(e.agrees_with(-0.5, 3.0), "{e:?}");
        let e = mc_quantum_correlation(&TwoQubitState::<f64>::named(NamedState::Mixed), 1.1, &plan).unwrap();
        assert!(e.agrees_with(0.0, 3.0), "{e:?}");
        let e = mc_quantum_correlation(&TwoQubitState::<f64>::named(NamedState::PhiPlus), 0.0, &plan).unwrap();
        assert!(e.agrees_with(1.0 / 3.0, 3.0), "{e:?}");
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let u = haar_unitary::<f64, _>(&mut rng);
            for i in 0..2 {
                for j in 0..2 {
                    let dot: C<f64> = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - C::new(id, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn random_states_follow_their_twirl() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let plan = SamplingPlan::new(31, 100_000);
        for i in 0..20 {
            let s = random_state(&mut rng);
            let r = twirl(&s).unwrap();
            let t = 0.05 * PI * (i + 1) as f64;
            let e = mc_quantum_correlation(&s, t, &plan.reseeded(i)).unwrap();
            assert!(e.agrees_with(werner_correlation(r, t), 3.0), "state {i}: {e:?} vs {}", werner_correlation(r, t));
        }
    }

    #[test]
    fn empirical_twirl_matches_fidelity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for i in 0..10 {
            let s = random_state(&mut rng);
            let e = empirical_twirl(&s, &SamplingPlan::new(100 + i, 100_000)).unwrap();
            let r = twirl(&s).unwrap().r();
            assert!(e.agrees_with(r, 3.0), "state {i}: {e:?} vs {r}");
        }
    }
}
