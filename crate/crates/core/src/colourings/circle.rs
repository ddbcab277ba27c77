//! One-dimensional analogue: antipodal colourings of the circle.
//!
//! Angles here are in units of π so that rational inputs stay exact.

use crate::error::{Error, Result};
use crate::scalar::Exact;

fn check_odd(n: u32) -> Result<()> {
    if n % 2 == 1 {
        Ok(())
    } else {
        Err(Error::domain("n", format!("{n} must be odd")))
    }
}

fn parity_sign<S: Exact>(k: S) -> S {
    match k.to_i64() {
        Some(k) if k.rem_euclid(2) == 1 => -S::one(),
        _ => S::one(),
    }
}

/// `(−1)^⌊n ε / π⌋` for `ε = epsilon_over_pi · π`.
pub fn circle_colouring_value<S: Exact>(n: u32, epsilon_over_pi: S) -> Result<S> {
    check_odd(n)?;
    Ok(parity_sign((S::from_i64(n as i64) * epsilon_over_pi).floor()))
}

/// Correlation of the pair `a(ε) = −b(ε) = (−1)^⌊nε/π⌋` at separation
/// `θ = theta_over_pi · π`, averaged over the circle.
///
/// In the variable `u = nε/π` the colouring alternates sign on unit cells
/// and has period `2n`. For a shift `s = nθ/π = k + f`, a fraction `1 − f`
/// of every cell meets a cell `k` away and a fraction `f` meets one `k + 1`
/// away, so the average of `a(ε) a(ε + θ)` is `(−1)^k (1 − 2f)`.
pub fn circle_correlation<S: Exact>(n: u32, theta_over_pi: S) -> Result<S> {
    check_odd(n)?;
    let shift = S::from_i64(n as i64) * theta_over_pi;
    let k = shift.floor();
    let f = shift - k;
    let two = S::one() + S::one();
    let same = parity_sign(k) * (S::one() - two * f);
    Ok(-same)
}
