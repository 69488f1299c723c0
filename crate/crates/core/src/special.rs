//! Exponential sum, the joint-decoding coding constant `A_N`, its inverse,
//! the upper-branch Lambert W function, and per-combiner coding gains.
//!
//! `A_N(R) = (-1)^N (1 - 2^R e_N(-R ln 2))` is the volume of the region
//! `{γ ≥ 0 : Σ log2(1 + γ_i) < R}`. It is the numerator of the high-SNR
//! joint-decoding outage probability.

use std::f64::consts::{E, LN_2};

use crate::combiner::Combiner;
use crate::error::{ensure_positive, Error, Result};

/// The tail series is used while `R ln 2 < SERIES_SWITCH * N`.
pub const SERIES_SWITCH: f64 = 0.5;

/// Relative tolerance on `|A_N(R) - y| / y` for the refined inverse.
pub const INVERSE_TOLERANCE: f64 = 1e-10;
pub const INVERSE_MAX_ITERATIONS: usize = 200;

/// Relative tolerance of the refined Lambert W.
pub const LAMBERT_TOLERANCE: f64 = 1e-12;

/// `Σ_{k=0}^{n-1} x^k / k!`, accumulated term by term.
pub fn exp_sum(n: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n {
        term *= x / k as f64;
        sum += term;
    }
    sum
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn check_rate(r_c: f64) -> Result<()> {
    if r_c.is_finite() && r_c >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "spectral efficiency must be finite and nonnegative, got {r_c}"
        )))
    }
}

fn check_links(n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::domain("number of links must be at least 1"))
    }
}

/// Direct evaluation `(-1)^N (1 - 2^R e_N(-R ln 2))`.
///
/// Loses precision for small rates, where the product cancels against 1.
pub fn coding_constant_direct(n: usize, r_c: f64) -> f64 {
    let x = r_c * LN_2;
    let inner = 1.0 - r_c.exp2() * exp_sum(n, -x);
    if n.is_multiple_of(2) {
        inner
    } else {
        -inner
    }
}

/// Tail-series evaluation `2^R Σ_{k≥N} (-1)^{k-N} (R ln 2)^k / k!`.
///
/// Every term is exact to rounding; converges quickly when `R ln 2` is small
/// compared with `N`.
pub fn coding_constant_series(n: usize, r_c: f64) -> f64 {
    let x = r_c * LN_2;
    if x == 0.0 {
        return 0.0;
    }
    let mut term = (1..=n).fold(1.0, |acc, k| acc * x / k as f64);
    let mut sum = term;
    let mut k = n;
    loop {
        k += 1;
        term *= -x / k as f64;
        if term.abs() < 1e-16 * sum.abs() || term == 0.0 {
            break;
        }
        sum += term;
        if k > n + 10_000 {
            break;
        }
    }
    x.exp() * sum
}

/// Coding constant `A_N(R_c)`.
///
/// `N = 1` gives `2^R - 1`. Small rates switch to the tail series.
pub fn coding_constant(n: usize, r_c: f64) -> Result<f64> {
    check_links(n)?;
    check_rate(r_c)?;
    Ok(coding_constant_unchecked(n, r_c))
}

pub(crate) fn coding_constant_unchecked(n: usize, r_c: f64) -> f64 {
    if r_c == 0.0 {
        return 0.0;
    }
    if n == 1 {
        return (r_c * LN_2).exp_m1();
    }
    if r_c * LN_2 < SERIES_SWITCH * n as f64 {
        coding_constant_series(n, r_c)
    } else {
        coding_constant_direct(n, r_c)
    }
}

/// Natural log of `A_N(R_c)`, finite for rates where `2^R` overflows.
pub fn ln_coding_constant(n: usize, r_c: f64) -> Result<f64> {
    check_links(n)?;
    check_rate(r_c)?;
    if r_c == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if r_c < 900.0 {
        return Ok(coding_constant_unchecked(n, r_c).ln());
    }
    // 2^R e_N(-x) dominates the constant (-1)^N term by a factor ~2^R.
    let x = r_c * LN_2;
    let signed = if n % 2 == 1 { exp_sum(n, -x) } else { -exp_sum(n, -x) };
    Ok(x + signed.ln())
}

/// `dA_N/dR = ln2 · 2^R (R ln 2)^{N-1} / (N-1)!`.
pub fn coding_constant_derivative(n: usize, r_c: f64) -> f64 {
    let x = r_c * LN_2;
    let poly = (1..n).fold(1.0, |acc, k| acc * x / k as f64);
    LN_2 * r_c.exp2() * poly
}

/// Leading asymptotic form `ln z - ln ln z` of the upper Lambert W branch.
pub fn lambert_w_asymptotic(z: f64) -> Result<f64> {
    check_lambert_domain(z)?;
    let lz = z.ln();
    Ok(lz - lz.ln())
}

/// Principal Lambert W for `z ≥ e`, seeded with [`lambert_w_asymptotic`] and
/// refined by Halley iteration on `w e^w = z`.
pub fn lambert_w_upper_branch(z: f64) -> Result<f64> {
    let mut w = lambert_w_asymptotic(z)?;
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= LAMBERT_TOLERANCE * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence {
        what: "Lambert W Halley iteration",
        iterations: 64,
    })
}

fn check_lambert_domain(z: f64) -> Result<()> {
    // Allow an ulp of slack so that z = e computed in floating point passes.
    if z.is_finite() && z >= E * (1.0 - 4.0 * f64::EPSILON) {
        Ok(())
    } else {
        Err(Error::domain(format!("Lambert W upper branch needs z >= e, got {z}")))
    }
}

/// How `A_N^{-1}` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMode {
    /// Newton iteration to `|A_N(R) - y| / y < 1e-10`.
    #[default]
    Refined,
    /// The closed-form Lambert-W approximation, valid when its argument `ζ ≥ e`.
    LambertApprox,
}

/// `ζ = ((N-1)! y)^{1/(N-1)} / (N-1)`, the argument of the approximate inverse.
pub fn inverse_zeta(n: usize, y: f64) -> f64 {
    let a = (n - 1) as f64;
    (factorial(n - 1) * y).powf(1.0 / a) / a
}

/// Refined inverse of the coding constant: the rate `R` with `A_N(R) = y`.
pub fn coding_constant_inverse(n: usize, y: f64) -> Result<f64> {
    coding_constant_inverse_with(n, y, InverseMode::Refined)
}

pub fn coding_constant_inverse_with(n: usize, y: f64, mode: InverseMode) -> Result<f64> {
    check_links(n)?;
    ensure_positive("coding constant value", y)?;
    if n == 1 {
        return match mode {
            InverseMode::Refined => Ok(y.ln_1p() / LN_2),
            InverseMode::LambertApprox => Err(Error::domain(
                "the Lambert-W approximate inverse needs at least 2 links",
            )),
        };
    }

    let zeta = inverse_zeta(n, y);
    let approx = if zeta >= E {
        let a = (n - 1) as f64;
        Some(a / LN_2 * (zeta.ln() - zeta.ln().ln()))
    } else {
        None
    };

    match mode {
        InverseMode::LambertApprox => approx.ok_or_else(|| {
            Error::domain(format!(
                "approximate inverse needs zeta >= e, got zeta = {zeta} for y = {y}"
            ))
        }),
        InverseMode::Refined => newton_inverse(n, y, approx.filter(|r| *r > 0.0).unwrap_or(1.0)),
    }
}

// Newton on ln A_N(R) = ln y; ln A_N is increasing and nearly concave in R.
fn newton_inverse(n: usize, y: f64, seed: f64) -> Result<f64> {
    let ln_y = y.ln();
    let mut r = seed;
    for _ in 0..INVERSE_MAX_ITERATIONS {
        let a = coding_constant_unchecked(n, r);
        if ((a - y) / y).abs() < INVERSE_TOLERANCE {
            return Ok(r);
        }
        let slope = coding_constant_derivative(n, r) / a;
        let next = r - (a.ln() - ln_y) / slope;
        r = if next.is_finite() && next > 0.0 { next } else { 0.5 * r };
    }
    Err(Error::NoConvergence {
        what: "coding constant inverse",
        iterations: INVERSE_MAX_ITERATIONS,
    })
}

/// Coding gain of a combiner: JD `A_N^{-1/N}`, SC and SCo `1/A_1`,
/// MRC `(N!)^{1/N}/A_1`.
pub fn coding_gain(combiner: Combiner, n: usize, r_c: f64) -> Result<f64> {
    check_links(n)?;
    ensure_positive("spectral efficiency", r_c)?;
    let a1 = coding_constant_unchecked(1, r_c);
    let nf = n as f64;
    match combiner {
        Combiner::Jd => Ok(coding_constant_unchecked(n, r_c).powf(-1.0 / nf)),
        Combiner::Sc => Ok(1.0 / a1),
        Combiner::Mrc => Ok(factorial(n).powf(1.0 / nf) / a1),
        Combiner::Sco if n == 1 => Ok(1.0 / a1),
        Combiner::Sco => Err(Error::domain(format!(
            "single connectivity has exactly one link, got {n}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn exp_sum_examples() {
        assert_eq!(exp_sum(1, -3.7), 1.0);
        assert_eq!(exp_sum(5, 0.0), 1.0);
        assert_relative_eq!(exp_sum(3, -0.5), 0.625, epsilon = 1e-15);
    }

    #[test]
    fn coding_constant_examples() {
        assert_relative_eq!(coding_constant(1, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(coding_constant(4, 0.0).unwrap(), 0.0);
        let base_case = 2.0 * (LN_2 - 1.0) + 1.0;
        assert_relative_eq!(coding_constant(2, 1.0).unwrap(), base_case, max_relative = 1e-14);
    }

    #[test]
    fn two_link_closed_form_matches_on_a_grid() {
        // A_2(x) = 2^x (x ln2 - 1) + 1, evaluated independently.
        for i in 1..=60 {
            let x = i as f64 * 0.1;
            let expected = x.exp2() * (x * LN_2 - 1.0) + 1.0;
            assert_relative_eq!(coding_constant(2, x).unwrap(), expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn coding_constant_domain_errors() {
        assert!(coding_constant(0, 1.0).is_err());
        assert!(coding_constant(2, -0.1).is_err());
        assert!(coding_constant(2, f64::NAN).is_err());
    }

    #[test]
    fn zero_rate_is_zero_and_positive_rate_is_positive() {
        for n in 1..=8 {
            assert_eq!(coding_constant(n, 0.0).unwrap(), 0.0);
            assert!(coding_constant(n, 1e-6).unwrap() > 0.0);
        }
    }

    #[test]
    fn strictly_increasing_on_grid() {
        for n in 1..=8 {
            let mut prev = 0.0;
            for i in 1..=3200 {
                let r = i as f64 * 0.01;
                let a = coding_constant(n, r).unwrap();
                assert!(a > prev, "n={n} r={r}: {a} <= {prev}");
                prev = a;
            }
        }
    }

    #[test]
    fn branches_agree_near_switch() {
        for n in 2..=8 {
            let switch = SERIES_SWITCH * n as f64 / LN_2;
            for k in -20..=20 {
                let r = switch * (1.0 + k as f64 * 0.01);
                let d = coding_constant_direct(n, r);
                let s = coding_constant_series(n, r);
                assert_relative_eq!(d, s, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn small_rate_asymptote() {
        let x: f64 = 1e-3;
        for n in 2..=6 {
            let leading = x.exp2() * (x * LN_2).powi(n as i32) / factorial(n);
            let ratio = coding_constant(n, x).unwrap() / leading;
            assert!((0.99..=1.01).contains(&ratio), "n={n}: {ratio}");
        }
    }

    #[test]
    fn lemma_three_inequality() {
        for n in 2..=8 {
            for i in 1..=320 {
                let x = i as f64 * 0.1;
                let a1 = coding_constant(1, x).unwrap();
                let an = coding_constant(n, x).unwrap();
                assert!(a1.powi(n as i32) > factorial(n) * an, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn ln_coding_constant_matches_and_extends() {
        for n in 1..=5 {
            for r in [0.3, 2.0, 40.0, 800.0] {
                let direct = coding_constant(n, r).unwrap().ln();
                assert_relative_eq!(ln_coding_constant(n, r).unwrap(), direct, max_relative = 1e-12);
            }
        }
        // 2^3000 overflows; the log form stays finite and continues the trend.
        let big = ln_coding_constant(3, 3000.0).unwrap();
        let expected = 3000.0 * LN_2 + ((3000.0 * LN_2).powi(2) / 2.0 - 3000.0 * LN_2 + 1.0).ln();
        assert_relative_eq!(big, expected, max_relative = 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for n in 1..=5 {
            for r in [0.5, 1.0, 4.0, 10.0] {
                let h = 1e-6 * r;
                let fd = (coding_constant(n, r + h).unwrap() - coding_constant(n, r - h).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(coding_constant_derivative(n, r), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn lambert_examples() {
        assert_relative_eq!(lambert_w_upper_branch(E).unwrap(), 1.0, max_relative = 1e-12);
        let z = E * E.exp();
        assert_relative_eq!(lambert_w_upper_branch(z).unwrap(), E, max_relative = 1e-12);
        let unrefined = lambert_w_asymptotic(100.0).unwrap();
        assert_relative_eq!(unrefined, 100f64.ln() - 100f64.ln().ln(), max_relative = 1e-15);
        assert!((unrefined - 3.0780).abs() < 1e-4);
        assert!(lambert_w_upper_branch(2.0).is_err());
    }

    #[test]
    fn lambert_matches_bisection_oracle() {
        for z in [E, 5.0, 100.0, 1e4, 1e12, 1e300] {
            let (mut lo, mut hi) = (0.0_f64, 800.0_f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid.ln() + mid < z.ln() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert_relative_eq!(lambert_w_upper_branch(z).unwrap(), lo, max_relative = 1e-11);
        }
        assert!((lambert_w_upper_branch(100.0).unwrap() - 3.38563).abs() < 1e-5);
    }

    #[test]
    fn inverse_examples() {
        let y = coding_constant(2, 3.0).unwrap();
        assert_relative_eq!(coding_constant_inverse(2, y).unwrap(), 3.0, max_relative = 1e-8);
        let r = coding_constant_inverse(2, 0.386294).unwrap();
        assert!((r - 1.0).abs() < 1e-5, "{r}");
        assert!(coding_constant_inverse(2, 0.0).is_err());
        assert!(coding_constant_inverse(2, -1.0).is_err());
    }

    #[test]
    fn approximate_inverse_reproduces_closed_form() {
        let y: f64 = 1e6;
        let zeta = (2.0 * y).sqrt() / 2.0;
        let expected = 2.0 / LN_2 * (zeta.ln() - zeta.ln().ln());
        let approx = coding_constant_inverse_with(3, y, InverseMode::LambertApprox).unwrap();
        assert_relative_eq!(approx, expected, max_relative = 1e-14);
        // ζ < e is outside the approximation's validity.
        assert!(coding_constant_inverse_with(2, 1.0, InverseMode::LambertApprox).is_err());
    }

    #[test]
    fn inverse_round_trip_wide_range() {
        for n in 2..=6 {
            for e in -6..=12 {
                let y = 10f64.powi(e);
                let r = coding_constant_inverse(n, y).unwrap();
                let back = coding_constant(n, r).unwrap();
                assert_relative_eq!(back, y, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn single_link_inverse_is_log() {
        assert_relative_eq!(coding_constant_inverse(1, 1.0).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn coding_gain_examples() {
        assert_relative_eq!(coding_gain(Combiner::Sco, 1, 1.0).unwrap(), 1.0);
        assert_relative_eq!(coding_gain(Combiner::Mrc, 2, 1.0).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
        let a2 = 2.0 * (LN_2 - 1.0) + 1.0;
        assert_relative_eq!(coding_gain(Combiner::Jd, 2, 1.0).unwrap(), 1.0 / a2.sqrt(), max_relative = 1e-13);
        assert!((coding_gain(Combiner::Jd, 2, 1.0).unwrap() - 1.6089).abs() < 1e-4);
        assert!(coding_gain(Combiner::Sco, 2, 1.0).is_err());
        assert!(coding_gain(Combiner::Jd, 2, 0.0).is_err());
    }
}
