//! Throughput `T = B · R_c · (1 - P_out)` and the rate achievable at a
//! target outage probability.

use std::f64::consts::LN_2;

use crate::combiner::Combiner;
use crate::error::{ensure_positive, ensure_probability_open, Error, Result};
use crate::link::Topology;
use crate::outage::outage_exact;
use crate::roots::{bisect_increasing, BisectError};
use crate::special::{coding_constant_inverse_with, factorial, InverseMode};

/// Default bisection bracket for exact rates, source samples per symbol.
pub const DEFAULT_RATE_BRACKET: (f64, f64) = (1e-6, 64.0);
/// Bracket width at which rate bisection stops.
pub const RATE_TOLERANCE: f64 = 1e-6;
/// Quadrature tolerance used for joint-decoding outage inside root finding.
pub const EXACT_QUADRATURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    Asymptotic,
    ExactRoot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputResult {
    /// bit/s
    pub throughput: f64,
    pub achieved_rate: f64,
    pub method: RateMethod,
}

impl ThroughputResult {
    fn new(bandwidth: f64, rate: f64, p_out: f64, method: RateMethod) -> Self {
        Self {
            throughput: bandwidth * rate * (1.0 - p_out),
            achieved_rate: rate,
            method,
        }
    }
}

pub fn throughput_from_rate(bandwidth: f64, r_c: f64, p_out: f64) -> Result<f64> {
    ensure_positive("bandwidth", bandwidth)?;
    if !(r_c.is_finite() && r_c >= 0.0) {
        return Err(Error::domain(format!("rate must be nonnegative, got {r_c}")));
    }
    if !(0.0..=1.0).contains(&p_out) {
        return Err(Error::domain(format!("outage probability must lie in [0, 1], got {p_out}")));
    }
    Ok(bandwidth * r_c * (1.0 - p_out))
}

fn check_snrs(snrs: &[f64]) -> Result<()> {
    if snrs.is_empty() {
        return Err(Error::domain("at least one average SNR is required"));
    }
    snrs.iter().try_for_each(|&s| ensure_positive("average SNR", s))
}

/// Rate at which the high-SNR outage expression equals `p_out`, with the
/// refined coding-constant inverse for JD.
pub fn achievable_rate_asymptotic(combiner: Combiner, avg_snrs: &[f64], p_out: f64) -> Result<f64> {
    achievable_rate_asymptotic_with(combiner, avg_snrs, p_out, InverseMode::Refined)
}

/// As [`achievable_rate_asymptotic`], choosing how JD inverts `A_N`.
///
/// SC: `log2((P ΠΓ̄)^{1/N} + 1)`, MRC: `log2((N! P ΠΓ̄)^{1/N} + 1)`,
/// SCo: `log2(P Γ̄_1 + 1)`, JD: `A_N^{-1}(P ΠΓ̄)`.
pub fn achievable_rate_asymptotic_with(
    combiner: Combiner,
    avg_snrs: &[f64],
    p_out: f64,
    mode: InverseMode,
) -> Result<f64> {
    check_snrs(avg_snrs)?;
    ensure_probability_open("outage probability", p_out)?;
    let n = avg_snrs.len();
    let nf = n as f64;
    let ln_target = p_out.ln() + avg_snrs.iter().map(|s| s.ln()).sum::<f64>();
    let log2_1p = |x: f64| x.ln_1p() / LN_2;
    match combiner {
        Combiner::Jd => coding_constant_inverse_with(n, ln_target.exp(), mode),
        Combiner::Sc => Ok(log2_1p((ln_target / nf).exp())),
        Combiner::Mrc => Ok(log2_1p(((factorial(n).ln() + ln_target) / nf).exp())),
        Combiner::Sco => Ok(log2_1p(p_out * avg_snrs[0])),
    }
}

/// Rate solving `P_out(R) = p_out` for the exact outage, by bisection over
/// `bracket` to a width of [`RATE_TOLERANCE`].
///
/// JD uses nested quadrature and therefore supports at most four links.
pub fn achievable_rate_exact(
    combiner: Combiner,
    avg_snrs: &[f64],
    p_out: f64,
    bracket: (f64, f64),
) -> Result<f64> {
    check_snrs(avg_snrs)?;
    ensure_probability_open("outage probability", p_out)?;
    let (lo, hi) = bracket;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::domain(format!("invalid rate bracket [{lo}, {hi}]")));
    }
    let objective = |r: f64| Ok(outage_exact(combiner, avg_snrs, r, EXACT_QUADRATURE_TOL)?.value - p_out);
    match bisect_increasing(objective, lo, hi, RATE_TOLERANCE) {
        Ok(r) => Ok(r),
        Err(BisectError::NotBracketed) => Err(Error::Bracket {
            target: p_out,
            low: lo,
            high: hi,
        }),
        Err(BisectError::Eval(e)) => Err(e),
    }
}

/// Throughput at the asymptotic achievable rate of `topology`.
pub fn throughput_asymptotic(
    combiner: Combiner,
    topology: &Topology,
    p_out: f64,
    mode: InverseMode,
) -> Result<ThroughputResult> {
    let rate = achievable_rate_asymptotic_with(combiner, &topology.average_snrs(), p_out, mode)?;
    Ok(ThroughputResult::new(topology.bandwidth(), rate, p_out, RateMethod::Asymptotic))
}

/// Throughput at the exact achievable rate of `topology`.
pub fn throughput_exact(
    combiner: Combiner,
    topology: &Topology,
    p_out: f64,
    bracket: (f64, f64),
) -> Result<ThroughputResult> {
    let rate = achievable_rate_exact(combiner, &topology.average_snrs(), p_out, bracket)?;
    Ok(ThroughputResult::new(topology.bandwidth(), rate, p_out, RateMethod::ExactRoot))
}
