//! Outage probability `Pr[C(γ) < R_c]` for joint decoding, selection
//! combining, maximal-ratio combining and single connectivity.
//!
//! Four evaluation routes are provided: Monte-Carlo over the fading sampler,
//! nested adaptive quadrature (joint decoding, up to four links), closed
//! forms (SC, MRC, SCo) and high-SNR asymptotes.

use std::f64::consts::LN_2;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::combiner::Combiner;
use crate::error::{ensure_positive, Error, Result};
use crate::link::{chunk_rng, Topology, CHUNK_ROWS};
use crate::quadrature::{integrate, Tolerance};
use crate::special::{coding_constant_unchecked, factorial, ln_coding_constant};

pub const MIN_MC_SAMPLES: u64 = 1_000;
/// Monte-Carlo estimates with fewer outage events are flagged.
pub const MIN_MC_EVENTS: u64 = 100;
pub const Z_95: f64 = 1.96;
pub const MAX_QUADRATURE_LINKS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Quadrature,
    MonteCarlo,
    Asymptotic,
    BoundLower,
    BoundUpper,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
            Method::Asymptotic => "asymptotic",
            Method::BoundLower => "bound-lower",
            Method::BoundUpper => "bound-upper",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageEstimate {
    pub value: f64,
    pub method: Method,
    /// 95 % normal-approximation half width; Monte-Carlo only.
    pub ci_half_width: Option<f64>,
    pub sample_count: Option<u64>,
    /// The asymptote exceeded 1 and was clamped.
    pub saturated: bool,
    /// Fewer than [`MIN_MC_EVENTS`] outages were observed.
    pub few_events: bool,
}

impl OutageEstimate {
    fn plain(value: f64, method: Method) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method,
            ci_half_width: None,
            sample_count: None,
            saturated: false,
            few_events: false,
        }
    }
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

fn check_snrs(snrs: &[f64]) -> Result<()> {
    if snrs.is_empty() {
        return Err(Error::domain("at least one average SNR is required"));
    }
    snrs.iter().try_for_each(|&s| ensure_positive("average SNR", s))
}

/// `φ(x) = log2(1 + x)`.
fn phi(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// `2^R - 1`, the SNR threshold for a single link at rate `R`.
fn snr_threshold(r_c: f64) -> f64 {
    (r_c * LN_2).exp_m1()
}

pub fn instantaneous_capacity(combiner: Combiner, gammas: &[f64]) -> Result<f64> {
    if gammas.is_empty() {
        return Err(Error::domain("at least one instantaneous SNR is required"));
    }
    if let Some(g) = gammas.iter().find(|g| g.is_nan() || **g < 0.0) {
        return Err(Error::domain(format!("instantaneous SNR must be nonnegative, got {g}")));
    }
    Ok(match combiner {
        Combiner::Sc => phi(gammas.iter().copied().fold(0.0, f64::max)),
        Combiner::Mrc => phi(gammas.iter().sum()),
        Combiner::Jd => gammas.iter().map(|&g| phi(g)).sum(),
        Combiner::Sco => phi(gammas[0]),
    })
}

/// Fraction of sampled fading states in outage.
///
/// Draw order matches [`crate::link::sample_snr_block`] for the same seed, so
/// all combiners evaluated on one topology and seed see the same states.
pub fn outage_monte_carlo(
    combiner: Combiner,
    topology: &Topology,
    r_c: f64,
    sample_count: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    check_rate(r_c)?;
    if sample_count < MIN_MC_SAMPLES {
        return Err(Error::domain(format!(
            "Monte-Carlo needs at least {MIN_MC_SAMPLES} samples, got {sample_count}"
        )));
    }
    let events = if r_c == 0.0 {
        0
    } else {
        count_outages(combiner, &topology.average_snrs(), r_c, sample_count, seed)
    };
    let m = sample_count as f64;
    let p = events as f64 / m;
    Ok(OutageEstimate {
        value: p,
        method: Method::MonteCarlo,
        ci_half_width: Some(Z_95 * (p * (1.0 - p) / m).sqrt()),
        sample_count: Some(sample_count),
        saturated: false,
        few_events: events < MIN_MC_EVENTS,
    })
}

fn count_outages(combiner: Combiner, means: &[f64], r_c: f64, count: u64, seed: u64) -> u64 {
    let rows_per_chunk = CHUNK_ROWS as u64;
    let chunks = count.div_ceil(rows_per_chunk);
    // JD compares Π(1+γ) with 2^R; the others compare an SNR with 2^R - 1.
    let jd_limit = r_c.exp2();
    let threshold = snr_threshold(r_c);
    let n = means.len();

    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let rows = rows_per_chunk.min(count - k * rows_per_chunk);
            let mut rng = chunk_rng(seed, k);
            let mut row = vec![0.0; n];
            let mut hits = 0u64;
            for _ in 0..rows {
                for (g, &mean) in row.iter_mut().zip(means) {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    *g = -mean * u.ln();
                }
                let outage = match combiner {
                    Combiner::Jd => row.iter().map(|g| 1.0 + g).product::<f64>() < jd_limit,
                    Combiner::Sc => row.iter().copied().fold(0.0, f64::max) < threshold,
                    Combiner::Mrc => row.iter().sum::<f64>() < threshold,
                    Combiner::Sco => row[0] < threshold,
                };
                hits += outage as u64;
            }
            hits
        })
        .sum()
}

/// Joint-decoding outage by nested adaptive Gauss–Kronrod quadrature.
///
/// Level `i` integrates the exponential density of link `i` over
/// `[0, 2^{R_i} - 1]` where `R_i` is the rate left after the outer links; the
/// innermost level is the closed-form exponential CDF. Each level targets
/// `rel_tol / N`.
pub fn outage_jd_quadrature(avg_snrs: &[f64], r_c: f64, rel_tol: f64) -> Result<OutageEstimate> {
    check_snrs(avg_snrs)?;
    check_rate(r_c)?;
    if avg_snrs.len() > MAX_QUADRATURE_LINKS {
        return Err(Error::UnsupportedLinkCount(avg_snrs.len()));
    }
    if !(1e-10..=1e-3).contains(&rel_tol) {
        return Err(Error::domain(format!(
            "quadrature tolerance must lie in [1e-10, 1e-3], got {rel_tol}"
        )));
    }
    let level_tol = rel_tol / avg_snrs.len() as f64;
    let value = jd_level(avg_snrs, r_c, level_tol)?;
    Ok(OutageEstimate::plain(value, Method::Quadrature))
}

fn jd_level(snrs: &[f64], rate: f64, tol: f64) -> Result<f64> {
    if rate <= 0.0 {
        return Ok(0.0);
    }
    let mean = snrs[0];
    if snrs.len() == 1 {
        return Ok(-(-snr_threshold(rate) / mean).exp_m1());
    }
    // exp(-700) is below the smallest normal double; nothing beyond matters.
    let upper = snr_threshold(rate).min(700.0 * mean);
    let rest = &snrs[1..];
    let r = integrate(
        |g| {
            let inner = jd_level(rest, rate - phi(g), tol)?;
            Ok((-g / mean).exp() / mean * inner)
        },
        0.0,
        upper,
        Tolerance::relative(tol),
    )?;
    Ok(r.value)
}

/// Natural log of the unclamped high-SNR outage expression.
///
/// JD `A_N/ΠΓ̄`, SC `A_1^N/ΠΓ̄`, MRC `A_1^N/(N! ΠΓ̄)`, SCo `A_1/Γ̄_1`.
pub fn ln_asymptotic_outage(combiner: Combiner, avg_snrs: &[f64], r_c: f64) -> Result<f64> {
    check_snrs(avg_snrs)?;
    ensure_positive("spectral efficiency", r_c)?;
    let n = avg_snrs.len();
    let ln_prod: f64 = avg_snrs.iter().map(|s| s.ln()).sum();
    let ln_a1 = ln_coding_constant(1, r_c)?;
    Ok(match combiner {
        Combiner::Jd => ln_coding_constant(n, r_c)? - ln_prod,
        Combiner::Sc => n as f64 * ln_a1 - ln_prod,
        Combiner::Mrc => n as f64 * ln_a1 - factorial(n).ln() - ln_prod,
        Combiner::Sco => ln_a1 - avg_snrs[0].ln(),
    })
}

/// High-SNR asymptote, clamped to 1 with `saturated` set when it exceeds 1.
///
/// For MRC with unequal SNRs the returned expression is the simplex volume,
/// an upper bound at every SNR, tagged [`Method::BoundUpper`].
pub fn outage_asymptotic(combiner: Combiner, avg_snrs: &[f64], r_c: f64) -> Result<OutageEstimate> {
    let ln_value = ln_asymptotic_outage(combiner, avg_snrs, r_c)?;
    let method = match combiner {
        Combiner::Mrc if !all_equal(avg_snrs, MrcRouting::default().equal_tol) => Method::BoundUpper,
        _ => Method::Asymptotic,
    };
    let raw = ln_value.exp();
    let mut est = OutageEstimate::plain(raw, method);
    est.saturated = raw > 1.0;
    Ok(est)
}

/// How MRC chooses between the equal-SNR form, the distinct-SNR form and the
/// numerical convolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrcRouting {
    /// Links count as equal when every pairwise relative gap is below this.
    pub equal_tol: f64,
    /// Links count as distinct when every pairwise relative gap exceeds this.
    pub distinct_tol: f64,
    /// Evaluate the in-between cases by numerical convolution rather than
    /// failing with [`Error::DegenerateSpacing`].
    pub fallback: bool,
}

impl Default for MrcRouting {
    fn default() -> Self {
        Self {
            equal_tol: 1e-9,
            distinct_tol: 1e-4,
            fallback: true,
        }
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b)
}

fn pairwise_gaps(snrs: &[f64]) -> impl Iterator<Item = f64> + '_ {
    snrs.iter()
        .enumerate()
        .flat_map(move |(i, &a)| snrs[i + 1..].iter().map(move |&b| relative_gap(a, b)))
}

fn all_equal(snrs: &[f64], tol: f64) -> bool {
    pairwise_gaps(snrs).all(|g| g < tol)
}

/// Closed-form outage for SC, MRC and SCo.
pub fn outage_exact_closed(combiner: Combiner, avg_snrs: &[f64], r_c: f64) -> Result<OutageEstimate> {
    outage_exact_closed_with(combiner, avg_snrs, r_c, MrcRouting::default())
}

pub fn outage_exact_closed_with(
    combiner: Combiner,
    avg_snrs: &[f64],
    r_c: f64,
    routing: MrcRouting,
) -> Result<OutageEstimate> {
    check_snrs(avg_snrs)?;
    check_rate(r_c)?;
    let a1 = snr_threshold(r_c);
    let exact = |v| Ok(OutageEstimate::plain(v, Method::Exact));
    match combiner {
        Combiner::Jd => Err(Error::domain(
            "joint decoding has no closed-form outage; use quadrature or Monte-Carlo",
        )),
        Combiner::Sco => exact(-(-a1 / avg_snrs[0]).exp_m1()),
        Combiner::Sc => exact(avg_snrs.iter().map(|s| -(-a1 / s).exp_m1()).product()),
        Combiner::Mrc => {
            if all_equal(avg_snrs, routing.equal_tol) {
                let mean = avg_snrs.iter().sum::<f64>() / avg_snrs.len() as f64;
                exact(mrc_equal(avg_snrs.len(), a1 / mean))
            } else if pairwise_gaps(avg_snrs).all(|g| g > routing.distinct_tol) {
                exact(mrc_distinct(avg_snrs, a1))
            } else if routing.fallback {
                let v = mrc_convolution(avg_snrs, a1)?;
                Ok(OutageEstimate::plain(v, Method::Quadrature))
            } else {
                Err(Error::DegenerateSpacing(avg_snrs.to_vec()))
            }
        }
    }
}

/// `1 - e^{-x} Σ_{i<N} x^i/i!`, i.e. the regularized lower incomplete gamma
/// function `P(N, x)`. Below `x = N` the complementary series
/// `e^{-x} Σ_{k≥N} x^k/k!` is summed instead to avoid cancellation.
fn mrc_equal(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < n as f64 {
        let mut term = (1..=n).fold(1.0, |acc, k| acc * x / k as f64);
        let mut sum = 0.0;
        let mut k = n;
        while term > 1e-17 * sum {
            sum += term;
            k += 1;
            term *= x / k as f64;
        }
        (-x).exp() * sum
    } else {
        let mut term = 1.0;
        let mut partial = 1.0;
        for i in 1..n {
            term *= x / i as f64;
            partial += term;
        }
        1.0 - (-x).exp() * partial
    }
}

/// `Σ_i Γ̄_i^{N-1} (1 - e^{-A_1/Γ̄_i}) Π_{j≠i} 1/(Γ̄_i - Γ̄_j)` with compensated
/// summation.
///
/// When every `A_1/Γ̄_i` is small the leading orders of that sum cancel
/// exactly, so the same distribution function is evaluated from its power
/// series instead.
fn mrc_distinct(snrs: &[f64], a1: f64) -> f64 {
    let scaled: Vec<f64> = snrs.iter().map(|s| a1 / s).collect();
    if scaled.iter().sum::<f64>() <= 1.0 {
        return hypoexponential_cdf_series(&scaled);
    }
    let n = snrs.len();
    let terms = snrs.iter().enumerate().map(|(i, &gi)| {
        let mut t = gi.powi(n as i32 - 1) * -(-a1 / gi).exp_m1();
        for (j, &gj) in snrs.iter().enumerate() {
            if j != i {
                t /= gi - gj;
            }
        }
        t
    });
    neumaier_sum(terms).clamp(0.0, 1.0)
}

/// `Pr[Σ X_i ≤ 1]` for independent exponentials with rates `x_i`:
/// `Π x_i · Σ_m (-1)^m h_m(x) / (N+m)!`, with `h_m` the complete homogeneous
/// symmetric polynomials. Accurate for small `Σ x_i`, including ties.
pub(crate) fn hypoexponential_cdf_series(rates: &[f64]) -> f64 {
    const TERMS: usize = 80;
    let mut h = [0.0; TERMS];
    h[0] = 1.0;
    for &x in rates {
        for m in 1..TERMS {
            h[m] += x * h[m - 1];
        }
    }
    let n = rates.len();
    let mut inv_fact = 1.0 / factorial(n);
    let mut sum = 0.0;
    for (m, hm) in h.iter().enumerate() {
        let term = hm * inv_fact;
        let signed = if m % 2 == 0 { term } else { -term };
        sum += signed;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        inv_fact /= (n + m + 1) as f64;
    }
    let prefactor: f64 = rates.iter().product();
    (prefactor * sum).clamp(0.0, 1.0)
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `Pr[Σ Γ_i ≤ A_1]` by nested convolution of exponential densities.
fn mrc_convolution(snrs: &[f64], a1: f64) -> Result<f64> {
    let tol = 1e-10 / snrs.len() as f64;
    Ok(convolution_level(snrs, a1, tol)?.clamp(0.0, 1.0))
}

fn convolution_level(snrs: &[f64], t: f64, tol: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let mean = snrs[0];
    if snrs.len() == 1 {
        return Ok(-(-t / mean).exp_m1());
    }
    let rest = &snrs[1..];
    let r = integrate(
        |x| Ok((-x / mean).exp() / mean * convolution_level(rest, t - x, tol)?),
        0.0,
        t.min(700.0 * mean),
        Tolerance::relative(tol),
    )?;
    Ok(r.value)
}

/// Lower bound obtained by requiring every link to carry `R_c / N`:
/// `[1 - exp(-A_1(R_c/N)/Γ̄)]^N` for equal average SNRs.
pub fn outage_jd_lower_bound_tse(avg_snr: f64, n: usize, r_c: f64) -> Result<OutageEstimate> {
    ensure_positive("average SNR", avg_snr)?;
    check_rate(r_c)?;
    if n == 0 {
        return Err(Error::domain("number of links must be at least 1"));
    }
    let a1_share = coding_constant_unchecked(1, r_c / n as f64);
    let per_link = -(-a1_share / avg_snr).exp_m1();
    Ok(OutageEstimate::plain(per_link.powi(n as i32), Method::BoundLower))
}

/// Deterministic exact outage: closed forms for SC/MRC/SCo, quadrature with
/// `rel_tol` for joint decoding.
pub fn outage_exact(combiner: Combiner, avg_snrs: &[f64], r_c: f64, rel_tol: f64) -> Result<OutageEstimate> {
    match combiner {
        Combiner::Jd => outage_jd_quadrature(avg_snrs, r_c, rel_tol),
        _ => outage_exact_closed(combiner, avg_snrs, r_c),
    }
}
