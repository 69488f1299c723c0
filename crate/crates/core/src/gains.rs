//! Required SNR, SNR gains of multi-connectivity, their slopes, and the
//! diversity-multiplexing tradeoff.
//!
//! Gains are linear power ratios; slopes are in dB. Link 1 (index 0) of a
//! query is the single-connectivity reference.

use std::f64::consts::{LN_10, LN_2};

use crate::combiner::Combiner;
use crate::error::{ensure_positive, ensure_probability_open, Error, Result};
use crate::outage::ln_asymptotic_outage;
use crate::special::{factorial, ln_coding_constant};

/// Minimum span of a grid handed to [`dmt_empirical`].
pub const DMT_MIN_GRID_SPAN_DB: f64 = 40.0;
/// Rate offset keeping `R_c = r log2(NΓ̄) + offset` positive at `r = 0`.
pub const DMT_RATE_OFFSET: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GainQuery {
    r_c: f64,
    p_out: f64,
    distances: Vec<f64>,
    eta: f64,
}

impl GainQuery {
    /// One link per distance; `distances[0]` is the single-connectivity link.
    pub fn new(r_c: f64, p_out: f64, distances: Vec<f64>, eta: f64) -> Result<Self> {
        ensure_positive("spectral efficiency", r_c)?;
        ensure_probability_open("outage probability", p_out)?;
        if distances.is_empty() {
            return Err(Error::domain("at least one distance is required"));
        }
        for &d in &distances {
            ensure_positive("distance", d)?;
        }
        ensure_positive("path loss exponent", eta)?;
        Ok(Self {
            r_c,
            p_out,
            distances,
            eta,
        })
    }

    /// `n` links at unit distance.
    pub fn unit(n: usize, r_c: f64, p_out: f64) -> Result<Self> {
        Self::new(r_c, p_out, vec![1.0; n], 1.0)
    }

    pub fn n_links(&self) -> usize {
        self.distances.len()
    }

    pub fn r_c(&self) -> f64 {
        self.r_c
    }

    pub fn p_out(&self) -> f64 {
        self.p_out
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `ln d_i^{-η}`
    fn ln_path_gain(&self, i: usize) -> f64 {
        -self.eta * self.distances[i].ln()
    }

    fn ln_path_gain_sum(&self) -> f64 {
        (0..self.n_links()).map(|i| self.ln_path_gain(i)).sum()
    }
}

/// Total transmit SNR `P_T/N_0` that meets the query's outage target.
///
/// JD: `N (A_N/P)^{1/N} / (Πd_i^{-η})^{1/N}`; SCo: `A_1/(P d_1^{-η})`.
pub fn required_total_snr(combiner: Combiner, query: &GainQuery) -> Result<f64> {
    let ln_p = query.p_out.ln();
    match combiner {
        Combiner::Jd => {
            let nf = query.n_links() as f64;
            let ln_an = ln_coding_constant(query.n_links(), query.r_c)?;
            Ok((nf.ln() + (ln_an - ln_p - query.ln_path_gain_sum()) / nf).exp())
        }
        Combiner::Sco => {
            let ln_a1 = ln_coding_constant(1, query.r_c)?;
            Ok((ln_a1 - ln_p - query.ln_path_gain(0)).exp())
        }
        other => Err(Error::domain(format!("required SNR is defined for jd and sco, not {other}"))),
    }
}

/// SNR gain of joint-decoding multi-connectivity over single connectivity,
/// `A_1/(N A_N^{1/N}) · P^{-(N-1)/N} · (Πd_i^{-η})^{1/N} / d_1^{-η}`.
pub fn snr_gain_mco_sco(query: &GainQuery) -> Result<f64> {
    let n = query.n_links();
    let nf = n as f64;
    let ln_a1 = ln_coding_constant(1, query.r_c)?;
    let ln_an = ln_coding_constant(n, query.r_c)?;
    let ln_gain = ln_a1 - nf.ln() - ln_an / nf - (nf - 1.0) / nf * query.p_out.ln()
        + query.ln_path_gain_sum() / nf
        - query.ln_path_gain(0);
    Ok(ln_gain.exp())
}

/// High-rate form of [`snr_gain_mco_sco`]:
/// `((N-1)!/(ln2^{N-1} N^N))^{1/N} · 2^{R(N-1)/N} / R^{(N-1)/N} · P^{-(N-1)/N}`
/// times the distance factor.
pub fn snr_gain_mco_sco_approx(query: &GainQuery) -> f64 {
    let n = query.n_links();
    let nf = n as f64;
    let k = (nf - 1.0) / nf;
    let ln_const = (factorial(n - 1).ln() - (nf - 1.0) * LN_2.ln() - nf * nf.ln()) / nf;
    let ln_gain = ln_const + k * (query.r_c * LN_2 - query.r_c.ln() - query.p_out.ln())
        + query.ln_path_gain_sum() / nf
        - query.ln_path_gain(0);
    ln_gain.exp()
}

/// SNR gain of JD over SC (`A_1/A_N^{1/N}`) or MRC (that divided by
/// `(N!)^{1/N}`) at equal average SNRs.
pub fn snr_gain_jd_vs(reference: Combiner, n: usize, r_c: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("a gain comparison needs at least two links, got {n}")));
    }
    ensure_positive("spectral efficiency", r_c)?;
    let nf = n as f64;
    let ln_vs_sc = ln_coding_constant(1, r_c)? - ln_coding_constant(n, r_c)? / nf;
    match reference {
        Combiner::Sc => Ok(ln_vs_sc.exp()),
        Combiner::Mrc => Ok((ln_vs_sc - factorial(n).ln() / nf).exp()),
        other => Err(Error::domain(format!("reference must be sc or mrc, got {other}"))),
    }
}

/// Constants used when reporting slopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlopeConstants {
    /// Rounded 4.3 and 3 dB.
    Rounded,
    /// `10/ln 10` and `10 log10 2`.
    #[default]
    Exact,
}

impl SlopeConstants {
    fn db_per_neper(self) -> f64 {
        match self {
            SlopeConstants::Rounded => 4.3,
            SlopeConstants::Exact => 10.0 / LN_10,
        }
    }

    fn db_per_doubling(self) -> f64 {
        match self {
            SlopeConstants::Rounded => 3.0,
            SlopeConstants::Exact => 10.0 * LN_2 / LN_10,
        }
    }
}

fn check_multi(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("slopes need at least two links, got {n}")));
    }
    Ok(())
}

/// Derivative of the gain in dB with respect to the outage probability,
/// `-c (N-1)/N / P` with `c ≈ 4.3`.
pub fn gain_slope_wrt_outage(n: usize, p_out: f64, constants: SlopeConstants) -> Result<f64> {
    check_multi(n)?;
    ensure_probability_open("outage probability", p_out)?;
    let nf = n as f64;
    Ok(-constants.db_per_neper() * (nf - 1.0) / nf / p_out)
}

/// High-rate slope of the gain in dB per unit spectral efficiency,
/// `c (N-1)/N` with `c ≈ 3`.
pub fn gain_slope_wrt_rate(n: usize, constants: SlopeConstants) -> Result<f64> {
    check_multi(n)?;
    let nf = n as f64;
    Ok(constants.db_per_doubling() * (nf - 1.0) / nf)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtPoint {
    pub r: f64,
    pub d: f64,
}

/// Largest multiplexing gain a combiner supports with `n` links.
pub fn max_multiplexing_gain(combiner: Combiner, n: usize) -> f64 {
    match combiner {
        Combiner::Jd => n as f64,
        _ => 1.0,
    }
}

/// Analytic tradeoff: JD `N - r` on `[0, N]`, SC and MRC `N(1 - r)` on
/// `[0, 1]`, SCo `1 - r` on `[0, 1]`.
pub fn dmt(combiner: Combiner, r: f64, n: usize) -> Result<DmtPoint> {
    if n == 0 {
        return Err(Error::UnsupportedLinkCount(0));
    }
    let r_max = max_multiplexing_gain(combiner, n);
    if !(0.0..=r_max).contains(&r) {
        return Err(Error::domain(format!(
            "multiplexing gain {r} outside [0, {r_max}] for {combiner}"
        )));
    }
    let nf = n as f64;
    let d = match combiner {
        Combiner::Jd => nf - r,
        Combiner::Sc | Combiner::Mrc => nf * (1.0 - r),
        Combiner::Sco => 1.0 - r,
    };
    Ok(DmtPoint { r, d: d.max(0.0) })
}

/// Diversity gain read off the high-SNR outage expression with the rate
/// scaled as `R_c = r log2(NΓ̄) + 1`.
///
/// `snr_grid_db` holds system SNRs `NΓ̄` (equal per-link SNRs) and must span
/// at least [`DMT_MIN_GRID_SPAN_DB`]; the slope is taken between its two
/// largest points.
pub fn dmt_empirical(combiner: Combiner, r: f64, n: usize, snr_grid_db: &[f64]) -> Result<f64> {
    dmt(combiner, r, n)?;
    if snr_grid_db.len() < 2 || snr_grid_db.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("the SNR grid needs at least two finite points"));
    }
    let mut grid = snr_grid_db.to_vec();
    grid.sort_by(f64::total_cmp);
    let span = grid[grid.len() - 1] - grid[0];
    if span < DMT_MIN_GRID_SPAN_DB {
        return Err(Error::domain(format!(
            "the SNR grid spans {span} dB, at least {DMT_MIN_GRID_SPAN_DB} dB is required"
        )));
    }
    let (lo, hi) = (grid[grid.len() - 2], grid[grid.len() - 1]);
    if hi <= lo {
        return Err(Error::domain("the two largest grid points coincide"));
    }
    let ln_outage = |snr_db: f64| {
        let system = 10f64.powf(snr_db / 10.0);
        let r_c = r * system.log2() + DMT_RATE_OFFSET;
        ln_asymptotic_outage(combiner, &vec![system / n as f64; n], r_c)
    };
    let ln_snr_step = (hi - lo) / 10.0 * LN_10;
    Ok(-(ln_outage(hi)? - ln_outage(lo)?) / ln_snr_step)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::special::coding_constant;

    fn db(x: f64) -> f64 {
        10.0 * x.log10()
    }

    #[test]
    fn required_snr_examples() {
        let sco = required_total_snr(Combiner::Sco, &GainQuery::unit(1, 1.0, 1e-3).unwrap()).unwrap();
        assert_relative_eq!(sco, 1e3, max_relative = 1e-12);

        let q = GainQuery::unit(2, 1.0, 1e-3).unwrap();
        let jd = required_total_snr(Combiner::Jd, &q).unwrap();
        let oracle = 2.0 * (coding_constant(2, 1.0).unwrap() / 1e-3).sqrt();
        assert_relative_eq!(jd, oracle, max_relative = 1e-12);
        assert!((jd - 39.31).abs() < 0.01);

        for (r, p) in [(0.5, 1e-2), (3.0, 1e-5)] {
            let q = GainQuery::new(r, p, vec![1.7], 3.0).unwrap();
            assert_relative_eq!(
                required_total_snr(Combiner::Jd, &q).unwrap(),
                required_total_snr(Combiner::Sco, &q).unwrap(),
                max_relative = 1e-12
            );
        }
        assert!(required_total_snr(Combiner::Sc, &q).is_err());
    }

    #[test]
    fn query_validation() {
        assert!(GainQuery::new(0.0, 1e-3, vec![1.0], 2.0).is_err());
        assert!(GainQuery::new(1.0, 1.0, vec![1.0], 2.0).is_err());
        assert!(GainQuery::new(1.0, 1e-3, vec![], 2.0).is_err());
        assert!(GainQuery::new(1.0, 1e-3, vec![1.0, -2.0], 2.0).is_err());
        assert!(GainQuery::new(1.0, 1e-3, vec![1.0], 0.0).is_err());
    }

    #[test]
    fn mco_gain_examples() {
        let g = snr_gain_mco_sco(&GainQuery::unit(2, 1.0, 1e-3).unwrap()).unwrap();
        assert!((g - 25.44).abs() < 0.01, "{g}");
        assert!((db(g) - 14.05).abs() < 0.01);

        for r in [0.1, 1.0, 7.0] {
            for p in [1e-1, 1e-4] {
                let g = snr_gain_mco_sco(&GainQuery::unit(1, r, p).unwrap()).unwrap();
                assert_relative_eq!(g, 1.0, max_relative = 1e-12);
                assert_relative_eq!(snr_gain_mco_sco_approx(&GainQuery::unit(1, r, p).unwrap()), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn gain_shift_for_two_decades_of_outage() {
        for n in 2..=6 {
            for r in [0.5, 2.0, 10.0] {
                let g3 = snr_gain_mco_sco(&GainQuery::unit(n, r, 1e-3).unwrap()).unwrap();
                let g5 = snr_gain_mco_sco(&GainQuery::unit(n, r, 1e-5).unwrap()).unwrap();
                let nf = n as f64;
                assert!((db(g5) - db(g3) - 20.0 * (nf - 1.0) / nf).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gain_is_ratio_of_required_snrs() {
        for dists in [vec![1.0, 1.0], vec![1.0, 2.5, 0.7], vec![3.0, 1.0, 1.5, 2.0, 1.1]] {
            for eta in [2.0, 3.7] {
                for r in [0.2, 1.0, 6.0, 30.0] {
                    for p in [0.1, 1e-3, 1e-7] {
                        let q = GainQuery::new(r, p, dists.clone(), eta).unwrap();
                        let ratio = required_total_snr(Combiner::Sco, &q).unwrap()
                            / required_total_snr(Combiner::Jd, &q).unwrap();
                        assert_relative_eq!(snr_gain_mco_sco(&q).unwrap(), ratio, max_relative = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn gain_exceeds_one_in_the_asymptotic_regime() {
        for n in 2..=8 {
            for r in [0.5, 1.0, 4.0, 16.0] {
                for p in [1e-1, 1e-3, 1e-6] {
                    assert!(snr_gain_mco_sco(&GainQuery::unit(n, r, p).unwrap()).unwrap() > 1.0);
                }
            }
        }
    }

    #[test]
    fn approximate_gain_tracks_exact() {
        let ratio = |n, r, p| {
            let q = GainQuery::unit(n, r, p).unwrap();
            snr_gain_mco_sco_approx(&q) / snr_gain_mco_sco(&q).unwrap()
        };
        assert!((ratio(2, 25.0, 1e-3) - 1.0).abs() < 0.05);
        let r3 = ratio(3, 10.0, 1e-3);
        assert!(r3.is_finite() && (r3 - 1.0).abs() < 0.15, "{r3}");
        // Converges as the rate grows.
        assert!((ratio(2, 200.0, 1e-3) - 1.0).abs() < (ratio(2, 25.0, 1e-3) - 1.0).abs());
    }

    #[test]
    fn jd_versus_sc_and_mrc() {
        assert!((snr_gain_jd_vs(Combiner::Sc, 2, 1.0).unwrap() - 1.6089).abs() < 1e-4);
        for n in 2..=8 {
            let root = factorial(n).powf(1.0 / n as f64);
            for r in [0.01, 0.5, 1.0, 5.0, 20.0] {
                let sc = snr_gain_jd_vs(Combiner::Sc, n, r).unwrap();
                let mrc = snr_gain_jd_vs(Combiner::Mrc, n, r).unwrap();
                assert!(mrc > 1.0);
                assert!(sc > root);
                assert_relative_eq!(sc / mrc, root, max_relative = 1e-12);
            }
            assert!(snr_gain_jd_vs(Combiner::Mrc, n, 1e-3).unwrap() < 1.01);
        }
        assert!(snr_gain_jd_vs(Combiner::Sc, 1, 1.0).is_err());
        assert!(snr_gain_jd_vs(Combiner::Jd, 2, 1.0).is_err());
    }

    #[test]
    fn outage_slope() {
        assert_relative_eq!(gain_slope_wrt_outage(2, 1e-3, SlopeConstants::Rounded).unwrap(), -2150.0, max_relative = 1e-12);
        assert!(gain_slope_wrt_outage(1, 1e-3, SlopeConstants::Rounded).is_err());
        assert!(gain_slope_wrt_outage(2, 0.0, SlopeConstants::Rounded).is_err());
        // Large-N factor tends to -4.3/P.
        let big = gain_slope_wrt_outage(10_000, 1e-3, SlopeConstants::Rounded).unwrap();
        assert!((big / -4300.0 - 1.0).abs() < 1e-3);

        for n in [2, 3, 5] {
            for p in [1e-2, 1e-3, 1e-5] {
                let h = p * 1e-4;
                let g = |p| db(snr_gain_mco_sco(&GainQuery::unit(n, 2.0, p).unwrap()).unwrap());
                let fd = (g(p + h) - g(p - h)) / (2.0 * h);
                for c in [SlopeConstants::Rounded, SlopeConstants::Exact] {
                    let analytic = gain_slope_wrt_outage(n, p, c).unwrap();
                    assert!((fd / analytic - 1.0).abs() < 0.01, "n={n} p={p}: {fd} vs {analytic}");
                }
            }
        }
    }

    #[test]
    fn rate_slope() {
        assert_eq!(gain_slope_wrt_rate(2, SlopeConstants::Rounded).unwrap(), 1.5);
        assert!((gain_slope_wrt_rate(2, SlopeConstants::Exact).unwrap() - 1.5051).abs() < 1e-4);
        assert!((gain_slope_wrt_rate(4, SlopeConstants::Exact).unwrap() - 2.258).abs() < 1e-3);
        assert!(gain_slope_wrt_rate(1, SlopeConstants::Exact).is_err());

        // The finite-difference slope carries a -10(N-1)/(N R ln 10) correction
        // and approaches the constant from below.
        for n in [2usize, 3, 5] {
            let g = |r| db(snr_gain_mco_sco(&GainQuery::unit(n, r, 1e-3).unwrap()).unwrap());
            let fd = |r: f64| g(r + 0.5) - g(r - 0.5);
            let exact = gain_slope_wrt_rate(n, SlopeConstants::Exact).unwrap();
            let nf = n as f64;
            for r in [25.0, 100.0, 400.0] {
                let corrected = exact - 10.0 * (nf - 1.0) / (nf * r * LN_10);
                assert!((fd(r) / corrected - 1.0).abs() < 0.01, "n={n} r={r}");
            }
            assert!(fd(25.0) < fd(100.0) && fd(100.0) < fd(400.0));
            assert!((fd(400.0) / exact - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn dmt_examples() {
        assert_eq!(dmt(Combiner::Jd, 0.0, 5).unwrap().d, 5.0);
        assert_eq!(dmt(Combiner::Jd, 5.0, 5).unwrap().d, 0.0);
        assert_eq!(dmt(Combiner::Mrc, 0.5, 4).unwrap().d, 2.0);
        assert_eq!(dmt(Combiner::Sc, 1.0, 3).unwrap().d, 0.0);
        assert_eq!(dmt(Combiner::Sco, 0.25, 1).unwrap().d, 0.75);
        assert!(dmt(Combiner::Sc, 1.5, 3).is_err());
        assert!(dmt(Combiner::Jd, 5.5, 5).is_err());
        assert!(dmt(Combiner::Jd, -0.1, 5).is_err());
        // JD gains one unit of diversity per added link at every r.
        for n in 1..6 {
            for r in [0.0, 0.3, 1.0] {
                let d = |n| dmt(Combiner::Jd, r, n).unwrap().d;
                assert_relative_eq!(d(n + 1) - d(n), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn empirical_dmt_examples() {
        let grid: Vec<f64> = (0..=4).map(|k| 60.0 + 10.0 * k as f64).collect();
        assert!((dmt_empirical(Combiner::Jd, 0.0, 3, &grid).unwrap() - 3.0).abs() < 0.05);
        assert!((dmt_empirical(Combiner::Sc, 0.5, 2, &grid).unwrap() - 1.0).abs() < 0.1);
        assert!((dmt_empirical(Combiner::Jd, 1.0, 2, &grid).unwrap() - 1.0).abs() < 0.1);
        assert!(dmt_empirical(Combiner::Jd, 1.0, 2, &[80.0, 100.0]).is_err());
        assert!(dmt_empirical(Combiner::Jd, 1.0, 2, &[60.0]).is_err());
        assert!(dmt_empirical(Combiner::Sc, 2.0, 2, &grid).is_err());
    }

    #[test]
    fn empirical_dmt_converges() {
        let grid: Vec<f64> = (0..=4).map(|k| 60.0 + 10.0 * k as f64).collect();
        for n in [2usize, 3] {
            for comb in [Combiner::Jd, Combiner::Sc, Combiner::Mrc] {
                let r_max = max_multiplexing_gain(comb, n);
                for r in [0.0, 0.5 * r_max, r_max] {
                    let analytic = dmt(comb, r, n).unwrap().d;
                    let est = dmt_empirical(comb, r, n, &grid).unwrap();
                    assert!((est - analytic).abs() < 0.1, "{comb} n={n} r={r}: {est} vs {analytic}");
                }
            }
        }
        for r in [0.0, 0.5, 1.0] {
            let est = dmt_empirical(Combiner::Sco, r, 1, &grid).unwrap();
            assert!((est - (1.0 - r)).abs() < 0.01);
        }
    }

    #[test]
    fn empirical_jd_dmt_has_a_logarithmic_correction() {
        // With R_c growing like r log2 SNR, A_N carries an R^{N-1} factor, so
        // the estimate sits below N - r by about (N-1) Δln R / Δln SNR.
        for n in [2usize, 3, 5] {
            let nf = n as f64;
            for r in [0.5, nf] {
                let mut prev_err = f64::INFINITY;
                for top in [80.0, 100.0, 200.0, 400.0] {
                    let est = dmt_empirical(Combiner::Jd, r, n, &[top - 40.0, top - 10.0, top]).unwrap();
                    let rate = |db: f64| r * (db / 10.0 * LN_10).exp().log2() + DMT_RATE_OFFSET;
                    let predicted = nf - r - (nf - 1.0) * (rate(top) / rate(top - 10.0)).ln() / LN_10;
                    assert!((est - predicted).abs() < 0.03, "n={n} r={r} top={top}: {est} vs {predicted}");
                    let err = (nf - r - est).abs();
                    assert!(err < prev_err);
                    prev_err = err;
                }
            }
        }
    }
}
