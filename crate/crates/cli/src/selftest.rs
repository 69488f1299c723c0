//! Oracle-equivalence checks on a fixed grid: quadrature vs Monte-Carlo vs
//! asymptote vs closed forms.

use std::f64::consts::LN_2;
use std::fmt;

use multiconn::link::Topology;
use multiconn::outage::{
    outage_asymptotic, outage_exact_closed, outage_jd_lower_bound_tse, outage_jd_quadrature, outage_monte_carlo,
};
use multiconn::quadrature::{integrate, Tolerance};
use multiconn::special::coding_constant;
use multiconn::{Combiner, Result};

const MC_SAMPLES: u64 = 1_000_000;
const MC_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    /// Multiplies every asymptotic outage before comparison; 1 for a real
    /// run, anything else to confirm the checks can fail.
    pub asymptote_scale: f64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self { asymptote_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn volume(k: usize, x: f64) -> Result<f64> {
    match k {
        0 => Ok(1.0),
        1 => Ok(x.exp2() - 1.0),
        _ => Ok(integrate(
            |u| Ok(volume(k - 1, x - u)? * LN_2 * u.exp2()),
            0.0,
            x,
            Tolerance::relative(1e-11),
        )?
        .value),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn run_selftest(opts: SelftestOptions) -> Result<SelftestReport> {
    let scale = opts.asymptote_scale;
    let asym = |c, snrs: &[f64], r| -> Result<f64> { Ok(outage_asymptotic(c, snrs, r)?.value * scale) };
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for n in 2..=3 {
        for r in [0.5, 2.0] {
            worst = worst.max(rel(coding_constant(n, r)?, volume(n, r)?));
        }
    }
    checks.push(check("coding-constant-vs-volume", worst < 1e-8, format!("max rel err {worst:.2e}")));

    let snrs = [2.0, 5.0];
    let q = outage_jd_quadrature(&snrs, 1.0, 1e-9)?.value;
    let mc = outage_monte_carlo(Combiner::Jd, &Topology::from_average_snrs(&snrs, 1.0)?, 1.0, MC_SAMPLES, MC_SEED)?;
    let ci = mc.ci_half_width.unwrap_or(0.0);
    checks.push(check(
        "jd-quadrature-vs-mc",
        (mc.value - q).abs() <= 4.0 * ci,
        format!("quadrature {q:.6e}, mc {:.6e} ± {ci:.1e}", mc.value),
    ));

    for (name, comb, snrs) in [
        ("sc-closed-vs-mc", Combiner::Sc, vec![3.0, 6.0]),
        ("mrc-closed-vs-mc", Combiner::Mrc, vec![1.0, 3.0, 9.0]),
    ] {
        let exact = outage_exact_closed(comb, &snrs, 2.0)?.value;
        let mc = outage_monte_carlo(comb, &Topology::from_average_snrs(&snrs, 1.0)?, 2.0, MC_SAMPLES, MC_SEED)?;
        let ci = mc.ci_half_width.unwrap_or(0.0);
        checks.push(check(
            name,
            (mc.value - exact).abs() <= 4.0 * ci,
            format!("closed {exact:.6e}, mc {:.6e} ± {ci:.1e}", mc.value),
        ));
    }

    let snrs = [1e3, 1e3];
    let q = outage_jd_quadrature(&snrs, 2.0, 1e-9)?.value;
    let a = asym(Combiner::Jd, &snrs, 2.0)?;
    checks.push(check(
        "jd-asymptote-vs-quadrature",
        rel(a, q) < 0.02,
        format!("asymptote {a:.6e}, quadrature {q:.6e}"),
    ));

    for (name, comb, snrs) in [
        ("mrc-asymptote-vs-closed", Combiner::Mrc, vec![1e3; 3]),
        ("sc-asymptote-vs-closed", Combiner::Sc, vec![1e3, 2e3]),
        ("sco-asymptote-vs-closed", Combiner::Sco, vec![1e3]),
    ] {
        let exact = outage_exact_closed(comb, &snrs, 1.0)?.value;
        let a = asym(comb, &snrs, 1.0)?;
        checks.push(check(name, rel(a, exact) < 0.01, format!("asymptote {a:.6e}, closed {exact:.6e}")));
    }

    let mut ordered = true;
    let mut detail = String::from("Tse <= quadrature <= asymptote on 6 points");
    for n in [2, 3] {
        for (snr, r) in [(3.0, 0.5), (30.0, 1.0), (300.0, 3.0)] {
            let snrs = vec![snr; n];
            let lower = outage_jd_lower_bound_tse(snr, n, r)?.value;
            let q = outage_jd_quadrature(&snrs, r, 1e-9)?.value;
            let upper = asym(Combiner::Jd, &snrs, r)?.min(1.0);
            if !(lower <= q && q <= upper) {
                ordered = false;
                detail = format!("n={n} snr={snr} r={r}: {lower:.4e} / {q:.4e} / {upper:.4e}");
            }
        }
    }
    checks.push(check("jd-bound-ordering", ordered, detail));

    Ok(SelftestReport { checks })
}
