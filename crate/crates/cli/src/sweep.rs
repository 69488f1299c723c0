//! Parameter sweeps behind the `outage`, `throughput`, `gain` and `dmt`
//! subcommands. Grid points are evaluated in parallel and assembled in grid
//! order, so the output does not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use multiconn::gains::{
    dmt, dmt_empirical, max_multiplexing_gain, required_total_snr, snr_gain_jd_vs, snr_gain_mco_sco,
    snr_gain_mco_sco_approx, GainQuery,
};
use multiconn::link::{db_to_linear, equal_power_topology, linear_to_db, Topology};
use multiconn::outage::{
    outage_asymptotic, outage_exact_closed, outage_jd_lower_bound_tse, outage_jd_quadrature,
    outage_monte_carlo, OutageEstimate, MAX_QUADRATURE_LINKS, MIN_MC_SAMPLES,
};
use multiconn::special::InverseMode;
use multiconn::throughput::{achievable_rate_asymptotic_with, achievable_rate_exact, throughput_from_rate};
use multiconn::Combiner;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::table::{Cell, Table, YScale};

/// Relative tolerance of joint-decoding quadrature in sweeps.
pub const SWEEP_QUADRATURE_TOL: f64 = 1e-6;
/// Rate bracket for exact achievable rates in sweeps.
pub const SWEEP_RATE_BRACKET: (f64, f64) = (1e-9, 512.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepMethod {
    Exact,
    Asymptotic,
    Bound,
    MonteCarlo,
}

impl SweepMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMethod::Exact => "exact",
            SweepMethod::Asymptotic => "asymptotic",
            SweepMethod::Bound => "bound",
            SweepMethod::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for SweepMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SweepMethod::Exact),
            "asymptotic" => Ok(SweepMethod::Asymptotic),
            "bound" => Ok(SweepMethod::Bound),
            "mc" | "monte-carlo" => Ok(SweepMethod::MonteCarlo),
            other => Err(format!("unknown method {other:?} (expected exact, asymptotic, bound or mc)")),
        }
    }
}

/// Link geometry shared by the SNR sweeps. The total power is split equally
/// over the first `n` distances; single connectivity puts it all on link 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSetup {
    /// `None` means unit distances.
    pub distances: Option<Vec<f64>>,
    pub eta: f64,
    pub bandwidth: f64,
}

impl Default for LinkSetup {
    fn default() -> Self {
        Self {
            distances: None,
            eta: 2.0,
            bandwidth: 20e6,
        }
    }
}

impl LinkSetup {
    fn validate(&self, max_n: usize) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(CliError::invalid("eta", format!("must be positive, got {}", self.eta)));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(CliError::invalid("bandwidth-hz", format!("must be positive, got {}", self.bandwidth)));
        }
        if let Some(d) = &self.distances {
            if d.len() < max_n {
                return Err(CliError::invalid(
                    "distances",
                    format!("{} given, {max_n} links requested", d.len()),
                ));
            }
            if let Some(x) = d.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(CliError::invalid("distances", format!("must be positive, got {x}")));
            }
        }
        Ok(())
    }

    fn distances(&self, n: usize) -> Vec<f64> {
        match &self.distances {
            Some(d) => d[..n].to_vec(),
            None => vec![1.0; n],
        }
    }

    fn equal_distances(&self, n: usize) -> bool {
        let d = self.distances(n);
        d.iter().all(|&x| x == d[0])
    }

    fn topology(&self, combiner: Combiner, n: usize, total_db: f64) -> Result<Topology> {
        let n = if combiner == Combiner::Sco { 1 } else { n };
        Ok(equal_power_topology(db_to_linear(total_db), &self.distances(n), self.eta, self.bandwidth)?)
    }
}

fn check_common(combiners: &[Combiner], n_links: &[usize]) -> Result<usize> {
    if combiners.is_empty() {
        return Err(CliError::invalid("combiner", "at least one combiner is required"));
    }
    if n_links.is_empty() || n_links.contains(&0) {
        return Err(CliError::invalid("n-links", "link counts must be at least 1"));
    }
    Ok(*n_links.iter().max().unwrap())
}

fn check_grid(field: &'static str, points: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(CliError::invalid(field, "at least 2 grid points are required"));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(CliError::invalid(field, "grid points must be finite"));
    }
    Ok(())
}

fn check_probability(field: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must lie in (0, 1), got {p}")))
    }
}

fn join_flags(flags: Vec<String>) -> Cell {
    Cell::Text(flags.join(";"))
}

/// Evaluates `f` over `jobs` in parallel, keeping job order.
fn par_rows<J, F>(jobs: Vec<J>, f: F) -> Result<Vec<Vec<Cell>>>
where
    J: Send,
    F: Fn(J) -> Result<Vec<Cell>> + Sync + Send,
{
    jobs.into_par_iter().map(f).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageSweep {
    pub combiners: Vec<Combiner>,
    pub n_links: Vec<usize>,
    pub rate: f64,
    /// Total transmit SNR `P_T/N_0` in dB.
    pub snr_db: Vec<f64>,
    pub methods: Vec<SweepMethod>,
    pub mc_samples: u64,
    pub seed: u64,
    pub links: LinkSetup,
}

impl OutageSweep {
    pub fn validate(&self) -> Result<()> {
        let max_n = check_common(&self.combiners, &self.n_links)?;
        self.links.validate(max_n)?;
        check_grid("snr-db-range", &self.snr_db)?;
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(CliError::invalid("rate", format!("must be positive, got {}", self.rate)));
        }
        if self.methods.is_empty() {
            return Err(CliError::invalid("method", "at least one method is required"));
        }
        if self.methods.contains(&SweepMethod::MonteCarlo) && self.mc_samples < MIN_MC_SAMPLES {
            return Err(CliError::invalid("mc-samples", format!("at least {MIN_MC_SAMPLES} required")));
        }
        for &c in &self.combiners {
            for &m in &self.methods {
                match (c, m) {
                    (Combiner::Jd, SweepMethod::Exact) if max_n > MAX_QUADRATURE_LINKS => {
                        return Err(CliError::invalid(
                            "method",
                            format!("exact jd outage supports at most {MAX_QUADRATURE_LINKS} links; use mc"),
                        ))
                    }
                    (Combiner::Jd, SweepMethod::Bound) => {
                        if let Some(&n) = self.n_links.iter().find(|&&n| !self.links.equal_distances(n)) {
                            return Err(CliError::invalid(
                                "method",
                                format!("the jd lower bound needs equal distances (n = {n})"),
                            ));
                        }
                    }
                    (Combiner::Sc | Combiner::Sco, SweepMethod::Bound) => {
                        return Err(CliError::invalid("method", format!("no bound is available for {c}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn columns(&self) -> Vec<String> {
        let mut cols = vec!["snr_db".to_string(), "n_links".to_string()];
        for c in &self.combiners {
            for m in &self.methods {
                cols.push(format!("{c}_{m}"));
                if *m == SweepMethod::MonteCarlo {
                    cols.push(format!("{c}_{m}_ci"));
                }
            }
        }
        cols.push("flags".into());
        cols
    }

    fn cell(&self, c: Combiner, m: SweepMethod, n: usize, snr_db: f64) -> Result<OutageEstimate> {
        let topo = self.links.topology(c, n, snr_db)?;
        let snrs = topo.average_snrs();
        let r = self.rate;
        Ok(match (m, c) {
            (SweepMethod::Exact, Combiner::Jd) => outage_jd_quadrature(&snrs, r, SWEEP_QUADRATURE_TOL)?,
            (SweepMethod::Exact, _) => outage_exact_closed(c, &snrs, r)?,
            (SweepMethod::Asymptotic, _) => outage_asymptotic(c, &snrs, r)?,
            (SweepMethod::Bound, Combiner::Jd) => outage_jd_lower_bound_tse(snrs[0], n, r)?,
            (SweepMethod::Bound, _) => outage_asymptotic(Combiner::Mrc, &snrs, r)?,
            (SweepMethod::MonteCarlo, _) => outage_monte_carlo(c, &topo, r, self.mc_samples, self.seed)?,
        })
    }
}

pub fn run_outage_sweep(spec: &OutageSweep) -> Result<Table> {
    spec.validate()?;
    let mut table = Table::new(spec.columns(), 2, YScale::Log);
    let jobs: Vec<(f64, usize)> = spec
        .snr_db
        .iter()
        .flat_map(|&s| spec.n_links.iter().map(move |&n| (s, n)))
        .collect();
    table.rows = par_rows(jobs, |(snr_db, n)| {
        let mut row: Vec<Cell> = vec![snr_db.into(), n.into()];
        let mut flags = Vec::new();
        for &c in &spec.combiners {
            for &m in &spec.methods {
                let est = spec.cell(c, m, n, snr_db)?;
                row.push(est.value.into());
                if m == SweepMethod::MonteCarlo {
                    row.push(est.ci_half_width.unwrap_or(0.0).into());
                }
                if est.saturated {
                    flags.push(format!("{c}_{m}:saturated"));
                }
                if est.few_events {
                    flags.push(format!("{c}_{m}:few-events"));
                }
            }
        }
        row.push(join_flags(flags));
        Ok(row)
    })?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputSweep {
    pub combiners: Vec<Combiner>,
    pub n_links: Vec<usize>,
    pub p_out: f64,
    pub snr_db: Vec<f64>,
    /// `Asymptotic` and/or `Exact`.
    pub methods: Vec<SweepMethod>,
    pub links: LinkSetup,
}

impl ThroughputSweep {
    pub fn validate(&self) -> Result<()> {
        let max_n = check_common(&self.combiners, &self.n_links)?;
        self.links.validate(max_n)?;
        check_grid("snr-db-range", &self.snr_db)?;
        check_probability("outage", self.p_out)?;
        if self.methods.is_empty() {
            return Err(CliError::invalid("method", "at least one method is required"));
        }
        for &m in &self.methods {
            match m {
                SweepMethod::Asymptotic => {}
                SweepMethod::Exact => {
                    if self.combiners.contains(&Combiner::Jd) && max_n > MAX_QUADRATURE_LINKS {
                        return Err(CliError::invalid(
                            "method",
                            format!("exact jd rates support at most {MAX_QUADRATURE_LINKS} links"),
                        ));
                    }
                }
                other => {
                    return Err(CliError::invalid("method", format!("{other} is not available for throughput")))
                }
            }
        }
        Ok(())
    }

    fn columns(&self) -> Vec<String> {
        let mut cols = vec!["snr_db".to_string(), "n_links".to_string()];
        for c in &self.combiners {
            for m in &self.methods {
                cols.push(format!("{c}_{m}"));
                if *c == Combiner::Jd && *m == SweepMethod::Asymptotic {
                    cols.push("jd_asymptotic_approx".into());
                }
            }
        }
        cols.push("flags".into());
        cols
    }
}

/// Throughput in bit/s against total SNR. For JD the asymptotic rate is also
/// given with the closed-form approximate inverse (`jd_asymptotic_approx`);
/// where that approximation is undefined the cell is `nan` and flagged.
pub fn run_throughput_sweep(spec: &ThroughputSweep) -> Result<Table> {
    spec.validate()?;
    let mut table = Table::new(spec.columns(), 2, YScale::Linear);
    let jobs: Vec<(f64, usize)> = spec
        .snr_db
        .iter()
        .flat_map(|&s| spec.n_links.iter().map(move |&n| (s, n)))
        .collect();
    let p = spec.p_out;
    let bw = spec.links.bandwidth;
    table.rows = par_rows(jobs, |(snr_db, n)| {
        let mut row: Vec<Cell> = vec![snr_db.into(), n.into()];
        let mut flags = Vec::new();
        for &c in &spec.combiners {
            let snrs = spec.links.topology(c, n, snr_db)?.average_snrs();
            for &m in &spec.methods {
                let rate = match m {
                    SweepMethod::Exact => achievable_rate_exact(c, &snrs, p, SWEEP_RATE_BRACKET)?,
                    _ => achievable_rate_asymptotic_with(c, &snrs, p, InverseMode::Refined)?,
                };
                row.push(throughput_from_rate(bw, rate, p)?.into());
                if c == Combiner::Jd && m == SweepMethod::Asymptotic {
                    match achievable_rate_asymptotic_with(c, &snrs, p, InverseMode::LambertApprox) {
                        Ok(r) => row.push(throughput_from_rate(bw, r, p)?.into()),
                        Err(multiconn::Error::Domain(_)) => {
                            row.push(f64::NAN.into());
                            flags.push("jd_asymptotic_approx:out-of-domain".to_string());
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        row.push(join_flags(flags));
        Ok(row)
    })?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainSweep {
    pub n_links: Vec<usize>,
    pub p_outs: Vec<f64>,
    /// Spectral efficiencies, all positive.
    pub rates: Vec<f64>,
    pub distances: Option<Vec<f64>>,
    pub eta: f64,
}

impl GainSweep {
    pub fn validate(&self) -> Result<()> {
        if self.n_links.is_empty() || self.n_links.iter().any(|&n| n < 2) {
            return Err(CliError::invalid("n-links", "gains need at least 2 links"));
        }
        let max_n = *self.n_links.iter().max().unwrap();
        LinkSetup {
            distances: self.distances.clone(),
            eta: self.eta,
            bandwidth: 1.0,
        }
        .validate(max_n)?;
        check_grid("rate-range", &self.rates)?;
        if let Some(r) = self.rates.iter().find(|r| **r <= 0.0) {
            return Err(CliError::invalid("rate-range", format!("rates must be positive, got {r}")));
        }
        if self.p_outs.is_empty() {
            return Err(CliError::invalid("outage", "at least one outage target is required"));
        }
        for &p in &self.p_outs {
            check_probability("outage", p)?;
        }
        Ok(())
    }
}

pub const GAIN_COLUMNS: [&str; 9] = [
    "rate",
    "n_links",
    "p_out",
    "gain_mco_sco_db",
    "gain_mco_sco_approx_db",
    "gain_jd_sc_db",
    "gain_jd_mrc_db",
    "required_snr_jd_db",
    "required_snr_sco_db",
];

/// SNR gains in dB against spectral efficiency.
pub fn run_gain_sweep(spec: &GainSweep) -> Result<Table> {
    spec.validate()?;
    let mut table = Table::new(GAIN_COLUMNS.iter().map(|s| s.to_string()).collect(), 3, YScale::Linear);
    let mut jobs = Vec::new();
    for &r in &spec.rates {
        for &n in &spec.n_links {
            for &p in &spec.p_outs {
                jobs.push((r, n, p));
            }
        }
    }
    table.rows = par_rows(jobs, |(r, n, p)| {
        let distances = match &spec.distances {
            Some(d) => d[..n].to_vec(),
            None => vec![1.0; n],
        };
        let q = GainQuery::new(r, p, distances, spec.eta)?;
        let db = |x: f64| linear_to_db(x).map_err(CliError::from);
        Ok(vec![
            r.into(),
            n.into(),
            p.into(),
            db(snr_gain_mco_sco(&q)?)?.into(),
            db(snr_gain_mco_sco_approx(&q))?.into(),
            db(snr_gain_jd_vs(Combiner::Sc, n, r)?)?.into(),
            db(snr_gain_jd_vs(Combiner::Mrc, n, r)?)?.into(),
            db(required_total_snr(Combiner::Jd, &q)?)?.into(),
            db(required_total_snr(Combiner::Sco, &q)?)?.into(),
        ])
    })?;
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmtSweep {
    pub combiners: Vec<Combiner>,
    pub n_links: Vec<usize>,
    /// Multiplexing gains per combiner, evenly spaced over its valid interval.
    pub r_steps: usize,
    /// System SNR grid in dB for the empirical estimate.
    pub snr_db: Vec<f64>,
}

pub const DMT_COLUMNS: [&str; 5] = ["r", "combiner", "n_links", "d_analytic", "d_empirical"];

/// Analytic and asymptote-derived diversity gains. Single connectivity is
/// reported once, with one link.
pub fn run_dmt_sweep(spec: &DmtSweep) -> Result<Table> {
    check_common(&spec.combiners, &spec.n_links)?;
    check_grid("snr-db-range", &spec.snr_db)?;
    if spec.r_steps < 2 {
        return Err(CliError::invalid("r-steps", "at least 2 steps are required"));
    }
    let mut jobs = Vec::new();
    for &c in &spec.combiners {
        let ns: Vec<usize> = if c == Combiner::Sco { vec![1] } else { spec.n_links.clone() };
        for n in ns {
            let r_max = max_multiplexing_gain(c, n);
            for k in 0..spec.r_steps {
                jobs.push((c, n, r_max * k as f64 / (spec.r_steps - 1) as f64));
            }
        }
    }
    let mut table = Table::new(DMT_COLUMNS.iter().map(|s| s.to_string()).collect(), 3, YScale::Linear);
    table.rows = par_rows(jobs, |(c, n, r)| {
        let d = dmt(c, r, n).map_err(CliError::from)?;
        let emp = dmt_empirical(c, r, n, &spec.snr_db).map_err(|e| match e {
            multiconn::Error::Domain(m) => CliError::invalid("snr-db-range", m),
            e => e.into(),
        })?;
        Ok(vec![r.into(), Cell::Text(c.to_string()), n.into(), d.d.into(), emp.into()])
    })?;
    Ok(table)
}
