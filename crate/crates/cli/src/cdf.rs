//! Empirical outage and throughput CDFs over a trace (`cdf` subcommand).

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use multiconn::field_trial::{
    empirical_outage_cdf, empirical_throughput_cdf, load_trace, synthesize_trace, CdfReport, SnrModelParams,
    SnrTrace,
};
use multiconn::Combiner;

use crate::error::{CliError, Result};
use crate::table::{Cell, Table, YScale};

#[derive(Debug, Clone, PartialEq)]
pub enum TraceSource {
    File(PathBuf),
    Synthetic {
        measurements: usize,
        base_stations: usize,
        params: SnrModelParams,
        seed: u64,
    },
}

impl TraceSource {
    pub fn load(&self) -> Result<SnrTrace> {
        match self {
            TraceSource::File(path) => Ok(load_trace(path)?),
            TraceSource::Synthetic {
                measurements,
                base_stations,
                params,
                seed,
            } => Ok(synthesize_trace(*measurements, *base_stations, *params, *seed)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdfMetric {
    Outage { rate: f64 },
    Throughput { p_out: f64, bandwidth: f64 },
}

impl CdfMetric {
    pub fn name(&self) -> &'static str {
        match self {
            CdfMetric::Outage { .. } => "outage",
            CdfMetric::Throughput { .. } => "throughput",
        }
    }
}

impl fmt::Display for CdfMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfJob {
    pub source: TraceSource,
    pub n_links: Vec<usize>,
    pub combiners: Vec<Combiner>,
    pub metric: CdfMetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfOutput {
    pub combiner: Combiner,
    pub n_links: usize,
    pub report: CdfReport,
}

impl CdfOutput {
    pub fn file_name(&self, metric: CdfMetric) -> String {
        format!("{metric}_{}_n{}.csv", self.combiner, self.n_links)
    }
}

/// One CDF per (link count, combiner), in that nesting order.
pub fn run_cdf(job: &CdfJob) -> Result<Vec<CdfOutput>> {
    if job.combiners.is_empty() {
        return Err(CliError::invalid("combiner", "at least one combiner is required"));
    }
    if job.n_links.is_empty() || job.n_links.contains(&0) {
        return Err(CliError::invalid("n-links", "link counts must be at least 1"));
    }
    match job.metric {
        CdfMetric::Outage { rate } if !(rate.is_finite() && rate > 0.0) => {
            return Err(CliError::invalid("rate", format!("must be positive, got {rate}")))
        }
        CdfMetric::Throughput { p_out, .. } if !(p_out > 0.0 && p_out < 1.0) => {
            return Err(CliError::invalid("outage", format!("must lie in (0, 1), got {p_out}")))
        }
        CdfMetric::Throughput { bandwidth, .. } if !(bandwidth.is_finite() && bandwidth > 0.0) => {
            return Err(CliError::invalid("bandwidth-hz", format!("must be positive, got {bandwidth}")))
        }
        _ => {}
    }
    let trace = job.source.load()?;
    let mut out = Vec::new();
    for &n in &job.n_links {
        for &c in &job.combiners {
            let report = match job.metric {
                CdfMetric::Outage { rate } => empirical_outage_cdf(&trace, n, rate, c)?,
                CdfMetric::Throughput { p_out, bandwidth } => empirical_throughput_cdf(&trace, n, p_out, bandwidth, c)?,
            };
            out.push(CdfOutput {
                combiner: c,
                n_links: n,
                report,
            });
        }
    }
    Ok(out)
}

/// All CDFs in one long table: `combiner,n_links,value,probability`.
pub fn long_table(outputs: &[CdfOutput]) -> Table {
    let cols = ["combiner", "n_links", "value", "probability"].map(String::from).to_vec();
    let mut t = Table::new(cols, 2, YScale::Linear);
    for o in outputs {
        let cdf = &o.report.cdf;
        for (v, p) in cdf.values().iter().zip(cdf.probabilities()) {
            t.rows.push(vec![Cell::Text(o.combiner.to_string()), o.n_links.into(), (*v).into(), (*p).into()]);
        }
    }
    t
}

/// Writes one `value,probability` file per CDF into `dir`, returning the paths.
pub fn write_cdf_files(outputs: &[CdfOutput], metric: CdfMetric, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths = Vec::new();
    for o in outputs {
        let path = dir.join(o.file_name(metric));
        let mut buf = Vec::new();
        o.report.cdf.write_csv(&mut buf)?;
        fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Human-readable summary of skipped and saturated measurements.
pub fn summary(outputs: &[CdfOutput]) -> String {
    outputs
        .iter()
        .map(|o| {
            format!(
                "{} n={}: {} measurements, {} skipped, {} saturated\n",
                o.combiner,
                o.n_links,
                o.report.cdf.len(),
                o.report.skipped.len(),
                o.report.saturated
            )
        })
        .collect()
}
