//! Per-base-station SNR traces and empirical outage / throughput CDFs over
//! measurements.
//!
//! A trace is a CSV file with header `measurement_id,bs_id,avg_snr_db`;
//! lines starting with `#` are comments. Each measurement is evaluated on
//! its `n` strongest links; measurements with fewer links are skipped and
//! counted.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::combiner::Combiner;
use crate::error::{ensure_positive, ensure_probability_open, Error, Result};
use crate::link::db_to_linear;
use crate::outage::{outage_asymptotic, outage_exact_closed, OutageEstimate};
use crate::throughput::{achievable_rate_asymptotic, throughput_from_rate};

pub const TRACE_HEADER: [&str; 3] = ["measurement_id", "bs_id", "avg_snr_db"];
pub const CDF_HEADER: [&str; 2] = ["value", "probability"];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub measurement_id: u64,
    pub bs_id: String,
    pub avg_snr_db: f64,
}

/// A validated trace: `(measurement_id, bs_id)` pairs are unique and at
/// least one record exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrTrace {
    records: Vec<TraceRecord>,
    // measurement id -> (bs id, dB), sorted by descending SNR then bs id.
    by_measurement: BTreeMap<u64, Vec<(String, f64)>>,
}

impl SnrTrace {
    pub fn new(records: Vec<TraceRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let mut by_measurement: BTreeMap<u64, Vec<(String, f64)>> = BTreeMap::new();
        for r in &records {
            if !r.avg_snr_db.is_finite() {
                return Err(Error::domain(format!(
                    "measurement {} base station {:?}: SNR must be finite",
                    r.measurement_id, r.bs_id
                )));
            }
            by_measurement
                .entry(r.measurement_id)
                .or_default()
                .push((r.bs_id.clone(), r.avg_snr_db));
        }
        for (&id, links) in by_measurement.iter_mut() {
            links.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let mut ids: Vec<&str> = links.iter().map(|l| l.0.as_str()).collect();
            ids.sort_unstable();
            if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateKey {
                    measurement_id: id,
                    bs_id: w[0].to_string(),
                });
            }
        }
        Ok(Self {
            records,
            by_measurement,
        })
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Measurement ids in ascending order.
    pub fn measurement_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.by_measurement.keys().copied()
    }

    pub fn n_measurements(&self) -> usize {
        self.by_measurement.len()
    }

    /// Writes the trace in the loader's format, records in their original order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| io_error("<trace output>", e);
        w.write_record(TRACE_HEADER).map_err(io)?;
        for r in &self.records {
            w.write_record([r.measurement_id.to_string(), r.bs_id.clone(), r.avg_snr_db.to_string()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<trace output>".into(),
            source: e,
        })
    }
}

fn io_error(path: impl AsRef<Path>, e: csv::Error) -> Error {
    let path = path.as_ref().to_path_buf();
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path, source },
        other => Error::Parse {
            path,
            line,
            message: format!("{other:?}"),
        },
    }
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<SnrTrace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_trace(file, path)
}

/// Parses trace CSV from any reader; `origin` is only used in error messages.
pub fn read_trace<R: Read>(input: R, origin: impl AsRef<Path>) -> Result<SnrTrace> {
    let origin = origin.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let parse_err = |line: u64, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let header = reader.headers().map_err(|e| io_error(origin, e))?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(parse_err(1, format!("expected header {}, got {}", TRACE_HEADER.join(","), header.iter().collect::<Vec<_>>().join(","))));
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| io_error(origin, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let measurement_id = row[0]
            .parse::<u64>()
            .map_err(|e| parse_err(line, format!("measurement_id {:?}: {e}", &row[0])))?;
        let bs_id = row[1].to_string();
        if bs_id.is_empty() {
            return Err(parse_err(line, "empty bs_id".into()));
        }
        let avg_snr_db = row[2]
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| parse_err(line, format!("avg_snr_db {:?} is not a finite number", &row[2])))?;
        records.push(TraceRecord {
            measurement_id,
            bs_id,
            avg_snr_db,
        });
    }
    SnrTrace::new(records)
}

/// The `n` largest average SNRs of a measurement, linear and descending.
/// Ties are broken by ascending `bs_id`.
pub fn strongest_links(trace: &SnrTrace, measurement_id: u64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::domain("at least one link must be requested"));
    }
    let links = trace
        .by_measurement
        .get(&measurement_id)
        .ok_or_else(|| Error::domain(format!("unknown measurement {measurement_id}")))?;
    if links.len() < n {
        return Err(Error::InsufficientLinks {
            measurement_id,
            available: links.len(),
            requested: n,
        });
    }
    Ok(links[..n].iter().map(|l| db_to_linear(l.1)).collect())
}

/// Outage of one measurement on its `n` strongest links: asymptotic for JD
/// (clamped at 1), closed form for SC, MRC and SCo. SCo uses the strongest
/// link only.
pub fn measurement_outage(
    trace: &SnrTrace,
    measurement_id: u64,
    n: usize,
    r_c: f64,
    combiner: Combiner,
) -> Result<OutageEstimate> {
    let snrs = strongest_links(trace, measurement_id, n)?;
    match combiner {
        Combiner::Jd => outage_asymptotic(Combiner::Jd, &snrs, r_c),
        Combiner::Sco => outage_exact_closed(Combiner::Sco, &snrs[..1], r_c),
        other => outage_exact_closed(other, &snrs, r_c),
    }
}

/// Throughput in bit/s of one measurement at the asymptotic achievable rate.
pub fn measurement_throughput(
    trace: &SnrTrace,
    measurement_id: u64,
    n: usize,
    p_out: f64,
    bandwidth: f64,
    combiner: Combiner,
) -> Result<f64> {
    let snrs = strongest_links(trace, measurement_id, n)?;
    let snrs = if combiner == Combiner::Sco { &snrs[..1] } else { &snrs[..] };
    let rate = achievable_rate_asymptotic(combiner, snrs, p_out)?;
    throughput_from_rate(bandwidth, rate, p_out)
}

/// Empirical CDF: sorted values with probabilities `k/M`, `k = 1..M`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
    probabilities: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("an empirical CDF needs at least one value"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("an empirical CDF cannot contain NaN"));
        }
        values.sort_by(f64::total_cmp);
        let m = values.len() as f64;
        let probabilities = (1..=values.len()).map(|k| k as f64 / m).collect();
        Ok(Self {
            values,
            probabilities,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Fraction of values `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        k as f64 / self.values.len() as f64
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| io_error("<cdf output>", e);
        w.write_record(CDF_HEADER).map_err(io)?;
        for (v, p) in self.values.iter().zip(&self.probabilities) {
            w.write_record([v.to_string(), p.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<cdf output>".into(),
            source: e,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfReport {
    pub cdf: EmpiricalCdf,
    /// Measurement ids skipped for having fewer than `n` links.
    pub skipped: Vec<u64>,
    /// Rows whose asymptotic outage was clamped at 1.
    pub saturated: usize,
}

fn collect_report(results: Vec<(u64, Result<(f64, bool)>)>) -> Result<CdfReport> {
    let mut values = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    let mut saturated = 0;
    for (id, r) in results {
        match r {
            Ok((v, sat)) => {
                values.push(v);
                saturated += usize::from(sat);
            }
            Err(Error::InsufficientLinks { .. }) => skipped.push(id),
            Err(e) => return Err(e),
        }
    }
    if values.is_empty() {
        return Err(Error::domain(format!(
            "no measurement could be evaluated ({} skipped for too few links)",
            skipped.len()
        )));
    }
    Ok(CdfReport {
        cdf: EmpiricalCdf::from_values(values)?,
        skipped,
        saturated,
    })
}

fn per_measurement<F>(trace: &SnrTrace, f: F) -> Vec<(u64, Result<(f64, bool)>)>
where
    F: Fn(u64) -> Result<(f64, bool)> + Sync,
{
    let ids: Vec<u64> = trace.measurement_ids().collect();
    ids.into_par_iter().map(|id| (id, f(id))).collect()
}

/// CDF over measurements of the per-measurement outage probability.
pub fn empirical_outage_cdf(trace: &SnrTrace, n: usize, r_c: f64, combiner: Combiner) -> Result<CdfReport> {
    ensure_positive("spectral efficiency", r_c)?;
    collect_report(per_measurement(trace, |id| {
        measurement_outage(trace, id, n, r_c, combiner).map(|e| (e.value, e.saturated))
    }))
}

/// CDF over measurements of the per-measurement throughput in bit/s.
pub fn empirical_throughput_cdf(
    trace: &SnrTrace,
    n: usize,
    p_out: f64,
    bandwidth: f64,
    combiner: Combiner,
) -> Result<CdfReport> {
    ensure_probability_open("outage probability", p_out)?;
    ensure_positive("bandwidth", bandwidth)?;
    collect_report(per_measurement(trace, |id| {
        measurement_throughput(trace, id, n, p_out, bandwidth, combiner).map(|t| (t, false))
    }))
}

/// Parameters of the synthetic trace generator.
///
/// Base station `b` sits on site `b mod n_sites`. Its average SNR in
/// measurement `m` is `mean_db + S_site + L_{m,b}` with site offsets
/// `S ~ N(0, site_sigma_db²)` drawn once per trace and per-link terms
/// `L ~ N(0, link_sigma_db²)` (log-normal in linear scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrModelParams {
    pub mean_db: f64,
    pub site_sigma_db: f64,
    pub link_sigma_db: f64,
    pub n_sites: usize,
}

impl Default for SnrModelParams {
    fn default() -> Self {
        Self {
            mean_db: 15.0,
            site_sigma_db: 3.0,
            link_sigma_db: 8.0,
            n_sites: 5,
        }
    }
}

/// Deterministic synthetic trace with ids `0..n_measurements` and base
/// stations `bs00`, `bs01`, ...
pub fn synthesize_trace(
    n_measurements: usize,
    n_bs: usize,
    params: SnrModelParams,
    seed: u64,
) -> Result<SnrTrace> {
    if n_measurements == 0 || n_bs == 0 || params.n_sites == 0 {
        return Err(Error::domain("measurement, base station and site counts must be at least 1"));
    }
    if !params.mean_db.is_finite() {
        return Err(Error::domain("mean SNR must be finite"));
    }
    let normal = |sigma: f64| {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::domain(format!("spread must be finite and nonnegative, got {sigma}")));
        }
        Normal::new(0.0, sigma).map_err(|e| Error::domain(e.to_string()))
    };
    let site = normal(params.site_sigma_db)?;
    let link = normal(params.link_sigma_db)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<f64> = (0..params.n_sites).map(|_| site.sample(&mut rng)).collect();
    let width = (n_bs - 1).to_string().len().max(2);
    let mut records = Vec::with_capacity(n_measurements * n_bs);
    for m in 0..n_measurements as u64 {
        for b in 0..n_bs {
            records.push(TraceRecord {
                measurement_id: m,
                bs_id: format!("bs{b:0width$}"),
                avg_snr_db: params.mean_db + offsets[b % params.n_sites] + link.sample(&mut rng),
            });
        }
    }
    SnrTrace::new(records)
}
