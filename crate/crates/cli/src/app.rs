//! Command-line definitions and dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multiconn::field_trial::SnrModelParams;
use multiconn::Combiner;

use crate::cdf::{long_table, run_cdf, summary, write_cdf_files, CdfJob, CdfMetric, TraceSource};
use crate::error::{CliError, Result};
use crate::grid::Grid;
use crate::preset::Preset;
use crate::selftest::{run_selftest, SelftestOptions};
use crate::sweep::{
    run_dmt_sweep, run_gain_sweep, run_outage_sweep, run_throughput_sweep, DmtSweep, GainSweep, LinkSetup,
    OutageSweep, SweepMethod, ThroughputSweep,
};
use crate::table::{emit, Table};

#[derive(Debug, Parser)]
#[command(name = "multiconn", version, about = "Reliability of multi-connectivity over parallel Rayleigh fading links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage probability against total transmit SNR.
    Outage(SweepArgs),
    /// Throughput at a target outage against total transmit SNR.
    Throughput(SweepArgs),
    /// SNR gains in dB against spectral efficiency.
    Gain(GainArgs),
    /// Diversity-multiplexing tradeoff.
    Dmt(DmtArgs),
    /// Empirical outage or throughput CDFs over a trace.
    Cdf(CdfArgs),
    /// Write a synthetic per-base-station SNR trace.
    SynthTrace(SynthArgs),
    /// Cross-check the numerical methods against each other.
    Selftest(SelftestArgs),
}

/// Flags shared by the sweep subcommands. Unset values come from the preset,
/// then from built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Link counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n_links: Vec<usize>,
    /// Spectral efficiency R_c in source samples per channel symbol.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Target outage probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub outage: Vec<f64>,
    /// Total SNR grid in dB as start:stop:steps.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db_range: Option<Grid>,
    /// jd, sc, mrc or sco; repeatable.
    #[arg(long = "combiner", value_delimiter = ',')]
    pub combiners: Vec<Combiner>,
    /// exact, asymptotic, bound or mc; repeatable.
    #[arg(long = "method", value_delimiter = ',')]
    pub methods: Vec<SweepMethod>,
    #[arg(long)]
    pub mc_samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub bandwidth_hz: Option<f64>,
    /// Link distances in meters, comma separated; link 1 is the
    /// single-connectivity link.
    #[arg(long, value_delimiter = ',')]
    pub distances: Option<Vec<f64>>,
    /// Path loss exponent.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Output file (directory for `cdf`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script next to the output file.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct GainArgs {
    #[command(flatten)]
    pub common: Common,
    /// Spectral-efficiency grid as start:stop:steps.
    #[arg(long, allow_hyphen_values = true)]
    pub rate_range: Option<Grid>,
}

#[derive(Debug, Clone, Args)]
pub struct DmtArgs {
    #[command(flatten)]
    pub common: Common,
    /// Multiplexing gains per combiner over its valid interval.
    #[arg(long)]
    pub r_steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Outage,
    Throughput,
}

#[derive(Debug, Clone, Args)]
pub struct TraceModelArgs {
    #[arg(long, default_value_t = 1000)]
    pub measurements: usize,
    #[arg(long, default_value_t = 16)]
    pub base_stations: usize,
    #[arg(long, default_value_t = SnrModelParams::default().mean_db)]
    pub mean_db: f64,
    #[arg(long, default_value_t = SnrModelParams::default().site_sigma_db)]
    pub site_sigma_db: f64,
    #[arg(long, default_value_t = SnrModelParams::default().link_sigma_db)]
    pub link_sigma_db: f64,
    #[arg(long, default_value_t = SnrModelParams::default().n_sites)]
    pub sites: usize,
}

impl TraceModelArgs {
    fn params(&self) -> SnrModelParams {
        SnrModelParams {
            mean_db: self.mean_db,
            site_sigma_db: self.site_sigma_db,
            link_sigma_db: self.link_sigma_db,
            n_sites: self.sites,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CdfArgs {
    #[command(flatten)]
    pub common: Common,
    /// Trace CSV (`measurement_id,bs_id,avg_snr_db`); a synthetic trace is
    /// generated when omitted.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    #[command(flatten)]
    pub model: TraceModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub model: TraceModelArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Scale every asymptote by this factor (mutation check).
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub perturb_asymptote: f64,
}

const ALL_COMBINERS: [Combiner; 4] = Combiner::ALL;

fn check_preset(common: &Common, subcommand: &str) -> Result<Option<Preset>> {
    match common.preset {
        Some(p) if p.subcommand() != subcommand => Err(CliError::invalid(
            "preset",
            format!("{p} belongs to the {} subcommand", p.subcommand()),
        )),
        p => Ok(p),
    }
}

fn or_vec<T: Clone>(given: &[T], default: &[T]) -> Vec<T> {
    if given.is_empty() {
        default.to_vec()
    } else {
        given.to_vec()
    }
}

fn single_outage(common: &Common, default: f64) -> Result<f64> {
    match common.outage[..] {
        [] => Ok(default),
        [p] => Ok(p),
        _ => Err(CliError::invalid("outage", "exactly one outage target is expected here")),
    }
}

fn links(common: &Common) -> LinkSetup {
    let d = LinkSetup::default();
    LinkSetup {
        distances: common.distances.clone(),
        eta: common.eta.unwrap_or(d.eta),
        bandwidth: common.bandwidth_hz.unwrap_or(d.bandwidth),
    }
}

pub fn outage_spec(common: &Common) -> Result<OutageSweep> {
    let preset = check_preset(common, "outage")?;
    let (combiners, n_links, rate, methods): (&[Combiner], &[usize], f64, &[SweepMethod]) = match preset {
        Some(_) => (
            &[Combiner::Jd],
            &[2, 3, 5],
            0.5,
            &[SweepMethod::MonteCarlo, SweepMethod::Asymptotic, SweepMethod::Bound],
        ),
        None => (&ALL_COMBINERS, &[2], 1.0, &[SweepMethod::Asymptotic]),
    };
    Ok(OutageSweep {
        combiners: or_vec(&common.combiners, combiners),
        n_links: or_vec(&common.n_links, n_links),
        rate: common.rate.unwrap_or(rate),
        snr_db: common.snr_db_range.unwrap_or(Grid { start: 0.0, stop: 40.0, steps: 21 }).points(),
        methods: or_vec(&common.methods, methods),
        mc_samples: common.mc_samples.unwrap_or(1_000_000),
        seed: common.seed.unwrap_or(1),
        links: links(common),
    })
}

pub fn throughput_spec(common: &Common) -> Result<ThroughputSweep> {
    let preset = check_preset(common, "throughput")?;
    let (combiners, n_links): (&[Combiner], &[usize]) = match preset {
        Some(_) => (&[Combiner::Jd, Combiner::Sco], &[2, 3, 5]),
        None => (&ALL_COMBINERS, &[2]),
    };
    Ok(ThroughputSweep {
        combiners: or_vec(&common.combiners, combiners),
        n_links: or_vec(&common.n_links, n_links),
        p_out: single_outage(common, 1e-3)?,
        snr_db: common.snr_db_range.unwrap_or(Grid { start: 0.0, stop: 60.0, steps: 21 }).points(),
        methods: or_vec(&common.methods, &[SweepMethod::Asymptotic]),
        links: links(common),
    })
}

pub fn gain_spec(args: &GainArgs) -> Result<GainSweep> {
    let common = &args.common;
    let preset = check_preset(common, "gain")?;
    let p_outs: &[f64] = match preset {
        Some(Preset::Fig3a) => &[1e-3, 1e-5],
        _ => &[1e-3],
    };
    Ok(GainSweep {
        n_links: or_vec(&common.n_links, &[2, 3, 4]),
        p_outs: or_vec(&common.outage, p_outs),
        rates: args.rate_range.unwrap_or(Grid { start: 0.5, stop: 25.0, steps: 50 }).points(),
        distances: common.distances.clone(),
        eta: common.eta.unwrap_or(LinkSetup::default().eta),
    })
}

pub fn dmt_spec(args: &DmtArgs) -> Result<DmtSweep> {
    let common = &args.common;
    check_preset(common, "dmt")?;
    Ok(DmtSweep {
        combiners: or_vec(&common.combiners, &[Combiner::Jd, Combiner::Sc, Combiner::Mrc]),
        n_links: or_vec(&common.n_links, &[2, 3]),
        r_steps: args.r_steps.unwrap_or(11),
        snr_db: common.snr_db_range.unwrap_or(Grid { start: 60.0, stop: 100.0, steps: 5 }).points(),
    })
}

pub fn cdf_job(args: &CdfArgs) -> Result<CdfJob> {
    let common = &args.common;
    let preset = check_preset(common, "cdf")?;
    let metric = match (args.metric, preset) {
        (Some(MetricArg::Throughput), _) | (None, Some(Preset::Fig5d)) => CdfMetric::Throughput {
            p_out: single_outage(common, 1e-5)?,
            bandwidth: common.bandwidth_hz.unwrap_or(20e6),
        },
        _ => CdfMetric::Outage {
            rate: common.rate.unwrap_or(1.0),
        },
    };
    let source = match &args.trace {
        Some(path) => TraceSource::File(path.clone()),
        None => TraceSource::Synthetic {
            measurements: args.model.measurements,
            base_stations: args.model.base_stations,
            params: args.model.params(),
            seed: common.seed.unwrap_or(1),
        },
    };
    Ok(CdfJob {
        source,
        n_links: or_vec(&common.n_links, &[2, 3]),
        combiners: or_vec(&common.combiners, &[Combiner::Jd, Combiner::Mrc, Combiner::Sc, Combiner::Sco]),
        metric,
    })
}

fn emit_table(table: &Table, common: &Common) -> Result<()> {
    emit(table, common.out.as_deref(), common.gnuplot)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Outage(a) => emit_table(&run_outage_sweep(&outage_spec(&a.common)?)?, &a.common),
        Command::Throughput(a) => emit_table(&run_throughput_sweep(&throughput_spec(&a.common)?)?, &a.common),
        Command::Gain(a) => emit_table(&run_gain_sweep(&gain_spec(&a)?)?, &a.common),
        Command::Dmt(a) => emit_table(&run_dmt_sweep(&dmt_spec(&a)?)?, &a.common),
        Command::Cdf(a) => {
            let job = cdf_job(&a)?;
            let outputs = run_cdf(&job)?;
            eprint!("{}", summary(&outputs));
            match &a.common.out {
                Some(dir) => {
                    if a.common.gnuplot {
                        return Err(CliError::invalid("gnuplot", "not available for cdf output"));
                    }
                    write_cdf_files(&outputs, job.metric, dir).map(|_| ())
                }
                None => emit(&long_table(&outputs), None, a.common.gnuplot),
            }
        }
        Command::SynthTrace(a) => {
            let trace = multiconn::field_trial::synthesize_trace(
                a.model.measurements,
                a.model.base_stations,
                a.model.params(),
                a.seed,
            )?;
            match &a.out {
                Some(path) => {
                    let mut buf = Vec::new();
                    trace.write_csv(&mut buf)?;
                    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))
                }
                None => Ok(trace.write_csv(std::io::stdout().lock())?),
            }
        }
        Command::Selftest(a) => {
            let report = run_selftest(SelftestOptions {
                asymptote_scale: a.perturb_asymptote,
            })?;
            let mut out = std::io::stdout().lock();
            for c in &report.checks {
                writeln!(out, "{c}").map_err(|e| CliError::io("<stdout>", e))?;
            }
            match report.failures() {
                0 => Ok(()),
                n => Err(CliError::SelftestFailed(n)),
            }
        }
    }
}
