//! Links, topologies and the Rayleigh block-fading SNR sampler.
//!
//! Everything here is linear scale. Samples are generated in chunks of
//! [`CHUNK_ROWS`] rows; chunk `k` draws from a ChaCha8 stream keyed by
//! `(seed, k)`, so the assembled block does not depend on how chunks are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};

pub const CHUNK_ROWS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    /// Transmit power over noise power, `P_i / N_0`.
    pub power_ratio: f64,
    /// Distance to the UE in meters.
    pub distance: f64,
    pub path_loss_exponent: f64,
}

impl Link {
    pub fn new(power_ratio: f64, distance: f64, path_loss_exponent: f64) -> Result<Self> {
        ensure_positive("power ratio", power_ratio)?;
        ensure_positive("distance", distance)?;
        ensure_positive("path loss exponent", path_loss_exponent)?;
        Ok(Self {
            power_ratio,
            distance,
            path_loss_exponent,
        })
    }

    /// `Γ̄ = (P/N_0) · d^{-η}`.
    pub fn average_snr(&self) -> f64 {
        self.power_ratio * self.distance.powf(-self.path_loss_exponent)
    }
}

/// An ordered set of parallel links. Link 1 (index 0) is the
/// single-connectivity reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    links: Vec<Link>,
    bandwidth: f64,
}

impl Topology {
    pub fn new(links: Vec<Link>, bandwidth: f64) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::domain("a topology needs at least one link"));
        }
        ensure_positive("bandwidth", bandwidth)?;
        Ok(Self { links, bandwidth })
    }

    /// Unit-distance links whose average SNRs are exactly `snrs`.
    pub fn from_average_snrs(snrs: &[f64], bandwidth: f64) -> Result<Self> {
        let links = snrs
            .iter()
            .map(|&s| Link::new(s, 1.0, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(links, bandwidth)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn n_links(&self) -> usize {
        self.links.len()
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn average_snrs(&self) -> Vec<f64> {
        self.links.iter().map(Link::average_snr).collect()
    }
}

/// Splits `total_power_ratio` equally over one link per distance.
pub fn equal_power_topology(
    total_power_ratio: f64,
    distances: &[f64],
    eta: f64,
    bandwidth: f64,
) -> Result<Topology> {
    ensure_positive("total power ratio", total_power_ratio)?;
    if distances.is_empty() {
        return Err(Error::domain("at least one distance is required"));
    }
    let per_link = total_power_ratio / distances.len() as f64;
    let links = distances
        .iter()
        .map(|&d| Link::new(per_link, d, eta))
        .collect::<Result<Vec<_>>>()?;
    Topology::new(links, bandwidth)
}

pub fn average_snrs(topology: &Topology) -> Vec<f64> {
    topology.average_snrs()
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    ensure_positive("linear power ratio", x)?;
    Ok(10.0 * x.log10())
}

/// Instantaneous SNR realizations, row-major `count × n_links`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSampleBlock {
    samples: Vec<f64>,
    n_links: usize,
    seed: u64,
}

impl SnrSampleBlock {
    pub fn count(&self) -> usize {
        self.samples.len() / self.n_links
    }

    pub fn n_links(&self) -> usize {
        self.n_links
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[i * self.n_links..(i + 1) * self.n_links]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.n_links)
    }

    pub fn column(&self, link: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[link])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.samples
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Fills `out` (a whole number of rows) with exponential draws of the given
/// means, using the stream of chunk `chunk`.
pub(crate) fn fill_chunk(means: &[f64], seed: u64, chunk: u64, out: &mut [f64]) {
    let mut rng = chunk_rng(seed, chunk);
    for row in out.chunks_exact_mut(means.len()) {
        for (g, &mean) in row.iter_mut().zip(means) {
            // random() is in [0, 1); 1 - u lies in (0, 1] so ln stays finite.
            let u: f64 = 1.0 - rng.random::<f64>();
            *g = -mean * u.ln();
        }
    }
}

/// Draws `count` i.i.d. exponential SNR vectors with means `Γ̄_i`.
pub fn sample_snr_block(topology: &Topology, count: usize, seed: u64) -> Result<SnrSampleBlock> {
    if count == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let means = topology.average_snrs();
    let n = means.len();
    let mut samples = vec![0.0; count * n];
    samples
        .par_chunks_mut(CHUNK_ROWS * n)
        .enumerate()
        .for_each(|(k, chunk)| fill_chunk(&means, seed, k as u64, chunk));
    Ok(SnrSampleBlock {
        samples,
        n_links: n,
        seed,
    })
}
